"""Seeded instance generators with planted answers."""
from __future__ import annotations

import random
from typing import List

from .numerics import rank
from .problem import InequalitySystem

KINDS = ("feasible", "infeasible", "random", "stress-edge")


def _row(rng: random.Random, n: int, bound: int) -> List[int]:
    while True:
        r = [rng.randint(-bound, bound) for _ in range(n)]
        if any(r):
            return r


def gen(kind: str, n: int, m: int, bits: int = 3, seed: int = 0) -> InequalitySystem:
    """Build a system; entries stay within ``[-(2**bits - 1), 2**bits - 1]``
    except for stress-edge, whose basis carries one entry near ``2**bits``.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if n < 1 or m < 1 or bits < 1:
        raise ValueError("n, m and bits must be positive")
    rng = random.Random(f"{kind}:{n}:{m}:{bits}:{seed}")
    bound = 2 ** bits - 1

    if kind == "random":
        return InequalitySystem.from_rows([_row(rng, n, bound) for _ in range(m)])

    if kind == "feasible":
        x = _row(rng, n, bound)
        rows = []
        while len(rows) < m:
            r = _row(rng, n, bound)
            if sum(a * b for a, b in zip(r, x)) > 0:
                rows.append(r)
        return InequalitySystem.from_rows(rows)

    if kind == "infeasible":
        # the planted support spans R^n, so A x >= 0 forces x = 0
        if m < max(3, n + 1):
            raise ValueError("infeasible instances need m >= max(3, n + 1)")
        for _ in range(100000):
            rows = [_row(rng, n, bound) for _ in range(m - 1)]
            k = rng.randint(max(2, n), m - 1)
            support = sorted(rng.sample(range(m - 1), k))
            if rank([rows[s] for s in support]) < n:
                continue
            weights = [0] * (m - 1)
            for s in support:
                weights[s] = rng.randint(1, 2)
            last = [-sum(w * r[c] for w, r in zip(weights, rows)) for c in range(n)]
            if any(last) and max(abs(v) for v in last) <= bound:
                rows.append(last)
                return InequalitySystem.from_rows(rows)
        raise RuntimeError("could not plant an infeasible instance within the entry bound")

    # stress-edge: rows e_1 and K e_1 + e_2 pin a vertex at distance ~K
    if n < 2:
        raise ValueError("stress-edge needs n >= 2")
    K = 2 ** bits - rng.randint(0, 2 ** max(bits - 2, 0))
    base = []
    for k in range(n):
        r = [0] * n
        r[k] = 1
        if k == 1:
            r[0] = K
        base.append(r)
    x = [1] + [-(K // 2)] + [1] * (n - 2)
    rows = list(base)
    small = 3
    while len(rows) < m:
        r = _row(rng, n, small)
        if sum(a * b for a, b in zip(r, x)) > 0:
            rows.append(r)
    return InequalitySystem.from_rows(rows[:m])
