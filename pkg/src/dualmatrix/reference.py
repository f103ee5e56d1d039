"""Fourier-Motzkin elimination for strict homogeneous systems.

Ground truth for tests only; the solver never imports this module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from . import numerics as nx
from .problem import InequalitySystem


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class FMVerdict:
    feasible: bool
    witness: Optional[nx.Vector] = None


def _normalize(row: Sequence[int]) -> Tuple[int, ...]:
    g = math.gcd(*row)
    return tuple(x // g for x in row) if g else tuple(row)


def fm_feasible(system: InequalitySystem, max_rows: int = 20000) -> FMVerdict:
    """Decide ``A x > 0`` by eliminating the last variable first.

    Rows stay integral (positive combinations, gcd-normalized) and each
    derived row keeps the strict sense. A row with all coefficients zero
    means ``0 > 0``.
    """
    n = system.n
    levels: List[List[Tuple[int, ...]]] = []
    rows = sorted({_normalize(r) for r in system.rows})
    for var in reversed(range(n)):
        if any(not any(r[: var + 1]) for r in rows):
            return FMVerdict(False)
        levels.append(rows)
        pos = [r for r in rows if r[var] > 0]
        neg = [r for r in rows if r[var] < 0]
        keep = [r for r in rows if r[var] == 0]
        if len(keep) + len(pos) * len(neg) > max_rows:
            raise BudgetExceeded(f"projection would hold {len(keep) + len(pos) * len(neg)} rows")
        new = set(keep)
        for p in pos:
            for q in neg:
                new.add(_normalize([-q[var] * pk + p[var] * qk for pk, qk in zip(p, q)]))
        rows = sorted(new)
    if rows:
        # every surviving row has all coefficients zero
        return FMVerdict(False)

    x = [Fraction(0)] * n
    for var, lvl in zip(range(n), reversed(levels)):
        lo = hi = None
        for r in lvl:
            c = r[var]
            if c == 0:
                continue
            rest = sum((r[k] * x[k] for k in range(var)), Fraction(0))
            bound = -rest / c
            if c > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is not None and hi is not None:
            x[var] = (lo + hi) / 2
        elif lo is not None:
            x[var] = lo + 1
        elif hi is not None:
            x[var] = hi - 1
    return FMVerdict(True, x)
