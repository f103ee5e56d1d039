"""Separation oracles: given a candidate x, name a row a with a.x <= 0."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import numerics as nx
from .numerics import Q
from .problem import BitParams, PreparedSystem, bit_params


class RankDeficientFamily(ValueError):
    pass


class PrecisionExhausted(ArithmeticError):
    pass


@dataclass(frozen=True)
class Violated:
    id: int
    row: Tuple[Q, ...]


class NoneViolated:
    def __repr__(self):
        return "NoneViolated"

    def __eq__(self, other):
        return isinstance(other, NoneViolated)

    def __hash__(self):
        return 0


NONE_VIOLATED = NoneViolated()
OracleResponse = Union[Violated, NoneViolated]


class Oracle:
    """Contract shared by all constraint families.

    ``finite_m`` is the row count when the family is finite, else None.
    ``bit_params`` is present only for integer families, where the
    approximate certificate threshold is defined.
    """

    n: int
    finite_m: Optional[int] = None
    bit_params: Optional[BitParams] = None

    def initial_basis(self) -> List[Tuple[int, Tuple[Q, ...]]]:
        raise NotImplementedError

    def find_violated(self, x: Sequence) -> OracleResponse:
        raise NotImplementedError

    def row(self, cid: int) -> Tuple[Q, ...]:
        raise NotImplementedError

    def budget_L(self) -> int:
        raise NotImplementedError


class DenseOracle(Oracle):
    """Row scan over a prepared finite system; ids are original row indices."""

    def __init__(self, prepared: PreparedSystem):
        if prepared.system is None:
            raise RankDeficientFamily("all rows are zero")
        self.prepared = prepared
        self.system = prepared.system
        self.n = self.system.n
        self.finite_m = self.system.m
        self.bit_params = bit_params(self.system)
        self._rows = [tuple(Q(x) for x in r) for r in self.system.rows]

    def initial_basis(self):
        basis = self.prepared.basis_rows
        if len(basis) < self.n:
            raise RankDeficientFamily(f"rows span {len(basis)} < {self.n} dimensions")
        return [(k, self._rows[k]) for k in basis]

    def find_violated(self, x):
        for k, a in enumerate(self._rows):
            if nx.dot(a, x) <= 0:
                return Violated(k, a)
        return NONE_VIOLATED

    def row(self, cid):
        return self._rows[cid]

    def budget_L(self):
        return self.bit_params.L


class BallOracle(Oracle):
    """The infinite family ``{a : |a - c| <= r}``.

    ``min over the family of a.x`` is ``c.x - r|x|``, so x is a witness iff
    ``c.x > 0`` and ``(c.x)^2 > r^2 |x|^2``. For a violated x we return a
    rational member on the far side of x's hyperplane: ``c - tau x`` with
    ``tau`` between ``c.x/|x|^2`` (touching) and ``r/|x|`` (deepest).
    """

    def __init__(self, center: Sequence, radius, depth_bits: int = 32):
        self.center = tuple(nx.q(c) for c in center)
        self.radius = nx.q(radius)
        if self.radius < 0:
            raise ValueError("radius must be non-negative")
        self.n = len(self.center)
        self.depth_bits = depth_bits
        self._ids: Dict[Tuple[Q, ...], int] = {}
        self._rows: List[Tuple[Q, ...]] = []

    def _intern(self, row) -> Tuple[int, Tuple[Q, ...]]:
        row = tuple(row)
        cid = self._ids.get(row)
        if cid is None:
            cid = len(self._rows)
            self._ids[row] = cid
            self._rows.append(row)
        return cid, row

    def is_member(self, a: Sequence) -> bool:
        return nx.norm2(nx.sub(a, self.center)) <= self.radius ** 2

    def initial_basis(self):
        picked = [self.center]
        # c + r e_k, last coordinate first; each is a member at distance r
        for k in reversed(range(self.n)):
            if len(picked) == self.n:
                break
            cand = list(self.center)
            cand[k] += self.radius
            if nx.rank(picked + [cand]) > len(picked):
                picked.append(tuple(cand))
        if nx.rank(picked) < self.n:
            raise RankDeficientFamily("ball family spans too few dimensions")
        return [self._intern(a) for a in picked]

    def find_violated(self, x):
        x = nx.vector(x)
        cx = nx.dot(self.center, x)
        xx = nx.norm2(x)
        if cx > 0 and cx * cx > self.radius ** 2 * xx:
            return NONE_VIOLATED
        if cx <= 0:
            return Violated(*self._intern(self.center))
        tau = cx / xx
        deep = self._deep_tau(xx)
        if deep is not None and deep > tau:
            tau = deep
        a = tuple(c - tau * xi for c, xi in zip(self.center, x))
        if not (self.is_member(a) and nx.dot(a, x) <= 0):
            raise PrecisionExhausted("could not certify a violating member")
        return Violated(*self._intern(a))

    def _deep_tau(self, xx: Q) -> Optional[Q]:
        # r / q with q a dyadic upper bound on |x|, so tau <= r/|x| exactly
        if self.radius == 0:
            return None
        shift = self.depth_bits
        num = xx.numerator << (2 * shift)
        root = math.isqrt(num // xx.denominator) + 1
        upper = Q(root, 1 << shift)
        tau = nx.round_sig(self.radius / upper, self.depth_bits)
        while tau * tau * xx > self.radius ** 2:
            tau = tau * Q(2 ** self.depth_bits - 1, 2 ** self.depth_bits)
        return tau

    def row(self, cid):
        return self._rows[cid]

    def budget_L(self):
        widest = max(
            max(abs(c.numerator).bit_length(), c.denominator.bit_length())
            for c in self.center + (self.radius,)
        )
        l = 1 + max(self.n.bit_length(), widest)
        return self.n * l
