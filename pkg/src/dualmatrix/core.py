"""Dual matrix state and the standard climbing step.

The state keeps a non-negative matrix B (rows = simplex faces, columns =
revealed constraints), C = B A and its inverse V, and the positive row
vector d = u V where u is the sum of the starting basis rows. Vertex k of
the enclosing simplex is column k of V divided by d_k. The valuation
det(D C) = prod(d) * |det C| grows on every accepted step.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import numerics as nx
from .numerics import Q


class GainViolated(ArithmeticError):
    pass


class InvariantBreach(AssertionError):
    pass


@dataclass
class Origin:
    basis_ids: Tuple[int, ...]
    V: nx.Matrix
    vertices: List[nx.Vector]


@dataclass
class DmaState:
    n: int
    rows: Dict[int, Tuple[Q, ...]]
    B: List[Dict[int, Q]]
    V: nx.Matrix
    d: nx.Vector
    u: nx.Vector
    abs_det_c: Q
    origin: Origin
    # derived values (vertices, valuation); any mutation must go through copy() or refresh()
    cache: dict = field(default_factory=dict, repr=False, compare=False)

    def copy(self) -> "DmaState":
        return DmaState(
            n=self.n,
            rows=dict(self.rows),
            B=[dict(r) for r in self.B],
            V=[list(r) for r in self.V],
            d=list(self.d),
            u=self.u,
            abs_det_c=self.abs_det_c,
            origin=self.origin,
        )

    def C(self) -> nx.Matrix:
        out = []
        for brow in self.B:
            acc = [Q(0)] * self.n
            for cid, coef in brow.items():
                for k, x in enumerate(self.rows[cid]):
                    acc[k] += coef * x
            out.append(acc)
        return out

    def max_support(self) -> int:
        return max(sum(1 for v in r.values() if v) for r in self.B)


@dataclass
class StepReport:
    step_type: str
    i: Optional[int]
    j: Optional[int]
    s: Optional[int]
    lam: Q
    valuation: Q
    max_support: int
    accepted: bool = True
    note: str = ""
    t: Optional[Q] = None
    delta: Optional[nx.Vector] = None

    @property
    def valuation_log2(self) -> float:
        return nx.log2(self.valuation)


def init_state(basis: Sequence[Tuple[int, Sequence]]) -> DmaState:
    """Start from B^o: identity on the n basis columns."""
    ids = tuple(cid for cid, _ in basis)
    rows = {cid: tuple(nx.vector(a)) for cid, a in basis}
    An = [list(rows[cid]) for cid in ids]
    n = len(An)
    if any(len(r) != n for r in An):
        raise ValueError("basis must be n rows of length n")
    V = nx.invert(An)
    u = [nx.qsum(col) for col in zip(*An)]
    d = nx.vec_mat(u, V)
    B = [{cid: Q(1)} for cid in ids]
    origin = Origin(basis_ids=ids, V=[list(r) for r in V],
                    vertices=[nx.column(V, k) for k in range(n)])
    return DmaState(n=n, rows=rows, B=B, V=V, d=d, u=u,
                    abs_det_c=abs(nx.det(An)), origin=origin)


def vertices(state: DmaState):
    """Return (vertex list, vertex sum, center)."""
    hit = state.cache.get("vertices")
    if hit is None:
        n = state.n
        vs = [[state.V[r][k] / state.d[k] for r in range(n)] for k in range(n)]
        vbar = [nx.qsum(col) for col in zip(*vs)]
        center = [x / (n + 1) for x in vbar]
        hit = state.cache["vertices"] = (vs, vbar, center)
    return hit


class EarlyInfeasible:
    def __repr__(self):
        return "EarlyInfeasible"


EARLY_INFEASIBLE = EarlyInfeasible()


def choose_pivot(state: DmaState, a: Sequence, vs: Optional[List[nx.Vector]] = None):
    """Index j of the vertex maximizing a.v_j, or EARLY_INFEASIBLE."""
    if vs is None:
        vs = vertices(state)[0]
    values = [nx.dot(a, v) for v in vs]
    best = max(values)
    if best <= 0:
        return EARLY_INFEASIBLE
    return values.index(best)


def choose_s(n: int) -> int:
    if n < 2:
        raise ValueError("standard steps need n >= 2")
    return max(2, n - 1)


def gain_bound(n: int, s: int) -> Q:
    if s < 2:
        raise ValueError("s must be >= 2")
    s2 = Q(s * s)
    return (1 - 1 / s2) ** (n - 1) * (1 + n / (s2 - 1))


def valuation(state: DmaState) -> Q:
    """det(D C) = prod(d) * |det C|."""
    v = state.cache.get("valuation")
    if v is None:
        v = state.abs_det_c
        for x in state.d:
            v *= x
        state.cache["valuation"] = v
    return v


def valuation_log2(state: DmaState) -> float:
    return nx.log2(valuation(state))


def standard_step(state: DmaState, i: int, a: Sequence, j: int, s: int,
                  round_bits: Optional[int] = None):
    """Apply the rank-one update driven by row ``a`` (id ``i``) at vertex ``j``.

    Returns ``(new_state, report)``; the input state is left untouched.
    With ``round_bits`` the coefficient t is rounded to that many
    significant bits and GainViolated is raised when the realized gain
    falls below ``gain_bound(n, s)``.
    """
    n = state.n
    a = tuple(nx.vector(a))
    aV = nx.vec_mat(a, state.V)
    # a.v_k = (aV)_k / d_k
    av_all = [aV[k] / state.d[k] for k in range(n)]
    av = av_all[j]
    if av <= 0:
        raise ValueError("pivot needs a.v_j > 0")
    s2 = s * s
    t = (s2 - 1) * av
    if round_bits is not None:
        t = nx.round_sig(t, round_bits)
    denom = t + av  # equals s^2 av when t is exact
    dj = state.d[j]

    new = state.copy()
    new.rows.setdefault(i, a)
    new.B[j][i] = new.B[j].get(i, Q(0)) + 1 / (t * dj)

    # Sherman-Morrison: V' = V - v_j (aV) / (t + av), v_j = V e_j / d_j
    vj = [state.V[r][j] / dj for r in range(n)]
    coef = [x / denom for x in aV]
    new.V = [[state.V[r][k] - vj[r] * coef[k] for k in range(n)] for r in range(n)]

    if round_bits is None:
        delta = [1 - av_all[k] / denom for k in range(n)]
        delta[j] = 1 - Q(1, s2)
        det_sigma = Q(s2, s2 - 1)
    else:
        delta = [1 - av_all[k] / denom for k in range(n)]
        det_sigma = denom / t
    new.d = [state.d[k] * delta[k] for k in range(n)]
    new.abs_det_c = state.abs_det_c * det_sigma

    lam = Q(1)
    for k in range(n):
        if k != j:
            lam *= delta[k]
    if round_bits is not None and lam < gain_bound(n, s):
        raise GainViolated(f"rounded step gained {lam}, below bound")
    report = StepReport(
        step_type="standard", i=i, j=j, s=s, lam=lam,
        valuation=valuation(new), max_support=new.max_support(),
        t=t, delta=delta,
    )
    return new, report


def check_invariants(state: DmaState) -> None:
    """Exact re-check of V (B A) = I, d = u V > 0 and B >= 0."""
    n = state.n
    C = state.C()
    if nx.mat_mul(state.V, C) != nx.identity(n):
        raise InvariantBreach("V (B A) != I")
    if nx.vec_mat(state.u, state.V) != state.d:
        raise InvariantBreach("d != u V")
    if any(x <= 0 for x in state.d):
        raise InvariantBreach("d has a non-positive entry")
    if any(v < 0 for r in state.B for v in r.values()):
        raise InvariantBreach("B has a negative entry")
    if abs(nx.det(C)) != state.abs_det_c:
        raise InvariantBreach("|det C| drifted")


def refresh(state: DmaState) -> DmaState:
    """Recompute V, d and |det C| from B after an arbitrary change of B."""
    state.cache.clear()
    C = state.C()
    state.V = nx.invert(C)
    state.d = nx.vec_mat(state.u, state.V)
    state.abs_det_c = abs(nx.det(C))
    return state
