"""Occasional deviations from the standard step.

Both are accepted only when the valuation says so: sparsification leaves
C = B A untouched, and long-edge re-enclosure must strictly raise det(D C).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import numerics as nx
from .numerics import Q
from .core import DmaState, StepReport, refresh, valuation, vertices


class DegenerateOrigin(ValueError):
    pass


class KernelDeficit(ArithmeticError):
    pass


# -- long edges ---------------------------------------------------------------

def long_edge_trigger(state: DmaState, L: int, factor=4) -> Optional[Tuple[int, int]]:
    if factor <= 0:
        raise ValueError("factor must be positive")
    vs = vertices(state)[0]
    biggest = max(abs(x) for v in vs for x in v)
    if biggest == 0 or nx.log2(biggest) < factor * L:
        return None
    best = None
    for i in range(state.n):
        for j in range(i + 1, state.n):
            length = nx.norm2(nx.sub(vs[j], vs[i]))
            if best is None or length > best[0]:
                best = (length, i, j)
    return best[1], best[2]


@dataclass
class LongEdgeContext:
    i_edge: int
    j_edge: int
    w: nx.Vector
    M: Q
    spread: Q
    t_prime: Q
    t_dev: Q
    h_ij: nx.Vector
    # reversed direction, w -> -w
    M_rev: Q
    t_prime_rev: Q
    t_dev_rev: Q
    h_ji: nx.Vector


def _direction(w, v_far, origin_vertices, u, d_near):
    proj = [nx.dot(w, v) for v in origin_vertices]
    M = max(proj)
    spread = M - min(proj)
    if spread == 0:
        raise DegenerateOrigin("origin vertices have zero spread along w")
    t_prime = (nx.dot(w, v_far) - M) / spread
    t_dev = max(Q(0), t_prime - 1) / (nx.norm2(w) * d_near)
    h = [(M * uk - wk) * t_dev for uk, wk in zip(u, w)]
    return M, spread, t_prime, t_dev, h


def edge_context(w, v_far, origin_vertices, u, d_near):
    """Single-direction formulas, exposed for direct-input checks.

    Returns ``(M, spread, t_prime, t_dev, h)``.
    """
    return _direction(nx.vector(w), nx.vector(v_far), origin_vertices,
                      nx.vector(u), nx.q(d_near))


def build_context(state: DmaState, i_edge: int, j_edge: int) -> LongEdgeContext:
    vs = vertices(state)[0]
    vi, vj = vs[i_edge], vs[j_edge]
    if vi == vj:
        raise DegenerateOrigin("edge endpoints coincide")
    w = nx.sub(vj, vi)
    ov = state.origin.vertices
    M, spread, tp, td, h = _direction(w, vj, ov, state.u, state.d[i_edge])
    wr = [-x for x in w]
    Mr, _, tpr, tdr, hr = _direction(wr, vi, ov, state.u, state.d[j_edge])
    return LongEdgeContext(i_edge, j_edge, w, M, spread, tp, td, h, Mr, tpr, tdr, hr)


def increment(state: DmaState, w: Sequence, M: Q, t_dev: Q):
    """B-row increment ``t (M 1 - w V^o) B^o`` as a {constraint id: value} map."""
    wV = nx.vec_mat(w, state.origin.V)
    return {cid: t_dev * (M - wV[k]) for k, cid in enumerate(state.origin.basis_ids)}


def reenclose(state: DmaState, ctx: LongEdgeContext, L: int = 0):
    """Swap faces c_i, c_j for c_i + h_ij, c_j + h_ji when that climbs.

    Returns ``(state', report)``. On rejection ``state'`` is ``state``.
    """
    before = valuation(state)
    w = ctx.w
    log_w = nx.log2(nx.norm2(w)) / 2
    note = f"claim_log2={log_w - 3 * L:.6f}"

    def reject(reason):
        return state, StepReport("long_edge", ctx.i_edge, ctx.j_edge, None, Q(1),
                                 before, state.max_support(), accepted=False,
                                 note=f"{note};rejected={reason}")

    if ctx.t_dev == 0 and ctx.t_dev_rev == 0:
        return reject("no_gain")
    inc_i = increment(state, w, ctx.M, ctx.t_dev)
    inc_j = increment(state, [-x for x in w], ctx.M_rev, ctx.t_dev_rev)
    if any(v < 0 for v in list(inc_i.values()) + list(inc_j.values())):
        raise AssertionError("re-enclosure increment is negative")
    new = state.copy()
    for row, inc in ((ctx.i_edge, inc_i), (ctx.j_edge, inc_j)):
        for cid, v in inc.items():
            if v:
                new.B[row][cid] = new.B[row].get(cid, Q(0)) + v
    try:
        refresh(new)
    except nx.Singular:
        return reject("singular")
    if any(x <= 0 for x in new.d):
        return reject("unbounded")
    after = valuation(new)
    if after <= before:
        return reject("no_gain")
    return new, StepReport("long_edge", ctx.i_edge, ctx.j_edge, None, after / before,
                           after, new.max_support(), note=note)


# -- sparsity -----------------------------------------------------------------

def annul(b: Sequence, F: Sequence[Sequence]) -> List[nx.Vector]:
    """Shrink the support of ``b >= 0`` using kernel vectors ``F``.

    Returns every intermediate b (the last is the result). Each f in F must
    vanish outside the support of b.
    """
    b = nx.vector(b)
    F = [nx.vector(f) for f in F]
    history = [list(b)]
    while F:
        S = [k for k, x in enumerate(b) if x]
        best = None
        for fi, f in enumerate(F):
            ratios = [f[k] / b[k] for k in S]
            if max(ratios) <= 0:
                f = F[fi] = [-x for x in f]
                ratios = [-r for r in ratios]
            for pos, k in enumerate(S):
                r = ratios[pos]
                # strict > keeps the lowest i, then the lowest f index
                if r > 0 and (best is None or r > best[0] or (r == best[0] and k < best[1])):
                    best = (r, k, fi)
        if best is None:
            raise KernelDeficit("kernel vector vanishes on the support")
        r, i, fi = best
        f = F.pop(fi)
        b = [bk - fk / r for bk, fk in zip(b, f)]
        b[i] = Q(0)
        F = [[g - (gv[i] / f[i]) * fv for g, fv in zip(gv, f)] if gv[i] else gv for gv in F]
        # entries that hit zero together with b_i leave the support too
        for k, x in enumerate(b):
            if x == 0 and k != i:
                hit = next((p for p, g in enumerate(F) if g[k]), None)
                if hit is not None:
                    g = F.pop(hit)
                    F = [[h - (hv[k] / g[k]) * gg for h, gg in zip(hv, g)] if hv[k] else hv
                         for hv in F]
        if any(x < 0 for x in b):
            raise AssertionError("annul produced a negative entry")
        history.append(list(b))
    return history


def sparsify_row(state: DmaState, row_index: int) -> DmaState:
    """Reduce row ``row_index`` of B to support <= n without changing B A."""
    n = state.n
    brow = state.B[row_index]
    S = sorted(cid for cid, v in brow.items() if v)
    if len(S) <= 2 * n:
        return state
    F = nx.kernel_basis([list(state.rows[cid]) for cid in S])
    if len(F) < len(S) - n:
        raise KernelDeficit(f"found {len(F)} kernel vectors, need {len(S) - n}")
    b = annul([brow[cid] for cid in S], F)[-1]
    new = state.copy()
    new.B[row_index] = {cid: v for cid, v in zip(S, b) if v}
    return new
