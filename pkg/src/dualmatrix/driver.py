"""The climbing loop: query the oracle at the simplex, step, deviate, certify."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from typing import List, Optional, Union

from . import numerics as nx
from .numerics import Q
from .certify import (EXACT, BudgetExhausted, Feasible, Infeasible,
                      InfeasibilityCertificate, Outcome, early_certificate,
                      mass_certificate_check, verify_certificate, verify_witness)
from .core import (EARLY_INFEASIBLE, DmaState, GainViolated, InvariantBreach,
                   StepReport, check_invariants, choose_pivot, choose_s,
                   gain_bound, init_state, refresh, standard_step, valuation,
                   vertices)
from .deviations import build_context, long_edge_trigger, reenclose, sparsify_row
from .oracle import DenseOracle, NoneViolated, Oracle, Violated
from .problem import InequalitySystem, PreparedSystem, preprocess

log = logging.getLogger(__name__)

TRACE_HEADER = ["step", "type", "i", "j", "lambda_log2", "valuation_log2",
                "max_vertex_log2", "max_support", "note"]


@dataclass
class SolveConfig:
    mode: str = "rounded"
    sig_bits_factor: int = 2
    max_steps_factor: int = 20
    long_edge_factor: float = 4
    s_override: Optional[int] = None
    center: bool = False
    check_invariants: bool = False

    def __post_init__(self):
        if self.mode not in ("exact", "rounded"):
            raise ValueError(f"unknown mode {self.mode!r}")
        for name in ("sig_bits_factor", "max_steps_factor", "long_edge_factor"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class TraceRow:
    step: int
    type: str
    i: Optional[int]
    j: Optional[int]
    lambda_log2: float
    valuation_log2: float
    max_vertex_log2: float
    max_support: int
    note: str = ""
    accepted: bool = True
    # exact values, kept for tests; not written to CSV
    lam: Optional[Q] = None
    valuation: Optional[Q] = None


@dataclass
class SolveResult:
    outcome: Outcome
    trace: List[TraceRow] = field(default_factory=list)
    state: Optional[DmaState] = None
    steps: int = 0
    rounding_attempts: int = 0
    rounding_fallbacks: int = 0
    early: bool = False
    snapshots: List[DmaState] = field(default_factory=list)

    def trace_csv(self) -> str:
        return format_trace(self.trace)


def _f6(x: float) -> str:
    return str(Decimal(repr(x)).quantize(Decimal("0.000001"), rounding=ROUND_HALF_EVEN))


def format_trace(rows: List[TraceRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for r in rows:
        w.writerow([r.step, r.type, "" if r.i is None else r.i, "" if r.j is None else r.j,
                    _f6(r.lambda_log2), _f6(r.valuation_log2), _f6(r.max_vertex_log2),
                    r.max_support, r.note])
    return buf.getvalue()


def _max_vertex_log2(state: DmaState) -> float:
    vs = vertices(state)[0]
    biggest = max(abs(x) for v in vs for x in v)
    return nx.log2(biggest) if biggest else float("-inf")


def _round_rows(state: DmaState, bits: int) -> DmaState:
    """Replace B by round(D B) and recompute V, d, |det C| exactly."""
    new = state.copy()
    new.B = [{cid: nx.round_sig(dk * v, bits) for cid, v in row.items()}
             for dk, row in zip(state.d, state.B)]
    return refresh(new)


def solve(target: Union[InequalitySystem, Oracle], config: Optional[SolveConfig] = None,
          keep_snapshots: bool = False) -> SolveResult:
    """Run the climb on a finite system or on an oracle family.

    Every returned outcome has been re-verified exactly.
    """
    config = config or SolveConfig()
    if isinstance(target, InequalitySystem):
        prepared = preprocess(target)
        if prepared.zero_row is not None:
            cert = InfeasibilityCertificate(EXACT, {prepared.zero_row: Q(1)})
            _assert_cert(target, cert, None)
            return SolveResult(Infeasible(cert), early=True)
        oracle: Oracle = DenseOracle(prepared)
        result = _climb(oracle, config, keep_snapshots)
        if isinstance(result.outcome, Feasible):
            x = prepared.lift(result.outcome.x)
            result.outcome = verify_witness(target, x)
            result.outcome.steps = result.steps
        elif isinstance(result.outcome, Infeasible):
            cert = result.outcome.certificate
            # approximate certificates are judged against the prepared system
            if cert.kind == EXACT:
                _assert_cert(target, cert, None)
            else:
                _assert_cert(prepared.system, cert, oracle.bit_params)
        return result
    return _climb(target, config, keep_snapshots)


def _assert_cert(A, cert, bits):
    if not verify_certificate(A, cert, bits):
        raise InvariantBreach(f"certificate failed re-verification: {cert}")


def _one_dimensional(oracle: Oracle) -> SolveResult:
    found = []
    for x in ([Q(1)], [Q(-1)]):
        resp = oracle.find_violated(x)
        if isinstance(resp, NoneViolated):
            return SolveResult(verify_witness(oracle, x))
        found.append(resp)
    pos, neg = found  # pos.row <= 0, neg.row >= 0
    p, q = pos.row[0], neg.row[0]
    if p == 0:
        b = {pos.id: Q(1)}
    elif q == 0:
        b = {neg.id: Q(1)}
    else:
        b = {pos.id: q, neg.id: -p}
    cert = InfeasibilityCertificate(EXACT, b)
    rows = {pos.id: pos.row, neg.id: neg.row}
    if sum(v * rows[c][0] for c, v in b.items()) != 0 or any(v <= 0 for v in b.values()):
        raise InvariantBreach("one-dimensional certificate failed")
    return SolveResult(Infeasible(cert), early=True)


def _climb(oracle: Oracle, config: SolveConfig, keep_snapshots: bool) -> SolveResult:
    n = oracle.n
    if n == 1:
        res = _one_dimensional(oracle)
        return res
    L = oracle.budget_L()
    bits = oracle.bit_params
    l = L // n
    budget = config.max_steps_factor * n ** 3 * L
    s = config.s_override or choose_s(n)
    if gain_bound(n, s) <= 1:
        raise ValueError(f"s={s} gives no guaranteed gain for n={n}")
    rounded = config.mode == "rounded"
    t_bits = config.sig_bits_factor * l
    db_bits = config.sig_bits_factor * L

    state = init_state(oracle.initial_basis())
    res = SolveResult(outcome=None)  # type: ignore[arg-type]
    trace = res.trace
    val = valuation(state)
    step = 0

    def record(report: StepReport, kind: Optional[str] = None):
        lam = report.lam
        trace.append(TraceRow(
            step=step, type=kind or report.step_type, i=report.i, j=report.j,
            lambda_log2=nx.log2(lam), valuation_log2=nx.log2(report.valuation),
            max_vertex_log2=_max_vertex_log2(state), max_support=report.max_support,
            note=report.note, accepted=report.accepted, lam=lam, valuation=report.valuation,
        ))

    while True:
        if config.check_invariants:
            check_invariants(state)
        if keep_snapshots:
            res.snapshots.append(state)
        vs, vbar, center = vertices(state)
        query = center if config.center else vbar
        resp = oracle.find_violated(query)
        if isinstance(resp, NoneViolated):
            res.outcome = verify_witness(oracle, query)
            break
        i, a = resp.id, resp.row
        j = choose_pivot(state, a, vs)
        if j is EARLY_INFEASIBLE:
            res.outcome = Infeasible(early_certificate(state, i, a))
            res.early = True
            break
        if step >= budget:
            res.outcome = BudgetExhausted(step, nx.log2(val))
            break
        step += 1

        kind = "standard"
        new = report = None
        if rounded:
            res.rounding_attempts += 1
            try:
                new, report = standard_step(state, i, a, j, s, round_bits=t_bits)
                if step % n == 0 and _max_vertex_log2(new) < 4 * L:
                    cand = _round_rows(new, db_bits)
                    lam = valuation(cand) / val
                    if lam < gain_bound(n, s) or any(x <= 0 for x in cand.d):
                        raise GainViolated("row rounding lost the gain")
                    new = cand
                    report.lam = lam
                    report.valuation = valuation(cand)
                    report.note = "rounded_db"
            except (GainViolated, nx.Singular):
                res.rounding_fallbacks += 1
                kind = "rounding_fallback"
                new = None
        if new is None:
            new, report = standard_step(state, i, a, j, s)
        new_val = valuation(new)
        if new_val <= val:
            raise InvariantBreach(f"step {step} did not climb")
        state, val = new, new_val
        record(report, kind)

        for r in range(n):
            if state.max_support() <= 2 * n:
                break
            support = sum(1 for v in state.B[r].values() if v)
            if support > 2 * n:
                before = state
                state = sparsify_row(state, r)
                if config.check_invariants and state.C() != before.C():
                    raise InvariantBreach("sparsify changed B A")
                after = sum(1 for v in state.B[r].values() if v)
                trace.append(TraceRow(step, "sparsify", r, None, 0.0, nx.log2(val),
                                      _max_vertex_log2(state), state.max_support(),
                                      note=f"support={support}->{after}", lam=Q(1),
                                      valuation=val))

        pair = long_edge_trigger(state, L, config.long_edge_factor)
        if pair is not None:
            try:
                ctx = build_context(state, *pair)
            except ValueError:
                ctx = None
            if ctx is not None and (ctx.t_dev or ctx.t_dev_rev):
                new, report = reenclose(state, ctx, L)
                if report.accepted:
                    state, val = new, valuation(new)
                record(report)

        cert = mass_certificate_check(state, bits)
        if cert is not None:
            res.outcome = Infeasible(cert)
            break

    res.state = state
    res.steps = step
    if isinstance(res.outcome, Feasible):
        res.outcome.steps = step
    elif isinstance(res.outcome, Infeasible):
        res.outcome.steps = step
    return res
