"""Outcomes and their exact verification."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Union

from . import numerics as nx
from .numerics import Q
from .core import DmaState
from .oracle import NoneViolated, Oracle, Violated
from .problem import BitParams, InequalitySystem

EXACT = "exact"
APPROXIMATE = "approximate"


class VerificationFailed(AssertionError):
    pass


class NotAWitness(ValueError):
    def __init__(self, row: int, value):
        self.row = row
        self.value = value
        super().__init__(f"row {row} gives a.x = {value} <= 0")


@dataclass
class InfeasibilityCertificate:
    kind: str
    entries: Dict[int, Q]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "entries": [[cid, nx.fmt(v)] for cid, v in sorted(self.entries.items())],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "InfeasibilityCertificate":
        if obj.get("kind") not in (EXACT, APPROXIMATE):
            raise ValueError(f"unknown certificate kind {obj.get('kind')!r}")
        return cls(obj["kind"], {int(cid): nx.parse_q(v) for cid, v in obj["entries"]})


@dataclass
class Feasible:
    x: nx.Vector
    margin: Optional[Q] = None
    steps: int = 0

    def to_json(self) -> dict:
        out = {"outcome": "feasible", "steps": self.steps, "x": [nx.fmt(v) for v in self.x]}
        if self.margin is not None:
            out["margin"] = nx.fmt(self.margin)
        return out


@dataclass
class Infeasible:
    certificate: InfeasibilityCertificate
    steps: int = 0

    def to_json(self) -> dict:
        return {"outcome": "infeasible", "steps": self.steps,
                "certificate": self.certificate.to_json()}


@dataclass
class BudgetExhausted:
    steps: int
    last_valuation_log2: float

    def to_json(self) -> dict:
        return {"outcome": "budget_exhausted", "steps": self.steps,
                "last_valuation_log2": round(self.last_valuation_log2, 6)}


Outcome = Union[Feasible, Infeasible, BudgetExhausted]


def witness_to_json(x: Sequence) -> dict:
    return {"x": [nx.fmt(v) for v in x]}


def witness_from_json(obj: dict) -> nx.Vector:
    return [nx.parse_q(v) for v in obj["x"]]


def early_certificate(state: DmaState, i: int, a: Sequence) -> InfeasibilityCertificate:
    """Exact Farkas vector ``e_i - (a V) B`` when a.v_k <= 0 for every vertex."""
    a = nx.vector(a)
    aV = nx.vec_mat(a, state.V)
    b: Dict[int, Q] = {i: Q(1)}
    for k, brow in enumerate(state.B):
        for cid, coef in brow.items():
            b[cid] = b.get(cid, Q(0)) - aV[k] * coef
    b = {cid: v for cid, v in b.items() if v}
    rows = dict(state.rows)
    rows.setdefault(i, tuple(a))
    if any(v < 0 for v in b.values()):
        raise VerificationFailed("early certificate has a negative entry")
    if _combine(b, rows, state.n) != [0] * state.n:
        raise VerificationFailed("early certificate does not cancel")
    return InfeasibilityCertificate(EXACT, b)


def _combine(b: Dict[int, Q], rows, n: int) -> nx.Vector:
    return [nx.qsum(coef * rows[cid][k] for cid, coef in b.items()) for k in range(n)]


def mass_vector(state: DmaState) -> Dict[int, Q]:
    terms: Dict[int, list] = {}
    for dk, brow in zip(state.d, state.B):
        for cid, coef in brow.items():
            terms.setdefault(cid, []).append(dk * coef)
    b = {cid: nx.qsum(ts) for cid, ts in terms.items()}
    return {cid: v for cid, v in b.items() if v}


def mass_certificate_check(state: DmaState, bits: Optional[BitParams]):
    """Approximate certificate b = d B once (b.1)^2 > |u|^2 16^L, else None.

    b A equals u exactly, so only the mass b.1 needs watching.
    """
    if bits is None:
        return None
    b = mass_vector(state)
    mass = nx.qsum(b.values())
    if nx.norm2(state.u) * 16 ** bits.L < mass * mass:
        return InfeasibilityCertificate(APPROXIMATE, b)
    return None


def verify_witness(target: Union[InequalitySystem, Oracle], x: Sequence) -> Feasible:
    x = nx.vector(x)
    if isinstance(target, InequalitySystem):
        if len(x) != target.n:
            raise ValueError("witness has the wrong length")
        margin = None
        for k, row in enumerate(target.rows):
            val = nx.dot(row, x)
            if val <= 0:
                raise NotAWitness(k, val)
            margin = val if margin is None else min(margin, val)
        return Feasible(x, margin)
    resp = target.find_violated(x)
    if isinstance(resp, Violated):
        raise NotAWitness(resp.id, nx.dot(resp.row, x))
    return Feasible(x)


def verify_certificate(A: Union[InequalitySystem, Sequence[Sequence]],
                       cert: InfeasibilityCertificate,
                       bits: Optional[BitParams] = None) -> bool:
    rows = A.rows if isinstance(A, InequalitySystem) else A
    if not rows:
        return False
    n = len(rows[0])
    b = cert.entries
    if any(not (0 <= cid < len(rows)) for cid in b):
        return False
    if any(v < 0 for v in b.values()) or not any(b.values()):
        return False
    bA = _combine(b, rows, n)
    if cert.kind == EXACT:
        return all(x == 0 for x in bA)
    if cert.kind == APPROXIMATE:
        if bits is None:
            return False
        mass = nx.qsum(b.values())
        return nx.norm2(bA) * 16 ** bits.L < mass * mass
    return False


def outcome_to_json(outcome: Outcome) -> str:
    return json.dumps(outcome.to_json())
