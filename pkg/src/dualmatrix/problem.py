"""Input model for homogeneous strict systems ``A x > 0``."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from . import numerics as nx


class FormatError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class InequalitySystem:
    rows: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        if not rows or not rows[0]:
            raise ValueError("system needs m >= 1 and n >= 1")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged rows")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "InequalitySystem":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0])


@dataclass(frozen=True)
class BitParams:
    l: int
    L: int


def bit_params(system: InequalitySystem) -> BitParams:
    widest = max(abs(x).bit_length() for r in system.rows for x in r)
    l = 1 + max(system.n.bit_length(), widest)
    return BitParams(l=l, L=system.n * l)


@dataclass(frozen=True)
class PreparedSystem:
    """Result of :func:`preprocess`.

    ``system`` keeps the original row order (row k is still constraint k);
    ``row_permutation`` lists original indices with the basis rows first.
    ``projector`` is the n x r matrix P mapping prepared witnesses y to
    original witnesses P y.
    """

    original: InequalitySystem
    system: Optional[InequalitySystem]
    rank: int
    basis_rows: Tuple[int, ...]
    row_permutation: Tuple[int, ...]
    columns: Tuple[int, ...]
    zero_row: Optional[int] = None

    @property
    def degenerate(self) -> bool:
        return self.rank == 0

    @property
    def projector(self) -> nx.Matrix:
        n = self.original.n
        return [[nx.Q(int(i == c)) for c in self.columns] for i in range(n)]

    def lift(self, y: Sequence) -> nx.Vector:
        """Map a witness of the prepared system back to the original space."""
        x = [nx.Q(0)] * self.original.n
        for yk, c in zip(y, self.columns):
            x[c] = nx.q(yk)
        return x

    def permuted_rows(self) -> List[Tuple[int, ...]]:
        assert self.system is not None
        return [self.system.rows[k] for k in self.row_permutation]


def preprocess(system: InequalitySystem) -> PreparedSystem:
    zero_row = next((k for k, r in enumerate(system.rows) if not any(r)), None)
    # greedy row basis in index order
    basis: List[int] = []
    for k, r in enumerate(system.rows):
        if any(r) and nx.rank([system.rows[b] for b in basis] + [r]) > len(basis):
            basis.append(k)
    r = len(basis)
    if r == 0:
        return PreparedSystem(system, None, 0, (), tuple(range(system.m)), (), zero_row)
    if r == system.n:
        columns = tuple(range(system.n))
        prepared = system
    else:
        # keep a column basis of A; the other columns are combinations of it,
        # so A x ranges over the same set as A_S y
        cols = nx.transpose([list(row) for row in system.rows])
        columns_l: List[int] = []
        for c, col in enumerate(cols):
            if nx.rank([cols[k] for k in columns_l] + [col]) > len(columns_l):
                columns_l.append(c)
        columns = tuple(columns_l)
        prepared = InequalitySystem.from_rows([[row[c] for c in columns] for row in system.rows])
        # re-pick the row basis against the reduced columns (same rank)
        basis = []
        for k, row in enumerate(prepared.rows):
            if nx.rank([prepared.rows[b] for b in basis] + [row]) > len(basis):
                basis.append(k)
            if len(basis) == r:
                break
    rest = [k for k in range(system.m) if k not in basis]
    return PreparedSystem(
        original=system,
        system=prepared,
        rank=r,
        basis_rows=tuple(basis),
        row_permutation=tuple(basis) + tuple(rest),
        columns=columns,
        zero_row=zero_row,
    )


def parse(text: str) -> InequalitySystem:
    lines = [
        (no, ln) for no, ln in enumerate(text.splitlines(), start=1)
        if ln.strip() and not ln.lstrip().startswith("#")
    ]
    if not lines:
        raise FormatError("empty input", 1, 1)
    no, header = lines[0]
    parts = header.split()
    if len(parts) != 2:
        raise FormatError("header must be 'm n'", no, 1)
    try:
        m, n = int(parts[0]), int(parts[1])
    except ValueError:
        raise FormatError("header must hold two integers", no, 1) from None
    if m < 1 or n < 1:
        raise FormatError("m and n must be positive", no, 1)
    body = lines[1:]
    if len(body) != m:
        at = body[-1][0] + 1 if body else no + 1
        raise FormatError(f"expected {m} rows, found {len(body)}", at, 1)
    rows = []
    for no, ln in body:
        tokens = ln.split()
        if len(tokens) != n:
            raise FormatError(f"expected {n} entries, found {len(tokens)}", no, len(ln) + 1)
        row = []
        col = 1
        for tok in tokens:
            col = ln.index(tok, col - 1) + 1
            try:
                row.append(int(tok))
            except ValueError:
                raise FormatError(f"not an integer: {tok!r}", no, col) from None
            col += len(tok)
        rows.append(row)
    return InequalitySystem.from_rows(rows)


def serialize(system: InequalitySystem) -> str:
    out = [f"{system.m} {system.n}"]
    out += [" ".join(str(x) for x in r) for r in system.rows]
    return "\n".join(out) + "\n"


def to_json(system: InequalitySystem) -> str:
    return json.dumps({
        "m": system.m,
        "n": system.n,
        "rows": [[str(x) for x in r] for r in system.rows],
    })


def from_json(text: str) -> InequalitySystem:
    try:
        obj = json.loads(text)
        m, n, rows = obj["m"], obj["n"], obj["rows"]
        parsed = [[int(x) for x in r] for r in rows]
    except (ValueError, KeyError, TypeError) as exc:
        raise FormatError(f"bad JSON system: {exc}") from None
    if len(parsed) != m or any(len(r) != n for r in parsed):
        raise FormatError("JSON rows do not match m, n")
    return InequalitySystem.from_rows(parsed)


def load(text: str) -> InequalitySystem:
    """Parse either the text or the JSON form."""
    if text.lstrip().startswith("{"):
        return from_json(text)
    return parse(text)
