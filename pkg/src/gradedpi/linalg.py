"""Exact sparse rational linear algebra.

Rows are kept fraction-free during elimination: each working row is a
primitive integer vector (content divided out, leading entry positive) and
updates are integer cross-multiplications followed by a gcd reduction.
Back-substitution at the end normalizes to the canonical reduced row
echelon form over Fraction. RREF is unique per row space, so pivot
selection order cannot change results, only intermediate growth; the batch
entry point feeds rows sparsest-first with lowest-index tie-break.

No floats anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import AmbientMismatchError, GuardExceededError, MalformedElementError

SparseRow = tuple  # tuple[(col, Fraction), ...] sorted by col


@dataclass(frozen=True)
class GuardLimits:
    """Resource envelope for elimination; exceeding either raises."""

    max_cells: int = 8_000_000
    max_bits: int = 20_000


DEFAULT_GUARD = GuardLimits()


@dataclass(frozen=True)
class SparseMatrix:
    n_rows: int
    n_cols: int
    rows: tuple  # tuple[SparseRow, ...], len == n_rows

    def __post_init__(self):
        if len(self.rows) != self.n_rows:
            raise MalformedElementError("row count mismatch")
        for r in self.rows:
            last = -1
            for col, val in r:
                if not 0 <= col < self.n_cols:
                    raise MalformedElementError(f"column {col} out of range")
                if col <= last:
                    raise MalformedElementError("row entries must be sorted by column")
                if val == 0:
                    raise MalformedElementError("stored entries must be nonzero")
                last = col

    @staticmethod
    def from_rows(rows, n_cols: int) -> "SparseMatrix":
        packed = []
        for r in rows:
            if isinstance(r, dict):
                items = sorted(r.items())
            else:
                items = sorted(r)
            packed.append(tuple((c, Fraction(v)) for c, v in items if v != 0))
        return SparseMatrix(len(packed), n_cols, tuple(packed))

    @staticmethod
    def from_dense(rows) -> "SparseMatrix":
        rows = [list(r) for r in rows]
        n_cols = len(rows[0]) if rows else 0
        sparse = []
        for r in rows:
            if len(r) != n_cols:
                raise MalformedElementError("ragged dense matrix")
            sparse.append({c: Fraction(v) for c, v in enumerate(r) if v != 0})
        return SparseMatrix.from_rows(sparse, n_cols)

    def to_dense(self):
        out = []
        for r in self.rows:
            d = [Fraction(0)] * self.n_cols
            for c, v in r:
                d[c] = v
            out.append(d)
        return out

    def transpose(self) -> "SparseMatrix":
        cols = [dict() for _ in range(self.n_cols)]
        for i, r in enumerate(self.rows):
            for c, v in r:
                cols[c][i] = v
        return SparseMatrix.from_rows(cols, self.n_rows)

    def to_text(self) -> str:
        """Interchange format: header "rows cols nnz", then "row col p/q" lines.

        Indices are 0-based; entries appear in row-major order.
        """
        lines = []
        nnz = sum(len(r) for r in self.rows)
        lines.append(f"{self.n_rows} {self.n_cols} {nnz}")
        for i, r in enumerate(self.rows):
            for c, v in r:
                lines.append(f"{i} {c} {v}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "SparseMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise MalformedElementError("empty matrix text")
        head = lines[0].split()
        if len(head) != 3:
            raise MalformedElementError("matrix header must be 'rows cols nnz'")
        n_rows, n_cols, nnz = (int(x) for x in head)
        if len(lines) - 1 != nnz:
            raise MalformedElementError(f"expected {nnz} entries, found {len(lines) - 1}")
        rows = [dict() for _ in range(n_rows)]
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 3:
                raise MalformedElementError(f"bad entry line {ln!r}")
            i, c = int(parts[0]), int(parts[1])
            if not (0 <= i < n_rows and 0 <= c < n_cols):
                raise MalformedElementError(f"entry out of range: {ln!r}")
            if c in rows[i]:
                raise MalformedElementError(f"duplicate entry at ({i},{c})")
            rows[i][c] = Fraction(parts[2])
        return SparseMatrix.from_rows(rows, n_cols)


@dataclass(frozen=True)
class Subspace:
    """Row space in canonical RREF presentation."""

    ambient_dim: int
    rows: tuple  # tuple[SparseRow, ...] in RREF, pivots strictly increasing
    pivots: tuple  # tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.rows)

    def as_matrix(self) -> SparseMatrix:
        return SparseMatrix(len(self.rows), self.ambient_dim, self.rows)


def _primitive_int_row(row) -> tuple:
    """Convert a sparse Fraction row to a primitive integer row, sign-normalized."""
    items = sorted(row.items()) if isinstance(row, dict) else sorted(row)
    items = [(c, Fraction(v)) for c, v in items if v != 0]
    if not items:
        return ()
    denom_lcm = 1
    for _, v in items:
        denom_lcm = denom_lcm * v.denominator // math.gcd(denom_lcm, v.denominator)
    ints = [(c, int(v * denom_lcm)) for c, v in items]
    g = 0
    for _, v in ints:
        g = math.gcd(g, v)
    if ints[0][1] < 0:
        g = -g
    return tuple((c, v // g) for c, v in ints)


def _int_row_reduce(row, pivot_row, guard: GuardLimits) -> tuple:
    """Eliminate row's leading entry against pivot_row (same leading column)."""
    a = row[0][1]
    b = pivot_row[0][1]
    merged = {}
    for c, v in row:
        merged[c] = b * v
    for c, v in pivot_row:
        merged[c] = merged.get(c, 0) - a * v
    items = sorted((c, v) for c, v in merged.items() if v != 0)
    if not items:
        return ()
    g = 0
    biggest = 0
    for _, v in items:
        g = math.gcd(g, v)
        if abs(v) > biggest:
            biggest = abs(v)
    if biggest.bit_length() > guard.max_bits:
        raise GuardExceededError(
            f"coefficient growth exceeded {guard.max_bits} bits during elimination",
            bits=biggest.bit_length(),
        )
    if items[0][1] < 0:
        g = -g
    return tuple((c, v // g) for c, v in items)


class RowReducer:
    """Incremental echelon builder over primitive integer rows.

    add() forward-reduces one row against the current pivots and stores it
    if independent; finish() back-substitutes to the canonical RREF.
    """

    def __init__(self, n_cols: int, guard: GuardLimits = DEFAULT_GUARD):
        self.n_cols = n_cols
        self.guard = guard
        self.pivot_rows = {}  # leading col -> primitive int row

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def add(self, row) -> bool:
        """Insert one row (dict or (col, value) pairs); True if rank grew."""
        r = _primitive_int_row(row)
        while r:
            lead = r[0][0]
            if lead >= self.n_cols:
                raise AmbientMismatchError(f"column {lead} outside ambient {self.n_cols}")
            piv = self.pivot_rows.get(lead)
            if piv is None:
                self.pivot_rows[lead] = r
                return True
            r = _int_row_reduce(r, piv, self.guard)
        return False

    def finish(self) -> Subspace:
        pivots = sorted(self.pivot_rows)
        reduced = {}
        for p in reversed(pivots):
            row = {c: Fraction(v) for c, v in self.pivot_rows[p]}
            lead = row[p]
            row = {c: v / lead for c, v in row.items()}
            for q in list(row):
                if q != p and q in reduced:
                    coef = row[q]
                    for c, v in reduced[q].items():
                        nv = row.get(c, Fraction(0)) - coef * v
                        if nv:
                            row[c] = nv
                        else:
                            row.pop(c, None)
            reduced[p] = row
        rows = tuple(tuple(sorted(reduced[p].items())) for p in pivots)
        return Subspace(self.n_cols, rows, tuple(pivots))


def row_space(rows, n_cols: int, guard: GuardLimits = DEFAULT_GUARD) -> Subspace:
    """Canonical RREF of the span of a row iterable (streamed, arrival order)."""
    red = RowReducer(n_cols, guard)
    for r in rows:
        red.add(r)
    return red.finish()


def rref(m: SparseMatrix, guard: GuardLimits = DEFAULT_GUARD) -> Subspace:
    """Canonical RREF of a matrix; sparsest rows are fed first."""
    cells = m.n_rows * m.n_cols
    if cells > guard.max_cells:
        raise GuardExceededError(
            f"matrix has {cells} cells, guard allows {guard.max_cells}", cells=cells
        )
    order = sorted(range(m.n_rows), key=lambda i: (len(m.rows[i]), i))
    return row_space((m.rows[i] for i in order), m.n_cols, guard)


def kernel_basis(m: SparseMatrix, guard: GuardLimits = DEFAULT_GUARD) -> Subspace:
    """Canonical RREF basis of the right kernel {v : m v = 0}."""
    space = m if isinstance(m, Subspace) else rref(m, guard)
    pivots = list(space.pivots)
    pivot_set = set(pivots)
    free_cols = [c for c in range(space.ambient_dim) if c not in pivot_set]
    gens = []
    for f in free_cols:
        v = {f: Fraction(1)}
        for prow, p in zip(space.rows, pivots):
            entry = dict(prow).get(f)
            if entry:
                v[p] = -entry
        gens.append(v)
    return row_space(gens, space.ambient_dim, guard)


def reduce_vector(vec, space: Subspace):
    """Residue of a vector after elimination against an RREF basis."""
    v = dict(vec.items()) if isinstance(vec, dict) else {c: Fraction(x) for c, x in vec}
    v = {c: Fraction(x) for c, x in v.items() if x != 0}
    for row, p in zip(space.rows, space.pivots):
        coef = v.get(p)
        if not coef:
            continue
        for c, x in row:
            nv = v.get(c, Fraction(0)) - coef * x
            if nv:
                v[c] = nv
            else:
                v.pop(c, None)
    return v


def contains(space: Subspace, vec) -> bool:
    return not reduce_vector(vec, space)


def subspace_sum(a: Subspace, b: Subspace, guard: GuardLimits = DEFAULT_GUARD) -> Subspace:
    if a.ambient_dim != b.ambient_dim:
        raise AmbientMismatchError("subspace sum needs equal ambient dimensions")
    red = RowReducer(a.ambient_dim, guard)
    for r in a.rows:
        red.add(r)
    for r in b.rows:
        red.add(r)
    return red.finish()


EQUAL = "equal"
A_INSIDE_B = "a_strictly_inside_b"
B_INSIDE_A = "b_strictly_inside_a"
INCOMPARABLE = "incomparable"


def subspace_cmp(a: Subspace, b: Subspace) -> str:
    """Compare two subspaces of one ambient space."""
    if a.ambient_dim != b.ambient_dim:
        raise AmbientMismatchError("cannot compare subspaces of different ambients")
    if a.rows == b.rows:
        return EQUAL
    a_in_b = all(contains(b, dict(r)) for r in a.rows)
    b_in_a = all(contains(a, dict(r)) for r in b.rows)
    if a_in_b and b_in_a:
        return EQUAL
    if a_in_b:
        return A_INSIDE_B
    if b_in_a:
        return B_INSIDE_A
    return INCOMPARABLE


def zero_subspace(ambient_dim: int) -> Subspace:
    return Subspace(ambient_dim, (), ())


def full_subspace(ambient_dim: int) -> Subspace:
    rows = tuple(((c, Fraction(1)),) for c in range(ambient_dim))
    return Subspace(ambient_dim, rows, tuple(range(ambient_dim)))
