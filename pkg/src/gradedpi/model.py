"""Generic block-triangular matrices over a relatively free backend.

A model of shape (d_1,...,d_m) is the algebra generated by the generic
matrices whose (i,j) entries are fresh backend variables at the positions
on or above the diagonal blocks. Two backends are supported: the exact
normal-form engine for exterior-type Z2 gradings, and the truncated
congruence backend for any finite-dimensional graded algebra.

Entry variables are flat integer ids through a pairing of
(row, column, generator index, degree index); the inverse is exposed for
printing and for the shift substitution x_{i,j,k} -> x_{i+1,j+1,k}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebras import BlockShape
from .errors import MalformedElementError, UnsupportedFeatureError
from .freealg import NcPolynomial, format_poly
from .groups import Z2, GroupSpec
from .linalg import DEFAULT_GUARD, GuardLimits, RowReducer
from .relfree import (
    GradingMode,
    RelFreeWord,
    RelFreeElement,
    expand,
    format_relfree,
    normal_form,
    relfree_mul,
    zero_element,
)
from .spaces import TruncatedQuotientBackend


class _RelfreeAdapter:
    """Entry arithmetic through the exact normal-form engine."""

    kind = "relfree"

    def __init__(self, mode: GradingMode):
        self.mode = mode
        self.spec = Z2

    def zero(self):
        return zero_element(self.mode)

    def one(self):
        return RelFreeElement(
            self.mode, {RelFreeWord((), (), ()): Fraction(1)}, {}
        )

    def variable(self, vid: int, degree):
        return normal_form(NcPolynomial.variable(vid, tuple(degree)), self.mode)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return relfree_mul(a, b)

    def scale(self, a, c):
        return a.scale(c)

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def equal(self, a, b) -> bool:
        return (a - b).is_zero()

    def rename(self, a, id_map: dict):
        return normal_form(expand(a).rename_variables(id_map), self.mode)

    def keyed_vector(self, a) -> dict:
        return dict(a.terms)

    @staticmethod
    def sort_key(key):
        return key.sort_key()

    def format(self, a) -> str:
        return format_relfree(a)


class _TruncatedAdapter:
    """Entry arithmetic on free polynomials, observed modulo the identities
    of the backend's algebra (exact up to its degree bound)."""

    kind = "truncated"

    def __init__(self, backend: TruncatedQuotientBackend):
        self.backend = backend
        self.spec = backend.spec

    def zero(self):
        return NcPolynomial.zero()

    def one(self):
        return NcPolynomial.constant(1)

    def variable(self, vid: int, degree):
        return NcPolynomial.variable(vid, tuple(degree))

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def scale(self, a, c):
        return a * Fraction(c)

    def is_zero(self, a) -> bool:
        return self.backend.is_zero(a)

    def equal(self, a, b) -> bool:
        return self.backend.congruent(a, b)

    def rename(self, a, id_map: dict):
        return a.rename_variables(id_map)

    def keyed_vector(self, a) -> dict:
        out = {}
        for mkey, items in self.backend.residue(a).items():
            for col, val in items:
                out[(mkey, col)] = val
        return out

    @staticmethod
    def sort_key(key):
        return key

    def format(self, a) -> str:
        return format_poly(a, style="yz")


@dataclass(frozen=True)
class ModelConfig:
    shape: BlockShape
    group: GroupSpec
    backend: object  # GradingMode or TruncatedQuotientBackend

    def __post_init__(self):
        if isinstance(self.backend, GradingMode):
            if self.group != Z2:
                raise MalformedElementError(
                    "the normal-form backend carries the group of order 2"
                )
        elif isinstance(self.backend, TruncatedQuotientBackend):
            if self.backend.spec != self.group:
                raise MalformedElementError("backend group differs from the model group")
        else:
            raise MalformedElementError(f"unsupported backend {self.backend!r}")

    @property
    def n(self) -> int:
        return self.shape.n

    def adapter(self):
        if isinstance(self.backend, GradingMode):
            return _RelfreeAdapter(self.backend)
        return _TruncatedAdapter(self.backend)


def encode_entry_variable(i: int, j: int, k: int, degree, cfg: ModelConfig) -> int:
    """Flat id of the entry variable x_{i,j,k} of the given degree."""
    n = cfg.n
    degree = cfg.group.validate(tuple(degree))
    els = cfg.group.elements()
    g_idx = els.index(degree)
    r = len(els)
    if not (1 <= i <= n and 1 <= j <= n):
        raise MalformedElementError(f"position ({i},{j}) outside 1..{n}")
    if k < 1:
        raise MalformedElementError("generator index must be >= 1")
    return 1 + (j - 1) + n * ((i - 1) + n * (g_idx + r * (k - 1)))


def decode_entry_variable(vid: int, cfg: ModelConfig):
    """(i, j, k, degree) of a flat entry-variable id."""
    if vid < 1:
        raise MalformedElementError(f"bad variable id {vid}")
    n = cfg.n
    els = cfg.group.elements()
    r = len(els)
    rest, j = divmod(vid - 1, n)
    rest, i = divmod(rest, n)
    k, g_idx = divmod(rest, r)
    return i + 1, j + 1, k + 1, els[g_idx]


class GenericMatrix:
    """Block-triangular matrix of backend elements."""

    __slots__ = ("cfg", "entries", "_adapter")

    def __init__(self, cfg: ModelConfig, entries: dict, adapter=None):
        self.cfg = cfg
        self._adapter = adapter or cfg.adapter()
        clean = {}
        for (i, j), el in entries.items():
            if not cfg.shape.allowed(i, j):
                raise MalformedElementError(
                    f"entry at ({i},{j}) lies below the diagonal blocks"
                )
            clean[(i, j)] = el
        self.entries = clean

    def entry(self, i: int, j: int):
        el = self.entries.get((i, j))
        return self._adapter.zero() if el is None else el

    def same_model(self, other: "GenericMatrix") -> bool:
        return (
            self.cfg.shape == other.cfg.shape
            and self.cfg.group == other.cfg.group
            and self.cfg.backend == other.cfg.backend
        )

    def _require_same(self, other):
        if not isinstance(other, GenericMatrix) or not self.same_model(other):
            raise MalformedElementError("matrices come from different models")

    def __add__(self, other):
        self._require_same(other)
        ad = self._adapter
        out = dict(self.entries)
        for pos, el in other.entries.items():
            out[pos] = ad.add(out[pos], el) if pos in out else el
        return GenericMatrix(self.cfg, out, ad)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "GenericMatrix":
        ad = self._adapter
        return GenericMatrix(
            self.cfg, {pos: ad.scale(el, c) for pos, el in self.entries.items()}, ad
        )

    def __mul__(self, other):
        self._require_same(other)
        ad = self._adapter
        out = {}
        for (i, l), a in self.entries.items():
            for (l2, j), b in other.entries.items():
                if l != l2:
                    continue
                prod = ad.mul(a, b)
                pos = (i, j)
                out[pos] = ad.add(out[pos], prod) if pos in out else prod
        return GenericMatrix(self.cfg, out, ad)

    def is_zero(self) -> bool:
        return all(self._adapter.is_zero(el) for el in self.entries.values())

    def equal(self, other) -> bool:
        self._require_same(other)
        ad = self._adapter
        positions = set(self.entries) | set(other.entries)
        return all(ad.equal(self.entry(i, j), other.entry(i, j)) for i, j in positions)

    def entry_strings(self) -> dict:
        """Printable entries keyed "i,j" over the allowed positions."""
        ad = self._adapter
        return {
            f"{i},{j}": ad.format(self.entry(i, j))
            for i, j in self.cfg.shape.positions()
        }

    def format(self) -> str:
        ad = self._adapter
        n = self.cfg.n
        rows = []
        for i in range(1, n + 1):
            cells = []
            for j in range(1, n + 1):
                if not self.cfg.shape.allowed(i, j):
                    cells.append(".")
                else:
                    cells.append(ad.format(self.entry(i, j)))
            rows.append("[" + ", ".join(cells) + "]")
        return "\n".join(rows)


def zero_matrix(cfg: ModelConfig) -> GenericMatrix:
    return GenericMatrix(cfg, {})

def identity_matrix(cfg: ModelConfig) -> GenericMatrix:
    ad = cfg.adapter()
    return GenericMatrix(cfg, {(i, i): ad.one() for i in range(1, cfg.n + 1)}, ad)


def make_generator(k: int, degree, cfg: ModelConfig) -> GenericMatrix:
    """Generic matrix of fresh degree-g entry variables at the allowed
    positions; distinct k never share variables."""
    ad = cfg.adapter()
    degree = cfg.group.validate(tuple(degree))
    entries = {}
    for i, j in cfg.shape.positions():
        vid = encode_entry_variable(i, j, k, degree, cfg)
        entries[(i, j)] = ad.variable(vid, degree)
    return GenericMatrix(cfg, entries, ad)


def model_eval(f: NcPolynomial, cfg: ModelConfig) -> GenericMatrix:
    """Evaluate a graded polynomial at the generic matrices x_i -> xi_i.

    The result is the zero matrix exactly when f is a graded identity of
    the block-triangular matrices over the backend's algebra (for the
    normal-form backend; the truncated backend is exact up to its bound).
    """
    gens = {}
    for vid, deg in f.universe.items():
        gens[vid] = make_generator(vid, deg, cfg)
    acc = zero_matrix(cfg)
    ident = identity_matrix(cfg)
    for w, c in f.terms.items():
        m = ident
        for vid in w:
            m = m * gens[vid]
        acc = acc + m.scale(c)
    return acc


def shift_automorphism(M: GenericMatrix, cfg: ModelConfig) -> GenericMatrix:
    """Substitute x_{i,j,k} -> x_{i+1,j+1,k} (mod n) inside every entry.

    Defined on single-block models only; on elements of the model the
    substituted entry at (i,j) coincides with the original entry at
    (i+1,j+1), wrapping modulo n.
    """
    if len(cfg.shape.sizes) != 1:
        raise UnsupportedFeatureError(
            "the shift substitution is defined on single-block models only"
        )
    n = cfg.n
    ad = M._adapter
    out = {}
    for pos, el in M.entries.items():
        if ad.kind == "truncated":
            used = set(el.universe)
        else:
            used = set()
            for w in el.terms:
                used.update(w.evens)
                used.update(w.odds)
                used.update(w.comms)
        id_map = {}
        for vid in used:
            i, j, k, deg = decode_entry_variable(vid, cfg)
            id_map[vid] = encode_entry_variable(i % n + 1, j % n + 1, k, deg, cfg)
        out[pos] = ad.rename(el, id_map)
    return GenericMatrix(cfg, out, ad)


def column_projection(M: GenericMatrix, k: int):
    """The k-th column as a tuple of backend elements, rows 1..n."""
    n = M.cfg.n
    if not (1 <= k <= n):
        raise MalformedElementError(f"column {k} outside 1..{n}")
    return tuple(M.entry(i, k) for i in range(1, n + 1))


def _stack_rank(vectors, sort_key, guard: GuardLimits) -> int:
    """Rank of keyed sparse vectors over a shared sorted column order."""
    keys = sorted({k for vec in vectors for k in vec}, key=sort_key)
    index = {k: c for c, k in enumerate(keys)}
    red = RowReducer(max(len(keys), 1), guard)
    rank = 0
    for vec in vectors:
        if red.add({index[k]: v for k, v in vec.items()}):
            rank += 1
    return rank


def _matrices_rank(matrices, positions, guard: GuardLimits) -> int:
    ad = matrices[0]._adapter
    vectors = []
    for m in matrices:
        vec = {}
        for i, j in positions:
            for key, val in ad.keyed_vector(m.entry(i, j)).items():
                vec[(i, j, key)] = val
        vectors.append(vec)
    return _stack_rank(
        vectors, lambda t: (t[0], t[1], ad.sort_key(t[2])), guard
    )


def independent_by_columns(
    matrices, k: int, guard: GuardLimits = DEFAULT_GUARD
) -> bool:
    """Linear independence over the rationals of the k-th columns."""
    matrices = list(matrices)
    if not matrices:
        return True
    first = matrices[0]
    for m in matrices[1:]:
        if not first.same_model(m):
            raise MalformedElementError("matrices come from different models")
    n = first.cfg.n
    if not (1 <= k <= n):
        raise MalformedElementError(f"column {k} outside 1..{n}")
    positions = [(i, k) for i in range(1, n + 1)]
    return _matrices_rank(matrices, positions, guard) == len(matrices)


def independent_full(matrices, guard: GuardLimits = DEFAULT_GUARD) -> bool:
    """Independence decided on all matrix entries at once."""
    matrices = list(matrices)
    if not matrices:
        return True
    first = matrices[0]
    for m in matrices[1:]:
        if not first.same_model(m):
            raise MalformedElementError("matrices come from different models")
    n = first.cfg.n
    positions = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    return _matrices_rank(matrices, positions, guard) == len(matrices)


@dataclass(frozen=True)
class RectangularStrip:
    """Off-diagonal rectangle: rows of the leading blocks, columns of the
    last block, entries kept under their original variable ids."""

    n_rows: int
    n_cols: int
    entries: dict  # (relative i, relative j) -> backend element


def extract_blocks(M: GenericMatrix, cfg: ModelConfig):
    """(leading, corner, strip) views of the last-block decomposition.

    leading is the model over the first m-1 diagonal blocks, corner the
    last diagonal block, strip the rectangle joining them. Entry ids are
    kept verbatim, so the views reassemble to M exactly.
    """
    sizes = cfg.shape.sizes
    if len(sizes) < 2:
        raise MalformedElementError("block extraction needs at least two blocks")
    d_last = sizes[-1]
    nl = cfg.n - d_last
    lead_cfg = ModelConfig(BlockShape(sizes[:-1]), cfg.group, cfg.backend)
    corner_cfg = ModelConfig(BlockShape((d_last,)), cfg.group, cfg.backend)
    ad = M._adapter
    lead, corner, strip = {}, {}, {}
    for (i, j), el in M.entries.items():
        if i <= nl and j <= nl:
            lead[(i, j)] = el
        elif i > nl and j > nl:
            corner[(i - nl, j - nl)] = el
        else:
            strip[(i, j - nl)] = el
    return (
        GenericMatrix(lead_cfg, lead, ad),
        GenericMatrix(corner_cfg, corner, ad),
        RectangularStrip(nl, d_last, strip),
    )


def reassemble(
    leading: GenericMatrix,
    corner: GenericMatrix,
    strip: RectangularStrip,
    cfg: ModelConfig,
) -> GenericMatrix:
    nl = strip.n_rows
    if leading.cfg.n != nl or corner.cfg.n != strip.n_cols:
        raise MalformedElementError("pieces do not fit the stated strip size")
    entries = {}
    for (i, j), el in leading.entries.items():
        entries[(i, j)] = el
    for (i, j), el in corner.entries.items():
        entries[(i + nl, j + nl)] = el
    for (i, j), el in strip.entries.items():
        entries[(i, j + nl)] = el
    return GenericMatrix(cfg, entries)
