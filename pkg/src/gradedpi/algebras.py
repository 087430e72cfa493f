"""Finite-dimensional graded algebras by structure constants.

Covers matrix algebras with elementary gradings, truncated exterior
algebras with several gradings on the generators, block-triangular matrix
algebras, and (block-triangular) matrices over another graded algebra with
the entry-degree grading. Elements are sparse coordinate vectors
(index -> Fraction) over the basis labels.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    GradedEvaluationError,
    MalformedElementError,
    ParseError,
    UnsupportedFeatureError,
)
from .freealg import NcPolynomial
from .groups import TRIVIAL_GROUP, Z2, GroupElement, GroupSpec

CHECK_ASSOC_EXHAUSTIVE_DIM = 32
CHECK_PAIR_EXHAUSTIVE_DIM = 300
CHECK_SAMPLES = 10_000


@dataclass(frozen=True)
class GradingMap:
    """Degree targets for matrix rows/columns; position (i,j) has degree
    targets[j] - targets[i]."""

    targets: tuple  # tuple[GroupElement, ...]

    def __len__(self):
        return len(self.targets)


@dataclass(frozen=True)
class BlockShape:
    """Sizes of the diagonal blocks of a block-triangular matrix pattern."""

    sizes: tuple

    def __post_init__(self):
        if not self.sizes or any((not isinstance(d, int)) or d < 1 for d in self.sizes):
            raise MalformedElementError(f"block sizes must be positive ints: {self.sizes!r}")

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def block_of(self, i: int) -> int:
        """Index of the diagonal block containing row/column i (1-based)."""
        upto = 0
        for b, d in enumerate(self.sizes):
            upto += d
            if i <= upto:
                return b
        raise MalformedElementError(f"index {i} outside 1..{self.n}")

    def allowed(self, i: int, j: int) -> bool:
        return self.block_of(i) <= self.block_of(j)

    def positions(self) -> list:
        """Allowed (i,j), row-major order."""
        n = self.n
        return [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if self.allowed(i, j)]


@dataclass(frozen=True)
class GrassmannSpec:
    """Truncated exterior algebra on n_generators anticommuting generators.

    deg kinds (generators are 1-based):
      natural  - every generator has degree 1 (group Z2)
      infty    - odd-indexed generators have degree 1 (group Z2)
      kstar    - generators 1..k have degree 1, the rest 0 (group Z2)
      explicit - per-generator degree list over Z2
      trivial  - trivial group, everything degree ()
    """

    n_generators: int
    deg_kind: str
    k: int | None = None
    explicit: tuple | None = None

    def __post_init__(self):
        if self.n_generators < 0:
            raise MalformedElementError("n_generators must be >= 0")
        if self.deg_kind not in ("natural", "infty", "kstar", "explicit", "trivial"):
            raise UnsupportedFeatureError(f"unknown Grassmann deg kind {self.deg_kind!r}")
        if self.deg_kind == "kstar" and (self.k is None or self.k < 0):
            raise MalformedElementError("kstar grading needs k >= 0")
        if self.deg_kind == "explicit":
            if self.explicit is None or len(self.explicit) != self.n_generators:
                raise MalformedElementError("explicit grading needs one degree per generator")
            if any(d not in (0, 1) for d in self.explicit):
                raise MalformedElementError("explicit degrees must be 0 or 1")

    def group(self) -> GroupSpec:
        return TRIVIAL_GROUP if self.deg_kind == "trivial" else Z2

    def generator_parity(self, i: int) -> int:
        """Z2 degree of generator i; 0 for the trivial kind."""
        if self.deg_kind == "natural":
            return 1
        if self.deg_kind == "infty":
            return i % 2
        if self.deg_kind == "kstar":
            return 1 if i <= self.k else 0
        if self.deg_kind == "explicit":
            return self.explicit[i - 1]
        return 0

    def generator_degree(self, i: int) -> GroupElement:
        if self.deg_kind == "trivial":
            return ()
        return (self.generator_parity(i),)

    def monomial_degree(self, label: tuple) -> GroupElement:
        if self.deg_kind == "trivial":
            return ()
        return (sum(self.generator_parity(i) for i in label) % 2,)


def _merge_sign(s: tuple, t: tuple):
    """Sign and merged tuple of two disjoint ascending generator tuples."""
    inv = 0
    i = 0
    for x in t:
        while i < len(s) and s[i] < x:
            i += 1
        inv += len(s) - i
    merged = tuple(sorted(s + t))
    return (-1) ** inv, merged


class StructureConstantAlgebra:
    """Unital graded algebra given by basis labels and a product rule.

    The product rule maps a pair of basis indices to a sparse linear
    combination {index: Fraction}; results are memoized. Construction
    checks unit laws everywhere, degree compatibility and associativity
    exhaustively for small dimensions and on 10^4 seeded samples above
    the bounds.
    """

    def __init__(self, labels, degrees, group: GroupSpec, product_fn, unit, meta=None):
        self.labels = tuple(labels)
        self.dim = len(self.labels)
        if len(set(self.labels)) != self.dim:
            raise MalformedElementError("duplicate basis labels")
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.degrees = tuple(group.validate(d) for d in degrees)
        if len(self.degrees) != self.dim:
            raise MalformedElementError("need one degree per basis label")
        self.group = group
        self._product_fn = product_fn
        self._cache = {}
        self.unit = {i: Fraction(c) for i, c in unit.items() if c != 0}
        self.meta = dict(meta or {})
        self._check()

    def product_basis(self, i: int, j: int) -> dict:
        key = (i, j)
        out = self._cache.get(key)
        if out is None:
            out = {k: Fraction(c) for k, c in self._product_fn(i, j).items() if c != 0}
            self._cache[key] = out
        return out

    def mul_vectors(self, u: dict, v: dict) -> dict:
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                ab = a * b
                for k, c in self.product_basis(i, j).items():
                    nv = out.get(k, Fraction(0)) + ab * c
                    if nv:
                        out[k] = nv
                    else:
                        out.pop(k, None)
        return out

    def basis_vector(self, i: int) -> dict:
        return {i: Fraction(1)}

    def is_homogeneous(self, vec: dict, degree) -> bool:
        degree = tuple(degree)
        return all(self.degrees[i] == degree for i, c in vec.items() if c != 0)

    def _check(self):
        rng = random.Random(0xA11CE)
        n = self.dim
        # unit laws on every basis element
        for i in range(n):
            e = self.basis_vector(i)
            if self.mul_vectors(self.unit, e) != e or self.mul_vectors(e, self.unit) != e:
                raise MalformedElementError(f"unit law fails at basis element {self.labels[i]!r}")
        # degree compatibility of all (sampled) products
        if n <= CHECK_PAIR_EXHAUSTIVE_DIM:
            pairs = itertools.product(range(n), repeat=2)
        else:
            pairs = ((rng.randrange(n), rng.randrange(n)) for _ in range(CHECK_SAMPLES))
        for i, j in pairs:
            want = self.group.op(self.degrees[i], self.degrees[j])
            for k, c in self.product_basis(i, j).items():
                if c and self.degrees[k] != want:
                    raise MalformedElementError(
                        f"product {self.labels[i]!r}*{self.labels[j]!r} leaves its degree"
                    )
        # associativity on basis triples
        if n <= CHECK_ASSOC_EXHAUSTIVE_DIM:
            triples = itertools.product(range(n), repeat=3)
        else:
            triples = (
                (rng.randrange(n), rng.randrange(n), rng.randrange(n))
                for _ in range(CHECK_SAMPLES)
            )
        for i, j, k in triples:
            left = self.mul_vectors(self.product_basis(i, j), self.basis_vector(k))
            right = self.mul_vectors(self.basis_vector(i), self.product_basis(j, k))
            if left != right:
                raise MalformedElementError(
                    f"associativity fails on ({self.labels[i]!r},{self.labels[j]!r},{self.labels[k]!r})"
                )


def support(algebra: StructureConstantAlgebra) -> set:
    """Degrees with a nonzero homogeneous component."""
    return set(algebra.degrees)


def homogeneous_basis(algebra: StructureConstantAlgebra, degree) -> list:
    """Basis coordinate vectors of the degree component."""
    degree = algebra.group.validate(tuple(degree))
    return [algebra.basis_vector(i) for i, d in enumerate(algebra.degrees) if d == degree]


def homogeneous_indices(algebra: StructureConstantAlgebra, degree) -> list:
    degree = algebra.group.validate(tuple(degree))
    return [i for i, d in enumerate(algebra.degrees) if d == degree]


def evaluate(f: NcPolynomial, assignment: dict, algebra: StructureConstantAlgebra) -> dict:
    """Evaluate a polynomial at algebra elements; graded substitution rules.

    assignment maps variable id -> coordinate vector, which must be
    homogeneous of the variable's declared degree.
    """
    for vid, deg in f.universe.items():
        if vid not in assignment:
            raise GradedEvaluationError(f"no value assigned to x{vid}")
        if not algebra.is_homogeneous(assignment[vid], deg):
            raise GradedEvaluationError(f"value of x{vid} is not homogeneous of degree {deg}")
    out = {}
    for w, coeff in f.terms.items():
        cur = dict(algebra.unit)
        for vid in w:
            cur = algebra.mul_vectors(cur, assignment[vid])
        for k, c in cur.items():
            nv = out.get(k, Fraction(0)) + coeff * c
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
    return out


def is_g_regular(grading: GradingMap, spec: GroupSpec):
    """Check surjectivity with equipotent fibers; returns (bool, report)."""
    fibers = {g: 0 for g in spec.elements()}
    for t in grading.targets:
        fibers[spec.validate(tuple(t))] += 1
    counts = set(fibers.values())
    surjective = 0 not in counts
    regular = surjective and len(counts) == 1
    report = {
        "surjective": surjective,
        "equipotent": len(counts) == 1,
        "fibers": {",".join(map(str, g)): c for g, c in sorted(fibers.items())},
        "regular": regular,
    }
    return regular, report


# -- constructions --------------------------------------------------------


def build_matrix_algebra(
    targets, spec: GroupSpec, shape: BlockShape | None = None
) -> StructureConstantAlgebra:
    """(Block-triangular) matrix algebra over the field, elementary grading.

    Position (i,j) is a basis label "e_i_j" of degree targets[j]-targets[i];
    with a shape, only positions inside or above the diagonal blocks exist.
    """
    targets = tuple(spec.validate(tuple(t)) for t in targets)
    n = len(targets)
    if shape is None:
        shape = BlockShape((n,))
    if shape.n != n:
        raise MalformedElementError(f"shape covers {shape.n} rows, targets cover {n}")
    positions = shape.positions()
    labels = [f"e_{i}_{j}" for i, j in positions]
    pos_of = {lab: ij for lab, ij in zip(labels, positions)}
    index_of_pos = {ij: idx for idx, ij in enumerate(positions)}
    degrees = [spec.op(targets[j - 1], spec.inverse(targets[i - 1])) for i, j in positions]

    def product(a: int, b: int) -> dict:
        i, j = positions[a]
        k, l = positions[b]
        if j != k:
            return {}
        return {index_of_pos[(i, l)]: Fraction(1)}

    unit = {index_of_pos[(i, i)]: Fraction(1) for i in range(1, n + 1)}
    kind = "matrix" if len(shape.sizes) == 1 else "block_triangular"
    meta = {
        "kind": kind,
        "targets": targets,
        "shape": shape.sizes,
        "group": spec,
        "positions": positions,
        "pos_index": index_of_pos,
    }
    return StructureConstantAlgebra(labels, degrees, spec, product, unit, meta)


def build_field(spec: GroupSpec = TRIVIAL_GROUP) -> StructureConstantAlgebra:
    """The ground field as a one-dimensional algebra in degree 0."""
    return StructureConstantAlgebra(
        ("1",),
        (spec.identity(),),
        spec,
        lambda i, j: {0: Fraction(1)},
        {0: Fraction(1)},
        meta={"kind": "field", "group": spec},
    )


def build_grassmann(gspec: GrassmannSpec) -> StructureConstantAlgebra:
    """Exterior algebra on gspec.n_generators generators, graded per gspec.

    Basis labels are ascending generator tuples ordered by (length, lex);
    products carry the sign of the interleaving merge.
    """
    n = gspec.n_generators
    labels = []
    for size in range(n + 1):
        labels.extend(itertools.combinations(range(1, n + 1), size))
    spec = gspec.group()
    degrees = [gspec.monomial_degree(lab) for lab in labels]
    index = {lab: i for i, lab in enumerate(labels)}

    def product(a: int, b: int) -> dict:
        s, t = labels[a], labels[b]
        if set(s) & set(t):
            return {}
        sign, merged = _merge_sign(s, t)
        return {index[merged]: Fraction(sign)}

    unit = {index[()]: Fraction(1)}
    meta = {"kind": "grassmann", "gspec": gspec, "group": spec}
    return StructureConstantAlgebra(labels, degrees, spec, product, unit, meta)


def build_matrix_over(
    entries: StructureConstantAlgebra, shape: BlockShape
) -> StructureConstantAlgebra:
    """(Block-triangular) matrices over a graded algebra, entry-degree grading.

    Matrix positions carry no degree of their own: (i,j,b) has the degree of
    the entry basis element b.
    """
    positions = shape.positions()
    labels = []
    degrees = []
    for i, j in positions:
        for b, lab in enumerate(entries.labels):
            labels.append((i, j, lab))
            degrees.append(entries.degrees[b])
    index = {lab: idx for idx, lab in enumerate(labels)}

    def product(a: int, b: int) -> dict:
        i, j, lab1 = labels[a]
        k, l, lab2 = labels[b]
        if j != k:
            return {}
        out = {}
        inner = entries.product_basis(entries.index[lab1], entries.index[lab2])
        for t, c in inner.items():
            out[index[(i, l, entries.labels[t])]] = c
        return out

    unit = {}
    for i in range(1, shape.n + 1):
        for t, c in entries.unit.items():
            unit[index[(i, i, entries.labels[t])]] = c
    meta = {
        "kind": "matrix_over",
        "shape": shape.sizes,
        "entries_meta": entries.meta,
        "entries": entries,
        "group": entries.group,
    }
    return StructureConstantAlgebra(labels, degrees, entries.group, product, unit, meta)


# -- descriptors -----------------------------------------------------------


def canonical_descriptor_text(desc: dict) -> str:
    """Byte-stable JSON form of an algebra descriptor."""
    return json.dumps(desc, sort_keys=True, indent=2) + "\n"


def _group_from_descriptor(obj) -> GroupSpec:
    return GroupSpec(tuple(int(x) for x in obj))


def algebra_from_descriptor(desc: dict) -> StructureConstantAlgebra:
    """Build an algebra from its JSON descriptor object.

    Kinds: field, matrix, block_triangular (elementary grading over the
    field), grassmann, matrix_over (entry-degree grading, nested "entries"
    descriptor).
    """
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ParseError("descriptor must be an object with a 'kind' field")
    kind = desc["kind"]
    if kind == "field":
        spec = _group_from_descriptor(desc.get("group", []))
        return build_field(spec)
    if kind in ("matrix", "block_triangular"):
        spec = _group_from_descriptor(desc.get("group", []))
        grading = desc.get("grading", {})
        targets = [spec.element(tuple(t)) for t in grading.get("targets", [])]
        if not targets:
            raise ParseError(f"{kind} descriptor needs grading.targets")
        shape = None
        if kind == "block_triangular":
            shape = BlockShape(tuple(int(d) for d in desc.get("shape", ())))
        return build_matrix_algebra(targets, spec, shape)
    if kind == "grassmann":
        grading = desc.get("grading", {})
        deg = grading.get("deg", "natural")
        n = int(desc.get("generators", 0))
        if isinstance(deg, dict):
            if "kstar" in deg:
                gspec = GrassmannSpec(n, "kstar", k=int(deg["kstar"]))
            elif "explicit" in deg:
                gspec = GrassmannSpec(n, "explicit", explicit=tuple(int(d) for d in deg["explicit"]))
            else:
                raise ParseError(f"unknown grassmann grading {deg!r}")
        elif deg in ("natural", "infty", "trivial"):
            gspec = GrassmannSpec(n, deg)
        elif deg == "degk":
            raise UnsupportedFeatureError(
                "unsupported grading 'degk': its defining generator polynomials "
                "are not in the supported catalogue"
            )
        else:
            raise ParseError(f"unknown grassmann grading {deg!r}")
        return build_grassmann(gspec)
    if kind == "matrix_over":
        shape = BlockShape(tuple(int(d) for d in desc.get("shape", ())))
        inner = algebra_from_descriptor(desc["entries"])
        return build_matrix_over(inner, shape)
    raise ParseError(f"unknown algebra kind {kind!r}")


def descriptor_of(algebra: StructureConstantAlgebra) -> dict:
    """Reconstruct the JSON descriptor of a constructed algebra."""
    meta = algebra.meta
    kind = meta.get("kind")
    if kind == "field":
        return {"kind": "field", "group": list(meta["group"].orders)}
    if kind in ("matrix", "block_triangular"):
        out = {
            "kind": kind,
            "group": list(meta["group"].orders),
            "grading": {"targets": [list(t) for t in meta["targets"]]},
        }
        if kind == "block_triangular":
            out["shape"] = list(meta["shape"])
        return out
    if kind == "grassmann":
        g: GrassmannSpec = meta["gspec"]
        if g.deg_kind == "kstar":
            deg = {"kstar": g.k}
        elif g.deg_kind == "explicit":
            deg = {"explicit": list(g.explicit)}
        else:
            deg = g.deg_kind
        return {
            "kind": "grassmann",
            "generators": g.n_generators,
            "group": list(g.group().orders),
            "grading": {"deg": deg},
        }
    if kind == "matrix_over":
        inner = descriptor_of(meta["entries"])
        return {"kind": "matrix_over", "shape": list(meta["shape"]), "entries": inner}
    raise UnsupportedFeatureError(f"no descriptor for algebra kind {kind!r}")


def parse_inline_descriptor(text: str) -> dict:
    """Compact command-line form, e.g. "grassmann:N=6,deg=natural" or "field".

    Supported: field | grassmann:N=<n>,deg=<natural|infty|trivial|kstar|degk>[,k=<k>]
    (N may be omitted where the caller fills a default later).
    """
    text = text.strip()
    if ":" in text:
        kind, _, rest = text.partition(":")
        params = {}
        for piece in rest.split(","):
            if not piece.strip():
                continue
            key, _, val = piece.partition("=")
            if not _:
                raise ParseError(f"bad descriptor parameter {piece!r}")
            params[key.strip()] = val.strip()
    else:
        kind, params = text, {}
    kind = kind.strip()
    if kind == "field":
        return {"kind": "field", "group": []}
    if kind == "grassmann":
        deg = params.get("deg", "natural")
        out = {"kind": "grassmann", "grading": {}, "group": []}
        if deg == "kstar":
            if "k" not in params:
                raise ParseError("grassmann kstar grading needs k=<int>")
            out["grading"]["deg"] = {"kstar": int(params["k"])}
            out["group"] = [2]
        elif deg in ("natural", "infty"):
            out["grading"]["deg"] = deg
            out["group"] = [2]
        elif deg == "trivial":
            out["grading"]["deg"] = "trivial"
            out["group"] = []
        elif deg == "degk":
            raise UnsupportedFeatureError(
                "unsupported grading 'degk': its defining generator polynomials "
                "are not in the supported catalogue"
            )
        else:
            raise ParseError(f"unknown grassmann grading {deg!r}")
        if "N" in params:
            out["generators"] = int(params["N"])
        return out
    raise ParseError(f"unknown inline algebra kind {kind!r} (use a JSON descriptor file)")
