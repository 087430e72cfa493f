"""Multilinear graded-identity spaces and T-ideal arithmetic.

Identity components are computed two independent ways:

  evaluation  - kernel of the matrix of evaluations at tuples of
                homogeneous basis elements (exact for the given algebra);
                for exterior algebras and block matrices over them a
                provably sufficient reduced row set is used instead of the
                full tuple enumeration
  consequence - row space of all multilinear consequences of a finite
                T-ideal presentation

Both present subspaces of the n!-dimensional multilinear component in the
permutation-monomial coordinates of freealg.multilinear_monomials. On top
sit T-ideal products at a multidegree, factoring verdicts for
block-triangular algebras, truncation scans, and a quotient backend that
decides congruence modulo the identities of a finite-dimensional algebra.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from fractions import Fraction

from .algebras import (
    BlockShape,
    GrassmannSpec,
    StructureConstantAlgebra,
    homogeneous_indices,
)
from .errors import (
    GuardExceededError,
    InternalInconsistencyError,
    MalformedElementError,
    TruncationError,
    UnsupportedFeatureError,
)
from .freealg import (
    NcPolynomial,
    left_normed_commutator,
    monomial_index,
    multilinear_coordinates,
    multilinear_monomials,
    poly_from_coordinates,
    validate_signature,
    yvar,
    zvar,
)
from .groups import TRIVIAL_GROUP, Z2, GroupSpec
from .linalg import (
    A_INSIDE_B,
    DEFAULT_GUARD,
    EQUAL,
    GuardLimits,
    RowReducer,
    Subspace,
    contains,
    kernel_basis,
    reduce_vector,
    subspace_cmp,
)


class IdentitySubspace:
    """A subspace of the multilinear component at a fixed signature."""

    __slots__ = ("signature", "spec", "space", "meta")

    def __init__(self, signature, spec: GroupSpec, space: Subspace, meta=None):
        self.signature = validate_signature(signature, spec)
        self.spec = spec
        n = len(self.signature)
        if space.ambient_dim != math.factorial(n):
            raise MalformedElementError(
                f"ambient {space.ambient_dim} != {n}! for a length-{n} signature"
            )
        self.space = space
        self.meta = dict(meta or {})

    @property
    def dim(self) -> int:
        return self.space.dim

    def basis_polynomials(self) -> list:
        return [
            poly_from_coordinates(dict(row), self.signature, self.spec)
            for row in self.space.rows
        ]

    def __repr__(self):
        return f"IdentitySubspace(sig={self.signature}, dim={self.dim})"


@dataclass(frozen=True)
class TIdealPresentation:
    """Finite list of multilinear generators of a T-ideal."""

    generators: tuple
    spec: GroupSpec
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        for f in self.generators:
            if not isinstance(f, NcPolynomial) or f.is_zero():
                raise MalformedElementError("generators must be nonzero polynomials")
            base = None
            for w in f.terms:
                ids = tuple(sorted(w))
                if len(set(ids)) != len(ids):
                    raise MalformedElementError("generators must be multilinear")
                if base is None:
                    base = ids
                elif ids != base:
                    raise MalformedElementError(
                        "all words of a generator must use the same variables"
                    )


# -- evaluation route --------------------------------------------------------


def _estimate_guard(n_rows_estimate: int, n_cols: int, guard: GuardLimits, what: str):
    cells = n_rows_estimate * n_cols
    if cells > guard.max_cells:
        raise GuardExceededError(
            f"{what}: about {n_rows_estimate} rows of {n_cols} columns "
            f"(~{cells} cells) exceeds the guard of {guard.max_cells}",
            cells=cells,
        )


def _full_kernel(algebra: StructureConstantAlgebra, sig, guard: GuardLimits):
    """Evaluation rows from every tuple of homogeneous basis elements."""
    n = len(sig)
    comps = [homogeneous_indices(algebra, d) for d in sig]
    perms = multilinear_monomials(n)
    n_cols = len(perms)
    n_tuples = math.prod(len(c) for c in comps)
    _estimate_guard(n_tuples, n_cols, guard, "evaluation kernel")
    reducer = RowReducer(n_cols, guard)
    seen = set()
    n_rows = 0
    for tup in itertools.product(*comps):
        by_coord = {}
        for col, perm in enumerate(perms):
            vec = algebra.basis_vector(tup[perm[0] - 1])
            for vid in perm[1:]:
                vec = algebra.mul_vectors(vec, algebra.basis_vector(tup[vid - 1]))
                if not vec:
                    break
            for k, c in vec.items():
                by_coord.setdefault(k, {})[col] = c
        for row in by_coord.values():
            key = tuple(sorted(row.items()))
            if key in seen:
                continue
            seen.add(key)
            n_rows += 1
            reducer.add(row)
    space = reducer.finish()
    return kernel_basis(space, guard), {"rows": n_rows, "tuples": n_tuples}


def _pattern_sign(perm, pattern) -> int:
    """Sign of sorting the odd-parity blocks back to ascending order."""
    seq = [v for v in perm if pattern[v - 1] == 1]
    inv = sum(
        1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b]
    )
    return -1 if inv % 2 else 1


def _pool_sizes(gspec: GrassmannSpec, limit: bool):
    """(degree-1 pool, degree-0 pool) generator counts; None = unbounded."""
    n = gspec.n_generators
    kind = gspec.deg_kind
    if kind == "natural":
        return (None, 0) if limit else (n, 0)
    if kind == "infty":
        return (None, None) if limit else ((n + 1) // 2, n // 2)
    if kind == "kstar":
        return (gspec.k, None) if limit else (min(gspec.k, n), max(0, n - gspec.k))
    if kind == "trivial":
        return (0, None) if limit else (0, n)
    ones = sum(gspec.explicit)
    return (ones, n - ones)  # explicit: the algebra is its own limit


def _block_cost(gspec: GrassmannSpec, deg, parity):
    """Minimal (degree-1, degree-0) generator usage for one substitution
    block of the given degree and length parity; None when impossible."""
    if gspec.deg_kind == "trivial":
        return (0, parity)
    d = deg[0]
    if gspec.deg_kind == "natural":
        return (d, 0) if d == parity else None
    return (d, (parity - d) % 2)


def _fits(need, sizes) -> bool:
    return all(s is None or x <= s for x, s in zip(need, sizes))


def grassmann_fast_rows(algebra: StructureConstantAlgebra, sig, limit: bool = False):
    """Reduced evaluation row set for E_N or block matrices over E_N.

    Substituting pairwise-disjoint-support monomials is enough: a tuple
    with overlapping supports evaluates every monomial to zero, and for
    disjoint supports the scalar row depends only on the tuple's
    length-parity pattern (and, over matrices, the tuple of matrix units
    and the start-row/end-column of the composed chain), up to one global
    sign that does not move the kernel. One row per achievable combination
    therefore cuts the same kernel as the full enumeration.

    With limit=True the rows describe the untruncated algebra: patterns
    that no truncation can realize are dropped, and a pattern realizable
    only with more generators than this algebra carries raises an error
    asking for a larger truncation.
    """
    meta = algebra.meta
    if meta.get("kind") == "grassmann":
        gspec = meta["gspec"]
        positions = None
    elif (
        meta.get("kind") == "matrix_over"
        and meta["entries"].meta.get("kind") == "grassmann"
    ):
        gspec = meta["entries"].meta["gspec"]
        positions = BlockShape(tuple(meta["shape"])).positions()
    else:
        raise UnsupportedFeatureError(
            "fast evaluation rows need an exterior algebra or matrices over one"
        )
    sig = validate_signature(sig, algebra.group)
    n = len(sig)
    perms = multilinear_monomials(n)
    now_sizes = _pool_sizes(gspec, limit=False)
    lim_sizes = _pool_sizes(gspec, limit=True)
    rows = []
    seen = set()
    used_patterns = []
    skipped = []
    for pattern in itertools.product((0, 1), repeat=n):
        costs = [_block_cost(gspec, sig[i], pattern[i]) for i in range(n)]
        if any(c is None for c in costs):
            skipped.append({"pattern": pattern, "reason": "parity-degree conflict"})
            continue
        need = (sum(c[0] for c in costs), sum(c[1] for c in costs))
        if limit and not _fits(need, lim_sizes):
            skipped.append({"pattern": pattern, "reason": "not realizable at any truncation"})
            continue
        if not _fits(need, now_sizes):
            if limit:
                raise TruncationError(
                    f"signature {sig}, parity pattern {pattern} needs {need[0]} "
                    f"degree-1 and {need[1]} degree-0 generators; rebuild the "
                    f"algebra with a larger truncation than {gspec.n_generators}"
                )
            skipped.append({"pattern": pattern, "reason": "not realizable here"})
            continue
        used_patterns.append(pattern)
        signs = [_pattern_sign(perm, pattern) for perm in perms]
        if positions is None:
            candidate_rows = [{col: Fraction(s) for col, s in enumerate(signs)}]
        else:
            candidate_rows = []
            for units in itertools.product(positions, repeat=n):
                buckets = {}
                for col, perm in enumerate(perms):
                    seq = [units[v - 1] for v in perm]
                    if all(seq[t][1] == seq[t + 1][0] for t in range(n - 1)):
                        key = (seq[0][0], seq[-1][1])
                        buckets.setdefault(key, {})[col] = Fraction(signs[col])
                candidate_rows.extend(buckets.values())
        for row in candidate_rows:
            key = tuple(sorted(row.items()))
            if row and key not in seen:
                seen.add(key)
                rows.append(row)
    report = {
        "patterns_used": used_patterns,
        "patterns_skipped": skipped,
        "rows": len(rows),
        "semantics": "limit" if limit else "truncated",
    }
    return rows, report


def _fast_capable(algebra: StructureConstantAlgebra) -> bool:
    kind = algebra.meta.get("kind")
    if kind == "grassmann":
        return True
    return (
        kind == "matrix_over"
        and algebra.meta["entries"].meta.get("kind") == "grassmann"
    )


def identities_by_evaluation(
    algebra: StructureConstantAlgebra,
    sig,
    method: str = "auto",
    guard: GuardLimits = DEFAULT_GUARD,
) -> IdentitySubspace:
    """Multilinear identity component of an algebra at a signature.

    method "full" enumerates all homogeneous basis tuples; "fast" uses the
    reduced Grassmann row set (same kernel, same algebra); "limit" uses
    the reduced rows with untruncated semantics, i.e. the identities of
    the infinite-generator algebra this one truncates. "auto" picks fast
    when available, else full.
    """
    sig = validate_signature(sig, algebra.group)
    if method == "auto":
        method = "fast" if _fast_capable(algebra) else "full"
    if method == "full":
        space, info = _full_kernel(algebra, sig, guard)
    elif method in ("fast", "limit"):
        rows, info = grassmann_fast_rows(algebra, sig, limit=(method == "limit"))
        n_cols = math.factorial(len(sig))
        _estimate_guard(max(len(rows), 1), n_cols, guard, "evaluation kernel")
        reducer = RowReducer(n_cols, guard)
        for r in rows:
            reducer.add(r)
        space = kernel_basis(reducer.finish(), guard)
    else:
        raise MalformedElementError(f"unknown evaluation method {method!r}")
    meta = {"route": "evaluation", "method": method}
    meta.update(info)
    return IdentitySubspace(sig, algebra.group, space, meta)


# -- consequence route -------------------------------------------------------


def triple_commutator_generators(spec: GroupSpec) -> list:
    """[[x1,x2],x3] in every degree assignment over the group."""
    out = []
    for degs in itertools.product(spec.elements(), repeat=3):
        factors = [NcPolynomial.variable(i + 1, degs[i]) for i in range(3)]
        out.append(left_normed_commutator(factors))
    return out


def presentation_trivial_grassmann() -> TIdealPresentation:
    """Ungraded exterior-algebra identities: the triple commutator."""
    return TIdealPresentation(
        tuple(triple_commutator_generators(TRIVIAL_GROUP)),
        TRIVIAL_GROUP,
        name="triple-commutator",
    )


def presentation_infty() -> TIdealPresentation:
    """Identities of the exterior algebra with alternating generator degrees."""
    return TIdealPresentation(
        tuple(triple_commutator_generators(Z2)), Z2, name="infty"
    )


def presentation_kstar(k: int) -> TIdealPresentation:
    """Identities with k degree-1 generators: triple commutator plus the
    length-(k+1) product of odd variables."""
    if k < 0:
        raise MalformedElementError("k must be >= 0")
    zword = NcPolynomial.word(
        tuple(range(1, k + 2)), {i: (1,) for i in range(1, k + 2)}
    )
    return TIdealPresentation(
        tuple(triple_commutator_generators(Z2)) + (zword,), Z2, name=f"kstar:{k}"
    )


def presentation_natural() -> TIdealPresentation:
    """Supercommutativity: even variables central, odd ones anticommuting."""
    gens = (
        left_normed_commutator([yvar(1), yvar(2)]),
        left_normed_commutator([yvar(1), zvar(2)]),
        zvar(1) * zvar(2) + zvar(2) * zvar(1),
    )
    return TIdealPresentation(gens, Z2, name="natural")


def presentation_for_mode(mode) -> TIdealPresentation:
    if mode.kind == "natural":
        return presentation_natural()
    if mode.kind == "infty":
        return presentation_infty()
    return presentation_kstar(mode.k)


def _disjoint_subset_tuples(pool: tuple, m: int):
    """Ordered tuples of m disjoint nonempty subsets of pool, plus the rest."""
    if m == 0:
        yield (), pool
        return
    for size in range(1, len(pool) - m + 2):
        for comb in itertools.combinations(pool, size):
            rest = tuple(v for v in pool if v not in comb)
            for tail, remaining in _disjoint_subset_tuples(rest, m - 1):
                yield (comb,) + tail, remaining


def identities_by_consequences(
    presentation: TIdealPresentation, sig, guard: GuardLimits = DEFAULT_GUARD
) -> IdentitySubspace:
    """Span of the multilinear consequences u0 f(m_1..m_k) u1 at sig.

    m_i runs over monomials in disjoint nonempty variable subsets whose
    degrees match f's variables; u0, u1 over the two halves of every
    ordering of the remaining variables.
    """
    spec = presentation.spec
    sig = validate_signature(sig, spec)
    n = len(sig)
    idx = monomial_index(n)
    n_cols = math.factorial(n)
    reducer = RowReducer(n_cols, guard)
    positions = tuple(range(1, n + 1))
    n_rows = 0
    for f in presentation.generators:
        fvars = sorted(f.universe)
        fdegs = [tuple(f.universe[v]) for v in fvars]
        for subsets, rest in _disjoint_subset_tuples(positions, len(fvars)):
            ok = all(
                spec.sum(sig[p - 1] for p in subsets[j]) == fdegs[j]
                for j in range(len(fvars))
            )
            if not ok:
                continue
            for orders in itertools.product(
                *(itertools.permutations(s) for s in subsets)
            ):
                images = {
                    fvars[j]: NcPolynomial.word(
                        orders[j], {p: sig[p - 1] for p in orders[j]}
                    )
                    for j in range(len(fvars))
                }
                g = f.substitute(images, spec)
                if g.is_zero():
                    continue
                gterms = list(g.terms.items())
                for border in itertools.permutations(rest):
                    for cut in range(len(rest) + 1):
                        u0, u1 = border[:cut], border[cut:]
                        row = {idx[u0 + w + u1]: c for w, c in gterms}
                        n_rows += 1
                        if n_rows * n_cols > guard.max_cells:
                            raise GuardExceededError(
                                f"consequence span: {n_rows} rows of {n_cols} "
                                "columns exceeds the guard",
                                cells=n_rows * n_cols,
                            )
                        reducer.add(row)
    space = reducer.finish()
    meta = {"route": "consequences", "rows": n_rows, "presentation": presentation.name}
    return IdentitySubspace(sig, spec, space, meta)


# -- providers and T-ideal products ------------------------------------------


class EvaluationProvider:
    """Identity components of one algebra, cached per signature."""

    def __init__(self, algebra, method="auto", guard: GuardLimits = DEFAULT_GUARD):
        self.algebra = algebra
        self.spec = algebra.group
        self.method = method
        self.guard = guard
        self._cache = {}

    def component(self, sig) -> IdentitySubspace:
        key = validate_signature(sig, self.spec)
        out = self._cache.get(key)
        if out is None:
            out = identities_by_evaluation(self.algebra, key, self.method, self.guard)
            self._cache[key] = out
        return out


class ConsequenceProvider:
    """Components of a finitely generated T-ideal, cached per signature."""

    def __init__(self, presentation: TIdealPresentation, guard: GuardLimits = DEFAULT_GUARD):
        self.presentation = presentation
        self.spec = presentation.spec
        self.guard = guard
        self._cache = {}

    def component(self, sig) -> IdentitySubspace:
        key = validate_signature(sig, self.spec)
        out = self._cache.get(key)
        if out is None:
            out = identities_by_consequences(self.presentation, key, self.guard)
            self._cache[key] = out
        return out


def _component_polynomials(provider, positions, sig, spec):
    """Basis of the provider's component on a position subset, relabeled."""
    sub_sig = tuple(sig[p - 1] for p in positions)
    comp = provider.component(sub_sig)
    rename = {t + 1: positions[t] for t in range(len(positions))}
    return [
        poly_from_coordinates(dict(row), sub_sig, spec).rename_variables(rename)
        for row in comp.space.rows
    ]


def tideal_product(
    left,
    right,
    sig,
    spec: GroupSpec,
    bordered: bool = False,
    guard: GuardLimits = DEFAULT_GUARD,
) -> IdentitySubspace:
    """Multilinear component of the ideal product T1*T2 at a signature.

    In characteristic zero this is the sum over nonempty proper position
    subsets S of (T1's component on S)*(T2's component on the complement);
    plain two-sided products suffice since T1 is a right ideal and T2 a
    left one. bordered=True recomputes the same space from the redundant
    spanning set f*(middle monomial)*g as a cross-check.
    """
    sig = validate_signature(sig, spec)
    n = len(sig)
    n_cols = math.factorial(n)
    positions = tuple(range(1, n + 1))
    reducer = RowReducer(n_cols, guard)
    n_rows = 0
    if not bordered:
        splits = (
            (s, tuple(p for p in positions if p not in s), ())
            for size in range(1, n)
            for s in itertools.combinations(positions, size)
        )
    else:
        def _bordered_splits():
            for size_l in range(1, n):
                for s in itertools.combinations(positions, size_l):
                    rest = tuple(p for p in positions if p not in s)
                    for size_r in range(1, len(rest) + 1):
                        for s2 in itertools.combinations(rest, size_r):
                            mid = tuple(p for p in rest if p not in s2)
                            yield s, s2, mid

        splits = _bordered_splits()
    for s, s2, mid in splits:
        polys_l = _component_polynomials(left, s, sig, spec)
        if not polys_l:
            continue
        polys_r = _component_polynomials(right, s2, sig, spec)
        if not polys_r:
            continue
        middles = list(itertools.permutations(mid)) if mid else [()]
        for f in polys_l:
            for g in polys_r:
                for m in middles:
                    prod = f
                    if m:
                        prod = prod * NcPolynomial.word(
                            m, {p: sig[p - 1] for p in m}
                        )
                    prod = prod * g
                    row = multilinear_coordinates(prod, sig, spec)
                    n_rows += 1
                    if n_rows * n_cols > guard.max_cells:
                        raise GuardExceededError(
                            f"T-ideal product: {n_rows} rows of {n_cols} columns "
                            "exceeds the guard",
                            cells=n_rows * n_cols,
                        )
                    reducer.add(row)
    space = reducer.finish()
    meta = {"route": "product", "bordered": bordered, "rows": n_rows}
    return IdentitySubspace(sig, spec, space, meta)


class ProductProvider:
    """Left-associated iterated T-ideal product of component providers."""

    def __init__(
        self,
        factors,
        spec: GroupSpec,
        bordered: bool = False,
        guard: GuardLimits = DEFAULT_GUARD,
    ):
        factors = list(factors)
        if len(factors) < 2:
            raise MalformedElementError("a product needs at least two factors")
        self.spec = spec
        self.bordered = bordered
        self.guard = guard
        if len(factors) == 2:
            self.left, self.right = factors
        else:
            self.left = ProductProvider(factors[:-1], spec, bordered, guard)
            self.right = factors[-1]
        self._cache = {}

    def component(self, sig) -> IdentitySubspace:
        key = validate_signature(sig, self.spec)
        out = self._cache.get(key)
        if out is None:
            out = tideal_product(
                self.left, self.right, key, self.spec, self.bordered, self.guard
            )
            self._cache[key] = out
        return out


# -- factoring ----------------------------------------------------------------


@dataclass
class FactoringVerdict:
    signature: tuple
    dim_identities: int
    dim_product: int
    relation: str  # "equal" | "product_strictly_inside"
    witness: NcPolynomial | None = None
    meta: dict = field(default_factory=dict)

    @property
    def factors(self) -> bool:
        return self.relation == "equal"


def check_factoring(
    target,
    factor_providers,
    sig,
    spec: GroupSpec | None = None,
    method: str = "auto",
    bordered_crosscheck: bool = False,
    guard: GuardLimits = DEFAULT_GUARD,
) -> FactoringVerdict:
    """Compare an algebra's identity component with its diagonal factors'
    T-ideal product.

    target is a block-triangular algebra (or any component provider for
    its identities); the product is always contained in the identities, so
    a violation is reported as an internal inconsistency, not a verdict.
    """
    if hasattr(target, "component"):
        target_provider = target
        spec = spec or target.spec
    else:
        target_provider = EvaluationProvider(target, method, guard)
        spec = spec or target.group
    sig = validate_signature(sig, spec)
    product = ProductProvider(list(factor_providers), spec, False, guard)
    t_comp = target_provider.component(sig)
    p_comp = product.component(sig)
    rel = subspace_cmp(p_comp.space, t_comp.space)
    if rel not in (EQUAL, A_INSIDE_B):
        raise InternalInconsistencyError(
            f"factor product is not contained in the identity component at {sig}; "
            "one of the routes is computing the wrong space"
        )
    if bordered_crosscheck:
        p2 = ProductProvider(list(factor_providers), spec, True, guard).component(sig)
        if p2.space.rows != p_comp.space.rows:
            raise InternalInconsistencyError(
                f"bordered product span disagrees with the plain span at {sig}"
            )
    if rel == EQUAL:
        return FactoringVerdict(
            sig, t_comp.dim, p_comp.dim, "equal", None, {"target": t_comp.meta}
        )
    witness = None
    for row in t_comp.space.rows:
        if not contains(p_comp.space, dict(row)):
            witness = poly_from_coordinates(dict(row), sig, spec)
            break
    if witness is None:
        raise InternalInconsistencyError(
            f"strict inclusion reported at {sig} but no witness row found"
        )
    return FactoringVerdict(
        sig,
        t_comp.dim,
        p_comp.dim,
        "product_strictly_inside",
        witness,
        {"target": t_comp.meta},
    )


def stabilization_scan(
    family,
    sig,
    n_list,
    method: str = "auto",
    guard: GuardLimits = DEFAULT_GUARD,
) -> dict:
    """Identity dimensions along a family of truncations.

    family maps a truncation size to an algebra; dimensions are flagged
    stabilized when two consecutive values agree.
    """
    n_list = list(n_list)
    if n_list != sorted(n_list) or len(set(n_list)) != len(n_list):
        raise MalformedElementError("truncation list must be strictly increasing")
    dims = []
    for n in n_list:
        algebra = family(n)
        dims.append(identities_by_evaluation(algebra, sig, method, guard).dim)
    stabilized_at = None
    for i in range(len(dims) - 1):
        if dims[i] == dims[i + 1]:
            stabilized_at = n_list[i]
            break
    return {
        "n_values": n_list,
        "dims": dims,
        "stabilized": stabilized_at is not None,
        "stabilized_at": stabilized_at,
    }


def membership(f: NcPolynomial, component: IdentitySubspace) -> bool:
    """Whether a multilinear polynomial lies in the component's space."""
    coords = multilinear_coordinates(f, component.signature, component.spec)
    return contains(component.space, coords)


# -- congruence modulo identities (truncated quotient) ------------------------


def multidegree_components(f: NcPolynomial) -> dict:
    """Split into multihomogeneous parts, keyed by ((vid, multiplicity)...)."""
    parts = {}
    for w, c in f.terms.items():
        counts = {}
        for v in w:
            counts[v] = counts.get(v, 0) + 1
        key = tuple(sorted(counts.items()))
        parts.setdefault(key, {})[w] = c
    return {
        key: NcPolynomial(terms, {v: f.universe[v] for v, _ in key})
        for key, terms in parts.items()
    }


def full_multilinearization(f: NcPolynomial, spec: GroupSpec):
    """Polarize a multihomogeneous polynomial to a multilinear one.

    Each variable of multiplicity d is split into d fresh consecutive
    variables; every word contributes all bijective assignments of copies
    to its occurrence slots. Returns (polynomial on variables 1..n, sig).
    In characteristic zero the input is an identity iff the output is.
    """
    if f.is_zero():
        raise MalformedElementError("cannot polarize the zero polynomial")
    base = None
    for w in f.terms:
        counts = {}
        for v in w:
            counts[v] = counts.get(v, 0) + 1
        key = tuple(sorted(counts.items()))
        if base is None:
            base = key
        elif key != base:
            raise MalformedElementError("polarization needs a multihomogeneous input")
    if base == ():
        raise MalformedElementError("cannot polarize a constant")
    blocks = {}
    sig = []
    nxt = 1
    for vid, mult in base:
        blocks[vid] = list(range(nxt, nxt + mult))
        sig.extend([tuple(f.universe[vid])] * mult)
        nxt += mult
    ordered_vars = [vid for vid, _ in base]
    terms = {}
    for w, c in f.terms.items():
        occ = {v: [] for v in blocks}
        for slot, v in enumerate(w):
            occ[v].append(slot)
        for assignment in itertools.product(
            *(itertools.permutations(blocks[v]) for v in ordered_vars)
        ):
            new_w = [0] * len(w)
            for v, perm in zip(ordered_vars, assignment):
                for slot, nid in zip(occ[v], perm):
                    new_w[slot] = nid
            key = tuple(new_w)
            terms[key] = terms.get(key, Fraction(0)) + c
    universe = {i + 1: sig[i] for i in range(len(sig))}
    return NcPolynomial(terms, universe), tuple(sig)


class TruncatedQuotientBackend:
    """Congruence modulo the graded identities of a finite-dimensional
    algebra, exact for total degrees up to the stated bound.

    Residues are computed per multihomogeneous component: polarize, take
    coordinates at the polarized signature, reduce against the evaluation
    kernel. A component is an identity iff its residue vanishes.
    """

    def __init__(
        self,
        algebra: StructureConstantAlgebra,
        max_degree: int,
        method: str = "auto",
        guard: GuardLimits = DEFAULT_GUARD,
    ):
        if max_degree < 1:
            raise MalformedElementError("degree bound must be >= 1")
        self.algebra = algebra
        self.spec = algebra.group
        self.max_degree = max_degree
        self.method = method
        self.guard = guard
        self._components = {}

    def multilinear_identities(self, sig) -> IdentitySubspace:
        key = validate_signature(sig, self.spec)
        out = self._components.get(key)
        if out is None:
            out = identities_by_evaluation(self.algebra, key, self.method, self.guard)
            self._components[key] = out
        return out

    def residue(self, f: NcPolynomial) -> dict:
        """Canonical residue profile {multidegree key: reduced coordinates}."""
        out = {}
        for key, part in multidegree_components(f).items():
            if key == ():
                coeff = part.terms.get((), Fraction(0))
                if coeff:
                    out[()] = ((0, coeff),)
                continue
            total = sum(m for _, m in key)
            if total > self.max_degree:
                raise TruncationError(
                    f"component of total degree {total} exceeds the backend "
                    f"bound {self.max_degree}"
                )
            lin, sig = full_multilinearization(part, self.spec)
            coords = multilinear_coordinates(lin, sig, self.spec)
            res = reduce_vector(coords, self.multilinear_identities(sig).space)
            if res:
                out[key] = tuple(sorted(res.items()))
        return out

    def is_zero(self, f: NcPolynomial) -> bool:
        return not self.residue(f)

    def congruent(self, f: NcPolynomial, g: NcPolynomial) -> bool:
        return self.is_zero(f - g)
