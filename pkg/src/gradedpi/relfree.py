"""Exact normal forms in relatively free Z2-graded algebras of exterior type.

Three grading modes are supported, each with a straightening rewrite onto
the normal-form words  (evens, nondecreasing)(odds, nondecreasing)
[a1,b1][a2,b2]...  with the commutator ids strictly increasing:

  natural - every generator of the model algebra is odd: evens are central,
            odds anticommute pairwise, squares of odd variables vanish, no
            commutator tail survives. Each input word straightens to a
            single signed word or zero.
  infty   - rewrite rules: (i) swap an out-of-order adjacent pair u v into
            v u + [u,v]; (ii) commutators are central; (iii) the commutator
            tail is alternating in its ids (any transposition flips the
            sign, a repeated id kills the word).
  kstar   - the infty rules plus: a word whose total count of odd-variable
            occurrences (commutator slots included) exceeds k is zero.

Termination: rule (i) either keeps the prefix length and strictly lowers
its inversion count, or shortens the prefix by two; the pair
(prefix length, inversions) drops lexicographically at every step, and the
tail normalization is a single sort. The zero rule of kstar is stable
because every rewrite preserves the multiset of variable ids of a word.

Letters are (parity, id) pairs internally, so memoized results are
self-contained and shared across calls.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .algebras import GrassmannSpec, build_grassmann, evaluate, homogeneous_indices
from .errors import (
    DegreeConflictError,
    MalformedElementError,
    UnsupportedFeatureError,
)
from .freealg import NcPolynomial, validate_signature
from .groups import Z2
from .linalg import SparseMatrix, kernel_basis, row_space


@dataclass(frozen=True)
class GradingMode:
    kind: str  # "natural" | "infty" | "kstar"
    k: int | None = None

    def __post_init__(self):
        if self.kind not in ("natural", "infty", "kstar"):
            raise UnsupportedFeatureError(f"unknown grading mode {self.kind!r}")
        if self.kind == "kstar" and (self.k is None or self.k < 0):
            raise MalformedElementError("kstar mode needs k >= 0")
        if self.kind != "kstar" and self.k is not None:
            raise MalformedElementError(f"mode {self.kind} takes no k")

    @staticmethod
    def natural() -> "GradingMode":
        return GradingMode("natural")

    @staticmethod
    def infty() -> "GradingMode":
        return GradingMode("infty")

    @staticmethod
    def kstar(k: int) -> "GradingMode":
        return GradingMode("kstar", k)

    @staticmethod
    def parse(text: str) -> "GradingMode":
        text = text.strip()
        if text == "natural":
            return GradingMode.natural()
        if text == "infty":
            return GradingMode.infty()
        if text.startswith("kstar:"):
            return GradingMode.kstar(int(text.split(":", 1)[1]))
        if text == "degk" or text.startswith("degk:"):
            raise UnsupportedFeatureError(
                "unsupported mode 'degk': its defining generator polynomials "
                "are not in the supported catalogue"
            )
        raise UnsupportedFeatureError(f"unknown grading mode {text!r}")

    def token(self) -> str:
        return f"kstar:{self.k}" if self.kind == "kstar" else self.kind

    def grassmann_spec(self, n_generators: int) -> GrassmannSpec:
        if self.kind == "kstar":
            return GrassmannSpec(n_generators, "kstar", k=self.k)
        return GrassmannSpec(n_generators, self.kind)


@dataclass(frozen=True)
class RelFreeWord:
    """Normal-form word: even prefix, odd prefix, commutator tail ids."""

    evens: tuple
    odds: tuple
    comms: tuple

    def __post_init__(self):
        if list(self.evens) != sorted(self.evens) or list(self.odds) != sorted(self.odds):
            raise MalformedElementError("prefix ids must be nondecreasing")
        if len(self.comms) % 2 or list(self.comms) != sorted(set(self.comms)):
            raise MalformedElementError("commutator ids must be strictly increasing, even count")

    @property
    def length(self) -> int:
        return len(self.evens) + len(self.odds) + len(self.comms)

    def sort_key(self):
        return (self.length, self.evens, self.odds, self.comms)

    def comm_pairs(self):
        return [(self.comms[i], self.comms[i + 1]) for i in range(0, len(self.comms), 2)]


# memo shared by infty and kstar: the rules preserve the letter multiset,
# so the kstar cutoff can be applied at entry and the core reused.
_NF_MEMO: dict = {}


def clear_normal_form_cache():
    _NF_MEMO.clear()


def _sorted_tail(tail):
    """(sign, tail sorted by id) for letter tuples; None on a repeated id."""
    ids = [l[1] for l in tail]
    if len(set(ids)) < len(ids):
        return None
    arr = list(tail)
    sign = 1
    for i in range(1, len(arr)):
        j = i
        while j > 0 and arr[j - 1][1] > arr[j][1]:
            arr[j - 1], arr[j] = arr[j], arr[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(arr)


def _nf_core(prefix, tail):
    """Straighten (prefix letters, sorted tail letters) -> {letter word: coeff}.

    Output keys are (evens_ids, odds_ids, tail_letters).
    """
    key = (prefix, tail)
    hit = _NF_MEMO.get(key)
    if hit is not None:
        return hit
    pos = -1
    for idx in range(len(prefix) - 1):
        if prefix[idx] > prefix[idx + 1]:  # letter order = (parity, id)
            pos = idx
            break
    if pos < 0:
        evens = tuple(l[1] for l in prefix if l[0] == 0)
        odds = tuple(l[1] for l in prefix if l[0] == 1)
        out = {(evens, odds, tail): Fraction(1)}
    else:
        u, v = prefix[pos], prefix[pos + 1]
        out = dict(_nf_core(prefix[:pos] + (v, u) + prefix[pos + 2 :], tail))
        st = _sorted_tail(tail + (u, v))
        if st is not None:
            sign, tail2 = st
            for w, c in _nf_core(prefix[:pos] + prefix[pos + 2 :], tail2).items():
                nv = out.get(w, Fraction(0)) + sign * c
                if nv:
                    out[w] = nv
                else:
                    out.pop(w, None)
    _NF_MEMO[key] = out
    return out


def _nf_natural(prefix):
    """Supercommutative straightening: evens central, odds anticommute."""
    evens = tuple(sorted(l[1] for l in prefix if l[0] == 0))
    odds = [l[1] for l in prefix if l[0] == 1]
    if len(set(odds)) < len(odds):
        return None
    sign = 1
    for i in range(1, len(odds)):
        j = i
        while j > 0 and odds[j - 1] > odds[j]:
            odds[j - 1], odds[j] = odds[j], odds[j - 1]
            sign = -sign
            j -= 1
    return sign, RelFreeWord(evens, tuple(odds), ())


def _odd_count(prefix, tail) -> int:
    return sum(1 for l in prefix if l[0] == 1) + sum(1 for l in tail if l[0] == 1)


def _straighten(prefix, tail, mode: GradingMode):
    """Shared entry: mode cutoffs, then the core; returns {RelFreeWord: coeff}."""
    if mode.kind == "kstar" and _odd_count(prefix, tail) > mode.k:
        return {}
    if mode.kind == "natural":
        if tail:
            raise MalformedElementError("natural mode words carry no commutator tail")
        res = _nf_natural(prefix)
        if res is None:
            return {}
        sign, word = res
        return {word: Fraction(sign)}
    out = {}
    for (evens, odds, tl), c in _nf_core(prefix, tail).items():
        word = RelFreeWord(evens, odds, tuple(l[1] for l in tl))
        nv = out.get(word, Fraction(0)) + c
        if nv:
            out[word] = nv
        else:
            out.pop(word, None)
    return out


class RelFreeElement:
    """Linear combination of normal-form words plus the parity declaration."""

    __slots__ = ("mode", "terms", "parities")

    def __init__(self, mode: GradingMode, terms: dict, parities: dict):
        self.mode = mode
        clean = {}
        used = set()
        for w, c in terms.items():
            c = Fraction(c)
            if not c:
                continue
            clean[w] = c
            used.update(w.evens)
            used.update(w.odds)
            used.update(w.comms)
        for w in clean:
            for vid in w.evens:
                if parities[vid] != 0:
                    raise DegreeConflictError(f"x{vid} used as even but declared odd")
            for vid in w.odds:
                if parities[vid] != 1:
                    raise DegreeConflictError(f"x{vid} used as odd but declared even")
        self.terms = clean
        self.parities = {v: parities[v] for v in used}

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, RelFreeElement):
            return NotImplemented
        return (
            self.mode == other.mode
            and self.terms == other.terms
            and self.parities == other.parities
        )

    def __hash__(self):
        return hash((self.mode, frozenset(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)) and other == 0:
            return self
        if self.mode != other.mode:
            raise MalformedElementError("cannot add elements of different modes")
        parities = dict(self.parities)
        for v, p in other.parities.items():
            if parities.get(v, p) != p:
                raise DegreeConflictError(f"x{v} declared with both parities")
            parities[v] = p
        terms = dict(self.terms)
        for w, c in other.terms.items():
            terms[w] = terms.get(w, Fraction(0)) + c
        return RelFreeElement(self.mode, terms, parities)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "RelFreeElement":
        c = Fraction(c)
        return RelFreeElement(self.mode, {w: c * x for w, x in self.terms.items()}, self.parities)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return relfree_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __repr__(self):
        return f"RelFreeElement({format_relfree(self)})"

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: item[0].sort_key())


def zero_element(mode: GradingMode) -> RelFreeElement:
    return RelFreeElement(mode, {}, {})


def _parities_of_poly(f: NcPolynomial) -> dict:
    out = {}
    for vid, deg in f.universe.items():
        if deg not in ((0,), (1,)):
            raise MalformedElementError(
                f"relfree engine works over the group of order 2; x{vid} has degree {deg}"
            )
        out[vid] = deg[0]
    return out


def normal_form(f: NcPolynomial, mode: GradingMode) -> RelFreeElement:
    """Class of a free polynomial in the relatively free algebra of the mode."""
    parities = _parities_of_poly(f)
    terms = {}
    for w, coeff in f.terms.items():
        prefix = tuple((parities[v], v) for v in w)
        for word, c in _straighten(prefix, (), mode).items():
            nv = terms.get(word, Fraction(0)) + coeff * c
            if nv:
                terms[word] = nv
            else:
                terms.pop(word, None)
    return RelFreeElement(mode, terms, parities)


def relfree_mul(a: RelFreeElement, b: RelFreeElement) -> RelFreeElement:
    """Product of two normal-form elements, renormalized.

    Word by word: commutator factors are central, so the product of two
    words is (prefix_a prefix_b) with the merged tail, then straightening.
    """
    if a.mode != b.mode:
        raise MalformedElementError("cannot multiply elements of different modes")
    mode = a.mode
    parities = dict(a.parities)
    for v, p in b.parities.items():
        if parities.get(v, p) != p:
            raise DegreeConflictError(f"x{v} declared with both parities")
        parities[v] = p
    terms = {}
    for wa, ca in a.terms.items():
        prefix_a = tuple((0, v) for v in wa.evens) + tuple((1, v) for v in wa.odds)
        tail_a = tuple((parities[v], v) for v in wa.comms)
        for wb, cb in b.terms.items():
            prefix = (
                prefix_a
                + tuple((0, v) for v in wb.evens)
                + tuple((1, v) for v in wb.odds)
            )
            st = _sorted_tail(tail_a + tuple((parities[v], v) for v in wb.comms))
            if st is None:
                continue
            sign, tail = st
            coeff = ca * cb * sign
            for word, c in _straighten(prefix, tail, mode).items():
                nv = terms.get(word, Fraction(0)) + coeff * c
                if nv:
                    terms[word] = nv
                else:
                    terms.pop(word, None)
    return RelFreeElement(mode, terms, parities)


def expand(el: RelFreeElement) -> NcPolynomial:
    """Rewrite a normal-form element as a free polynomial (basis words expanded)."""
    universe = {v: (p,) for v, p in el.parities.items()}
    out = NcPolynomial.zero()
    for w, c in el.terms.items():
        piece = NcPolynomial({tuple(w.evens) + tuple(w.odds): c}, universe)
        for a, b in w.comm_pairs():
            xa = NcPolynomial.variable(a, (el.parities[a],))
            xb = NcPolynomial.variable(b, (el.parities[b],))
            piece = piece * (xa * xb - xb * xa)
        out = out + piece
    return out


def format_relfree(el: RelFreeElement) -> str:
    """Printer: y<id> for even letters, z<id> for odd, [x<a>,x<b>] tail factors."""
    if el.is_zero():
        return "0"
    pieces = []
    for w, c in el.sorted_terms():
        mag = abs(c)
        letters = [f"y{v}" for v in w.evens] + [f"z{v}" for v in w.odds]
        letters += [f"[x{a},x{b}]" for a, b in w.comm_pairs()]
        if letters:
            body = "*".join(letters)
            if mag != 1:
                body = f"{mag}*{body}"
        else:
            body = str(mag)
        pieces.append((c < 0, body))
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


# -- basis words ------------------------------------------------------------


def is_basis_word(word: RelFreeWord, parities: dict, mode: GradingMode) -> bool:
    """Mode validity of a normal-form word."""
    if mode.kind == "natural":
        if word.comms:
            return False
        return list(word.odds) == sorted(set(word.odds))
    if mode.kind == "kstar":
        odd = len(word.odds) + sum(1 for v in word.comms if parities[v] == 1)
        if odd > mode.k:
            return False
    return True


def multilinear_basis_words(mode: GradingMode, sig) -> list:
    """All normal-form words of the multilinear multidegree sig (ids 1..n)."""
    sig = validate_signature(sig, Z2)
    n = len(sig)
    parities = {i + 1: sig[i][0] for i in range(n)}
    ids = list(range(1, n + 1))
    out = []
    for tail_size in range(0, n + 1, 2):
        for tail in itertools.combinations(ids, tail_size):
            rest = [v for v in ids if v not in tail]
            evens = tuple(v for v in rest if parities[v] == 0)
            odds = tuple(v for v in rest if parities[v] == 1)
            word = RelFreeWord(evens, odds, tail)
            if is_basis_word(word, parities, mode):
                out.append(word)
    return out


def count_multilinear_basis_words(mode: GradingMode, sig) -> int:
    return len(multilinear_basis_words(mode, sig))


def coordinatize(elements) -> tuple:
    """(words, SparseMatrix) coordinates of elements over their joint words."""
    words = sorted({w for el in elements for w in el.terms}, key=lambda w: w.sort_key())
    index = {w: i for i, w in enumerate(words)}
    rows = []
    for el in elements:
        rows.append({index[w]: c for w, c in el.terms.items()})
    return words, SparseMatrix.from_rows(rows, len(words))


# -- randomized checks -------------------------------------------------------


def random_basis_word(mode: GradingMode, ids, parities, rng: random.Random, max_len: int):
    """A uniform-ish random normal-form word on the given alphabet."""
    for _ in range(200):
        length = rng.randint(1, max_len)
        tail_size = rng.choice([s for s in range(0, length + 1, 2) if s <= len(ids)])
        if mode.kind == "natural":
            tail_size = 0
        tail = tuple(sorted(rng.sample(ids, tail_size)))
        k_prefix = length - tail_size
        evens_pool = [v for v in ids if parities[v] == 0]
        odds_pool = [v for v in ids if parities[v] == 1]
        n_even = rng.randint(0, k_prefix) if evens_pool else 0
        if not odds_pool:
            n_even = k_prefix
        evens = sorted(rng.choice(evens_pool) for _ in range(n_even))
        odds = sorted(rng.choice(odds_pool) for _ in range(k_prefix - n_even))
        if mode.kind == "natural" and len(set(odds)) < len(odds):
            continue
        word = RelFreeWord(tuple(evens), tuple(odds), tail)
        if not (word.evens or word.odds or word.comms):
            continue
        if is_basis_word(word, parities, mode):
            return word
    raise MalformedElementError("could not sample a basis word under the mode constraints")


@dataclass
class ProbeReport:
    trials: int
    failures: int
    first_witness: str | None

    @property
    def ok(self) -> bool:
        return self.failures == 0


def soundness_probe(
    f: NcPolynomial,
    mode: GradingMode,
    n_generators: int,
    trials: int,
    seed: int,
    normal_form_fn=None,
) -> ProbeReport:
    """Check f - expand(normal_form(f)) vanishes on random graded substitutions.

    Substitutions go into the truncated exterior algebra on n_generators
    generators carrying the mode's grading; every variable receives a random
    homogeneous element of its degree (two basis terms, small coefficients).
    """
    nf = (normal_form_fn or normal_form)(f, mode)
    g = f - expand(nf)
    if g.is_zero():
        # syntactic equality: nothing to evaluate
        return ProbeReport(trials, 0, None)
    algebra = build_grassmann(mode.grassmann_spec(n_generators))
    rng = random.Random(seed)
    failures = 0
    witness = None
    by_degree = {
        (0,): homogeneous_indices(algebra, (0,)),
        (1,): homogeneous_indices(algebra, (1,)),
    }
    for t in range(trials):
        assignment = {}
        for vid, deg in g.universe.items():
            pool = by_degree[tuple(deg)]
            vec = {}
            for _ in range(2):
                idx = rng.choice(pool)
                coeff = Fraction(rng.choice([-2, -1, 1, 2]))
                vec[idx] = vec.get(idx, Fraction(0)) + coeff
            assignment[vid] = {i: c for i, c in vec.items() if c}
        value = evaluate(g, assignment, algebra)
        if value:
            failures += 1
            if witness is None:
                parts = []
                for vid in sorted(assignment):
                    terms = " + ".join(
                        f"{c}*{''.join(f'e{i}' for i in algebra.labels[idx]) or '1'}"
                        for idx, c in sorted(assignment[vid].items())
                    )
                    parts.append(f"x{vid} -> {terms}")
                witness = f"trial {t}: " + "; ".join(parts)
    return ProbeReport(trials, failures, witness)


@dataclass
class MultiplicativityReport:
    mode: GradingMode
    samples: int
    verdict: str  # "holds-on-samples" | "fails"
    witness: str | None


def products_of_word_sets(set1, set2, mode: GradingMode, parities) -> list:
    """All pairwise products, in (set1 index, set2 index) row-major order."""
    out = []
    for w1 in set1:
        e1 = RelFreeElement(mode, {w1: Fraction(1)}, parities)
        for w2 in set2:
            e2 = RelFreeElement(mode, {w2: Fraction(1)}, parities)
            out.append(relfree_mul(e1, e2))
    return out


def partial_multiplicativity_check(
    mode: GradingMode, degree_bound: int, sample_count: int, seed: int
) -> MultiplicativityReport:
    """Sample pairs of basis-word sets in disjoint alphabets and test whether
    all pairwise products stay linearly independent.

    On failure the witness is an explicit vanishing linear combination of
    products (a single zero product when one exists).
    """
    rng = random.Random(seed)
    alphabet1 = list(range(1, 9))
    alphabet2 = list(range(9, 17))
    parities = {v: v % 2 for v in alphabet1 + alphabet2}
    for sample in range(sample_count):
        s1 = rng.randint(1, 3)
        s2 = rng.randint(1, 3)
        set1, set2 = [], []
        for target, source in ((set1, alphabet1), (set2, alphabet2)):
            want = s1 if target is set1 else s2
            seen = set()
            guard = 0
            while len(target) < want and guard < 500:
                guard += 1
                w = random_basis_word(mode, source, parities, rng, degree_bound)
                if w not in seen:
                    seen.add(w)
                    target.append(w)
        products = products_of_word_sets(set1, set2, mode, parities)
        labels = [
            f"({format_relfree(RelFreeElement(mode, {w1: Fraction(1)}, parities))})"
            f"*({format_relfree(RelFreeElement(mode, {w2: Fraction(1)}, parities))})"
            for w1 in set1
            for w2 in set2
        ]
        for el, lab in zip(products, labels):
            if el.is_zero():
                return MultiplicativityReport(
                    mode, sample + 1, "fails", f"{lab} = 0 in the relatively free algebra"
                )
        words, matrix = coordinatize(products)
        rank = row_space(matrix.rows, matrix.n_cols).dim
        if rank < len(products):
            combo = kernel_basis(matrix.transpose())
            coeffs = dict(combo.rows[0])
            terms = " + ".join(f"{c}*{labels[i]}" for i, c in sorted(coeffs.items()))
            return MultiplicativityReport(mode, sample + 1, "fails", f"{terms} = 0")
    return MultiplicativityReport(mode, sample_count, "holds-on-samples", None)
