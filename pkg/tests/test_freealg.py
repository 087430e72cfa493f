import random
from fractions import Fraction

import pytest

from gradedpi import Z2, TRIVIAL_GROUP, GroupSpec
from gradedpi.errors import DegreeConflictError, MalformedElementError, ParseError
from gradedpi.freealg import (
    NcPolynomial,
    format_poly,
    left_normed_commutator,
    multilinear_coordinates,
    multilinear_monomials,
    parse_poly,
    parse_signature,
    poly_from_coordinates,
    validate_signature,
    yvar,
    zvar,
)
from gradedpi.spaces import full_multilinearization, multidegree_components


def rand_poly(rng, uni, n_terms=4, max_len=3):
    """Random polynomial over a fixed variable-degree assignment."""
    n_vars = len(uni)
    out = NcPolynomial.zero()
    for _ in range(n_terms):
        w = tuple(rng.randint(1, n_vars) for _ in range(rng.randint(0, max_len)))
        c = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        out = out + c * NcPolynomial.word(w, {i: uni[i] for i in w})
    return out


def test_parse_and_format_round_trip():
    samples = [
        "x1*x2 - x2*x1",
        "2*x1 + x2*x3*x1 - 1/2*x2",
        "[x1, x2]",
        "[x1, [x2, x3]]",
        "[x1, x2, x3]",
        "3",
        "0",
        "x1",
    ]
    for text in samples:
        f = parse_poly(text, TRIVIAL_GROUP)
        again = parse_poly(format_poly(f), TRIVIAL_GROUP)
        assert f == again, text


def test_parse_yz_notation():
    f = parse_poly("[y1, z2]*z3 - 2*y1*z2*z3", Z2)
    assert f.universe == {1: (0,), 2: (1,), 3: (1,)}
    assert f.terms == {(1, 2, 3): Fraction(-1), (2, 1, 3): Fraction(-1)}
    assert format_poly(f, style="yz") == "-y1*z2*z3 - z2*y1*z3"
    assert parse_poly(format_poly(f, style="yz"), Z2) == f


def test_parse_explicit_degree_notation():
    g = GroupSpec((2, 2))
    f = parse_poly("x1^(1,0)*x2^(0,1)", g)
    assert f.universe == {1: (1, 0), 2: (0, 1)}
    assert parse_poly(format_poly(f), g) == f


def test_left_normed_commutator():
    a, b, c = yvar(1), yvar(2), yvar(3)
    assert left_normed_commutator([a, b]) == a * b - b * a
    manual = (a * b - b * a) * c - c * (a * b - b * a)
    assert left_normed_commutator([a, b, c]) == manual
    assert format_poly(left_normed_commutator([a, b, c]), style="yz") == (
        "y1*y2*y3 - y2*y1*y3 - y3*y1*y2 + y3*y2*y1"
    )


def test_degree_conflict_detected():
    with pytest.raises(DegreeConflictError):
        parse_poly("y1*z1", Z2)
    with pytest.raises(DegreeConflictError):
        yvar(1) * zvar(1)


def test_parse_errors():
    for bad in ["x1 +", "[x1", "x1^2", "1/0", "x0", "qq3"]:
        with pytest.raises((ParseError, MalformedElementError, ZeroDivisionError)):
            parse_poly(bad, TRIVIAL_GROUP)


def test_ring_axioms_on_samples():
    rng = random.Random(5)
    uni = {1: (0,), 2: (1,), 3: (1,)}
    for _ in range(15):
        f = rand_poly(rng, uni)
        g = rand_poly(rng, uni)
        h = rand_poly(rng, uni)
        assert (f * g) * h == f * (g * h)
        assert f * (g + h) == f * g + f * h
        assert (f + g) * h == f * h + g * h
        assert f + g == g + f
        assert f - f == NcPolynomial.zero()
        assert f * NcPolynomial.constant(1) == f
        assert NcPolynomial.constant(0) * f == NcPolynomial.zero()


def test_scalar_coercion():
    f = yvar(1)
    assert 2 * f == f + f
    assert f * Fraction(1, 2) + f * Fraction(1, 2) == f
    assert f - 1 == f + NcPolynomial.constant(-1)


def test_substitute_is_homomorphism():
    rng = random.Random(11)
    uni = {1: (0,), 2: (0,), 3: (1,)}
    images = {
        1: parse_poly("y4*y5", Z2),
        2: parse_poly("y5 + 2*y6", Z2),
        3: parse_poly("z7*z8*z9", Z2),
    }
    for _ in range(10):
        f = rand_poly(rng, uni)
        g = rand_poly(rng, uni)
        fs = f.substitute(images, Z2)
        gs = g.substitute(images, Z2)
        assert (f * g).substitute(images, Z2) == fs * gs
        assert (f + g).substitute(images, Z2) == fs + gs


def test_substitute_checks_degrees():
    from gradedpi.errors import GradedSubstitutionError

    f = zvar(1) * zvar(2)
    with pytest.raises(GradedSubstitutionError):
        f.substitute({1: yvar(3)}, Z2)
    with pytest.raises(GradedSubstitutionError):
        f.substitute({1: zvar(3) + yvar(4)}, Z2)


def test_rename_variables():
    f = parse_poly("z1*z2 - z2*z1", Z2)
    g = f.rename_variables({1: 5, 2: 7})
    assert g == parse_poly("z5*z7 - z7*z5", Z2)
    with pytest.raises(MalformedElementError):
        f.rename_variables({1: 2, 2: 2})


def test_multilinear_monomials_order():
    assert multilinear_monomials(1) == [(1,)]
    assert multilinear_monomials(3) == [
        (1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1),
    ]
    assert len(multilinear_monomials(4)) == 24


def test_signature_parsing_and_validation():
    assert parse_signature("0,1", Z2) == ((0,), (1,))
    assert parse_signature("0.1,1.0", GroupSpec((2, 2))) == ((0, 1), (1, 0))
    assert validate_signature([(1,), (0,)], Z2) == ((1,), (0,))
    with pytest.raises(MalformedElementError):
        validate_signature([(2,)], Z2)
    # residues are reduced into the group
    assert parse_signature("0,5", Z2) == ((0,), (1,))
    with pytest.raises(ParseError):
        parse_signature("", Z2)
    with pytest.raises(ParseError):
        parse_signature("0,a", Z2)


def test_multilinear_coordinates_round_trip():
    sig = ((1,), (1,))
    f = parse_poly("z1*z2 + 3*z2*z1", Z2)
    coords = multilinear_coordinates(f, sig, Z2)
    assert coords == {0: Fraction(1), 1: Fraction(3)}
    assert poly_from_coordinates(coords, sig, Z2) == f


def test_multilinear_coordinates_reject_mismatch():
    sig = ((1,), (1,))
    with pytest.raises(MalformedElementError):
        multilinear_coordinates(parse_poly("z1*z1", Z2), sig, Z2)
    with pytest.raises(MalformedElementError):
        multilinear_coordinates(parse_poly("y1*z2", Z2), sig, Z2)


def test_full_multilinearization_square():
    lin, sig = full_multilinearization(parse_poly("y1*y1", Z2), Z2)
    assert sig == ((0,), (0,))
    assert lin == parse_poly("y1*y2 + y2*y1", Z2)


def test_full_multilinearization_counts():
    # x1^2*x2 has 2 substitutions for x1: coefficient pattern of P(2,1)
    f = parse_poly("x1*x1*x2", TRIVIAL_GROUP)
    lin, sig = full_multilinearization(f, TRIVIAL_GROUP)
    assert len(sig) == 3
    assert sum(abs(c) for c in lin.terms.values()) == 2
    for w in lin.terms:
        assert sorted(w) == [1, 2, 3]


def test_multidegree_components():
    f = parse_poly("y1*y1 + z2*y1 - 3", Z2)
    comps = multidegree_components(f)
    assert set(comps) == {(), ((1, 2),), ((1, 1), (2, 1))}
    total = NcPolynomial.zero()
    for part in comps.values():
        total = total + part
    assert total == f


def test_word_degree_and_homogeneity():
    f = parse_poly("z1*z2", Z2)
    assert f.homogeneous_degree(Z2) == (0,)
    g = parse_poly("z1 + y2", Z2)
    assert g.homogeneous_degree(Z2) is None
    assert f.max_degree() == 2
