import pytest
from hypothesis import given, strategies as st

from thetax.term import (E, OMEGA, ONE, ZERO, NormalizationError, ResourceError, Sum, Theta,
                         TermSyntaxError, WPow, enumerate_terms, g_complexity, normalize, parse,
                         parse_raw, raw_trees, show, size, star, validate)
from thetax.wellorder import wo_finite, wo_nat

NAT = wo_nat()
F2 = wo_finite(2)
UNIVERSE = enumerate_terms(F2, 2, 4, 2).terms


def test_hash_consing():
    assert Theta(OMEGA) is Theta(OMEGA)
    assert WPow(ZERO) is ONE


@pytest.mark.parametrize("raw,expected", [
    ("w(Om)", OMEGA),
    ("w(th(0))", Theta(ZERO)),
    ("w(Om) + w(Om)", Sum((OMEGA, OMEGA))),
])
def test_normalize(raw, expected):
    assert normalize(parse_raw(raw), NAT) is expected


def test_normalize_rejects_bad_carrier():
    with pytest.raises((NormalizationError, ValueError)):
        normalize(parse_raw("E(5)"), wo_finite(3))


def test_validate():
    assert validate(NAT, Theta(OMEGA)).ok
    rep = validate(NAT, Sum((ONE, OMEGA)))
    assert not rep.ok and "increasing" in str(rep)
    assert not validate(wo_finite(3), E(5)).ok


def test_star():
    assert star(NAT, ZERO) is ZERO
    assert star(NAT, Theta(OMEGA)) is Theta(OMEGA)
    assert star(NAT, Sum((OMEGA, Theta(ZERO)))) is Theta(ZERO)


def test_g_complexity():
    assert g_complexity(E(0)) == 0
    assert g_complexity(Theta(ZERO)) == 1
    assert g_complexity(Sum((WPow(Theta(ZERO)), WPow(ZERO)))) == 2


def test_parse_examples():
    assert parse("th(Om + th(0))", NAT) is Theta(Sum((OMEGA, Theta(ZERO))))
    assert parse("3", NAT) is Sum((ONE, ONE, ONE))
    assert show(parse("w(w(0))", NAT)) == "w(w(0))"


@pytest.mark.parametrize("text", ["th(", "Om +", "x", "E(a)", "th(0))"])
def test_parse_errors(text):
    with pytest.raises(TermSyntaxError):
        parse(text, NAT)


@given(st.sampled_from(UNIVERSE))
def test_show_parse_roundtrip(t):
    assert parse(show(t), F2) is t


def test_enumerate_small():
    uni = enumerate_terms(wo_finite(1), 0, 2, 1)
    assert set(uni.terms) == {ZERO, OMEGA, E(0)}


def test_enumerate_monotone():
    a = set(enumerate_terms(F2, 0, 3, 2).terms)
    b = set(enumerate_terms(F2, 1, 3, 2).terms)
    assert a < b and Theta(ZERO) in b - a and ONE in b - a


def test_enumerate_regression_pin():
    assert len(UNIVERSE) == 58


def test_enumerate_matches_generate_and_filter():
    atoms = [ZERO, OMEGA, E(0), E(1)]
    brute = {r for r in raw_trees(atoms, 4) if validate(F2, r).ok and g_complexity(r) <= 2}
    assert brute == set(UNIVERSE)
    assert all(size(t) <= 4 for t in UNIVERSE)


def test_enumerate_deterministic():
    assert enumerate_terms(F2, 2, 4, 2).terms == UNIVERSE


def test_enumerate_cap():
    with pytest.raises(ResourceError):
        enumerate_terms(F2, 3, 7, 2, cap=100)
