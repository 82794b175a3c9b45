import pytest
from hypothesis import given, strategies as st

from thetax.arith import omega_pow
from thetax.order import (EQ, GT, LT, compare, is_epsilon_term, leq, max_term, oracle_compare,
                          triangle_less)
from thetax.term import E, OMEGA, ZERO, enumerate_terms, parse, star, Theta
from thetax.wellorder import wo_finite, wo_nat

NAT = wo_nat()
F2 = wo_finite(2)
UNIVERSE = enumerate_terms(F2, 2, 4, 2).terms
terms = st.sampled_from(UNIVERSE)


def p(s):
    return parse(s, NAT)


@pytest.mark.parametrize("s,t", [
    ("0", "Om"),
    ("th(Om)", "E(0)"),
    ("E(0)", "E(1)"),
    ("th(th(0))", "th(Om)"),
    ("w(w(0))", "th(0)"),
])
def test_compare_examples(s, t):
    assert compare(NAT, p(s), p(t)) == LT
    assert compare(NAT, p(t), p(s)) == GT


def test_triangle_examples():
    assert triangle_less(NAT, p("0"), p("w(0)"))
    assert triangle_less(NAT, p("th(0)"), p("Om"))


def test_is_epsilon_term():
    assert is_epsilon_term(OMEGA)
    assert not is_epsilon_term(p("w(0)"))
    assert is_epsilon_term(p("th(E(0))"))


def test_max_term():
    assert max_term(NAT, OMEGA, E(0)) is E(0)


def test_oracle_tiny():
    table = oracle_compare([ZERO, OMEGA], NAT)
    assert table.less(ZERO, OMEGA) and not table.less(OMEGA, ZERO)
    assert table.total


def test_oracle_agrees_small():
    uni = enumerate_terms(F2, 2, 4, 2)
    table = oracle_compare(uni)
    assert table.total
    for s in uni:
        for t in uni:
            assert table.less(s, t) == (compare(F2, s, t) == LT)


@given(terms, terms)
def test_antisymmetry(s, t):
    a, b = compare(F2, s, t), compare(F2, t, s)
    assert {a, b} == {LT, GT} or (a == b == EQ and s is t)


@given(terms, terms, terms)
def test_transitive(a, b, c):
    if leq(F2, a, b) and leq(F2, b, c):
        assert leq(F2, a, c)


@given(terms)
def test_triangle_irreflexive(t):
    assert not triangle_less(F2, t, t)


@given(terms)
def test_star_below_theta(t):
    assert compare(F2, star(F2, t), Theta(t)) == LT


@given(terms, terms)
def test_below_theta_iff_power_below(b, a):
    ta = Theta(a)
    assert (compare(F2, b, ta) == LT) == (compare(F2, omega_pow(F2, b), ta) == LT)


def test_carrier_error():
    with pytest.raises(ValueError):
        compare(wo_finite(2), E(5), ZERO)
