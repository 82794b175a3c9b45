import random

import pytest
from hypothesis import given, strategies as st

from thetax.arith import (ID, AddLeft, ExpOmega, FundFnError, add, ff_apply, ff_make, omega_pow,
                          omega_tower, parse_fn, random_fundfn, succ, times_nat)
from thetax.order import GT, LT, compare, triangle_less
from thetax.term import (E, OMEGA, ONE, ZERO, Sum, Theta, enumerate_terms, numeral, parse, show,
                         validate)
from thetax.wellorder import wo_finite, wo_nat

NAT = wo_nat()
F2 = wo_finite(2)
UNIVERSE = enumerate_terms(F2, 2, 4, 2).terms


def p(s):
    return parse(s, NAT)


def test_add():
    w = p("w(w(0))")
    assert add(NAT, ONE, w) is w
    assert show(add(NAT, w, ONE)) == "w(w(0)) + 1"
    assert add(NAT, OMEGA, OMEGA) is Sum((OMEGA, OMEGA))


def test_add_zero():
    assert add(NAT, ZERO, OMEGA) is OMEGA
    assert add(NAT, OMEGA, ZERO) is OMEGA


def test_powers_and_multiples():
    assert omega_pow(NAT, E(0)) is E(0)
    assert omega_pow(NAT, ZERO) is ONE
    assert times_nat(NAT, OMEGA, 2) is Sum((OMEGA, OMEGA))
    assert succ(NAT, ZERO) is ONE


def test_omega_tower():
    t = p("th(0)")
    assert omega_tower(NAT, 0, t) is t
    assert omega_tower(NAT, 2, ZERO) is p("w(w(0))")
    assert show(omega_tower(NAT, 1, add(NAT, E(0), numeral(2)))) == "w(E(0) + 2)"


@given(st.sampled_from(UNIVERSE), st.sampled_from(UNIVERSE))
def test_add_results_valid_and_monotone(s, t):
    r = add(F2, s, t)
    assert validate(F2, r).ok
    assert compare(F2, r, s) != LT
    if t is not ZERO:
        assert compare(F2, s, r) == LT


def test_fundfn_examples():
    assert ff_apply(NAT, ID, OMEGA) is OMEGA
    f = ff_make(NAT, AddLeft(OMEGA, ID))
    assert ff_apply(NAT, f, ZERO) is OMEGA
    left = ff_apply(NAT, f, Theta(ff_apply(NAT, f, ZERO)))
    assert left is Sum((OMEGA, Theta(OMEGA)))
    assert ff_apply(NAT, f, OMEGA) is Sum((OMEGA, OMEGA))
    assert triangle_less(NAT, left, ff_apply(NAT, f, OMEGA))


def test_fundfn_side_condition():
    # w^(id)(Om) = Om is not below w^(0+1) = w
    with pytest.raises(FundFnError):
        ff_make(NAT, AddLeft(ZERO, ExpOmega(ID)))
    with pytest.raises(FundFnError):
        parse_fn("1 + id", NAT)


def test_fundfn_argument_above_omega():
    with pytest.raises(FundFnError):
        ff_apply(NAT, ID, E(0))


def test_parse_fn():
    f = parse_fn("Om + id", NAT)
    assert show(ff_apply(NAT, f, p("th(0)"))) == "Om + th(0)"
    assert str(parse_fn("w^(id)", NAT)) == "w^(id)"


def test_random_fundfn_deterministic():
    gammas = [t for t in UNIVERSE if compare(F2, t, OMEGA) != GT]
    a = [str(random_fundfn(F2, random.Random(7), gammas)) for _ in range(3)]
    b = [str(random_fundfn(F2, random.Random(7), gammas)) for _ in range(3)]
    assert a == b


def test_random_fundfn_monotone():
    rng = random.Random(3)
    gammas = [t for t in UNIVERSE if compare(F2, t, OMEGA) != GT]
    args = sorted((t for t in UNIVERSE if compare(F2, t, OMEGA) == LT), key=lambda t: show(t))
    for _ in range(20):
        f = random_fundfn(F2, rng, gammas)
        for a in args:
            for b in args:
                if compare(F2, a, b) == LT:
                    assert compare(F2, ff_apply(F2, f, a), ff_apply(F2, f, b)) == LT
