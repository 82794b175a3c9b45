import pytest
from hypothesis import given, strategies as st

from thetax import logic as L
from thetax.logic import (NZERO, And, ExistsSet, ForallNum, ForallSet, FormulaSyntaxError, Grade,
                          In, NegLit, NotIn, NPlus, NSucc, NTimes, NVar, OpenTermError, Or,
                          PosLit, Sequent, U, X, eq, eval_term, find_redex, formula_code,
                          formula_from_code, grade, is_arithmetic, is_axiomatic, is_weak, negate,
                          numeral, parse_formula, show, subst_comprehension, subst_num)

# -- a generator of well-scoped formulas --------------------------------------------------

num_terms = st.recursive(
    st.one_of(st.just(NZERO), st.integers(0, 2).map(NVar)),
    lambda inner: st.one_of(inner.map(NSucc), st.tuples(inner, inner).map(lambda p: NPlus(*p)),
                            st.tuples(inner, inner).map(lambda p: NTimes(*p))),
    max_leaves=4)
set_vars = st.one_of(st.integers(0, 2).map(U), st.integers(0, 1).map(X))
literals = st.one_of(
    st.tuples(st.sampled_from([PosLit, NegLit]), st.sampled_from(["=", "<"]), num_terms, num_terms)
    .map(lambda p: p[0](p[1], (p[2], p[3]))),
    st.tuples(st.sampled_from([In, NotIn]), num_terms, set_vars).map(lambda p: p[0](p[1], p[2])),
)


def _quant(args):
    cls, var, body = args
    return cls(var, body)


formulas = st.recursive(
    literals,
    lambda inner: st.one_of(
        st.tuples(inner, inner).map(lambda p: And(*p)),
        st.tuples(inner, inner).map(lambda p: Or(*p)),
        st.tuples(st.sampled_from([L.ForallNum, L.ExistsNum]), st.integers(0, 2), inner).map(_quant),
        st.tuples(st.sampled_from([L.ForallSet, L.ExistsSet]), st.integers(0, 1), inner).map(_quant),
    ),
    max_leaves=6)


@given(formulas)
def test_negate_involution(f):
    assert negate(negate(f)) is f


@given(formulas)
def test_grade_self_dual(f):
    assert grade(negate(f)) == grade(f)


@given(formulas)
def test_show_parse_roundtrip(f):
    assert parse_formula(show(f)) is f


@given(formulas)
def test_weak_grade_at_most_omega(f):
    if is_weak(f):
        assert grade(f) <= Grade.omega_plus(0)
    if is_arithmetic(f):
        assert not grade(f).omega


@given(formulas, st.integers(0, 2), st.integers(0, 5))
def test_subst_num_removes_var(f, var, n):
    g = subst_num(f, var, n)
    assert var not in L.free_num_vars(g)


# -- spec examples --------------------------------------------------------------------------

A, B = eq(NZERO, NZERO), In(NZERO, U(1))


def test_negate_examples():
    assert negate(In(NZERO, U(0))) is NotIn(NZERO, U(0))
    assert negate(And(A, B)) is Or(negate(A), negate(B))


def test_eval():
    assert eval_term(NSucc(NZERO)) == 1
    assert eval_term(NPlus(numeral(2), NTimes(numeral(3), numeral(4)))) == 14
    with pytest.raises(OpenTermError):
        eval_term(NVar(0))


def test_grade_examples():
    assert grade(PosLit("=", (NZERO, NZERO))) == Grade.finite(0)
    assert grade(ForallSet(0, In(NZERO, X(0)))) == Grade.omega_plus(0)
    assert grade(Or(A, A)) == Grade.finite(1)
    assert grade(ForallSet(0, ForallSet(1, In(NZERO, X(1))))) == Grade.omega_plus(1)
    assert Grade.finite(7) < Grade.omega_plus(0)
    assert Grade.parse("w+2") == Grade.omega_plus(2) and str(Grade.omega_plus(2)) == "w+2"


def test_classification():
    arith = In(NZERO, U(0))
    assert is_arithmetic(arith)
    assert is_weak(ForallSet(0, In(NZERO, X(0))))
    assert not is_weak(ExistsSet(0, In(NZERO, X(0))))


def test_substitution_examples():
    x = NVar(0)
    assert subst_num(In(x, U(1)), 0, 3) is In(numeral(3), U(1))
    hole = eq(NVar(0), NZERO)
    t = numeral(2)
    assert subst_comprehension(In(t, U(1)), 1, 0, hole) is eq(t, NZERO)
    assert subst_comprehension(NotIn(t, U(1)), 1, 0, hole) is NegLit("=", (t, NZERO))


def test_subst_avoids_capture():
    # substituting x_1 for x_0 under a binder of x_1 must rename the binder
    f = ForallNum(1, PosLit("<", (NVar(0), NVar(1))))
    g = L.subst_term(f, 0, NVar(1))
    assert 1 in L.free_num_vars(g)


def test_axiomatic_examples():
    assert is_axiomatic(Sequent([A]))
    assert is_axiomatic(Sequent([In(NSucc(NZERO), U(3)), NotIn(NPlus(NZERO, NSucc(NZERO)), U(3))]))
    assert not is_axiomatic(Sequent([In(NZERO, U(3)), NotIn(NSucc(NZERO), U(3))]))


def test_find_redex():
    lit = NegLit("=", (NZERO, NZERO))
    e = Or(A, In(NZERO, U(2)))
    pre, redex, post = find_redex(Sequent([In(NZERO, U(1)), e, lit]))
    assert pre == (In(NZERO, U(1)),) and redex is e and post == (lit,)
    assert find_redex(Sequent([lit])) is None


def test_sequent_dedup_keeps_first_order():
    s = Sequent([B, A, B])
    assert s.formulas == (B, A)
    assert A in s


@pytest.mark.parametrize("text", ["0 =", "all X_0. 0=0", "(0=0 & 0=0", "0 in Y"])
def test_parse_errors(text):
    with pytest.raises(FormulaSyntaxError):
        parse_formula(text)


def test_codes():
    assert [show(formula_from_code(i)) for i in range(4)] == ["0<0", "0=0", "0!<0", "0!=0"]
    for n in (0, 5, 40, 300):
        assert formula_code(formula_from_code(n)) == n
