"""Second-order arithmetic formulas in negation normal form, sequents, grades.

Number terms are built from ``0``, successor, ``+`` and ``*`` over variables
``x_i``. Set variables are either free (``U_m``) or bound (``X_i``). Number
variables share one namespace ``x_i``; whether an occurrence is free or bound
is decided by scoping.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import count

from ._struct import Struct


class LogicError(ValueError):
    pass


class OpenTermError(LogicError):
    pass


class FormulaSyntaxError(LogicError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


# -- number terms ----------------------------------------------------------------

class NumTerm(Struct):
    __slots__ = ()

    def __str__(self):
        return show_term(self)


@dataclass(frozen=True, eq=False)
class NZero(NumTerm):
    pass


@dataclass(frozen=True, eq=False)
class NSucc(NumTerm):
    arg: NumTerm


@dataclass(frozen=True, eq=False)
class NPlus(NumTerm):
    left: NumTerm
    right: NumTerm


@dataclass(frozen=True, eq=False)
class NTimes(NumTerm):
    left: NumTerm
    right: NumTerm


@dataclass(frozen=True, eq=False)
class NVar(NumTerm):
    idx: int


NZERO = NZero()


def numeral(n: int) -> NumTerm:
    t = NZERO
    for _ in range(n):
        t = NSucc(t)
    return t


def eval_term(t: NumTerm) -> int:
    if isinstance(t, NZero):
        return 0
    if isinstance(t, NSucc):
        return eval_term(t.arg) + 1
    if isinstance(t, NPlus):
        return eval_term(t.left) + eval_term(t.right)
    if isinstance(t, NTimes):
        return eval_term(t.left) * eval_term(t.right)
    if isinstance(t, NVar):
        raise OpenTermError(f"cannot evaluate open term {show_term(t)}")
    raise TypeError(t)


def term_vars(t: NumTerm) -> set:
    if isinstance(t, NVar):
        return {t.idx}
    if isinstance(t, NSucc):
        return term_vars(t.arg)
    if isinstance(t, (NPlus, NTimes)):
        return term_vars(t.left) | term_vars(t.right)
    return set()


def subst_in_term(t: NumTerm, var: int, s: NumTerm) -> NumTerm:
    if isinstance(t, NVar):
        return s if t.idx == var else t
    if isinstance(t, NSucc):
        return NSucc(subst_in_term(t.arg, var, s))
    if isinstance(t, NPlus):
        return NPlus(subst_in_term(t.left, var, s), subst_in_term(t.right, var, s))
    if isinstance(t, NTimes):
        return NTimes(subst_in_term(t.left, var, s), subst_in_term(t.right, var, s))
    return t


@lru_cache(maxsize=None)
def show_term(t: NumTerm) -> str:
    if isinstance(t, NZero):
        return "0"
    if isinstance(t, NSucc):
        return show_term(t.arg) + "'"
    if isinstance(t, NPlus):
        return f"({show_term(t.left)}+{show_term(t.right)})"
    if isinstance(t, NTimes):
        return f"({show_term(t.left)}*{show_term(t.right)})"
    if isinstance(t, NVar):
        return f"x_{t.idx}"
    raise TypeError(t)


# -- formulas ------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SetVar(Struct):
    bound: bool
    idx: int

    def __str__(self):
        return f"{'X' if self.bound else 'U'}_{self.idx}"


def U(m: int) -> SetVar:
    return SetVar(False, m)


def X(i: int) -> SetVar:
    return SetVar(True, i)


class Formula(Struct):
    __slots__ = ()

    def __str__(self):
        return show(self)


RELATIONS = {"=": lambda a, b: a == b, "<": lambda a, b: a < b}


@dataclass(frozen=True, eq=False)
class PosLit(Formula):
    rel: str
    args: tuple


@dataclass(frozen=True, eq=False)
class NegLit(Formula):
    rel: str
    args: tuple


@dataclass(frozen=True, eq=False)
class In(Formula):
    term: NumTerm
    var: SetVar


@dataclass(frozen=True, eq=False)
class NotIn(Formula):
    term: NumTerm
    var: SetVar


@dataclass(frozen=True, eq=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, eq=False)
class ForallNum(Formula):
    var: int
    body: Formula


@dataclass(frozen=True, eq=False)
class ExistsNum(Formula):
    var: int
    body: Formula


@dataclass(frozen=True, eq=False)
class ForallSet(Formula):
    var: int
    body: Formula


@dataclass(frozen=True, eq=False)
class ExistsSet(Formula):
    var: int
    body: Formula


LITERALS = (PosLit, NegLit, In, NotIn)
_DUAL = {PosLit: NegLit, NegLit: PosLit, In: NotIn, NotIn: In, And: Or, Or: And,
         ForallNum: ExistsNum, ExistsNum: ForallNum, ForallSet: ExistsSet, ExistsSet: ForallSet}


def eq(a, b) -> Formula:
    return PosLit("=", (a, b))


def is_literal(f: Formula) -> bool:
    return isinstance(f, LITERALS)


def negate(f: Formula) -> Formula:
    cls = type(f)
    if cls in (PosLit, NegLit):
        return _DUAL[cls](f.rel, f.args)
    if cls in (In, NotIn):
        return _DUAL[cls](f.term, f.var)
    if cls in (And, Or):
        return _DUAL[cls](negate(f.left), negate(f.right))
    return _DUAL[cls](f.var, negate(f.body))


def implies(a: Formula, b: Formula) -> Formula:
    return Or(negate(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


# -- variables and substitution ----------------------------------------------------

def free_num_vars(f: Formula) -> set:
    if isinstance(f, (PosLit, NegLit)):
        return set().union(*(term_vars(t) for t in f.args))
    if isinstance(f, (In, NotIn)):
        return term_vars(f.term)
    if isinstance(f, (And, Or)):
        return free_num_vars(f.left) | free_num_vars(f.right)
    if isinstance(f, (ForallNum, ExistsNum)):
        return free_num_vars(f.body) - {f.var}
    return free_num_vars(f.body)


def free_set_vars(f: Formula) -> set:
    """Free set variables, as SetVar objects (free U_m and unbound X_i)."""
    if isinstance(f, (PosLit, NegLit)):
        return set()
    if isinstance(f, (In, NotIn)):
        return {f.var}
    if isinstance(f, (And, Or)):
        return free_set_vars(f.left) | free_set_vars(f.right)
    if isinstance(f, (ForallSet, ExistsSet)):
        return free_set_vars(f.body) - {X(f.var)}
    return free_set_vars(f.body)


def all_num_var_indices(f: Formula) -> set:
    if isinstance(f, (PosLit, NegLit)):
        return set().union(*(term_vars(t) for t in f.args))
    if isinstance(f, (In, NotIn)):
        return term_vars(f.term)
    if isinstance(f, (And, Or)):
        return all_num_var_indices(f.left) | all_num_var_indices(f.right)
    if isinstance(f, (ForallNum, ExistsNum)):
        return all_num_var_indices(f.body) | {f.var}
    return all_num_var_indices(f.body)


def all_set_var_indices(f: Formula, bound: bool) -> set:
    if isinstance(f, (PosLit, NegLit)):
        return set()
    if isinstance(f, (In, NotIn)):
        return {f.var.idx} if f.var.bound == bound else set()
    if isinstance(f, (And, Or)):
        return all_set_var_indices(f.left, bound) | all_set_var_indices(f.right, bound)
    extra = {f.var} if bound and isinstance(f, (ForallSet, ExistsSet)) else set()
    return all_set_var_indices(f.body, bound) | extra


def free_set_indices(f: Formula) -> set:
    """Indices m of free set variables U_m occurring in ``f``."""
    return all_set_var_indices(f, bound=False)


def subst_term(f: Formula, var: int, s: NumTerm) -> Formula:
    """Capture-avoiding substitution of the number term ``s`` for ``x_var``."""
    svars = term_vars(s)
    return _subst_num(f, var, s, svars)


def _subst_num(f, var, s, svars):
    if isinstance(f, (PosLit, NegLit)):
        return type(f)(f.rel, tuple(subst_in_term(t, var, s) for t in f.args))
    if isinstance(f, (In, NotIn)):
        return type(f)(subst_in_term(f.term, var, s), f.var)
    if isinstance(f, (And, Or)):
        return type(f)(_subst_num(f.left, var, s, svars), _subst_num(f.right, var, s, svars))
    if isinstance(f, (ForallNum, ExistsNum)):
        if f.var == var or var not in free_num_vars(f.body):
            return f
        if f.var in svars:
            fresh = max(all_num_var_indices(f) | svars | {var}) + 1
            body = _subst_num(f.body, f.var, NVar(fresh), {fresh})
            return type(f)(fresh, _subst_num(body, var, s, svars))
        return type(f)(f.var, _subst_num(f.body, var, s, svars))
    return type(f)(f.var, _subst_num(f.body, var, s, svars))


def subst_num(f: Formula, var: int, n: int) -> Formula:
    return subst_term(f, var, numeral(n))


def subst_setvar(f: Formula, x: int, target: SetVar) -> Formula:
    """Replace free occurrences of the bound-sort variable X_x by ``target``."""
    src = X(x)
    if isinstance(f, (PosLit, NegLit)):
        return f
    if isinstance(f, (In, NotIn)):
        return type(f)(f.term, target) if f.var is src else f
    if isinstance(f, (And, Or)):
        return type(f)(subst_setvar(f.left, x, target), subst_setvar(f.right, x, target))
    if isinstance(f, (ForallSet, ExistsSet)) and f.var == x:
        return f
    return type(f)(f.var, subst_setvar(f.body, x, target))


def rename_bound_apart(f: Formula, avoid: set) -> Formula:
    """Rename bound number variables of ``f`` that lie in ``avoid``."""
    used = set(avoid) | all_num_var_indices(f)
    fresh = count(max(used, default=-1) + 1)

    def go(g):
        if isinstance(g, LITERALS):
            return g
        if isinstance(g, (And, Or)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, (ForallNum, ExistsNum)):
            body = go(g.body)
            if g.var in avoid:
                v = next(fresh)
                return type(g)(v, subst_term(body, g.var, NVar(v)))
            return type(g)(g.var, body)
        return type(g)(g.var, go(g.body))

    return go(f)


def subst_comprehension(f: Formula, m: int, hole: int, a: Formula) -> Formula:
    """F(A): every ``e in U_m`` becomes A(e) and every ``e notin U_m`` becomes not A(e).

    ``a`` is the formula A(x_hole). Bound variables of ``f`` clashing with free
    variables of A are renamed first.
    """
    target = U(m)
    params = free_num_vars(a) - {hole}
    f = rename_bound_apart(f, params)

    def go(g):
        if isinstance(g, (In, NotIn)) and g.var is target:
            inst = subst_term(a, hole, g.term)
            return inst if isinstance(g, In) else negate(inst)
        if isinstance(g, LITERALS):
            return g
        if isinstance(g, (And, Or)):
            return type(g)(go(g.left), go(g.right))
        return type(g)(g.var, go(g.body))

    return go(f)


# -- classification and grade ----------------------------------------------------------

def is_arithmetic(f: Formula) -> bool:
    if isinstance(f, LITERALS):
        return True
    if isinstance(f, (And, Or)):
        return is_arithmetic(f.left) and is_arithmetic(f.right)
    if isinstance(f, (ForallSet, ExistsSet)):
        return False
    return is_arithmetic(f.body)


def is_weak(f: Formula) -> bool:
    """Arithmetic, or a single universal set quantifier over an arithmetic matrix."""
    if is_arithmetic(f):
        return True
    return isinstance(f, ForallSet) and is_arithmetic(f.body)


def is_pi11(f: Formula) -> bool:
    return isinstance(f, ForallSet) and is_arithmetic(f.body)


@dataclass(frozen=True, order=True)
class Grade:
    """An element of omega+omega: ``offset`` if not ``omega``, else omega+offset."""
    omega: bool
    offset: int

    @staticmethod
    def finite(n: int) -> "Grade":
        return Grade(False, n)

    @staticmethod
    def omega_plus(k: int = 0) -> "Grade":
        return Grade(True, k)

    def succ(self) -> "Grade":
        return Grade(self.omega, self.offset + 1)

    @property
    def kind(self) -> str:
        return "omega_plus" if self.omega else "finite"

    def __str__(self):
        if not self.omega:
            return str(self.offset)
        return "w" if self.offset == 0 else f"w+{self.offset}"

    @staticmethod
    def parse(text: str) -> "Grade":
        text = text.strip()
        if text.isdigit():
            return Grade.finite(int(text))
        if text == "w":
            return Grade.omega_plus(0)
        if text.startswith("w+") and text[2:].isdigit():
            return Grade.omega_plus(int(text[2:]))
        raise ValueError(f"bad grade {text!r}")


def grade(f: Formula) -> Grade:
    if isinstance(f, LITERALS):
        return Grade.finite(0)
    if isinstance(f, (And, Or)):
        return max(grade(f.left), grade(f.right)).succ()
    if isinstance(f, (ForallNum, ExistsNum)):
        return grade(f.body).succ()
    if is_arithmetic(f.body):
        return Grade.omega_plus(0)
    return grade(f.body).succ()


# -- truth of closed literals --------------------------------------------------------

def literal_truth(f: Formula) -> bool | None:
    """Truth value of a closed arithmetic literal; None for set literals."""
    if isinstance(f, (PosLit, NegLit)):
        val = RELATIONS[f.rel](*(eval_term(t) for t in f.args))
        return val if isinstance(f, PosLit) else not val
    return None


# -- sequents ------------------------------------------------------------------------

class Sequent:
    """Finite set of closed formulas kept in order of first occurrence."""

    __slots__ = ("formulas", "_set")

    def __init__(self, formulas=()):
        seen = set()
        out = []
        for f in formulas:
            if f not in seen:
                seen.add(f)
                out.append(f)
        self.formulas = tuple(out)
        self._set = frozenset(seen)

    def __iter__(self):
        return iter(self.formulas)

    def __len__(self):
        return len(self.formulas)

    def __contains__(self, f):
        return f in self._set

    def __getitem__(self, i):
        return self.formulas[i]

    def __eq__(self, other):
        return isinstance(other, Sequent) and self.formulas == other.formulas

    def __hash__(self):
        return hash(self.formulas)

    def as_set(self) -> frozenset:
        return self._set

    def texts(self) -> list:
        return [show(f) for f in self.formulas]

    def __repr__(self):
        return "Sequent[" + ", ".join(self.texts()) + "]"


def is_axiomatic(gamma) -> bool:
    ins = {}
    outs = {}
    for f in gamma:
        if isinstance(f, (PosLit, NegLit)):
            if literal_truth(f):
                return True
        elif isinstance(f, In):
            ins.setdefault(f.var, set()).add(eval_term(f.term))
        elif isinstance(f, NotIn):
            outs.setdefault(f.var, set()).add(eval_term(f.term))
    return any(ins[v] & outs.get(v, set()) for v in ins)


def find_redex(gamma):
    """(prefix, redex, suffix) for the first non-literal, or None if all literals."""
    fs = tuple(gamma)
    for i, f in enumerate(fs):
        if not is_literal(f):
            return fs[:i], f, fs[i + 1:]
    return None


# -- text syntax -----------------------------------------------------------------------

@lru_cache(maxsize=None)
def show(f: Formula) -> str:
    if isinstance(f, PosLit):
        return f"{show_term(f.args[0])}{f.rel}{show_term(f.args[1])}"
    if isinstance(f, NegLit):
        return f"{show_term(f.args[0])}!{f.rel}{show_term(f.args[1])}"
    if isinstance(f, In):
        return f"{show_term(f.term)} in {f.var}"
    if isinstance(f, NotIn):
        return f"{show_term(f.term)} notin {f.var}"
    if isinstance(f, And):
        return f"({show(f.left)} & {show(f.right)})"
    if isinstance(f, Or):
        return f"({show(f.left)} | {show(f.right)})"
    word = {ForallNum: "all x_", ExistsNum: "ex x_", ForallSet: "ALL X_", ExistsSet: "EX X_"}[type(f)]
    return f"{word}{f.var}. {show(f.body)}"


_FTOK = re.compile(r"\s*(notin|in|all|ex|ALL|EX|x_\d+|X_\d+|U_\d+|!=|!<|[0'()+*=<&|.])")


def _ftokens(text):
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _FTOK.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        toks.append((m.group(1), m.start(1)))
        pos = m.end()
    toks.append(("", len(text)))
    return toks


def parse_formula(text: str) -> Formula:
    toks = _ftokens(text)

    def fail(i, what):
        tok, pos = toks[i]
        raise FormulaSyntaxError(f"expected {what}, found {tok or 'end of input'!r}", pos)

    def term(i):
        tok = toks[i][0]
        if tok == "0":
            t, i = NZERO, i + 1
        elif tok.startswith("x_"):
            t, i = NVar(int(tok[2:])), i + 1
        elif tok == "(":
            a, j = term(i + 1)
            op = toks[j][0]
            if op not in "+*" or not op:
                fail(j, "'+' or '*'")
            b, k = term(j + 1)
            if toks[k][0] != ")":
                fail(k, "')'")
            t, i = (NPlus if op == "+" else NTimes)(a, b), k + 1
        else:
            fail(i, "a number term")
        while toks[i][0] == "'":
            t, i = NSucc(t), i + 1
        return t, i

    def literal(i):
        a, i = term(i)
        op = toks[i][0]
        if op in ("in", "notin"):
            sv = toks[i + 1][0]
            if not (sv.startswith("U_") or sv.startswith("X_")):
                fail(i + 1, "a set variable")
            var = SetVar(sv[0] == "X", int(sv[2:]))
            return (In if op == "in" else NotIn)(a, var), i + 2
        if op in ("=", "<", "!=", "!<"):
            b, j = term(i + 1)
            cls = NegLit if op.startswith("!") else PosLit
            return cls(op[-1], (a, b)), j
        fail(i, "a relation")

    def formula(i):
        tok = toks[i][0]
        if tok in ("all", "ex", "ALL", "EX"):
            v = toks[i + 1][0]
            want = "x_" if tok in ("all", "ex") else "X_"
            if not v.startswith(want):
                fail(i + 1, f"a variable {want}i")
            if toks[i + 2][0] != ".":
                fail(i + 2, "'.'")
            body, j = formula(i + 3)
            cls = {"all": ForallNum, "ex": ExistsNum, "ALL": ForallSet, "EX": ExistsSet}[tok]
            return cls(int(v[2:]), body), j
        if tok == "(":
            # a parenthesis opens either a compound formula or a number term
            try:
                left, j = formula(i + 1)
                op = toks[j][0]
                if op in ("&", "|"):
                    right, k = formula(j + 1)
                    if toks[k][0] != ")":
                        fail(k, "')'")
                    return (And if op == "&" else Or)(left, right), k + 1
            except FormulaSyntaxError:
                pass
        return literal(i)

    f, i = formula(0)
    if toks[i][0]:
        fail(i, "end of input")
    return f


# -- Goedel codes: index of the canonical text in length-lexicographic order ------------

@lru_cache(maxsize=None)
def _terms_of_len(n: int) -> tuple:
    out = []
    if n == 1:
        out.append(NZERO)
    if n >= 2:
        out.extend(NSucc(t) for t in _terms_of_len(n - 1))
    # x_i has length 2 + digits(i)
    if n >= 3:
        lo, hi = (0, 10) if n == 3 else (10 ** (n - 3), 10 ** (n - 2))
        out.extend(NVar(i) for i in range(lo, hi))
    for k in range(1, n - 3):
        for a in _terms_of_len(k):
            for b in _terms_of_len(n - 3 - k):
                out.append(NPlus(a, b))
                out.append(NTimes(a, b))
    return tuple(out)


@lru_cache(maxsize=None)
def _formulas_of_len(n: int) -> tuple:
    """All formulas (bound set variables possibly unbound) whose text has length n."""
    out = []
    for k in range(1, n - 1):
        for a in _terms_of_len(k):
            for b in _terms_of_len(n - 1 - k):
                out += [PosLit("=", (a, b)), PosLit("<", (a, b))]
            for b in _terms_of_len(n - 2 - k) if n - 2 - k >= 1 else ():
                out += [NegLit("=", (a, b)), NegLit("<", (a, b))]
        # " in U_m" / " notin U_m"
        for word, cls in ((" in ", In), (" notin ", NotIn)):
            rest = n - k - len(word) - 2
            if rest < 1:
                continue
            lo, hi = (0, 10) if rest == 1 else (10 ** (rest - 1), 10 ** rest)
            for a in _terms_of_len(k):
                for m in range(lo, hi):
                    out += [cls(a, U(m)), cls(a, X(m))]
    for k in range(3, n - 5):
        for a in _formulas_of_len(k):
            for b in _formulas_of_len(n - 5 - k):
                out += [And(a, b), Or(a, b)]
    for digits in range(1, n):
        for word, cls, sort in (("all", ForallNum, 0), ("ex", ExistsNum, 0),
                                ("ALL", ForallSet, 1), ("EX", ExistsSet, 1)):
            hl = len(word) + 3 + digits + 2
            if n - hl < 3:
                continue
            lo, hi = (0, 10) if digits == 1 else (10 ** (digits - 1), 10 ** digits)
            for v in range(lo, hi):
                for body in _formulas_of_len(n - hl):
                    out.append(cls(v, body))
    return tuple(out)


def _well_scoped(f: Formula) -> bool:
    return not any(v.bound for v in free_set_vars(f))


def iter_formulas():
    """Well-scoped formulas in length-lexicographic order of their canonical text."""
    for n in count(3):
        batch = sorted((show(f), f) for f in _formulas_of_len(n) if _well_scoped(f))
        for _, f in batch:
            yield f


@lru_cache(maxsize=None)
def _code_table(limit: int) -> tuple:
    out = []
    for f in iter_formulas():
        out.append(f)
        if len(out) > limit:
            break
    return tuple(out)


def formula_from_code(n: int) -> Formula:
    if n < 0:
        raise ValueError("codes are natural numbers")
    size = 64
    while size <= n:
        size *= 2
    return _code_table(size)[n]


def formula_code(f: Formula, search_limit: int = 100_000) -> int:
    text = show(f)
    for i, g in enumerate(iter_formulas()):
        if g is f:
            return i
        if i >= search_limit or len(show(g)) > len(text):
            break
    raise LogicError(f"no code found for {text!r} within the search limit")
