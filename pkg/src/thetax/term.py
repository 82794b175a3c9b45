"""Terms of the relativized notation system theta(X).

Normalized terms are built from

* ``Zero``, ``Omega``, ``E(u)`` (one epsilon number above Omega per carrier element),
* ``Theta(t)`` (the collapse of ``t``),
* ``WPow(t)`` (omega to the power ``t``, where ``t`` is not itself an epsilon atom),
* ``Sum(parts)`` with at least two principal parts in non-increasing order.

A principal part is an epsilon atom (``Omega``, ``E``, ``Theta``) or a ``WPow``.
The exponent of an epsilon atom ``xi`` is ``xi`` itself since omega^xi = xi.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from ._struct import Struct
from .wellorder import CarrierError, WellOrdering


class Term(Struct):
    __slots__ = ()

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, eq=False, repr=False)
class Zero(Term):
    def __repr__(self):
        return "Zero"


@dataclass(frozen=True, eq=False, repr=False)
class Omega(Term):
    def __repr__(self):
        return "Omega"


@dataclass(frozen=True, eq=False, repr=False)
class E(Term):
    u: int

    def __repr__(self):
        return f"E({self.u})"


@dataclass(frozen=True, eq=False, repr=False)
class Theta(Term):
    arg: Term

    def __repr__(self):
        return f"Theta({self.arg!r})"


@dataclass(frozen=True, eq=False, repr=False)
class WPow(Term):
    exp: Term

    def __repr__(self):
        return f"WPow({self.exp!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Sum(Term):
    parts: tuple

    def __repr__(self):
        return f"Sum[{', '.join(map(repr, self.parts))}]"


ZERO = Zero()
OMEGA = Omega()
ONE = WPow(ZERO)


class TermError(ValueError):
    pass


class NormalizationError(TermError):
    pass


class TermSyntaxError(TermError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ResourceError(RuntimeError):
    pass


# -- structural helpers -------------------------------------------------------

def is_epsilon(t: Term) -> bool:
    return isinstance(t, (Omega, E, Theta))


def is_principal(t: Term) -> bool:
    return isinstance(t, (Omega, E, Theta, WPow))


def parts_of(t: Term) -> tuple:
    """Principal parts of ``t`` in order; empty for zero."""
    if isinstance(t, Zero):
        return ()
    if isinstance(t, Sum):
        return t.parts
    return (t,)


def exponent(p: Term) -> Term:
    """The exponent eta with p = omega^eta, for a principal part p."""
    return p.exp if isinstance(p, WPow) else p


def from_parts(parts) -> Term:
    parts = tuple(parts)
    if not parts:
        return ZERO
    if len(parts) == 1:
        return parts[0]
    return Sum(parts)


def numeral(n: int) -> Term:
    return from_parts([ONE] * n)


def size(t: Term) -> int:
    """Node count of the stored tree (a Sum node counts once)."""
    if isinstance(t, (Theta, WPow)):
        return 1 + size(t.arg if isinstance(t, Theta) else t.exp)
    if isinstance(t, Sum):
        return 1 + sum(size(p) for p in t.parts)
    return 1


def g_complexity(t: Term) -> int:
    if isinstance(t, (Zero, Omega, E)):
        return 0
    if isinstance(t, Theta):
        return g_complexity(t.arg) + 1
    return max(g_complexity(exponent(p)) for p in parts_of(t)) + 1


def e_indices(t: Term) -> set[int]:
    if isinstance(t, E):
        return {t.u}
    if isinstance(t, Theta):
        return e_indices(t.arg)
    if isinstance(t, WPow):
        return e_indices(t.exp)
    if isinstance(t, Sum):
        return set().union(*(e_indices(p) for p in t.parts))
    return set()


def check_carrier(wo: WellOrdering, t: Term) -> None:
    for u in e_indices(t):
        if not wo.carrier_contains(u):
            raise CarrierError(f"E({u}) uses an index outside the carrier of {wo.description}")


def star(wo: WellOrdering, t: Term) -> Term:
    """t*: the largest collapse needed below Omega to write ``t`` (or zero)."""
    if isinstance(t, (Zero, Omega, E)):
        return ZERO
    if isinstance(t, Theta):
        return t
    memo = wo.cache
    key = ("*", t)
    r = memo.get(key)
    if r is None:
        from .order import max_term
        r = ZERO
        for p in parts_of(t):
            r = max_term(wo, r, star(wo, exponent(p)))
        memo[key] = r
    return r


# -- normalization and validation ----------------------------------------------

def normalize(raw: Term, wo: WellOrdering) -> Term:
    """Bring a raw tree into stored normal form.

    Collapses omega^xi to xi for epsilon atoms and flattens nested sums.
    Summands are never reordered or absorbed: a sum whose principal parts
    increase somewhere is rejected (use ``arith.add`` for ordinal addition).
    """
    from .order import compare, LT

    if isinstance(raw, (Zero, Omega)):
        return raw
    if isinstance(raw, E):
        if not wo.carrier_contains(raw.u):
            raise CarrierError(f"E({raw.u}) uses an index outside the carrier of {wo.description}")
        return raw
    if isinstance(raw, Theta):
        return Theta(normalize(raw.arg, wo))
    if isinstance(raw, WPow):
        e = normalize(raw.exp, wo)
        return e if is_epsilon(e) else WPow(e)
    if isinstance(raw, Sum):
        ps = []
        for p in raw.parts:
            ps.extend(parts_of(normalize(p, wo)))
        for a, b in zip(ps, ps[1:]):
            if compare(wo, exponent(a), exponent(b)) == LT:
                raise NormalizationError(
                    f"summands not non-increasing: {show(a)} followed by {show(b)}")
        return from_parts(ps)
    raise TypeError(f"not a term: {raw!r}")


@dataclass
class ValidationReport:
    problems: list

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "valid"
        return "; ".join(f"{path or '<root>'}: {msg}" for path, msg in self.problems)


def validate(wo: WellOrdering, t: Term) -> ValidationReport:
    from .order import compare, LT

    problems = []

    def walk(t, path):
        if isinstance(t, (Zero, Omega)):
            return
        if isinstance(t, E):
            if not wo.carrier_contains(t.u):
                problems.append((path, f"index {t.u} outside carrier of {wo.description}"))
            return
        if isinstance(t, Theta):
            walk(t.arg, path + "/th")
            return
        if isinstance(t, WPow):
            if is_epsilon(t.exp):
                problems.append((path, "omega power of an epsilon atom is not collapsed"))
            if isinstance(t.exp, Term):
                walk(t.exp, path + "/w")
            return
        if isinstance(t, Sum):
            if len(t.parts) < 2:
                problems.append((path, "sum with fewer than two parts"))
            for i, p in enumerate(t.parts):
                if not is_principal(p):
                    problems.append((f"{path}/+[{i}]", "summand is not a principal part"))
                walk(p, f"{path}/+[{i}]")
            if all(is_principal(p) for p in t.parts) and not problems:
                for i, (a, b) in enumerate(zip(t.parts, t.parts[1:])):
                    if compare(wo, exponent(a), exponent(b)) == LT:
                        problems.append((f"{path}/+[{i + 1}]", "parts increasing"))
            return
        problems.append((path, f"unknown node {t!r}"))

    walk(t, "")
    return ValidationReport(problems)


# -- text syntax -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(Om|E\(|th\(|w\(|\(|\)|\+))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise TermSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(1) if m.group(1) else m.start(2)
        out.append((m.group(1) or m.group(2), start))
        pos = m.end()
    out.append(("", len(text)))
    return out


def parse_raw(text: str) -> Term:
    toks = _tokenize(text)
    i = 0

    def peek():
        return toks[i]

    def take(expected=None):
        nonlocal i
        tok, pos = toks[i]
        if expected is not None and tok != expected:
            raise TermSyntaxError(f"expected {expected!r}, found {tok or 'end of input'!r}", pos)
        i += 1
        return tok, pos

    def atom():
        tok, pos = take()
        if tok.isdigit():
            return numeral(int(tok))
        if tok == "Om":
            return OMEGA
        if tok == "E(":
            n, npos = take()
            if not n.isdigit():
                raise TermSyntaxError("expected carrier index", npos)
            take(")")
            return E(int(n))
        if tok in ("th(", "w("):
            inner = expr()
            take(")")
            return Theta(inner) if tok == "th(" else WPow(inner)
        if tok == "(":
            inner = expr()
            take(")")
            return inner
        raise TermSyntaxError(f"unexpected {tok or 'end of input'!r}", pos)

    def expr():
        items = [atom()]
        while peek()[0] == "+":
            take()
            items.append(atom())
        return items[0] if len(items) == 1 else Sum(tuple(items))

    result = expr()
    tok, pos = peek()
    if tok:
        raise TermSyntaxError(f"trailing input {tok!r}", pos)
    return result


def parse(text: str, wo: WellOrdering) -> Term:
    return normalize(parse_raw(text), wo)


def show(t: Term) -> str:
    """Canonical text. Runs of trailing omega^0 summands print as a numeral."""
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, Omega):
        return "Om"
    if isinstance(t, E):
        return f"E({t.u})"
    if isinstance(t, Theta):
        return f"th({show(t.arg)})"
    if isinstance(t, WPow):
        return f"w({show(t.exp)})"
    if isinstance(t, Sum):
        ps = list(t.parts)
        k = 0
        while ps and ps[-1] == ONE:
            ps.pop()
            k += 1
        out = [show(p) for p in ps]
        if k:
            out.append(str(k))
        return " + ".join(out)
    # raw trees may carry foreign nodes while being built
    return repr(t)


# -- enumeration ---------------------------------------------------------------------

_TAG = {Zero: 0, Omega: 1, E: 2, Theta: 3, WPow: 4, Sum: 5}


@dataclass
class TermUniverse:
    ordering: WellOrdering
    terms: list
    g_bound: int
    size_bound: int
    e_prefix: int

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)


def _sort_key(t: Term):
    return (size(t), _TAG[type(t)], show(t))


def enumerate_terms(wo: WellOrdering, g_bound: int, size_bound: int, e_prefix: int,
                    cap: int = 500_000) -> TermUniverse:
    """All normalized terms with G <= g_bound, size <= size_bound, E-indices
    among the first ``e_prefix`` carrier elements. Deterministic order."""

    indices = wo.carrier_prefix(e_prefix)
    # by_size[n] = terms of exact size n with G <= g_bound
    by_size: dict[int, list] = {}
    total = 0

    def principal_parts_upto(n, gmax_exp):
        """Principal parts of size <= n usable as sum parts (exponent G <= gmax_exp)."""
        out = []
        for k in range(1, n + 1):
            for t in by_size.get(k, ()):
                if is_principal(t) and g_complexity(exponent(t)) <= gmax_exp:
                    out.append(t)
        return out

    for n in range(1, size_bound + 1):
        level = []
        if n == 1:
            level = [ZERO, OMEGA] + [E(u) for u in indices]
        else:
            for t in by_size.get(n - 1, ()):
                if g_complexity(t) + 1 <= g_bound:
                    level.append(Theta(t))
                    if not is_epsilon(t):
                        level.append(WPow(t))
            if n >= 3 and g_bound >= 1:
                cands = principal_parts_upto(n - 2, g_bound - 1)
                # non-increasing order of exponents
                cands.sort(key=lambda p: _SortByCompare(wo, exponent(p)), reverse=True)
                sizes = [size(p) for p in cands]

                def build(start, remaining, acc):
                    if remaining == 0:
                        if len(acc) >= 2:
                            level.append(Sum(tuple(acc)))
                        return
                    for j in range(start, len(cands)):
                        if sizes[j] <= remaining:
                            # equal exponents may repeat; order follows cands
                            acc.append(cands[j])
                            build(j, remaining - sizes[j], acc)
                            acc.pop()

                build(0, n - 1, [])
        level.sort(key=_sort_key)
        by_size[n] = level
        total += len(level)
        if total > cap:
            raise ResourceError(f"term universe exceeds cap of {cap} terms")
    terms = [t for n in range(1, size_bound + 1) for t in by_size.get(n, ())]
    return TermUniverse(wo, terms, g_bound, size_bound, e_prefix)


class _SortByCompare:
    __slots__ = ("wo", "t")

    def __init__(self, wo, t):
        self.wo = wo
        self.t = t

    def __lt__(self, other):
        from .order import compare, LT
        return compare(self.wo, self.t, other.t) == LT


def raw_trees(atoms, max_size: int):
    """Every raw tree over 0, Om, E, th, w and n-ary + with at most ``max_size`` nodes.

    Sums have at least two operands; operands may be any raw tree. Used as a
    generate-and-filter cross-check of ``enumerate_terms``.
    """
    memo: dict[int, list] = {}

    def exact(n):
        if n in memo:
            return memo[n]
        out = []
        if n == 1:
            out.extend(atoms)
        else:
            for t in exact(n - 1):
                out.append(Theta(t))
                out.append(WPow(t))
            # sum node: 1 + sizes of >= 2 operands
            for k in range(2, n):
                for split in _compositions(n - 1, k):
                    for combo in itertools.product(*(exact(s) for s in split)):
                        out.append(Sum(combo))
        memo[n] = out
        return out

    for n in range(1, max_size + 1):
        yield from exact(n)


def _compositions(total, k):
    if k == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - k + 2):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest
