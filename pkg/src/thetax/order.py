"""Total comparison on theta(X) terms, majorization, and a brute-force fixpoint oracle."""

from __future__ import annotations

from itertools import combinations

from .term import (check_carrier, E, Omega, Sum, Term, TermUniverse, Theta, WPow, Zero, exponent,
                   g_complexity, is_epsilon, parts_of, show, size, star)
from .wellorder import EQ, GT, LT, Ordering3, WellOrdering

__all__ = ["Ordering3", "LT", "EQ", "GT", "compare", "less", "leq", "max_term",
           "triangle_less", "triangle_leq", "is_epsilon_term", "oracle_compare",
           "OracleTable", "DISPATCH"]


_KIND = {Zero: "zero", Theta: "theta", Omega: "omega", E: "E", WPow: "sum", Sum: "sum"}


def _kind(t: Term) -> str:
    try:
        return _KIND[type(t)]
    except KeyError:
        raise TypeError(f"not a normalized term: {t!r}") from None


# epsilon atoms of different kinds: theta < Omega < E_u
_ATOM_RANK = {"theta": 0, "omega": 1, "E": 2}


def _zero_vs(wo, s, t):
    return EQ if isinstance(t, Zero) else LT


def _vs_zero(wo, s, t):
    return GT


def _atom_kinds(wo, s, t):
    a, b = _ATOM_RANK[_kind(s)], _ATOM_RANK[_kind(t)]
    return LT if a < b else GT


def _e_vs_e(wo, s, t):
    return wo.less(s.u, t.u)


def _omega_vs_omega(wo, s, t):
    return EQ


def _sum_vs_atom(wo, s, t):
    # a sum with leading exponent a1 lies below the epsilon atom b iff a1 < b
    return LT if compare(wo, exponent(s.parts[0] if isinstance(s, Sum) else s), t) == LT else GT


def _atom_vs_sum(wo, s, t):
    return _sum_vs_atom(wo, t, s).flip()


def _sum_vs_sum(wo, s, t):
    ps, pt = parts_of(s), parts_of(t)
    for a, b in zip(ps, pt):
        c = compare(wo, exponent(a), exponent(b))
        if c != EQ:
            return c
    if len(ps) == len(pt):
        return EQ
    return LT if len(ps) < len(pt) else GT


def _theta_vs_theta(wo, s, t):
    a, b = s.arg, t.arg
    if a == b:
        return EQ
    if _theta_less(wo, a, b, t):
        return LT
    return GT


def _theta_less(wo, a, b, theta_b):
    # th(a) < th(b)  iff  (a < b and a* < th(b)) or th(a) <= b*
    if compare(wo, a, b) == LT and compare(wo, star(wo, a), theta_b) == LT:
        return True
    return compare(wo, Theta(a), star(wo, b)) != GT


# (kind of s, kind of t) -> handler.  Every pair is listed, no default case.
DISPATCH = {
    ("zero", "zero"): _zero_vs,          # 0 is least
    ("zero", "theta"): _zero_vs,
    ("zero", "omega"): _zero_vs,
    ("zero", "E"): _zero_vs,
    ("zero", "sum"): _zero_vs,
    ("theta", "zero"): _vs_zero,
    ("omega", "zero"): _vs_zero,
    ("E", "zero"): _vs_zero,
    ("sum", "zero"): _vs_zero,
    ("theta", "theta"): _theta_vs_theta,  # collapse vs collapse
    ("theta", "omega"): _atom_kinds,      # theta-terms < Om < E(u)
    ("theta", "E"): _atom_kinds,
    ("omega", "theta"): _atom_kinds,
    ("omega", "omega"): _omega_vs_omega,
    ("omega", "E"): _atom_kinds,
    ("E", "theta"): _atom_kinds,
    ("E", "omega"): _atom_kinds,
    ("E", "E"): _e_vs_e,                  # follows the well-ordering
    ("sum", "theta"): _sum_vs_atom,       # leading exponent vs the atom
    ("sum", "omega"): _sum_vs_atom,
    ("sum", "E"): _sum_vs_atom,
    ("theta", "sum"): _atom_vs_sum,
    ("omega", "sum"): _atom_vs_sum,
    ("E", "sum"): _atom_vs_sum,
    ("sum", "sum"): _sum_vs_sum,          # lexicographic on exponents
}


_CHECKED = object()  # cache slot: terms already known to live over the carrier


def _carrier_ok(wo, t):
    seen = wo.cache.get(_CHECKED)
    if seen is None:
        seen = wo.cache[_CHECKED] = set()
    if t not in seen:
        check_carrier(wo, t)
        seen.add(t)


def compare(wo: WellOrdering, s: Term, t: Term) -> Ordering3:
    """Decide s < t, s = t or s > t for normalized terms over ``wo``."""
    if s is t:
        _carrier_ok(wo, s)
        return EQ
    cache = wo.cache
    key = (s, t)
    hit = cache.get(key)
    if hit is not None:
        return hit
    _carrier_ok(wo, s)
    _carrier_ok(wo, t)
    if s == t:
        r = EQ
    else:
        r = DISPATCH[_kind(s), _kind(t)](wo, s, t)
    cache[key] = r
    cache[(t, s)] = r.flip()
    return r


def less(wo, s, t) -> bool:
    return compare(wo, s, t) == LT


def leq(wo, s, t) -> bool:
    return compare(wo, s, t) != GT


def max_term(wo, s, t) -> Term:
    return t if compare(wo, s, t) == LT else s


def is_epsilon_term(t: Term) -> bool:
    return is_epsilon(t)


def triangle_less(wo, s, t) -> bool:
    """s ◁ t: s < t and th(s) < th(t)."""
    return compare(wo, s, t) == LT and compare(wo, Theta(s), Theta(t)) == LT


def triangle_leq(wo, s, t) -> bool:
    return s == t or triangle_less(wo, s, t)


# -- brute-force oracle ------------------------------------------------------------

class OracleTable:
    """Result of the clause-closure fixpoint: the set of derived pairs s < t."""

    def __init__(self, terms, pairs, total, missing):
        self.terms = terms
        self.pairs = pairs
        self.total = total
        self.missing = missing

    def less(self, s, t) -> bool:
        return (s, t) in self.pairs

    def __len__(self):
        return len(self.pairs)


def _subterm_closure(terms):
    seen = set()
    order = []
    stack = list(terms)
    stack.append(Zero())
    while stack:
        t = stack.pop()
        if t in seen:
            continue
        seen.add(t)
        order.append(t)
        if isinstance(t, Theta):
            stack.append(t.arg)
        elif isinstance(t, WPow):
            stack.append(t.exp)
        elif isinstance(t, Sum):
            stack.extend(t.parts)
            stack.extend(exponent(p) for p in t.parts)
    return order


def _oracle_star(t, rel, memo):
    """t* computed from the oracle's own derived facts; None while undecided."""
    if t in memo:
        return memo[t]
    if isinstance(t, (Zero, Omega, E)):
        r = Zero()
    elif isinstance(t, Theta):
        r = t
    else:
        r = None
        for p in parts_of(t):
            c = _oracle_star(exponent(p), rel, memo)
            if c is None:
                return None
            if r is None or (r, c) in rel:
                r = c
            elif r != c and (c, r) not in rel:
                return None
    memo[t] = r
    return r


def oracle_compare(universe: TermUniverse | list, wo: WellOrdering | None = None) -> OracleTable:
    """Least relation on the universe (closed under subterms) generated by the
    ordering clauses read as Horn rules, computed by naive iteration to a fixpoint.

    Independent of ``compare``: no recursion on terms, only table lookups of
    already derived facts. ``total`` reports whether every pair of distinct
    universe terms ended up related in one direction.
    """
    if isinstance(universe, TermUniverse):
        wo = universe.ordering
        base = list(universe.terms)
    else:
        base = list(universe)
    terms = _subterm_closure(base)
    terms.sort(key=lambda t: (g_complexity(t), size(t), show(t)))
    rel: set = set()
    star_memo: dict = {}

    def lt(a, b):
        return (a, b) in rel

    def le(a, b):
        return a == b or (a, b) in rel

    def fires(s, t):
        ks, kt = _kind(s), _kind(t)
        # 0 is least
        if ks == "zero":
            return kt != "zero"
        if kt == "zero":
            return False
        # theta-terms < Om < E(u), E by the ordering
        if ks == "theta" and kt in ("omega", "E"):
            return True
        if ks == "omega" and kt == "E":
            return True
        if ks == "E" and kt == "E":
            return wo.less(s.u, t.u) == LT
        # sums against epsilon atoms
        if ks == "sum" and kt != "sum":
            return kt in ("theta", "omega", "E") and lt(exponent(parts_of(s)[0]), t)
        if kt == "sum" and ks != "sum":
            return le(s, exponent(parts_of(t)[0]))
        # sums against sums
        if ks == "sum" and kt == "sum":
            a = [exponent(p) for p in parts_of(s)]
            b = [exponent(p) for p in parts_of(t)]
            for x, y in zip(a, b):
                if x == y:
                    continue
                return lt(x, y)
            return len(a) < len(b)
        # collapse against collapse
        if ks == "theta" and kt == "theta":
            a, b = s.arg, t.arg
            sa = _oracle_star(a, rel, star_memo)
            if lt(a, b) and sa is not None and lt(sa, t):
                return True
            sb = _oracle_star(b, rel, star_memo)
            return sb is not None and le(s, sb)
        return False

    pairs = [(s, t) for s, t in combinations(terms, 2)]
    changed = True
    while changed:
        changed = False
        star_memo.clear()
        for s, t in pairs:
            if (s, t) in rel or (t, s) in rel:
                continue
            if fires(s, t):
                rel.add((s, t))
                changed = True
            elif fires(t, s):
                rel.add((t, s))
                changed = True
    base_set = set(base)
    missing = [(s, t) for s, t in pairs
               if s in base_set and t in base_set and (s, t) not in rel and (t, s) not in rel]
    restricted = {(s, t) for (s, t) in rel if s in base_set and t in base_set}
    return OracleTable(base, restricted, not missing, missing)
