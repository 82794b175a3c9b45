"""Ordinal arithmetic on normalized terms and fundamental functions."""

from __future__ import annotations

import random
from dataclasses import dataclass

from ._struct import Struct
from .order import GT, LT, compare
from .term import (OMEGA, ONE, Term, WPow, exponent, from_parts, is_epsilon, is_principal,
                   parts_of, show)


class ArithError(ValueError):
    pass


def add(wo, s: Term, t: Term) -> Term:
    """Ordinal sum in Cantor normal form: trailing parts of ``s`` below the
    leading part of ``t`` are absorbed."""
    pt = parts_of(t)
    if not pt:
        return s
    ps = list(parts_of(s))
    lead = exponent(pt[0])
    while ps and compare(wo, exponent(ps[-1]), lead) == LT:
        ps.pop()
    return from_parts(ps + list(pt))


def omega_pow(wo, t: Term) -> Term:
    return t if is_epsilon(t) else WPow(t)


def succ(wo, t: Term) -> Term:
    return add(wo, t, ONE)


def times_nat(wo, t: Term, n: int) -> Term:
    if n < 1:
        raise ArithError("times_nat needs n >= 1")
    if not is_principal(t):
        raise ArithError(f"times_nat needs an additively principal term, got {show(t)}")
    return from_parts([t] * n)


def omega_tower(wo, n: int, t: Term) -> Term:
    for _ in range(n):
        t = omega_pow(wo, t)
    return t


# -- fundamental functions -------------------------------------------------------

class FundFn(Struct):
    __slots__ = ()


@dataclass(frozen=True, eq=False)
class Id(FundFn):
    def __str__(self):
        return "id"


@dataclass(frozen=True, eq=False)
class AddLeft(FundFn):
    """alpha |-> omega^gamma + inner(alpha)."""
    gamma: Term
    inner: FundFn

    def __str__(self):
        return f"{show(WPow(self.gamma) if not is_epsilon(self.gamma) else self.gamma)} + {self.inner}"


@dataclass(frozen=True, eq=False)
class ExpOmega(FundFn):
    """alpha |-> omega^(inner(alpha))."""
    inner: FundFn

    def __str__(self):
        return f"w^({self.inner})"


ID = Id()


class FundFnError(ValueError):
    pass


def _eval(wo, f: FundFn, t: Term) -> Term:
    if isinstance(f, Id):
        return t
    if isinstance(f, AddLeft):
        return add(wo, omega_pow(wo, f.gamma), _eval(wo, f.inner, t))
    if isinstance(f, ExpOmega):
        return omega_pow(wo, _eval(wo, f.inner, t))
    raise TypeError(f"not a fundamental function: {f!r}")


def ff_make(wo, spec) -> FundFn:
    """Rebuild ``spec`` bottom-up, checking f(Om) < omega^(gamma+1) at every AddLeft."""
    if isinstance(spec, Id):
        return ID
    if isinstance(spec, ExpOmega):
        return ExpOmega(ff_make(wo, spec.inner))
    if isinstance(spec, AddLeft):
        inner = ff_make(wo, spec.inner)
        at_omega = _eval(wo, inner, OMEGA)
        bound = omega_pow(wo, succ(wo, spec.gamma))
        if compare(wo, at_omega, bound) != LT:
            raise FundFnError(
                f"side condition fails: {inner}(Om) = {show(at_omega)} is not below {show(bound)}")
        return AddLeft(spec.gamma, inner)
    raise TypeError(f"not a fundamental function spec: {spec!r}")


def ff_apply(wo, f: FundFn, t: Term) -> Term:
    if compare(wo, t, OMEGA) == GT:
        raise FundFnError(f"argument {show(t)} lies above Om")
    return _eval(wo, f, t)


def ff_depth(f: FundFn) -> int:
    if isinstance(f, Id):
        return 0
    return 1 + ff_depth(f.inner)


def parse_fn(text: str, wo) -> FundFn:
    """``fn := "id" | "w^(" fn ")" | <principal term> " + " fn``.

    The leading term of an additive step is the summand omega^gamma itself.
    """
    from .term import parse

    text = text.strip()
    if text == "id":
        return ID
    if text.startswith("w^(") and text.endswith(")") and _balanced(text[3:-1]):
        return ff_make(wo, ExpOmega(parse_fn(text[3:-1], wo)))
    depth = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "+" and depth == 0:
            summand = parse(text[:i], wo)
            if not is_principal(summand):
                raise FundFnError(f"{show(summand)} is not of the form omega^gamma")
            return ff_make(wo, AddLeft(exponent(summand), parse_fn(text[i + 1:], wo)))
    raise FundFnError(f"cannot read fundamental function {text!r}")


def _balanced(s: str) -> bool:
    depth = 0
    for ch in s:
        depth += ch == "("
        depth -= ch == ")"
        if depth < 0:
            return False
    return depth == 0


def random_fundfn(wo, rng: random.Random, gammas, max_depth: int = 5) -> FundFn:
    """Random fundamental function of depth <= max_depth with gammas drawn from
    ``gammas``; AddLeft steps are only taken when some gamma satisfies the side condition."""
    depth = rng.randint(0, max_depth)
    f: FundFn = ID
    for _ in range(depth):
        if rng.random() < 0.5:
            f = ExpOmega(f)
            continue
        at_omega = _eval(wo, f, OMEGA)
        ok = [g for g in gammas
              if compare(wo, at_omega, omega_pow(wo, succ(wo, g))) == LT]
        if ok:
            f = AddLeft(rng.choice(ok), f)
        else:
            f = ExpOmega(f)
    return ff_make(wo, f)
