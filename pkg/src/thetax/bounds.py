"""Ordinal bounds of the infinitary calculus: local checks of single inference
steps, and the bound transforms used by embedding, cut reduction and collapsing."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import logic as L
from .arith import FundFn, ff_apply, omega_pow, omega_tower, add, parse_fn
from .deduction import QOracle, parse_q
from .logic import Formula, Grade, Sequent, grade, is_pi11, is_weak, negate, parse_formula, show
from .order import GT, LT, compare, triangle_leq, triangle_less
from .term import OMEGA, E, Term, Theta, check_carrier, numeral, parse, parts_of, validate
from .term import show as show_term


class BoundError(ValueError):
    pass


RULES = ("Axiom-true-lit", "Axiom-Q", "Axiom-notQ", "Axiom-match", "And", "Or", "Exists1",
         "Forall2", "Cut", "Exists2", "OmegaRule", "BigOmegaRule")


@dataclass(frozen=True)
class Judgement:
    """|-^bound_degree sequent"""
    bound: Term
    degree: Grade
    sequent: Sequent


@dataclass(frozen=True)
class Witness:
    """A side derivation for condition (c) of the Omega-rule: |-^beta_0 Xi, ALL X F(X)
    is claimed to yield |-^bound Xi, Gamma."""
    xi: tuple
    beta: Term
    bound: Term


@dataclass
class InferenceInstance:
    rule: str
    conclusion: Judgement
    premises: list = field(default_factory=list)
    main: Formula | None = None
    cut: Formula | None = None
    fn: FundFn | None = None
    witnesses: list = field(default_factory=list)
    instances: list = field(default_factory=list)
    q: QOracle | None = None


@dataclass
class StepReport:
    rule: str
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    partial: bool = False

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def verdict(self) -> str:
        if not self.ok:
            return "rejected"
        return "locally consistent" if self.partial else "accepted"

    def __str__(self):
        lines = [f"{self.rule}: {self.verdict}"]
        lines += [f"  fail: {m}" for m in self.failures]
        lines += [f"  note: {m}" for m in self.notes]
        return "\n".join(lines)


# -- helpers on formulas --------------------------------------------------------------

def _canon_term(t):
    if not L.term_vars(t):
        return L.numeral(L.eval_term(t))
    if isinstance(t, L.NSucc):
        return L.NSucc(_canon_term(t.arg))
    if isinstance(t, (L.NPlus, L.NTimes)):
        return type(t)(_canon_term(t.left), _canon_term(t.right))
    return t


def canon(f: Formula) -> Formula:
    """Replace every closed number term by the numeral of its value."""
    if isinstance(f, (L.PosLit, L.NegLit)):
        return type(f)(f.rel, tuple(_canon_term(t) for t in f.args))
    if isinstance(f, (L.In, L.NotIn)):
        return type(f)(_canon_term(f.term), f.var)
    if isinstance(f, (L.And, L.Or)):
        return type(f)(canon(f.left), canon(f.right))
    return type(f)(f.var, canon(f.body))


def match_instance(body: Formula, var: int, g: Formula):
    """A closed term t with body[x_var := t] == g, or None. Returns the sentinel
    ``True`` when x_var does not occur and body == g."""
    found = {}

    def term(p, t):
        if isinstance(p, L.NVar) and p.idx == var:
            if L.term_vars(t):
                return False
            if var in found:
                return found[var] is t
            found[var] = t
            return True
        if type(p) is not type(t):
            return False
        if isinstance(p, L.NSucc):
            return term(p.arg, t.arg)
        if isinstance(p, (L.NPlus, L.NTimes)):
            return term(p.left, t.left) and term(p.right, t.right)
        return p is t

    def form(p, h, shadowed):
        if type(p) is not type(h):
            return False
        if shadowed:
            return p is h
        if isinstance(p, (L.PosLit, L.NegLit)):
            return p.rel == h.rel and all(term(a, b) for a, b in zip(p.args, h.args))
        if isinstance(p, (L.In, L.NotIn)):
            return p.var is h.var and term(p.term, h.term)
        if isinstance(p, (L.And, L.Or)):
            return form(p.left, h.left, False) and form(p.right, h.right, False)
        if p.var != h.var:
            return False
        inner = isinstance(p, (L.ForallNum, L.ExistsNum)) and p.var == var
        return form(p.body, h.body, inner)

    if not form(body, g, False):
        return None
    return found.get(var, True)


def _subset(premise: Sequent, allowed) -> list:
    return [show(f) for f in premise if f not in allowed]


def _shape(rep, premise, conclusion, extra, label):
    allowed = conclusion.as_set() | set(extra)
    stray = _subset(premise, allowed)
    if stray:
        rep.failures.append(f"{label}: premise has formulas outside the conclusion: {', '.join(stray[:3])}")


def _bound_ok(wo, rep, term, label):
    v = validate(wo, term)
    if not v.ok:
        rep.failures.append(f"{label}: bound {show_term(term)} is not a valid term ({v})")
        return False
    return True


# -- the step checker ----------------------------------------------------------------------

def check_step(wo, inst: InferenceInstance) -> StepReport:
    if inst.rule not in RULES:
        raise BoundError(f"unknown rule tag {inst.rule!r}")
    rep = StepReport(inst.rule)
    concl = inst.conclusion
    if not _bound_ok(wo, rep, concl.bound, "conclusion"):
        return rep
    for k, p in enumerate(inst.premises):
        if not _bound_ok(wo, rep, p.bound, f"premise {k}"):
            return rep
    gamma = concl.sequent
    alpha = concl.bound
    rule = inst.rule

    if rule.startswith("Axiom"):
        if inst.premises:
            rep.failures.append("axioms have no premises")
        if not len(gamma):
            rep.failures.append("empty sequent is never an axiom")
            return rep
        _check_axiom(rep, inst)
        return rep

    # structural premises: bound below alpha in the majorization order, degree at most rho
    def descent(p, k):
        if not triangle_less(wo, p.bound, alpha):
            rep.failures.append(f"premise {k}: bound {show_term(p.bound)} is not majorized by {show_term(alpha)}")
        if p.degree > concl.degree:
            rep.failures.append(f"premise {k}: degree {p.degree} exceeds {concl.degree}")

    main = inst.main
    if rule in ("And", "Or", "Exists1", "Forall2", "Exists2", "OmegaRule") and main is None:
        rep.failures.append("missing main formula")
        return rep
    if main is not None and rule != "BigOmegaRule" and main not in gamma:
        rep.failures.append(f"main formula {show(main)} is not in the conclusion")

    if rule == "And":
        if not isinstance(main, L.And) or len(inst.premises) != 2:
            rep.failures.append("And needs a conjunction and two premises")
            return rep
        for k, (p, part) in enumerate(zip(inst.premises, (main.left, main.right))):
            descent(p, k)
            if part not in p.sequent:
                rep.failures.append(f"premise {k} lacks {show(part)}")
            _shape(rep, p.sequent, gamma, [part], f"premise {k}")
    elif rule == "Or":
        if not isinstance(main, L.Or) or len(inst.premises) != 1:
            rep.failures.append("Or needs a disjunction and one premise")
            return rep
        p = inst.premises[0]
        descent(p, 0)
        parts = [x for x in (main.left, main.right) if x in p.sequent]
        if not parts:
            rep.failures.append("premise contains neither disjunct")
        _shape(rep, p.sequent, gamma, [main.left, main.right], "premise 0")
    elif rule == "Exists1":
        if not isinstance(main, L.ExistsNum) or len(inst.premises) != 1:
            rep.failures.append("Exists1 needs an existential number formula and one premise")
            return rep
        p = inst.premises[0]
        descent(p, 0)
        inst_f = [f for f in p.sequent if f not in gamma and match_instance(main.body, main.var, f)]
        if len(inst_f) > 1:
            rep.failures.append("premise adds more than one instance")
        elif not inst_f and not any(match_instance(main.body, main.var, f) for f in p.sequent):
            rep.failures.append("premise contains no closed instance of the main formula")
        _shape(rep, p.sequent, gamma, inst_f, "premise 0")
    elif rule in ("Forall2", "Exists2"):
        want = L.ForallSet if rule == "Forall2" else L.ExistsSet
        if not isinstance(main, want) or len(inst.premises) != 1:
            rep.failures.append(f"{rule} needs a {want.__name__} main formula and one premise")
            return rep
        p = inst.premises[0]
        descent(p, 0)
        cands = [(m, L.subst_setvar(main.body, main.var, L.U(m)))
                 for m in sorted(set().union(*(L.free_set_indices(f) for f in p.sequent)) | {0})]
        hits = [(m, f) for m, f in cands if f in p.sequent]
        if not hits:
            rep.failures.append("premise contains no instance F(U_m)")
            return rep
        m, inst_f = hits[0]
        if rule == "Forall2":
            free_in_concl = set().union(*(L.free_set_indices(f) for f in gamma))
            eigen = [(m, f) for m, f in hits if m not in free_in_concl]
            if not eigen:
                rep.failures.append(f"eigenvariable U_{m} occurs in the conclusion")
            else:
                m, inst_f = eigen[0]
        elif grade(inst_f) < Grade.omega_plus(0):
            rep.failures.append(f"instance {show(inst_f)} is arithmetic (grade {grade(inst_f)} < w)")
        _shape(rep, p.sequent, gamma, [inst_f], "premise 0")
    elif rule == "Cut":
        a = inst.cut
        if a is None or len(inst.premises) != 2:
            rep.failures.append("Cut needs a cut formula and two premises")
            return rep
        if not grade(a) < concl.degree:
            rep.failures.append(f"cut formula grade {grade(a)} is not below degree {concl.degree}")
        for k, (p, side) in enumerate(zip(inst.premises, (a, negate(a)))):
            descent(p, k)
            if side not in p.sequent:
                rep.failures.append(f"premise {k} lacks {show(side)}")
            _shape(rep, p.sequent, gamma, [side], f"premise {k}")
    elif rule == "OmegaRule":
        if not isinstance(main, L.ForallNum) or not inst.premises:
            rep.failures.append("OmegaRule needs a universal number formula and premises")
            return rep
        if len(inst.instances) != len(inst.premises):
            rep.failures.append("one instance number per premise is required")
            return rep
        if len({p.bound for p in inst.premises}) != 1:
            rep.failures.append("premises must share one bound")
        for k, (p, m) in enumerate(zip(inst.premises, inst.instances)):
            descent(p, k)
            f = L.subst_num(main.body, main.var, m)
            if f not in p.sequent:
                rep.failures.append(f"premise {k} lacks {show(f)}")
            _shape(rep, p.sequent, gamma, [f], f"premise {k}")
        rep.partial = True
        rep.notes.append(f"infinitely many premises; {len(inst.premises)} spot-checked")
    elif rule == "BigOmegaRule":
        _check_big_omega(wo, rep, inst)
    return rep


def _check_axiom(rep, inst):
    gamma = inst.conclusion.sequent
    rule = inst.rule
    if rule == "Axiom-true-lit":
        if not any(L.literal_truth(f) for f in gamma if isinstance(f, (L.PosLit, L.NegLit))
                   and not L.free_num_vars(f)):
            rep.failures.append("no true constant literal")
    elif rule in ("Axiom-Q", "Axiom-notQ"):
        if inst.q is None:
            rep.failures.append("the set Q must be supplied")
            return
        want_in = rule == "Axiom-Q"
        cls = L.In if want_in else L.NotIn
        hits = [f for f in gamma if isinstance(f, cls) and f.var is L.U(0)
                and (L.eval_term(f.term) in inst.q) == want_in]
        if not hits:
            what = "Q(t) with value in Q" if want_in else "not Q(t) with value outside Q"
            rep.failures.append(f"no literal {what}")
    elif rule == "Axiom-match":
        small = [f for f in gamma if grade(f) in (Grade.finite(0), Grade.omega_plus(0))]
        canon_set = {canon(f) for f in small}
        if not any(canon(negate(f)) in canon_set for f in small):
            rep.failures.append("no complementary pair of grade 0 or w")


def _check_big_omega(wo, rep, inst):
    concl = inst.conclusion
    f, main = inst.fn, inst.main
    rep.partial = True
    if f is None or main is None or len(inst.premises) != 1:
        rep.failures.append("BigOmegaRule needs a fundamental function, a main formula and the (b) premise")
        return
    at_omega = ff_apply(wo, f, OMEGA)
    if not triangle_leq(wo, at_omega, concl.bound):
        rep.failures.append(f"(a) f(Om) = {show_term(at_omega)} is not majorized by {show_term(concl.bound)}")
    if not is_pi11(main):
        rep.failures.append(f"(b) {show(main)} is not a Pi-1-1 formula")
    p = inst.premises[0]
    at_zero = ff_apply(wo, f, numeral(0))
    if p.bound is not at_zero:
        rep.failures.append(f"(b) premise bound {show_term(p.bound)} differs from f(0) = {show_term(at_zero)}")
    if p.degree > concl.degree:
        rep.failures.append(f"(b) premise degree {p.degree} exceeds {concl.degree}")
    if main not in p.sequent:
        rep.failures.append(f"(b) premise lacks {show(main)}")
    _shape(rep, p.sequent, concl.sequent, [main], "(b) premise")
    for k, w in enumerate(inst.witnesses):
        if not all(is_weak(x) for x in w.xi):
            rep.failures.append(f"(c) witness {k}: Xi contains a formula that is not weak")
        if compare(wo, w.beta, OMEGA) != LT:
            rep.failures.append(f"(c) witness {k}: beta = {show_term(w.beta)} is not below Om")
            continue
        claimed = ff_apply(wo, f, w.beta)
        if w.bound is not claimed:
            rep.failures.append(f"(c) witness {k}: bound {show_term(w.bound)} differs from f(beta) = {show_term(claimed)}")
    rep.notes.append(f"condition (c) quantifies over all weak Xi and beta < Om; "
                     f"{len(inst.witnesses)} supplied pair(s) checked")


# -- bound transforms ------------------------------------------------------------------------

def cut_reduce_bound(wo, alpha: Term) -> Term:
    return omega_pow(wo, alpha)


def collapse_bound(wo, alpha: Term) -> Term:
    check_carrier(wo, alpha)
    return Theta(alpha)


def add_bound(wo, alpha: Term, delta: Term) -> Term:
    """alpha + delta, provided delta <= the least additive part of alpha."""
    parts = parts_of(alpha)
    if parts and compare(wo, delta, parts[-1]) == GT:
        raise BoundError(f"{show_term(delta)} exceeds the last part {show_term(parts[-1])} of {show_term(alpha)}")
    return add(wo, alpha, delta)


def embed_bound(wo, u: int, k: int) -> Term:
    wo.less(u, u)
    return add(wo, E(u), numeral(k))


def final_bound(wo, u0: int, n: int, m: int) -> Term:
    wo.less(u0, u0)
    return Theta(omega_tower(wo, n, add(wo, E(u0), numeral(m))))


# -- step file format ----------------------------------------------------------------------

def _judgement(d, wo) -> Judgement:
    return Judgement(parse(d["bound"], wo), Grade.parse(str(d.get("degree", "0"))),
                     Sequent(parse_formula(s) for s in d["sequent"]))


def step_from_json(d: dict, wo) -> InferenceInstance:
    """Read one step. Keys: rule, conclusion, premises, and as needed main, cut,
    fn, witnesses [{xi, beta, bound}], instances, q."""
    return InferenceInstance(
        rule=d["rule"],
        conclusion=_judgement(d["conclusion"], wo),
        premises=[_judgement(p, wo) for p in d.get("premises", [])],
        main=parse_formula(d["main"]) if d.get("main") else None,
        cut=parse_formula(d["cut"]) if d.get("cut") else None,
        fn=parse_fn(d["fn"], wo) if d.get("fn") else None,
        witnesses=[Witness(tuple(parse_formula(x) for x in w["xi"]), parse(w["beta"], wo),
                           parse(w["bound"], wo)) for w in d.get("witnesses", [])],
        instances=list(d.get("instances", [])),
        q=parse_q(d["q"]) if d.get("q") else None,
    )


def load_steps(path, wo) -> list:
    """A step file holds one step object or a list of them; list entries may
    carry ``name`` and ``expect`` ("accept" or "reject")."""
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict) and "steps" in data:
        data = data["steps"]
    if isinstance(data, dict):
        data = [data]
    return [(d.get("name", f"step{k}"), d.get("expect", "accept"), step_from_json(d, wo))
            for k, d in enumerate(data)]
