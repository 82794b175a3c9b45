"""Q-deduction chains: the axiom enumeration, the chain rules, the truncated
tree of all chains, replay validation, the Kleene-Brouwer order and
extraction of a coded model from a surviving branch."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .logic import (And, ExistsNum, ExistsSet, ForallNum, ForallSet, Formula, In, NotIn, NVar,
                    Or, Sequent, U, X, all_num_var_indices,
                    all_set_var_indices, eval_term, find_redex, formula_from_code,
                    free_num_vars, free_set_indices, free_set_vars, iff, is_arithmetic, is_axiomatic, is_literal,
                    literal_truth, negate, numeral, parse_formula, show, subst_num, subst_setvar,
                    subst_term)
from .term import ResourceError
from .wellorder import EQ, GT, LT, Ordering3


class DeductionError(ValueError):
    pass


class TreeCapError(ResourceError):
    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


# -- Q ------------------------------------------------------------------------------

@dataclass(frozen=True)
class QOracle:
    contains: Callable[[int], bool]
    description: str

    def __contains__(self, n):
        return bool(self.contains(n))


def q_from_set(members, description=None) -> QOracle:
    s = frozenset(int(m) for m in members)
    desc = description or "{" + ",".join(map(str, sorted(s))) + "}"
    return QOracle(lambda n: n in s, desc)


def parse_q(spec: str) -> QOracle:
    """``{1,3,5}``, ``{}``, ``evens<=N`` or ``odds<=N``."""
    spec = spec.strip()
    if spec.startswith("{") and spec.endswith("}"):
        body = spec[1:-1].strip()
        try:
            return q_from_set([int(x) for x in body.split(",")] if body else [])
        except ValueError:
            raise DeductionError(f"bad set spec {spec!r}") from None
    m = re.fullmatch(r"(evens|odds)\s*<=\s*(\d+)", spec)
    if m:
        bound, parity = int(m.group(2)), 0 if m.group(1) == "evens" else 1
        return QOracle(lambda n: n <= bound and n % 2 == parity, spec)
    raise DeductionError(f"bad set spec {spec!r}")


def q_literal(q: QOracle, n: int) -> Formula:
    """The literal Q-bar(n); chains insert its negation."""
    return (In if n in q else NotIn)(numeral(n), U(0))


# -- axioms -----------------------------------------------------------------------------

# arithmetic matrices phi(x_0, X_0) for the comprehension instances in A_0
DEFAULT_A0_MATRICES = ("x_0 notin X_0", "x_0' in X_0")
FALLBACK_PREC = "x_0<x_1"
FALLBACK_F = "x_0=x_0"


@dataclass(frozen=True)
class AxiomConfig:
    a0_matrices: tuple = DEFAULT_A0_MATRICES

    def a0(self) -> Formula:
        return _a0(self.a0_matrices)


@lru_cache(maxsize=None)
def _a0(matrices) -> Formula:
    """ALL X_0. AND_k EX X_1. all x_0. (x_0 in X_1 <-> phi_k)."""
    conj = None
    for text in matrices:
        phi = parse_formula(text)
        inst = ExistsSet(1, ForallNum(0, iff(In(NVar(0), X(1)), phi)))
        conj = inst if conj is None else And(conj, inst)
    return ForallSet(0, conj)


def cantor_unpair(z: int) -> tuple:
    w = int(((8 * z + 1) ** 0.5 - 1) // 2)
    while w * (w + 1) // 2 > z:
        w -= 1
    while (w + 1) * (w + 2) // 2 <= z:
        w += 1
    b = z - w * (w + 1) // 2
    return w - b, b


def _fresh(used, k):
    out, n = [], max(used, default=-1) + 1
    for _ in range(k):
        out.append(n)
        n += 1
    return out


def transfinite_induction(prec: Formula, f: Formula, used: set) -> Formula:
    """TI(prec, F) in NNF. ``prec`` relates x_0 (smaller) to x_1; F's hole is x_0."""
    y, x = _fresh(used | all_num_var_indices(prec) | all_num_var_indices(f), 2)

    def p(a, b):
        return subst_term(subst_term(prec, 0, NVar(a)), 1, NVar(b))

    def F(v):
        return subst_term(f, 0, NVar(v))

    # Prog(prec, F) = all x. (ex y. (y prec x & not F(y)) | F(x))
    prog = ForallNum(x, Or(ExistsNum(y, And(p(y, x), negate(F(y)))), F(x)))
    return Or(negate(prog), ForallNum(x, F(x)))


def bi_instance(prec: Formula, f: Formula) -> Formula:
    """Universal closure of WF(prec) -> TI(prec, F), with WF(prec) = ALL X. TI(prec, X)."""
    used = all_num_var_indices(prec) | all_num_var_indices(f)
    xs = _fresh(all_set_var_indices(prec, True) | all_set_var_indices(f, True), 1)[0]
    wf = ForallSet(xs, transfinite_induction(prec, In(NVar(0), X(xs)), used))
    body = Or(negate(wf), transfinite_induction(prec, f, used))
    # close over number parameters, then over free set variables
    for v in sorted(free_num_vars(body), reverse=True):
        body = ForallNum(v, body)
    setvars = sorted(free_set_indices(body))
    bound_idx = _fresh(all_set_var_indices(body, True), len(setvars))
    for m, j in zip(reversed(setvars), reversed(bound_idx)):
        body = ForallSet(j, _bind_setvar(body, m, j))
    return body


def _bind_setvar(f: Formula, m: int, j: int) -> Formula:
    src = U(m)
    if isinstance(f, (In, NotIn)):
        return type(f)(f.term, X(j)) if f.var is src else f
    if is_literal(f):
        return f
    if isinstance(f, (And, Or)):
        return type(f)(_bind_setvar(f.left, m, j), _bind_setvar(f.right, m, j))
    return type(f)(f.var, _bind_setvar(f.body, m, j))


def axiom_enumerator(i: int, config: AxiomConfig | None = None) -> Formula:
    config = config or AxiomConfig()
    if i == 0:
        return config.a0()
    return _bi_axiom(i)


@lru_cache(maxsize=None)
def _bi_axiom(i: int) -> Formula:
    a, b = cantor_unpair(i - 1)
    prec, f = formula_from_code(a), formula_from_code(b)
    if not is_arithmetic(prec):
        prec, f = parse_formula(FALLBACK_PREC), parse_formula(FALLBACK_F)
    return bi_instance(prec, f)


@lru_cache(maxsize=None)
def _neg_axiom(i: int, config: AxiomConfig) -> Formula:
    return negate(axiom_enumerator(i, config))


# -- chain rules ----------------------------------------------------------------------

@dataclass(frozen=True)
class ChainStep:
    rule: str
    choice: int | None
    sequent: Sequent


def root_sequent(q: QOracle, config: AxiomConfig | None = None) -> Sequent:
    config = config or AxiomConfig()
    return Sequent([negate(q_literal(q, 0)), _neg_axiom(0, config)])


def chain_steps(q: QOracle, gamma: Sequent, i: int, omega_bound: int,
                history=(), config: AxiomConfig | None = None) -> list:
    """All successors of Gamma_i. ``history`` lists Gamma_0..Gamma_{i-1}."""
    config = config or AxiomConfig()
    if is_axiomatic(gamma):
        raise DeductionError("chain rules apply only to non-axiomatic sequents")
    tail = [negate(q_literal(q, i + 1)), _neg_axiom(i + 1, config)]
    split = find_redex(gamma)
    if split is None:
        return [ChainStep("3", None, Sequent(list(gamma) + tail))]
    pre, e, post = split
    pre, post = list(pre), list(post)

    def occurred(f):
        return f in gamma or any(f in h for h in history)

    def first_fresh(make, var_free):
        if not var_free:
            return 0
        m = 0
        while occurred(make(m)):
            m += 1
        return m

    if isinstance(e, Or):
        return [ChainStep("4a", None, Sequent(pre + [e.left, e.right] + post + tail))]
    if isinstance(e, And):
        return [ChainStep("4b", j, Sequent(pre + [part] + post + tail))
                for j, part in enumerate((e.left, e.right))]
    if isinstance(e, ExistsNum):
        m = first_fresh(lambda k: subst_num(e.body, e.var, k), e.var in free_num_vars(e.body))
        return [ChainStep("4c", m, Sequent(pre + [subst_num(e.body, e.var, m)] + post + tail + [e]))]
    if isinstance(e, ForallNum):
        return [ChainStep("4d", m, Sequent(pre + [subst_num(e.body, e.var, m)] + post + tail))
                for m in range(omega_bound + 1)]
    if isinstance(e, ExistsSet):
        free = X(e.var) in free_set_vars(e.body)
        m = first_fresh(lambda k: subst_setvar(e.body, e.var, U(k)), free)
        return [ChainStep("4e", m, Sequent(pre + [subst_setvar(e.body, e.var, U(m))] + post + tail + [e]))]
    if isinstance(e, ForallSet):
        used = set()
        for f in gamma:
            used |= free_set_indices(f)
        m = 0
        while m in used:
            m += 1
        return [ChainStep("4f", m, Sequent(pre + [subst_setvar(e.body, e.var, U(m))] + post + tail))]
    raise DeductionError(f"unexpected redex {show(e)}")


def chain_children(q, gamma, i, omega_bound, history=(), config=None) -> list:
    return [s.sequent for s in chain_steps(q, gamma, i, omega_bound, history, config)]


# -- the tree -----------------------------------------------------------------------------

AXIOMATIC, TRUNCATED, INTERNAL = "axiomatic-leaf", "truncated-leaf", "internal"


@dataclass(eq=False)
class DNode:
    id: int
    path: tuple
    position: int
    sequent: Sequent
    status: str = INTERNAL
    rule: str = "1"
    choice: int | None = None
    parent: int | None = None
    children: list = field(default_factory=list)


@dataclass(eq=False)
class DTree:
    q: QOracle | None
    depth: int
    omega_bound: int
    config: AxiomConfig
    nodes: list = field(default_factory=list)
    index: dict = field(default_factory=dict)

    @property
    def root(self) -> DNode:
        return self.nodes[0]

    def add(self, node: DNode):
        self.nodes.append(node)
        self.index[node.path] = node

    def node(self, path) -> DNode:
        try:
            return self.index[tuple(path)]
        except KeyError:
            raise DeductionError(f"unknown path {list(path)}") from None

    def ancestors(self, node: DNode) -> list:
        out = []
        while node.parent is not None:
            node = self.nodes[node.parent]
            out.append(node)
        return out[::-1]

    def branch(self, node: DNode) -> list:
        return [n.sequent for n in self.ancestors(node)] + [node.sequent]

    def leaves(self):
        return [n for n in self.nodes if not n.children]


DEFAULT_NODE_CAP = 2_000_000


def build_tree(q: QOracle, depth: int, omega_bound: int, config: AxiomConfig | None = None,
               node_cap: int = DEFAULT_NODE_CAP) -> DTree:
    if depth < 0 or omega_bound < 0:
        raise DeductionError("depth and omega_bound must be >= 0")
    config = config or AxiomConfig()
    tree = DTree(q, depth, omega_bound, config)
    tree.add(DNode(0, (), 0, root_sequent(q, config)))
    stack = [0]
    while stack:
        node = tree.nodes[stack.pop()]
        if is_axiomatic(node.sequent):
            node.status = AXIOMATIC
            continue
        if node.position >= depth:
            node.status = TRUNCATED
            continue
        history = [a.sequent for a in tree.ancestors(node)]
        steps = chain_steps(q, node.sequent, node.position, omega_bound, history, config)
        for k, step in enumerate(steps):
            if len(tree.nodes) >= node_cap:
                raise TreeCapError(f"node cap {node_cap} reached at path {list(node.path)}", tree)
            child = DNode(len(tree.nodes), node.path + (k,), node.position + 1, step.sequent,
                          rule=step.rule, choice=step.choice, parent=node.id)
            tree.add(child)
            node.children.append(child.id)
        # depth-first, leftmost child first
        stack.extend(reversed(node.children))
    return tree


@dataclass
class ReplayReport:
    problems: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self):
        return not self.problems

    @property
    def first(self):
        return self.problems[0] if self.problems else None

    def __str__(self):
        if self.ok:
            return f"clean ({self.checked} nodes)"
        path, msg = self.problems[0]
        return f"divergence at {list(path)}: {msg}"


def replay_validate(tree: DTree) -> ReplayReport:
    report = ReplayReport()
    root = tree.root
    if tree.q is not None and root.sequent != root_sequent(tree.q, tree.config):
        report.problems.append(((), "root sequent differs from rule 1"))
    for node in tree.nodes:
        report.checked += 1
        ax = is_axiomatic(node.sequent)
        if ax and node.children:
            report.problems.append((node.path, "axiomatic sequent has children (rule 2)"))
            continue
        if ax:
            if node.status != AXIOMATIC:
                report.problems.append((node.path, f"axiomatic node marked {node.status}"))
            continue
        if node.position >= tree.depth:
            if node.status != TRUNCATED or node.children:
                report.problems.append((node.path, "node at the depth bound must be a truncated leaf"))
            continue
        if node.status != INTERNAL:
            report.problems.append((node.path, f"non-axiomatic node above the bound marked {node.status}"))
            continue
        history = [a.sequent for a in tree.ancestors(node)]
        steps = chain_steps(tree.q, node.sequent, node.position, tree.omega_bound, history, tree.config)
        kids = [tree.nodes[c] for c in node.children]
        if len(kids) != len(steps):
            report.problems.append((node.path, f"expected {len(steps)} children, found {len(kids)}"))
            continue
        for k, (kid, step) in enumerate(zip(kids, steps)):
            if kid.path != node.path + (k,) or kid.position != node.position + 1:
                report.problems.append((kid.path, "child address or position is wrong"))
            elif kid.sequent != step.sequent:
                report.problems.append((kid.path, "child sequent does not follow from its parent"))
            elif (kid.rule, kid.choice) != (step.rule, step.choice):
                report.problems.append((kid.path, "recorded rule or choice differs"))
    return report


# -- Kleene-Brouwer order ------------------------------------------------------------------

def kb_compare_paths(s: tuple, t: tuple) -> Ordering3:
    for a, b in zip(s, t):
        if a != b:
            return LT if a < b else GT
    if len(s) == len(t):
        return EQ
    return LT if len(s) > len(t) else GT


def kb_compare(tree, s, t) -> Ordering3:
    s, t = tuple(s), tuple(t)
    tree.node(s)
    tree.node(t)
    return kb_compare_paths(s, t)


def kb_listing(tree) -> list:
    """Nodes in ascending Kleene-Brouwer order, i.e. post-order."""
    out = []
    stack = [(tree.root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            out.append(node)
            continue
        stack.append((node, True))
        for c in reversed(node.children):
            stack.append((tree.nodes[c], False))
    return out


def random_tree(rng, max_nodes: int = 200) -> DTree:
    """Random finite tree shape (no sequents) for exercising the KB order."""
    tree = DTree(None, 0, 0, AxiomConfig())
    tree.add(DNode(0, (), 0, Sequent()))
    target = rng.randint(1, max_nodes)
    while len(tree.nodes) < target:
        parent = tree.nodes[rng.randrange(len(tree.nodes))]
        child = DNode(len(tree.nodes), parent.path + (len(parent.children),), parent.position + 1,
                      Sequent(), parent=parent.id)
        tree.add(child)
        parent.children.append(child.id)
    return tree


# -- models from branches ---------------------------------------------------------------

@dataclass
class CodedModel:
    rows: dict

    def row(self, i) -> set:
        return self.rows.get(i, set())

    def to_json(self) -> dict:
        return {str(i): sorted(self.rows[i]) for i in sorted(self.rows)}


def extract_model(branch) -> CodedModel:
    rows = {0: set()}
    for gamma in branch:
        for f in gamma:
            if isinstance(f, NotIn) and not f.var.bound:
                rows.setdefault(f.var.idx, set()).add(eval_term(f.term))
    return CodedModel(rows)


@dataclass
class BranchReport:
    items: dict = field(default_factory=dict)
    length: int = 0

    @property
    def ok(self):
        return all(ok for ok, _ in self.items.values())

    def __str__(self):
        return "\n".join(f"item {k}: {'pass' if ok else 'FAIL'} {detail}".rstrip()
                         for k, (ok, detail) in self.items.items())


def check_branch_properties(branch, q: QOracle, config: AxiomConfig | None = None) -> BranchReport:
    """Finite-branch versions of the properties of an infinite path."""
    config = config or AxiomConfig()
    branch = list(branch)
    occurs = set()
    order = []
    for gamma in branch:
        for f in gamma:
            if f not in occurs:
                occurs.add(f)
                order.append(f)
    rep = BranchReport(length=len(branch) - 1)

    true_lits = [show(f) for f in order if literal_truth(f)]
    rep.items["1"] = (not true_lits, ", ".join(true_lits[:3]))

    ins, outs = {}, {}
    for f in order:
        if isinstance(f, In):
            ins.setdefault(f.var, set()).add(eval_term(f.term))
        elif isinstance(f, NotIn):
            outs.setdefault(f.var, set()).add(eval_term(f.term))
    clash = [f"{v}:{sorted(ins[v] & outs[v])}" for v in sorted(ins, key=str) if ins[v] & outs.get(v, set())]
    rep.items["2"] = (not clash, ", ".join(clash))

    # items 3-8 where the rule fired before the end of the branch
    bad = {k: [] for k in "345678"}
    fired = {}
    for gamma in branch[:-1]:
        split = find_redex(gamma)
        if split is not None:
            e = split[1]
            fired[e] = fired.get(e, 0) + 1
    top = None
    for e, times in fired.items():
        if isinstance(e, Or):
            if not (e.left in occurs and e.right in occurs):
                bad["3"].append(show(e))
        elif isinstance(e, And):
            if not (e.left in occurs or e.right in occurs):
                bad["4"].append(show(e))
        elif isinstance(e, ExistsNum):
            if e.var in free_num_vars(e.body):
                if any(subst_num(e.body, e.var, n) not in occurs for n in range(times)):
                    bad["5"].append(show(e))
            elif e.body not in occurs:
                bad["5"].append(show(e))
        elif isinstance(e, ForallNum):
            top = _max_numeral(order) if top is None else top
            if not any(subst_num(e.body, e.var, n) in occurs for n in range(top + 1)):
                bad["6"].append(show(e))
        elif isinstance(e, ExistsSet):
            if X(e.var) in free_set_vars(e.body):
                if any(subst_setvar(e.body, e.var, U(m)) not in occurs for m in range(times)):
                    bad["7"].append(show(e))
            elif e.body not in occurs:
                bad["7"].append(show(e))
        elif isinstance(e, ForallSet):
            ms = set()
            for f in order:
                ms |= free_set_indices(f)
            if not any(subst_setvar(e.body, e.var, U(m)) in occurs for m in sorted(ms)):
                bad["8"].append(show(e))
    for k in "345678":
        rep.items[k] = (not bad[k], ", ".join(bad[k][:2]))

    # item 9: not C(U_m) for every m below the number of times not A_0 was decomposed
    na0 = _neg_axiom(0, config)
    times = fired.get(na0, 0)
    missing9 = [m for m in range(times) if subst_setvar(na0.body, na0.var, U(m)) not in occurs]
    rep.items["9"] = (not missing9, f"checked m < {times}" + (f", missing {missing9}" if missing9 else ""))

    missing10 = [m for m in range(rep.length + 1) if negate(q_literal(q, m)) not in occurs]
    rep.items["10"] = (not missing10, f"missing {missing10}" if missing10 else "")

    row0 = extract_model(branch).row(0)
    window = range(rep.length + 1)
    got = sorted(k for k in row0 if k <= rep.length)
    want = [k for k in window if k in q]
    rep.items["Q-row"] = (got == want, "" if got == want else f"row 0 {got} vs Q {want}")
    return rep


def _max_numeral(formulas) -> int:
    best = 0
    for f in formulas:
        for m in re.findall(r"0('*)", show(f)):
            best = max(best, len(m))
    return best


def surviving_leaves(tree: DTree) -> list:
    return [n for n in tree.nodes if n.status == TRUNCATED]


# -- emission -----------------------------------------------------------------------------

def tree_to_json(tree: DTree) -> dict:
    """Hierarchical tree. Formula texts are stored once in ``formulas``; a node's
    ``sequent`` lists indices into that table, in sequent order."""
    table, texts = {}, []

    def ids(seq):
        out = []
        for f in seq:
            k = table.get(f)
            if k is None:
                k = table[f] = len(texts)
                texts.append(show(f))
            out.append(k)
        return out

    def enc(node):
        return {"path": list(node.path), "position": node.position,
                "sequent": ids(node.sequent), "status": node.status,
                "rule": node.rule, "choice": node.choice,
                "children": [enc(tree.nodes[c]) for c in node.children]}

    import sys
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 10 * (tree.depth + 100)))
    try:
        root = enc(tree.root)
    finally:
        sys.setrecursionlimit(limit)
    return {"q": tree.q.description if tree.q else None, "depth": tree.depth,
            "omega_bound": tree.omega_bound, "nodes": len(tree.nodes),
            "formulas": texts, "root": root}


def tree_from_json(data: dict) -> DTree:
    """Rebuild a tree (sequents re-parsed) from ``tree_to_json`` output."""
    q = parse_q(data["q"]) if data.get("q") else None
    tree = DTree(q, data["depth"], data["omega_bound"], AxiomConfig())
    formulas = [parse_formula(t) for t in data["formulas"]]
    stack = [(data["root"], None)]
    while stack:
        d, parent = stack.pop()
        node = DNode(len(tree.nodes), tuple(d["path"]), d["position"],
                     Sequent(formulas[k] for k in d["sequent"]), d["status"], d["rule"],
                     d["choice"], parent)
        tree.add(node)
        if parent is not None:
            tree.nodes[parent].children.append(node.id)
        stack.extend((c, node.id) for c in reversed(d["children"]))
    return tree


def dump_tree(tree: DTree, path):
    # dumps uses the C encoder; dump to a stream does not
    text = json.dumps(tree_to_json(tree), separators=(",", ":"))
    with open(path, "w") as fh:
        fh.write(text + "\n")


def kb_text(tree: DTree) -> str:
    return "".join(" ".join(map(str, n.path)) + "\n" if n.path else "root\n" for n in kb_listing(tree))
