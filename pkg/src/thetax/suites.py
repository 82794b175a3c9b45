"""Invariant suites over enumerated universes.

Each suite returns a SuiteResult whose JSON form holds no timings, so two runs
with the same parameters and seed serialize to identical bytes.
"""

from __future__ import annotations

import functools
import json
import random
import time
from dataclasses import dataclass, field
from importlib.resources import files
from pathlib import Path

from .arith import (add, ff_apply, ff_depth, omega_pow, omega_tower, random_fundfn, succ,
                    times_nat)
from .bounds import check_step, final_bound, embed_bound, load_steps
from .deduction import (build_tree, check_branch_properties, dump_tree, extract_model, kb_compare,
                        kb_compare_paths, kb_listing, kb_text, parse_q, random_tree, replay_validate,
                        surviving_leaves)
from .order import EQ, GT, LT, compare, oracle_compare, triangle_leq, triangle_less
from .term import (OMEGA, ZERO, Sum, Theta, WPow, Zero, enumerate_terms, numeral, parse,
                   show, star, validate, E)
from .wellorder import wo_finite

MAX_EXAMPLES = 5


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    violations: int = 0
    examples: list = field(default_factory=list)
    info: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.violations == 0 and self.info.get("ok", True)

    def fail(self, msg):
        self.violations += 1
        if len(self.examples) < MAX_EXAMPLES:
            self.examples.append(msg)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checks": self.checks,
                "violations": self.violations, "examples": self.examples, "info": self.info}


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    return wrapper


def _sorted_universe(wo, terms):
    return sorted(terms, key=functools.cmp_to_key(lambda a, b: int(compare(wo, a, b))))


# -- 1. total order -------------------------------------------------------------------------

@_timed
def total_order(wo, g, size, e_prefix, samples=1_000_000, seed=0) -> SuiteResult:
    res = SuiteResult("total-order")
    terms = list(enumerate_terms(wo, g, size, e_prefix))
    n = len(terms)
    res.info.update(terms=n, sampled_triples=samples)
    for s in terms:
        res.checks += 1
        if compare(wo, s, s) != EQ:
            res.fail(f"irreflexivity: {show(s)}")
    for i in range(n):
        s = terms[i]
        for j in range(i + 1, n):
            t = terms[j]
            a, b = compare(wo, s, t), compare(wo, t, s)
            res.checks += 1
            if a == EQ or b != a.flip():
                res.fail(f"trichotomy: {show(s)} {a.symbol} {show(t)}, reverse {b.symbol}")
    # a strict total relation is transitive iff it agrees with some sorted order
    ordered = _sorted_universe(wo, terms)
    for i in range(n):
        s = ordered[i]
        for j in range(i + 1, n):
            res.checks += 1
            if compare(wo, s, ordered[j]) != LT:
                res.fail(f"transitivity: sorted order breaks at {show(s)} / {show(ordered[j])}")
    rng = random.Random(seed)
    for _ in range(samples):
        a, b, c = terms[rng.randrange(n)], terms[rng.randrange(n)], terms[rng.randrange(n)]
        res.checks += 1
        if compare(wo, a, b) == LT and compare(wo, b, c) == LT and compare(wo, a, c) != LT:
            res.fail(f"transitivity: {show(a)} < {show(b)} < {show(c)}")
    res.info["least"], res.info["greatest"] = show(ordered[0]), show(ordered[-1])
    return res


# -- 2. oracle -----------------------------------------------------------------------------

@_timed
def oracle_equivalence(wo, g, size, e_prefix) -> SuiteResult:
    res = SuiteResult("oracle-equivalence")
    uni = enumerate_terms(wo, g, size, e_prefix)
    table = oracle_compare(uni)
    terms = list(uni)
    res.info.update(terms=len(terms), derived_pairs=len(table), total=table.total)
    if not table.total:
        res.fail(f"fixpoint not total: {len(table.missing)} undecided pairs")
    for s in terms:
        for t in terms:
            res.checks += 1
            if (compare(wo, s, t) == LT) != table.less(s, t):
                res.fail(f"mismatch on {show(s)} vs {show(t)}")
    return res


# -- 3. collapse lemma -------------------------------------------------------------------

@_timed
def collapse_lemma(wo, g, size, e_prefix) -> SuiteResult:
    res = SuiteResult("collapse-lemma")
    terms = list(enumerate_terms(wo, g, size, e_prefix))
    thetas = [t for t in terms if isinstance(t, Theta)]
    res.info.update(terms=len(terms), theta_terms=len(thetas))
    counts = {"star-below-theta": 0, "theta-vs-theta": 0, "below-theta-power": 0}
    for t in terms:
        counts["star-below-theta"] += 1
        if compare(wo, star(wo, t), Theta(t)) != LT:
            res.fail(f"star: {show(t)}* is not below th({show(t)})")
    for s in thetas:
        a = s.arg
        for t in thetas:
            b = t.arg
            counts["theta-vs-theta"] += 1
            lhs = compare(wo, s, t) == LT
            rhs = ((compare(wo, a, b) == LT and compare(wo, star(wo, a), t) == LT)
                   or compare(wo, s, star(wo, b)) != GT)
            if lhs != rhs:
                res.fail(f"theta vs theta: {show(s)} vs {show(t)}: {lhs} but the equivalence gives {rhs}")
    for beta in terms:
        w = omega_pow(wo, beta)
        for t in thetas:
            counts["below-theta-power"] += 1
            if (compare(wo, beta, t) == LT) != (compare(wo, w, t) == LT):
                res.fail(f"below theta: beta={show(beta)}, {show(t)}")
    res.checks = sum(counts.values())
    res.info["checks_by_item"] = counts
    return res


# -- 4. Cantor normal form fragment ---------------------------------------------------------

def _cnf_cmp(a: tuple, b: tuple) -> int:
    """Textbook comparison of ordinals below epsilon_0 given as tuples of
    exponents in non-increasing order (the empty tuple is 0)."""
    for x, y in zip(a, b):
        c = _cnf_cmp(x, y)
        if c:
            return c
    return (len(a) > len(b)) - (len(a) < len(b))


def cnf_ordinals(max_size: int) -> list:
    """All CNF tuples whose term tree (0, w(.), n-ary +) has at most max_size nodes."""
    by = {1: [()]}
    principal = {}  # size -> list of exponents e with w(e) of that size

    def size_of(a):
        if not a:
            return 1
        sz = [1 + size_of(e) for e in a]
        return sz[0] if len(a) == 1 else 1 + sum(sz)

    for n in range(2, max_size + 1):
        principal[n] = list(by.get(n - 1, []))
        # single principal parts
        level = [(e,) for e in principal[n]]
        # sums of >= 2 principal parts with non-increasing exponents
        parts = [(e, k) for k in range(2, n) for e in principal.get(k, [])]
        parts.sort(key=functools.cmp_to_key(lambda p, q: _cnf_cmp(p[0], q[0])), reverse=True)

        def build(start, remaining, acc):
            if remaining == 0:
                if len(acc) >= 2:
                    level.append(tuple(acc))
                return
            for j in range(start, len(parts)):
                e, k = parts[j]
                if k <= remaining and (not acc or _cnf_cmp(e, acc[-1]) <= 0):
                    acc.append(e)
                    build(j, remaining - k, acc)
                    acc.pop()

        build(0, n - 1, [])
        by[n] = level
    out = [a for n in sorted(by) for a in by[n]]
    assert all(size_of(a) <= max_size for a in out)
    return out


def cnf_text(a: tuple) -> str:
    if not a:
        return "0"
    return " + ".join(f"w({cnf_text(e)})" for e in a)


def _pure_cnf(t) -> bool:
    if isinstance(t, Zero):
        return True
    if isinstance(t, WPow):
        return _pure_cnf(t.exp)
    if isinstance(t, Sum):
        return all(_pure_cnf(p) for p in t.parts)
    return False


@_timed
def cnf_fragment(max_size) -> SuiteResult:
    res = SuiteResult("cnf-fragment")
    wo = wo_finite(0)
    ords = cnf_ordinals(max_size)
    terms = [parse(cnf_text(a), wo) for a in ords]
    if len(set(terms)) != len(terms):
        res.fail("distinct CNF ordinals parsed to the same term")
    lib = [t for t in enumerate_terms(wo, max_size, max_size, 0) if _pure_cnf(t)]
    if set(lib) != set(terms):
        res.fail(f"fragment differs: library {len(lib)} terms, independent {len(terms)}")
    res.info.update(terms=len(terms), library_terms=len(lib))
    for a, s in zip(ords, terms):
        for b, t in zip(ords, terms):
            res.checks += 1
            want = _cnf_cmp(a, b)
            if int(compare(wo, s, t)) != want:
                res.fail(f"{show(s)} vs {show(t)}: compare {compare(wo, s, t).symbol}, CNF {want}")
    return res


# -- 5. majorization -------------------------------------------------------------------------

@_timed
def majorization(wo, g, size, e_prefix, n_max=3) -> SuiteResult:
    res = SuiteResult("majorization")
    terms = _sorted_universe(wo, enumerate_terms(wo, g, size, e_prefix))
    n = len(terms)
    idx = {t: i for i, t in enumerate(terms)}
    thetas = [Theta(t) for t in terms]
    theta_rank = {t: i for i, t in enumerate(_sorted_universe(wo, thetas))}
    # rows[i] = bitmask of j with terms[i] triangle terms[j]; terms are sorted so j > i
    rows = []
    for i in range(n):
        ri = theta_rank[thetas[i]]
        mask = 0
        for j in range(i + 1, n):
            if theta_rank[thetas[j]] > ri:
                mask |= 1 << j
        rows.append(mask)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rows[i] >> j & 1]
    res.info.update(terms=n, triangle_pairs=len(pairs))
    counts = dict.fromkeys(["transitive", "below-Om", "succ", "theta-mono", "left-add", "power-times-n", "multiples"], 0)
    for i in range(n):
        m = rows[i]
        j = 0
        while m:
            if m & 1:
                counts["transitive"] += 1
                if rows[j] & ~rows[i]:
                    res.fail(f"transitivity through {show(terms[i])} < {show(terms[j])}")
            m >>= 1
            j += 1
    below = [t for t in terms if compare(wo, t, OMEGA) == LT]
    for a in range(len(below)):
        for b in range(a + 1, len(below)):
            counts["below-Om"] += 1
            if not rows[idx[below[a]]] >> idx[below[b]] & 1:
                res.fail(f"{show(below[a])} < {show(below[b])} < Om but not majorized")
    for i, j in pairs:
        counts["succ"] += 1
        if not triangle_leq(wo, succ(wo, terms[i]), terms[j]):
            res.fail(f"{show(terms[i])} + 1 is not majorized-or-equal by {show(terms[j])}")
    for t in terms:
        wt = omega_pow(wo, t)
        for k in range(1, n_max + 1):
            counts["multiples"] += 1
            if not triangle_less(wo, times_nat(wo, wt, k), times_nat(wo, wt, k + 1)):
                res.fail(f"w^{show(t)}*{k} vs *{k + 1}")
    for i, j in pairs:
        counts["theta-mono"] += 1
        if not triangle_less(wo, thetas[i], thetas[j]):
            res.fail(f"th({show(terms[i])}) does not majorize-below th({show(terms[j])})")
    for i, j in pairs:
        a, b = terms[i], terms[j]
        wa, wb = omega_pow(wo, a), omega_pow(wo, b)
        for k in range(1, n_max + 1):
            counts["power-times-n"] += 1
            if not triangle_less(wo, times_nat(wo, wa, k), wb):
                res.fail(f"power times n: w^{show(a)}*{k} vs w^{show(b)}")
    # left addition for every gamma and every pair with b < w^(gamma+1); terms are sorted,
    # so the admissible b form a prefix of the universe
    by_j = sorted(pairs, key=lambda p: p[1])
    for gamma in terms:
        limit = omega_pow(wo, add(wo, gamma, numeral(1)))
        cut = next((j for j, t in enumerate(terms) if compare(wo, t, limit) != LT), n)
        wg = omega_pow(wo, gamma)
        image = [add(wo, wg, t) for t in terms[:cut]]
        for i, j in by_j:
            if j >= cut:
                break
            counts["left-add"] += 1
            if not triangle_less(wo, image[i], image[j]):
                res.fail(f"left addition: gamma={show(gamma)}, {show(terms[i])} / {show(terms[j])}")
    res.checks = sum(counts.values())
    res.info["checks_by_item"] = counts
    return res


# -- 6. fundamental functions -------------------------------------------------------------------

@_timed
def fundamental_functions(wo, g, size, e_prefix, count=1000, seed=0, max_depth=5) -> SuiteResult:
    res = SuiteResult("fundamental-functions")
    uni = list(enumerate_terms(wo, g, size, e_prefix))
    args = _sorted_universe(wo, [t for t in uni if compare(wo, t, OMEGA) != GT])
    n = len(args)
    tri = [(i, j) for i in range(n) for j in range(i + 1, n) if triangle_less(wo, args[i], args[j])]
    res.info.update(functions=count, arguments=n, triangle_pairs=len(tri), max_depth=max_depth)
    rng = random.Random(seed)
    counts = dict.fromkeys(["monotone", "keeps-majorization", "star-bound", "collapse-descent"], 0)
    depths = [0] * (max_depth + 1)
    for _ in range(count):
        f = random_fundfn(wo, rng, uni, max_depth)
        depths[ff_depth(f)] += 1
        im = [ff_apply(wo, f, a) for a in args]
        for i in range(n - 1):
            counts["monotone"] += 1
            # images of a sorted list must be strictly increasing
            if compare(wo, im[i], im[i + 1]) != LT:
                res.fail(f"monotone: {f} at {show(args[i])}, {show(args[i + 1])}")
        th = [Theta(x) for x in im]
        for i, j in tri:
            counts["keeps-majorization"] += 1
            if compare(wo, th[i], th[j]) != LT:
                res.fail(f"majorization: {f} at {show(args[i])}, {show(args[j])}")
        s0 = star(wo, ff_apply(wo, f, ZERO))
        for a, x in zip(args, im):
            counts["star-bound"] += 1
            bound = s0 if compare(wo, s0, star(wo, a)) != LT else star(wo, a)
            if compare(wo, star(wo, x), bound) == GT:
                res.fail(f"star bound: {f} at {show(a)}")
        counts["collapse-descent"] += 1
        lhs = ff_apply(wo, f, Theta(ff_apply(wo, f, ZERO)))
        if not triangle_less(wo, lhs, ff_apply(wo, f, OMEGA)):
            res.fail(f"f(th(f(0))) is not majorized by f(Om) for {f}")
    res.checks = sum(counts.values())
    res.info["checks_by_item"] = counts
    res.info["depth_histogram"] = depths
    return res


# -- 7. deduction chains ----------------------------------------------------------------------

@_timed
def deduction_chains(q_spec, depth, omega_bound, out_dir=None, tree_holder=None) -> SuiteResult:
    res = SuiteResult("deduction-chains")
    q = parse_q(q_spec)
    tree = build_tree(q, depth, omega_bound)
    if tree_holder is not None:
        tree_holder.append(tree)
    rep = replay_validate(tree)
    res.checks += 1
    res.info["replay"] = str(rep)
    if not rep.ok:
        res.fail(f"replay: {rep}")
    surv = surviving_leaves(tree)
    full = [leaf for leaf in surv if leaf.position == depth]
    res.info.update(nodes=len(tree.nodes), surviving_branches=len(full),
                    axiomatic_leaves=sum(n.status == "axiomatic-leaf" for n in tree.nodes))
    res.checks += 1
    if not full:
        res.fail(f"no non-axiomatic branch of length {depth}")
    item_fail = {}
    for leaf in full:
        report = check_branch_properties(tree.branch(leaf), q)
        for k in ("1", "2", "10", "Q-row"):
            res.checks += 1
            ok, detail = report.items[k]
            if not ok:
                item_fail[k] = item_fail.get(k, 0) + 1
                res.fail(f"branch {list(leaf.path)} item {k}: {detail}")
        # bounded items 3-9 are recorded, not required
        for k in ("3", "4", "5", "6", "7", "8", "9"):
            if not report.items[k][0]:
                item_fail[k] = item_fail.get(k, 0) + 1
    res.info["item_failures"] = {k: item_fail[k] for k in sorted(item_fail)}
    if full:
        model = extract_model(tree.branch(full[0]))
        res.info["first_branch"] = list(full[0].path)
        res.info["first_branch_rows"] = model.to_json()
    if out_dir is not None:
        out = Path(out_dir)
        dump_tree(tree, out / "tree.json")
        rows = extract_model(tree.branch(full[0])).to_json() if full else {}
        (out / "model.json").write_text(json.dumps(rows, indent=1) + "\n")
        (out / "kb.txt").write_text(kb_text(tree))
    return res


# -- 8. Kleene-Brouwer order ----------------------------------------------------------------------

def _kb_violations(tree, res, all_pairs, rng=None, samples=0):
    listing = kb_listing(tree)
    if sorted(n.id for n in listing) != list(range(len(tree.nodes))):
        res.fail("listing is not a permutation of the nodes")
        return
    if listing[-1] is not tree.root:
        res.fail("root is not the maximum")
    for a, b in zip(listing, listing[1:]):
        res.checks += 1
        if kb_compare(tree, a.path, b.path) != LT:
            res.fail(f"listing not ascending at {list(a.path)}, {list(b.path)}")
    pos = {n.path: i for i, n in enumerate(listing)}
    paths = [n.path for n in listing]
    if all_pairs:
        pairs = ((s, t) for s in paths for t in paths)
    else:
        pairs = ((paths[rng.randrange(len(paths))], paths[rng.randrange(len(paths))])
                 for _ in range(samples))
    for s, t in pairs:
        res.checks += 1
        c = kb_compare_paths(s, t)
        want = LT if pos[s] < pos[t] else GT if pos[s] > pos[t] else EQ
        if c != want:
            res.fail(f"order disagrees with listing on {list(s)}, {list(t)}")
    for node in tree.nodes:
        if node.parent is not None:
            res.checks += 1
            if kb_compare_paths(node.path, tree.nodes[node.parent].path) != LT:
                res.fail(f"child {list(node.path)} not below its parent")


@_timed
def kb_order(seed=0, count=100, max_nodes=200, tree=None) -> SuiteResult:
    res = SuiteResult("kb-order")
    rng = random.Random(seed)
    sizes = []
    for _ in range(count):
        t = random_tree(rng, max_nodes)
        sizes.append(len(t.nodes))
        _kb_violations(t, res, all_pairs=True)
    res.info.update(random_trees=count, total_random_nodes=sum(sizes))
    if tree is not None:
        _kb_violations(tree, res, all_pairs=False, rng=rng, samples=200_000)
        res.info["deduction_tree_nodes"] = len(tree.nodes)
    return res


# -- 9. bound calculus ------------------------------------------------------------------------

def default_fixture():
    return files("thetax") / "data" / "steps.json"


@_timed
def bound_calculus(wo, k_max=10, nm_max=4, fixture=None) -> SuiteResult:
    res = SuiteResult("bound-calculus")
    carrier = wo.carrier_prefix(wo.finite_bound if wo.finite_bound is not None else 3)
    lhs = add(wo, times_nat(wo, OMEGA, 2), omega_pow(wo, numeral(1)))
    for u in carrier:
        for k in range(k_max + 1):
            res.checks += 1
            if not triangle_less(wo, lhs, embed_bound(wo, u, k)):
                res.fail(f"Om*2+w is not majorized by E({u})+{k}")
    for u in carrier:
        for v in carrier:
            if wo.less(u, v) != LT:
                continue
            for n in range(nm_max + 1):
                for m in range(nm_max + 1):
                    res.checks += 1
                    t = omega_tower(wo, n, add(wo, E(u), numeral(m)))
                    if not triangle_less(wo, t, E(v)):
                        res.fail(f"w_{n}(E({u})+{m}) is not majorized by E({v})")
    for u in carrier:
        for n in range(nm_max + 1):
            for m in range(nm_max + 1):
                res.checks += 1
                fb = final_bound(wo, u, n, m)
                rep = validate(wo, fb)
                if not rep.ok:
                    res.fail(f"final_bound({u},{n},{m}) = {show(fb)} invalid: {rep}")
    path = fixture or default_fixture()
    steps = load_steps(path, wo)
    verdicts = {}
    for name, expect, inst in steps:
        res.checks += 1
        r = check_step(wo, inst)
        verdicts[name] = r.verdict
        if r.ok != (expect == "accept"):
            res.fail(f"step {name!r}: expected {expect}, got {r.verdict}")
    res.info["fixture_steps"] = sum(e == "accept" for _, e, _ in steps)
    res.info["fixture_mutants"] = sum(e == "reject" for _, e, _ in steps)
    res.info["rule_tags"] = sorted({inst.rule for _, e, inst in steps if e == "accept"})
    res.info["verdicts"] = verdicts
    return res


# -- all criteria --------------------------------------------------------------------------

CRITERIA = {
    1: "total order", 2: "oracle equivalence", 3: "collapse lemma", 4: "CNF fragment",
    5: "majorization", 6: "fundamental functions", 7: "deduction chains", 8: "KB ordering",
    9: "bound calculus",
}


def run_criteria(out_dir=None, seed=0, only=None, log=None) -> dict:
    """Run the acceptance suites at their stated parameters. Reports go to
    ``out_dir/criterion<k>.json`` when given; returns {k: SuiteResult}."""
    out = Path(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    wanted = set(only or CRITERIA)
    results = {}
    holder = []
    jobs = {
        1: lambda: total_order(wo_finite(3), 3, 6, 3, samples=1_000_000, seed=seed),
        2: lambda: oracle_equivalence(wo_finite(3), 2, 5, 3),
        3: lambda: collapse_lemma(wo_finite(3), 3, 6, 3),
        4: lambda: cnf_fragment(8),
        5: lambda: majorization(wo_finite(3), 2, 5, 3, n_max=3),
        6: lambda: fundamental_functions(wo_finite(3), 2, 5, 3, count=1000, seed=seed),
        7: lambda: deduction_chains("evens<=20", 40, 5, out_dir=out, tree_holder=holder),
        8: lambda: kb_order(seed=seed, count=100, max_nodes=200, tree=holder[0] if holder else None),
        9: lambda: bound_calculus(wo_finite(3)),
    }
    for k in sorted(wanted):
        res = jobs[k]()
        results[k] = res
        if out is not None:
            (out / f"criterion{k}.json").write_text(json.dumps(res.to_json(), indent=1, sort_keys=True) + "\n")
        if log:
            log(f"criterion {k} ({CRITERIA[k]}): {'PASS' if res.passed else 'FAIL'} "
                f"checks={res.checks} violations={res.violations} time={res.seconds:.1f}s")
    return results
