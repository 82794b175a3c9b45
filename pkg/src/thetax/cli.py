"""Command-line front end: ``thetax <command> ...``.

Exit codes: 0 success, 1 invariant failure, 2 usage or parse error,
3 resource cap reached.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import suites
from .arith import ff_apply, parse_fn
from .bounds import (add_bound, check_step, collapse_bound, cut_reduce_bound, embed_bound,
                     final_bound, load_steps)
from .deduction import (TreeCapError, build_tree, dump_tree, extract_model, kb_text, parse_q,
                        replay_validate, surviving_leaves, tree_from_json)
from .order import compare
from .term import ResourceError, enumerate_terms, parse, show
from .wellorder import parse_wo_spec

DEFAULT_SEED = 20240601


@dataclass
class Config:
    wo_spec: str = "nat"
    bounds: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    emit: list = field(default_factory=list)

    @classmethod
    def from_args(cls, ns):
        keys = ("g", "size", "e_prefix", "depth", "omega_bound", "functions")
        return cls(getattr(ns, "wo", "nat") or "nat",
                   {k: getattr(ns, k) for k in keys if getattr(ns, k, None) is not None},
                   getattr(ns, "seed", DEFAULT_SEED), list(getattr(ns, "emit", None) or []))

    def ordering(self):
        return parse_wo_spec(self.wo_spec)


def _e_prefix(cfg, wo):
    if "e_prefix" in cfg.bounds:
        return cfg.bounds["e_prefix"]
    return min(3, wo.finite_bound) if wo.finite_bound is not None else 3


def cmd_cmp(cfg, ns):
    wo = cfg.ordering()
    print(compare(wo, parse(ns.s, wo), parse(ns.t, wo)).symbol)
    return 0


def cmd_normalize(cfg, ns):
    wo = cfg.ordering()
    print(show(parse(ns.term, wo)))
    return 0


def cmd_enumerate(cfg, ns):
    wo = cfg.ordering()
    uni = enumerate_terms(wo, ns.g, ns.size, _e_prefix(cfg, wo))
    if ns.count:
        print(len(uni))
    else:
        for t in uni:
            print(show(t))
    return 0


def cmd_ff(cfg, ns):
    wo = cfg.ordering()
    print(show(ff_apply(wo, parse_fn(ns.fn, wo), parse(ns.at, wo))))
    return 0


def _emit_search(tree, paths):
    for p in paths:
        path = Path(p)
        if "model" in path.name:
            leaves = surviving_leaves(tree)
            rows = extract_model(tree.branch(leaves[0])).to_json() if leaves else {}
            path.write_text(json.dumps(rows, indent=1) + "\n")
        elif path.suffix == ".txt":
            path.write_text(kb_text(tree))
        else:
            dump_tree(tree, path)


def cmd_search(cfg, ns):
    q = parse_q(ns.q)
    try:
        tree = build_tree(q, ns.depth, ns.omega_bound, node_cap=ns.node_cap)
    except TreeCapError as err:
        print(f"resource cap: {err}; partial tree has {len(err.partial.nodes)} nodes", file=sys.stderr)
        return 3
    leaves = surviving_leaves(tree)
    print(f"nodes {len(tree.nodes)}")
    print(f"axiomatic leaves {sum(n.status == 'axiomatic-leaf' for n in tree.nodes)}")
    print(f"truncated leaves {len(leaves)}")
    print(f"replay {replay_validate(tree)}")
    if leaves:
        rows = extract_model(tree.branch(leaves[0])).to_json()
        print("first surviving branch rows " + json.dumps(rows))
    _emit_search(tree, cfg.emit)
    return 0


def cmd_kb_order(cfg, ns):
    if ns.tree:
        tree = tree_from_json(json.loads(Path(ns.tree).read_text()))
    else:
        if ns.q is None or ns.depth is None:
            raise ValueError("kb-order needs --tree or --q with --depth")
        try:
            tree = build_tree(parse_q(ns.q), ns.depth, ns.omega_bound, node_cap=ns.node_cap)
        except TreeCapError as err:
            print(f"resource cap: {err}", file=sys.stderr)
            return 3
    sys.stdout.write(kb_text(tree))
    return 0


def cmd_bounds(cfg, ns):
    wo = cfg.ordering()
    op, args = ns.op, ns.args
    if op == "check":
        if not ns.step:
            raise ValueError("bounds check needs --step FILE")
        status = 0
        for name, expect, inst in load_steps(ns.step, wo):
            rep = check_step(wo, inst)
            print(f"[{name}] {rep}")
            if rep.ok != (expect == "accept"):
                status = 1
        return status
    need = {"cutred": 1, "collapse": 1, "add": 2, "embed": 2, "final": 3}
    if len(args) != need[op]:
        raise ValueError(f"bounds {op} takes {need[op]} argument(s)")
    if op == "cutred":
        out = cut_reduce_bound(wo, parse(args[0], wo))
    elif op == "collapse":
        out = collapse_bound(wo, parse(args[0], wo))
    elif op == "add":
        out = add_bound(wo, parse(args[0], wo), parse(args[1], wo))
    elif op == "embed":
        out = embed_bound(wo, int(args[0]), int(args[1]))
    else:
        out = final_bound(wo, *(int(a) for a in args))
    print(show(out))
    return 0


def cmd_selftest(cfg, ns):
    wo_spec = cfg.wo_spec
    g, size = ns.g, ns.size
    e = _e_prefix(cfg, parse_wo_spec(wo_spec))
    fresh = lambda: parse_wo_spec(wo_spec)  # noqa: E731  each suite gets its own caches
    runs = [
        lambda: suites.total_order(fresh(), g, size, e, samples=ns.samples, seed=cfg.seed),
        lambda: suites.oracle_equivalence(fresh(), g, size, e),
        lambda: suites.collapse_lemma(fresh(), g, size, e),
        lambda: suites.cnf_fragment(max(size, 6)),
        lambda: suites.majorization(fresh(), g, size, e),
        lambda: suites.fundamental_functions(fresh(), g, size, e, count=ns.functions, seed=cfg.seed),
        lambda: suites.deduction_chains(ns.q, ns.depth, ns.omega_bound),
        lambda: suites.kb_order(seed=cfg.seed, count=20),
        lambda: suites.bound_calculus(fresh()),
    ]
    failed = 0
    print(f"{'suite':24} {'result':6} {'checks':>10} {'violations':>10}")
    for run in runs:
        res = run()
        failed += not res.passed
        print(f"{res.name:24} {'pass' if res.passed else 'FAIL':6} {res.checks:>10} {res.violations:>10}")
        for ex in res.examples:
            print(f"    {ex}")
    return 1 if failed else 0


def cmd_acceptance(cfg, ns):
    out = Path(ns.out)
    results = suites.run_criteria(out, seed=cfg.seed, only=ns.only,
                                  log=lambda m: print(m, flush=True))
    timings = {str(k): round(r.seconds, 3) for k, r in results.items()}
    (out / "timings.json").write_text(json.dumps(timings, indent=1) + "\n")
    return 0 if all(r.passed for r in results.values()) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="thetax", description="Relativized theta(X) ordinal notations, "
                                "deduction chains and ordinal bounds.")
    sub = p.add_subparsers(dest="command", required=True)

    def wo_opt(sp, default="nat"):
        sp.add_argument("--wo", default=default, help="nat | finite:<n> | table:<path>")

    sp = sub.add_parser("cmp", help="compare two terms")
    wo_opt(sp)
    sp.add_argument("s")
    sp.add_argument("t")
    sp.set_defaults(handler=cmd_cmp)

    sp = sub.add_parser("normalize", help="print the canonical form of a term")
    wo_opt(sp)
    sp.add_argument("term")
    sp.set_defaults(handler=cmd_normalize)

    sp = sub.add_parser("enumerate", help="list the terms of a bounded universe")
    wo_opt(sp, "finite:2")
    sp.add_argument("--g", type=int, required=True)
    sp.add_argument("--size", type=int, required=True)
    sp.add_argument("--e-prefix", type=int)
    sp.add_argument("--count", action="store_true", help="print only the number of terms")
    sp.set_defaults(handler=cmd_enumerate)

    sp = sub.add_parser("ff", help="apply a fundamental function")
    wo_opt(sp)
    sp.add_argument("--fn", required=True)
    sp.add_argument("--at", required=True)
    sp.set_defaults(handler=cmd_ff)

    for name, fn in (("search", cmd_search), ("kb-order", cmd_kb_order)):
        sp = sub.add_parser(name, help="build the truncated deduction tree" if name == "search"
                            else "list tree nodes in Kleene-Brouwer order")
        sp.add_argument("--q", required=name == "search", help="{1,3,5} | evens<=N | odds<=N")
        sp.add_argument("--depth", type=int, required=name == "search")
        sp.add_argument("--omega-bound", type=int, default=2)
        sp.add_argument("--node-cap", type=int, default=2_000_000)
        if name == "search":
            sp.add_argument("--emit", action="append", metavar="FILE",
                            help="tree.json, model.json or kb.txt; repeatable")
        else:
            sp.add_argument("--tree", help="tree file written by search --emit")
        sp.set_defaults(handler=fn)

    sp = sub.add_parser("bounds", help="bound transforms and step checking")
    wo_opt(sp)
    sp.add_argument("op", choices=["cutred", "collapse", "add", "embed", "final", "check"])
    sp.add_argument("args", nargs="*")
    sp.add_argument("--step", help="step file for 'check'")
    sp.set_defaults(handler=cmd_bounds)

    sp = sub.add_parser("selftest", help="run the invariant suites at small bounds")
    wo_opt(sp, "finite:2")
    sp.add_argument("--g", type=int, default=2)
    sp.add_argument("--size", type=int, default=4)
    sp.add_argument("--e-prefix", type=int)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--samples", type=int, default=20_000, help="sampled transitivity triples")
    sp.add_argument("--functions", type=int, default=100, help="random fundamental functions")
    sp.add_argument("--q", default="evens<=20")
    sp.add_argument("--depth", type=int, default=12)
    sp.add_argument("--omega-bound", type=int, default=3)
    sp.set_defaults(handler=cmd_selftest)

    sp = sub.add_parser("acceptance", help="run the acceptance criteria and write reports")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--only", type=int, action="append", help="criterion number; repeatable")
    sp.set_defaults(handler=cmd_acceptance)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = Config.from_args(ns)
    try:
        return ns.handler(cfg, ns)
    except ResourceError as err:
        print(f"thetax: resource cap: {err}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as err:
        print(f"thetax: error: {err}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())
