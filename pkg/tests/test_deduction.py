import itertools
import json
import random

import pytest

from thetax.deduction import (AXIOMATIC, INTERNAL, TRUNCATED, AxiomConfig, DeductionError, DNode,
                              DTree, TreeCapError, axiom_enumerator, build_tree, cantor_unpair,
                              chain_children, chain_steps, check_branch_properties, dump_tree,
                              extract_model, kb_compare, kb_compare_paths, kb_listing, kb_text,
                              parse_q, q_from_set, q_literal, random_tree, replay_validate,
                              root_sequent, surviving_leaves, tree_from_json)
from thetax.logic import (NZERO, And, ForallNum, ForallSet, In, NotIn, NVar, Or, Sequent, U, X, eq,
                          is_literal, negate, numeral, show)
from thetax.wellorder import EQ, GT, LT

EMPTY = q_from_set([])


def test_q_literal():
    q = q_from_set([2])
    assert q_literal(q, 2) is In(numeral(2), U(0))
    assert q_literal(q, 3) is NotIn(numeral(3), U(0))
    assert q_literal(EMPTY, 7) is NotIn(numeral(7), U(0))


def test_parse_q():
    assert 4 in parse_q("evens<=20") and 22 not in parse_q("evens<=20")
    assert 3 in parse_q("{1,3,5}") and 2 not in parse_q("{1,3,5}")
    assert 0 not in parse_q("{}")
    with pytest.raises(DeductionError):
        parse_q("primes")


def test_cantor_unpair():
    seen = {cantor_unpair(z) for z in range(55)}
    assert seen == {(a, b) for a in range(10) for b in range(10) if a + b < 10}


def test_axioms():
    a0 = axiom_enumerator(0)
    assert isinstance(a0, ForallSet)
    assert show(a0).startswith("ALL X_0.")
    for i in range(1, 8):
        a = axiom_enumerator(i)
        assert not a.__class__.__name__.startswith("Exists")
        assert a is axiom_enumerator(i)
    # i=1 decodes (0, 0): "0<0" is arithmetic but does not mention x_1, still closed
    assert not show(axiom_enumerator(1)).count("U_")


def test_root_sequent():
    root = root_sequent(EMPTY)
    assert root.formulas == (In(NZERO, U(0)), negate(axiom_enumerator(0)))


def test_rule3():
    gamma = Sequent([In(NZERO, U(1)), NotIn(numeral(1), U(1))])
    (child,) = chain_children(EMPTY, gamma, 4, 2)
    assert child.formulas == gamma.formulas + (In(numeral(5), U(0)), negate(axiom_enumerator(5)))


def test_rule_or():
    a, b = In(NZERO, U(1)), In(numeral(1), U(2))
    (child,) = chain_children(EMPTY, Sequent([Or(a, b)]), 0, 2)
    assert child.formulas[:2] == (a, b)


def test_rule_and_two_children():
    a, b = In(NZERO, U(1)), In(numeral(1), U(2))
    kids = chain_children(EMPTY, Sequent([And(a, b)]), 0, 2)
    assert [k[0] for k in kids] == [a, b]


def test_rule_forall_num_bounded():
    f = ForallNum(0, In(NVar(0), U(1)))
    steps = chain_steps(EMPTY, Sequent([f]), 0, 2)
    assert [(s.rule, s.choice) for s in steps] == [("4d", 0), ("4d", 1), ("4d", 2)]
    assert steps[2].sequent[0] is In(numeral(2), U(1))


def test_rule_forall_set_fresh():
    f = ForallSet(0, In(NZERO, X(0)))
    gamma = Sequent([NotIn(NZERO, U(0)), NotIn(NZERO, U(1)), f])
    (step,) = chain_steps(EMPTY, gamma, 0, 1)
    assert (step.rule, step.choice) == ("4f", 2)
    assert In(NZERO, U(2)) in step.sequent


def test_no_rules_for_axiomatic():
    with pytest.raises(DeductionError):
        chain_steps(EMPTY, Sequent([eq(NZERO, NZERO)]), 0, 1)


def test_depth_zero():
    tree = build_tree(EMPTY, 0, 2)
    assert len(tree.nodes) == 1 and tree.root.status == TRUNCATED


@pytest.fixture(scope="module")
def small_tree():
    return build_tree(parse_q("evens<=6"), 18, 2)


def test_replay_clean(small_tree):
    rep = replay_validate(small_tree)
    assert rep.ok and rep.checked == len(small_tree.nodes)


def test_replay_tampered(small_tree):
    tree = tree_from_json(json.loads(json.dumps(_to_json(small_tree))))
    victim = next(n for n in tree.nodes if n.position == 3)
    victim.sequent = Sequent(list(victim.sequent) + [In(numeral(99), U(5))])
    rep = replay_validate(tree)
    assert rep.first[0] == victim.path


def test_replay_axiomatic_internal():
    tree = DTree(EMPTY, 3, 1, AxiomConfig())
    tree.add(DNode(0, (), 0, Sequent([eq(NZERO, NZERO)]), INTERNAL, children=[1]))
    tree.add(DNode(1, (0,), 1, Sequent([eq(NZERO, NZERO)]), AXIOMATIC, parent=0))
    rep = replay_validate(tree)
    assert not rep.ok
    assert any("rule 2" in msg for _, msg in rep.problems)


def test_tree_statuses(small_tree):
    for n in small_tree.nodes:
        if n.status == INTERNAL:
            assert n.children
        else:
            assert not n.children
        if n.status == TRUNCATED:
            assert n.position == small_tree.depth


def test_node_cap():
    with pytest.raises(TreeCapError) as err:
        build_tree(parse_q("evens<=6"), 18, 2, node_cap=20)
    assert len(err.value.partial.nodes) == 20


def _to_json(tree):
    from thetax.deduction import tree_to_json
    return tree_to_json(tree)


def test_json_roundtrip(small_tree, tmp_path):
    path = tmp_path / "tree.json"
    dump_tree(small_tree, path)
    back = tree_from_json(json.loads(path.read_text()))
    assert sorted(n.path for n in back.nodes) == sorted(n.path for n in small_tree.nodes)
    for n in small_tree.nodes:
        m = back.node(n.path)
        assert (m.sequent, m.status, m.rule, m.choice) == (n.sequent, n.status, n.rule, n.choice)
    assert replay_validate(back).ok


# -- Kleene-Brouwer ----------------------------------------------------------------------

def test_kb_paths():
    assert kb_compare_paths((0,), ()) == LT
    assert kb_compare_paths((0, 5, 5), (1,)) == LT
    assert kb_compare_paths((1,), (0, 3)) == GT
    assert kb_compare_paths((2, 1), (2, 1)) == EQ


def test_kb_listing_five_nodes():
    tree = DTree(None, 0, 0, AxiomConfig())
    for i, (path, parent) in enumerate([((), None), ((0,), 0), ((1,), 0), ((0, 0), 1), ((0, 1), 1)]):
        tree.add(DNode(i, path, len(path), Sequent(), parent=parent))
        if parent is not None:
            tree.nodes[parent].children.append(i)
    assert [n.path for n in kb_listing(tree)] == [(0, 0), (0, 1), (0,), (1,), ()]
    assert kb_text(tree).splitlines()[-1] == "root"
    # brute force: left subtree below right sibling
    for s in ((0,), (0, 0), (0, 1)):
        assert kb_compare(tree, s, (1,)) == LT
    with pytest.raises(DeductionError):
        kb_compare(tree, (), (7,))


def test_kb_random_trees_total():
    rng = random.Random(11)
    for _ in range(10):
        tree = random_tree(rng, 40)
        listing = kb_listing(tree)
        assert sorted(n.id for n in listing) == list(range(len(tree.nodes)))
        assert listing[-1] is tree.root
        for a, b in itertools.combinations(listing, 2):
            assert kb_compare(tree, a.path, b.path) == LT


# -- models and branch properties --------------------------------------------------------------

def test_extract_model():
    model = extract_model([Sequent([NotIn(numeral(5), U(2))])])
    assert 5 in model.row(2)


def test_root_only_model_empty_q():
    tree = build_tree(EMPTY, 0, 1)
    assert extract_model(tree.branch(tree.root)).to_json() == {"0": []}


def test_branch_properties(small_tree):
    q = small_tree.q
    leaves = surviving_leaves(small_tree)
    assert leaves
    for leaf in leaves:
        rep = check_branch_properties(small_tree.branch(leaf), q)
        assert rep.ok, str(rep)
        assert rep.length == small_tree.depth


def test_branch_properties_detect_clash():
    branch = [Sequent([In(numeral(1), U(3))]), Sequent([NotIn(numeral(1), U(3))])]
    rep = check_branch_properties(branch, EMPTY)
    assert not rep.items["2"][0]


def test_literal_only_nodes_get_rule3(small_tree):
    for n in small_tree.nodes:
        if n.children and all(is_literal(f) for f in n.sequent):
            assert {small_tree.nodes[c].rule for c in n.children} == {"3"}
