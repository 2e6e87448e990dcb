import itertools
import os

from mtlforest.algebras import bool2, lukasiewicz_chain
from mtlforest.constructions import (
    LabeledForest,
    direct_product,
    forest_product,
    ordinal_sum,
    parse_lforest,
)
from mtlforest.kconstruct import (
    LabelPlan,
    SumPlan,
    k_build_tree,
    k_of_forest,
    plan_str,
    verify_k_iso,
)
from mtlforest.morphisms import find_isomorphism
from mtlforest.posets import component_trees, enumerate_forests, parse_forest

L2 = bool2


def L3():
    return lukasiewicz_chain(3)


def example_lforest(data_dir):
    with open(os.path.join(data_dir, "example8.lforest")) as fh:
        return parse_lforest(fh.read())


def test_leaf_build_is_the_label(data_dir):
    lf = example_lforest(data_dir)
    (t1, i1), _ = component_trees(lf.forest)
    g = 6  # leaf g of the first tree
    alg, plan = k_build_tree(lf, t1, i1, g)
    assert alg == L2()
    assert plan == LabelPlan(g)


def test_inner_node_sizes(data_dir):
    lf = example_lforest(data_dir)
    (t1, i1), (t2, i2) = component_trees(lf.forest)
    alg_c, _ = k_build_tree(lf, t1, i1, 2)
    assert alg_c.n == 5   # 2 + (2·2) - 1
    alg_a, _ = k_build_tree(lf, t1, i1, 0)
    assert alg_a.n == 6   # 2 + 5 - 1
    alg_b, _ = k_build_tree(lf, t2, i2, 1)
    assert alg_b.n == 9   # 2 + (2·2·2) - 1


def test_example8_size_and_plan(data_dir):
    lf = example_lforest(data_dir)
    alg, plan = k_of_forest(lf)
    assert alg.n == 54
    expected = "[l(a) ⊕ (l(c) ⊕ (l(g) × l(h)))] × [l(b) ⊕ (l(d) × l(e) × l(f))]"
    assert plan_str(plan, lf.forest.names) == expected


def test_example8_is_isomorphic_to_forest_product(data_dir):
    lf = example_lforest(data_dir)
    enumerated = forest_product(lf)
    assert enumerated.algebra.n == 54  # independent section enumeration
    built, plan, iso = verify_k_iso(lf)
    assert built.n == 54 and iso is not None


def test_single_node_forest():
    lf = LabeledForest(parse_forest("nodes 1"), (L3(),))
    alg, plan = k_of_forest(lf)
    assert alg == L3() and plan == LabelPlan(0)
    verify_k_iso(lf)


def test_two_antichain_is_direct_product():
    lf = LabeledForest(parse_forest("nodes 2"), (L2(), L2()))
    alg, plan = k_of_forest(lf)
    assert find_isomorphism(alg, direct_product([L2(), L2()])) is not None
    verify_k_iso(lf)


def test_k_iso_p_over_small_grid():
    for forest in enumerate_forests(4):
        for labels in itertools.product((L2(), L3()), repeat=forest.n):
            verify_k_iso(LabeledForest(forest, labels))


def test_component_split_lemma():
    # product over a disjoint union is the product of the per-tree products
    forest = parse_forest("nodes 3\nedge 0 1")  # a 2-chain next to a point
    labels = (L2(), L3(), L3())
    lf = LabeledForest(forest, labels)
    whole = forest_product(lf).algebra
    parts = []
    for nodes in forest.components:
        sub, _ = lf.restrict(nodes)
        parts.append(forest_product(sub).algebra)
    assert find_isomorphism(whole, direct_product(parts)) is not None


def test_root_split_lemma():
    # product over 1 ⊕ F0 is the root label summed under the product over F0
    forest = parse_forest("nodes 3\nedge 0 1\nedge 0 2")
    labels = (L3(), L2(), L2())
    lf = LabeledForest(forest, labels)
    whole = forest_product(lf).algebra
    rest, _ = lf.restrict([1, 2])
    summed = ordinal_sum([labels[0], forest_product(rest).algebra])
    assert find_isomorphism(whole, summed) is not None


def test_plan_string_shapes():
    lf = LabeledForest(parse_forest("nodes 2\nedge 0 1"), (L2(), L2()))
    alg, plan = k_of_forest(lf)
    assert isinstance(plan, SumPlan)
    assert plan_str(plan, lf.forest.names) == "l(0) ⊕ (l(1))"
    lf2 = LabeledForest(parse_forest("nodes 2"), (L2(), L2()))
    _, plan2 = k_of_forest(lf2)
    assert plan_str(plan2, lf2.forest.names) == "[l(0)] × [l(1)]"
