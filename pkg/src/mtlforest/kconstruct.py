"""Recursive reconstruction of forest products from ordinal sums and
direct products.

A tree is built from its root upward: a maximal node contributes its
label, any other node contributes its label summed below the product of
its covering subtrees.  A forest contributes the product over its
component trees.  The resulting plan is kept as an inspectable expression
tree and checked isomorphic to the section-enumeration product.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebras import FiniteMTL
from .constructions import LabeledForest, direct_product, forest_product, ordinal_sum
from .morphisms import find_isomorphism
from .posets import Tree, component_trees


@dataclass(frozen=True)
class KPlan:
    pass


@dataclass(frozen=True)
class LabelPlan(KPlan):
    node: int  # node index in the original forest


@dataclass(frozen=True)
class SumPlan(KPlan):
    node: int
    factors: tuple[KPlan, ...]  # plans of the covering subtrees


@dataclass(frozen=True)
class ProductPlan(KPlan):
    factors: tuple[KPlan, ...]  # plans of the component trees


def plan_str(plan: KPlan, names) -> str:
    """Bracket expression: [..] × [..] across trees, l(x) ⊕ (..) inside."""

    def inner(p: KPlan) -> str:
        if isinstance(p, LabelPlan):
            return f"l({names[p.node]})"
        if isinstance(p, SumPlan):
            joined = " × ".join(inner(f) for f in p.factors)
            return f"l({names[p.node]}) ⊕ ({joined})"
        raise TypeError(p)

    if isinstance(plan, ProductPlan):
        return " × ".join(f"[{inner(f)}]" for f in plan.factors)
    return inner(plan)


def k_build_tree(l: LabeledForest, tree: Tree, index: dict[int, int],
                 node: int) -> tuple[FiniteMTL, KPlan]:
    """Recursive construction at a node of a component tree.

    `index` maps original forest nodes to tree-local nodes; `node` is an
    original forest node inside the tree.
    """
    local = index[node]
    covers = tree.covers_of(local)
    back = {v: k for k, v in index.items()}
    if not covers:
        return l.label(node), LabelPlan(node)
    parts = []
    plans = []
    for c in sorted(covers):
        alg, plan = k_build_tree(l, tree, index, back[c])
        parts.append(alg)
        plans.append(plan)
    prod = direct_product(parts)
    return ordinal_sum([l.label(node), prod]), SumPlan(node, tuple(plans))


def k_of_forest(l: LabeledForest) -> tuple[FiniteMTL, KPlan]:
    """The full construction: product over component trees, each built
    from its root."""
    parts = []
    plans = []
    for tree, index in component_trees(l.forest):
        back = {v: k for k, v in index.items()}
        root = back[tree.root]
        alg, plan = k_build_tree(l, tree, index, root)
        parts.append(alg)
        plans.append(plan)
    if len(parts) == 1:
        return parts[0], plans[0]
    return direct_product(parts), ProductPlan(tuple(plans))


def verify_k_iso(l: LabeledForest) -> tuple[FiniteMTL, KPlan, tuple[int, ...]]:
    """Assert the recursive construction agrees with section enumeration."""
    built, plan = k_of_forest(l)
    enumerated = forest_product(l).algebra
    assert built.n == enumerated.n, (built.n, enumerated.n)
    iso = find_isomorphism(built, enumerated)
    assert iso is not None, "recursive construction disagrees with enumeration"
    return built, plan, iso
