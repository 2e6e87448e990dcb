"""Finite MTL-algebras, labeled forests, forest products and their duality."""

from .algebras import (
    FiniteMTL,
    Filter,
    bool2,
    chain_w,
    enumerate_mtl_chains,
    filter_generated,
    filters,
    godel_chain,
    idempotent_structure,
    is_archimedean,
    lukasiewicz_chain,
    parse_mtl,
    quotient,
    spectrum,
    trivial_algebra,
    upset_algebra,
    validate_mtl,
    write_mtl,
)
from .constructions import (
    ForestElement,
    ForestProduct,
    LabeledForest,
    classify_element,
    direct_product,
    downset_filter,
    forest_product,
    ordinal_sum,
    parse_lforest,
    write_lforest,
)
from .duality import (
    LabeledForestMorphism,
    SkeletonRegistry,
    counit,
    enumerate_archimedean_chains,
    functor_G,
    functor_G_mor,
    functor_H,
    functor_H_mor,
    g_decomposition,
    is_representable,
    unit,
)
from .kconstruct import k_build_tree, k_of_forest, plan_str, verify_k_iso
from .morphisms import (
    AlgMorphism,
    check_morphism,
    enumerate_morphisms,
    find_isomorphism,
    identity_morphism,
)
from .posets import (
    Forest,
    PMorphismMap,
    Poset,
    Tree,
    component_trees,
    downsets,
    forest_build,
    forest_decompose,
    is_forest,
    is_p_morphism,
    is_tree,
    parse_forest,
    validate_poset,
    write_forest,
)
from .sheaves import ForestPresheaf, MatchingFamily, amalgamate, stalk

__version__ = "0.1.0"
