"""Deterministic test corpora.

Everything here is reproducible from the checked-in corpus_config.json:
exhaustive families are enumerated in canonical order and sampled
families are drawn from a seeded RNG.  Oversized forest products are
filtered out by the predicted element count, never by running them.
"""

from __future__ import annotations

import itertools
import json
import os
import random
from dataclasses import dataclass

from .algebras import (
    FiniteMTL,
    bool2,
    chain_w,
    enumerate_mtl_chains,
    godel_chain,
    lukasiewicz_chain,
    trivial_algebra,
)
from .constructions import (
    LabeledForest,
    builtin_label,
    direct_product,
    forest_product_size,
    ordinal_sum,
)
from .morphisms import AlgMorphism, enumerate_morphisms
from .posets import Forest, enumerate_forests

_CONFIG_PATH = os.path.join(os.path.dirname(__file__), "corpus_config.json")


@dataclass(frozen=True)
class CorpusConfig:
    seed: int
    chain_max: int
    forest_max_nodes: int
    label_pool: tuple[str, ...]
    max_product_elements: int
    labelings_per_forest: int
    sheaf_max_nodes: int
    sheaf_label_pool: tuple[str, ...]
    sheaf_labelings_per_forest: int
    sheaf_max_product_elements: int
    kp_max_nodes: int
    kp_label_pool: tuple[str, ...]
    kp_labelings_per_forest: int
    grid_max_nodes: int
    grid_label_pool: tuple[str, ...]
    mutation_count: int
    morphism_pair_count: int


def load_config(path: str | None = None) -> CorpusConfig:
    with open(path or _CONFIG_PATH, encoding="utf-8") as fh:
        raw = json.load(fh)
    for key in ("label_pool", "sheaf_label_pool", "kp_label_pool", "grid_label_pool"):
        raw[key] = tuple(raw[key])
    return CorpusConfig(**raw)


def _pool_chains(pool) -> list[FiniteMTL]:
    out = []
    for spec in pool:
        chain = builtin_label(spec)
        if chain is None:
            raise ValueError(f"bad label spec {spec!r} in corpus config")
        out.append(chain)
    return out


def chain_corpus(max_n: int) -> list[FiniteMTL]:
    """Every MTL-chain with at most max_n elements, one per iso class."""
    out = []
    for n in range(1, max_n + 1):
        out.extend(enumerate_mtl_chains(n))
    return out


def cycled_labeling(forest: Forest, chains: list[FiniteMTL], offset: int = 0) -> LabeledForest:
    labels = tuple(chains[(i + offset) % len(chains)] for i in range(forest.n))
    return LabeledForest(forest, labels)


def sampled_labeling(forest: Forest, chains: list[FiniteMTL], rng: random.Random) -> LabeledForest:
    labels = tuple(rng.choice(chains) for _ in range(forest.n))
    return LabeledForest(forest, labels)


def _labelings(forests, pool, per_forest, size_cap, seed) -> list[LabeledForest]:
    chains = _pool_chains(pool)
    rng = random.Random(seed)
    out = []
    for forest in forests:
        picks = [cycled_labeling(forest, chains)]
        for _ in range(per_forest - 1):
            picks.append(sampled_labeling(forest, chains, rng))
        for lf in picks:
            if forest_product_size(lf) <= size_cap and lf not in out:
                out.append(lf)
    return out


def validation_corpus(cfg: CorpusConfig) -> list[LabeledForest]:
    """Labeled forests for the axiom suite: all shapes up to the node cap,
    labels cycled plus seeded draws from the pool, size-capped."""
    forests = enumerate_forests(cfg.forest_max_nodes)
    return _labelings(
        forests, cfg.label_pool, cfg.labelings_per_forest,
        cfg.max_product_elements, cfg.seed,
    )


def sheaf_corpus(cfg: CorpusConfig) -> list[LabeledForest]:
    forests = enumerate_forests(cfg.sheaf_max_nodes)
    return _labelings(
        forests, cfg.sheaf_label_pool, cfg.sheaf_labelings_per_forest,
        cfg.sheaf_max_product_elements, cfg.seed + 1,
    )


def kp_corpus(cfg: CorpusConfig) -> list[LabeledForest]:
    forests = enumerate_forests(cfg.kp_max_nodes)
    return _labelings(
        forests, cfg.kp_label_pool, cfg.kp_labelings_per_forest,
        cfg.max_product_elements, cfg.seed + 2,
    )


def grid_corpus(cfg: CorpusConfig) -> list[LabeledForest]:
    """Every forest up to the grid node cap with every assignment from the
    grid pool (exhaustive, used for the chain criterion)."""
    chains = _pool_chains(cfg.grid_label_pool)
    out = []
    for forest in enumerate_forests(cfg.grid_max_nodes):
        for combo in itertools.product(chains, repeat=forest.n):
            out.append(LabeledForest(forest, tuple(combo)))
    return out


def algebra_corpus(cfg: CorpusConfig) -> list[FiniteMTL]:
    """Algebras for the structural suites: all small chains, products and
    ordinal sums of small chains, and the non-representable witness W."""
    out = [trivial_algebra()]
    out.extend(chain_corpus(cfg.chain_max))
    small = [c for c in chain_corpus(4) if c.n >= 2]
    for a, b in itertools.combinations_with_replacement(small, 2):
        if a.n * b.n <= 24:
            out.append(direct_product([a, b]))
    for a in small:
        for b in small:
            if a.n + b.n <= 8:
                out.append(ordinal_sum([a, b]))
    out.append(chain_w())
    out.append(direct_product([godel_chain(3), lukasiewicz_chain(3)]))
    out.append(ordinal_sum([lukasiewicz_chain(3), direct_product([bool2(), bool2()])]))
    seen = set()
    unique = []
    for alg in out:
        if alg.key() not in seen:
            seen.add(alg.key())
            unique.append(alg)
    return unique


def bool2() -> FiniteMTL:
    return lukasiewicz_chain(2)


def mutation_cases(cfg: CorpusConfig) -> list[tuple[FiniteMTL, str, int, int, int]]:
    """Seeded single-entry table mutations: (algebra, table, x, y, new value)."""
    rng = random.Random(cfg.seed + 3)
    base = [c for c in chain_corpus(cfg.chain_max) if c.n >= 3]
    base.append(direct_product([bool2(), bool2()]))
    base.append(chain_w())
    cases = []
    while len(cases) < cfg.mutation_count:
        alg = rng.choice(base)
        table = rng.choice(["mul", "imp"])
        x = rng.randrange(alg.n)
        y = rng.randrange(alg.n)
        old = int(getattr(alg, table)[x, y])
        candidates = [v for v in range(alg.n) if v != old]
        if not candidates:
            continue
        cases.append((alg, table, x, y, rng.choice(candidates)))
    return cases


def composable_morphism_pairs(cfg: CorpusConfig) -> list[tuple[AlgMorphism, AlgMorphism]]:
    """At least morphism_pair_count pairs (f: M -> N, g: N -> O)."""
    small = [c for c in chain_corpus(4)]
    small.append(direct_product([bool2(), bool2()]))
    small.append(ordinal_sum([bool2(), bool2(), bool2()]))
    rng = random.Random(cfg.seed + 4)
    by_endpoints = {}
    for a in small:
        for b in small:
            if a.n > 8 or b.n > 8:
                continue
            homs = enumerate_morphisms(a, b, limit=6)
            if homs:
                by_endpoints[(a.key(), b.key())] = homs
    pairs = []
    keys = sorted(by_endpoints)
    for (ak, bk), homs in ((k, by_endpoints[k]) for k in keys):
        for (bk2, ck), homs2 in ((k, by_endpoints[k]) for k in keys):
            if bk != bk2:
                continue
            for f in homs:
                for g in homs2:
                    if f.target == g.source:
                        pairs.append((f, g))
    rng.shuffle(pairs)
    # keep variety: identity-shaped first components go to the back
    pairs.sort(key=lambda fg: fg[0].source.n == fg[0].target.n
               and fg[0].mapping == tuple(range(fg[0].source.n)))
    return pairs[:max(cfg.morphism_pair_count, 20)]
