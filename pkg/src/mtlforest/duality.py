"""The two contravariant functors between finite MTL-algebras and labeled
forests, and the round-trip isomorphisms for representable algebras.

Decomposition sends an algebra to its join-irreducible idempotents with
the archimedean quotient chains as labels; reconstruction takes the
forest product.  The skeleton registry keeps one canonical copy of every
archimedean chain so label comparisons are plain table equality.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import config
from .algebras import (
    FiniteMTL,
    Filter,
    IdempotentStructure,
    canonicalize,
    enumerate_mtl_chains,
    idempotent_structure,
    is_archimedean,
    quotient,
    upset_algebra,
)
from .constructions import (
    ForestProduct,
    LabeledForest,
    characteristic_section,
    forest_product,
)
from .errors import CapExceeded, NotRepresentable
from .morphisms import AlgMorphism, check_morphism, identity_morphism
from .posets import Forest, PMorphismMap, check_p_morphism, is_p_morphism, _bits
from .sheaves import ForestPresheaf, MatchingFamily, amalgamate


class SkeletonRegistry:
    """Canonical nontrivial archimedean chains, deduplicated by table key.

    Chains admit a unique order isomorphism, so canonical reindexing makes
    isomorphism testing a table comparison.
    """

    def __init__(self):
        self._chains: dict[tuple, FiniteMTL] = {}

    def intern(self, chain: FiniteMTL) -> FiniteMTL:
        if chain.n < 2:
            raise ValueError("trivial chains are not skeleton members")
        chain = canonicalize(chain)
        if not is_archimedean(chain):
            raise ValueError("skeleton members must be archimedean")
        return self._chains.setdefault(chain.key(), chain)

    def chains(self) -> list[FiniteMTL]:
        return [self._chains[k] for k in sorted(self._chains)]

    def __len__(self):
        return len(self._chains)

    def __contains__(self, chain: FiniteMTL):
        return canonicalize(chain).key() in self._chains


_DEFAULT_REGISTRY = SkeletonRegistry()


def default_registry() -> SkeletonRegistry:
    return _DEFAULT_REGISTRY


def enumerate_archimedean_chains(max_n: int, registry: SkeletonRegistry | None = None) -> SkeletonRegistry:
    """Fill a registry with every archimedean chain of size 2..max_n."""
    if max_n > config.MAX_CHAIN_ENUM:
        raise CapExceeded(f"chain enumeration capped at {config.MAX_CHAIN_ENUM}")
    reg = registry if registry is not None else SkeletonRegistry()
    for n in range(2, max_n + 1):
        for chain in enumerate_mtl_chains(n):
            if is_archimedean(chain):
                reg.intern(chain)
    return reg


# ---------------------------------------------------------------- functor G


@dataclass(frozen=True)
class GNode:
    """Data attached to one join-irreducible idempotent of the algebra."""

    e: int                    # the idempotent, as an element of M
    a_e: int                  # unique predecessor in JI ∪ {bot}
    upset: tuple[int, ...]    # elements of ↑a_e in M
    to_label: dict            # element of ↑a_e -> element of the label chain
    rep_of: dict              # label element -> canonical representative in M
    label: FiniteMTL          # interned archimedean chain ↑a_e / ↑e


@dataclass(frozen=True)
class GDecomposition:
    algebra: FiniteMTL
    structure: IdempotentStructure
    nodes: tuple[int, ...]          # JI idempotents, ascending element order
    labeled: LabeledForest
    node_data: tuple[GNode, ...]

    def node_of(self, e: int) -> int:
        return self.nodes.index(e)


def g_decomposition(m: FiniteMTL, registry: SkeletonRegistry | None = None) -> GDecomposition:
    """Decompose an algebra into its labeled forest with full provenance."""
    reg = registry if registry is not None else _DEFAULT_REGISTRY
    st = idempotent_structure(m)
    nodes = st.join_irreducible
    forest = Forest(st.ji_poset.n, st.ji_poset.up, st.ji_poset.names)
    data = []
    labels = []
    for e in nodes:
        a_e = st.a(e)
        up_alg, up_elems = upset_algebra(m, a_e)
        up_index = {v: i for i, v in enumerate(up_elems)}
        filt = Filter(
            up_alg,
            up_index[e],
            frozenset(i for i, v in enumerate(up_elems) if m.le(e, v)),
        )
        q, proj = quotient(up_alg, filt)
        label = reg.intern(q)
        assert label.key() == q.key(), "quotient chain must already be canonical"
        to_label = {v: proj(up_index[v]) for v in up_elems}
        rep_of = {}
        for v in up_elems:  # canonical representative: the largest in its class
            c = to_label[v]
            if c not in rep_of or m.le(rep_of[c], v):
                rep_of[c] = v
        data.append(GNode(e, a_e, tuple(up_elems), to_label, rep_of, label))
        labels.append(label)
    labeled = LabeledForest(forest, tuple(labels))
    return GDecomposition(m, st, nodes, labeled, tuple(data))


def functor_G(m: FiniteMTL, registry: SkeletonRegistry | None = None) -> LabeledForest:
    return g_decomposition(m, registry).labeled


# ------------------------------------------------------- labeled forest maps


@dataclass(frozen=True)
class LabeledForestMorphism:
    """Pair of a base p-morphism and a family of injective chain maps.

    family[x] maps target.label(base(x)) into source.label(x); this is the
    contravariant direction the reconstruction functor consumes.
    """

    source: LabeledForest
    target: LabeledForest
    base: PMorphismMap
    family: tuple[AlgMorphism, ...]

    def __post_init__(self):
        assert self.base.source == self.source.forest
        assert self.base.target == self.target.forest
        check_p_morphism(self.base)
        for x in range(self.source.n):
            fx = self.family[x]
            assert fx.source == self.target.label(self.base(x)), x
            assert fx.target == self.source.label(x), x
            assert fx.is_injective, f"label map at node {x} is not injective"

    def then(self, other: "LabeledForestMorphism") -> "LabeledForestMorphism":
        """Composite source -> other.target (self first, then other)."""
        assert self.target == other.source
        mapping = tuple(other.base(self.base(x)) for x in range(self.source.n))
        base = PMorphismMap(self.source.forest, other.target.forest, mapping)
        family = tuple(
            other.family[self.base(x)].then(self.family[x])
            for x in range(self.source.n)
        )
        return LabeledForestMorphism(self.source, other.target, base, family)

    def is_isomorphism(self) -> bool:
        f = self.base.mapping
        if sorted(f) != list(range(self.target.n)):
            return False
        inv = [0] * self.target.n
        for x, y in enumerate(f):
            inv[y] = x
        back = PMorphismMap(self.target.forest, self.source.forest, tuple(inv))
        if not is_p_morphism(back):
            return False
        return all(fx.is_isomorphism() for fx in self.family)

    def same_as(self, other: "LabeledForestMorphism") -> bool:
        return (
            self.source == other.source
            and self.target == other.target
            and self.base.mapping == other.base.mapping
            and all(
                a.mapping == b.mapping for a, b in zip(self.family, other.family)
            )
        )


def identity_lf_morphism(l: LabeledForest) -> LabeledForestMorphism:
    base = PMorphismMap(l.forest, l.forest, tuple(range(l.n)))
    family = tuple(identity_morphism(l.label(i)) for i in range(l.n))
    return LabeledForestMorphism(l, l, base, family)


def functor_G_mor(f: AlgMorphism, registry: SkeletonRegistry | None = None) -> LabeledForestMorphism:
    """G on morphisms: f: M -> N induces G(N) -> G(M).

    The base p-morphism sends a join irreducible e of N to the generator
    of the preimage filter f^{-1}(↑e); the label maps factor the rebased
    restriction of f through the quotients.
    """
    m, n = f.source, f.target
    dm = g_decomposition(m, registry)
    dn = g_decomposition(n, registry)

    base_map = []
    for e in dn.nodes:
        pre = [x for x in range(m.n) if n.le(e, f(x))]
        mins = [x for x in pre if all(not (m.le(y, x) and y != x) for y in pre)]
        assert len(mins) == 1, "preimage of a prime filter must be principal"
        gen = mins[0]
        assert gen in dm.nodes, "preimage generator must be join irreducible"
        base_map.append(dm.node_of(gen))
    base = PMorphismMap(dn.labeled.forest, dm.labeled.forest, tuple(base_map))

    family = []
    for pos, e in enumerate(dn.nodes):
        tgt_node = dn.node_data[pos]
        src_node = dm.node_data[base_map[pos]]
        # rebased restriction: push x through f, then rejoin with a_e.  The
        # join absorbs the cases where f skips the interval [a_e, e); on
        # classes it coincides with restricting f wherever that is defined.
        mapping = []
        for c in range(src_node.label.n):
            images = set()
            for x in src_node.upset:
                if src_node.to_label[x] != c:
                    continue
                y = int(n.join[f(x), tgt_node.a_e])
                images.add(tgt_node.to_label[y])
            assert len(images) == 1, f"label map not constant on class {c}"
            mapping.append(images.pop())
        fe = check_morphism(mapping, src_node.label, tgt_node.label)
        family.append(fe)
    return LabeledForestMorphism(dn.labeled, dm.labeled, base, tuple(family))


# ---------------------------------------------------------------- functor H


def functor_H(l: LabeledForest) -> ForestProduct:
    return forest_product(l)


def functor_H_mor(mor: LabeledForestMorphism,
                  source_product: ForestProduct | None = None,
                  target_product: ForestProduct | None = None) -> AlgMorphism:
    """H on morphisms: (φ, {f_x}): l -> m yields H(m) -> H(l).

    Composite of: restriction to the open image φ(F), precomposition with
    φ, and pointwise application of the label maps.
    """
    l, m = mor.source, mor.target
    pm = target_product if target_product is not None else forest_product(m)
    pl = source_product if source_product is not None else forest_product(l)
    phi = mor.base.mapping
    image_mask = 0
    for y in phi:
        image_mask |= 1 << y
    assert m.forest.is_downset(image_mask), "p-morphism image must be open"

    mapping = []
    for vals in pm.sections:
        out = tuple(
            mor.family[x](vals[phi[x]]) for x in range(l.n)
        )
        mapping.append(pl.section_index(out))
    return check_morphism(mapping, pm.algebra, pl.algebra)


# ---------------------------------------------------------- representability


def local_unit_witness(m: FiniteMTL, e: int) -> int | None:
    """First y with e·y != e∧y, or None when e is a local unit.

    Both characterizations (products below e are absorbed; multiplication
    by e is meet with e) are evaluated and must agree.
    """
    cond1 = all(
        int(m.mul[e, x]) == x for x in range(m.n) if m.le(x, e)
    )
    witness = None
    for y in range(m.n):
        if int(m.mul[e, y]) != int(m.meet[e, y]):
            witness = y
            break
    assert cond1 == (witness is None), "local unit characterizations disagree"
    return witness


def is_representable(m: FiniteMTL) -> tuple[bool, tuple[int, int] | None]:
    """Every nonzero idempotent must be a local unit; returns a witness
    pair (e, y) when one is not."""
    for e in m.idempotents():
        if e == m.bot and m.n > 1:
            continue
        w = local_unit_witness(m, e)
        if w is not None:
            return False, (e, w)
    return True, None


# ---------------------------------------------------------------- round trips


def counit(m: FiniteMTL, registry: SkeletonRegistry | None = None,
           decomposition: GDecomposition | None = None,
           product: ForestProduct | None = None) -> AlgMorphism:
    """The evaluation isomorphism M -> H(G(M)) for representable M.

    Each element induces one cut section per maximal branch of the
    join-irreducible forest; the family matches on overlaps and its
    amalgamation is the image section.
    """
    ok, witness = is_representable(m)
    if not ok:
        raise NotRepresentable(*witness)
    dm = decomposition if decomposition is not None else g_decomposition(m, registry)
    l = dm.labeled
    ph = ForestPresheaf(l)
    if product is not None:
        ph.seed(l.forest.full, product)
    full_product = ph.at(l.forest.full)

    max_nodes = l.forest.maximal_elements()
    cover = tuple(l.forest.principal_downset(t) for t in max_nodes)
    branches = {}
    for mask in cover:
        # ↓t is a chain; order its nodes by the algebra order of idempotents
        branch = list(_bits(mask))
        branch.sort(key=lambda c: sum(
            1 for d in _bits(mask) if m.le(dm.nodes[d], dm.nodes[c])))
        branches[mask] = branch

    mapping = []
    for x in range(m.n):
        sections = []
        for t, mask in zip(max_nodes, cover):
            branch = branches[mask]
            z = int(m.meet[x, dm.nodes[t]])
            cut = None
            for c in branch:
                nd = dm.node_data[c]
                if m.le(nd.a_e, z) and m.le(z, nd.e):
                    cut = c
                    break
            assert cut is not None, "element does not fall into any branch interval"
            pos = {c: k for k, c in enumerate(branch)}
            vals = []
            for c in sorted(branch):  # section tuples are indexed by sorted node order
                nd = dm.node_data[c]
                if pos[c] < pos[cut]:
                    vals.append(nd.label.top)
                elif c == cut:
                    vals.append(nd.to_label[z])
                else:
                    vals.append(nd.label.bot)
            sections.append(tuple(vals))
        family = MatchingFamily(ph, cover, tuple(sections))
        glued = amalgamate(family)
        mapping.append(full_product.section_index(glued))

    out = check_morphism(mapping, m, full_product.algebra)
    assert out.is_isomorphism(), "counit must be an isomorphism"
    return out


def unit(l: LabeledForest, registry: SkeletonRegistry | None = None,
         product: ForestProduct | None = None) -> LabeledForestMorphism:
    """The comparison isomorphism l -> G(H(l)).

    Nodes go to the characteristic sections of their principal downsets;
    the label maps evaluate class representatives at the node.
    """
    p = product if product is not None else forest_product(l)
    dp = g_decomposition(p.algebra, registry)

    base_map = []
    for i in range(l.n):
        h_i = p.section_index(characteristic_section(l, l.forest.principal_downset(i)))
        assert h_i in dp.nodes, "characteristic section must be join irreducible"
        base_map.append(dp.node_of(h_i))
    base = PMorphismMap(l.forest, dp.labeled.forest, tuple(base_map))

    family = []
    for i in range(l.n):
        nd = dp.node_data[base_map[i]]
        mapping = []
        for c in range(nd.label.n):
            values = {
                p.sections[x][i]
                for x in nd.upset
                if nd.to_label[x] == c
            }
            assert len(values) == 1, "evaluation not constant on quotient class"
            mapping.append(values.pop())
        fi = check_morphism(mapping, nd.label, l.label(i))
        family.append(fi)

    mor = LabeledForestMorphism(l, dp.labeled, base, tuple(family))
    assert mor.is_isomorphism(), "unit must be an isomorphism"
    return mor
