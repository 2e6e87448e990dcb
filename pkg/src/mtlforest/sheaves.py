"""The presheaf of forest products on the Alexandrov topology of downsets.

Sections over a downset S are the admissible sections of the labeled
forest restricted to S.  Restriction drops coordinates; matching families
over a cover paste to a unique global section, making the presheaf a
sheaf whose stalks are chains.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebras import FiniteMTL
from .constructions import ForestProduct, LabeledForest, forest_product, ordinal_sum
from .errors import NotMatching, NotNested
from .morphisms import AlgMorphism, check_morphism, find_isomorphism
from .posets import _bits, downsets


class ForestPresheaf:
    """downset -> forest product, with coordinate-dropping restrictions.

    Products are cached per downset bitmask; the base labeled forest is
    immutable, so the cache never invalidates.
    """

    def __init__(self, labeled: LabeledForest):
        self.labeled = labeled
        self.forest = labeled.forest
        self._cache: dict[int, ForestProduct] = {}
        self._node_lists: dict[int, list[int]] = {}

    def nodes_of(self, mask: int) -> list[int]:
        if mask not in self._node_lists:
            self._node_lists[mask] = list(_bits(mask))
        return self._node_lists[mask]

    def opens(self) -> list[int]:
        return downsets(self.forest)

    def at(self, mask: int) -> ForestProduct:
        """The forest product over the downset given as a bitmask."""
        if mask not in self._cache:
            self.forest.check_downset(mask)
            sub, _ = self.labeled.restrict(self.nodes_of(mask))
            self._cache[mask] = forest_product(sub)
        return self._cache[mask]

    def seed(self, mask: int, product: ForestProduct) -> None:
        """Install an already-built product for a downset."""
        self._cache[mask] = product

    def restrict_section(self, t_mask: int, values: tuple[int, ...], s_mask: int) -> tuple[int, ...]:
        """Drop the coordinates of a section over T outside S ⊆ T."""
        if s_mask & ~t_mask:
            raise NotNested(f"{s_mask:b} is not contained in {t_mask:b}")
        t_nodes = self.nodes_of(t_mask)
        return tuple(v for node, v in zip(t_nodes, values) if s_mask >> node & 1)

    def restrict_index(self, t_mask: int, idx: int, s_mask: int) -> int:
        pt = self.at(t_mask)
        ps = self.at(s_mask)
        return ps.section_index(self.restrict_section(t_mask, pt.sections[idx], s_mask))

    def restriction_morphism(self, t_mask: int, s_mask: int) -> AlgMorphism:
        """P(T) -> P(S) as a validated algebra morphism."""
        pt = self.at(t_mask)
        ps = self.at(s_mask)
        mapping = [
            ps.section_index(self.restrict_section(t_mask, vals, s_mask))
            for vals in pt.sections
        ]
        return check_morphism(mapping, pt.algebra, ps.algebra)


@dataclass(frozen=True)
class MatchingFamily:
    """Sections over a cover of downsets, expected to agree on overlaps."""

    presheaf: ForestPresheaf
    cover: tuple[int, ...]                # downset bitmasks
    sections: tuple[tuple[int, ...], ...]  # value tuples, one per cover member

    @property
    def union(self) -> int:
        out = 0
        for m in self.cover:
            out |= m
        return out

    def check(self) -> None:
        ph = self.presheaf
        for a in range(len(self.cover)):
            for b in range(a + 1, len(self.cover)):
                overlap = self.cover[a] & self.cover[b]
                ra = ph.restrict_section(self.cover[a], self.sections[a], overlap)
                rb = ph.restrict_section(self.cover[b], self.sections[b], overlap)
                if ra != rb:
                    nodes = ph.nodes_of(overlap)
                    for node, (va, vb) in zip(nodes, zip(ra, rb)):
                        if va != vb:
                            raise NotMatching(a, b, node)


def amalgamate(family: MatchingFamily, oracle: bool = False) -> tuple[int, ...]:
    """The unique section over the union restricting to every member.

    With oracle=True, uniqueness is established by scanning every section
    over the union instead of trusting the paste.
    """
    family.check()
    ph = family.presheaf
    union = family.union
    union_nodes = ph.nodes_of(union)
    values: dict[int, int] = {}
    for mask, vals in zip(family.cover, family.sections):
        for node, v in zip(ph.nodes_of(mask), vals):
            values[node] = v
    glued = tuple(values[node] for node in union_nodes)
    pu = ph.at(union)
    assert glued in pu.index, "pasted section is not admissible"
    if oracle:
        hits = [
            vals for vals in pu.sections
            if all(
                ph.restrict_section(union, vals, m) == s
                for m, s in zip(family.cover, family.sections)
            )
        ]
        assert hits == [glued], f"amalgamation not unique: {len(hits)} candidates"
    return glued


def stalk(presheaf: ForestPresheaf, node: int) -> tuple[FiniteMTL, FiniteMTL]:
    """The fiber at a node: sections over its principal downset.

    Returns (stalk algebra, ordinal sum of the labels along the downset);
    the two are checked isomorphic, and the stalk is checked to be a chain.
    """
    l = presheaf.labeled
    mask = l.forest.principal_downset(node)
    alg = presheaf.at(mask).algebra
    chain = ordinal_sum([l.labels[i] for i in _bits(mask)])
    assert alg.is_chain(), "stalks must be chains"
    assert find_isomorphism(alg, chain) is not None, "stalk is not the ordinal sum"
    return alg, chain


def enumerate_covers(presheaf: ForestPresheaf, t_mask: int, max_arity: int = 3) -> list[tuple[int, ...]]:
    """Antichains of at most max_arity downsets of T whose union is T.

    Members are proper nonempty subsets; the trivial cover {T} is included
    first.  Deterministic order: by arity, then bitmask tuples.
    """
    f = presheaf.forest
    subs = [d for d in downsets(f) if (d & ~t_mask) == 0]
    proper = [d for d in subs if d != t_mask and d != 0]
    covers: list[tuple[int, ...]] = [(t_mask,)]
    if max_arity >= 2:
        for i, a in enumerate(proper):
            for b in proper[i + 1:]:
                if (a | b) == t_mask and not _contained(a, b) and not _contained(b, a):
                    covers.append((a, b))
    if max_arity >= 3:
        for i, a in enumerate(proper):
            for j, b in enumerate(proper[i + 1:], start=i + 1):
                if _contained(a, b) or _contained(b, a):
                    continue
                for c in proper[j + 1:]:
                    if (a | b | c) != t_mask:
                        continue
                    if _contained(a, c) or _contained(c, a):
                        continue
                    if _contained(b, c) or _contained(c, b):
                        continue
                    covers.append((a, b, c))
    return covers


def _contained(a: int, b: int) -> bool:
    return (a & ~b) == 0


def verify_cover(presheaf: ForestPresheaf, cover: tuple[int, ...]) -> int:
    """Exhaustive sheaf-condition oracle for one cover.

    Every section over the union is profiled by its member restrictions;
    profiles must be pairwise distinct (uniqueness of amalgamations) and
    must biject with the matching families (existence).  Returns the
    number of matching families checked.
    """
    ph = presheaf
    union = 0
    for m in cover:
        union |= m
    pu = ph.at(union)
    profiles: dict[tuple, tuple] = {}
    for vals in pu.sections:
        key = tuple(ph.restrict_section(union, vals, m) for m in cover)
        assert key not in profiles, "two sections share all restrictions"
        profiles[key] = vals
    families = enumerate_matching_families(ph, cover)
    for fam in families:
        assert fam.sections in profiles, "matching family without amalgamation"
        assert amalgamate(fam) == profiles[fam.sections]
    assert len(families) == len(profiles), "family/section counts disagree"
    return len(families)


def enumerate_matching_families(presheaf: ForestPresheaf, cover: tuple[int, ...]):
    """All matching families over the cover.

    Grown member by member: candidate sections of the next member are
    bucketed by their restriction to the overlap with the part already
    glued, so the cost is proportional to the families produced.
    """
    ph = presheaf
    # partial entry: (glued values over union-so-far, per-member tuples)
    partial = [((), ())]
    union = 0
    for mask in cover:
        pm = ph.at(mask)
        overlap = union & mask
        buckets: dict[tuple, list] = {}
        for vals in pm.sections:
            buckets.setdefault(
                ph.restrict_section(mask, vals, overlap), []
            ).append(vals)
        new_union = union | mask
        union_nodes = ph.nodes_of(union)
        nxt = []
        for glued, fam in partial:
            key = tuple(
                v for node, v in zip(union_nodes, glued) if overlap >> node & 1
            )
            for vals in buckets.get(key, []):
                merged = dict(zip(union_nodes, glued))
                merged.update(zip(ph.nodes_of(mask), vals))
                new_glued = tuple(merged[n] for n in ph.nodes_of(new_union))
                nxt.append((new_glued, fam + (vals,)))
        partial = nxt
        union = new_union
    return [
        MatchingFamily(ph, tuple(cover), fam) for _, fam in partial
    ]
