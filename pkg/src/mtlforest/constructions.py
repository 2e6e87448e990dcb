"""Construction kits: ordinal sums, direct products and forest products.

Forest product elements are the admissible sections of a labeled forest:
a section may be nonzero at a node only if it is identically 1 strictly
below it.  Sections are enumerated by their downset of ones, which hits
every admissible section exactly once.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

import numpy as np

from . import config
from .algebras import (
    FiniteMTL,
    is_archimedean,
    lukasiewicz_chain,
    parse_mtl,
    validate_mtl,
)
from .errors import CapExceeded, EmptyFamily, ParseError
from .posets import Forest, _bits, _popcount, downsets, parse_forest, write_forest


def ordinal_sum(parts: list[FiniteMTL]) -> FiniteMTL:
    """Stack the parts along their index order, identifying all tops.

    Universe size is sum(|part| - 1) + 1; the bottom is the first part's
    bottom.  Trivial parts contribute nothing and are skipped.
    """
    if not parts:
        raise EmptyFamily("ordinal sum of no parts")
    parts = [p for p in parts if p.n > 1]
    if not parts:
        from .algebras import trivial_algebra

        return trivial_algebra()
    if len(parts) == 1:
        return parts[0]

    # global ids: each part's non-top elements in part order, shared top last
    offsets = []
    total = 0
    for p in parts:
        offsets.append(total)
        total += p.n - 1
    top = total
    n = total + 1

    to_global = []  # per part: element -> global id
    for p, off in zip(parts, offsets):
        ranks: dict[int, int] = {}
        r = 0
        for e in range(p.n):
            if e != p.top:
                ranks[e] = off + r
                r += 1
        ranks[p.top] = top
        to_global.append(ranks)

    where = [None] * n  # global id (non-top) -> (part index, local element)
    for pi, (p, ranks) in enumerate(zip(parts, to_global)):
        for e, g in ranks.items():
            if g != top:
                where[g] = (pi, e)

    mul = np.zeros((n, n), dtype=np.int16)
    imp = np.zeros((n, n), dtype=np.int16)
    meet = np.zeros((n, n), dtype=np.int16)
    join = np.zeros((n, n), dtype=np.int16)

    for x in range(n):
        for y in range(n):
            if x == top:
                mul[x, y] = y
                imp[x, y] = y
                meet[x, y] = y
                join[x, y] = top
                continue
            if y == top:
                mul[x, y] = x
                imp[x, y] = top
                meet[x, y] = x
                join[x, y] = top
                continue
            pi, e = where[x]
            pj, f = where[y]
            if pi == pj:
                p = parts[pi]
                g = to_global[pi]
                mul[x, y] = g[int(p.mul[e, f])]
                imp[x, y] = g[int(p.imp[e, f])]
                meet[x, y] = g[int(p.meet[e, f])]
                join[x, y] = g[int(p.join[e, f])]
            elif pi < pj:
                mul[x, y] = x
                imp[x, y] = top
                meet[x, y] = x
                join[x, y] = y
            else:
                mul[x, y] = y
                imp[x, y] = y
                meet[x, y] = y
                join[x, y] = x

    bot = to_global[0][parts[0].bot]
    return validate_mtl(
        {"n": n, "bot": bot, "top": top, "mul": mul, "imp": imp,
         "meet": meet, "join": join}
    )


def direct_product(parts: list[FiniteMTL], cap: int | None = None) -> FiniteMTL:
    """Componentwise algebra on tuples, lexicographic element order."""
    if not parts:
        raise EmptyFamily("direct product of no parts")
    if len(parts) == 1:
        return parts[0]
    size = 1
    for p in parts:
        size *= p.n
    if size > config.element_cap(cap):
        raise CapExceeded(f"product would have {size} elements")
    tuples = list(itertools.product(*(range(p.n) for p in parts)))
    index = {t: i for i, t in enumerate(tuples)}
    n = len(tuples)

    def build(op_name):
        out = np.zeros((n, n), dtype=np.int16)
        tabs = [getattr(p, op_name) for p in parts]
        for a, x in enumerate(tuples):
            for b, y in enumerate(tuples):
                out[a, b] = index[tuple(int(t[u, v]) for t, u, v in zip(tabs, x, y))]
        return out

    bot = index[tuple(p.bot for p in parts)]
    top = index[tuple(p.top for p in parts)]
    return validate_mtl(
        {"n": n, "bot": bot, "top": top, "mul": build("mul"),
         "imp": build("imp"), "meet": build("meet"), "join": build("join")}
    )


# ---------------------------------------------------------------- labeled forests


class LabeledForest:
    """A forest together with a nontrivial archimedean MTL-chain per node.

    Labels live on disjoint index spaces; the shared unit of the family is
    realized structurally (constructions identify the tops), never by set
    intersection.
    """

    def __init__(self, forest: Forest, labels: tuple[FiniteMTL, ...] | list[FiniteMTL]):
        if len(labels) != forest.n:
            raise ValueError("one label per node required")
        for i, lab in enumerate(labels):
            if lab.n < 2:
                raise ValueError(f"label at node {i} is trivial")
            if not is_archimedean(lab):
                raise ValueError(f"label at node {i} is not archimedean")
        self.forest = forest
        self.labels = tuple(labels)

    @property
    def n(self) -> int:
        return self.forest.n

    def label(self, i: int) -> FiniteMTL:
        return self.labels[i]

    def restrict(self, nodes: list[int]) -> tuple["LabeledForest", dict[int, int]]:
        sub, index = self.forest.induced(nodes)
        return (
            LabeledForest(Forest(sub.n, sub.up, sub.names),
                          tuple(self.labels[i] for i in nodes)),
            index,
        )

    def key(self) -> tuple:
        return (self.forest.key(), tuple(l.key() for l in self.labels))

    def __eq__(self, other):
        return isinstance(other, LabeledForest) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        sizes = ",".join(str(l.n) for l in self.labels)
        return f"LabeledForest(nodes={self.n}, labels=[{sizes}])"


@dataclass(frozen=True)
class ForestElement:
    """A section of a labeled forest: one label element per node."""

    parent: LabeledForest
    values: tuple[int, ...]

    def ones_mask(self) -> int:
        lf = self.parent
        return sum(1 << i for i in range(lf.n) if self.values[i] == lf.labels[i].top)

    def zeros_mask(self) -> int:
        lf = self.parent
        return sum(1 << i for i in range(lf.n) if self.values[i] == lf.labels[i].bot)

    def support_antichain(self) -> tuple[int, ...]:
        """C_h: nodes where the value is strictly between 0 and 1."""
        lf = self.parent
        return tuple(
            i for i in range(lf.n)
            if self.values[i] != lf.labels[i].bot and self.values[i] != lf.labels[i].top
        )

    # the four equivalent admissibility conditions, kept separate on purpose

    def cond_nonzero_forces_ones_below(self) -> bool:
        lf = self.parent
        f = lf.forest
        for i in range(lf.n):
            if self.values[i] != lf.labels[i].bot:
                for j in _bits(f.down[i] & ~(1 << i)):
                    if self.values[j] != lf.labels[j].top:
                        return False
        return True

    def cond_pairwise(self) -> bool:
        lf = self.parent
        f = lf.forest
        for i in range(lf.n):
            for j in range(lf.n):
                if f.lt(i, j):
                    if self.values[j] != lf.labels[j].bot and self.values[i] != lf.labels[i].top:
                        return False
        return True

    def cond_nontop_forces_zero_above(self) -> bool:
        lf = self.parent
        f = lf.forest
        for i in range(lf.n):
            if self.values[i] != lf.labels[i].top:
                for j in _bits(f.up[i] & ~(1 << i)):
                    if self.values[j] != lf.labels[j].bot:
                        return False
        return True

    def cond_regions(self) -> bool:
        lf = self.parent
        f = lf.forest
        if not f.is_downset(self.ones_mask()):
            return False
        for i in _bits(self.zeros_mask()):  # zero region must be an upset
            for j in _bits(f.up[i] & ~(1 << i)):
                if self.values[j] != lf.labels[j].bot:
                    return False
        ca = self.support_antichain()
        for a in ca:
            for b in ca:
                if a != b and f.comparable(a, b):
                    return False
        return True

    def is_admissible(self) -> bool:
        return self.cond_nonzero_forces_ones_below()


@dataclass(frozen=True)
class ElementRegions:
    ones: tuple[int, ...]       # h^{-1}(1), a downset
    antichain: tuple[int, ...]  # C_h
    zeros: tuple[int, ...]      # nodes with value 0


def classify_element(h: ForestElement) -> ElementRegions:
    """Split a section into its three regions and cross-check the four
    equivalent admissibility conditions."""
    conds = (
        h.cond_nonzero_forces_ones_below(),
        h.cond_pairwise(),
        h.cond_nontop_forces_zero_above(),
        h.cond_regions(),
    )
    assert len(set(conds)) == 1, f"equivalent admissibility forms disagree: {conds}"
    if not conds[0]:
        raise ValueError("section is not admissible")
    return ElementRegions(
        tuple(_bits(h.ones_mask())),
        h.support_antichain(),
        tuple(_bits(h.zeros_mask())),
    )


# ---------------------------------------------------------------- forest product


class ForestProduct:
    """The forest product algebra plus the section <-> index dictionary."""

    def __init__(self, labeled: LabeledForest, algebra: FiniteMTL,
                 sections: list[tuple[int, ...]]):
        self.labeled = labeled
        self.algebra = algebra
        self.sections = sections
        self.index = {s: i for i, s in enumerate(sections)}

    def element(self, i: int) -> ForestElement:
        return ForestElement(self.labeled, self.sections[i])

    def section_index(self, values) -> int:
        return self.index[tuple(values)]


def forest_product_size(l: LabeledForest) -> int:
    """Number of admissible sections, computed without materializing them."""
    f = l.forest
    total = 0
    for d in downsets(f):
        rest = f.full & ~d
        count = 1
        for i in _bits(rest):
            if (f.down[i] & ~(1 << i) & ~d) == 0:  # minimal in the complement
                count *= l.labels[i].n - 1
        total += count
    return total


def enumerate_sections(l: LabeledForest) -> list[tuple[int, ...]]:
    """All admissible sections, ordered by (|ones|, ones bitmask, values)."""
    f = l.forest
    n = f.n
    out = []
    for d in downsets(f):
        rest = f.full & ~d
        free = [i for i in _bits(rest) if (f.down[i] & ~(1 << i) & ~d) == 0]
        base = [0] * n
        for i in _bits(d):
            base[i] = l.labels[i].top
        for i in _bits(rest):
            base[i] = l.labels[i].bot
        choices = [
            [v for v in range(l.labels[i].n) if v != l.labels[i].top] for i in free
        ]
        for combo in itertools.product(*choices):
            vals = base[:]
            for node, v in zip(free, combo):
                vals[node] = v
            out.append((_popcount(d), d, tuple(vals)))
    out.sort()
    return [vals for _, _, vals in out]


def forest_product(l: LabeledForest, cap: int | None = None) -> ForestProduct:
    """Build the forest product algebra of a labeled forest.

    Monoid and lattice operations are pointwise; the residual is pointwise
    where the antecedent is below the consequent strictly under the node,
    and 0 there otherwise.
    """
    size = forest_product_size(l)
    if size > config.element_cap(cap):
        raise CapExceeded(f"forest product would have {size} elements")
    if l.n == 0:  # empty forest: the one empty section
        trivial = validate_mtl(
            {"n": 1, "bot": 0, "top": 0, "mul": [[0]], "imp": [[0]],
             "meet": [[0]], "join": [[0]]}
        )
        return ForestProduct(l, trivial, [()])
    sections = enumerate_sections(l)
    n = len(sections)
    nodes = l.n
    f = l.forest
    vals = np.array(sections, dtype=np.int16).reshape(n, nodes)

    # mixed-radix codes let every table lookup go through searchsorted
    strides = np.ones(nodes, dtype=np.int64)
    for i in range(nodes - 2, -1, -1):
        strides[i] = strides[i + 1] * l.labels[i + 1].n
    codes = vals.astype(np.int64) @ strides
    order = np.argsort(codes).astype(np.int32)
    sorted_codes = codes[order]

    def lookup(stacked: np.ndarray) -> np.ndarray:
        flat = stacked.reshape(-1, nodes).astype(np.int64) @ strides
        pos = np.searchsorted(sorted_codes, flat)
        pos = np.clip(pos, 0, n - 1)
        assert (sorted_codes[pos] == flat).all(), "operation left the section space"
        return order[pos].reshape(stacked.shape[:-1]).astype(np.int16)

    def pointwise(op_name: str) -> np.ndarray:
        res = np.empty((n, n, nodes), dtype=np.int16)
        for i in range(nodes):
            tab = getattr(l.labels[i], op_name)
            col = vals[:, i]
            res[:, :, i] = tab[col[:, None], col[None, :]]
        return lookup(res)

    mul = pointwise("mul")
    meet = pointwise("meet")
    join = pointwise("join")

    # residual: prefix condition over the strict downset of each node
    res = np.empty((n, n, nodes), dtype=np.int16)
    le_cache = []
    for i in range(nodes):
        col = vals[:, i]
        le_cache.append(l.labels[i].leq[col[:, None], col[None, :]])
    for i in range(nodes):
        cond = np.ones((n, n), dtype=bool)
        for j in _bits(f.down[i] & ~(1 << i)):
            cond &= le_cache[j]
        tab = l.labels[i].imp
        col = vals[:, i]
        res[:, :, i] = np.where(cond, tab[col[:, None], col[None, :]], l.labels[i].bot)
    imp = lookup(res)

    bot_vals = np.array([[lab.bot for lab in l.labels]], dtype=np.int16)
    top_vals = np.array([[lab.top for lab in l.labels]], dtype=np.int16)
    algebra = validate_mtl(
        {
            "n": n,
            "bot": int(lookup(bot_vals)[0]),
            "top": int(lookup(top_vals)[0]),
            "mul": mul,
            "imp": imp,
            "meet": meet,
            "join": join,
        }
    )
    return ForestProduct(l, algebra, sections)


def characteristic_section(l: LabeledForest, mask: int) -> tuple[int, ...]:
    """The idempotent section with value 1 on the downset and 0 elsewhere."""
    l.forest.check_downset(mask)
    return tuple(
        l.labels[i].top if mask >> i & 1 else l.labels[i].bot for i in range(l.n)
    )


@dataclass(frozen=True)
class DownsetFilterResult:
    filter: "Filter"
    complement_nodes: tuple[int, ...]
    complement: ForestProduct
    phi: tuple[int, ...]  # complement section index -> index in the parent product


def downset_filter(product: ForestProduct, mask: int) -> DownsetFilterResult:
    """X_S = sections identically 1 on the downset S, as a filter, plus the
    semihoop isomorphism onto the forest product over the complement."""
    from .algebras import Filter

    l = product.labeled
    f = l.forest
    f.check_downset(mask)
    alg = product.algebra

    members = set()
    for idx, vals in enumerate(product.sections):
        if all(vals[i] == l.labels[i].top for i in _bits(mask)):
            members.add(idx)

    # cross-check: membership is determined on Max(S) alone
    maxima = [i for i in _bits(mask) if (f.up[i] & mask & ~(1 << i)) == 0]
    alt = {
        idx for idx, vals in enumerate(product.sections)
        if all(vals[i] == l.labels[i].top for i in maxima)
    }
    assert alt == members, "Max(S) characterization failed"

    gen = product.section_index(characteristic_section(l, mask))
    assert int(alg.mul[gen, gen]) == gen
    assert set(alg.upset(gen)) == members, "X_S is not the upset of its generator"
    filt = Filter(alg, gen, frozenset(members))

    comp_nodes = [i for i in range(l.n) if not mask >> i & 1]
    sub, sub_index = l.restrict(comp_nodes)
    comp = forest_product(sub)
    phi = []
    for svals in comp.sections:
        full = [0] * l.n
        for i in _bits(mask):
            full[i] = l.labels[i].top
        for i in comp_nodes:
            full[i] = svals[sub_index[i]]
        phi.append(product.section_index(tuple(full)))
    phi_t = tuple(phi)
    assert len(set(phi_t)) == len(phi_t) and set(phi_t) == members

    # semihoop iso: preserves product, lattice ops and the residual
    pa = np.array(phi_t, dtype=np.int16)
    for op in ("mul", "meet", "join", "imp"):
        ta = getattr(comp.algebra, op)
        tb = getattr(alg, op)
        ok = pa[ta] == tb[pa[:, None], pa[None, :]]
        assert ok.all(), (op, np.argwhere(~ok)[0])

    return DownsetFilterResult(filt, tuple(comp_nodes), comp, phi_t)


# ---------------------------------------------------------------- text format


def builtin_label(spec: str) -> FiniteMTL | None:
    if spec.startswith("L"):
        try:
            k = int(spec[1:])
        except ValueError:
            return None
        if k >= 2:
            return lukasiewicz_chain(k)
    return None


def parse_lforest(text: str, base_dir: str | None = None) -> LabeledForest:
    """Parse the .lforest format: a .forest block plus label lines."""
    forest_lines = []
    label_specs: dict[int, str] = {}
    names_to_index: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("label"):
            body = line[len("label"):].strip()
            if "=" not in body:
                raise ParseError(lineno, "label line needs '='")
            node_part, spec = (s.strip() for s in body.split("=", 1))
            label_specs[lineno] = f"{node_part}\x00{spec}"
        else:
            forest_lines.append(raw)
    forest = parse_forest("\n".join(forest_lines))
    for i, name in enumerate(forest.names):
        names_to_index[name] = i
    labels: list[FiniteMTL | None] = [None] * forest.n
    for lineno, packed in label_specs.items():
        node_part, spec = packed.split("\x00")
        if node_part.isdigit():
            node = int(node_part)
        elif node_part in names_to_index:
            node = names_to_index[node_part]
        else:
            raise ParseError(lineno, f"unknown node {node_part!r}")
        if not 0 <= node < forest.n:
            raise ParseError(lineno, f"node {node} out of range")
        chain = builtin_label(spec)
        if chain is None and spec.startswith("@"):
            path = spec[1:]
            if base_dir is not None and not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            with open(path, encoding="utf-8") as fh:
                chain = parse_mtl(fh.read())
        if chain is None:
            raise ParseError(lineno, f"bad label spec {spec!r}")
        if not chain.is_chain() or chain.n < 2 or not is_archimedean(chain):
            raise ParseError(lineno, f"label {spec!r} is not a nontrivial archimedean chain")
        labels[node] = chain
    missing = [i for i, lab in enumerate(labels) if lab is None]
    if missing:
        raise ParseError(1, f"nodes without labels: {missing}")
    return LabeledForest(forest, tuple(labels))


def write_lforest(l: LabeledForest, label_files: dict[int, str] | None = None) -> str:
    """Writer for .lforest; labels isomorphic to some Łk are written as Lk,
    custom chains need a label_files entry mapping node -> .mtl path."""
    out = write_forest(l.forest).rstrip("\n").splitlines()
    for i, lab in enumerate(l.labels):
        luk = lukasiewicz_chain(lab.n)
        if lab == luk:
            out.append(f"label {i} = L{lab.n}")
        elif label_files and i in label_files:
            out.append(f"label {i} = @{label_files[i]}")
        else:
            raise ValueError(f"node {i} has a non-Łukasiewicz label; pass label_files")
    return "\n".join(out) + "\n"
