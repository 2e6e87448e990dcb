"""Finite posets, forests and trees.

Elements are integers 0..n-1.  The order relation is stored reflexively and
transitively closed, one bitmask row per element, so all queries are O(1)
bit tests.  Downsets double as the opens of the Alexandrov topology.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import config
from .errors import (
    CapExceeded,
    MalformedTerm,
    NotAForest,
    NotADownset,
    NotAntisymmetric,
    NotReflexive,
    NotTransitive,
    ParseError,
)


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class Poset:
    """Finite partial order.

    up[i] is the bitmask of {j : i <= j}; down[i] the bitmask of {j : j <= i}.
    Instances are immutable after construction.
    """

    def __init__(self, n: int, up: tuple[int, ...], names: tuple[str, ...] | None = None):
        self.n = n
        self.up = up
        self.down = tuple(
            sum(1 << i for i in range(n) if up[i] >> j & 1) for j in range(n)
        )
        self.names = names if names is not None else tuple(str(i) for i in range(n))
        self.full = (1 << n) - 1

    def le(self, i: int, j: int) -> bool:
        return bool(self.up[i] >> j & 1)

    def lt(self, i: int, j: int) -> bool:
        return i != j and self.le(i, j)

    def comparable(self, i: int, j: int) -> bool:
        return self.le(i, j) or self.le(j, i)

    def covers_of(self, i: int) -> list[int]:
        """Elements j with i < j and nothing strictly between."""
        out = []
        for j in _bits(self.up[i] & ~(1 << i)):
            between = self.up[i] & self.down[j] & ~(1 << i) & ~(1 << j)
            if between == 0:
                out.append(j)
        return out

    def minimal_elements(self) -> list[int]:
        return [i for i in range(self.n) if self.down[i] == 1 << i]

    def maximal_elements(self) -> list[int]:
        return [i for i in range(self.n) if self.up[i] == 1 << i]

    def is_downset(self, mask: int) -> bool:
        return all((self.down[i] & ~mask) == 0 for i in _bits(mask))

    def check_downset(self, mask: int) -> None:
        for j in _bits(mask):
            missing = self.down[j] & ~mask
            if missing:
                raise NotADownset(next(_bits(missing)), j)

    def principal_downset(self, i: int) -> int:
        return self.down[i]

    def opposite(self) -> "Poset":
        return Poset(self.n, self.down, self.names)

    def induced(self, nodes: list[int]) -> tuple["Poset", dict[int, int]]:
        """Subposet on the given nodes (kept in the given order)."""
        index = {v: k for k, v in enumerate(nodes)}
        up = tuple(
            sum(1 << index[j] for j in nodes if self.le(i, j)) for i in nodes
        )
        names = tuple(self.names[i] for i in nodes)
        return Poset(len(nodes), up, names), index

    def edges(self) -> list[tuple[int, int]]:
        """Covering pairs (i, j) with i < j, in index order."""
        return [(i, j) for i in range(self.n) for j in self.covers_of(i)]

    def key(self) -> tuple:
        return (self.n, self.up)

    def __eq__(self, other):
        return isinstance(other, Poset) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, edges={self.edges()})"


def validate_poset(relation, names=None) -> Poset:
    """Check a square boolean matrix for the poset axioms.

    Raises NotReflexive / NotAntisymmetric / NotTransitive with the first
    offending witness (row-major scan order).
    """
    n = len(relation)
    rows = [list(row) for row in relation]
    if any(len(row) != n for row in rows):
        raise ValueError("relation must be a square matrix")
    for i in range(n):
        if not rows[i][i]:
            raise NotReflexive(i)
    for i in range(n):
        for j in range(n):
            if i != j and rows[i][j] and rows[j][i]:
                raise NotAntisymmetric(i, j)
    for i in range(n):
        for j in range(n):
            if not rows[i][j]:
                continue
            for k in range(n):
                if rows[j][k] and not rows[i][k]:
                    raise NotTransitive(i, j, k)
    up = tuple(sum(1 << j for j in range(n) if rows[i][j]) for i in range(n))
    return Poset(n, up, names)


def poset_from_covers(n: int, edges, names=None) -> Poset:
    """Build a poset from covering pairs; the closure is computed here."""
    rows = [[i == j for j in range(n)] for i in range(n)]
    for i, j in edges:
        rows[i][j] = True
    changed = True
    while changed:  # O(n^3) Warshall passes, trivial at these sizes
        changed = False
        for i in range(n):
            for j in range(n):
                if rows[i][j]:
                    for k in range(n):
                        if rows[j][k] and not rows[i][k]:
                            rows[i][k] = True
                            changed = True
    return validate_poset(rows, names)


class Forest(Poset):
    """Poset in which every principal downset is a chain."""

    def __init__(self, n, up, names=None):
        super().__init__(n, up, names)
        for a in range(n):
            below = list(_bits(self.down[a]))
            for x in below:
                for y in below:
                    if x < y and not self.comparable(x, y):
                        raise NotAForest(a, x, y)
        self._components = None

    @property
    def components(self) -> list[list[int]]:
        """Partition into connected components, each sorted by index."""
        if self._components is None:
            seen = [False] * self.n
            parts = []
            for start in range(self.n):
                if seen[start]:
                    continue
                todo = [start]
                part = set()
                while todo:
                    v = todo.pop()
                    if v in part:
                        continue
                    part.add(v)
                    seen[v] = True
                    for w in _bits(self.up[v] | self.down[v]):
                        if w not in part:
                            todo.append(w)
                parts.append(sorted(part))
            parts.sort(key=lambda p: p[0])
            self._components = parts
        return self._components


class Tree(Forest):
    """Forest with a least element (the root)."""

    def __init__(self, n, up, names=None):
        super().__init__(n, up, names)
        mins = self.minimal_elements()
        if len(mins) != 1:
            raise ValueError(f"tree needs a unique least element, minima = {mins}")
        self.root = mins[0]


def is_forest(p: Poset) -> bool:
    """True iff every principal downset is totally ordered."""
    for a in range(p.n):
        below = list(_bits(p.down[a]))
        for x in below:
            for y in below:
                if x < y and not p.comparable(x, y):
                    return False
    return True


def is_tree(p: Poset) -> bool:
    return is_forest(p) and len(p.minimal_elements()) == 1


def as_forest(p: Poset) -> Forest:
    return Forest(p.n, p.up, p.names)


def component_trees(f: Forest) -> list[tuple[Tree, dict[int, int]]]:
    """Split a forest into its trees; each comes with the node reindexing."""
    out = []
    for nodes in f.components:
        sub, index = f.induced(nodes)
        out.append((Tree(sub.n, sub.up, sub.names), index))
    return out


def downsets(f: Poset, cap: int | None = None) -> list[int]:
    """All downward closed subsets as bitmasks.

    Ordered by (size, bitmask value); contains 0 (empty) and the full set.
    """
    n = f.n
    if n > config.node_cap(cap):
        raise CapExceeded(f"{n} nodes exceeds downset cap {config.node_cap(cap)}")
    closed = [0]
    for mask in range(1, 1 << n):
        # mask is a downset iff removing any maximal member leaves one; scan directly
        ok = True
        for i in _bits(mask):
            if f.down[i] & ~mask:
                ok = False
                break
        if ok:
            closed.append(mask)
    closed.sort(key=lambda m: (_popcount(m), m))
    return closed


@dataclass(frozen=True)
class PMorphismMap:
    """A candidate map of posets, stored with its endpoints."""

    source: Poset
    target: Poset
    mapping: tuple[int, ...]

    def __post_init__(self):
        if len(self.mapping) != self.source.n:
            raise ValueError("map must be total on the source")

    def __call__(self, i: int) -> int:
        return self.mapping[i]


def is_p_morphism(m: PMorphismMap) -> bool:
    """Monotone, and every y <= f(x) lifts to some z <= x with f(z) = y."""
    f, src, tgt = m.mapping, m.source, m.target
    for x in range(src.n):
        for y in range(src.n):
            if src.le(x, y) and not tgt.le(f[x], f[y]):
                return False
    for x in range(src.n):
        for y in range(tgt.n):
            if tgt.le(y, f[x]):
                if not any(src.le(z, x) and f[z] == y for z in range(src.n)):
                    return False
    return True


def check_p_morphism(m: PMorphismMap) -> PMorphismMap:
    if not is_p_morphism(m):
        raise ValueError("map is not a p-morphism")
    # p-morphisms send minimal elements to minimal elements
    tgt_min = set(m.target.minimal_elements())
    for x in m.source.minimal_elements():
        assert m.mapping[x] in tgt_min, (x, m.mapping[x])
    return m


# ---------------------------------------------------------------- grammar
#
# Every finite forest is generated by: the one-point poset, adding a new
# root below a forest, and disjoint unions.


@dataclass(frozen=True)
class ForestTerm:
    pass


@dataclass(frozen=True)
class One(ForestTerm):
    def __str__(self):
        return "1"


@dataclass(frozen=True)
class Rooted(ForestTerm):
    """A new least element below the denoted forest."""

    child: ForestTerm

    def __str__(self):
        return f"1 ⊕ ({self.child})"


@dataclass(frozen=True)
class Union(ForestTerm):
    parts: tuple[ForestTerm, ...]

    def __str__(self):
        return " ⊎ ".join(f"({p})" for p in self.parts)


def forest_build(term: ForestTerm | str) -> Forest:
    """Materialize a grammar term; node indices follow a preorder walk."""
    if isinstance(term, str):
        term = parse_term(term)

    def build(t) -> tuple[int, list[tuple[int, int]], list[int]]:
        # returns (node count, cover edges, roots), nodes numbered 0..count-1
        if isinstance(t, One):
            return 1, [], [0]
        if isinstance(t, Rooted):
            cn, ce, croots = build(t.child)
            edges = [(i + 1, j + 1) for i, j in ce]
            edges += [(0, r + 1) for r in croots]
            return cn + 1, edges, [0]
        if isinstance(t, Union):
            count, edges, roots = 0, [], []
            for part in t.parts:
                pn, pe, pr = build(part)
                edges += [(i + count, j + count) for i, j in pe]
                roots += [r + count for r in pr]
                count += pn
            return count, edges, roots
        raise MalformedTerm(f"unknown term node {t!r}")

    n, edges, _ = build(term)
    p = poset_from_covers(n, edges)
    return Forest(p.n, p.up, p.names)


def forest_decompose(f: Forest) -> ForestTerm:
    """Inverse of forest_build up to poset isomorphism."""

    def tree_term(tree: Tree) -> ForestTerm:
        if tree.n == 1:
            return One()
        rest = [i for i in range(tree.n) if i != tree.root]
        sub, _ = tree.induced(rest)
        return Rooted(forest_decompose(as_forest(sub)))

    trees = component_trees(f)
    terms = tuple(tree_term(t) for t, _ in trees)
    if len(terms) == 1:
        return terms[0]
    return Union(terms)


_SUM_TOKENS = {"⊕", "+"}
_UNION_TOKENS = {"⊎", "|"}


def parse_term(text: str) -> ForestTerm:
    """Parse terms like "1 ⊕ (1 ⊎ 1)"; ASCII aliases + and | are accepted."""
    tokens = []
    for ch in text:
        if ch.isspace():
            continue
        if ch in "1()" or ch in _SUM_TOKENS or ch in _UNION_TOKENS:
            tokens.append(ch)
        else:
            raise MalformedTerm(f"unexpected character {ch!r}")
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def atom():
        tok = take()
        if tok == "1":
            return One()
        if tok == "(":
            t = union()
            if take() != ")":
                raise MalformedTerm("missing closing parenthesis")
            return t
        raise MalformedTerm(f"unexpected token {tok!r}")

    def summand():
        left = atom()
        if peek() in _SUM_TOKENS:
            take()
            right = summand()
            if not isinstance(left, One):
                raise MalformedTerm("left operand of ⊕ must be 1")
            return Rooted(right)
        return left

    def union():
        parts = [summand()]
        while peek() in _UNION_TOKENS:
            take()
            parts.append(summand())
        return parts[0] if len(parts) == 1 else Union(tuple(parts))

    term = union()
    if pos != len(tokens):
        raise MalformedTerm(f"trailing tokens at {pos}")
    return term


def forest_canon(f: Forest) -> tuple:
    """Canonical form under poset isomorphism (sorted subtree encodings)."""

    def tree_code(tree: Tree) -> tuple:
        if tree.n == 1:
            return ()
        rest = [i for i in range(tree.n) if i != tree.root]
        sub, _ = tree.induced(rest)
        return forest_canon(as_forest(sub))

    codes = sorted(tree_code(t) for t, _ in component_trees(f))
    return tuple(codes)


# ---------------------------------------------------------------- text format
#
# .forest files: "nodes <k>", optional "name <i> <string>" lines, then
# "edge <i> <j>" cover pairs.


def parse_forest(text: str) -> Forest:
    n = None
    names: dict[int, str] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "nodes":
                n = int(parts[1])
            elif parts[0] == "name":
                names[int(parts[1])] = parts[2]
            elif parts[0] == "edge":
                edges.append((int(parts[1]), int(parts[2])))
            else:
                raise ParseError(lineno, f"unknown directive {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(lineno, f"cannot parse {line!r}") from exc
    if n is None:
        raise ParseError(1, "missing 'nodes' header")
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n):
            raise ParseError(1, f"edge ({i}, {j}) out of range")
    name_tuple = tuple(names.get(i, str(i)) for i in range(n))
    p = poset_from_covers(n, edges, name_tuple)
    return Forest(p.n, p.up, p.names)


def write_forest(f: Forest) -> str:
    lines = [f"nodes {f.n}"]
    for i in range(f.n):
        if f.names[i] != str(i):
            lines.append(f"name {i} {f.names[i]}")
    for i, j in f.edges():
        lines.append(f"edge {i} {j}")
    return "\n".join(lines) + "\n"


@lru_cache(maxsize=None)
def _forest_shapes(max_nodes: int) -> tuple[tuple, ...]:
    """All forest canonical codes with 1..max_nodes nodes."""

    @lru_cache(maxsize=None)
    def trees(n: int) -> tuple[tuple, ...]:
        # a tree on n nodes is a root plus a forest on n-1 nodes
        if n == 1:
            return ((),)
        return tuple(sorted(set(forests(n - 1))))

    @lru_cache(maxsize=None)
    def forests(n: int) -> tuple[tuple, ...]:
        # multisets of trees with sizes summing to n, canonical = sorted
        out = set()

        def extend(remaining, min_size, acc):
            if remaining == 0:
                out.add(tuple(sorted(acc)))
                return
            for size in range(min_size, remaining + 1):
                for t in trees(size):
                    extend(remaining - size, size, acc + [t])

        extend(n, 1, [])
        return tuple(sorted(out))

    all_codes = []
    for n in range(1, max_nodes + 1):
        all_codes.extend(forests(n))
    return tuple(all_codes)


def enumerate_forests(max_nodes: int) -> list[Forest]:
    """All forests with 1..max_nodes nodes, one per isomorphism class."""

    def term_of(code) -> ForestTerm:
        def tree_term(tc) -> ForestTerm:
            if tc == ():
                return One()
            return Rooted(term_of(tc))

        terms = tuple(tree_term(tc) for tc in code)
        return terms[0] if len(terms) == 1 else Union(terms)

    return [forest_build(term_of(code)) for code in _forest_shapes(max_nodes)]
