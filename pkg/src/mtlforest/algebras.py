"""Finite MTL-algebras as Cayley tables.

An algebra is four n x n tables (mul, imp, meet, join) plus distinguished
bottom and top.  The order is derived from meet.  validate_mtl checks the
full axiom set, residuation over all n^3 triples included, and raises the
first violated axiom with a witness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .errors import (
    BoundsWrong,
    CapExceeded,
    NotAChain,
    NotCommutative,
    NotIdempotent,
    NotLattice,
    NotMonoid,
    ParseError,
    PrelinearityFails,
    ResiduationFails,
)
from .posets import Poset

_BLOCK = 64  # slab size for the n^3 table checks


def _as_table(rows, n: int) -> np.ndarray:
    arr = np.asarray(rows, dtype=np.int16)
    if arr.shape != (n, n):
        raise ValueError(f"table must be {n}x{n}, got {arr.shape}")
    if arr.min() < 0 or arr.max() >= n:
        raise ValueError("table entries out of range")
    arr.setflags(write=False)
    return arr


class FiniteMTL:
    """Immutable finite MTL-algebra on elements 0..n-1."""

    def __init__(self, n, bot, top, mul, imp, meet, join):
        self.n = n
        self.bot = bot
        self.top = top
        self.mul = _as_table(mul, n)
        self.imp = _as_table(imp, n)
        self.meet = _as_table(meet, n)
        self.join = _as_table(join, n)
        # x <= y iff meet(x, y) = x
        self.leq = self.meet == np.arange(n, dtype=np.int16)[:, None]
        self.leq.setflags(write=False)
        self._key = None

    def le(self, x: int, y: int) -> bool:
        return bool(self.leq[x, y])

    def is_chain(self) -> bool:
        return bool((self.leq | self.leq.T).all())

    def power(self, x: int, k: int) -> int:
        out = self.top
        for _ in range(k):
            out = int(self.mul[out, x])
        return out

    def power_fixpoint(self, x: int) -> int:
        """The idempotent limit of x, x^2, x^3, ... (reached within n steps)."""
        prev, cur = x, int(self.mul[x, x])
        while cur != prev:
            prev, cur = cur, int(self.mul[cur, x])
        return cur

    def idempotents(self) -> list[int]:
        return [x for x in range(self.n) if self.mul[x, x] == x]

    def upset(self, x: int) -> list[int]:
        return [y for y in range(self.n) if self.le(x, y)]

    def downset(self, x: int) -> list[int]:
        return [y for y in range(self.n) if self.le(y, x)]

    def order_poset(self) -> Poset:
        up = tuple(
            int(sum(1 << j for j in range(self.n) if self.leq[i, j]))
            for i in range(self.n)
        )
        return Poset(self.n, up)

    def key(self) -> tuple:
        if self._key is None:
            self._key = (
                self.n,
                self.bot,
                self.top,
                self.mul.tobytes(),
                self.imp.tobytes(),
                self.meet.tobytes(),
                self.join.tobytes(),
            )
        return self._key

    def __eq__(self, other):
        return isinstance(other, FiniteMTL) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"FiniteMTL(n={self.n})"


def _first_false(mask: np.ndarray) -> tuple:
    idx = np.argwhere(~mask)
    return tuple(int(v) for v in idx[0])


def derive_meet_join(n, top, imp):
    """Meet and join from the derived order x <= y iff x -> y = top."""
    imp = np.asarray(imp, dtype=np.int16)
    leq = imp == top
    meet = np.zeros((n, n), dtype=np.int16)
    join = np.zeros((n, n), dtype=np.int16)
    for x in range(n):
        for y in range(n):
            lowers = [z for z in range(n) if leq[z, x] and leq[z, y]]
            uppers = [z for z in range(n) if leq[x, z] and leq[y, z]]
            glb = [z for z in lowers if all(leq[w, z] for w in lowers)]
            lub = [z for z in uppers if all(leq[z, w] for w in uppers)]
            if len(glb) != 1 or len(lub) != 1:
                raise NotLattice("meet/join not unique", (x, y))
            meet[x, y] = glb[0]
            join[x, y] = lub[0]
    return meet, join


def _check_assoc(table: np.ndarray, n: int, err: type, name: str):
    t = table.astype(np.intp)
    for lo in range(0, n, _BLOCK):
        hi = min(lo + _BLOCK, n)
        # (x*y)*z vs x*(y*z) on the slab x in [lo, hi), via row gathers
        lhs = table[t[lo:hi]]          # lhs[i, y, z] = table[table[x, y], z]
        rhs = table[lo:hi][:, t]       # rhs[i, y, z] = table[x, table[y, z]]
        if not (lhs == rhs).all():
            x, y, z = _first_false(lhs == rhs)
            raise err(name, (x + lo, y, z))


def validate_mtl(tables: dict | FiniteMTL) -> FiniteMTL:
    """Validate an algebra presentation and return the FiniteMTL.

    Accepts a dict with keys n, bot, top, mul, imp and optional meet/join
    (derived from the implication order when absent), or an existing
    FiniteMTL to re-check.
    """
    if isinstance(tables, FiniteMTL):
        m = tables
        n, bot, top = m.n, m.bot, m.top
        mul, imp, meet, join = m.mul, m.imp, m.meet, m.join
    else:
        n = tables["n"]
        bot, top = tables["bot"], tables["top"]
        if not (0 <= bot < n and 0 <= top < n):
            raise BoundsWrong(f"bot={bot} top={top} out of range for n={n}")
        if n > 1 and bot == top:
            raise BoundsWrong("bot and top coincide in a nontrivial algebra")
        mul = _as_table(tables["mul"], n)
        imp = _as_table(tables["imp"], n)
        if tables.get("meet") is not None:
            meet = _as_table(tables["meet"], n)
            join = _as_table(tables["join"], n)
        else:
            meet, join = derive_meet_join(n, top, imp)

    if not (0 <= bot < n and 0 <= top < n):
        raise BoundsWrong(f"bot={bot} top={top} out of range for n={n}")

    idx = np.arange(n, dtype=np.int16)

    # lattice axioms
    if not (meet == meet.T).all():
        raise NotLattice("meet not commutative", _first_false(meet == meet.T))
    if not (join == join.T).all():
        raise NotLattice("join not commutative", _first_false(join == join.T))
    if not (meet[idx, idx] == idx).all():
        raise NotLattice("meet not idempotent", _first_false(meet[idx, idx] == idx))
    if not (join[idx, idx] == idx).all():
        raise NotLattice("join not idempotent", _first_false(join[idx, idx] == idx))
    _check_assoc(meet, n, NotLattice, "meet not associative")
    _check_assoc(join, n, NotLattice, "join not associative")
    absorb1 = meet[idx[:, None], join] == idx[:, None]
    if not absorb1.all():
        raise NotLattice("absorption x ∧ (x ∨ y)", _first_false(absorb1))
    absorb2 = join[idx[:, None], meet] == idx[:, None]
    if not absorb2.all():
        raise NotLattice("absorption x ∨ (x ∧ y)", _first_false(absorb2))

    leq = meet == idx[:, None]
    if not leq[bot, :].all():
        raise BoundsWrong(f"bot={bot} is not the least element")
    if not leq[:, top].all():
        raise BoundsWrong(f"top={top} is not the greatest element")

    # commutative monoid with unit top
    if not (mul == mul.T).all():
        x, y = _first_false(mul == mul.T)
        raise NotCommutative(x, y)
    if not (mul[:, top] == idx).all():
        raise NotMonoid("top is not a unit", _first_false(mul[:, top] == idx))
    _check_assoc(mul, n, NotMonoid, "product not associative")

    # residuation: x·y <= z  iff  x <= y -> z
    mul_ip = mul.astype(np.intp)
    imp_ip = imp.astype(np.intp)
    for lo in range(0, n, _BLOCK):
        hi = min(lo + _BLOCK, n)
        lhs = leq[mul_ip[lo:hi]]        # lhs[i, y, z] = (x·y <= z)
        rhs = leq[lo:hi][:, imp_ip]     # rhs[i, y, z] = (x <= y -> z)
        if not (lhs == rhs).all():
            x, y, z = _first_false(lhs == rhs)
            raise ResiduationFails(x + lo, y, z)

    # prelinearity
    prelin = join[imp, imp.T] == top
    if not prelin.all():
        raise PrelinearityFails(*_first_false(prelin))

    # cross-check: x ∧ y = (x·(x→y)) ∨ (y·(y→x))
    lhs = join[mul[idx[:, None], imp], mul[idx[None, :], imp.T]]
    if not (lhs == meet).all():
        raise NotLattice("meet identity cross-check", _first_false(lhs == meet))

    if isinstance(tables, FiniteMTL):
        return tables
    return FiniteMTL(n, bot, top, mul, imp, meet, join)


def canonicalize(m: FiniteMTL) -> FiniteMTL:
    """Reindex along a deterministic linear extension (bot=0, top=n-1)."""
    perm = _linear_extension_perm(m)
    if all(perm[i] == i for i in range(m.n)):
        return m
    return relabel(m, perm)


def relabel(m: FiniteMTL, perm: dict[int, int]) -> FiniteMTL:
    """Apply the bijection old -> new: new_tab[a, b] = perm[tab[inv a, inv b]]."""
    n = m.n
    inv = [0] * n
    for old, new in perm.items():
        inv[new] = old

    def remap(tab):
        out = np.zeros((n, n), dtype=np.int16)
        for a in range(n):
            for b in range(n):
                out[a, b] = perm[int(tab[inv[a], inv[b]])]
        return out

    return FiniteMTL(
        n,
        perm[m.bot],
        perm[m.top],
        remap(m.mul),
        remap(m.imp),
        remap(m.meet),
        remap(m.join),
    )


# ---------------------------------------------------------------- named chains


def chain_tables(n: int, mul_entries) -> FiniteMTL:
    """Chain 0 < 1 < ... < n-1 with the given product; residual derived."""
    mul = np.array(mul_entries, dtype=np.int16)
    idx = np.arange(n, dtype=np.int16)
    meet = np.minimum(idx[:, None], idx[None, :]).astype(np.int16)
    join = np.maximum(idx[:, None], idx[None, :]).astype(np.int16)
    imp = np.zeros((n, n), dtype=np.int16)
    for x in range(n):
        for y in range(n):
            imp[x, y] = max(z for z in range(n) if mul[x, z] <= y)
    return validate_mtl(
        {"n": n, "bot": 0, "top": n - 1, "mul": mul, "imp": imp,
         "meet": meet, "join": join}
    )


def lukasiewicz_chain(k: int) -> FiniteMTL:
    """The k-element Łukasiewicz chain: x·y = max(0, x + y - (k-1))."""
    mul = [[max(0, x + y - (k - 1)) for y in range(k)] for x in range(k)]
    return chain_tables(k, mul)


def godel_chain(k: int) -> FiniteMTL:
    """The k-element Gödel chain: x·y = min(x, y)."""
    mul = [[min(x, y) for y in range(k)] for x in range(k)]
    return chain_tables(k, mul)


def trivial_algebra() -> FiniteMTL:
    return FiniteMTL(1, 0, 0, [[0]], [[0]], [[0]], [[0]])


def bool2() -> FiniteMTL:
    return lukasiewicz_chain(2)


def chain_w() -> FiniteMTL:
    """The 4-chain 0 < b < e < 1 with e·e = e, e·b = b·b = 0.

    The smallest chain whose internal idempotent is not a local unit.
    """
    mul = [
        [0, 0, 0, 0],
        [0, 0, 0, 1],
        [0, 0, 2, 2],
        [0, 1, 2, 3],
    ]
    return chain_tables(4, mul)


# ---------------------------------------------------------------- structure


@dataclass(frozen=True)
class Filter:
    """Up-set of an idempotent, closed under the product."""

    parent: FiniteMTL
    generator: int
    members: frozenset[int]

    def __contains__(self, x: int) -> bool:
        return x in self.members

    def is_prime(self) -> bool:
        m = self.parent
        if m.bot in self.members:
            return False
        for x in range(m.n):
            for y in range(m.n):
                if int(m.join[x, y]) in self.members:
                    if x not in self.members and y not in self.members:
                        return False
        return True


def filter_generated(m: FiniteMTL, x: int) -> Filter:
    """⟨x⟩ = up-set of the idempotent power limit of x."""
    g = m.power_fixpoint(x)
    return Filter(m, g, frozenset(m.upset(g)))


def filters(m: FiniteMTL) -> list[Filter]:
    """One filter per idempotent, ordered by generator index."""
    return [Filter(m, e, frozenset(m.upset(e))) for e in m.idempotents()]


@dataclass(frozen=True)
class IdempotentStructure:
    algebra: FiniteMTL
    idempotents: tuple[int, ...]
    join_irreducible: tuple[int, ...]
    minimal: tuple[int, ...]
    predecessor: dict[int, int]  # e -> a_e (bot when e is minimal)
    ji_poset: Poset              # induced order on join_irreducible

    def a(self, e: int) -> int:
        return self.predecessor[e]


def idempotent_structure(m: FiniteMTL) -> IdempotentStructure:
    """I(M), its join-irreducible members, minimal ones, and each a_e.

    a_e is the largest join irreducible strictly below e (the elements of
    I(M) below a join irreducible form a chain), or bot when none exists.
    """
    idem = m.idempotents()
    idem_set = set(idem)
    # join of idempotents stays idempotent: I(M) is a sublattice
    for a in idem:
        for b in idem:
            assert int(m.join[a, b]) in idem_set, (a, b)
    ji = []
    for e in idem:
        if e == m.bot:
            continue
        below = [a for a in idem if m.le(a, e) and a != e]
        s = m.bot
        for a in below:
            s = int(m.join[s, a])
        if s != e:
            ji.append(e)
    ji_set = set(ji)
    pred = {}
    for e in ji:
        strictly_below = [k for k in ji_set if m.le(k, e) and k != e]
        for x in strictly_below:
            for y in strictly_below:
                assert m.le(x, y) or m.le(y, x), (e, x, y)
        pred[e] = max(strictly_below, key=lambda k: len(m.downset(k)), default=m.bot)
    minimal = tuple(e for e in ji if pred[e] == m.bot)
    nodes = sorted(ji)
    up = tuple(
        sum(1 << j for j, f in enumerate(nodes) if m.le(e, f)) for e in nodes
    )
    ji_poset = Poset(len(nodes), up, tuple(str(e) for e in nodes))
    return IdempotentStructure(
        m, tuple(idem), tuple(nodes), minimal, pred, ji_poset
    )


@dataclass(frozen=True)
class Spectrum:
    poset: Poset            # prime filters under inclusion
    primes: tuple[Filter, ...]
    op_forest: Poset        # the opposite order; always a forest


def spectrum(m: FiniteMTL) -> Spectrum:
    """Prime filters ordered by inclusion; the opposite poset is a forest."""
    from .posets import is_forest

    primes = tuple(f for f in filters(m) if f.is_prime())
    k = len(primes)
    up = tuple(
        sum(1 << j for j in range(k) if primes[i].members <= primes[j].members)
        for i in range(k)
    )
    poset = Poset(k, up, tuple(str(f.generator) for f in primes))
    op = poset.opposite()
    assert is_forest(op), "dual spectrum must be a forest"
    return Spectrum(poset, primes, op)


def quotient(m: FiniteMTL, filt: Filter) -> tuple[FiniteMTL, "AlgMorphism"]:
    """M / F with x ~ y iff x -> y and y -> x both land in F.

    The class representative is the maximum of the class (classes are
    closed under join); the quotient is reindexed canonically.
    """
    from .morphisms import check_morphism

    n = m.n
    member = np.zeros(n, dtype=bool)
    member[list(filt.members)] = True
    related = member[m.imp] & member[m.imp.T]  # x ~ y congruence matrix
    cls = [-1] * n
    reps = []
    for x in range(n):
        if cls[x] >= 0:
            continue
        block = np.nonzero(related[x])[0]
        rep = int(block[0])
        for y in block:
            rep = int(m.join[rep, int(y)])
        assert related[x, rep], "class has no maximum"
        for y in block:
            cls[int(y)] = len(reps)
        reps.append(rep)
    k = len(reps)

    reps_ix = np.ix_(np.array(reps), np.array(reps))
    cls_arr = np.array(cls, dtype=np.int16)

    def build(tab):
        return cls_arr[tab[reps_ix]]

    q = FiniteMTL(
        k,
        cls[m.bot],
        cls[m.top],
        build(m.mul),
        build(m.imp),
        build(m.meet),
        build(m.join),
    )
    perm = _linear_extension_perm(q)
    qv = validate_mtl(relabel(q, perm))
    proj = check_morphism([perm[cls[x]] for x in range(n)], m, qv)
    return qv, proj


def _linear_extension_perm(m: FiniteMTL) -> dict[int, int]:
    """old index -> position in the deterministic linear extension."""
    remaining = set(range(m.n))
    perm = {}
    pos = 0
    while remaining:
        nxt = min(
            x for x in remaining
            if all(not m.le(y, x) for y in remaining if y != x)
        )
        perm[nxt] = pos
        pos += 1
        remaining.remove(nxt)
    return perm


def upset_algebra(m: FiniteMTL, x: int) -> tuple[FiniteMTL, list[int]]:
    """The algebra on ↑x (x idempotent) with bottom x; ops restrict.

    Returns the algebra and the list mapping new indices to elements of m.
    """
    if m.mul[x, x] != x:
        raise NotIdempotent(x)
    elems = m.upset(x)
    index = {v: i for i, v in enumerate(elems)}
    k = len(elems)

    def restrict(tab):
        out = np.zeros((k, k), dtype=np.int16)
        for a, u in enumerate(elems):
            for b, v in enumerate(elems):
                out[a, b] = index[int(tab[u, v])]
        return out

    alg = FiniteMTL(
        k,
        index[x],
        index[m.top],
        restrict(m.mul),
        restrict(m.imp),
        restrict(m.meet),
        restrict(m.join),
    )
    return validate_mtl(alg), elems


def interval_algebra(m: FiniteMTL, lo: int, hi: int) -> tuple[FiniteMTL, list[int]]:
    """The algebra on [lo, hi] for idempotent lo: product restricts,
    implication truncates at hi.  Matches ↑lo / ↑hi when hi is a local unit.
    """
    if m.mul[lo, lo] != lo:
        raise NotIdempotent(lo)
    elems = [y for y in range(m.n) if m.le(lo, y) and m.le(y, hi)]
    index = {v: i for i, v in enumerate(elems)}
    k = len(elems)
    mul = np.zeros((k, k), dtype=np.int16)
    imp = np.zeros((k, k), dtype=np.int16)
    meet = np.zeros((k, k), dtype=np.int16)
    join = np.zeros((k, k), dtype=np.int16)
    for a, u in enumerate(elems):
        for b, v in enumerate(elems):
            mul[a, b] = index[int(m.mul[u, v])]
            imp[a, b] = index[int(m.meet[hi, int(m.imp[u, v])])]
            meet[a, b] = index[int(m.meet[u, v])]
            join[a, b] = index[int(m.join[u, v])]
    alg = FiniteMTL(k, index[lo], index[hi], mul, imp, meet, join)
    return validate_mtl(alg), elems


# ---------------------------------------------------------------- archimedean


def _arch_definitional(m: FiniteMTL) -> bool:
    for y in range(m.n):
        if y == m.top:
            continue
        for x in range(m.n):
            if not m.le(x, y):
                continue
            p = y
            hit = m.le(p, x)
            for _ in range(m.n):
                p = int(m.mul[p, y])
                if m.le(p, x):
                    hit = True
                    break
            if not hit:
                return False
    return True


def _arch_equational(m: FiniteMTL) -> bool:
    # ((a -> b) -> b)^2 <= a ∨ b for all a, b
    for a in range(m.n):
        for b in range(m.n):
            t = int(m.imp[int(m.imp[a, b]), b])
            if not m.le(int(m.mul[t, t]), int(m.join[a, b])):
                return False
    return True


def is_archimedean(m: FiniteMTL) -> bool:
    """Archimedean test for chains; definitional and equational routes
    are both run and must agree."""
    if not m.is_chain():
        leq = m.leq | m.leq.T
        x, y = _first_false(leq)
        raise NotAChain(x, y)
    a = _arch_definitional(m)
    b = _arch_equational(m)
    assert a == b, "archimedean criteria disagree"
    return a


def is_simple(m: FiniteMTL) -> bool:
    """Exactly two filters: {top} and the whole algebra."""
    return len(filters(m)) == 2


# ---------------------------------------------------------------- chain oracle


def enumerate_mtl_chains(n: int, cap: int | None = None) -> list[FiniteMTL]:
    """All MTL-chains with n elements on the canonical chain 0 < ... < n-1.

    Chains admit a unique order isomorphism, so distinct tables are
    distinct isomorphism classes.  Products are enumerated by backtracking
    over the free entries with monotonicity pruning; associativity is
    checked on each complete table.
    """
    limit = config.MAX_CHAIN_ENUM if cap is None else cap
    if n > limit:
        raise CapExceeded(f"chain enumeration capped at {limit} elements")
    if n == 1:
        return [trivial_algebra()]
    top = n - 1
    mul = [[0] * n for _ in range(n)]
    for x in range(n):
        mul[x][top] = x
        mul[top][x] = x
    free = [(x, y) for x in range(1, top) for y in range(x, top)]
    found = []

    def value_ok(x, y, v):
        if v > min(x, y):
            return False
        if x > 1 and mul[x - 1][y] > v:
            return False
        if y > x and mul[x][y - 1] > v:
            return False
        return True

    def assoc_ok():
        for a in range(n):
            for b in range(n):
                ab = mul[a][b]
                for c in range(n):
                    if mul[ab][c] != mul[a][mul[b][c]]:
                        return False
        return True

    def fill(k):
        if k == len(free):
            if assoc_ok():
                found.append([row[:] for row in mul])
            return
        x, y = free[k]
        for v in range(min(x, y) + 1):
            if value_ok(x, y, v):
                mul[x][y] = v
                mul[y][x] = v
                fill(k + 1)
        mul[x][y] = 0
        mul[y][x] = 0

    fill(0)
    found.sort()
    return [chain_tables(n, tab) for tab in found]


# ---------------------------------------------------------------- text format


def parse_mtl(text: str) -> FiniteMTL:
    """Parse the .mtl format; diagnostics carry line numbers."""
    lines = text.splitlines()
    n = bot = top = None
    tables: dict[str, list[list[int]]] = {}
    i = 0
    while i < len(lines):
        lineno = i + 1
        line = lines[i].split("#", 1)[0].strip()
        i += 1
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        try:
            if head == "n":
                n = int(parts[1])
            elif head == "bot":
                bot = int(parts[1])
            elif head == "top":
                top = int(parts[1])
            elif head in ("mul", "imp", "meet", "join"):
                if n is None:
                    raise ParseError(lineno, "table before 'n' header")
                rows = []
                for r in range(n):
                    if i >= len(lines):
                        raise ParseError(lineno, f"{head} table truncated")
                    rowline = lines[i].split("#", 1)[0].strip()
                    i += 1
                    row = [int(v) for v in rowline.split()]
                    if len(row) != n:
                        raise ParseError(i, f"{head} row has {len(row)} entries, want {n}")
                    rows.append(row)
                tables[head] = rows
            else:
                raise ParseError(lineno, f"unknown directive {head!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(lineno, f"cannot parse {line!r}") from exc
    if n is None or bot is None or top is None:
        raise ParseError(len(lines) or 1, "missing n/bot/top header")
    if "mul" not in tables or "imp" not in tables:
        raise ParseError(len(lines) or 1, "missing mul or imp table")
    return validate_mtl(
        {
            "n": n,
            "bot": bot,
            "top": top,
            "mul": tables["mul"],
            "imp": tables["imp"],
            "meet": tables.get("meet"),
            "join": tables.get("join"),
        }
    )


def write_mtl(m: FiniteMTL) -> str:
    """Deterministic writer: row-major, single spaces, all four tables."""
    out = [f"n {m.n}", f"bot {m.bot}", f"top {m.top}"]
    for name in ("mul", "imp", "meet", "join"):
        out.append(name)
        tab = getattr(m, name)
        for x in range(m.n):
            out.append(" ".join(str(int(v)) for v in tab[x]))
    return "\n".join(out) + "\n"
