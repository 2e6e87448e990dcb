"""Homomorphisms and the brute-force isomorphism oracle.

The isomorphism search backs every "≅" claim in the library: it prunes
candidates by iterated invariant refinement on the operation tables, then
backtracks inside the remaining classes, so a None answer is a definitive
absence.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .algebras import FiniteMTL
from .errors import NotHomomorphism

_OPS = ("mul", "imp", "meet", "join")


@dataclass(frozen=True)
class AlgMorphism:
    source: FiniteMTL
    target: FiniteMTL
    mapping: tuple[int, ...]
    kernel: frozenset[int]

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    @property
    def is_injective(self) -> bool:
        # kernel characterization: f injective iff only top maps to top
        return self.kernel == frozenset({self.source.top})

    @property
    def is_surjective(self) -> bool:
        return len(set(self.mapping)) == self.target.n

    def is_isomorphism(self) -> bool:
        return self.source.n == self.target.n and self.is_injective and self.is_surjective

    def then(self, other: "AlgMorphism") -> "AlgMorphism":
        """Composite source -> other.target (self first)."""
        assert self.target == other.source, "morphisms not composable"
        mapping = tuple(other.mapping[v] for v in self.mapping)
        return check_morphism(mapping, self.source, other.target)


def identity_morphism(m: FiniteMTL) -> AlgMorphism:
    return AlgMorphism(m, m, tuple(range(m.n)), frozenset({m.top}))


def check_morphism(mapping, a: FiniteMTL, b: FiniteMTL) -> AlgMorphism:
    """Validate a total map as an MTL-morphism; raises NotHomomorphism."""
    f = tuple(int(v) for v in mapping)
    if len(f) != a.n or any(not 0 <= v < b.n for v in f):
        raise ValueError("map must send source elements into the target")
    if f[a.bot] != b.bot:
        raise NotHomomorphism("bot", a.bot, a.bot)
    if f[a.top] != b.top:
        raise NotHomomorphism("top", a.top, a.top)
    for op in _OPS:
        ta, tb = getattr(a, op), getattr(b, op)
        for x in range(a.n):
            for y in range(a.n):
                if f[int(ta[x, y])] != int(tb[f[x], f[y]]):
                    raise NotHomomorphism(op, x, y)
    kernel = frozenset(x for x in range(a.n) if f[x] == b.top)
    return AlgMorphism(a, b, f, kernel)


def is_morphism(mapping, a: FiniteMTL, b: FiniteMTL) -> bool:
    try:
        check_morphism(mapping, a, b)
        return True
    except (NotHomomorphism, ValueError):
        return False


# ---------------------------------------------------------------- isomorphism


def _power_profile(m: FiniteMTL, x: int) -> tuple[int, bool]:
    """(steps until the power sequence stabilizes, stabilizes at bot)."""
    steps = 0
    cur = x
    while True:
        nxt = int(m.mul[cur, x])
        if nxt == cur:
            return steps, cur == m.bot
        cur = nxt
        steps += 1
        if steps > m.n:  # cannot happen: powers descend
            raise AssertionError("power sequence failed to stabilize")


def _initial_colors(m: FiniteMTL) -> list[tuple]:
    down = [int(m.leq[:, x].sum()) for x in range(m.n)]
    up = [int(m.leq[x, :].sum()) for x in range(m.n)]
    return [
        (
            x == m.bot,
            x == m.top,
            int(m.mul[x, x]) == x,
            _power_profile(m, x),
            down[x],
            up[x],
        )
        for x in range(m.n)
    ]


def _joint_colors(a: FiniteMTL, b: FiniteMTL) -> tuple[list[int], list[int]] | None:
    """Refine element colors of a and b with a shared palette per round.

    Per round, each element is summarized by its color plus the sorted
    multiset of 6-tuples of colors along its table rows, packed into int64
    words so the whole round is vectorized.  Returns None as soon as the
    color class sizes of the two algebras diverge.
    """
    init = _initial_colors(a) + _initial_colors(b)
    palette = {s: i for i, s in enumerate(sorted(set(init)))}
    colors = np.array([palette[s] for s in init], dtype=np.int64)
    nclasses = len(palette)

    def round_sigs(m, offset):
        c = colors[offset:offset + m.n]
        width = int(colors.max()) + 1
        layers = (
            np.broadcast_to(c[None, :], (m.n, m.n)),
            c[m.mul],
            c[m.imp],
            c[m.imp.T],
            c[m.meet],
            c[m.join],
        )
        packed = np.zeros((m.n, m.n), dtype=np.int64)
        for layer in layers:
            packed = packed * width + layer
        packed.sort(axis=1)
        return [
            (int(c[x]), packed[x].tobytes()) for x in range(m.n)
        ]

    while True:
        ca, cb = colors[: a.n], colors[a.n:]
        if Counter(ca.tolist()) != Counter(cb.tolist()):
            return None
        if int(colors.max()) + 1 > 2 ** 10:
            # packing would overflow; fall back to stable classes as-is
            return ca.tolist(), cb.tolist()
        sigs = round_sigs(a, 0) + round_sigs(b, a.n)
        palette = {s: i for i, s in enumerate(sorted(set(sigs)))}
        nxt = np.array([palette[s] for s in sigs], dtype=np.int64)
        if len(palette) == nclasses:
            return nxt[: a.n].tolist(), nxt[a.n:].tolist()
        nclasses = len(palette)
        colors = nxt


def find_isomorphism(a: FiniteMTL, b: FiniteMTL) -> tuple[int, ...] | None:
    """Some isomorphism a -> b as an index tuple, or None if there is none."""
    if a.n != b.n:
        return None
    if a.key() == b.key():
        return tuple(range(a.n))
    joint = _joint_colors(a, b)
    if joint is None:
        return None
    ca_sig, cb_sig = joint
    candidates = [
        [y for y in range(b.n) if cb_sig[y] == ca_sig[x]] for x in range(a.n)
    ]
    if any(not c for c in candidates):
        return None
    order = sorted(range(a.n), key=lambda x: len(candidates[x]))
    mapping = [-1] * a.n
    used = [False] * b.n

    tabs = [(getattr(a, op), getattr(b, op)) for op in _OPS]

    def consistent(x, y):
        for ta, tb in tabs:
            for z in range(a.n):
                w = mapping[z]
                if w < 0:
                    continue
                fz = mapping[int(ta[x, z])]
                if fz >= 0 and fz != int(tb[y, w]):
                    return False
                fz = mapping[int(ta[z, x])]
                if fz >= 0 and fz != int(tb[w, y]):
                    return False
        return True

    def backtrack(k):
        if k == len(order):
            return True
        x = order[k]
        for y in candidates[x]:
            if used[y]:
                continue
            mapping[x] = y
            used[y] = True
            if consistent(x, y) and backtrack(k + 1):
                return True
            mapping[x] = -1
            used[y] = False
        return False

    if backtrack(0):
        result = tuple(mapping)
        if is_morphism(result, a, b):
            return result
        raise AssertionError("search produced a non-morphism")
    return None


def are_isomorphic(a: FiniteMTL, b: FiniteMTL) -> bool:
    return find_isomorphism(a, b) is not None


# ---------------------------------------------------------------- enumeration


def enumerate_morphisms(a: FiniteMTL, b: FiniteMTL, limit: int | None = None):
    """All MTL-morphisms a -> b by backtracking in index order.

    Assumes the canonical index order is a linear extension of a (true for
    everything this library constructs), which allows monotonicity pruning.
    """
    out: list[AlgMorphism] = []
    mapping = [-1] * a.n

    def compatible(x, y):
        if x == a.bot and y != b.bot:
            return False
        if x == a.top and y != b.top:
            return False
        for z in range(x):
            w = mapping[z]
            if a.le(z, x) and not b.le(w, y):
                return False
            if a.le(x, z) and not b.le(y, w):
                return False
            for ta, tb in ((a.mul, b.mul), (a.imp, b.imp), (a.meet, b.meet), (a.join, b.join)):
                r = int(ta[x, z])
                if r <= x and mapping[r] >= 0 and mapping[r] != int(tb[y, w]):
                    return False
                r = int(ta[z, x])
                if r <= x and mapping[r] >= 0 and mapping[r] != int(tb[w, y]):
                    return False
        return True

    def backtrack(x):
        if limit is not None and len(out) >= limit:
            return
        if x == a.n:
            if is_morphism(mapping, a, b):
                out.append(check_morphism(list(mapping), a, b))
            return
        for y in range(b.n):
            if compatible(x, y):
                mapping[x] = y
                backtrack(x + 1)
                mapping[x] = -1

    backtrack(0)
    return out
