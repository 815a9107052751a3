"""Permutation groups through a stabilizer chain (deterministic Schreier-Sims).

Permutations are tuples ``p`` with ``p[x]`` the image of x.  Products follow
function composition: ``mul(p, q)`` applies q first, then p.
"""

from __future__ import annotations

from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Sequence

Perm = tuple


def identity(n: int) -> Perm:
    return tuple(range(n))


def mul(p: Sequence[int], q: Sequence[int]) -> Perm:
    return tuple(p[x] for x in q)


def inverse(p: Sequence[int]) -> Perm:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def is_identity(p: Sequence[int]) -> bool:
    return all(i == x for i, x in enumerate(p))


def conjugate(g: Sequence[int], x: Sequence[int]) -> Perm:
    """g x g^-1."""
    out = [0] * len(x)
    for i in range(len(x)):
        out[g[i]] = g[x[i]]
    return tuple(out)


class PermGroup:
    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = ()):
        self.degree = degree
        gens = []
        seen = set()
        for g in generators:
            g = tuple(g)
            if len(g) != degree or sorted(g) != list(range(degree)):
                raise ValueError("generator is not a permutation of the right degree")
            if not is_identity(g) and g not in seen:
                seen.add(g)
                gens.append(g)
        self.generators: tuple[Perm, ...] = tuple(gens)
        self._build()

    # stabilizer chain -----------------------------------------------------------

    def _build(self):
        n = self.degree
        self.base: list[int] = []
        self.strong: list[Perm] = list(self.generators)
        self.transversals: list[dict[int, Perm]] = []
        for g in self.strong:
            self._ensure_moved(g)
        checked: list[set] = [set() for _ in self.base]
        i = len(self.base) - 1
        while i >= 0:
            self._recompute_level(i)
            while len(checked) < len(self.base):
                checked.append(set())
            level_gens = self._level_gens(i)
            trans = self.transversals[i]
            added = False
            for beta in list(trans):
                u_beta = trans[beta]
                for si, s in level_gens:
                    if (beta, si) in checked[i]:
                        continue
                    image = s[beta]
                    schreier = mul(inverse(trans[image]), mul(s, u_beta))
                    h, j = self._sift(schreier, i + 1)
                    if not is_identity(h):
                        self.strong.append(h)
                        self._ensure_moved(h)
                        while len(checked) < len(self.base):
                            checked.append(set())
                        i = j
                        added = True
                        break
                    checked[i].add((beta, si))
                if added:
                    break
            if not added:
                i -= 1
        # transversals for all levels are current
        for lv in range(len(self.base)):
            if lv >= len(self.transversals) or not self.transversals[lv]:
                self._recompute_level(lv)

    def _ensure_moved(self, g: Perm):
        if all(g[b] == b for b in self.base):
            pt = next(x for x in range(self.degree) if g[x] != x)
            self.base.append(pt)
            self.transversals.append({})

    def _level_gens(self, i: int) -> list[tuple[int, Perm]]:
        prefix = self.base[:i]
        return [(k, s) for k, s in enumerate(self.strong) if all(s[b] == b for b in prefix)]

    def _recompute_level(self, i: int):
        b = self.base[i]
        gens = [s for _, s in self._level_gens(i)]
        old = self.transversals[i] if i < len(self.transversals) else {}
        trans = dict(old) if old else {b: identity(self.degree)}
        queue = list(trans)
        head = 0
        while head < len(queue):
            x = queue[head]
            head += 1
            ux = trans[x]
            for s in gens:
                y = s[x]
                if y not in trans:
                    trans[y] = mul(s, ux)
                    queue.append(y)
        self.transversals[i] = trans

    def _sift(self, g: Perm, start: int = 0) -> tuple[Perm, int]:
        for j in range(start, len(self.base)):
            beta = g[self.base[j]]
            trans = self.transversals[j]
            if not trans:
                self._recompute_level(j)
                trans = self.transversals[j]
            if beta not in trans:
                return g, j
            g = mul(inverse(trans[beta]), g)
        return g, len(self.base)

    # queries ------------------------------------------------------------------

    @cached_property
    def order(self) -> int:
        out = 1
        for t in self.transversals:
            out *= len(t)
        return out

    def __contains__(self, g) -> bool:
        g = tuple(g)
        if len(g) != self.degree:
            return False
        h, j = self._sift(g)
        return j == len(self.base) and is_identity(h)

    def elements(self) -> Iterator[Perm]:
        """All elements, as products u_0 u_1 ... of transversal elements."""
        levels = [list(t.values()) for t in self.transversals]
        if not levels:
            yield identity(self.degree)
            return
        for combo in product(*levels):
            g = combo[-1]
            for u in reversed(combo[:-1]):
                g = mul(u, g)
            yield g

    def random_element(self, rng) -> Perm:
        g = identity(self.degree)
        for t in self.transversals:
            keys = sorted(t)
            g = mul(g, t[keys[int(rng.integers(len(keys)))]])
        return g

    def orbit(self, point: int) -> list[int]:
        seen = {point}
        queue = [point]
        for x in queue:
            for s in self.generators:
                y = s[x]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return sorted(seen)

    def orbits(self) -> list[list[int]]:
        out, seen = [], set()
        for x in range(self.degree):
            if x not in seen:
                o = self.orbit(x)
                seen.update(o)
                out.append(o)
        return out

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, order={self.order})"


def centralizer_orbit(group: PermGroup, w: Perm, limit: int = 10**7):
    """Orbit of w under conjugation by ``group``, with Schreier data.

    Returns (orbit dict y -> (parent, generator index)) so that transversal
    elements t_y with t_y w t_y^-1 = y can be rebuilt on demand.
    """
    w = tuple(w)
    parent: dict[Perm, tuple[Perm | None, int]] = {w: (None, -1)}
    queue = [w]
    head = 0
    while head < len(queue):
        x = queue[head]
        head += 1
        for k, g in enumerate(group.generators):
            y = conjugate(g, x)
            if y not in parent:
                parent[y] = (x, k)
                queue.append(y)
                if len(parent) > limit:
                    return None
    return parent


def orbit_transversal(group: PermGroup, parent, y: Perm) -> Perm:
    """t with t w t^-1 = y, where w is the root of the orbit ``parent``."""
    t = identity(group.degree)
    while True:
        x, k = parent[y]
        if x is None:
            return t
        t = mul(t, group.generators[k])
        y = x


def centralizer(group: PermGroup, w: Perm, limit: int = 10**7) -> PermGroup | None:
    """C_group(w) from Schreier generators of the conjugation orbit of w."""
    parent = centralizer_orbit(group, w, limit)
    if parent is None:
        return None
    gens = set()
    tmap = {y: orbit_transversal(group, parent, y) for y in parent}
    for x, tx in tmap.items():
        for g in group.generators:
            y = conjugate(g, x)
            s = mul(inverse(tmap[y]), mul(g, tx))
            if not is_identity(s):
                gens.add(s)
    C = PermGroup(group.degree, sorted(gens))
    assert C.order * len(parent) == group.order
    return C
