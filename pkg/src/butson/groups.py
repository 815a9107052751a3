"""Finite groups as Cayley tables.

Elements are the integers ``0 .. order-1`` with 0 the identity.  The
catalog of all groups of a given order is grown by cyclic extensions: a
solvable group of order n has a normal subgroup M of prime index q, so it
is ``<M, t>`` with t acting on M by an automorphism and ``t**q`` in M.
Every group of order below 60 is solvable, which covers everything here.
"""

from __future__ import annotations

import re
from collections import Counter, deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import permutations, product
from pathlib import Path
from typing import Sequence

import numpy as np

from .algebra import prime_factors
from .exceptions import ParameterError, ParseError, ValidationError

MAX_ORDER = 128


class FiniteGroup:
    """A group given by its multiplication table; ``table[a][b]`` is ``a*b``."""

    def __init__(self, table, name: str = "", check: bool = True, max_order: int = MAX_ORDER):
        t = np.array(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] < 1:
            raise ValidationError("Cayley table must be a non-empty square array")
        n = t.shape[0]
        if n > max_order:
            raise ValidationError(f"order {n} exceeds the supported limit {max_order}")
        t.setflags(write=False)
        self.table = t
        self.order = n
        self.name = name or f"G{n}"
        self.mul = t.tolist()
        if check:
            self._validate()

    def _validate(self):
        t, n = self.table, self.order
        ar = np.arange(n)
        if not (np.array_equal(t[0], ar) and np.array_equal(t[:, 0], ar)):
            raise ValidationError("index 0 must be the identity")
        srt = np.sort(t, axis=1)
        if not (np.all(srt == ar) and np.all(np.sort(t, axis=0) == ar[:, None])):
            raise ValidationError("table rows and columns must be permutations")
        if n <= 100:
            # (ab)c == a(bc) for all a, b, c
            left = t[t[:, :, None], ar[None, None, :]]
            right = t[ar[:, None, None], t[None, :, :]]
            if not np.array_equal(left, right):
                raise ValidationError("table is not associative")

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"

    def __len__(self):
        return self.order

    @cached_property
    def inv(self) -> list[int]:
        out = [0] * self.order
        for a, row in enumerate(self.mul):
            out[a] = row.index(0)
        return out

    @cached_property
    def element_orders(self) -> list[int]:
        out = []
        for a in range(self.order):
            x, m = a, 1
            while x:
                x = self.mul[x][a]
                m += 1
            out.append(m)
        return out

    def power(self, a: int, e: int) -> int:
        e %= self.element_orders[a]
        x = 0
        for _ in range(e):
            x = self.mul[x][a]
        return x

    def conj(self, g: int, x: int) -> int:
        """g x g^-1."""
        return self.mul[self.mul[g][x]][self.inv[g]]

    def commutator(self, a: int, b: int) -> int:
        ia, ib = self.inv[a], self.inv[b]
        return self.mul[self.mul[ia][ib]][self.mul[a][b]]

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    @cached_property
    def center(self) -> tuple[int, ...]:
        t = self.table
        return tuple(a for a in range(self.order) if np.array_equal(t[a], t[:, a]))

    def centralizer_size(self, a: int) -> int:
        return int(np.sum(self.table[a] == self.table[:, a]))

    def generate(self, gens: Sequence[int]) -> list[int]:
        """Elements of the subgroup generated by ``gens``, identity first."""
        seen = {0}
        out = [0]
        queue = deque([0])
        gens = [g for g in gens if g]
        while queue:
            a = queue.popleft()
            row = self.mul[a]
            for g in gens:
                b = row[g]
                if b not in seen:
                    seen.add(b)
                    out.append(b)
                    queue.append(b)
        return out

    @cached_property
    def derived_subgroup(self) -> tuple[int, ...]:
        comms = {self.commutator(a, b) for a in range(self.order) for b in range(a + 1, self.order)}
        return tuple(sorted(self.generate(sorted(comms))))

    def is_normal(self, sub) -> bool:
        s = set(sub)
        return all(self.conj(g, x) in s for g in self.small_generating_set() for x in s)

    @lru_cache(maxsize=None)
    def small_generating_set(self) -> tuple[int, ...]:
        """Greedy generating set preferring elements of large order."""
        order_key = sorted(range(1, self.order), key=lambda a: (-self.element_orders[a], a))
        gens: list[int] = []
        span = {0}
        for a in order_key:
            if len(span) == self.order:
                break
            if a not in span:
                gens.append(a)
                span = set(self.generate(gens))
        # drop redundant generators
        i = 0
        while i < len(gens):
            trial = gens[:i] + gens[i + 1:]
            if trial and len(self.generate(trial)) == self.order:
                gens = trial
            else:
                i += 1
        return tuple(gens)

    def quotient(self, normal: Sequence[int], name: str = "") -> tuple["FiniteGroup", list[int], list[int]]:
        """Return (G/N, projection, section) with section(coset) = least element."""
        nset = sorted(set(normal))
        if 0 not in nset:
            raise ParameterError("subgroup must contain the identity")
        coset_of = [-1] * self.order
        reps = []
        for a in range(self.order):
            if coset_of[a] < 0:
                c = len(reps)
                reps.append(a)
                for x in nset:
                    coset_of[self.mul[a][x]] = c
        m = len(reps)
        if m * len(nset) != self.order:
            raise ParameterError("not a subgroup")
        table = [[coset_of[self.mul[reps[i]][reps[j]]] for j in range(m)] for i in range(m)]
        return FiniteGroup(table, name or f"{self.name}/N"), coset_of, reps

    def relabel(self, perm: Sequence[int], name: str = "") -> "FiniteGroup":
        """Group whose element ``perm[a]`` plays the role of ``a``; perm[0] must be 0."""
        inv = [0] * self.order
        for a, b in enumerate(perm):
            inv[b] = a
        table = [[perm[self.mul[inv[x]][inv[y]]] for y in range(self.order)] for x in range(self.order)]
        return FiniteGroup(table, name or self.name, check=False)


# -- constructors ----------------------------------------------------------------

def trivial_group() -> FiniteGroup:
    return FiniteGroup([[0]], "C1")


def cyclic(m: int) -> FiniteGroup:
    a = np.arange(m)
    return FiniteGroup((a[:, None] + a[None, :]) % m, f"C{m}", check=False)


def direct_product(A: FiniteGroup, B: FiniteGroup, name: str = "") -> FiniteGroup:
    """Element (a, b) has index a*|B| + b."""
    ta, tb = A.table, B.table
    t = ta[:, None, :, None] * B.order + tb[None, :, None, :]
    n = A.order * B.order
    return FiniteGroup(t.reshape(n, n), name or f"{A.name}x{B.name}", check=False)


def semidirect(A: FiniteGroup, B: FiniteGroup, action: Sequence[Sequence[int]], name: str = "") -> FiniteGroup:
    """A x| B with b acting on A by the automorphism ``action[b]``.

    Element (a, b) has index a*|B| + b; (a1,b1)(a2,b2) = (a1 * b1(a2), b1 b2).
    """
    act = [list(p) for p in action]
    if len(act) != B.order:
        raise ValidationError("action needs one automorphism per element of B")
    for b, p in enumerate(act):
        if sorted(p) != list(range(A.order)) or not is_automorphism(A, p):
            raise ValidationError(f"action[{b}] is not an automorphism of {A.name}")
    for b1 in range(B.order):
        for b2 in range(B.order):
            comp = [act[b1][act[b2][x]] for x in range(A.order)]
            if comp != act[B.mul[b1][b2]]:
                raise ValidationError("action is not a homomorphism B -> Aut(A)")
    nb = B.order
    n = A.order * nb
    table = [[0] * n for _ in range(n)]
    for a1 in range(A.order):
        for b1 in range(nb):
            row = table[a1 * nb + b1]
            phi = act[b1]
            for a2 in range(A.order):
                a = A.mul[a1][phi[a2]] * nb
                for b2 in range(nb):
                    row[a2 * nb + b2] = a + B.mul[b1][b2]
    return FiniteGroup(table, name or f"{A.name}:{B.name}")


def cyclic_action_power(m: int, n: int) -> int:
    """Smallest r > 1 with r**n = 1 mod m and gcd(r, m) = 1 (the default C_m : C_n action)."""
    from math import gcd
    for r in range(2, m):
        if gcd(r, m) == 1 and pow(r, n, m) == 1:
            return r
    raise ParameterError(f"no nontrivial action of C{n} on C{m}")


def semidirect_cyclic(m: int, n: int, r: int | None = None) -> FiniteGroup:
    """C_m x| C_n where the generator of C_n acts as x -> r*x."""
    r = cyclic_action_power(m, n) if r is None else r
    if pow(r, n, m) != 1:
        raise ValidationError(f"x -> {r}x has order not dividing {n} mod {m}")
    action = [[(x * pow(r, b, m)) % m for x in range(m)] for b in range(n)]
    return semidirect(cyclic(m), cyclic(n), action, f"C{m}:C{n}")


def dihedral(m: int) -> FiniteGroup:
    """Dihedral group of order 2m (symmetries of an m-gon)."""
    if m == 1:
        return cyclic(2)
    action = [list(range(m)), [(-x) % m for x in range(m)]]
    return semidirect(cyclic(m), cyclic(2), action, f"D{m}")


def from_permutations(gens: Sequence[Sequence[int]], name: str = "") -> FiniteGroup:
    """Group generated by permutations; composition (pq)(x) = p(q(x))."""
    deg = len(gens[0])
    ident = tuple(range(deg))
    elems = [ident]
    index = {ident: 0}
    queue = deque([ident])
    gens = [tuple(g) for g in gens]
    while queue:
        p = queue.popleft()
        for g in gens:
            q = tuple(p[g[x]] for x in range(deg))
            if q not in index:
                index[q] = len(elems)
                elems.append(q)
                queue.append(q)
    table = [[index[tuple(p[q[x]] for x in range(deg))] for q in elems] for p in elems]
    return FiniteGroup(table, name)


def alternating(m: int) -> FiniteGroup:
    if m < 3:
        return trivial_group()
    gens = [tuple([1, 2, 0] + list(range(3, m)))]
    if m > 3:
        if m % 2:
            gens.append(tuple(list(range(1, m)) + [0]))
        else:
            gens.append(tuple([0] + list(range(2, m)) + [1]))
    return from_permutations(gens, f"A{m}")


def symmetric(m: int) -> FiniteGroup:
    if m < 2:
        return trivial_group()
    gens = [tuple([1, 0] + list(range(2, m))), tuple(list(range(1, m)) + [0])]
    return from_permutations(gens, f"S{m}")


def dicyclic(n: int) -> FiniteGroup:
    """Dicyclic group of order n (n divisible by 4); Q8 for n = 8."""
    if n % 4 or n < 8:
        raise ParameterError("dicyclic groups have order divisible by 4 and at least 8")
    m = n // 2  # <a> has order m, x^2 = a^(m/2), x a x^-1 = a^-1
    # element a^i x^j -> index i*2 + j
    def mult(i1, j1, i2, j2):
        if j1 == 0:
            return (i1 + i2) % m, j2
        i = (i1 - i2) % m
        if j2 == 0:
            return i, 1
        return (i + m // 2) % m, 0
    table = [[0] * n for _ in range(n)]
    for i1 in range(m):
        for j1 in range(2):
            for i2 in range(m):
                for j2 in range(2):
                    i, j = mult(i1, j1, i2, j2)
                    table[i1 * 2 + j1][i2 * 2 + j2] = i * 2 + j
    return FiniteGroup(table, "Q8" if n == 8 else f"Dic{n // 4}")


def from_table(table, name: str = "") -> FiniteGroup:
    """Accept any Cayley table, relabelling so the identity is element 0."""
    t = np.array(table, dtype=np.int64)
    n = t.shape[0]
    ident = [e for e in range(n) if np.array_equal(t[e], np.arange(n))]
    if len(ident) != 1:
        raise ValidationError("table has no identity element")
    e = ident[0]
    if e == 0:
        return FiniteGroup(t, name)
    perm = list(range(n))
    perm[0], perm[e] = e, 0
    inv = perm  # a transposition is its own inverse
    return FiniteGroup([[inv[t[perm[x], perm[y]]] for y in range(n)] for x in range(n)], name)


# -- structure -------------------------------------------------------------------

def abelian_invariants(A: FiniteGroup) -> tuple[int, ...]:
    """Prime-power orders of the cyclic factors of an abelian group, sorted."""
    if not A.is_abelian():
        raise ParameterError(f"{A.name} is not abelian")
    orders = A.element_orders
    out = []
    for q in prime_factors(A.order):
        # |A[q^i]| = q^(sum_j min(i, e_j)) determines the exponents e_j
        sizes = [1]
        i = 1
        while True:
            s = sum(1 for o in orders if (q ** i) % o == 0)
            sizes.append(s)
            if s == sizes[-2] and i > 1:
                break
            i += 1
        logs = [round(np.log(s) / np.log(q)) for s in sizes]
        ranks = [logs[i] - logs[i - 1] for i in range(1, len(logs))]  # #{j : e_j >= i}
        ranks.append(0)
        for i in range(1, len(ranks)):
            cnt = ranks[i - 1] - ranks[i]
            out += [q ** i] * cnt
    return tuple(sorted(out))


def abelian_basis(A: FiniteGroup, q: int) -> list[tuple[int, int]]:
    """A basis of the Sylow q-subgroup of abelian A as (element, order) pairs."""
    orders = A.element_orders
    sylow = [a for a in range(A.order) if _is_power_of(orders[a], q)]
    basis: list[tuple[int, int]] = []
    span = [0]
    while len(span) < len(sylow):
        span_set = set(span)
        best = None
        for a in sylow:
            # order of a modulo the current span
            x, m = a, 1
            while x not in span_set:
                x = A.mul[x][a]
                m += 1
            if m == orders[a] and (best is None or m > best[1]):
                best = (a, m)
        basis.append(best)
        span = A.generate([b for b, _ in basis])
    return basis


def _is_power_of(m: int, q: int) -> bool:
    while m % q == 0:
        m //= q
    return m == 1


@dataclass(frozen=True)
class GroupStructure:
    center: tuple[int, ...]
    commutator_subgroup: tuple[int, ...]
    abelianization: tuple[int, ...]
    element_orders: tuple[int, ...]


def structure(G: FiniteGroup) -> GroupStructure:
    Gab, _, _ = G.quotient(G.derived_subgroup)
    return GroupStructure(
        center=G.center,
        commutator_subgroup=G.derived_subgroup,
        abelianization=abelian_invariants(Gab),
        element_orders=tuple(G.element_orders),
    )


@dataclass(frozen=True)
class AbelianizationMap:
    """Homomorphisms G -> C_{q^e_i} onto the cyclic factors of the Sylow q-part of G/G'."""

    orders: tuple[int, ...]
    coords: tuple[tuple[int, ...], ...]  # coords[i][g] in Z_{orders[i]}
    generators: tuple[int, ...]          # g_i in G with coords[j][g_i] = delta_ij


def abelianization_map(G: FiniteGroup, q: int) -> AbelianizationMap:
    Gab, proj, reps = G.quotient(G.derived_subgroup)
    basis = abelian_basis(Gab, q)
    if not basis:
        return AbelianizationMap((), (), ())
    sylow_order = 1
    for _, m in basis:
        sylow_order *= m
    other = Gab.order // sylow_order
    # e = 1 mod |A_q|, e = 0 mod |A_q'| projects A onto A_q
    e = other * pow(other, -1, sylow_order)
    coord_of = {}
    for cs in product(*[range(m) for _, m in basis]):
        x = 0
        for (b, _), c in zip(basis, cs):
            x = Gab.mul[x][Gab.power(b, c)]
        coord_of[x] = cs
    coords = []
    for i in range(len(basis)):
        coords.append(tuple(coord_of[Gab.power(proj[g], e)][i] for g in range(G.order)))
    gens = tuple(reps[b] for b, _ in basis)
    return AbelianizationMap(tuple(m for _, m in basis), tuple(coords), gens)


# -- isomorphism ----------------------------------------------------------------

@lru_cache(maxsize=4096)
def _element_invariants(G: FiniteGroup) -> tuple[tuple, ...]:
    orders = G.element_orders
    n = G.order
    sq = Counter(G.mul[a][a] for a in range(n))
    cube = Counter(G.mul[G.mul[a][a]][a] for a in range(n))
    zset = set(G.center)
    return tuple(
        (orders[a], G.centralizer_size(a), sq[a], cube[a], a in zset)
        for a in range(n)
    )


@lru_cache(maxsize=4096)
def group_invariant(G: FiniteGroup) -> tuple:
    """Isomorphism invariant; the leading fields follow the cheap-first prefilter order."""
    Gab, _, _ = G.quotient(G.derived_subgroup)
    return (
        G.order,
        tuple(sorted(Counter(G.element_orders).items())),
        len(G.center),
        len(G.derived_subgroup),
        abelian_invariants(Gab),
        tuple(sorted(Counter(_element_invariants(G)).items())),
    )


def _extend_hom(G1: FiniteGroup, G2: FiniteGroup, gens, images, bijective: bool = True) -> list[int] | None:
    """The homomorphism sending gens[i] to images[i] on <gens>, or None if inconsistent."""
    n = G1.order
    m1, m2 = G1.mul, G2.mul
    phi = [-1] * n
    phi[0] = 0
    used = {0}
    queue = deque([0])
    while queue:
        a = queue.popleft()
        pa = phi[a]
        for g, img in zip(gens, images):
            b = m1[a][g]
            pb = m2[pa][img]
            if phi[b] < 0:
                if bijective and pb in used:
                    return None
                phi[b] = pb
                used.add(pb)
                queue.append(b)
            elif phi[b] != pb:
                return None
    return phi


def _search_homs(G1: FiniteGroup, G2: FiniteGroup, find_all: bool, bijective: bool = True):
    gens = G1.small_generating_set()
    inv1 = _element_invariants(G1)
    inv2 = _element_invariants(G2)
    cand = []
    for g in gens:
        if bijective:
            cand.append([y for y in range(G2.order) if inv2[y] == inv1[g]])
        else:
            cand.append([y for y in range(G2.order) if G1.element_orders[g] % G2.element_orders[y] == 0])
    n = G1.order
    results = []

    def rec(images):
        if len(images) == len(gens):
            phi = _extend_hom(G1, G2, gens, images, bijective)
            if phi is not None and (not bijective or len(set(phi)) == n):
                results.append(phi)
                return not find_all
            return False
        for y in cand[len(images)]:
            trial = images + [y]
            if _extend_hom(G1, G2, gens[:len(trial)], trial, bijective) is None:
                continue
            if rec(trial):
                return True
        return False

    if n == 1:
        return [[0]]
    rec([])
    return results


def random_automorphisms(G: FiniteGroup, count: int, seed: int = 0, preserve: Sequence[int] | None = None,
                         attempts: int = 20000) -> list[tuple[int, ...]]:
    """Up to ``count`` distinct automorphisms drawn at random, optionally fixing a subset setwise.

    Generator images are sampled among elements with matching invariants, so
    this works for groups whose automorphism group is too large to list.
    """
    rng = np.random.default_rng(seed)
    gens = G.small_generating_set()
    inv = _element_invariants(G)
    cand = [[y for y in range(G.order) if inv[y] == inv[g]] for g in gens]
    keep = set(preserve) if preserve is not None else None
    ident = tuple(range(G.order))
    out: dict[tuple[int, ...], None] = {}
    for _ in range(attempts):
        if len(out) >= count:
            break
        images = [c[int(rng.integers(len(c)))] for c in cand]
        phi = _extend_hom(G, G, gens, images)
        if phi is None or len(set(phi)) != G.order:
            continue
        phi = tuple(phi)
        if phi == ident or (keep is not None and {phi[x] for x in keep} != keep):
            continue
        out.setdefault(phi)
    return list(out)


def find_isomorphism(G1: FiniteGroup, G2: FiniteGroup) -> list[int] | None:
    """An isomorphism as a list ``phi[a]``, or None."""
    if G1.order != G2.order or group_invariant(G1) != group_invariant(G2):
        return None
    res = _search_homs(G1, G2, find_all=False)
    return res[0] if res else None


def group_isomorphic(G1: FiniteGroup, G2: FiniteGroup) -> bool:
    if G1.order != G2.order:
        return False
    if group_invariant(G1) != group_invariant(G2):
        return False
    if G1.is_abelian():
        # abelian groups are determined by their invariants
        return True
    return find_isomorphism(G1, G2) is not None


def is_automorphism(G: FiniteGroup, phi: Sequence[int]) -> bool:
    m = G.mul
    return all(phi[m[a][b]] == m[phi[a]][phi[b]] for a in range(G.order) for b in range(G.order))


@lru_cache(maxsize=256)
def automorphisms(G: FiniteGroup) -> tuple[tuple[int, ...], ...]:
    """Every automorphism of G, as image tuples, sorted."""
    return tuple(sorted(tuple(p) for p in _search_homs(G, G, find_all=True)))


def automorphism_generators(G: FiniteGroup) -> list[tuple[int, ...]]:
    auts = automorphisms(G)
    n = G.order
    ident = tuple(range(n))
    gens: list[tuple[int, ...]] = []
    span = {ident}
    for a in auts:
        if a in span:
            continue
        gens.append(a)
        span = set(_closure(gens, n))
        if len(span) == len(auts):
            break
    return gens


def _compose(p, q):
    return tuple(p[x] for x in q)


def _closure(gens, n):
    ident = tuple(range(n))
    seen = {ident}
    queue = deque([ident])
    while queue:
        p = queue.popleft()
        for g in gens:
            r = _compose(g, p)
            if r not in seen:
                seen.add(r)
                queue.append(r)
    return seen


# -- catalog ------------------------------------------------------------------

def _cyclic_extension(M: FiniteGroup, alpha: Sequence[int], m: int, q: int) -> FiniteGroup:
    """<M, t> with t x t^-1 = alpha(x), t^q = m; element x t^i has index x*q + i."""
    nm = M.order
    pows = [list(range(nm))]
    for _ in range(q - 1):
        pows.append([alpha[x] for x in pows[-1]])
    n = nm * q
    table = [[0] * n for _ in range(n)]
    for a in range(nm):
        for i in range(q):
            row = table[a * q + i]
            ai = pows[i]
            for b in range(nm):
                ab = M.mul[a][ai[b]]
                for j in range(q):
                    s = i + j
                    if s >= q:
                        row[b * q + j] = M.mul[ab][m] * q + (s - q)
                    else:
                        row[b * q + j] = ab * q + s
    return FiniteGroup(table, check=False)


def _conjugacy_reps(auts, gens, n, pred):
    """One representative per Aut-conjugacy class among automorphisms satisfying pred."""
    inv_gens = []
    for g in gens:
        ig = [0] * n
        for x, y in enumerate(g):
            ig[y] = x
        inv_gens.append(tuple(ig))
    seen = set()
    reps = []
    for a in auts:
        if a in seen or not pred(a):
            continue
        reps.append(a)
        seen.add(a)
        queue = deque([a])
        while queue:
            b = queue.popleft()
            for g, ig in zip(gens, inv_gens):
                c = _compose(g, _compose(b, ig))
                if c not in seen:
                    seen.add(c)
                    queue.append(c)
    return reps


def _abelian_name(G: FiniteGroup) -> str:
    inv = abelian_invariants(G)
    if not inv:
        return "C1"
    if G.order in G.element_orders:
        return f"C{G.order}"
    parts = []
    for x, c in sorted(Counter(inv).items()):
        parts.append(f"C{x}" if c == 1 else f"C{x}^{c}")
    return "x".join(parts)


def _named_candidates(n: int) -> list[FiniteGroup]:
    out = []
    if n % 2 == 0 and n >= 6:
        out.append(dihedral(n // 2))
    if n == 12:
        out.append(alternating(4))
    if n == 24:
        out += [symmetric(4), direct_product(alternating(4), cyclic(2), name="A4xC2")]
    if n == 36:
        out += [direct_product(alternating(4), cyclic(3), name="A4xC3")]
    for a in range(3, n):
        if n % a == 0:
            b = n // a
            try:
                out.append(semidirect_cyclic(a, b))
            except (ParameterError, ValidationError):
                pass
    if n % 4 == 0 and n >= 8:
        out.append(dicyclic(n))
    for a in range(2, n):
        if n % a == 0 and n // a >= 2:
            for base in (dihedral(a // 2) if a % 2 == 0 and a >= 6 else None,
                         dicyclic(a) if a % 4 == 0 and a >= 8 else None,
                         alternating(4) if a == 12 else None):
                if base is not None:
                    out.append(direct_product(base, cyclic(n // a)))
    return out


@lru_cache(maxsize=None)
def groups_of_order(n: int) -> tuple[FiniteGroup, ...]:
    """All groups of order n up to isomorphism (n < 60), in a fixed order."""
    if n < 1:
        raise ParameterError("order must be positive")
    if n >= 60:
        raise ParameterError("catalog construction assumes solvability; order must be below 60")
    if n == 1:
        return (trivial_group(),)
    if len(prime_factors(n)) == 1 and prime_factors(n)[0] == n:
        return (cyclic(n),)
    found: dict[tuple, list[FiniteGroup]] = {}
    for q in prime_factors(n):
        for M in groups_of_order(n // q):
            auts = automorphisms(M)
            gens = automorphism_generators(M)
            nm = M.order

            def power(a, e):
                r = tuple(range(nm))
                for _ in range(e):
                    r = _compose(a, r)
                return r

            inner = {}
            for g in range(nm):
                inner.setdefault(tuple(M.conj(g, x) for x in range(nm)), []).append(g)

            reps = _conjugacy_reps(auts, gens, nm, lambda a: power(a, q) in inner)
            for alpha in reps:
                for m in inner[power(alpha, q)]:
                    if alpha[m] != m:
                        continue
                    G = _cyclic_extension(M, alpha, m, q)
                    key = group_invariant(G)
                    bucket = found.setdefault(key, [])
                    if not any(group_isomorphic(G, H) for H in bucket):
                        bucket.append(G)
    groups = [G for bucket in found.values() for G in bucket]
    groups.sort(key=lambda G: (not G.is_abelian(), group_invariant(G)))
    named = _named_candidates(n)
    out = []
    for i, G in enumerate(groups):
        G._validate()
        if G.is_abelian():
            name = _abelian_name(G)
        else:
            name = next((H.name for H in named if group_isomorphic(G, H)), f"{n}#{i}")
        G.name = name
        out.append(G)
    return tuple(out)


_FACTOR = re.compile(r"^(?:C(\d+)(?:\^(\d+))?|C(\d+):C(\d+)|D(\d+)|A(\d+)|S(\d+)|Q(\d+)|Dic(\d+))$")


def parse_group(spec: str) -> FiniteGroup:
    """Parse strings such as ``C9``, ``C3xC3``, ``C3^2``, ``C3:C4``, ``A4``, ``D6``,
    ``C2^2xC3``, ``Q8``, ``12#3`` (catalog index) or ``table:<file>``."""
    spec = spec.strip()
    if spec.startswith("table:"):
        path = Path(spec[6:])
        rows = []
        for lineno, ln in enumerate(path.read_text().splitlines(), 1):
            ln = ln.split("#", 1)[0].strip()
            if not ln:
                continue
            try:
                rows.append([int(t) for t in ln.split()])
            except ValueError:
                raise ParseError(f"non-integer entry in {ln!r}", lineno) from None
        return from_table(rows, path.stem)
    m = re.match(r"^(\d+)#(\d+)$", spec)
    if m:
        gs = groups_of_order(int(m.group(1)))
        i = int(m.group(2))
        if i >= len(gs):
            raise ParseError(f"catalog has {len(gs)} groups of order {m.group(1)}")
        return gs[i]
    G = None
    for tok in spec.split("x"):
        f = _FACTOR.match(tok)
        if not f:
            raise ParseError(f"cannot parse group factor {tok!r}")
        c, e, sa, sb, d, a, s, qn, dic = f.groups()
        if c:
            H = cyclic(int(c))
            for _ in range(int(e or 1) - 1):
                H = direct_product(H, cyclic(int(c)))
            if e:
                H.name = f"C{c}^{e}"
        elif sa:
            H = semidirect_cyclic(int(sa), int(sb))
        elif d:
            H = dihedral(int(d))
        elif a:
            H = alternating(int(a))
        elif s:
            H = symmetric(int(s))
        elif qn:
            H = dicyclic(int(qn))
        else:
            H = dicyclic(4 * int(dic))
        G = H if G is None else direct_product(G, H)
    G.name = spec
    return G


# -- central extensions -----------------------------------------------------------

@dataclass
class CentralExtension:
    """E(psi): central extension of C_p by ``base`` with explicit iota, pi, tau."""

    base: FiniteGroup
    p: int
    total: FiniteGroup
    iota: tuple[int, ...]       # iota[u] = element of total
    projection: tuple[int, ...]  # total element -> base element
    section: tuple[int, ...]     # base element -> total element
    cocycle_table: np.ndarray | None = field(default=None, repr=False)

    @cached_property
    def iota_inv(self) -> dict[int, int]:
        return {x: u for u, x in enumerate(self.iota)}

    @property
    def forbidden(self) -> tuple[int, ...]:
        return tuple(sorted(self.iota))

    def cocycle_of_section(self, section: Sequence[int] | None = None) -> np.ndarray:
        """psi_tau(x, y) = iota^-1(tau(x) tau(y) tau(xy)^-1)."""
        tau = self.section if section is None else section
        E, G = self.total, self.base
        n = G.order
        out = np.zeros((n, n), dtype=np.int64)
        ii = self.iota_inv
        for x in range(n):
            tx = tau[x]
            for y in range(n):
                z = E.mul[E.mul[tx][tau[y]]][E.inv[tau[G.mul[x][y]]]]
                try:
                    out[x, y] = ii[z]
                except KeyError:
                    raise ValidationError("section is not compatible with the projection") from None
        return out


def check_cocycle(G: FiniteGroup, table, p: int) -> None:
    t = np.asarray(table, dtype=np.int64) % p
    n = G.order
    if t.shape != (n, n):
        raise ValidationError(f"cocycle table must be {n}x{n}")
    if t[0].any() or t[:, 0].any():
        raise ValidationError("cocycle is not normalized")
    T = G.table
    # psi(x,y) + psi(xy,z) == psi(x,yz) + psi(y,z)
    lhs = t[:, :, None] + t[T[:, :, None], np.arange(n)[None, None, :]]
    rhs = t[np.arange(n)[:, None, None], T[None, :, :]] + t[None, :, :]
    if not np.array_equal(lhs % p, rhs % p):
        raise ValidationError("table fails the cocycle identity")


def build_extension(G: FiniteGroup, p: int, psi) -> CentralExtension:
    """E(psi) on pairs (g, u) with index g*p + u."""
    t = np.asarray(getattr(psi, "table", psi), dtype=np.int64) % p
    check_cocycle(G, t, p)
    n = G.order
    N = n * p
    table = [[0] * N for _ in range(N)]
    for g1 in range(n):
        for g2 in range(n):
            g = G.mul[g1][g2] * p
            c = int(t[g1, g2])
            for u1 in range(p):
                row = table[g1 * p + u1]
                for u2 in range(p):
                    row[g2 * p + u2] = g + (u1 + u2 + c) % p
    E = FiniteGroup(table, f"E({G.name})", check=N <= 64)
    return CentralExtension(
        base=G, p=p, total=E,
        iota=tuple(range(p)),
        projection=tuple(x // p for x in range(N)),
        section=tuple(g * p for g in range(n)),
        cocycle_table=t,
    )


def extension_from_subgroup(E: FiniteGroup, forbidden: Sequence[int]) -> CentralExtension:
    """View E as a central extension of its central subgroup ``forbidden`` (cyclic of prime order)."""
    N = sorted(set(forbidden))
    p = len(N)
    zset = set(E.center)
    if not set(N) <= zset:
        raise ParameterError("forbidden subgroup is not central")
    z = N[1] if p > 1 else 0
    iota = [0]
    for _ in range(p - 1):
        iota.append(E.mul[iota[-1]][z])
    if sorted(iota) != N:
        raise ParameterError("forbidden subgroup is not cyclic of prime order")
    G, proj, reps = E.quotient(N, name=f"{E.name}/C{p}")
    return CentralExtension(base=G, p=p, total=E, iota=tuple(iota),
                            projection=tuple(proj), section=tuple(reps))


def central_subgroups_of_order_p(E: FiniteGroup, p: int) -> list[tuple[int, ...]]:
    if E.order % p:
        raise ParameterError(f"{p} does not divide |E| = {E.order}")
    subs = set()
    for z in E.center:
        if E.element_orders[z] == p:
            subs.add(tuple(sorted(E.generate([z]))))
    return sorted(subs)
