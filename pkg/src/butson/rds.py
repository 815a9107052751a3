"""Central relative difference sets with parameters (n, p, n, n/p).

A transversal R of a central subgroup N = C_p in a group E of order np is a
relative difference set when every element of E outside N occurs exactly n/p
times as a quotient d d'^-1 (d != d' in R).  Using R as a section of E -> E/N
gives an orthogonal cocycle, hence a cocyclic Butson matrix, and conversely.
"""

from __future__ import annotations

import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .algebra import UnityMatrix, is_prime
from .cocycles import Cocycle, compute_cocycle_space, develop
from .exceptions import ParameterError, ResourceLimit, ValidationError
from .groups import (
    CentralExtension,
    FiniteGroup,
    abelianization_map,
    automorphism_generators,
    build_extension,
    extension_from_subgroup,
    groups_of_order,
    random_automorphisms,
)
from .search import split_prefixes, transversal_search


@dataclass(frozen=True)
class RelativeDifferenceSet:
    extension: CentralExtension
    elements: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.extension.base.order

    @property
    def p(self) -> int:
        return self.extension.p

    def to_record(self, group_spec: str | None = None) -> dict:
        ext = self.extension
        return {
            "group": group_spec or ext.total.name,
            "forbidden_generator": ext.iota[1] if ext.p > 1 else 0,
            "elements": list(self.elements),
        }


def _as_extension(E, forbidden=None) -> CentralExtension:
    if isinstance(E, CentralExtension):
        return E
    if forbidden is None:
        raise ParameterError("a forbidden subgroup is required")
    return extension_from_subgroup(E, forbidden)


def _cosets(ext: CentralExtension) -> list[list[int]]:
    n = ext.base.order
    buckets: list[list[int]] = [[] for _ in range(n)]
    for x, g in enumerate(ext.projection):
        buckets[g].append(x)
    buckets.sort(key=min)
    buckets[0] = [0]  # d_1 is the identity
    return buckets


def _check_parameters(ext: CentralExtension):
    n, p = ext.base.order, ext.p
    if not is_prime(p):
        raise ParameterError(f"{p} is not prime")
    if n % p:
        raise ParameterError(f"{p} does not divide n = {n}")
    if ext.total.order != n * p:
        raise ParameterError("extension order is not n*p")
    center = set(ext.total.center)
    if not set(ext.iota) <= center:
        raise ParameterError("forbidden subgroup is not central")


def _job(args):
    table, inv, cosets, lam, find_all, prefix, constraints = args
    return transversal_search(table, inv, cosets, lam, find_all=find_all, prefix=prefix,
                              constraints=constraints)


def rds_search(E: FiniteGroup | CentralExtension, p: int | None = None, forbidden: Sequence[int] | None = None,
               mode: str = "find_all", jobs: int = 1, checkpoint: str | Path | None = None,
               split_depth: int = 2, prune: bool = True, pin: bool = False) -> list[RelativeDifferenceSet]:
    """Backtracking search; every returned set contains the identity.

    With ``pin`` only one set per orbit of the central automorphisms
    x -> x phi(x N), phi in Hom(E/N, N), is returned.  Sets in one orbit have
    the same cocycle, hence the same matrix.

    With ``prune`` the search is cut by quotient signatures and the cosets are
    visited grouped by the largest such quotient.  With ``jobs > 1`` the
    subtrees below the first ``split_depth`` cosets are searched in worker
    processes.  ``checkpoint`` names a JSON file recording finished subtrees,
    so an interrupted run resumes where it stopped.
    """
    ext = _as_extension(E, forbidden)
    if p is not None and p != ext.p:
        raise ParameterError("p does not match the forbidden subgroup")
    _check_parameters(ext)
    if mode not in ("find_all", "find_one"):
        raise ParameterError(f"unknown mode {mode!r}")
    find_all = mode == "find_all"
    n, p = ext.base.order, ext.p
    lam = n // p
    cosets = _cosets(ext)
    constraints = signature_constraints(ext) if prune else []
    if constraints:
        key = constraints[0][0]
        cosets = cosets[:1] + sorted(cosets[1:], key=lambda c: (sorted(key[x] for x in c), c))
    if pin:
        basis = set(abelianization_map(ext.base, p).generators)
        cosets = [c[:1] if ext.projection[c[0]] in basis else c for c in cosets]
    table = ext.total.table
    inv = ext.total.inv
    if jobs <= 1 and checkpoint is None:
        sols = transversal_search(table, inv, cosets, lam, find_all=find_all, constraints=constraints)
        return _wrap(ext, sols)
    prefixes = split_prefixes(table, inv, cosets, lam, split_depth)
    done: dict[str, list] = {}
    if checkpoint is not None and Path(checkpoint).exists():
        done = json.loads(Path(checkpoint).read_text())["done"]
    todo = [pre for pre in prefixes if json.dumps(list(pre)) not in done]
    args = [(table, inv, cosets, lam, find_all, pre, constraints) for pre in todo]

    def record(pre, sols):
        done[json.dumps(list(pre))] = [list(s) for s in sols]
        if checkpoint is not None:
            tmp = Path(str(checkpoint) + ".tmp")
            tmp.write_text(json.dumps({"done": done}))
            os.replace(tmp, checkpoint)

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for pre, sols in zip(todo, pool.map(_job, args)):
                record(pre, sols)
                if sols and not find_all:
                    break
    else:
        for pre, a in zip(todo, args):
            sols = _job(a)
            record(pre, sols)
            if sols and not find_all:
                break
    found = sorted({tuple(s) for v in done.values() for s in v})
    if not find_all:
        found = found[:1]
    return _wrap(ext, found)


def _normal_subgroups_avoiding(E: FiniteGroup, forbidden) -> list[tuple[int, ...]]:
    """Proper normal subgroups generated by at most two elements that meet ``forbidden`` trivially."""
    nset = set(forbidden)
    found: dict[tuple[int, ...], bool] = {}
    for a in range(1, E.order):
        for b in range(a, E.order):
            H = tuple(sorted(E.generate([a, b])))
            if H not in found and len(H) < E.order:
                found[H] = len(nset.intersection(H)) == 1 and E.is_normal(H)
    return sorted((H for H, ok in found.items() if ok), key=lambda H: (-len(H), H))


def quotient_signatures(ext: CentralExtension, U: Sequence[int],
                        budget: int | None = None) -> tuple[list[int], list[tuple[int, ...]]] | None:
    """Possible counts of an RDS over the cosets of a normal U with U & N = 1.

    The image F of R in Q = E/U satisfies F F^(-1) = n + lam (|U| Q - N U/U),
    and every coset of NU/U receives exactly |U| elements.  Returns None when
    the enumeration exceeds ``budget`` nodes.
    """
    E = ext.total
    n, p = ext.base.order, ext.p
    lam = n // p
    Q, coset_of, _ = E.quotient(U)
    u = len(U)
    m = Q.order
    nbar = sorted({coset_of[x] for x in ext.iota})
    target = [lam * u] * m
    for x in nbar:
        target[x] -= lam
    target[0] += n
    blocks, seen = [], set()
    for q in range(m):
        if q not in seen:
            blk = sorted({Q.mul[q][z] for z in nbar})
            seen.update(blk)
            blocks.append(blk)
    mul, inv = Q.mul, Q.inv
    f = [0] * m
    conv = [0] * m
    placed: list[int] = []
    out: list[tuple[int, ...]] = []
    nodes = [0]

    def update(q, v, sign):
        ok = True
        for r in placed:
            if f[r]:
                x, y = mul[q][inv[r]], mul[r][inv[q]]
                conv[x] += sign * v * f[r]
                conv[y] += sign * v * f[r]
                ok = ok and conv[x] <= target[x] and conv[y] <= target[y]
        conv[0] += sign * v * v
        return ok and conv[0] <= target[0]

    def rec(bi, pos, left):
        nodes[0] += 1
        if budget is not None and nodes[0] > budget:
            raise ResourceLimit("signature enumeration budget exceeded")
        if bi == len(blocks):
            if conv == target:
                out.append(tuple(f))
            return
        q = blocks[bi][pos]
        last = pos == len(blocks[bi]) - 1
        for v in ([left] if last else range(left + 1)):
            f[q] = v
            ok = update(q, v, 1)
            placed.append(q)
            if ok:
                if last:
                    rec(bi + 1, 0, u)
                else:
                    rec(bi, pos + 1, left - v)
            placed.pop()
            update(q, v, -1)
            f[q] = 0

    try:
        rec(0, 0, u)
    except ResourceLimit:
        return None
    return list(coset_of), out


def signature_constraints(ext: CentralExtension, max_quotient: int | None = None,
                          max_constraints: int = 8, budget: int = 200_000) -> list[tuple[list[int], list[tuple[int, ...]]]]:
    """Signature constraints from normal subgroups avoiding the forbidden subgroup.

    Larger quotients come first; enumerations over ``budget`` nodes are skipped.
    """
    p = ext.p
    max_quotient = max_quotient or p * p
    E = ext.total
    out = []
    for U in _normal_subgroups_avoiding(E, ext.iota):
        if E.order // len(U) > max_quotient or len(out) >= max_constraints:
            continue
        con = quotient_signatures(ext, U, budget)
        if con is not None:
            out.append(con)
    out.sort(key=lambda c: -len(set(c[0])))
    return out


def _wrap(ext, sols) -> list[RelativeDifferenceSet]:
    return [RelativeDifferenceSet(ext, s) for s in sorted({tuple(sorted(s)) for s in sols})]


def verify_rds(R: RelativeDifferenceSet) -> bool:
    """Direct recount of all quotients; independent of the search."""
    ext = R.extension
    E = ext.total
    n, p = ext.base.order, ext.p
    elems = list(R.elements)
    if len(elems) != n or len(set(elems)) != n:
        return False
    if len({ext.projection[d] for d in elems}) != n:
        return False
    forbidden = set(ext.iota)
    counts = np.zeros(E.order, dtype=np.int64)
    for a in elems:
        for b in elems:
            if a != b:
                counts[E.mul[a][E.inv[b]]] += 1
    if any(counts[x] for x in forbidden):
        return False
    return all(counts[x] == n // p for x in range(E.order) if x not in forbidden)


def section_of(R: RelativeDifferenceSet) -> tuple[int, ...]:
    ext = R.extension
    tau = [0] * ext.base.order
    for d in R.elements:
        tau[ext.projection[d]] = d
    return tuple(tau)


def rds_to_matrix(R: RelativeDifferenceSet) -> tuple[UnityMatrix, Cocycle]:
    if not verify_rds(R):
        raise ValidationError("not a relative difference set")
    ext = R.extension
    tau = section_of(R)
    # identity must map to identity for a normalized cocycle
    if tau[0] != 0:
        raise ValidationError("the set must contain the identity")
    psi = Cocycle(ext.base, ext.p, ext.cocycle_of_section(tau))
    return develop(psi), psi


def canonical_transversal(ext: CentralExtension) -> RelativeDifferenceSet:
    """The set {section(g)}; an RDS exactly when the extension's cocycle is orthogonal."""
    return RelativeDifferenceSet(ext, tuple(sorted(ext.section)))


def translate(R: RelativeDifferenceSet, d: int) -> RelativeDifferenceSet:
    """The left translate d R, moved back to contain the identity."""
    E = R.extension.total
    moved = [E.mul[d][r] for r in R.elements]
    anchor = next(x for x in moved if R.extension.projection[x] == 0)
    ia = E.inv[anchor]
    return RelativeDifferenceSet(R.extension, tuple(sorted(E.mul[x][ia] for x in moved)))


def _by_coset(ext: CentralExtension, rows: np.ndarray) -> np.ndarray:
    """Re-index each set so that column g holds its element over g."""
    proj = np.asarray(ext.projection)
    out = np.empty_like(rows)
    np.put_along_axis(out, proj[rows], rows, axis=1)
    return out


class _UnionFind:
    def __init__(self, m: int):
        self.parent = list(range(m))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int):
        a, b = self.find(a), self.find(b)
        if a != b:
            self.parent[max(a, b)] = min(a, b)


def set_orbit_representatives(sets: Sequence[RelativeDifferenceSet], automorphism_count: int = 16,
                              seed: int = 0) -> list[RelativeDifferenceSet]:
    """One set per orbit under translations and automorphisms of E fixing N.

    ``sets`` must be every set through the identity with pinned lifts, as
    returned by ``rds_search(..., pin=True)``.  The group acting is generated
    by left translations, central automorphisms and a seeded sample of
    automorphisms preserving N; sets in one orbit give matrices that agree up
    to equivalence and a Galois conjugation.  The smallest set of each orbit
    is returned.
    """
    if not sets:
        return []
    ext = sets[0].extension
    E = ext.total
    n, p = ext.base.order, ext.p
    mul = np.asarray(E.table, dtype=np.int64)
    inv = np.asarray(E.inv, dtype=np.int64)
    iota = np.asarray(ext.iota, dtype=np.int64)
    ordered = sorted(sets, key=lambda R: R.elements)
    rows = _by_coset(ext, np.array([R.elements for R in ordered], dtype=np.int64))
    index = {r.tobytes(): i for i, r in enumerate(rows)}
    if len(index) != len(rows):
        raise ValidationError("duplicate sets")

    # pinned lift over each coset, and the offset of every element from it
    lift = np.array([min(x for x in range(E.order) if ext.projection[x] == g) for g in range(n)])
    offset = np.zeros(E.order, dtype=np.int64)
    for x in range(E.order):
        offset[x] = ext.iota_inv[int(mul[inv[lift[ext.projection[x]]], x])]
    amap = abelianization_map(ext.base, p)
    basis = list(amap.generators)
    coords = np.array(amap.coords, dtype=np.int64).reshape(len(basis), n) % p

    def normalize(img: np.ndarray) -> np.ndarray:
        img = _by_coset(ext, img)
        if basis:
            shift = (-offset[img[:, basis]]) % p
            phi = (shift @ coords) % p
            img = mul[img, iota[phi]]
        return img

    maps = []
    for d in E.small_generating_set():
        maps.append(("translate", d))
    for a in random_automorphisms(E, automorphism_count, seed, preserve=ext.iota):
        maps.append(("automorphism", np.asarray(a, dtype=np.int64)))

    uf = _UnionFind(len(rows))
    for kind, g in maps:
        if kind == "translate":
            moved = mul[g][rows]
            anchor = moved[np.arange(len(rows)), np.argmax(np.asarray(ext.projection)[moved] == 0, axis=1)]
            img = mul[moved, inv[anchor][:, None]]
        else:
            img = g[rows]
        img = normalize(img)
        for i, r in enumerate(img):
            j = index.get(r.tobytes())
            if j is None:
                raise ValidationError("orbit left the given sets; pass the complete pinned search")
            uf.union(i, j)
    reps = sorted({uf.find(i) for i in range(len(rows))})
    return [ordered[i] for i in reps]


def extension_candidates(n: int, p: int, scalar_reduce: bool = True,
                         aut_reduce: bool = False) -> Iterator[tuple[FiniteGroup, tuple, CentralExtension]]:
    """Every central extension of C_p by a group of order n, one per class.

    Classes differing by a nonzero scalar give isomorphic extensions with the
    same forbidden subgroup, so only the first of each scalar orbit is kept
    when ``scalar_reduce`` is set.  With ``aut_reduce`` the classes are also
    merged along psi -> psi o (a x a) for automorphisms a of the quotient,
    which carries relative difference sets to equivalent ones.
    """
    for G in groups_of_order(n):
        space = compute_cocycle_space(G, p)
        if aut_reduce:
            reps = [(c, space.combination(c, space.complement)) for c in class_orbit_reps(space)]
        else:
            reps = _class_reps(space, scalar_reduce)
        for coords, psi in reps:
            yield G, coords, build_extension(G, p, psi.table)


def _class_reps(space, scalar_reduce):
    p = space.modulus
    for coords in itertools.product(range(p), repeat=space.dim_h):
        if scalar_reduce and any(coords):
            lead = next(c for c in coords if c)
            if lead != 1:
                continue
        yield coords, space.combination(coords, space.complement)


def class_action_matrices(space) -> list[np.ndarray]:
    """Matrices of psi -> psi o (a x a) on class coordinates, one per automorphism generator."""
    G, p = space.group, space.modulus
    mats = []
    for a in automorphism_generators(G):
        a = np.asarray(a)
        rows = []
        for i in range(space.dim_h):
            psi = space.combination(np.eye(space.dim_h, dtype=np.int64)[i], space.complement)
            moved = Cocycle(G, p, psi.table[np.ix_(a, a)])
            rows.append(space.class_of(moved))
        mats.append(np.array(rows, dtype=np.int64).reshape(space.dim_h, space.dim_h))
    return mats


def class_orbit_reps(space) -> list[tuple[int, ...]]:
    """Lexicographically least class of each orbit under automorphisms and nonzero scalars."""
    p, d = space.modulus, space.dim_h
    mats = class_action_matrices(space) if d else []
    seen: set[tuple[int, ...]] = set()
    reps = []
    for start in itertools.product(range(p), repeat=d):
        if start in seen:
            continue
        reps.append(start)
        seen.add(start)
        stack = [start]
        while stack:
            v = np.array(stack.pop(), dtype=np.int64)
            images = [v @ A % p for A in mats] + [v * c % p for c in range(2, p)]
            for w in images:
                t = tuple(int(x) for x in w)
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
    return reps


def canonical_translate(R: RelativeDifferenceSet) -> RelativeDifferenceSet:
    """Least translate d R (moved to contain the identity) over all d."""
    E = R.extension.total
    return min((translate(R, d) for d in range(E.order)), key=lambda T: T.elements)
