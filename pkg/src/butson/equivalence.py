"""Monomial equivalence of Butson matrices through their associated designs.

Point layout for a matrix of order n and phase k: row point (r, i) has index
r*n + i and column point (s, j) has index n*k + s*n + j.  The expanded design
has entry r + s + H[i, j] (mod k) at ((r, i), (s, j)); the associated design
marks the zeros.  A pair of monomials (M, N) acts on points by

    (r, i) -> (r - a_i, perm_M(i))        (s, j) -> (s + b_j, perm_N(j))

which carries the design of H onto the design of M H N^*.  These permutations
are exactly the ones commuting with the shift w induced by the scalar pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .algebra import Monomial, UnityMatrix, apply_monomials
from .exceptions import ParameterError, ResourceLimit, ValidationError
from .groups import FiniteGroup, group_isomorphic, groups_of_order
from .labeling import Graph, LabelingResult, canonical_labeling
from .permgroup import (
    PermGroup,
    centralizer_orbit,
    conjugate,
    inverse,
    is_identity,
    mul,
    orbit_transversal,
)

ORBIT_LIMIT = 10**7
REGULAR_BOUND = 36


@dataclass(frozen=True)
class ExpandedDesign:
    source: UnityMatrix
    grid: np.ndarray


@dataclass(frozen=True)
class AssociatedDesign:
    source: UnityMatrix
    incidence: np.ndarray


def expanded_design(H: UnityMatrix) -> ExpandedDesign:
    n, k = H.n, H.k
    r = np.arange(k)
    grid = (r[:, None, None, None] + r[None, None, :, None] + H.entries[None, :, None, :]) % k
    return ExpandedDesign(H, grid.reshape(n * k, n * k))


def associated_design(H: UnityMatrix) -> AssociatedDesign:
    return AssociatedDesign(H, (expanded_design(H).grid == 0).astype(np.int8))


def design_graph(H: UnityMatrix | AssociatedDesign) -> Graph:
    """Bipartite graph of the associated design: rows color 0, columns color 1."""
    A = H if isinstance(H, AssociatedDesign) else associated_design(H)
    m = A.incidence.shape[0]
    adj = [[] for _ in range(2 * m)]
    rows, cols = np.nonzero(A.incidence)
    for a, b in zip(rows.tolist(), cols.tolist()):
        adj[a].append(m + b)
        adj[m + b].append(a)
    return Graph(2 * m, colors=[0] * m + [1] * m, adj=adj)


def shift_permutation(n: int, k: int) -> tuple[int, ...]:
    """w: (r, i) -> (r - 1, i) on rows and (s, j) -> (s + 1, j) on columns."""
    m = n * k
    out = [0] * (2 * m)
    for r in range(k):
        for i in range(n):
            out[r * n + i] = ((r - 1) % k) * n + i
            out[m + r * n + i] = m + ((r + 1) % k) * n + i
    return tuple(out)


def theta_embed(M: Monomial, side: str) -> tuple[int, ...]:
    """Permutation of the n*k points on one side induced by a monomial."""
    n, k = M.n, M.k
    out = [0] * (n * k)
    sign = -1 if side == "row" else 1
    if side not in ("row", "col"):
        raise ParameterError("side must be 'row' or 'col'")
    for r in range(k):
        for i in range(n):
            out[r * n + i] = ((r + sign * M.exps[i]) % k) * n + M.perm[i]
    return tuple(out)


def theta_pair(M: Monomial, N: Monomial) -> tuple[int, ...]:
    m = M.n * M.k
    a = theta_embed(M, "row")
    b = theta_embed(N, "col")
    return a + tuple(m + x for x in b)


def commutes_with_shift(g: Sequence[int], n: int, k: int) -> bool:
    w = shift_permutation(n, k)
    return all(g[w[x]] == w[g[x]] for x in range(len(w)))


def theta_inverse(g: Sequence[int], n: int, k: int) -> tuple[Monomial, Monomial]:
    if not commutes_with_shift(g, n, k):
        raise ValidationError("permutation pair is not in the image of the monomial pairs")
    m = n * k
    perm_m, exps_m, perm_n, exps_n = [], [], [], []
    for i in range(n):
        c, pi = divmod(g[i], n)
        perm_m.append(pi)
        exps_m.append((-c) % k)
        c, sj = divmod(g[m + i] - m, n)
        perm_n.append(sj)
        exps_n.append(c % k)
    M = Monomial(tuple(perm_m), tuple(exps_m), k)
    N = Monomial(tuple(perm_n), tuple(exps_n), k)
    if theta_pair(M, N) != tuple(g):
        raise ValidationError("permutation pair does not decode to monomials")
    return M, N


@dataclass(frozen=True)
class EquivalenceWitness:
    """Monomials with row_monomial * H2 * col_monomial^* = H1."""

    row_monomial: Monomial
    col_monomial: Monomial

    def apply(self, H: UnityMatrix) -> UnityMatrix:
        return apply_monomials(H, self.row_monomial, self.col_monomial)

    def __str__(self):
        def fmt(M):
            return f"perm={list(M.perm)} exps={list(M.exps)}"
        return f"row: {fmt(self.row_monomial)}\ncol: {fmt(self.col_monomial)}"


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    witness: EquivalenceWitness | None = None

    def __bool__(self):
        return self.equivalent


class Prepared:
    """A matrix with its design graph, canonical labeling and automorphisms."""

    def __init__(self, H: UnityMatrix):
        self.H = H
        self.graph = design_graph(H)

    @cached_property
    def labeling(self) -> LabelingResult:
        return canonical_labeling(self.graph)

    @property
    def certificate(self) -> bytes:
        return self.labeling.certificate

    @property
    def design_group(self) -> PermGroup:
        return self.labeling.group

    @cached_property
    def shift_orbit(self):
        w = shift_permutation(self.H.n, self.H.k)
        parent = centralizer_orbit(self.design_group, w, ORBIT_LIMIT)
        if parent is None:
            raise ResourceLimit(f"shift orbit under the design group exceeds {ORBIT_LIMIT}")
        return parent

    @cached_property
    def monomial_group(self) -> PermGroup:
        """Design automorphisms commuting with the shift: the image of Aut(H)."""
        U = monomial_intersection(self.design_group, self.H.n, self.H.k, self.shift_orbit)
        if U.order * len(self.shift_orbit) != self.design_group.order:
            raise AssertionError("orbit-stabilizer mismatch")
        return U

    @property
    def aut_order(self) -> int:
        return self.monomial_group.order


def graph_automorphisms(A: UnityMatrix | AssociatedDesign) -> PermGroup:
    H = A.source if isinstance(A, AssociatedDesign) else A
    return Prepared(H).design_group


def monomial_intersection(G1: PermGroup, n: int, k: int, parent=None) -> PermGroup:
    """Elements of G1 (on 2nk points) commuting with the shift pair.

    Schreier generators of the stabilizer of w in the conjugation action.
    """
    if parent is None:
        parent = centralizer_orbit(G1, shift_permutation(n, k), ORBIT_LIMIT)
    if parent is None:
        raise ResourceLimit(f"shift orbit exceeds {ORBIT_LIMIT}")
    tmap = {y: orbit_transversal(G1, parent, y) for y in parent}
    gens = set()
    for x, tx in tmap.items():
        for g in G1.generators:
            s = mul(inverse(tmap[conjugate(g, x)]), mul(g, tx))
            if not is_identity(s):
                gens.add(s)
    return PermGroup(G1.degree, sorted(gens))


def automorphism_group_order(H: UnityMatrix) -> int:
    return Prepared(H).aut_order


def canonical_certificate(H: UnityMatrix) -> bytes:
    return Prepared(H).certificate


def _decide(p1: Prepared, p2: Prepared) -> EquivalenceResult:
    H1, H2 = p1.H, p2.H
    if (H1.n, H1.k) != (H2.n, H2.k):
        raise ParameterError("matrices differ in order or phase")
    if p1.certificate != p2.certificate:
        return EquivalenceResult(False)
    # sigma maps the design graph of H1 onto that of H2
    inv2 = [0] * p2.graph.n
    for v, i in enumerate(p2.labeling.labeling):
        inv2[i] = v
    sigma = tuple(inv2[p1.labeling.labeling[v]] for v in range(p1.graph.n))
    w = shift_permutation(H1.n, H1.k)
    target = mul(inverse(sigma), mul(w, sigma))
    parent = p1.shift_orbit
    if target not in parent:
        return EquivalenceResult(False)
    t = orbit_transversal(p1.design_group, parent, target)
    m = mul(sigma, t)
    M, N = theta_inverse(m, H1.n, H1.k)
    if apply_monomials(H1, M, N) != H2:
        raise AssertionError("decoded monomials fail to map the matrices")
    witness = EquivalenceWitness(M.inverse(), N.inverse())
    if witness.apply(H2) != H1:
        raise AssertionError("witness verification failed")
    return EquivalenceResult(True, witness)


def are_equivalent(H1: UnityMatrix, H2: UnityMatrix) -> EquivalenceResult:
    if (H1.n, H1.k) != (H2.n, H2.k):
        raise ParameterError("matrices differ in order or phase")
    return _decide(Prepared(H1), Prepared(H2))


@dataclass
class EquivalenceClass:
    representative: int
    members: list[int] = field(default_factory=list)
    certificate: bytes = b""
    aut_order: int = 0
    witnesses: dict = field(default_factory=dict)


def classify_up_to_equivalence(matrices: Sequence[UnityMatrix], prepared=None) -> list[EquivalenceClass]:
    """Partition into classes, in order of first appearance."""
    if not matrices:
        return []
    nk = {(H.n, H.k) for H in matrices}
    if len(nk) > 1:
        raise ParameterError("matrices differ in order or phase")
    preps = prepared or [Prepared(H) for H in matrices]
    classes: list[EquivalenceClass] = []
    by_cert: dict[bytes, list[EquivalenceClass]] = {}
    seen: dict[UnityMatrix, EquivalenceClass] = {}
    for idx, (H, pr) in enumerate(zip(matrices, preps)):
        if H in seen:
            seen[H].members.append(idx)
            continue
        placed = None
        for cl in by_cert.get(pr.certificate, []):
            res = _decide(preps[cl.representative], pr)
            if res.equivalent:
                cl.members.append(idx)
                cl.witnesses[idx] = res.witness
                placed = cl
                break
        if placed is None:
            placed = EquivalenceClass(idx, [idx], pr.certificate, pr.aut_order)
            classes.append(placed)
            by_cert.setdefault(pr.certificate, []).append(placed)
        seen[H] = placed
    return classes


# -- centrally regular subgroups ---------------------------------------------------


def _closure(gens, limit: int, ok) -> frozenset | None:
    elems = {tuple(range(len(gens[0])))}
    frontier = list(elems)
    gens = list(gens)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = mul(g, x)
                if y not in elems:
                    if not ok(y):
                        return None
                    elems.add(y)
                    if len(elems) > limit:
                        return None
                    nxt.append(y)
        frontier = nxt
    return frozenset(elems)


def _quotient_group(elems: Sequence[tuple], w: tuple) -> FiniteGroup:
    idx = {g: i for i, g in enumerate(elems)}
    table = [[idx[mul(a, b)] for b in elems] for a in elems]
    S = FiniteGroup(table, check=False)
    wsub = S.generate([idx[w]])
    return S.quotient(wsub)[0]


def identify_group(G: FiniteGroup) -> str:
    for H in groups_of_order(G.order):
        if group_isomorphic(G, H):
            return H.name
    raise ValidationError("group not found in the catalog")


def find_centrally_regular_subgroups(H: UnityMatrix, bound: int = REGULAR_BOUND):
    """Regular subgroups of the monomial automorphisms containing the shift.

    Returns a list of (elements, indexing group name, indexing group), sorted
    by name and then by elements.  Raises ResourceLimit when n*k > bound.
    """
    n, k = H.n, H.k
    m = n * k
    if m > bound:
        raise ResourceLimit(f"n*k = {m} exceeds the bound {bound}; not attempted")
    U = Prepared(H).monomial_group
    w = shift_permutation(n, k)

    def free(g):
        return all(g[x] != x for x in range(2 * m))

    by_image: dict[int, list] = {}
    for g in U.elements():
        if free(g):
            by_image.setdefault(g[0], []).append(g)
    for v in by_image.values():
        v.sort()
    found: set[frozenset] = set()
    visited: set[frozenset] = set()

    def rec(S: frozenset, gens: list):
        if S in visited:
            return
        visited.add(S)
        if len(S) == m:
            found.add(S)
            return
        reached = {g[0] for g in S}
        r = next(x for x in range(m) if x not in reached)
        for g in by_image.get(r, []):
            T = _closure(gens + [g], m, free)
            if T is not None and m % len(T) == 0:
                rec(T, gens + [g])

    rec(_closure([w], m, free), [w])
    out = []
    for S in found:
        elems = sorted(S)
        Q = _quotient_group(elems, w)
        out.append((tuple(elems), identify_group(Q), Q))
    out.sort(key=lambda t: (t[1], t[0]))
    return out


def indexing_groups(H: UnityMatrix, bound: int = REGULAR_BOUND) -> list[str]:
    return sorted({name for _, name, _ in find_centrally_regular_subgroups(H, bound)})
