"""Cocycles G x G -> C_p in additive (exponent) notation.

A normalized cocycle is an n x n table psi over Z_p with psi[0, :] = psi[:, 0] = 0
and psi(x,y) + psi(xy,z) = psi(x,yz) + psi(y,z).  Coboundaries are
d(phi)(x,y) = phi(xy) - phi(x) - phi(y).  Tables are indexed by the group's
element indices, identity first, so developments are normalized matrices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from . import gfp
from .algebra import UnityMatrix, from_text, is_prime, to_text
from .exceptions import ParameterError, ParseError, ResourceLimit, ValidationError
from .groups import (
    FiniteGroup,
    abelianization_map,
    build_extension,
    check_cocycle,
    cyclic,
    direct_product,
    parse_group,
)
from .search import transversal_search

EXHAUSTIVE_BUDGET = 16


@dataclass(frozen=True, eq=False)
class Cocycle:
    group: FiniteGroup
    modulus: int
    table: np.ndarray

    def __post_init__(self):
        t = np.array(self.table, dtype=np.int64) % self.modulus
        check_cocycle(self.group, t, self.modulus)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def p(self) -> int:
        return self.modulus

    @property
    def order(self) -> int:
        return self.group.order

    def __eq__(self, other):
        return (isinstance(other, Cocycle) and self.group is other.group
                and self.modulus == other.modulus and np.array_equal(self.table, other.table))

    def __hash__(self):
        return hash((id(self.group), self.modulus, self.table.tobytes()))

    def __repr__(self):
        return f"Cocycle({self.group.name}, p={self.modulus})"

    def key(self) -> tuple[int, ...]:
        return tuple(self.table.ravel().tolist())

    def __add__(self, other: "Cocycle") -> "Cocycle":
        if other.group is not self.group or other.modulus != self.modulus:
            raise ParameterError("cocycles live over different groups or moduli")
        return Cocycle(self.group, self.modulus, self.table + other.table)


def _trusted(G: FiniteGroup, p: int, table: np.ndarray) -> Cocycle:
    # skip the cubic identity check for tables produced by linear algebra we control
    c = object.__new__(Cocycle)
    t = np.asarray(table, dtype=np.int64) % p
    t.setflags(write=False)
    object.__setattr__(c, "group", G)
    object.__setattr__(c, "modulus", p)
    object.__setattr__(c, "table", t)
    return c


def zero_cocycle(G: FiniteGroup, p: int) -> Cocycle:
    return _trusted(G, p, np.zeros((G.order, G.order), dtype=np.int64))


def coboundary(G: FiniteGroup, p: int, phi) -> Cocycle:
    """d(phi)(x, y) = phi(xy) - phi(x) - phi(y); phi must vanish at the identity."""
    phi = np.asarray(phi, dtype=np.int64) % p
    if phi.shape != (G.order,) or phi[0]:
        raise ValidationError("phi must be a normalized map on the group")
    t = phi[G.table] - phi[:, None] - phi[None, :]
    return _trusted(G, p, t)


def fourier_cocycle(p: int) -> Cocycle:
    """psi(i, j) = ij over C_p; its development is the Fourier matrix of order p."""
    a = np.arange(p)
    return Cocycle(cyclic(p), p, np.outer(a, a))


def develop(psi: Cocycle) -> UnityMatrix:
    return UnityMatrix(psi.modulus, psi.table)


def is_orthogonal(psi: Cocycle) -> bool:
    """Every non-initial row of the development hits each exponent n/p times."""
    n, p = psi.order, psi.modulus
    if n % p:
        raise ParameterError(f"{p} does not divide |G| = {n}")
    t = psi.table[1:]
    counts = np.stack([(t == v).sum(axis=1) for v in range(p)])
    return bool(np.all(counts == n // p))


def shift(psi: Cocycle, g: int) -> Cocycle:
    """(psi . g)(x, y) = psi(gx, y) - psi(g, y); a right action on each class."""
    G = psi.group
    t = psi.table
    return _trusted(G, psi.modulus, t[G.table[g]] - t[g][None, :])


def shift_orbit(psi: Cocycle) -> list[Cocycle]:
    seen = {}
    for g in range(psi.order):
        c = shift(psi, g)
        seen.setdefault(c.key(), c)
    return [seen[k] for k in sorted(seen)]


def shift_orbits(cocycles) -> list[list[Cocycle]]:
    """Partition a shift-closed collection of cocycles into orbits."""
    remaining = {c.key(): c for c in cocycles}
    orbits = []
    for k in sorted(remaining):
        if k not in remaining:
            continue
        orb = shift_orbit(remaining[k])
        for c in orb:
            if c.key() not in remaining:
                raise ValidationError("collection is not closed under the shift action")
            del remaining[c.key()]
        orbits.append(orb)
    return orbits


def kronecker_cocycle(psi1: Cocycle, psi2: Cocycle) -> Cocycle:
    """psi((a,b),(x,y)) = psi1(a,x) + psi2(b,y) over G1 x G2 (index a*|G2| + b)."""
    if psi1.modulus != psi2.modulus:
        raise ParameterError("cocycles have different moduli")
    n1, n2 = psi1.order, psi2.order
    t = (psi1.table[:, None, :, None] + psi2.table[None, :, None, :]).reshape(n1 * n2, n1 * n2)
    G = direct_product(psi1.group, psi2.group)
    return _trusted(G, psi1.modulus, t)


# -- the space Z(G, C_p) -----------------------------------------------------------


def _equations(G: FiniteGroup):
    """Rows of the linear system in the unknowns psi(x, y), x, y != 1."""
    n = G.order
    m = n - 1
    T = G.table
    ys, zs = np.meshgrid(np.arange(1, n), np.arange(1, n), indexing="ij")
    ys, zs = ys.ravel(), zs.ravel()
    rows = np.arange(len(ys))
    for x in range(1, n):
        block = np.zeros((len(ys), m * m), dtype=np.int64)
        xy, yz = T[x, ys], T[ys, zs]
        terms = ((x, ys, 1), (xy, zs, 1), (x, yz, -1), (ys, zs, -1))
        for a, b, sign in terms:
            a = np.broadcast_to(a, ys.shape)
            live = (a != 0) & (b != 0)
            np.add.at(block, (rows[live], (a[live] - 1) * m + (b[live] - 1)), sign)
        yield block


def _embed(vecs: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((len(vecs), n, n), dtype=np.int64)
    out[:, 1:, 1:] = vecs.reshape(len(vecs), n - 1, n - 1)
    return out


@dataclass(frozen=True, eq=False)
class CocycleSpace:
    group: FiniteGroup
    modulus: int
    basis_z: np.ndarray      # rows are flattened n x n tables
    basis_b: np.ndarray
    complement: np.ndarray   # maps isomorphically onto H = Z/B

    @property
    def dim_z(self) -> int:
        return len(self.basis_z)

    @property
    def dim_b(self) -> int:
        return len(self.basis_b)

    @property
    def dim_h(self) -> int:
        return len(self.complement)

    @property
    def basis_Z(self) -> list[Cocycle]:
        n = self.group.order
        return [_trusted(self.group, self.modulus, v.reshape(n, n)) for v in self.basis_z]

    @property
    def basis_B(self) -> list[Cocycle]:
        n = self.group.order
        return [_trusted(self.group, self.modulus, v.reshape(n, n)) for v in self.basis_b]

    def combination(self, coeffs, basis: np.ndarray | None = None) -> Cocycle:
        basis = self.basis_z if basis is None else basis
        n = self.group.order
        v = np.asarray(coeffs, dtype=np.int64) @ basis if len(basis) else np.zeros(n * n, dtype=np.int64)
        return _trusted(self.group, self.modulus, v.reshape(n, n))

    @property
    def cohomology_reps(self) -> list[Cocycle]:
        """One cocycle per class, in lexicographic order of complement coordinates."""
        return [self.combination(c, self.complement)
                for c in itertools.product(range(self.modulus), repeat=self.dim_h)]

    @cached_property
    def _coords(self) -> gfp.Coordinates:
        stacked = np.vstack([self.basis_b, self.complement]) if self.dim_z else self.basis_z
        return gfp.Coordinates(stacked, self.modulus)

    def class_of(self, psi: Cocycle) -> tuple[int, ...]:
        """Coordinates of the cohomology class of psi relative to the complement basis."""
        if self.dim_z == 0:
            return ()
        c = self._coords(psi.table.ravel())[0]
        return tuple(int(x) for x in c[self.dim_b:])

    def is_coboundary(self, psi: Cocycle) -> bool:
        return not any(self.class_of(psi))

    def contains(self, table) -> bool:
        v = np.asarray(table, dtype=np.int64).ravel() % self.modulus
        if self.dim_z == 0:
            return not v.any()
        try:
            self._coords(v)
        except ValueError:
            return False
        return True


_SPACES: dict[tuple[int, int], CocycleSpace] = {}


def compute_cocycle_space(G: FiniteGroup, p: int) -> CocycleSpace:
    if not is_prime(p):
        raise ParameterError(f"{p} is not prime")
    key = (id(G), p)
    if key in _SPACES and _SPACES[key].group is G:
        return _SPACES[key]
    n = G.order
    if n == 1:
        empty = np.zeros((0, 1), dtype=np.int64)
        space = CocycleSpace(G, p, empty, empty, empty)
        _SPACES[key] = space
        return space
    null = gfp.nullspace_of_equations(
        (row for block in _equations(G) for row in block), (n - 1) ** 2, p)
    basis_z = _embed(null, n).reshape(len(null), n * n)
    deltas = np.zeros((n - 1, n * n), dtype=np.int64)
    for g in range(1, n):
        phi = np.zeros(n, dtype=np.int64)
        phi[g] = 1
        deltas[g - 1] = coboundary(G, p, phi).table.ravel()
    bspace = gfp.RowSpace(n * n, p)
    bspace.add(deltas)
    basis_b = bspace.basis.copy()
    complement = []
    for v in basis_z:
        if bspace.add(v[None, :]):
            complement.append(v)
    complement = np.array(complement, dtype=np.int64).reshape(len(complement), n * n)
    space = CocycleSpace(G, p, basis_z, basis_b, complement)
    _SPACES[key] = space
    return space


def inflation_cocycles(G: FiniteGroup, p: int) -> list[Cocycle]:
    """Carry cocycles pulled back from the cyclic p-power factors of G/G'.

    For a factor of order q = p**e with coordinate a: G -> Z_q the cocycle is
    psi(x, y) = floor((a(x) + a(y)) / q).  On Z_q itself this is the matrix M
    whose row r (counted from 0) is 0 in columns c < q - r and 1 from there on;
    in particular row 0 is constant.
    """
    amap = abelianization_map(G, p)
    out = []
    for q, coord in zip(amap.orders, amap.coords):
        a = np.asarray(coord, dtype=np.int64)
        t = (a[:, None] + a[None, :]) // q
        out.append(_trusted(G, p, t))
    return out


def carry_matrix(q: int) -> np.ndarray:
    """floor((x + y) / q) on C_q; row and column 0 are zero (normalized)."""
    a = np.arange(q)
    return (a[:, None] + a[None, :]) // q


def inflation_representatives(G: FiniteGroup, p: int) -> list[UnityMatrix]:
    return [develop(c) for c in inflation_cocycles(G, p)]


# -- orthogonal cocycles -----------------------------------------------------------


def _balanced_rows(tables: np.ndarray, n: int, p: int) -> np.ndarray:
    """Boolean mask of tables (shape (m, n*n)) whose rows 1.. are balanced."""
    lam = n // p
    alive = np.arange(len(tables))
    for x in range(1, n):
        if not len(alive):
            break
        seg = tables[alive, x * n:(x + 1) * n]
        ok = np.ones(len(alive), dtype=bool)
        for v in range(p - 1):
            ok &= (seg == v).sum(axis=1) == lam
        alive = alive[ok]
    mask = np.zeros(len(tables), dtype=bool)
    mask[alive] = True
    return mask


def _exhaustive(space: CocycleSpace, budget: int) -> list[Cocycle]:
    G, p = space.group, space.modulus
    n, d = G.order, space.dim_z
    if d > budget:
        raise ResourceLimit(f"dim Z = {d} exceeds the exhaustive budget {budget}")
    basis = space.basis_z.astype(np.int16)
    low = min(d, max(1, int(np.log(2e6 / (n * n)) / np.log(p))))
    high = d - low
    coeffs = np.array(list(itertools.product(range(p), repeat=low)), dtype=np.int16).reshape(-1, low)
    low_tables = (coeffs @ basis[high:]) % p if low else np.zeros((1, n * n), dtype=np.int16)
    found = []
    for hc in itertools.product(range(p), repeat=high):
        off = (np.asarray(hc, dtype=np.int16) @ basis[:high]) % p if high else 0
        tables = (low_tables + off) % p
        for t in tables[_balanced_rows(tables, n, p)]:
            found.append(_trusted(G, p, t.reshape(n, n)))
    found.sort(key=Cocycle.key)
    return found


def _section_search(psi0: Cocycle, find_all: bool = True) -> list[np.ndarray]:
    """Maps u: G -> Z_p with psi0 - d(u) orthogonal, one per cocycle.

    Orthogonal members of psi0 + B correspond to transversals of C_p in
    E(psi0) with balanced quotients.  Adding a homomorphism G -> C_p to u leaves
    d(u) unchanged, so u is pinned to 0 on a basis of G/(G' G^p).
    """
    G, p = psi0.group, psi0.modulus
    n = G.order
    ext = build_extension(G, p, psi0.table)
    amap = abelianization_map(G, p)
    pinned = set(amap.generators)
    cosets = []
    for g in range(n):
        if g == 0 or g in pinned:
            cosets.append([g * p])
        else:
            cosets.append([g * p + u for u in range(p)])
    sols = transversal_search(ext.total.table, ext.total.inv, cosets, n // p, find_all=find_all)
    return [np.array([d % p for d in sol], dtype=np.int64) for sol in sols]


def _class_search(psi0: Cocycle, find_all: bool = True) -> list[Cocycle]:
    """Orthogonal members of the class psi0 + B, each exactly once."""
    G, p = psi0.group, psi0.modulus
    # section tau(g) = (g, u_g) gives psi0 + u_x + u_y - u_xy
    return [_trusted(G, p, psi0.table - coboundary(G, p, u).table)
            for u in _section_search(psi0, find_all)]


def group_developed_function(G: FiniteGroup, p: int) -> np.ndarray | None:
    """Some h: G -> Z_p with [h(xy)] a Butson matrix, or None."""
    if G.order % p:
        raise ParameterError(f"{p} does not divide |G| = {G.order}")
    sols = _section_search(zero_cocycle(G, p), find_all=False)
    # zero - d(u) = d(-u), which is [h(xy)] rescaled by diagonals for h = -u
    return (-sols[0]) % p if sols else None


def orthogonal_cocycles(G: FiniteGroup, p: int, mode: str = "exhaustive",
                        budget: int = EXHAUSTIVE_BUDGET) -> list[Cocycle]:
    """All orthogonal elements of Z(G, C_p), sorted by table.

    ``exhaustive`` walks the whole space with vectorized row-balance filtering
    and raises ResourceLimit beyond ``budget`` dimensions.  ``shift_orbit``
    walks cohomology classes and searches each coboundary coset by
    backtracking; the result is closed under the shift action.
    """
    if G.order % p:
        raise ParameterError(f"{p} does not divide |G| = {G.order}")
    space = compute_cocycle_space(G, p)
    if mode == "exhaustive":
        return _exhaustive(space, budget)
    if mode == "shift_orbit":
        found = []
        for psi0 in space.cohomology_reps:
            found += _class_search(psi0)
        found.sort(key=Cocycle.key)
        return found
    raise ParameterError(f"unknown mode {mode!r}")


def has_orthogonal_cocycle(G: FiniteGroup, p: int) -> bool:
    if G.order % p:
        raise ParameterError(f"{p} does not divide |G| = {G.order}")
    space = compute_cocycle_space(G, p)
    return any(_class_search(psi0, find_all=False) for psi0 in space.cohomology_reps)


# -- file format ---------------------------------------------------------------------


def cocycle_to_text(psi: Cocycle, group_spec: str | None = None) -> str:
    spec = group_spec or psi.group.name
    return f"group {spec}\n" + to_text(develop(psi))


def cocycle_from_text(text: str, group: FiniteGroup | None = None) -> Cocycle:
    lines = text.splitlines()
    idx = next((i for i, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")), None)
    if idx is None:
        raise ParseError("empty cocycle file", 1)
    head = lines[idx].split()
    if len(head) != 2 or head[0] != "group":
        raise ParseError("expected 'group <spec>'", idx + 1)
    if group is None:
        try:
            group = parse_group(head[1])
        except ValueError as exc:
            raise ParseError(str(exc), idx + 1) from None
    H = from_text("\n".join(lines[idx + 1:]), first_line=idx + 2)
    if H.n != group.order:
        raise ParseError(f"table is {H.n}x{H.n} but the group has order {group.order}", idx + 2)
    try:
        return Cocycle(group, H.k, H.entries)
    except ValidationError as exc:
        raise ParseError(str(exc), idx + 2) from None


def load_cocycle(path: str | Path) -> Cocycle:
    return cocycle_from_text(Path(path).read_text())
