"""Exact arithmetic over roots of unity and Butson matrix constructions.

A matrix over the k-th roots of unity is stored by its exponents: the
entry ``e`` stands for ``zeta_k ** e``.  Every test here reduces to
counting exponents, so nothing is ever evaluated in floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Sequence

import numpy as np

from .exceptions import ParameterError, ParseError, ValidationError


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    d = 2
    while d * d <= m:
        if m % d == 0:
            return False
        d += 1
    return True


def prime_factors(m: int) -> list[int]:
    """Distinct primes dividing m, ascending."""
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


# -- cyclotomic polynomials ---------------------------------------------------

def _poly_divmod(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # coefficient lists, lowest degree first; den must be monic
    num = list(num)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return [0], num
    quot = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            quot[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    return quot, num[:dd] or [0]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(k: int) -> tuple[int, ...]:
    """Coefficients of the k-th cyclotomic polynomial, lowest degree first.

    Obtained by dividing x^k - 1 by every Phi_d with d a proper divisor of k.
    """
    if k < 1:
        raise ParameterError("k must be positive")
    poly = [-1] + [0] * (k - 1) + [1]
    for d in range(1, k):
        if k % d == 0:
            poly, rem = _poly_divmod(poly, list(cyclotomic_polynomial(d)))
            assert not any(rem)
    return tuple(poly)


def cyclotomic_is_zero(counts: Sequence[int], k: int) -> bool:
    """True iff sum(counts[i] * zeta_k**i) == 0 exactly."""
    if len(counts) != k:
        raise ParameterError(f"expected {k} coefficients, got {len(counts)}")
    if is_prime(k):
        return all(c == counts[0] for c in counts)
    _, rem = _poly_divmod([int(c) for c in counts], list(cyclotomic_polynomial(k)))
    return not any(rem)


@dataclass(frozen=True)
class CyclotomicCounter:
    """Group-ring element sum(c_i x^i) of Z[C_k], read as a sum of roots of unity."""

    k: int
    counts: tuple[int, ...]

    @classmethod
    def of_exponents(cls, exps, k: int) -> "CyclotomicCounter":
        c = np.bincount(np.asarray(exps, dtype=np.int64) % k, minlength=k)
        return cls(k, tuple(int(x) for x in c))

    def __add__(self, other):
        if self.k != other.k:
            raise ParameterError("phase mismatch")
        return CyclotomicCounter(self.k, tuple(a + b for a, b in zip(self.counts, other.counts)))

    def __mul__(self, other):
        if self.k != other.k:
            raise ParameterError("phase mismatch")
        k = self.k
        out = [0] * k
        for i, a in enumerate(self.counts):
            if a:
                for j, b in enumerate(other.counts):
                    out[(i + j) % k] += a * b
        return CyclotomicCounter(k, tuple(out))

    def conjugate(self):
        k = self.k
        return CyclotomicCounter(k, tuple(self.counts[(-i) % k] for i in range(k)))

    def is_zero(self) -> bool:
        return cyclotomic_is_zero(self.counts, self.k)

    def to_complex(self) -> complex:
        # only for comparisons against floating-point oracles
        z = np.exp(2j * np.pi * np.arange(self.k) / self.k)
        return complex(np.dot(self.counts, z))


# -- matrices -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class UnityMatrix:
    """An n x n matrix of k-th roots of unity, held as an exponent array."""

    k: int
    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=np.int64, copy=True)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] < 1:
            raise ValidationError(f"expected a non-empty square array, got shape {e.shape}")
        if self.k < 2:
            raise ValidationError("phase k must be at least 2")
        if e.min() < 0 or e.max() >= self.k:
            raise ValidationError(f"exponents must lie in [0, {self.k})")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other):
        if not isinstance(other, UnityMatrix):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.k, self.entries.tobytes()))

    def __repr__(self):
        return f"UnityMatrix(n={self.n}, k={self.k})"

    def rows(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in r) for r in self.entries]

    def to_complex(self) -> np.ndarray:
        return np.exp(2j * np.pi * self.entries / self.k)


def unity_matrix(rows, k: int) -> UnityMatrix:
    return UnityMatrix(k, np.asarray(rows, dtype=np.int64))


def _pair_counts(H: UnityMatrix) -> np.ndarray:
    # counts[r, s, e] = #{i : e_ri - e_si = e mod k}
    e = H.entries
    k = H.k
    diff = (e[:, None, :] - e[None, :, :]) % k
    return np.stack([(diff == v).sum(axis=2) for v in range(k)], axis=2)


def is_butson(H: UnityMatrix) -> bool:
    """True iff H H^* = n I exactly."""
    n, k = H.n, H.k
    counts = _pair_counts(H)
    r, s = np.triu_indices(n, 1)
    off = counts[r, s]
    if is_prime(k):
        return bool(np.all(off == off[:, :1]))
    return all(cyclotomic_is_zero(row, k) for row in off.tolist())


def is_generalized_hadamard(H: UnityMatrix) -> bool:
    """True iff H is a GH(n, C_k): every row quotient is balanced over Z_k."""
    n, k = H.n, H.k
    if n % k:
        raise ParameterError(f"k={k} does not divide n={n}")
    counts = _pair_counts(H)
    r, s = np.triu_indices(n, 1)
    return bool(np.all(counts[r, s] == n // k))


def is_row_balanced(H: UnityMatrix) -> bool:
    """Every non-initial row holds each exponent exactly n/k times."""
    n, k = H.n, H.k
    if n % k:
        return False
    e = H.entries[1:]
    return all(bool(np.all(np.bincount(row, minlength=k) == n // k)) for row in e)


def fourier(n: int, k: int | None = None) -> UnityMatrix:
    """The DFT matrix of order n; with ``k`` given it must equal n (or n=1)."""
    if n < 1:
        raise ParameterError("n must be positive")
    k = n if k is None else k
    if n == 1:
        return UnityMatrix(max(k, 2), np.zeros((1, 1), dtype=np.int64))
    if k != n:
        raise ParameterError("the Fourier matrix of order n has phase n")
    i = np.arange(n)
    return UnityMatrix(n, np.outer(i, i) % n)


def kronecker(H1: UnityMatrix, H2: UnityMatrix) -> UnityMatrix:
    """Kronecker product; block (i, j) is e1_ij + H2."""
    if H1.n == 1 and not H1.entries.any():
        return H2
    if H2.n == 1 and not H2.entries.any():
        return H1
    if H1.k != H2.k:
        raise ParameterError(f"phase mismatch: {H1.k} vs {H2.k}")
    k = H1.k
    e = (H1.entries[:, None, :, None] + H2.entries[None, :, None, :]) % k
    return UnityMatrix(k, e.reshape(H1.n * H2.n, H1.n * H2.n))


def normalize(H: UnityMatrix) -> UnityMatrix:
    """Scale columns so row 0 is all 1s, then rows so column 0 is all 1s."""
    e = (H.entries - H.entries[0:1, :]) % H.k
    e = (e - e[:, 0:1]) % H.k
    return UnityMatrix(H.k, e)


def is_normalized(H: UnityMatrix) -> bool:
    return not H.entries[0].any() and not H.entries[:, 0].any()


def hermitian(H: UnityMatrix) -> UnityMatrix:
    return UnityMatrix(H.k, (-H.entries.T) % H.k)


def transpose(H: UnityMatrix) -> UnityMatrix:
    return UnityMatrix(H.k, H.entries.T)


def circulant(first_row: Sequence[int], k: int) -> UnityMatrix:
    """Row i is first_row cyclically shifted right by i."""
    r = np.asarray(first_row, dtype=np.int64)
    n = len(r)
    if n < 1:
        raise ParameterError("empty first row")
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return UnityMatrix(k, r[idx])


def scalar_power_map(H: UnityMatrix, a: int) -> UnityMatrix:
    """Apply the Galois map zeta_k -> zeta_k**a entrywise."""
    if gcd(a, H.k) != 1:
        raise ParameterError(f"gcd({a}, {H.k}) != 1")
    return UnityMatrix(H.k, (H.entries * a) % H.k)


# -- monomial matrices ---------------------------------------------------------

@dataclass(frozen=True)
class Monomial:
    """Monomial matrix over <zeta_k> with entry zeta**exps[i] at (perm[i], i)."""

    perm: tuple[int, ...]
    exps: tuple[int, ...]
    k: int

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValidationError("not a permutation")
        if len(self.exps) != len(self.perm):
            raise ValidationError("length mismatch")

    @property
    def n(self):
        return len(self.perm)

    @classmethod
    def identity(cls, n, k):
        return cls(tuple(range(n)), (0,) * n, k)

    @classmethod
    def scalar(cls, n, k, a=1):
        return cls(tuple(range(n)), (a % k,) * n, k)

    @classmethod
    def random(cls, n, k, rng):
        perm = tuple(int(x) for x in rng.permutation(n))
        exps = tuple(int(x) for x in rng.integers(0, k, n))
        return cls(perm, exps, k)

    def __matmul__(self, other: "Monomial") -> "Monomial":
        # (AB)[pA[pB[i]], i] = zeta**(aA[pB[i]] + aB[i])
        if self.k != other.k or self.n != other.n:
            raise ParameterError("incompatible monomials")
        perm = tuple(self.perm[other.perm[i]] for i in range(self.n))
        exps = tuple((self.exps[other.perm[i]] + other.exps[i]) % self.k for i in range(self.n))
        return Monomial(perm, exps, self.k)

    def inverse(self) -> "Monomial":
        perm = [0] * self.n
        exps = [0] * self.n
        for i, (p, a) in enumerate(zip(self.perm, self.exps)):
            perm[p] = i
            exps[p] = (-a) % self.k
        return Monomial(tuple(perm), tuple(exps), self.k)

    def to_array(self) -> np.ndarray:
        z = np.zeros((self.n, self.n), dtype=complex)
        for i, (p, a) in enumerate(zip(self.perm, self.exps)):
            z[p, i] = np.exp(2j * np.pi * a / self.k)
        return z


def apply_monomials(H: UnityMatrix, M: Monomial, N: Monomial) -> UnityMatrix:
    """Return M H N^* in exponent form."""
    if M.k != H.k or N.k != H.k or M.n != H.n or N.n != H.n:
        raise ParameterError("monomials do not match the matrix")
    a = np.asarray(M.exps)
    b = np.asarray(N.exps)
    out = np.empty_like(H.entries)
    out[np.ix_(M.perm, N.perm)] = (H.entries + a[:, None] - b[None, :]) % H.k
    return UnityMatrix(H.k, out)


def random_scramble(H: UnityMatrix, rng) -> tuple[UnityMatrix, Monomial, Monomial]:
    M = Monomial.random(H.n, H.k, rng)
    N = Monomial.random(H.n, H.k, rng)
    return apply_monomials(H, M, N), M, N


# -- text format ----------------------------------------------------------------

def to_text(H: UnityMatrix) -> str:
    lines = [f"{H.n} {H.k}"]
    lines += [" ".join(str(int(x)) for x in row) for row in H.entries]
    return "\n".join(lines) + "\n"


def from_text(text: str, first_line: int = 1) -> UnityMatrix:
    """Parse the ``n k`` header plus n rows of exponents."""
    lines = [(i + first_line, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise ParseError("empty matrix text", first_line)
    lineno, head = lines[0]
    try:
        n, k = (int(t) for t in head.split())
    except ValueError:
        raise ParseError(f"expected header 'n k', got {head!r}", lineno) from None
    if len(lines) - 1 != n:
        raise ParseError(f"expected {n} rows, found {len(lines) - 1}", lineno)
    rows = []
    for lineno, ln in lines[1:]:
        try:
            row = [int(t) for t in ln.split()]
        except ValueError:
            raise ParseError(f"non-integer entry in {ln!r}", lineno) from None
        if len(row) != n:
            raise ParseError(f"expected {n} entries, found {len(row)}", lineno)
        if any(x < 0 or x >= k for x in row):
            raise ParseError(f"entry outside [0, {k})", lineno)
        rows.append(row)
    try:
        return UnityMatrix(k, np.array(rows, dtype=np.int64))
    except ValidationError as exc:
        raise ParseError(str(exc), lines[0][0]) from None
