"""Number-theoretic non-existence screens and the existence verdict table."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .algebra import (
    CyclotomicCounter,
    UnityMatrix,
    cyclotomic_is_zero,
    cyclotomic_polynomial,
    is_butson,
    is_prime,
    prime_factors,
)
from .exceptions import NotApplicable, ParameterError

VERDICTS = ("F", "N", "NC", "E", "S1", "S2", "UNKNOWN")


def lam_leung_screen(n: int, k: int) -> bool:
    """True unless n is not a nonnegative combination of the primes dividing k."""
    if n < 1 or k < 2:
        raise ParameterError("need n >= 1 and k >= 2")
    primes = sorted(set(prime_factors(k)))
    reach = [True] + [False] * n
    for m in range(1, n + 1):
        reach[m] = any(m >= q and reach[m - q] for q in primes)
    return reach[n]


def _squarefree_part(n: int) -> int:
    out = 1
    for q in set(prime_factors(n)):
        e = 0
        m = n
        while m % q == 0:
            m //= q
            e += 1
        if e % 2:
            out *= q
    return out


def multiplicative_order(a: int, r: int) -> int:
    a %= r
    if a == 0:
        raise ParameterError("a must be a unit")
    x, e = a, 1
    while x != 1:
        x = x * a % r
        e += 1
    return e


def delauney_screen(n: int, K_order: int, r: int) -> bool:
    """True unless some divisor m (not divisible by r) of the square-free
    part of n has even multiplicative order modulo r."""
    if not is_prime(r) or K_order % r or n % 2 == 0 or r % 2 == 0:
        raise NotApplicable(f"screen needs odd n, odd prime r dividing |K| (got n={n}, |K|={K_order}, r={r})")
    sf = _squarefree_part(n)
    for m in range(1, sf + 1):
        if sf % m == 0 and m % r and multiplicative_order(m, r) % 2 == 0:
            return False
    return True


def _autocorrelation_is_n(x, n: int, k: int) -> bool:
    """Exact test of s * conj(s) == n for s = sum_j x_j zeta_k^j."""
    c = [0] * k
    for j in range(k):
        if x[j]:
            for i in range(k):
                c[(j - i) % k] += x[j] * x[i]
    c[0] -= n
    return cyclotomic_is_zero(c, k)


def _prime_solutions(n: int, k: int):
    """Compositions of n into k parts with sum of squares (n^2 + (k-1)n)/k.

    For prime k these are the only candidates: s * conj(s) = n forces all
    nonzero autocorrelation coefficients to be equal.  The first part is taken
    maximal, which is allowed since rotating x multiplies s by a root of unity.
    """
    num = n * n + (k - 1) * n
    if num % k:
        return
    target = num // k
    x = [0] * k

    def rec(j, rest, q, cap):
        slots = k - j
        if slots == 0:
            if rest == 0 and q == 0:
                yield tuple(x)
            return
        # q must lie between rest^2/slots and rest^2
        if q < 0 or q > rest * rest or q * slots < rest * rest:
            return
        hi = min(rest, cap)
        for v in range(hi, -1, -1):
            x[j] = v
            yield from rec(j + 1, rest - v, q - v * v, cap)
        x[j] = 0

    for first in range(n, -1, -1):
        if first * first > target:
            continue
        if first * k < n:
            break
        x[0] = first
        yield from rec(1, n - first, target - first * first, first)


def _reduce(vec, k):
    """Reduce a coefficient vector modulo the k-th cyclotomic polynomial."""
    phi = list(cyclotomic_polynomial(k))
    deg = len(phi) - 1
    v = list(vec)
    for i in range(len(v) - 1, deg - 1, -1):
        c = v[i]
        if c:
            for t in range(deg + 1):
                v[i - deg + t] -= c * phi[t]
    return tuple(v[:deg])


@lru_cache(maxsize=None)
def _composite_norms(k: int, nmax: int) -> dict[int, int]:
    """For each integer N, a bitmask of the part counts m <= nmax such that
    some x with sum m has s * conj(s) = N exactly (s reduced mod Phi_k)."""
    deg = len(cyclotomic_polynomial(k)) - 1
    unit = [_reduce([1 if i == j else 0 for i in range(k)], k) for j in range(k)]
    full = (1 << (nmax + 1)) - 1
    states = {(0,) * deg: 1}
    for j in range(k):
        u = unit[j]
        nxt: dict[tuple, int] = {}
        for vec, mask in states.items():
            for v in range(nmax + 1):
                m = (mask << v) & full
                if not m:
                    break
                key = tuple(a + v * b for a, b in zip(vec, u))
                nxt[key] = nxt.get(key, 0) | m
        states = nxt
    norms: dict[int, int] = {}
    for vec, mask in states.items():
        s = CyclotomicCounter(k, tuple(vec) + (0,) * (k - deg))
        red = _reduce((s * s.conjugate()).counts, k)
        if not any(red[1:]):
            norms[red[0]] = norms.get(red[0], 0) | mask
    return norms


@lru_cache(maxsize=None)
def group_developed_sum_screen(n: int, k: int) -> bool:
    """True iff some x in N^k with sum n has |sum_j x_j zeta_k^j|^2 = n (exact)."""
    if n < 1 or k < 2:
        raise ParameterError("need n >= 1 and k >= 2")
    if is_prime(k):
        return any(_autocorrelation_is_n(x, n, k) for x in _prime_solutions(n, k))
    nmax = max(100, n)
    return bool(_composite_norms(k, nmax).get(n, 0) >> n & 1)


def sum_screen_witness(n: int, k: int):
    if is_prime(k):
        for x in _prime_solutions(n, k):
            if _autocorrelation_is_n(x, n, k):
                return x
    return None


# -- verdicts -------------------------------------------------------------------


@dataclass
class SearchResults:
    """Outcomes available for one (n, p): a verified matrix and completed searches."""

    matrix: UnityMatrix | None = None
    rds_complete_none: bool = False
    cocycle_complete_none: bool = False


@dataclass
class ExistenceVerdict:
    n: int
    p: int
    verdict: str
    justification: list[tuple[str, str]] = field(default_factory=list)


def cocyclic_verdict(n: int, p: int, results: SearchResults | None = None) -> ExistenceVerdict:
    if not is_prime(p) or p == 2:
        raise ParameterError("p must be an odd prime")
    results = results or SearchResults()
    just: list[tuple[str, str]] = []
    if not lam_leung_screen(n, p):
        just.append(("lam-leung", "fail"))
        return ExistenceVerdict(n, p, "N", just)
    if n == p:
        just.append(("order p", "Fourier matrix is the unique cocyclic BH(p,p)"))
        return ExistenceVerdict(n, p, "F", just)
    if n % 2:
        ok = delauney_screen(n, p, p)
        just.append(("delauney", "pass" if ok else "fail"))
        if not ok:
            return ExistenceVerdict(n, p, "N", just)
    else:
        just.append(("delauney", "not applicable"))
    if n % (p * p):
        ok = group_developed_sum_screen(n, p)
        just.append(("p-square-free sum screen", "pass" if ok else "fail"))
        if not ok:
            return ExistenceVerdict(n, p, "NC", just)
    if results.matrix is not None:
        if results.matrix.n == n and results.matrix.k == p and is_butson(results.matrix):
            just.append(("verified matrix", "BH found"))
            return ExistenceVerdict(n, p, "E", just)
        just.append(("verified matrix", "rejected"))
    if results.rds_complete_none:
        just.append(("rds search", "complete, none found"))
        return ExistenceVerdict(n, p, "S1", just)
    if results.cocycle_complete_none:
        just.append(("orthogonal cocycle search", "complete, none found"))
        return ExistenceVerdict(n, p, "S2", just)
    return ExistenceVerdict(n, p, "UNKNOWN", just)


def table_parameters(max_np: int = 100, primes=(3, 5, 7)):
    for p in primes:
        for m in range(1, max_np // (p * p) + 1):
            yield p, m * p


def format_table(verdicts: dict[tuple[int, int], ExistenceVerdict], max_np: int = 100, primes=(3, 5, 7)) -> str:
    width = max(max_np // (p * p) for p in primes)
    head = "p \\ n/p | " + " ".join(f"{m:>3}" for m in range(1, width + 1))
    lines = [head, "-" * len(head)]
    notes = []
    for p in primes:
        cells = []
        for m in range(1, width + 1):
            v = verdicts.get((m * p, p))
            cells.append(f"{v.verdict:>3}" if v else "   ")
            if v:
                why = "; ".join(f"{a}: {b}" for a, b in v.justification)
                notes.append(f"({m * p},{p}) {v.verdict}: {why}")
        lines.append(f"{p:>7} | " + " ".join(cells))
    return "\n".join(lines + [""] + notes) + "\n"
