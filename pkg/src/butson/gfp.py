"""Dense linear algebra over GF(p) with numpy.

Products are formed in float64, which is exact while every partial sum
stays below 2**53; callers stay far from that (p < 100, dimension < 10**4).
"""

from __future__ import annotations

import numpy as np


def _matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64) % p


def rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; pivots are chosen at the lowest available index."""
    m = np.array(a, dtype=np.int64) % p
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if len(nz) == 0:
            continue
        i = r + nz[0]
        if i != r:
            m[[r, i]] = m[[i, r]]
        m[r] = (m[r] * pow(int(m[r, c]), -1, p)) % p
        col = m[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if len(nzr):
            m[nzr] = (m[nzr] - np.outer(col[nzr], m[r])) % p
        pivots.append(c)
        r += 1
    return m[:r], pivots


class RowSpace:
    """Incrementally maintained RREF basis of a row space."""

    def __init__(self, ncols: int, p: int):
        self.p = p
        self.ncols = ncols
        self.basis = np.zeros((0, ncols), dtype=np.int64)
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vecs: np.ndarray) -> np.ndarray:
        v = np.atleast_2d(np.asarray(vecs, dtype=np.int64)) % self.p
        if not self.pivots:
            return v
        return (v - _matmul(v[:, self.pivots], self.basis, self.p)) % self.p

    def add(self, vecs: np.ndarray) -> int:
        """Add rows; return the rank increase."""
        red = self.reduce(vecs)
        red = red[np.any(red, axis=1)]
        if not len(red):
            return 0
        new, newpiv = rref(red, self.p)
        if not newpiv:
            return 0
        if self.pivots:
            old = (self.basis - _matmul(self.basis[:, newpiv], new, self.p)) % self.p
            allrows = np.vstack([old, new])
            allpiv = self.pivots + newpiv
        else:
            allrows, allpiv = new, newpiv
        order = np.argsort(allpiv, kind="stable")
        self.basis = allrows[order]
        self.pivots = [allpiv[i] for i in order]
        return len(newpiv)

    def contains(self, vec) -> bool:
        return not self.reduce(vec).any()


def nullspace_of_equations(rows_iter, ncols: int, p: int, batch: int = 2048) -> np.ndarray:
    """Basis (as rows) of {x : A x = 0} where A is streamed in row batches."""
    space = RowSpace(ncols, p)
    buf = []
    for row in rows_iter:
        buf.append(row)
        if len(buf) >= batch:
            space.add(np.array(buf))
            buf = []
    if buf:
        space.add(np.array(buf))
    free = [c for c in range(ncols) if c not in set(space.pivots)]
    out = np.zeros((len(free), ncols), dtype=np.int64)
    for t, f in enumerate(free):
        out[t, f] = 1
        if space.pivots:
            out[t, space.pivots] = (-space.basis[:, f]) % p
    return out


def inverse(a: np.ndarray, p: int) -> np.ndarray:
    d = a.shape[0]
    aug = np.hstack([np.asarray(a, dtype=np.int64) % p, np.eye(d, dtype=np.int64)])
    r, piv = rref(aug, p)
    if piv[:d] != list(range(d)) or len(piv) < d:
        raise ValueError("matrix is singular mod p")
    return r[:d, d:]


class Coordinates:
    """Solve x = c @ basis for c, for x known to lie in the row span of an independent basis."""

    def __init__(self, basis: np.ndarray, p: int):
        self.p = p
        self.basis = np.asarray(basis, dtype=np.int64) % p
        d = len(self.basis)
        if d == 0:
            self.cols = []
            self.inv = np.zeros((0, 0), dtype=np.int64)
            return
        # pivot columns of the basis give d positions where it is invertible
        _, cols = rref(self.basis, p)
        self.cols = cols
        self.inv = inverse(self.basis[:, cols], p)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.int64)) % self.p
        if not self.cols:
            return np.zeros((len(x), 0), dtype=np.int64)
        c = _matmul(x[:, self.cols], self.inv, self.p)
        if not np.array_equal(_matmul(c, self.basis, self.p), x):
            raise ValueError("vector is not in the span of the basis")
        return c
