"""Depth-first transversal search with balanced quotient counts.

Given a group E (multiplication table), a list of cosets of a normal
subgroup N, and a bound lam, find transversals d_0 = 1, d_1, ..., d_{m-1}
(one element per coset, in coset order) such that every quotient d_a d_b^-1
with a != b occurs at most lam times.  When the cosets partition E and
lam = m / |N|, this is exactly the relative difference set condition:
quotients of distinct cosets avoid N, and |E \\ N| * lam = m(m - 1).
"""

from __future__ import annotations

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None


def _dfs_python(mul, inv, cosets, lam, find_all, limit, prefix):
    m = len(cosets)
    counts = [0] * len(mul)
    chosen: list[int] = []
    chosen_inv: list[int] = []
    results: list[tuple[int, ...]] = []

    def place(d):
        row, di = mul[d], inv[d]
        touched = []
        for r, ri in zip(chosen, chosen_inv):
            q = row[ri]
            counts[q] += 1
            touched.append(q)
            if counts[q] > lam:
                return False, touched
            q = mul[r][di]
            counts[q] += 1
            touched.append(q)
            if counts[q] > lam:
                return False, touched
        return True, touched

    for d in prefix:
        ok, _ = place(d)
        if not ok:
            return results
        chosen.append(d)
        chosen_inv.append(inv[d])

    def rec(level):
        if level == m:
            results.append(tuple(chosen))
            return (not find_all) or (limit is not None and len(results) >= limit)
        for d in cosets[level]:
            ok, touched = place(d)
            stop = False
            if ok:
                chosen.append(d)
                chosen_inv.append(inv[d])
                stop = rec(level + 1)
                chosen.pop()
                chosen_inv.pop()
            for q in touched:
                counts[q] -= 1
            if stop:
                return True
        return False

    rec(len(prefix))
    return results


if numba is not None:

    @numba.njit(cache=True)
    def _dfs_numba(mul, inv, cand, ncand, lam, find_all, limit, prefix,
                   umap, sigs, nsig):  # pragma: no cover - compiled
        m = cand.shape[0]
        size = mul.shape[0]
        nc = umap.shape[0]
        counts = np.zeros(size, dtype=np.int32)
        chosen = np.zeros(m, dtype=np.int64)
        chosen_inv = np.zeros(m, dtype=np.int64)
        pos = np.zeros(m, dtype=np.int64)
        # signature constraints: per constraint the coset counts so far, and for
        # every signature the level at which it was exceeded (-1 while alive)
        ucount = np.zeros((nc, sigs.shape[2]), dtype=np.int32)
        dead_at = np.full((nc, sigs.shape[1]), -1, dtype=np.int64)
        alive = nsig.copy()
        out = []
        ok_prefix = True
        for lv in range(prefix.shape[0]):
            d = prefix[lv]
            for j in range(lv):
                q = mul[d, chosen_inv[j]]
                counts[q] += 1
                q = mul[chosen[j], inv[d]]
                counts[q] += 1
            chosen[lv] = d
            chosen_inv[lv] = inv[d]
            for c in range(nc):
                u = umap[c, d]
                ucount[c, u] += 1
                for i in range(nsig[c]):
                    if dead_at[c, i] < 0 and ucount[c, u] > sigs[c, i, u]:
                        dead_at[c, i] = lv
                        alive[c] -= 1
        for q in range(size):
            if counts[q] > lam:
                ok_prefix = False
        for c in range(nc):
            if alive[c] == 0:
                ok_prefix = False
        if not ok_prefix:
            return out
        start = prefix.shape[0]
        if start == m:
            out.append(chosen.copy())
            return out
        level = start
        pos[level] = 0
        while level >= start:
            if pos[level] > 0:
                # undo the element placed at this level
                d = chosen[level]
                di = chosen_inv[level]
                for j in range(level):
                    counts[mul[d, chosen_inv[j]]] -= 1
                    counts[mul[chosen[j], di]] -= 1
                for c in range(nc):
                    ucount[c, umap[c, d]] -= 1
                    for i in range(nsig[c]):
                        if dead_at[c, i] == level:
                            dead_at[c, i] = -1
                            alive[c] += 1
            if pos[level] >= ncand[level]:
                level -= 1
                continue
            d = cand[level, pos[level]]
            pos[level] += 1
            di = inv[d]
            good = True
            for j in range(level):
                q = mul[d, chosen_inv[j]]
                counts[q] += 1
                if counts[q] > lam:
                    good = False
                q = mul[chosen[j], di]
                counts[q] += 1
                if counts[q] > lam:
                    good = False
            for c in range(nc):
                u = umap[c, d]
                ucount[c, u] += 1
                for i in range(nsig[c]):
                    if dead_at[c, i] < 0 and ucount[c, u] > sigs[c, i, u]:
                        dead_at[c, i] = level
                        alive[c] -= 1
                if alive[c] == 0:
                    good = False
            chosen[level] = d
            chosen_inv[level] = di
            if not good:
                continue
            if level + 1 == m:
                out.append(chosen.copy())
                if (not find_all) or (limit > 0 and len(out) >= limit):
                    return out
                continue
            level += 1
            pos[level] = 0
        return out


def _pack_constraints(constraints, size):
    """(umap, sigs, nsig) arrays for the compiled search."""
    constraints = list(constraints or [])
    nc = len(constraints)
    width = max((len(s[0]) for _, s in constraints if len(s)), default=1)
    depth = max((len(s) for _, s in constraints), default=1)
    umap = np.zeros((nc, size), dtype=np.int64)
    sigs = np.zeros((nc, depth, width), dtype=np.int64)
    nsig = np.zeros(nc, dtype=np.int64)
    for c, (coset_of, signatures) in enumerate(constraints):
        umap[c] = coset_of
        for i, f in enumerate(signatures):
            sigs[c, i, : len(f)] = f
        nsig[c] = len(signatures)
    return umap, sigs, nsig


def transversal_search(table, inverses, cosets, lam, find_all=True, limit=None,
                       prefix=(), backend="auto", constraints=None):
    """All (or the first) admissible transversals, as tuples in coset order.

    ``cosets[0]`` must be ``[identity]``.  ``prefix`` fixes the choices for the
    first len(prefix) cosets; the search enumerates the rest in index order.
    ``constraints`` is a list of (coset_of, signatures) pairs: a branch is cut
    once its counts over the classes ``coset_of`` exceed every signature.  The
    pure-Python backend ignores them, which only costs time.
    """
    prefix = tuple(int(d) for d in prefix)
    use_numba = numba is not None and backend in ("auto", "numba")
    if not use_numba:
        mul = table.tolist() if hasattr(table, "tolist") else table
        inv = list(inverses)
        return _dfs_python(mul, inv, [list(c) for c in cosets], lam, find_all, limit, prefix)
    mul = np.ascontiguousarray(table, dtype=np.int64)
    inv = np.asarray(inverses, dtype=np.int64)
    width = max(len(c) for c in cosets)
    cand = np.zeros((len(cosets), width), dtype=np.int64)
    ncand = np.zeros(len(cosets), dtype=np.int64)
    for i, c in enumerate(cosets):
        cand[i, : len(c)] = c
        ncand[i] = len(c)
    umap, sigs, nsig = _pack_constraints(constraints, mul.shape[0])
    res = _dfs_numba(mul, inv, cand, ncand, int(lam), bool(find_all),
                     int(limit or 0), np.asarray(prefix, dtype=np.int64), umap, sigs, nsig)
    return [tuple(int(x) for x in r) for r in res]


def split_prefixes(table, inverses, cosets, lam, depth=2):
    """Admissible prefixes of the given depth (the first is always the identity)."""
    depth = min(depth, len(cosets))
    if depth <= 1:
        return [tuple(cosets[0][:1])]
    trunc = [list(c) for c in cosets[:depth]]
    return transversal_search(table, inverses, trunc, lam, backend="python")
