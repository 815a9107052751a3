"""Canonical labeling and automorphisms of vertex-colored undirected graphs.

Individualization-refinement in the style of nauty:

* refinement is equitable color refinement driven by neighbor counts, with a
  trace recorded as the node invariant;
* the target cell is the first smallest non-singleton cell;
* the canonical leaf maximizes (invariant path, certificate);
* automorphisms found at leaves prune children in the same orbit of the
  pointwise stabilizer of the current prefix, and trigger backjumps to the
  common ancestor with the first or the best leaf.

Everything depends only on cell positions and counts, so the result is a
function of the isomorphism class of the input.
"""

from __future__ import annotations

import heapq
import struct
from dataclasses import dataclass
from typing import Sequence

from .permgroup import PermGroup


class _Partition:
    __slots__ = ("lab", "cellof", "cend")

    def __init__(self, lab, cellof, cend):
        self.lab = lab        # position -> vertex
        self.cellof = cellof  # vertex -> start position of its cell
        self.cend = cend      # start position -> end position (exclusive)

    def copy(self) -> "_Partition":
        return _Partition(self.lab[:], self.cellof[:], dict(self.cend))

    def is_discrete(self) -> bool:
        return len(self.cend) == len(self.lab)

    def target_cell(self) -> int:
        best, size = -1, None
        for s in sorted(self.cend):
            sz = self.cend[s] - s
            if sz > 1 and (size is None or sz < size):
                best, size = s, sz
        return best


def _refine(adj, part: _Partition, splitters: list[int]) -> int:
    """Refine to the coarsest equitable partition; return a trace hash."""
    lab, cellof, cend = part.lab, part.cellof, part.cend
    n = len(lab)
    heap = list(splitters)
    heapq.heapify(heap)
    queued = set(heap)
    trace = []
    cnt = [0] * n
    while heap:
        s = heapq.heappop(heap)
        queued.discard(s)
        if s not in cend:
            continue
        touched_cells = set()
        touched = []
        for p in range(s, cend[s]):
            for w in adj[lab[p]]:
                if cnt[w] == 0:
                    touched.append(w)
                    touched_cells.add(cellof[w])
                cnt[w] += 1
        for c in sorted(touched_cells):
            e = cend[c]
            verts = lab[c:e]
            keys = [cnt[v] for v in verts]
            if min(keys) == max(keys):
                trace.append((s, c, keys[0]))
                continue
            order = sorted(range(len(verts)), key=lambda i: keys[i])
            new_lab = [verts[i] for i in order]
            lab[c:e] = new_lab
            starts = [c]
            for i in range(1, len(order)):
                if keys[order[i]] != keys[order[i - 1]]:
                    starts.append(c + i)
            bounds = starts + [e]
            sig = []
            for a, b in zip(bounds, bounds[1:]):
                cend[a] = b
                for q in range(a, b):
                    cellof[lab[q]] = a
                sig.append((keys[order[a - c]], b - a))
            trace.append((s, c, tuple(sig)))
            pieces = list(zip(bounds, bounds[1:]))
            if c in queued:
                add = [a for a, _ in pieces if a != c]
            else:
                largest = max(pieces, key=lambda ab: (ab[1] - ab[0], -ab[0]))
                add = [a for a, _ in pieces if a != largest[0]]
            for a in add:
                if a not in queued:
                    queued.add(a)
                    heapq.heappush(heap, a)
        for w in touched:
            cnt[w] = 0
    return hash(tuple(trace))


def _individualize(part: _Partition, v: int) -> int:
    """Split v off the front of its cell; return the new singleton's position."""
    lab, cellof, cend = part.lab, part.cellof, part.cend
    c = cellof[v]
    e = cend[c]
    i = lab.index(v, c, e)
    lab[c], lab[i] = lab[i], lab[c]
    cend[c] = c + 1
    cend[c + 1] = e
    for q in range(c + 1, e):
        cellof[lab[q]] = c + 1
    return c


@dataclass
class LabelingResult:
    labeling: tuple[int, ...]      # labeling[v] = canonical position of vertex v
    certificate: bytes
    generators: list[tuple[int, ...]]
    group: PermGroup
    nodes: int

    @property
    def group_order(self) -> int:
        return self.group.order


class Graph:
    """Undirected vertex-colored graph on 0..n-1."""

    def __init__(self, n: int, edges=(), colors: Sequence[int] | None = None, adj=None):
        self.n = n
        if adj is not None:
            self.adj = [sorted(set(a)) for a in adj]
        else:
            sets = [set() for _ in range(n)]
            for a, b in edges:
                if a == b:
                    raise ValueError("loops are not supported")
                sets[a].add(b)
                sets[b].add(a)
            self.adj = [sorted(s) for s in sets]
        self.colors = list(colors) if colors is not None else [0] * n
        if len(self.colors) != n:
            raise ValueError("one color per vertex")

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """The graph with vertex v renamed perm[v]."""
        adj = [None] * self.n
        colors = [0] * self.n
        for v in range(self.n):
            adj[perm[v]] = [perm[w] for w in self.adj[v]]
            colors[perm[v]] = self.colors[v]
        return Graph(self.n, colors=colors, adj=adj)

    def is_automorphism(self, g: Sequence[int]) -> bool:
        if any(self.colors[g[v]] != self.colors[v] for v in range(self.n)):
            return False
        return all(sorted(g[w] for w in self.adj[v]) == self.adj[g[v]] for v in range(self.n))


def _certificate(graph: Graph, lab: list[int]) -> tuple:
    pos = [0] * graph.n
    for i, v in enumerate(lab):
        pos[v] = i
    rows = []
    for v in lab:
        mask = 0
        for w in graph.adj[v]:
            mask |= 1 << pos[w]
        rows.append(mask)
    return tuple(rows)


def _cert_bytes(graph: Graph, lab: list[int]) -> bytes:
    """n, colors in canonical order, then sorted canonical neighbor lists."""
    pos = [0] * graph.n
    for i, v in enumerate(lab):
        pos[v] = i
    out = [struct.pack("<I", graph.n)]
    out.append(struct.pack(f"<{graph.n}I", *[graph.colors[v] for v in lab]))
    for v in lab:
        nb = sorted(pos[w] for w in graph.adj[v])
        out.append(struct.pack(f"<I{len(nb)}I", len(nb), *nb))
    return b"".join(out)


class _Search:
    def __init__(self, graph: Graph):
        self.g = graph
        self.n = graph.n
        self.gens: list[tuple[int, ...]] = []
        self.first = None   # (seq, path, lab, cert)
        self.best = None
        self.nodes = 0

    def initial(self) -> tuple[_Partition, int]:
        n = self.n
        colors = self.g.colors
        lab = sorted(range(n), key=lambda v: colors[v])
        cellof = [0] * n
        cend = {}
        start = 0
        for i in range(1, n + 1):
            if i == n or colors[lab[i]] != colors[lab[start]]:
                cend[start] = i
                for q in range(start, i):
                    cellof[lab[q]] = start
                start = i
        part = _Partition(lab, cellof, cend)
        sizes = tuple((colors[lab[s]], e - s) for s, e in sorted(cend.items()))
        inv = hash((sizes, _refine(self.g.adj, part, sorted(cend))))
        return part, inv

    def _orbit_pruned(self, seq, cell_verts, explored, w) -> bool:
        """True if w is in the orbit of an explored child under gens fixing seq."""
        if not explored:
            return False
        fixing = [g for g in self.gens if all(g[v] == v for v in seq)]
        if not fixing:
            return False
        orbit = {w}
        queue = [w]
        for x in queue:
            for g in fixing:
                y = g[x]
                if y not in orbit:
                    orbit.add(y)
                    queue.append(y)
        return any(e in orbit for e in explored)

    def run(self):
        part, inv0 = self.initial()
        return self._node(part, (), (inv0,))

    def _node(self, part: _Partition, seq: tuple, path: tuple) -> int:
        """Explore a node; return the level to resume at."""
        self.nodes += 1
        level = len(seq)
        if part.is_discrete():
            return self._leaf(part, seq, path)
        c = part.target_cell()
        cell_verts = sorted(part.lab[c:part.cend[c]])
        explored: list[int] = []
        for w in cell_verts:
            if self._orbit_pruned(seq, cell_verts, explored, w):
                continue
            child = part.copy()
            pos = _individualize(child, w)
            inv = _refine(self.g.adj, child, [pos])
            cpath = path + (inv,)
            explored.append(w)
            eq_first = self.first is None or self.first[1][:len(cpath)] == cpath
            if not eq_first and self.best is not None:
                bp = self.best[1][:len(cpath)]
                if cpath < bp:
                    continue
            r = self._node(child, seq + (w,), cpath)
            if r < level:
                return r
        return level

    def _leaf(self, part: _Partition, seq: tuple, path: tuple) -> int:
        lab = part.lab[:]
        cert = _certificate(self.g, lab)
        level = len(seq)
        if self.first is None:
            self.first = (seq, path, lab, cert)
            self.best = (seq, path, lab, cert)
            return level
        if path == self.first[1] and cert == self.first[3]:
            self._add_automorphism(self.first[2], lab)
            return _common(seq, self.first[0])
        key = (path, cert)
        bkey = (self.best[1], self.best[3])
        if key > bkey:
            self.best = (seq, path, lab, cert)
        elif key == bkey:
            self._add_automorphism(self.best[2], lab)
            return _common(seq, self.best[0])
        return level

    def _add_automorphism(self, lab1, lab2):
        g = [0] * self.n
        for a, b in zip(lab1, lab2):
            g[a] = b
        g = tuple(g)
        if any(g[i] != i for i in range(self.n)):
            self.gens.append(g)


def _common(a: tuple, b: tuple) -> int:
    i = 0
    while i < len(a) and i < len(b) and a[i] == b[i]:
        i += 1
    return i


def canonical_labeling(graph: Graph) -> LabelingResult:
    s = _Search(graph)
    s.run()
    lab = s.best[2]
    labeling = [0] * graph.n
    for i, v in enumerate(lab):
        labeling[v] = i
    group = PermGroup(graph.n, s.gens) if graph.n else PermGroup(0, [])
    return LabelingResult(tuple(labeling), _cert_bytes(graph, lab), s.gens, group, s.nodes)


def find_isomorphism(g1: Graph, g2: Graph) -> tuple[int, ...] | None:
    """sigma with g2 = g1.relabel(sigma), or None."""
    r1, r2 = canonical_labeling(g1), canonical_labeling(g2)
    if r1.certificate != r2.certificate:
        return None
    inv2 = [0] * g2.n
    for v, i in enumerate(r2.labeling):
        inv2[i] = v
    return tuple(inv2[r1.labeling[v]] for v in range(g1.n))
