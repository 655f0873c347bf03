"""Exact Euclidean minimum spanning trees on 2-D point sets.

Two independent constructions (Prim on the implicit complete graph,
Kruskal on the explicit edge list) plus an exhaustive all-spanning-trees
search for tiny inputs, used as the ground-truth oracle. The quantity of
interest is the gamma-weighted tree length ``sum(w ** gamma)``; because a
minimum spanning tree simultaneously minimizes every nondecreasing
function of the edge weights, the Euclidean MST realizes the minimum for
any gamma > 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .dataset import PointPair

BRUTE_FORCE_MAX_POINTS = 8


@dataclass(frozen=True)
class SpanningTree:
    """A spanning tree over point indices 0..N-1 with Euclidean weights.

    Edges are stored with ``i < j`` and sorted lexicographically, so the
    summation order (hence the floating-point value of ``gamma_length``)
    is identical whenever the edge sets are.
    """

    edges: np.ndarray  # (N-1, 2) int64, each row (i, j) with i < j
    weights: np.ndarray  # (N-1,) float64 Euclidean distances
    n_points: int
    gamma: float
    gamma_length: float

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64)
        w = np.asarray(self.weights, dtype=np.float64)
        if e.shape != (self.n_points - 1, 2) or w.shape != (self.n_points - 1,):
            raise ValueError("edge arrays inconsistent with n_points")
        e.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "weights", w)


def gamma_length(tree: SpanningTree, gamma: float) -> float:
    """Sum of edge weights raised to ``gamma``; plain length for gamma=1."""
    return float(np.sum(tree.weights**gamma))


def _finish_tree(iu: np.ndarray, jv: np.ndarray, w: np.ndarray, n: int,
                 gamma: float) -> SpanningTree:
    lo = np.minimum(iu, jv)
    hi = np.maximum(iu, jv)
    order = np.lexsort((hi, lo))
    edges = np.column_stack([lo[order], hi[order]])
    weights = w[order]
    return SpanningTree(edges, weights, n, float(gamma),
                        float(np.sum(weights**gamma)))


@njit(cache=True, nogil=True)
def _prim_core(xy):  # pragma: no cover - exercised via mst_prim
    n = xy.shape[0]
    in_tree = np.zeros(n, np.bool_)
    parent = np.zeros(n, np.int64)
    best = np.full(n, np.inf)
    order_added = np.zeros(n, np.int64)
    in_tree[0] = True
    cur = 0
    for step in range(n - 1):
        cx = xy[cur, 0]
        cy = xy[cur, 1]
        nxt = -1
        nv = np.inf
        for j in range(n):
            if in_tree[j]:
                continue
            dx = xy[j, 0] - cx
            dy = xy[j, 1] - cy
            d = dx * dx + dy * dy
            if d < best[j]:
                best[j] = d
                parent[j] = cur
            if best[j] < nv:
                nv = best[j]
                nxt = j
        in_tree[nxt] = True
        order_added[step] = nxt
        cur = nxt
    return parent, best, order_added


def mst_prim_xy(xy: np.ndarray, gamma: float = 1.0) -> SpanningTree:
    """Array-level Prim MST; the workhorse behind :func:`mst_prim`."""
    xy = np.ascontiguousarray(xy, dtype=np.float64)
    n = xy.shape[0]
    if n < 2:
        raise ValueError("need at least 2 points")
    parent, best, order_added = _prim_core(xy)
    nodes = order_added[: n - 1]
    return _finish_tree(parent[nodes], nodes, np.sqrt(best[nodes]), n, gamma)


def mst_prim(points: PointPair, gamma: float = 1.0) -> SpanningTree:
    """Exact MST via Prim's method on the implicit complete graph.

    Runs in O(N^2) time and O(N) memory; comparisons use squared
    distances, so ties resolve identically to comparing true distances.
    """
    return mst_prim_xy(points.xy, gamma)


def prim_dense_matrix(weight_matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """MST of an explicit symmetric weight matrix.

    Returns (edges, weights) where weights are matrix entries, not
    Euclidean distances; used for reweighted cluster-center graphs.
    """
    m = np.asarray(weight_matrix, dtype=np.float64)
    n = m.shape[0]
    if m.shape != (n, n) or n < 2:
        raise ValueError("need a square matrix of size >= 2")
    active = np.ones(n, dtype=bool)
    active[0] = False
    best = m[0].copy()
    best[0] = np.inf
    parent = np.zeros(n, np.int64)
    iu = np.empty(n - 1, np.int64)
    jv = np.empty(n - 1, np.int64)
    w = np.empty(n - 1, np.float64)
    for step in range(n - 1):
        j = int(np.argmin(best))
        iu[step], jv[step], w[step] = parent[j], j, best[j]
        active[j] = False
        best[j] = np.inf
        cand = np.where(active, m[j], np.inf)
        upd = cand < best
        best[upd] = cand[upd]
        parent[upd] = j
    order = np.lexsort((np.maximum(iu, jv), np.minimum(iu, jv)))
    edges = np.column_stack([np.minimum(iu, jv)[order], np.maximum(iu, jv)[order]])
    return edges, w[order]


class _UnionFind:
    __slots__ = ("parent", "rank")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def kruskal_edges(n: int, iu: np.ndarray, jv: np.ndarray, w: np.ndarray,
                  gamma: float = 1.0) -> SpanningTree:
    """Kruskal on an explicit edge list; ties break on (w, i, j) order.

    The edge list must connect all ``n`` vertices. Zero-weight edges are
    legal: duplicate points stay connected through them rather than being
    dropped.
    """
    lo = np.minimum(iu, jv).astype(np.int64)
    hi = np.maximum(iu, jv).astype(np.int64)
    order = np.lexsort((hi, lo, w))
    uf = _UnionFind(n)
    sel_i = np.empty(n - 1, np.int64)
    sel_j = np.empty(n - 1, np.int64)
    sel_w = np.empty(n - 1, np.float64)
    got = 0
    for idx in order:
        a = int(lo[idx])
        b = int(hi[idx])
        if uf.union(a, b):
            sel_i[got] = a
            sel_j[got] = b
            sel_w[got] = w[idx]
            got += 1
            if got == n - 1:
                break
    if got != n - 1:
        raise ValueError("edge list does not connect all points")
    return _finish_tree(sel_i, sel_j, sel_w, n, gamma)


def mst_kruskal(points: PointPair, gamma: float = 1.0) -> SpanningTree:
    """Exact MST via Kruskal's method.

    Materializes all N(N-1)/2 edges, so memory grows quadratically; meant
    as an independent cross-check of :func:`mst_prim` at moderate N.
    """
    xy = points.xy
    n = xy.shape[0]
    if n < 2:
        raise ValueError("need at least 2 points")
    iu, jv = np.triu_indices(n, k=1)
    diff = xy[iu] - xy[jv]
    w = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    return kruskal_edges(n, iu, jv, w, gamma)


@njit(cache=True, nogil=True)
def _brute_force_core(wpow):  # pragma: no cover - exercised via brute_force_mst
    # Enumerate every labeled spanning tree through its Pruefer sequence
    # and return the code of a minimizer of sum(w ** gamma).
    n = wpow.shape[0]
    m = n - 2
    total = 1
    for _ in range(m):
        total *= n
    best_val = np.inf
    best_code = -1
    seq = np.zeros(m, np.int64)
    deg = np.zeros(n, np.int64)
    for code in range(total):
        c = code
        for t in range(m):
            seq[t] = c % n
            c //= n
        for v in range(n):
            deg[v] = 1
        for t in range(m):
            deg[seq[t]] += 1
        val = 0.0
        for t in range(m):
            leaf = -1
            for v in range(n):
                if deg[v] == 1:
                    leaf = v
                    break
            val += wpow[leaf, seq[t]]
            deg[leaf] = 0
            deg[seq[t]] -= 1
        a = -1
        for v in range(n):
            if deg[v] == 1:
                if a < 0:
                    a = v
                else:
                    val += wpow[a, v]
        if val < best_val:
            best_val = val
            best_code = code
    return best_code


def _decode_pruefer(code: int, n: int) -> list[tuple[int, int]]:
    m = n - 2
    seq = []
    c = code
    for _ in range(m):
        seq.append(c % n)
        c //= n
    deg = [1] * n
    for s in seq:
        deg[s] += 1
    edges = []
    for s in seq:
        leaf = deg.index(1)
        edges.append((leaf, s))
        deg[leaf] = 0
        deg[s] -= 1
    rest = [v for v in range(n) if deg[v] == 1]
    edges.append((rest[0], rest[1]))
    return edges


def brute_force_mst(points: PointPair, gamma: float = 1.0) -> SpanningTree:
    """Minimum gamma-length tree by exhaustive enumeration (N <= 8 only).

    This is the oracle the fast constructions are tested against; it
    shares no code path with them beyond the distance computation.
    """
    xy = points.xy
    n = xy.shape[0]
    if n < 2:
        raise ValueError("need at least 2 points")
    if n > BRUTE_FORCE_MAX_POINTS:
        raise ValueError(f"brute force supports at most {BRUTE_FORCE_MAX_POINTS} points")
    diff = xy[:, None, :] - xy[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    if n == 2:
        edges = [(0, 1)]
    else:
        code = _brute_force_core(dist**gamma)
        edges = _decode_pruefer(int(code), n)
    iu = np.array([e[0] for e in edges], np.int64)
    jv = np.array([e[1] for e in edges], np.int64)
    return _finish_tree(iu, jv, dist[iu, jv], n, gamma)
