"""K-means (k-means++ init, restarts) and PCA-based divisive clustering.

Both clusterers serve the spanning-tree approximations: cluster centers
stand in for the data, or clusters act as strata when splitting the data
into subsets. The Lloyd loop runs as a compiled kernel for small k and
switches the assignment step to a KD-tree once scanning all centers per
point would dominate; both paths are deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.spatial import cKDTree

from ._util import DEFAULT_SEED, rng_for
from .dataset import PointPair

_TREE_ASSIGN_MIN_K = 256  # KD-tree assignment pays off for many centers
_DEFAULT_TOL = 1e-7  # relative wcss improvement treated as converged


@dataclass(frozen=True)
class Clustering:
    """Assignment of N points to k non-empty clusters.

    ``weights[i]`` is the fraction of points in cluster i; ``wcss`` is the
    within-cluster sum of squared distances to the centers, the criterion
    used to pick among restarts.
    """

    assignments: np.ndarray  # (N,) int64 cluster index per point
    centers: np.ndarray  # (k, 2) float64
    weights: np.ndarray  # (k,) float64, sums to 1
    k: int
    wcss: float

    def cluster_indices(self, c: int) -> np.ndarray:
        return np.nonzero(self.assignments == c)[0]


@njit(cache=True, nogil=True)
def _plusplus_core(xy, u):  # pragma: no cover - exercised via kmeans
    # Standard k-means++ seeding driven by pre-drawn uniforms u[0..k-1].
    n = xy.shape[0]
    k = u.shape[0]
    centers = np.empty((k, 2))
    first = int(u[0] * n)
    if first == n:
        first = n - 1
    centers[0, 0] = xy[first, 0]
    centers[0, 1] = xy[first, 1]
    d2 = np.empty(n)
    for i in range(n):
        dx = xy[i, 0] - centers[0, 0]
        dy = xy[i, 1] - centers[0, 1]
        d2[i] = dx * dx + dy * dy
    for c in range(1, k):
        total = 0.0
        for i in range(n):
            total += d2[i]
        pick = -1
        if total > 0.0:
            target = u[c] * total
            acc = 0.0
            for i in range(n):
                acc += d2[i]
                if acc >= target:
                    pick = i
                    break
            if pick < 0:
                pick = n - 1
        else:
            pick = int(u[c] * n)
            if pick == n:
                pick = n - 1
        centers[c, 0] = xy[pick, 0]
        centers[c, 1] = xy[pick, 1]
        for i in range(n):
            dx = xy[i, 0] - centers[c, 0]
            dy = xy[i, 1] - centers[c, 1]
            nd = dx * dx + dy * dy
            if nd < d2[i]:
                d2[i] = nd
    return centers


def _plusplus_init(xy: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    return _plusplus_core(xy, rng.random(k))


@njit(cache=True, nogil=True)
def _lloyd_core(xy, centers, max_iters, tol):  # pragma: no cover
    # Fused assignment/update loop; stops at an assignment fixed point or
    # when the relative wcss improvement drops below tol (no repairs
    # pending in either case). Centers are updated in place.
    n = xy.shape[0]
    k = centers.shape[0]
    assign = np.empty(n, np.int64)
    for i in range(n):
        best = -1
        bv = np.inf
        for c in range(k):
            dx = xy[i, 0] - centers[c, 0]
            dy = xy[i, 1] - centers[c, 1]
            d = dx * dx + dy * dy
            if d < bv:
                bv = d
                best = c
        assign[i] = best
    trace = np.empty(max_iters)
    sums = np.empty((k, 2))
    counts = np.empty(k, np.int64)
    prev_w = np.inf
    used = 0
    for it in range(max_iters):
        used = it + 1
        for c in range(k):
            sums[c, 0] = 0.0
            sums[c, 1] = 0.0
            counts[c] = 0
        for i in range(n):
            a = assign[i]
            sums[a, 0] += xy[i, 0]
            sums[a, 1] += xy[i, 1]
            counts[a] += 1
        n_empty = 0
        for c in range(k):
            if counts[c] == 0:
                n_empty += 1
        if n_empty > 0:
            resid = np.empty(n)
            for i in range(n):
                dx = xy[i, 0] - centers[assign[i], 0]
                dy = xy[i, 1] - centers[assign[i], 1]
                resid[i] = dx * dx + dy * dy
            for c in range(k):
                if counts[c] == 0:
                    far = 0
                    fv = -1.0
                    for i in range(n):
                        if resid[i] > fv:
                            fv = resid[i]
                            far = i
                    centers[c, 0] = xy[far, 0]
                    centers[c, 1] = xy[far, 1]
                    resid[far] = -1.0
        for c in range(k):
            if counts[c] > 0:
                centers[c, 0] = sums[c, 0] / counts[c]
                centers[c, 1] = sums[c, 1] / counts[c]
        changed = False
        w = 0.0
        for i in range(n):
            best = -1
            bv = np.inf
            for c in range(k):
                dx = xy[i, 0] - centers[c, 0]
                dy = xy[i, 1] - centers[c, 1]
                d = dx * dx + dy * dy
                if d < bv:
                    bv = d
                    best = c
            if best != assign[i]:
                assign[i] = best
                changed = True
            w += bv
        trace[it] = w
        if n_empty == 0:
            if not changed:
                break
            if prev_w - w <= tol * w:
                break
        prev_w = w
    return assign, trace[:used]


def _assign(xy: np.ndarray, centers: np.ndarray) -> np.ndarray:
    k = centers.shape[0]
    if k < _TREE_ASSIGN_MIN_K:
        d2 = (centers**2).sum(axis=1)[None, :] - 2.0 * (xy @ centers.T)
        return np.argmin(d2, axis=1)
    return cKDTree(centers).query(xy, k=1)[1]


def _wcss(xy: np.ndarray, centers: np.ndarray, assign: np.ndarray) -> float:
    return float(((xy - centers[assign]) ** 2).sum())


def _centers_from_assign(xy, assign, k):
    counts = np.bincount(assign, minlength=k).astype(np.float64)
    cx = np.bincount(assign, weights=xy[:, 0], minlength=k)
    cy = np.bincount(assign, weights=xy[:, 1], minlength=k)
    return np.column_stack([cx, cy]), counts


def _lloyd_tree(xy: np.ndarray, centers: np.ndarray, max_iters: int, tol: float):
    """Lloyd loop with KD-tree assignment, for large center counts."""
    k = centers.shape[0]
    assign = _assign(xy, centers)
    trace = []
    prev_w = np.inf
    for _ in range(max_iters):
        sums, counts = _centers_from_assign(xy, assign, k)
        empty = np.nonzero(counts == 0)[0]
        new_centers = sums / np.maximum(counts, 1)[:, None]
        if empty.size:
            resid = ((xy - centers[assign]) ** 2).sum(axis=1)
            for c in empty:
                far = int(np.argmax(resid))
                new_centers[c] = xy[far]
                resid[far] = -1.0
        centers = new_centers
        new_assign = _assign(xy, centers)
        w = _wcss(xy, centers, new_assign)
        trace.append(w)
        changed = not np.array_equal(new_assign, assign)
        assign = new_assign
        if empty.size == 0 and (not changed or prev_w - w <= tol * w):
            break
        prev_w = w
    return assign, trace


def _lloyd(xy: np.ndarray, centers: np.ndarray, max_iters: int,
           tol: float = _DEFAULT_TOL):
    """Lloyd iterations to convergence, plus final invariant enforcement.

    Convergence means the assignment stopped changing or the relative
    wcss improvement fell below ``tol``; empty clusters are repaired by
    reseeding at the point farthest from its current center. On return
    no cluster is empty and every center is the exact mean of its
    points. The trace of wcss values is non-increasing between repairs.
    """
    k = centers.shape[0]
    if k >= _TREE_ASSIGN_MIN_K:
        assign, trace = _lloyd_tree(xy, centers, max_iters, tol)
    else:
        assign, trace_arr = _lloyd_core(xy, centers.copy(), max_iters, tol)
        trace = list(trace_arr)

    counts = np.bincount(assign, minlength=k)
    while np.any(counts == 0):
        c = int(np.nonzero(counts == 0)[0][0])
        sums, fc = _centers_from_assign(xy, assign, k)
        means = sums / np.maximum(fc, 1)[:, None]
        resid = ((xy - means[assign]) ** 2).sum(axis=1)
        resid[counts[assign] < 2] = -1.0  # never empty a singleton
        assign[int(np.argmax(resid))] = c
        counts = np.bincount(assign, minlength=k)
    sums, counts = _centers_from_assign(xy, assign, k)
    centers = sums / counts[:, None]
    return assign, centers, _wcss(xy, centers, assign), trace


def kmeans(points: PointPair, k: int, restarts: int = 10, max_iters: int = 100,
           seed: int = DEFAULT_SEED, init_centers: np.ndarray | None = None,
           return_traces: bool = False):
    """K-means clustering with k-means++ starts.

    Runs ``restarts`` independent initializations and keeps the result
    with the smallest within-cluster sum of squares (first run wins
    ties). Passing ``init_centers`` skips initialization and runs a
    single Lloyd descent from the given centers.
    """
    xy = points.xy
    n = xy.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")

    best = None
    traces = []
    if init_centers is not None:
        starts = [np.asarray(init_centers, dtype=np.float64)]
    else:
        starts = [
            _plusplus_init(xy, k, rng_for(seed, "kmeans-init", r))
            for r in range(restarts)
        ]
    for start in starts:
        assign, centers, wcss, trace = _lloyd(xy, start.copy(), max_iters)
        traces.append(trace)
        if best is None or wcss < best[2]:
            best = (assign, centers, wcss)
    assign, centers, wcss = best
    counts = np.bincount(assign, minlength=k)
    result = Clustering(assign, centers, counts / n, k, wcss)
    if return_traces:
        return result, traces
    return result


def _principal_axis(centered: np.ndarray) -> np.ndarray:
    scatter = centered.T @ centered
    _, vecs = np.linalg.eigh(scatter)
    v = vecs[:, -1]
    # Deterministic sign so the split does not depend on eigensolver phase.
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        v = -v
    return v


def pca_cluster(points: PointPair, k: int) -> Clustering:
    """Divisive clustering by recursive principal-axis bisection.

    Repeatedly splits the cell with the largest total squared deviation
    from its centroid, cutting at the centroid along the cell's principal
    axis, until k cells exist. Fully deterministic; no seed involved.
    """
    xy = points.xy
    n = xy.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")

    cells: list[np.ndarray] = [np.arange(n)]
    sses: list[float] = [_cell_sse(xy, cells[0])]
    while len(cells) < k:
        cand = [i for i, c in enumerate(cells) if c.size >= 2]
        pick = max(cand, key=lambda i: (sses[i], -i))
        idx = cells[pick]
        sub = xy[idx]
        centered = sub - sub.mean(axis=0)
        proj = centered @ _principal_axis(centered)
        left = idx[proj <= 0]
        right = idx[proj > 0]
        if left.size == 0 or right.size == 0:
            half = idx.size // 2
            left, right = idx[:half], idx[half:]
        cells[pick] = left
        sses[pick] = _cell_sse(xy, left)
        cells.append(right)
        sses.append(_cell_sse(xy, right))

    assign = np.empty(n, np.int64)
    centers = np.empty((k, 2))
    for c, idx in enumerate(cells):
        assign[idx] = c
        centers[c] = xy[idx].mean(axis=0)
    weights = np.array([c.size for c in cells], dtype=np.float64) / n
    return Clustering(assign, centers, weights, k, float(sum(sses)))


def _cell_sse(xy: np.ndarray, idx: np.ndarray) -> float:
    sub = xy[idx]
    return float(((sub - sub.mean(axis=0)) ** 2).sum())
