"""Approximate MST-length estimates for large point sets.

Three families, all trading exactness for speed:

* sampling: split the data into K subsets, estimate on each exact
  subset MST, aggregate the per-subset estimates;
* cluster: build the MST on k cluster centers instead of the points,
  optionally reweighting edges by harmonic cluster-size factors;
* fmst: a two-stage multilevel construction that stitches per-cluster
  exact MSTs together and re-extracts the MST from the merged graph.

Each result carries the dependence estimate ``h_star`` computed with the
normalization appropriate to the method (subset size, cluster count, or
full N), so results from different methods are directly comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._util import DEFAULT_SEED, child_seed, rng_for
from .clustering import Clustering, kmeans, pca_cluster
from .dataset import PointPair
from .mst import SpanningTree, kruskal_edges, mst_prim_xy, prim_dense_matrix

METHODS = (
    "sampling-random",
    "sampling-stratified",
    "cluster-kmeans",
    "cluster-kmeans-weighted",
    "cluster-pca",
    "cluster-pca-weighted",
    "fmst",
)


@dataclass(frozen=True)
class ApproxResult:
    """Outcome of one approximate MST evaluation.

    ``h_star`` is the dependence estimate ``log(L / M**alpha)`` with M the
    number of points entering the tree (``norm_points``: the cluster count
    for cluster methods, N for fmst). Sampling methods instead average
    the per-subset estimates; for them ``length`` holds the mean of the
    per-subset normalized lengths ``L(s) / n_s**alpha`` and ``per_subset``
    the individual estimates with sample variance ``h_var``.
    """

    method: str
    h_star: float
    length: float
    n_points: int
    alpha: float = 0.5
    norm_points: int | None = None
    per_subset: np.ndarray | None = None
    h_var: float | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("approximate length must be positive")
        if self.per_subset is not None:
            ps = np.asarray(self.per_subset, dtype=np.float64)
            ps.flags.writeable = False
            object.__setattr__(self, "per_subset", ps)


def sampling_mst(points: PointPair, K: int = 10, strata: str = "random",
                 seed: int = DEFAULT_SEED, restarts: int = 10,
                 max_iters: int = 100, alpha: float = 0.5) -> ApproxResult:
    """Split-and-average estimate from K exact subset MSTs.

    Each subset s of size n_s yields ``h_s = log(L(s) / n_s**alpha)``;
    the estimate is the arithmetic mean of the h_s and their sample
    variance measures its quality. ``strata='random'`` allocates points
    uniformly; ``strata='kmeans-stratified'`` first forms N//K clusters
    and deals each cluster's points across the subsets.
    """
    n = points.n_points
    if K < 1:
        raise ValueError("K must be >= 1")
    if n // K < 2:
        raise ValueError(f"subsets of size {n // K} are too small")
    if strata == "random":
        perm = rng_for(seed, "split").permutation(n)
        subsets = np.array_split(perm, K)
        tag = "sampling-random"
    elif strata == "kmeans-stratified":
        k = n // K
        cl = kmeans(points, k, restarts=restarts, max_iters=max_iters,
                    seed=child_seed(seed, "strata"))
        rng = rng_for(seed, "deal")
        buckets: list[list[int]] = [[] for _ in range(K)]
        pos = 0
        for c in range(cl.k):
            for p in rng.permutation(cl.cluster_indices(c)):
                buckets[pos % K].append(int(p))
                pos += 1
        subsets = [np.sort(np.array(b, dtype=np.int64)) for b in buckets]
        tag = "sampling-stratified"
    else:
        raise ValueError(f"unknown strata mode {strata!r}")

    per = np.empty(K)
    norm_len = np.empty(K)
    for s, idx in enumerate(subsets):
        tree = mst_prim_xy(points.xy[idx])
        norm_len[s] = tree.gamma_length / idx.size**alpha
        per[s] = math.log(norm_len[s])
    h_mean = float(per.mean())
    h_var = float(per.var(ddof=1)) if K > 1 else 0.0
    return ApproxResult(tag, h_mean, float(norm_len.mean()), n, alpha,
                        per_subset=per, h_var=h_var,
                        params={"K": K, "seed": seed})


def harmonic_weight(k: int, w_i: float, w_j: float) -> float:
    """Harmonic cluster-size factor applied to a center-graph edge."""
    return 2.0 * k / (1.0 / w_i + 1.0 / w_j)


def _cluster(points: PointPair, k: int, method: str, seed: int,
             restarts: int, max_iters: int) -> Clustering:
    if method == "kmeans":
        return kmeans(points, k, restarts=restarts, max_iters=max_iters,
                      seed=seed)
    if method == "pca":
        return pca_cluster(points, k)
    raise ValueError(f"unknown clustering method {method!r}")


def cluster_mst(points: PointPair, k: int, method: str = "kmeans",
                weighted: bool = False, seed: int = DEFAULT_SEED,
                restarts: int = 10, max_iters: int = 100,
                alpha: float = 0.5) -> ApproxResult:
    """MST over k cluster centers as a stand-in for the full MST.

    Unweighted: plain Euclidean MST length of the centers. Weighted:
    every center-pair distance is scaled by the harmonic factor
    ``2k / (1/w_i + 1/w_j)`` before minimization, so edges between small
    clusters count less; the reported length is the minimized reweighted
    total. Normalization uses k, the number of points in the tree.
    """
    n = points.n_points
    if not 2 <= k <= n:
        raise ValueError(f"k must be in [2, {n}], got {k}")
    cl = _cluster(points, k, method, child_seed(seed, "cluster"), restarts,
                  max_iters)
    if weighted:
        diff = cl.centers[:, None, :] - cl.centers[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
        inv = 1.0 / cl.weights
        factors = 2.0 * k / (inv[:, None] + inv[None, :])
        _, wts = prim_dense_matrix(factors * dist)
        length = float(wts.sum())
    else:
        length = mst_prim_xy(cl.centers).gamma_length
    h = math.log(length / k**alpha)
    tag = f"cluster-{method}-weighted" if weighted else f"cluster-{method}"
    return ApproxResult(tag, float(h), float(length), n, alpha, norm_points=k,
                        params={"k": k, "seed": seed, "weighted": weighted})


def _closest_pair(xy: np.ndarray, a_idx: np.ndarray, b_idx: np.ndarray,
                  block: int = 2048):
    """Globally closest (i, j) with i in a_idx, j in b_idx; O(|A||B|) scan."""
    b_pts = xy[b_idx]
    best = np.inf
    bi = bj = -1
    for start in range(0, a_idx.size, block):
        chunk = a_idx[start:start + block]
        d2 = ((xy[chunk][:, None, :] - b_pts[None, :, :]) ** 2).sum(axis=2)
        flat = int(np.argmin(d2))
        r, c = divmod(flat, b_idx.size)
        if d2[r, c] < best:
            best = d2[r, c]
            bi, bj = int(chunk[r]), int(b_idx[c])
    return bi, bj, math.sqrt(best)


def _stage_edges(xy: np.ndarray, cl: Clustering):
    """Per-cluster MST edges plus shortest edges between adjacent clusters.

    Cluster adjacency comes from the MST of the cluster centers; the
    resulting edge set spans all points. Also returns the midpoints of
    the connecting edges, which seed the second pass.
    """
    iu, jv, w = [], [], []
    members = [cl.cluster_indices(c) for c in range(cl.k)]
    for idx in members:
        if idx.size >= 2:
            sub = mst_prim_xy(xy[idx])
            iu.append(idx[sub.edges[:, 0]])
            jv.append(idx[sub.edges[:, 1]])
            w.append(sub.weights)
    mids = []
    if cl.k >= 2:
        ctree = mst_prim_xy(cl.centers)
        ci = np.empty(cl.k - 1, np.int64)
        cj = np.empty(cl.k - 1, np.int64)
        cw = np.empty(cl.k - 1, np.float64)
        for e, (a, b) in enumerate(ctree.edges):
            gi, gj, dist = _closest_pair(xy, members[a], members[b])
            ci[e], cj[e], cw[e] = gi, gj, dist
            mids.append(0.5 * (xy[gi] + xy[gj]))
        iu.append(ci)
        jv.append(cj)
        w.append(cw)
    return (np.concatenate(iu), np.concatenate(jv), np.concatenate(w)), mids


def fmst(points: PointPair, seed: int = DEFAULT_SEED, restarts: int = 10,
         max_iters: int = 30, alpha: float = 0.5,
         return_tree: bool = False):
    """Two-stage multilevel approximate MST over all N points.

    Stage 1 partitions the data into ceil(sqrt(N)) k-means clusters,
    builds exact MSTs inside each cluster and connects clusters that are
    adjacent in the MST of their centers through their closest point
    pair. Stage 2 repeats the construction with k-means seeded at the
    midpoints of stage 1's connecting edges, catching neighbor pairs the
    first partition separated. The final tree is the exact MST of the
    merged edge set, so its length never falls below the true MST length.

    The default iteration cap is modest: the construction only needs a
    reasonable partition, not a fully converged one, and a fixed cap
    keeps the total cost on its O(N^1.5) profile.
    """
    n = points.n_points
    if n < 4:
        raise ValueError("need at least 4 points")
    xy = points.xy
    k1 = math.isqrt(n - 1) + 1
    cl1 = kmeans(points, k1, restarts=restarts, max_iters=max_iters,
                 seed=child_seed(seed, "fmst", 1))
    (i1, j1, w1), mids = _stage_edges(xy, cl1)
    cl2 = kmeans(points, len(mids), max_iters=max_iters,
                 seed=child_seed(seed, "fmst", 2),
                 init_centers=np.asarray(mids))
    (i2, j2, w2), _ = _stage_edges(xy, cl2)

    iu = np.concatenate([i1, i2])
    jv = np.concatenate([j1, j2])
    w = np.concatenate([w1, w2])
    lo = np.minimum(iu, jv)
    hi = np.maximum(iu, jv)
    _, keep = np.unique(lo * n + hi, return_index=True)
    tree = kruskal_edges(n, lo[keep], hi[keep], w[keep])
    h = math.log(tree.gamma_length / n**alpha)
    result = ApproxResult("fmst", float(h), float(tree.gamma_length), n, alpha,
                          norm_points=n, params={"seed": seed})
    if return_tree:
        return result, tree
    return result


def approx_error(approx: ApproxResult, exact: SpanningTree, n_points: int,
                 alpha: float = 0.5) -> float:
    """Absolute difference between approximate and exact dependence values."""
    if exact.n_points != n_points:
        raise ValueError(
            f"exact tree has {exact.n_points} points, expected {n_points}"
        )
    h_exact = math.log(float(exact.weights.sum()) / n_points**alpha)
    return abs(approx.h_star - h_exact)
