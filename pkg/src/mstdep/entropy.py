"""The dependence quantifier and its independence reference level.

For a rank-transformed pair of variables with N points, the quantifier is

    h* = log(L / N**alpha),    alpha = 1/2 for 2-D data,

with L the (exact or approximate) MST length. Lower values mean stronger
dependence. Under independence the rank-transformed data fills the unit
square, so h* concentrates near a level that depends only on N and the
method; the empirical distribution of that level provides the rejection
threshold for an independence test. The quantifier is an affine function
of the classical minimal-graph entropy estimator, which is why orderings
derived from it agree with entropy orderings while needing no
normalization constant.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ._util import DEFAULT_SEED, child_seed, pmap
from .approx import METHODS, ApproxResult, cluster_mst, fmst, sampling_mst
from .dataset import PointPair, project_pair, rank_transform
from .mst import mst_prim
from .synth import gen_uniform

EXACT = "exact"
ALL_METHODS = (EXACT,) + METHODS


@dataclass(frozen=True)
class DependencyEstimate:
    """One h* value with the metadata needed to compare or test it.

    ``n_points`` is the size of the underlying dataset and ``length`` the
    equivalent exact-MST length, defined so that
    ``h_star == log(length / n_points**alpha)`` holds for every method;
    methods with a different internal normalization keep their raw result
    in ``detail``.
    """

    h_star: float
    n_points: int
    alpha: float
    gamma: float
    method: str
    length: float
    detail: ApproxResult | None = None


class TestResult(NamedTuple):
    reject: bool
    threshold: float


@dataclass(frozen=True)
class ReferenceLevel:
    """Empirical distribution of h* under independence for one (N, method)."""

    samples: np.ndarray  # sorted ascending, length r
    n_points: int
    method: str
    r: int
    seed: int

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 1 or s.size != self.r:
            raise ValueError("samples must be a vector of length r")
        if self.r < 20:
            raise ValueError("need at least 20 repetitions")
        if np.any(np.diff(s) < 0):
            raise ValueError("samples must be sorted ascending")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)

    def quantile(self, eta: float) -> float:
        """Empirical eta-quantile (inverse CDF order statistic)."""
        if not 0.0 < eta < 0.5:
            raise ValueError("eta must be in (0, 0.5)")
        idx = max(0, math.ceil(eta * self.r) - 1)
        return float(self.samples[idx])


def h_star(points: PointPair, method: str = EXACT, gamma: float = 1.0,
           K: int = 10, k: int | None = None, restarts: int = 10,
           max_iters: int = 100, seed: int = DEFAULT_SEED) -> DependencyEstimate:
    """Dependence estimate for one rank-transformed variable pair.

    ``method`` selects the MST construction: ``exact`` or one of the
    approximations. K is the subset count for sampling methods and sets
    the default cluster count k = N // K for cluster methods. gamma other
    than 1 is supported for the exact method only; it rescales alpha to
    (2 - gamma) / 2.
    """
    if points.transformed != "rank":
        raise ValueError("h_star requires rank-transformed input")
    n = points.n_points
    if n < 2:
        raise ValueError("need at least 2 points")
    if method == EXACT:
        if not 0.0 < gamma < 2.0:
            raise ValueError("gamma must lie in (0, 2)")
        alpha = (2.0 - gamma) / 2.0
        tree = mst_prim(points, gamma)
        h = math.log(tree.gamma_length / n**alpha)
        return DependencyEstimate(h, n, alpha, gamma, method,
                                  tree.gamma_length)
    if gamma != 1.0:
        raise ValueError("approximate methods support gamma=1 only")
    alpha = 0.5
    if method in ("sampling-random", "sampling-stratified"):
        strata = "random" if method == "sampling-random" else "kmeans-stratified"
        res = sampling_mst(points, K=K, strata=strata, seed=seed,
                           restarts=restarts, max_iters=max_iters, alpha=alpha)
    elif method.startswith("cluster-"):
        parts = method.split("-")
        res = cluster_mst(points, k if k is not None else max(2, n // K),
                          method=parts[1], weighted=method.endswith("-weighted"),
                          seed=seed, restarts=restarts, max_iters=max_iters,
                          alpha=alpha)
    elif method == "fmst":
        res = fmst(points, seed=seed, restarts=restarts, max_iters=max_iters,
                   alpha=alpha)
    else:
        raise ValueError(f"unknown method {method!r}")
    equiv = math.exp(res.h_star) * n**alpha
    return DependencyEstimate(res.h_star, n, alpha, 1.0, method, equiv, res)


def h_hat(est: DependencyEstimate, beta: float) -> float:
    """Entropy value implied by an estimate and a caller-supplied constant.

    The estimator and h* differ by an affine map; this inverts it,
    ``(h_star - log(beta)) / (1 - alpha)``. Orderings are unaffected, so
    most workflows never need it.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    return (est.h_star - math.log(beta)) / (1.0 - est.alpha)


def default_cache_dir() -> Path:
    env = os.environ.get("MSTDEP_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "mstdep"


def _reference_path(cache_dir: Path, n: int, r: int, method: str, seed: int,
                    K: int) -> Path:
    return cache_dir / f"ref_N{n}_r{r}_{method}_K{K}_seed{seed}.json"


def save_reference(ref: ReferenceLevel, path) -> None:
    payload = {
        "format_version": 1,
        "n_points": ref.n_points,
        "method": ref.method,
        "r": ref.r,
        "seed": ref.seed,
        "samples": ref.samples.tolist(),
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")


def load_reference(path) -> ReferenceLevel:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format_version") != 1:
        raise ValueError(f"{path}: unsupported reference file version")
    return ReferenceLevel(
        np.asarray(payload["samples"], dtype=np.float64),
        int(payload["n_points"]),
        str(payload["method"]),
        int(payload["r"]),
        int(payload["seed"]),
    )


def build_reference(n_points: int, r: int, method: str = EXACT,
                    seed: int = DEFAULT_SEED, K: int = 10,
                    threads: int = 1, cache_dir=None,
                    use_cache: bool = True) -> ReferenceLevel:
    """Sample the independence distribution of h* for (N, method).

    Draws r independent bivariate uniform datasets, rank-transforms each
    and evaluates h*; the sorted sample is the empirical reference.
    Results are cached on disk keyed by (N, r, method, K, seed).
    """
    if r < 20:
        raise ValueError("need at least 20 repetitions")
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    path = _reference_path(cache, n_points, r, method, seed, K)
    if use_cache and path.exists():
        ref = load_reference(path)
        if ref.n_points == n_points and ref.r == r and ref.method == method:
            return ref

    def one(i: int) -> float:
        data = gen_uniform(n_points, 2, seed=child_seed(seed, "ref-data", i))
        ranked = rank_transform(data, seed=child_seed(seed, "ref-rank", i))
        est = h_star(project_pair(ranked, 0, 1), method=method, K=K,
                     seed=child_seed(seed, "ref-est", i))
        return est.h_star

    values = np.sort(np.array(pmap(one, range(r), threads)))
    ref = ReferenceLevel(values, n_points, method, r, seed)
    if use_cache:
        save_reference(ref, path)
    return ref


def independence_test(est: DependencyEstimate, ref: ReferenceLevel,
                      eta: float = 0.05) -> TestResult:
    """Quantile test of the independence hypothesis.

    Rejects (declares dependence) iff the estimate falls at or below the
    empirical eta-quantile of the reference distribution.
    """
    if est.n_points != ref.n_points:
        raise ValueError(
            f"reference built for N={ref.n_points}, estimate has N={est.n_points}"
        )
    if est.method != ref.method:
        raise ValueError(
            f"reference built for method {ref.method!r}, estimate used {est.method!r}"
        )
    threshold = ref.quantile(eta)
    return TestResult(est.h_star <= threshold, threshold)


def renyi_analytic(dist: str, alpha: float, rho: float | None = None,
                   A: float | None = None) -> float:
    """Closed-form Renyi entropy for the benchmark distributions.

    ``uniform``: the unit square, entropy 0. ``normal``: bivariate
    standard normal with correlation rho. ``shape``: constant density on
    a region of area 1 - A, whose entropy log(1 - A) does not depend on
    alpha (both corner and line variants).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if dist == "uniform":
        return 0.0
    if dist == "normal":
        if rho is None or not abs(rho) < 1.0:
            raise ValueError("normal requires |rho| < 1")
        return math.log(2 * math.pi) + 0.5 * math.log1p(-rho * rho) \
            - math.log(alpha) / (1.0 - alpha)
    if dist == "shape":
        if A is None or not 0.0 <= A < 1.0:
            raise ValueError("shape requires A in [0, 1)")
        return math.log1p(-A)
    raise ValueError(f"unknown distribution {dist!r}")


def alpha_sweep_normal(rho_grid, alpha_grid) -> np.ndarray:
    """Entropy of the correlated normal over a (rho, alpha) grid.

    Row i, column j holds the entropy at rho_grid[i], alpha_grid[j]. The
    rho-dependence, 0.5 * log(1 - rho^2), is a shift independent of
    alpha: subtracting the rho=0 row leaves every row constant in alpha.
    """
    out = np.empty((len(rho_grid), len(alpha_grid)))
    for i, rho in enumerate(rho_grid):
        for j, a in enumerate(alpha_grid):
            out[i, j] = renyi_analytic("normal", a, rho=rho)
    return out
