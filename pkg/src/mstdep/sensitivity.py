"""Pairwise dependence matrices, input ranking, and the Sobol oracle.

The sensitivity workflow evaluates h* for every unordered column pair of
a rank-transformed dataset (optionally over several replicate datasets),
ranks inputs by their dependence on the output, and emits a structured
report. For the Ishigami benchmark with independent inputs the Sobol
first-order and total indices have closed forms and serve as the
reference the rankings are compared against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._util import DEFAULT_SEED, child_seed, pmap
from .dataset import Dataset, project_pair
from .entropy import ReferenceLevel, h_star


def pair_order(d: int) -> list[tuple[int, int]]:
    """Unordered column pairs in lexicographic order: (0,1), (0,2), ..."""
    return [(i, j) for i in range(d) for j in range(i + 1, d)]


@dataclass(frozen=True)
class DependencyMatrix:
    """h* statistics for every column pair, aggregated over replicates.

    ``means``, ``mins`` and ``maxs`` are d x d arrays filled symmetrically
    with NaN on the diagonal. Pair numbering in reports is 1-based
    lexicographic, so with columns (x, y, z, u, I) the input/output pairs
    are the sets 4, 7, 9 and 10.
    """

    names: tuple[str, ...]
    n_points: int
    method: str
    n_replicates: int
    means: np.ndarray
    mins: np.ndarray
    maxs: np.ndarray

    @property
    def n_columns(self) -> int:
        return len(self.names)

    def pairs(self):
        """Rows (set_number, i, j, mean, min, max) in lexicographic order."""
        out = []
        for num, (i, j) in enumerate(pair_order(self.n_columns), start=1):
            out.append((num, i, j, float(self.means[i, j]),
                        float(self.mins[i, j]), float(self.maxs[i, j])))
        return out


def pairwise_matrix(replicates: Dataset | Sequence[Dataset],
                    method: str = "fmst", K: int = 10, k: int | None = None,
                    restarts: int = 10, gamma: float = 1.0,
                    seed: int = DEFAULT_SEED,
                    threads: int = 1) -> DependencyMatrix:
    """Evaluate h* for every column pair, averaged over replicates.

    ``replicates`` is a single rank-transformed dataset or a sequence of
    them with identical columns; with several, per-pair min/mean/max over
    the replicates quantify the estimate's spread. Every (pair,
    replicate) cell gets its own derived seed, so the matrix is
    reproducible regardless of evaluation order.
    """
    if isinstance(replicates, Dataset):
        replicates = [replicates]
    if not replicates:
        raise ValueError("need at least one dataset")
    first = replicates[0]
    if first.n_columns < 2:
        raise ValueError("need at least 2 columns")
    for ds in replicates:
        if ds.transformed != "rank":
            raise ValueError("pairwise_matrix expects rank-transformed data")
        if ds.names != first.names or ds.n_points != first.n_points:
            raise ValueError("replicates must share columns and size")

    d = first.n_columns
    pairs = pair_order(d)
    jobs = [(p, (i, j), rep) for p, (i, j) in enumerate(pairs)
            for rep in range(len(replicates))]

    def cell(job) -> float:
        p, (i, j), rep = job
        pts = project_pair(replicates[rep], i, j)
        est = h_star(pts, method=method, gamma=gamma, K=K, k=k,
                     restarts=restarts, seed=child_seed(seed, "pair", p, rep))
        return est.h_star

    values = np.array(pmap(cell, jobs, threads)).reshape(len(pairs),
                                                         len(replicates))
    means = np.full((d, d), np.nan)
    mins = np.full((d, d), np.nan)
    maxs = np.full((d, d), np.nan)
    for p, (i, j) in enumerate(pairs):
        row = values[p]
        means[i, j] = means[j, i] = row.mean()
        mins[i, j] = mins[j, i] = row.min()
        maxs[i, j] = maxs[j, i] = row.max()
    return DependencyMatrix(first.names, first.n_points, method,
                            len(replicates), means, mins, maxs)


def rank_inputs(matrix: DependencyMatrix, output_col: int) -> list[tuple[str, float]]:
    """Inputs ordered from most to least important for one output column.

    Importance is dependence on the output: ascending mean h*, ties
    broken by column index. Returns (name, h*) tuples excluding the
    output itself.
    """
    d = matrix.n_columns
    if not 0 <= output_col < d:
        raise IndexError(f"output column {output_col} out of range")
    items = [(i, float(matrix.means[i, output_col]))
             for i in range(d) if i != output_col]
    items.sort(key=lambda t: (t[1], t[0]))
    return [(matrix.names[i], v) for i, v in items]


@dataclass(frozen=True)
class SobolIndices:
    """First-order and total variance-based indices per input."""

    names: tuple[str, ...]
    first_order: tuple[float, ...]
    total: tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            name: {"S": s, "ST": st}
            for name, s, st in zip(self.names, self.first_order, self.total)
        }


def ishigami_sobol(a: float = 7.0, b: float = 0.1) -> SobolIndices:
    """Analytic Sobol indices of the Ishigami function, inputs U(-pi, pi).

    Of the four inputs (x, y, z, u) only x and y carry first-order
    variance; z acts through the x-z interaction alone and u is inert.
    """
    pi4 = math.pi**4
    pi8 = math.pi**8
    total_var = a**2 / 8.0 + b * pi4 / 5.0 + b**2 * pi8 / 18.0 + 0.5
    d_x = b * pi4 / 5.0 + b**2 * pi8 / 50.0 + 0.5
    d_y = a**2 / 8.0
    d_xz = 8.0 * b**2 * pi8 / 225.0
    s = (d_x / total_var, d_y / total_var, 0.0, 0.0)
    st = ((d_x + d_xz) / total_var, d_y / total_var, d_xz / total_var, 0.0)
    return SobolIndices(("x", "y", "z", "u"), s, st)


INTERACTION_CAVEAT = (
    "pairwise dependence cannot see pure interaction effects; an input "
    "acting only jointly with another may appear independent of the output"
)


def report(matrix: DependencyMatrix, ranking: list[tuple[str, float]],
           reference: ReferenceLevel | None = None,
           eta: float = 0.05) -> dict:
    """JSON-ready report: per-pair statistics, verdicts, and the ranking.

    With a reference level, each pair gets an independence verdict at the
    eta-quantile threshold; without one the verdict fields are null.
    """
    threshold = None
    if reference is not None:
        if reference.n_points != matrix.n_points:
            raise ValueError(
                f"reference built for N={reference.n_points}, "
                f"matrix has N={matrix.n_points}"
            )
        if reference.method != matrix.method:
            raise ValueError(
                f"reference method {reference.method!r} does not match "
                f"matrix method {matrix.method!r}"
            )
        threshold = reference.quantile(eta)
    pairs = []
    for num, i, j, mean, lo, hi in matrix.pairs():
        pairs.append({
            "set": num,
            "i": i,
            "j": j,
            "a": matrix.names[i],
            "b": matrix.names[j],
            "h_star_mean": mean,
            "h_star_min": lo,
            "h_star_max": hi,
            "dependent": bool(mean <= threshold) if threshold is not None else None,
            "threshold": threshold,
        })
    return {
        "format_version": 1,
        "variables": list(matrix.names),
        "n_points": matrix.n_points,
        "method": matrix.method,
        "n_replicates": matrix.n_replicates,
        "eta": eta if threshold is not None else None,
        "pairs": pairs,
        "ranking": [{"input": name, "h_star": value} for name, value in ranking],
        "caveat": INTERACTION_CAVEAT,
    }


def format_report_table(rep: dict) -> str:
    """Aligned-text rendering of a report dict."""
    lines = [
        f"variables : {', '.join(rep['variables'])}",
        f"n_points  : {rep['n_points']}   method: {rep['method']}   "
        f"replicates: {rep['n_replicates']}",
        "",
        f"{'set':>4} {'pair':<16} {'mean h*':>10} {'min':>10} {'max':>10} verdict",
    ]
    for p in rep["pairs"]:
        verdict = "-"
        if p["dependent"] is not None:
            verdict = "dependent" if p["dependent"] else "independent"
        lines.append(
            f"{p['set']:>4} {p['a'] + ',' + p['b']:<16} "
            f"{p['h_star_mean']:>10.4f} {p['h_star_min']:>10.4f} "
            f"{p['h_star_max']:>10.4f} {verdict}"
        )
    lines.append("")
    lines.append("ranking (most to least important):")
    for r in rep["ranking"]:
        lines.append(f"  {r['input']:<8} h* = {r['h_star']:.4f}")
    lines.append("")
    lines.append(f"note: {rep['caveat']}")
    return "\n".join(lines) + "\n"
