"""Tabular datasets: CSV ingestion, rank transform, jitter, range normalization.

A :class:`Dataset` is an immutable N x d table of finite reals. Analysis
always runs on rank-transformed data, whose per-column marginals are the
centered grid ``(i - 1/2) / N`` for ``i = 1..N``; that normalization is
what makes the spanning-tree length comparable across variable pairs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ._util import DEFAULT_SEED, rng_for

RAW = "raw"
RANK = "rank"
RANGE = "range"

_TRANSFORMS = (RAW, RANK, RANGE)


class CsvFormatError(ValueError):
    """Raised when a CSV file cannot be parsed into a numeric table."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Dataset:
    """Column-oriented table of real values.

    ``values`` has shape (N, d); ``names`` labels the d columns;
    ``transformed`` is one of ``"raw"``, ``"rank"``, ``"range"``.
    Values are frozen after construction, so instances are safe to share
    across workers.
    """

    names: tuple[str, ...]
    values: np.ndarray
    transformed: str = RAW

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError("values must be a 2-D array")
        if vals.shape[0] < 2:
            raise ValueError("a dataset needs at least 2 rows")
        if vals.shape[1] != len(self.names):
            raise ValueError("length of names must match column count")
        if not np.all(np.isfinite(vals)):
            raise ValueError("dataset values must be finite")
        if self.transformed not in _TRANSFORMS:
            raise ValueError(f"unknown transform tag {self.transformed!r}")
        object.__setattr__(self, "names", tuple(str(n) for n in self.names))
        object.__setattr__(self, "values", _freeze(vals))

    @property
    def n_points(self) -> int:
        return self.values.shape[0]

    @property
    def n_columns(self) -> int:
        return self.values.shape[1]

    def column(self, idx: int) -> np.ndarray:
        return self.values[:, idx]


@dataclass(frozen=True)
class PointPair:
    """A 2-D projection of one column pair, the unit every MST runs on."""

    xy: np.ndarray
    col_a: int = 0
    col_b: int = 1
    transformed: str = RAW
    names: tuple[str, str] = ("a", "b")

    def __post_init__(self):
        pts = np.asarray(self.xy, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("xy must have shape (N, 2)")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point coordinates must be finite")
        if self.col_a == self.col_b:
            raise ValueError("column indices must differ")
        object.__setattr__(self, "xy", _freeze(pts))

    @property
    def n_points(self) -> int:
        return self.xy.shape[0]


def load_csv(path, delimiter: str = ",", has_header: bool = True) -> Dataset:
    """Read a numeric CSV file into a raw :class:`Dataset`.

    Every row must have the same number of fields and every field must
    parse as a finite real. Column names come from the header row when
    ``has_header`` is true, otherwise they are generated as c0..c(d-1).
    Parse problems raise :class:`CsvFormatError` naming the offending
    row and column (1-based).
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        rows = [row for row in reader if row]
    if not rows:
        raise CsvFormatError(f"{path}: file is empty")

    if has_header:
        names = [s.strip() for s in rows[0]]
        data_rows = rows[1:]
        offset = 2
    else:
        names = [f"c{i}" for i in range(len(rows[0]))]
        data_rows = rows
        offset = 1

    d = len(names)
    out = np.empty((len(data_rows), d), dtype=np.float64)
    for r, row in enumerate(data_rows):
        if len(row) != d:
            raise CsvFormatError(
                f"{path}: row {r + offset} has {len(row)} fields, expected {d}"
            )
        for c, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise CsvFormatError(
                    f"{path}: row {r + offset}, column {c + 1}: "
                    f"could not parse {cell.strip()!r}"
                ) from None
            if not math.isfinite(v):
                raise CsvFormatError(
                    f"{path}: row {r + offset}, column {c + 1}: "
                    f"non-finite value {cell.strip()!r}"
                )
            out[r, c] = v
    if out.shape[0] < 2:
        raise CsvFormatError(f"{path}: need at least 2 data rows")
    return Dataset(tuple(names), out, RAW)


def rank_transform(
    data: Dataset,
    seed: int = DEFAULT_SEED,
    tie_policy: str = "random-within-ties",
) -> Dataset:
    """Replace each column by centered normalized ranks (i - 1/2) / N.

    The map is strictly monotone on distinct values; tied values get a
    uniformly random order within their tie group, driven by ``seed``.
    Average/midranks are deliberately unsupported: they would repeat
    grid values and break the exact-grid marginal property.
    """
    if data.transformed != RAW:
        raise ValueError("rank_transform expects raw data")
    if tie_policy != "random-within-ties":
        raise ValueError(
            f"unsupported tie policy {tie_policy!r}; "
            "only 'random-within-ties' keeps the marginals on the exact grid"
        )
    n, d = data.values.shape
    grid = (np.arange(1, n + 1) - 0.5) / n
    out = np.empty_like(data.values)
    for c in range(d):
        col = data.values[:, c]
        noise = rng_for(seed, "rank", c).random(n)
        order = np.lexsort((noise, col))
        out[order, c] = grid
    return Dataset(data.names, out, RANK)


def jitter(data: Dataset, sigma: float = 1e-6, seed: int = DEFAULT_SEED) -> Dataset:
    """Perturb each value with N(0, sigma^2) noise to separate duplicates.

    The ordering of previously distinct values is preserved: any noise
    draw that would swap two distinct values is rejected and redrawn for
    the offending entries. ``sigma = 0`` returns the input unchanged.
    """
    if data.transformed == RAW:
        raise ValueError("jitter applies to transformed data only")
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0.0:
        return data

    n, d = data.values.shape
    out = np.empty_like(data.values)
    for c in range(d):
        col = data.values[:, c]
        rng = rng_for(seed, "jitter", c)
        noisy = col + rng.normal(0.0, sigma, size=n)
        order = np.argsort(col, kind="stable")
        sorted_col = col[order]
        # Boundaries between groups of equal original values; order must
        # stay strict across groups, ties may land in any order. At each
        # boundary the running max of earlier noisy values must stay below
        # the running min of later ones; offenders are redrawn.
        group_edge = np.nonzero(np.diff(sorted_col) > 0)[0]
        for _ in range(10_000):
            ns = noisy[order]
            pre_max = np.maximum.accumulate(ns)
            suf_min = np.minimum.accumulate(ns[::-1])[::-1]
            bad = group_edge[pre_max[group_edge] >= suf_min[group_edge + 1]]
            if bad.size == 0:
                break
            redo = []
            for e in bad:
                redo.append(int(np.argmax(ns[: e + 1])))
                redo.append(int(np.argmin(ns[e + 1 :])) + e + 1)
            idx = order[np.unique(redo)]
            noisy[idx] = col[idx] + rng.normal(0.0, sigma, size=idx.size)
        else:
            raise RuntimeError("jitter failed to preserve value ordering")
        out[:, c] = noisy
    return Dataset(data.names, out, data.transformed)


def range_normalize(data: Dataset) -> Dataset:
    """Affinely map each column onto [0, 1]; constant columns are an error."""
    lo = data.values.min(axis=0)
    hi = data.values.max(axis=0)
    span = hi - lo
    flat = np.nonzero(span == 0)[0]
    if flat.size:
        raise ValueError(
            f"cannot range-normalize constant column {data.names[flat[0]]!r}"
        )
    return Dataset(data.names, (data.values - lo) / span, RANGE)


def has_duplicate_values(data: Dataset) -> bool:
    """True if any column contains a repeated value (rank ties / zero edges)."""
    for c in range(data.n_columns):
        col = np.sort(data.values[:, c])
        if np.any(np.diff(col) == 0):
            return True
    return False


def project_pair(data: Dataset, col_a: int, col_b: int) -> PointPair:
    """Extract the 2-D point cloud of two distinct columns."""
    d = data.n_columns
    for idx in (col_a, col_b):
        if not 0 <= idx < d:
            raise IndexError(f"column index {idx} out of range for d={d}")
    if col_a == col_b:
        raise ValueError("column indices must differ")
    return PointPair(
        data.values[:, [col_a, col_b]],
        col_a=col_a,
        col_b=col_b,
        transformed=data.transformed,
        names=(data.names[col_a], data.names[col_b]),
    )
