"""Synthetic dataset generators used for validation and benchmarking.

Includes the independent baselines (uniform, correlated normal), two
"shape" families with a tunable excluded area inside the unit square,
the Ishigami benchmark function with independent uniform inputs, and a
strongly dependent input generator where three inputs and one confounder
are polynomial functions of a single latent variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import DEFAULT_SEED, rng_for
from .dataset import RAW, Dataset, range_normalize


@dataclass(frozen=True)
class ShapeParam:
    """Excluded-area parameter for the corner/line distributions.

    The support is the unit square minus a region of area ``A``; the
    remaining region always touches 0 and 1 in both coordinates so the
    ranges are preserved for every A.
    """

    A: float
    kind: str = "corner"

    def __post_init__(self):
        if not 0.0 <= self.A < 1.0:
            raise ValueError("A must lie in [0, 1)")
        if self.kind not in ("corner", "line"):
            raise ValueError(f"unknown shape kind {self.kind!r}")

    def contains(self, x, y):
        """Vectorized membership predicate of the supported region.

        corner: the square with corner (1, 1) and side sqrt(A) is cut
        out, concentrating mass toward the lower-left (an L-shape whose
        two arms carry all the mass as A -> 1).
        line: two triangles symmetric about the main diagonal are cut
        out, leaving the band |x - y| <= 1 - sqrt(A) around the diagonal.
        """
        s = math.sqrt(self.A)
        if self.kind == "corner":
            return ~((np.asarray(x) > 1.0 - s) & (np.asarray(y) > 1.0 - s))
        return np.abs(np.asarray(x) - np.asarray(y)) <= 1.0 - s


@dataclass(frozen=True)
class IshigamiParam:
    a: float = 7.0
    b: float = 0.1


def gen_uniform(n: int, d: int = 2, seed: int = DEFAULT_SEED) -> Dataset:
    """d columns of i.i.d. U[0, 1] samples."""
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    vals = rng_for(seed, "uniform").random((n, d))
    return Dataset(tuple(f"c{i}" for i in range(d)), vals, RAW)


def gen_normal(n: int, rho: float, seed: int = DEFAULT_SEED) -> Dataset:
    """Bivariate standard normal with correlation rho."""
    if not abs(rho) < 1.0:
        raise ValueError("|rho| must be < 1")
    z = rng_for(seed, "normal").standard_normal((n, 2))
    x = z[:, 0]
    y = rho * z[:, 0] + math.sqrt(1.0 - rho * rho) * z[:, 1]
    return Dataset(("c0", "c1"), np.column_stack([x, y]), RAW)


def gen_shape(n: int, param: ShapeParam, seed: int = DEFAULT_SEED) -> Dataset:
    """Uniform samples on the shape region, by rejection from the square."""
    rng = rng_for(seed, "shape", param.kind)
    keep_rate = max(1.0 - param.A, 1e-3)
    out = np.empty((0, 2))
    while out.shape[0] < n:
        todo = n - out.shape[0]
        batch = rng.random((int(todo / keep_rate * 1.2) + 16, 2))
        ok = param.contains(batch[:, 0], batch[:, 1])
        out = np.vstack([out, batch[ok]])
    return Dataset(("c0", "c1"), out[:n], RAW)


def ishigami(x, y, z, param: IshigamiParam = IshigamiParam()):
    """Three-input benchmark response on [0, 1] inputs.

    x and y are mapped onto (-pi, pi) for the oscillatory terms; the
    interaction factor uses the raw third coordinate, so

        I = sin(X) + a * sin(Y)**2 + b * z**4 * sin(X).

    z therefore has no main effect and only a faint amplitude coupling
    with x (b * z**4 <= b), which keeps the (z, I) pair at the
    independence level while x and y carry the signal.
    """
    X = -math.pi + 2.0 * math.pi * np.asarray(x)
    Y = -math.pi + 2.0 * math.pi * np.asarray(y)
    return np.sin(X) + param.a * np.sin(Y) ** 2 \
        + param.b * np.asarray(z) ** 4 * np.sin(X)


ISHIGAMI_COLUMNS = ("x", "y", "z", "u", "I")


def gen_ishigami_uniform(n: int, seed: int = DEFAULT_SEED,
                         param: IshigamiParam = IshigamiParam()) -> Dataset:
    """Four independent U[0,1] inputs plus the response column.

    The fourth input u never enters the response; it checks that an
    inert variable is reported as independent of the output.
    """
    xyzu = rng_for(seed, "ishigami-uniform").random((n, 4))
    out = ishigami(xyzu[:, 0], xyzu[:, 1], xyzu[:, 2], param)
    return Dataset(ISHIGAMI_COLUMNS, np.column_stack([xyzu, out]), RAW)


def gen_dependent(n: int, seed: int = DEFAULT_SEED,
                  param: IshigamiParam = IshigamiParam()) -> Dataset:
    """Strongly dependent inputs driven by one latent variable.

    x ~ U(-2, 2); y, z, u are x^2, x^3, x^4 plus N(0, 1)/2 noise. All
    four are range-normalized to [0, 1] and the response is evaluated on
    the normalized (x, y, z). u is a pure confounder: correlated with
    every input but absent from the response.
    """
    rng = rng_for(seed, "dependent")
    x = rng.uniform(-2.0, 2.0, n)
    noise = rng.standard_normal((n, 3)) * 0.5
    raw = np.column_stack([x, x**2 + noise[:, 0], x**3 + noise[:, 1],
                           x**4 + noise[:, 2]])
    inputs = range_normalize(Dataset(("x", "y", "z", "u"), raw, RAW))
    out = ishigami(inputs.values[:, 0], inputs.values[:, 1],
                   inputs.values[:, 2], param)
    return Dataset(ISHIGAMI_COLUMNS,
                   np.column_stack([inputs.values, out]), RAW)
