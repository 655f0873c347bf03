"""Dependence quantification via minimum-spanning-tree entropy estimates.

Rank-transform the data, build the (exact or approximate) Euclidean MST
of a variable pair, and read the dependence strength off the tree length:
``h* = log(L / sqrt(N))`` concentrates near a fixed level when the pair
is independent and drops as the dependence tightens. The package covers
the full workflow: dataset handling, exact and fast approximate MSTs,
the independence reference level and test, and pairwise sensitivity
reports, plus a CLI (``mstdep``).
"""

from .approx import (ApproxResult, approx_error, cluster_mst, fmst,
                     harmonic_weight, sampling_mst)
from .clustering import Clustering, kmeans, pca_cluster
from .dataset import (Dataset, PointPair, jitter, load_csv, project_pair,
                      range_normalize, rank_transform)
from .entropy import (DependencyEstimate, ReferenceLevel, alpha_sweep_normal,
                      build_reference, h_hat, h_star, independence_test,
                      renyi_analytic)
from .mst import (SpanningTree, brute_force_mst, gamma_length, mst_kruskal,
                  mst_prim)
from .sensitivity import (DependencyMatrix, SobolIndices, ishigami_sobol,
                          pairwise_matrix, rank_inputs, report)
from .synth import (IshigamiParam, ShapeParam, gen_dependent,
                    gen_ishigami_uniform, gen_normal, gen_shape, gen_uniform,
                    ishigami)

__version__ = "0.1.0"

__all__ = [
    "ApproxResult", "Clustering", "Dataset", "DependencyEstimate",
    "DependencyMatrix", "IshigamiParam", "PointPair", "ReferenceLevel",
    "ShapeParam", "SobolIndices", "SpanningTree", "alpha_sweep_normal",
    "approx_error", "brute_force_mst", "build_reference", "cluster_mst",
    "fmst", "gamma_length", "gen_dependent", "gen_ishigami_uniform",
    "gen_normal", "gen_shape", "gen_uniform", "h_hat", "h_star",
    "harmonic_weight", "independence_test", "ishigami", "ishigami_sobol",
    "jitter", "kmeans", "load_csv", "mst_kruskal", "mst_prim",
    "pairwise_matrix", "pca_cluster", "project_pair", "range_normalize",
    "rank_inputs", "rank_transform", "report", "sampling_mst",
]
