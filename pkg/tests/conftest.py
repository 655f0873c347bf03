import numpy as np
import pytest

from mstdep.dataset import PointPair


def make_pair(arr, transformed="rank") -> PointPair:
    """PointPair from a bare (N, 2) array, for tests that skip datasets."""
    return PointPair(np.asarray(arr, dtype=float), 0, 1, transformed, ("a", "b"))


def assert_valid_tree(tree, xy):
    """Structural spanning-tree checks plus weight consistency."""
    n = xy.shape[0]
    assert tree.n_points == n
    assert tree.edges.shape == (n - 1, 2)
    # weights are the Euclidean distances of their endpoints
    diff = xy[tree.edges[:, 0]] - xy[tree.edges[:, 1]]
    np.testing.assert_allclose(tree.weights, np.sqrt((diff**2).sum(axis=1)),
                               rtol=0, atol=1e-12)
    # connected and acyclic via union-find
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in tree.edges:
        ri, rj = find(int(i)), find(int(j))
        assert ri != rj, "tree contains a cycle"
        parent[ri] = rj
    assert len({find(v) for v in range(n)}) == 1, "tree is not connected"


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
