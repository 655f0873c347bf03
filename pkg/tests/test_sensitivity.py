import json
import math

import numpy as np
import pytest

from mstdep.dataset import Dataset, rank_transform
from mstdep.entropy import ReferenceLevel
from mstdep.sensitivity import (DependencyMatrix, format_report_table,
                                ishigami_sobol, pair_order, pairwise_matrix,
                                rank_inputs, report)


class TestIshigamiSobol:
    def test_reference_values(self):
        idx = ishigami_sobol(7.0, 0.1)
        np.testing.assert_allclose(np.round(idx.first_order, 3),
                                   [0.314, 0.442, 0.0, 0.0])
        np.testing.assert_allclose(np.round(idx.total, 3),
                                   [0.558, 0.442, 0.244, 0.0])

    def test_no_interaction_without_b(self):
        idx = ishigami_sobol(7.0, 0.0)
        assert idx.total[2] == 0.0
        assert idx.first_order[0] == pytest.approx(idx.total[0])

    def test_y_never_interacts(self):
        for a, b in [(7, 0.1), (3, 0.2), (1, 0.05)]:
            idx = ishigami_sobol(a, b)
            assert idx.first_order[1] == pytest.approx(idx.total[1], abs=1e-15)

    def test_variance_closure(self):
        # S_x + S_y + S_xz account for all variance; S_xz equals S_Tz here
        idx = ishigami_sobol(7.0, 0.1)
        total = idx.first_order[0] + idx.first_order[1] + idx.total[2]
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_as_dict(self):
        d = ishigami_sobol().as_dict()
        assert set(d) == {"x", "y", "z", "u"}
        assert d["u"] == {"S": 0.0, "ST": 0.0}


class TestPairOrder:
    def test_lexicographic_numbering(self):
        pairs = pair_order(5)
        assert pairs[0] == (0, 1)
        # 1-based sets 4, 7, 9, 10 are the input/output combinations
        assert pairs[3] == (0, 4)
        assert pairs[6] == (1, 4)
        assert pairs[8] == (2, 4)
        assert pairs[9] == (3, 4)
        assert len(pairs) == 10


def ranked_toy(n=400, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.random(n)
    y = x**2 + 0.01 * rng.standard_normal(n)  # strong monotone dependence
    z = rng.random(n)
    ds = Dataset(("x", "y", "z"), np.column_stack([x, y, z]))
    return rank_transform(ds, seed=seed + 1)


class TestPairwiseMatrix:
    def test_single_pair(self):
        ranked = ranked_toy()
        two = Dataset(("a", "b"), ranked.values[:, :2], "rank")
        m = pairwise_matrix(two, method="exact", seed=1)
        assert len(m.pairs()) == 1
        assert np.isfinite(m.means[0, 1])

    def test_detects_structure(self):
        m = pairwise_matrix(ranked_toy(), method="exact", seed=2)
        strong = m.means[0, 1]  # x with its square
        weak = m.means[0, 2]
        assert strong < -1.0
        assert weak > -0.6

    def test_orientation_symmetric(self):
        from mstdep.dataset import project_pair
        from mstdep.entropy import h_star
        ranked = ranked_toy()
        ab = h_star(project_pair(ranked, 0, 2), "exact")
        ba = h_star(project_pair(ranked, 2, 0), "exact")
        assert ab.h_star == ba.h_star

    def test_replicates_spread(self):
        reps = [ranked_toy(seed=s) for s in (10, 20, 30)]
        m = pairwise_matrix(reps, method="exact", seed=3)
        assert m.n_replicates == 3
        for _, i, j, mean, lo, hi in m.pairs():
            assert lo <= mean <= hi

    def test_requires_rank(self):
        rng = np.random.default_rng(4)
        ds = Dataset(("a", "b"), rng.random((50, 2)))
        with pytest.raises(ValueError, match="rank"):
            pairwise_matrix(ds, method="exact")

    def test_mismatched_replicates(self):
        a = ranked_toy(seed=1)
        b = rank_transform(Dataset(("x", "q", "z"),
                                   np.random.default_rng(5).random((400, 3))),
                           seed=2)
        with pytest.raises(ValueError, match="share"):
            pairwise_matrix([a, b], method="exact")

    def test_threaded_equals_sequential(self):
        ranked = ranked_toy(seed=6)
        a = pairwise_matrix(ranked, method="exact", seed=7, threads=1)
        b = pairwise_matrix(ranked, method="exact", seed=7, threads=2)
        np.testing.assert_array_equal(a.means, b.means)

    def test_coupled_generator_workflow(self):
        # polynomially coupled inputs: the response is read best from y,
        # then x; z and u trail. Inputs are mutually more dependent than
        # they are with the response, except for the (y, response) pair.
        from mstdep.synth import gen_dependent
        reps = [rank_transform(gen_dependent(4000, seed=100 + i),
                               seed=200 + i) for i in range(2)]
        m = pairwise_matrix(reps, method="exact", seed=1)
        order = [name for name, _ in rank_inputs(m, 4)]
        assert order[:2] == ["y", "x"]
        assert set(order[2:]) == {"z", "u"}
        for j in (1, 2, 3):  # (x,y), (x,z), (x,u) below (x, response)
            assert m.means[0, j] < m.means[0, 4]
        assert m.means[1, 4] < m.means[0, 1]  # (y, response) is the floor


def toy_matrix(values_by_pair, names=("a", "b", "out")):
    d = len(names)
    means = np.full((d, d), np.nan)
    for (i, j), v in values_by_pair.items():
        means[i, j] = means[j, i] = v
    return DependencyMatrix(names, 100, "exact", 1, means, means.copy(),
                            means.copy())


class TestRankInputs:
    def test_ascending_order(self):
        m = toy_matrix({(0, 1): -0.5, (0, 2): -0.45, (1, 2): -1.2})
        ranking = rank_inputs(m, 2)
        assert [r[0] for r in ranking] == ["b", "a"]

    def test_tie_broken_by_index(self):
        m = toy_matrix({(0, 1): -0.5, (0, 2): -0.7, (1, 2): -0.7})
        ranking = rank_inputs(m, 2)
        assert [r[0] for r in ranking] == ["a", "b"]

    def test_shift_invariance(self):
        base = {(0, 1): -0.5, (0, 2): -0.9, (1, 2): -0.6}
        shifted = {k: v + 0.17 for k, v in base.items()}
        a = [r[0] for r in rank_inputs(toy_matrix(base), 2)]
        b = [r[0] for r in rank_inputs(toy_matrix(shifted), 2)]
        assert a == b

    def test_singleton(self):
        m = toy_matrix({(0, 1): -0.5}, names=("a", "out"))
        assert rank_inputs(m, 1) == [("a", -0.5)]

    def test_invalid_column(self):
        m = toy_matrix({(0, 1): -0.5}, names=("a", "out"))
        with pytest.raises(IndexError):
            rank_inputs(m, 5)


class TestReport:
    def make_ref(self, n=100):
        return ReferenceLevel(np.sort(np.linspace(-0.5, -0.40, 40)), n,
                              "exact", 40, 0)

    def test_json_roundtrip(self):
        m = toy_matrix({(0, 1): -0.5, (0, 2): -0.9, (1, 2): -0.6})
        rep = report(m, rank_inputs(m, 2), self.make_ref(), eta=0.05)
        back = json.loads(json.dumps(rep))
        assert back == rep

    def test_verdicts_against_threshold(self):
        m = toy_matrix({(0, 1): -0.43, (0, 2): -0.9, (1, 2): -0.41})
        rep = report(m, rank_inputs(m, 2), self.make_ref(), eta=0.05)
        verdicts = {p["set"]: p["dependent"] for p in rep["pairs"]}
        thr = rep["pairs"][0]["threshold"]
        assert verdicts[2] is True  # -0.9 well below any threshold here
        assert verdicts[3] is (bool(-0.41 <= thr))

    def test_without_reference(self):
        m = toy_matrix({(0, 1): -0.5, (0, 2): -0.9, (1, 2): -0.6})
        rep = report(m, rank_inputs(m, 2))
        assert all(p["dependent"] is None for p in rep["pairs"])
        assert rep["eta"] is None

    def test_reference_mismatch(self):
        m = toy_matrix({(0, 1): -0.5, (0, 2): -0.9, (1, 2): -0.6})
        with pytest.raises(ValueError, match="N="):
            report(m, rank_inputs(m, 2), self.make_ref(n=999))

    def test_caveat_present(self):
        m = toy_matrix({(0, 1): -0.5, (0, 2): -0.9, (1, 2): -0.6})
        rep = report(m, rank_inputs(m, 2))
        assert "interaction" in rep["caveat"]

    def test_table_rendering(self):
        m = toy_matrix({(0, 1): -0.5, (0, 2): -0.9, (1, 2): -0.6})
        text = format_report_table(report(m, rank_inputs(m, 2)))
        assert "ranking" in text
        assert "a,out" in text
