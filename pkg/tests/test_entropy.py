import json
import math

import numpy as np
import pytest
from scipy import integrate

from mstdep.dataset import Dataset, project_pair, rank_transform
from mstdep.entropy import (DependencyEstimate, ReferenceLevel,
                            alpha_sweep_normal, build_reference, h_hat,
                            h_star, independence_test, load_reference,
                            renyi_analytic, save_reference)
from mstdep.synth import gen_uniform

from conftest import make_pair


def ranked_pair(n, seed):
    return project_pair(rank_transform(gen_uniform(n, 2, seed=seed),
                                       seed=seed + 1), 0, 1)


class TestHStar:
    def test_two_points_closed_form(self):
        pts = make_pair([[0.25, 0.25], [0.75, 0.75]])
        est = h_star(pts, "exact")
        ell = math.sqrt(0.5)
        assert est.h_star == pytest.approx(math.log(ell / math.sqrt(2)))
        assert est.length == pytest.approx(ell)

    def test_monotone_diagonal_closed_form(self):
        n = 1000
        raw = Dataset(("a", "b"),
                      np.column_stack([np.arange(n) * 1.0,
                                       np.arange(n) * 3.0 - 7.0]))
        pts = project_pair(rank_transform(raw, seed=1), 0, 1)
        est = h_star(pts, "exact")
        expect = math.log(math.sqrt(2) * (n - 1) / (n * math.sqrt(n)))
        assert est.h_star == pytest.approx(expect, abs=1e-12)

    def test_requires_rank_flag(self):
        pts = make_pair([[0, 0], [1, 1]], transformed="raw")
        with pytest.raises(ValueError, match="rank"):
            h_star(pts)

    def test_invariant_links_length_and_value(self):
        pts = ranked_pair(300, seed=1)
        for method in ("exact", "fmst", "sampling-random", "cluster-kmeans"):
            est = h_star(pts, method, K=5, seed=7)
            assert est.h_star == pytest.approx(
                math.log(est.length / est.n_points**est.alpha), abs=1e-12)
            assert est.n_points == 300

    def test_gamma_rescales_alpha(self):
        pts = ranked_pair(200, seed=2)
        est = h_star(pts, "exact", gamma=0.5)
        assert est.alpha == 0.75
        with pytest.raises(ValueError):
            h_star(pts, "exact", gamma=2.5)
        with pytest.raises(ValueError, match="gamma=1"):
            h_star(pts, "fmst", gamma=0.5)

    def test_unknown_method(self):
        with pytest.raises(ValueError, match="unknown method"):
            h_star(ranked_pair(50, seed=3), "magic")

    def test_ordering_monotone_in_length(self):
        # lower h* iff shorter tree, N fixed
        a = h_star(ranked_pair(400, seed=4))
        dep = make_pair(np.column_stack([np.linspace(0.001, 0.999, 400)] * 2))
        b = h_star(dep)
        assert b.length < a.length
        assert b.h_star < a.h_star

    def test_invariant_under_monotone_raw_maps(self, rng):
        # composing the raw columns with strictly monotone maps changes
        # nothing once the pipeline rank-transforms them
        raw = rng.random((200, 2))
        warped = np.column_stack([np.exp(3 * raw[:, 0]), raw[:, 1] ** 3])
        a = h_star(project_pair(rank_transform(
            Dataset(("a", "b"), raw), seed=9), 0, 1))
        b = h_star(project_pair(rank_transform(
            Dataset(("a", "b"), warped), seed=9), 0, 1))
        assert a.h_star == b.h_star


class TestHHat:
    def test_beta_one_doubles(self):
        est = DependencyEstimate(-0.4, 100, 0.5, 1.0, "exact", 1.0)
        assert h_hat(est, 1.0) == pytest.approx(-0.8)

    def test_beta_e(self):
        est = DependencyEstimate(0.0, 100, 0.5, 1.0, "exact", 10.0)
        assert h_hat(est, math.e) == pytest.approx(-2.0)

    def test_order_preserved(self):
        e1 = DependencyEstimate(-1.0, 100, 0.5, 1.0, "exact", 1.0)
        e2 = DependencyEstimate(-0.2, 100, 0.5, 1.0, "exact", 2.0)
        assert h_hat(e1, 0.7) < h_hat(e2, 0.7)

    def test_beta_positive(self):
        est = DependencyEstimate(-0.4, 100, 0.5, 1.0, "exact", 1.0)
        with pytest.raises(ValueError):
            h_hat(est, 0.0)


class TestReferenceLevel:
    def test_requires_sorted_and_sized(self):
        with pytest.raises(ValueError, match="20"):
            ReferenceLevel(np.linspace(-1, 0, 10), 100, "exact", 10, 0)
        with pytest.raises(ValueError, match="sorted"):
            ReferenceLevel(np.linspace(0, -1, 25), 100, "exact", 25, 0)

    def test_quantile_order_statistic(self):
        samples = np.arange(1.0, 101.0)
        ref = ReferenceLevel(samples, 50, "exact", 100, 0)
        assert ref.quantile(0.05) == 5.0  # ceil(5) - 1 => index 4
        assert ref.quantile(0.01) == 1.0
        with pytest.raises(ValueError):
            ref.quantile(0.0)
        with pytest.raises(ValueError):
            ref.quantile(0.6)

    def test_build_sorted_finite(self, tmp_path):
        ref = build_reference(60, 25, seed=5, cache_dir=tmp_path)
        assert ref.samples.shape == (25,)
        assert np.all(np.diff(ref.samples) >= 0)
        assert np.all(np.isfinite(ref.samples))

    def test_build_rejects_small_r(self, tmp_path):
        with pytest.raises(ValueError, match="20"):
            build_reference(50, 5, cache_dir=tmp_path)

    def test_cache_roundtrip(self, tmp_path):
        a = build_reference(50, 30, seed=6, cache_dir=tmp_path)
        files = list(tmp_path.glob("ref_*.json"))
        assert len(files) == 1
        b = build_reference(50, 30, seed=6, cache_dir=tmp_path)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_save_load_roundtrip(self, tmp_path):
        ref = build_reference(50, 22, seed=7, cache_dir=tmp_path,
                              use_cache=False)
        path = tmp_path / "out.json"
        save_reference(ref, path)
        back = load_reference(path)
        np.testing.assert_array_equal(back.samples, ref.samples)
        assert (back.n_points, back.method, back.r) == (50, "exact", 22)

    def test_load_rejects_other_versions(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"format_version": 99}), encoding="utf-8")
        with pytest.raises(ValueError, match="version"):
            load_reference(p)

    def test_spread_shrinks_with_n(self, tmp_path):
        stds = []
        for n in (10, 100, 1000):
            ref = build_reference(n, 200, seed=8, cache_dir=tmp_path,
                                  use_cache=False)
            stds.append(ref.samples.std())
        assert stds[2] < stds[1] < stds[0]

    def test_threaded_build_matches_sequential(self, tmp_path):
        a = build_reference(40, 24, seed=9, cache_dir=tmp_path, use_cache=False)
        b = build_reference(40, 24, seed=9, cache_dir=tmp_path, use_cache=False,
                            threads=2)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_concentration_at_thousand_points(self, tmp_path):
        ref = build_reference(1000, 400, seed=12, cache_dir=tmp_path,
                              use_cache=False)
        q75, q25 = np.percentile(ref.samples, [75, 25])
        assert q75 - q25 < 0.02


class TestIndependenceTest:
    def make_ref(self, n=100):
        samples = np.sort(np.linspace(-0.5, -0.3, 40))
        return ReferenceLevel(samples, n, "exact", 40, 0)

    def test_boundary_inclusive(self):
        ref = self.make_ref()
        thr = ref.quantile(0.05)
        est = DependencyEstimate(thr, 100, 0.5, 1.0, "exact", 1.0)
        result = independence_test(est, ref, 0.05)
        assert result.reject
        assert result.threshold == thr

    def test_above_threshold_no_reject(self):
        ref = self.make_ref()
        est = DependencyEstimate(-0.2, 100, 0.5, 1.0, "exact", 1.0)
        assert not independence_test(est, ref, 0.05).reject

    def test_strong_dependence_rejected(self, tmp_path):
        n = 1000
        ref = build_reference(n, 50, seed=10, cache_dir=tmp_path,
                              use_cache=False)
        raw = Dataset(("a", "b"), np.column_stack([np.arange(n) * 1.0,
                                                   np.arange(n) * 1.0]))
        est = h_star(project_pair(rank_transform(raw, seed=1), 0, 1))
        assert independence_test(est, ref, 0.05).reject

    def test_n_mismatch_rejected(self):
        ref = self.make_ref(n=100)
        est = DependencyEstimate(-0.4, 99, 0.5, 1.0, "exact", 1.0)
        with pytest.raises(ValueError, match="N=100"):
            independence_test(est, ref)

    def test_method_mismatch_rejected(self):
        ref = self.make_ref()
        est = DependencyEstimate(-0.4, 100, 0.5, 1.0, "fmst", 1.0)
        with pytest.raises(ValueError, match="method"):
            independence_test(est, ref)

    def test_false_positive_rate_tracks_eta(self, tmp_path):
        n, trials = 200, 200
        ref = build_reference(n, 2000, seed=11, cache_dir=tmp_path,
                              use_cache=False)
        at_05 = at_01 = 0
        for t in range(trials):
            est = h_star(ranked_pair(n, seed=5000 + 3 * t))
            at_05 += independence_test(est, ref, 0.05).reject
            at_01 += independence_test(est, ref, 0.01).reject
        assert 0.01 <= at_05 / trials <= 0.10
        # the stricter quantile flags independent data only rarely
        assert at_01 / trials <= 0.05


LOG_8PI = math.log(8 * math.pi)


class TestRenyiAnalytic:
    def test_uniform_zero(self):
        assert renyi_analytic("uniform", 0.5) == 0.0

    def test_normal_rho_zero_reference_value(self):
        got = renyi_analytic("normal", 0.5, rho=0.0)
        assert got == pytest.approx(2 * math.log(2 * math.sqrt(2 * math.pi)),
                                    abs=1e-12)
        assert got == pytest.approx(LOG_8PI, abs=1e-12)

    def test_shape_alpha_independent(self):
        for alpha in (0.2, 0.5, 0.8):
            assert renyi_analytic("shape", alpha, A=0.5) == pytest.approx(
                math.log(0.5), abs=1e-12)
        assert renyi_analytic("shape", 0.5, A=0.0) == 0.0

    def test_normal_quadrature_oracle(self):
        # independent numerical evaluation of the density-power integral
        rho, alpha = 0.3, 0.4
        det = 1 - rho * rho

        def p_alpha(y, x):
            q = (x * x - 2 * rho * x * y + y * y) / det
            dens = math.exp(-0.5 * q) / (2 * math.pi * math.sqrt(det))
            return dens**alpha

        integral, _ = integrate.dblquad(p_alpha, -12, 12, -12, 12,
                                        epsabs=1e-10)
        expected = math.log(integral) / (1 - alpha)
        assert renyi_analytic("normal", alpha, rho=rho) == pytest.approx(
            expected, abs=1e-6)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            renyi_analytic("uniform", 1.5)
        with pytest.raises(ValueError):
            renyi_analytic("normal", 0.5, rho=1.0)
        with pytest.raises(ValueError):
            renyi_analytic("shape", 0.5, A=1.0)
        with pytest.raises(ValueError):
            renyi_analytic("cauchy", 0.5)


class TestAlphaSweep:
    def test_shift_is_alpha_independent(self):
        rhos = [0.0, 0.1, 0.3, 0.5, 0.7]
        alphas = [0.1, 0.3, 0.5, 0.7, 0.9]
        table = alpha_sweep_normal(rhos, alphas)
        shifts = table - table[0]
        for i, rho in enumerate(rhos):
            expected = 0.5 * math.log(1 - rho * rho)
            np.testing.assert_allclose(shifts[i], expected, atol=1e-12)

    def test_small_rho_near_flat(self):
        table = alpha_sweep_normal([0.0, 0.1], [0.5])
        assert table[1, 0] - table[0, 0] == pytest.approx(-0.0050251679,
                                                          abs=1e-9)

    def test_monotone_decreasing_in_abs_rho(self):
        table = alpha_sweep_normal([0.0, 0.2, 0.4, 0.6, 0.8, 0.95], [0.5])
        assert np.all(np.diff(table[:, 0]) < 0)
