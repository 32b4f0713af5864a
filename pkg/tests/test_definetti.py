"""Exchangeable simulation, LLN statistics, and the identity checker."""

import numpy as np
import pytest
from scipy.stats import wasserstein_distance

from schoenberg_lab import (
    EmpiricalMeasure,
    ExchangeableSample,
    InconsistentInputsError,
    catalog_profile,
    dirac,
    estimate_mixing,
    exponential_measure,
    key_identity_mc,
    lln_statistic,
    sample_exchangeable,
    wasserstein1,
)


class TestSampleExchangeable:
    def test_zero_scale_degenerate(self):
        s = sample_exchangeable(dirac(0.0), n=5, seed=1)
        np.testing.assert_array_equal(s.values, np.zeros(5))
        assert s.latent_scale == 0.0

    def test_conditional_chi_square_concentration(self):
        s = sample_exchangeable(dirac(4.0), n=10_000, seed=2)
        assert s.latent_scale == 4.0
        stat = lln_statistic(s)
        # (1/n) sum Y_i^2 = 4 chi^2_n / n; sd = 4 sqrt(2/n)
        assert abs(stat - 4.0) <= 3.0 * 4.0 * np.sqrt(2.0 / 10_000)

    def test_latent_scale_comes_from_measure(self):
        m = exponential_measure()
        seen = {sample_exchangeable(m, n=2, seed=s).latent_scale for s in range(30)}
        assert seen <= set(m.scales.tolist())
        assert len(seen) > 5


class TestLlnStatistic:
    def test_constant_sequence(self):
        assert lln_statistic(ExchangeableSample(np.full(7, 3.0))) == pytest.approx(9.0)

    def test_small_example(self):
        assert lln_statistic(ExchangeableSample(np.array([3.0, 4.0]))) == pytest.approx(12.5)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(5)
        values = rng.standard_normal(40)
        base = lln_statistic(ExchangeableSample(values))
        for _ in range(10):
            perm = rng.permutation(40)
            assert lln_statistic(ExchangeableSample(values[perm])) == pytest.approx(base)

    def test_concentration_over_seeds(self):
        # conditional chi-square oracle: |L - S| <= 3 S sqrt(2/n) for >=99%
        # of seeds (the tail probability at 3 sigma is ~0.3%)
        n = 10_000
        hits = 0
        total = 200
        for seed in range(total):
            s = sample_exchangeable(exponential_measure(), n=n, seed=seed)
            if abs(lln_statistic(s) - s.latent_scale) <= 3.0 * s.latent_scale * np.sqrt(2.0 / n):
                hits += 1
        assert hits / total >= 0.99


class TestEstimateMixing:
    def test_unit_dirac_concentrates(self):
        emp = estimate_mixing(dirac(1.0), n=1000, reps=10_000, seed=3)
        inside = np.mean((emp.values >= 0.8) & (emp.values <= 1.2))
        assert inside >= 0.99

    def test_zero_dirac_exact(self):
        emp = estimate_mixing(dirac(0.0), n=100, reps=200, seed=4)
        np.testing.assert_array_equal(emp.values, np.zeros(200))

    def test_exp_recovery_w1(self):
        m = exponential_measure()
        emp = estimate_mixing(m, n=1000, reps=10_000, seed=5)
        # scipy oracle on the same data, then the package metric
        oracle = wasserstein_distance(emp.values, m.scales, v_weights=m.weights)
        ours = wasserstein1(emp, m)
        assert ours == pytest.approx(oracle, rel=1e-9)
        assert ours <= 0.05

    def test_variance_scales_inversely_with_n(self):
        reps = 1000
        var = {}
        for n in (100, 1000):
            emp = estimate_mixing(dirac(1.0), n=n, reps=reps, seed=6)
            var[n] = emp.values.var(ddof=1)
        assert var[1000] < var[100] / 8.0

    def test_deterministic(self):
        a = estimate_mixing(exponential_measure(), n=50, reps=500, seed=7)
        b = estimate_mixing(exponential_measure(), n=50, reps=500, seed=7)
        np.testing.assert_array_equal(a.values, b.values)


class TestEmpiricalMeasure:
    def test_cdf_and_support(self):
        emp = EmpiricalMeasure(np.array([3.0, 1.0, 2.0]))
        np.testing.assert_array_equal(emp.support, [1.0, 2.0, 3.0])
        assert emp.cdf(2.0) == pytest.approx(2.0 / 3.0)
        assert emp.cdf(0.5) == 0.0

    def test_csv_export(self, tmp_path):
        emp = EmpiricalMeasure(np.array([0.25, 1.5]))
        path = tmp_path / "l.csv"
        emp.to_csv(path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "L"
        assert [float(v) for v in lines[1:]] == [0.25, 1.5]

    def test_equal_mass_binning(self):
        rng = np.random.default_rng(8)
        emp = EmpiricalMeasure(rng.chisquare(5, size=6400) / 5)
        m = emp.to_measure(bins=64)
        assert len(m.scales) == 64
        assert m.weights.sum() == pytest.approx(1.0)
        np.testing.assert_allclose(m.weights, 1.0 / 64, atol=1e-12)
        # binned measure preserves the mean
        assert m.mean() == pytest.approx(emp.values.mean(), rel=1e-9)

    def test_rejects_negative_values(self):
        with pytest.raises(ValueError):
            EmpiricalMeasure(np.array([-0.1, 1.0]))


class TestKeyIdentity:
    def test_unit_dirac_matches_chi_square_mgf(self):
        # exact oracle: E exp(-(t^2/2n) chi^2_n) = (1 + t^2/n)^(-n/2)
        t, n, reps = 1.0, 1000, 100_000
        res = key_identity_mc(catalog_profile("gaussian"), dirac(1.0), t,
                              n=n, reps=reps, seed=9)
        exact = (1.0 + t**2 / n) ** (-n / 2.0)
        assert exact == pytest.approx(0.60678, abs=1e-4)
        assert res.gap <= 3.0 * res.combined_se
        assert abs(res.lhs - exact) <= 5.0 * res.lhs_se
        assert abs(res.rhs - exact) <= 5.0 * res.rhs_se
        assert res.f_of_t == pytest.approx(np.exp(-0.5))

    def test_tiny_t_degenerates_to_one(self):
        res = key_identity_mc(catalog_profile("gaussian"), dirac(1.0), t=1e-6,
                              n=100, reps=1000, seed=10)
        assert res.lhs == pytest.approx(1.0, abs=1e-6)
        assert res.rhs == pytest.approx(1.0, abs=1e-6)

    def test_exp_mixture_two_sided(self):
        res = key_identity_mc(catalog_profile("exp-mixture"), exponential_measure(),
                              t=1.0, n=1000, reps=30_000, seed=11)
        assert res.gap <= 3.0 * res.combined_se

    @pytest.mark.parametrize("pid,measure_factory", [
        ("gaussian", lambda: dirac(1.0)),
        ("exp-mixture", exponential_measure),
    ])
    def test_limit_improves_with_n(self, pid, measure_factory):
        f = catalog_profile(pid)
        measure = measure_factory()
        for t in (0.5, 1.0, 2.0):
            coarse = key_identity_mc(f, measure, t, n=10, reps=100_000, seed=12)
            fine = key_identity_mc(f, measure, t, n=1000, reps=100_000, seed=12)
            assert abs(fine.lhs - fine.f_of_t) < abs(coarse.lhs - coarse.f_of_t)

    def test_mismatched_inputs_rejected(self):
        with pytest.raises(InconsistentInputsError):
            key_identity_mc(catalog_profile("gaussian"), exponential_measure(),
                            t=1.0, n=10, reps=100, seed=13)

    def test_matched_catalog_pairs_accepted(self):
        # the levy measure reproduces the cauchy profile only up to its
        # truncated tail (~1.6e-2 worst case on the check grid)
        from schoenberg_lab import levy_measure

        key_identity_mc(catalog_profile("cauchy"), levy_measure(),
                        t=1.0, n=10, reps=100, seed=14)

    def test_deterministic(self):
        a = key_identity_mc(catalog_profile("gaussian"), dirac(1.0), 1.0,
                            n=100, reps=2000, seed=15)
        b = key_identity_mc(catalog_profile("gaussian"), dirac(1.0), 1.0,
                            n=100, reps=2000, seed=15)
        assert (a.lhs, a.rhs, a.lhs_se, a.rhs_se) == (b.lhs, b.rhs, b.lhs_se, b.rhs_se)
