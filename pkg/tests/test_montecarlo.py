"""Monte Carlo engine tests: agreement with the closed forms, determinism
across worker counts, confidence-interval behaviour, and the empirical
statistics collectors."""

import math

import numpy as np
import pytest

from typcell.analytic import (
    ModelParams,
    cdf_ro_2d,
    coverage_type1_app1_2d,
    coverage_type1_2d,
    coverage_type2,
)
from typcell.montecarlo import (
    CoverageCurve,
    EmpiricalDistribution,
    ExperimentConfig,
    InsufficientSamplesError,
    collect_area_samples,
    collect_distance_samples,
    collect_power_samples,
    db_to_linear,
    estimate_pcf,
    linear_to_db,
    resolve_workers,
    run_sir_experiment,
    run_surrogate_experiment,
    wilson_interval,
)

PIN_TYPE2_D2_A4_T1 = 0.56009915351155738


def _cfg(**kw):
    base = dict(dimension=2, density=1.0, alpha=4.0, user_process="type1",
                realizations=20_000, master_seed=7)
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            _cfg(dimension=3)
        with pytest.raises(ValueError):
            _cfg(user_process="type3")
        with pytest.raises(ValueError):
            _cfg(method="app1", dimension=1)
        with pytest.raises(ValueError):
            _cfg(method="app2", user_process="type2")
        with pytest.raises(ValueError):
            _cfg(alpha=1.5)
        with pytest.raises(ValueError):
            _cfg(realizations=0)

    def test_window_defaulting_and_minimum_count(self):
        cfg = _cfg(density=2.0)
        assert cfg.window.radius == pytest.approx(20.0 / math.sqrt(2.0 * math.pi))
        from typcell.pointprocess import SimWindow
        with pytest.raises(ValueError):
            _cfg(window=SimWindow(2, 1.0))


class TestHelpers:
    def test_db_round_trip(self):
        assert db_to_linear(0.0) == 1.0
        assert db_to_linear(10.0) == pytest.approx(10.0)
        assert linear_to_db(db_to_linear(7.3)) == pytest.approx(7.3)

    def test_wilson_interval(self):
        lo, hi = wilson_interval(50, 100)
        assert lo < 0.5 < hi
        lo0, hi0 = wilson_interval(0, 100)
        assert lo0 == pytest.approx(0.0, abs=1e-12) and hi0 > 0.0
        lo1, hi1 = wilson_interval(100, 100)
        assert hi1 == pytest.approx(1.0, abs=1e-12) and lo1 < 1.0

    def test_resolve_workers_env(self, monkeypatch):
        monkeypatch.setenv("TYPCELL_THREADS", "3")
        assert resolve_workers() == 3
        assert resolve_workers(8) == 3  # env caps explicit requests
        monkeypatch.delenv("TYPCELL_THREADS")
        assert resolve_workers(2) == 2


class TestEmpiricalDistribution:
    def test_cdf_step(self):
        ed = EmpiricalDistribution.from_samples([3.0, 1.0, 2.0])
        assert list(ed.samples) == [1.0, 2.0, 3.0]
        assert ed.cdf(0.5) == 0.0
        assert ed.cdf(1.0) == pytest.approx(1 / 3)  # right-continuous
        assert ed.cdf(2.5) == pytest.approx(2 / 3)
        assert ed.cdf(3.0) == 1.0

    def test_ks_against_own_population(self):
        rng = np.random.default_rng(5)
        ed = EmpiricalDistribution.from_samples(rng.random(10_000))
        ks = ed.ks_statistic(lambda x: np.clip(x, 0.0, 1.0))
        assert ks < ed.ks_band()
        assert ed.ks_band() == pytest.approx(1.3581 / 100.0)


class TestCoverageExperiments:
    def test_type2_matches_closed_form(self):
        curve = run_sir_experiment(_cfg(user_process="type2",
                                        realizations=100_000), [0.0])
        sigma = math.sqrt(PIN_TYPE2_D2_A4_T1 * (1 - PIN_TYPE2_D2_A4_T1) / curve.n)
        # small positive window-truncation bias (~9e-4) documented; allow for it
        assert abs(curve.estimate[0] - PIN_TYPE2_D2_A4_T1) < 3 * sigma + 1.5e-3

    def test_curve_exactly_monotone_and_ci_ordered(self):
        tau_db = np.arange(-10.0, 21.0, 1.0)
        curve = run_sir_experiment(_cfg(realizations=20_000), tau_db)
        assert np.all(np.diff(curve.estimate) <= 0.0)
        assert np.all(curve.ci_low <= curve.estimate)
        assert np.all(curve.estimate <= curve.ci_high)

    def test_density_invariance_within_noise(self):
        est = {}
        for lam in (1.0, 4.0):
            curve = run_sir_experiment(_cfg(density=lam, realizations=50_000,
                                            master_seed=11), [0.0])
            est[lam] = (float(curve.estimate[0]), curve.n)
        (a, na), (b, nb) = est[1.0], est[4.0]
        sigma = math.sqrt(a * (1 - a) / na + b * (1 - b) / nb)
        assert abs(a - b) < 3 * sigma

    def test_deterministic_across_worker_counts(self):
        tau_db = [-3.0, 0.0, 3.0]
        cfg = _cfg(realizations=10_000)
        one = run_sir_experiment(cfg, tau_db, workers=1)
        two = run_sir_experiment(cfg, tau_db, workers=2)
        assert np.array_equal(one.estimate, two.estimate)
        assert one.n == two.n

    def test_raw_sir_store(self):
        curve, sir = run_sir_experiment(_cfg(realizations=5_000), [0.0],
                                        return_sir=True)
        assert sir.size == curve.n
        assert float((sir > 1.0).mean()) == pytest.approx(curve.estimate[0])

    def test_wilson_ci_covers_analytic_value(self):
        # CI calibration: the 95% interval should contain the exact value in
        # at least 93 of 100 independent replications at n = 10^4
        target = PIN_TYPE2_D2_A4_T1
        hits = 0
        for seed in range(100):
            curve = run_sir_experiment(
                _cfg(user_process="type2", realizations=10_000,
                     master_seed=seed), [0.0])
            if curve.ci_low[0] <= target <= curve.ci_high[0]:
                hits += 1
        assert hits >= 93

    def test_surrogates_match_their_closed_forms(self):
        params = ModelParams(alpha=4.0, density=1.0)
        for method, closed in (("app1", coverage_type1_app1_2d),
                               ("app2", coverage_type1_2d)):
            curve = run_surrogate_experiment(
                _cfg(method=method, realizations=100_000, master_seed=3), [0.0])
            target = closed(1.0, params)
            sigma = math.sqrt(target * (1 - target) / curve.n)
            assert abs(curve.estimate[0] - target) < 3 * sigma + 1.5e-3

    def test_full_geometry_below_app1(self):
        # the plain-annulus field underestimates interference, so its
        # coverage bounds the full geometry from above
        tau_db = [-5.0, 0.0, 5.0]
        full = run_sir_experiment(_cfg(realizations=50_000, master_seed=21), tau_db)
        app1 = run_surrogate_experiment(_cfg(method="app1", realizations=50_000,
                                             master_seed=22), tau_db)
        slack = 3.0 * np.sqrt(full.estimate * (1 - full.estimate) / full.n
                              + app1.estimate * (1 - app1.estimate) / app1.n)
        assert np.all(full.estimate <= app1.estimate + slack)

    def test_method_dispatch_guards(self):
        with pytest.raises(ValueError):
            run_sir_experiment(_cfg(method="app1"), [0.0])
        with pytest.raises(ValueError):
            run_surrogate_experiment(_cfg(), [0.0])


class TestDistanceSamples:
    def test_type1_dominant_never_closer(self):
        for dim in (1, 2):
            r0, r1 = collect_distance_samples(
                _cfg(dimension=dim, realizations=20_000, master_seed=13))
            assert r0.count == r1.count
            # compare via the joint per-realization arrays: re-collect keeps
            # pairing, so check the quantile-wise ordering instead
            assert np.all(np.sort(r1.samples) >= np.sort(r0.samples) - 1e-12)

    def test_type2_contact_distribution(self):
        cfg = _cfg(user_process="type2", realizations=100_000, master_seed=17)
        r0, _ = collect_distance_samples(cfg)
        ks = r0.ks_statistic(lambda r: 1.0 - np.exp(-math.pi * r**2))
        assert ks < 0.01

    def test_mean_squared_link_distance(self):
        # regression against the triple-checked true value 0.2607/lam; the
        # closed-form approximation's 1/(pi rho0 lam) = 0.2476 sits ~5% below
        # it, which is the approximation gap the distance-law acceptance
        # criterion measures
        r0, _ = collect_distance_samples(_cfg(realizations=100_000,
                                              master_seed=19))
        mean_sq = float(np.mean(r0.samples**2))
        assert mean_sq == pytest.approx(0.2607, rel=0.02)

    def test_mis_set_correction_factor_is_detectable(self):
        # a build with rho0 forced to 1 must fail the distance-law check
        r0, _ = collect_distance_samples(_cfg(realizations=50_000,
                                              master_seed=23))
        wrong = ModelParams(alpha=4.0, density=1.0, rho0=1.0)
        assert r0.ks_statistic(lambda x: cdf_ro_2d(x, wrong)) > 0.05


class TestPowerSamples:
    def test_doubling_tx_power_shifts_by_3db(self):
        base = _cfg(density=1e-5, realizations=5_000, master_seed=29)
        s1, i1 = collect_power_samples(base)
        from dataclasses import replace
        s2, i2 = collect_power_samples(replace(base, tx_power_dbm=33.0103))
        np.testing.assert_allclose(s2.samples - s1.samples, 3.0103, atol=1e-9)
        np.testing.assert_allclose(i2.samples - i1.samples, 3.0103, atol=1e-9)

    def test_in_cell_signal_dominates_independent_user(self):
        from dataclasses import replace
        base = _cfg(density=1e-5, realizations=20_000, master_seed=31)
        s1, _ = collect_power_samples(base)
        s2, _ = collect_power_samples(replace(base, user_process="type2"))
        for q in np.arange(0.1, 0.91, 0.1):
            assert s1.quantile(q) >= s2.quantile(q)


class TestAreas:
    def test_2d_means(self):
        typical, crofton = collect_area_samples(_cfg(realizations=50_000,
                                                     master_seed=37))
        assert np.mean(typical.samples) == pytest.approx(1.0, rel=0.02)
        ratio = np.mean(crofton.samples) / np.mean(typical.samples)
        assert ratio == pytest.approx(9.0 / 7.0, rel=0.03)

    def test_1d_means(self):
        typical, crofton = collect_area_samples(
            _cfg(dimension=1, realizations=20_000, master_seed=41))
        assert np.mean(typical.samples) == pytest.approx(1.0, rel=0.03)
        assert np.mean(crofton.samples) == pytest.approx(1.5, rel=0.03)


class TestPcf:
    def test_shape_and_normalization(self):
        cfg = _cfg(realizations=30_000, master_seed=43)
        est = estimate_pcf(cfg, ro_center=0.3)
        lower = est.ro_center - est.ro_halfwidth
        assert np.all(est.g[est.r_edges[1:] <= lower] == 0.0)
        centers = est.r_centers
        peak = est.g[(centers > 0.3) & (centers < 0.6)].max()
        assert peak > 1.0
        far = est.g[(centers > 3.0) & (centers < 4.0)]
        assert np.all(np.abs(far - 1.0) < 0.1)
        assert est.conditioning_count >= 1000

    def test_insufficient_conditioning_raises(self):
        with pytest.raises(InsufficientSamplesError):
            estimate_pcf(_cfg(realizations=2_000, master_seed=47), ro_center=0.3)

    def test_requires_2d_type1(self):
        with pytest.raises(ValueError):
            estimate_pcf(_cfg(dimension=1), ro_center=0.3)
        with pytest.raises(ValueError):
            estimate_pcf(_cfg(user_process="type2"), ro_center=0.3)
