"""Acceptance suite: every advertised numeric contract, measured end to end.

Each criterion runs at the profile's sample counts and tolerances and
reports one pass/fail line with the measured values.  The full profile uses
the contract sample sizes; the quick profile shrinks the Monte Carlo runs
100x and widens the purely statistical tolerances by the matching sqrt(100)
noise factor, so it finishes in well under five minutes.
"""

from __future__ import annotations

import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .analytic import (
    ModelParams,
    cdf_r1_2d,
    cdf_ro_2d,
    coverage_type1_1d,
    coverage_type1_2d,
    coverage_type1_app1_2d,
    coverage_type2,
)
from .montecarlo import (
    ExperimentConfig,
    collect_area_samples,
    collect_distance_samples,
    collect_power_samples,
    estimate_pcf,
    run_sir_experiment,
    run_surrogate_experiment,
)

__all__ = ["AcceptanceProfile", "CriterionResult", "FULL_PROFILE",
           "QUICK_PROFILE", "CRITERIA", "run_criterion", "run_acceptance"]

_PIN_TYPE2 = 0.56009915351155738  # 1/(1 + pi/4)
_Z99 = 2.5758293035489004
_RHO0 = 9.0 / 7.0
_TAU_GRID_DB = np.arange(-10.0, 21.0, 1.0)


@dataclass(frozen=True)
class AcceptanceProfile:
    name: str
    n_big: int          # contract size 1e6 runs
    n_mid: int          # contract size 1e5 runs
    n_pcf: int          # must leave >= 1000 conditioning realizations
    tol_type2_mc: float
    tol_app2: float
    tol_full2d: float
    ks_r0_max: float
    ks_r1_max: float
    area_ratio_rtol: float
    pcf_far_tol: float


FULL_PROFILE = AcceptanceProfile(
    name="full", n_big=1_000_000, n_mid=100_000, n_pcf=100_000,
    tol_type2_mc=0.002, tol_app2=0.005, tol_full2d=0.02,
    ks_r0_max=0.01, ks_r1_max=0.02, area_ratio_rtol=0.03, pcf_far_tol=0.05)

# Monte Carlo noise grows by sqrt(100) = 10 at 100x fewer realizations; the
# purely statistical tolerances scale with it.
QUICK_PROFILE = AcceptanceProfile(
    name="quick", n_big=10_000, n_mid=10_000, n_pcf=20_000,
    tol_type2_mc=0.02, tol_app2=0.05, tol_full2d=0.05,
    ks_r0_max=0.032, ks_r1_max=0.063, area_ratio_rtol=0.05, pcf_far_tol=0.10)


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: str
    elapsed_s: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"criterion {self.number:02d} {status}  {self.name}: "
                f"{self.details}  [{self.elapsed_s:.1f}s]")


def _criterion_1_type2_closed_form(profile: AcceptanceProfile) -> tuple[bool, str]:
    started = time.perf_counter()
    formula = coverage_type2(1.0, ModelParams(alpha=4.0), 2)
    dev_formula = abs(formula - _PIN_TYPE2)
    cfg = ExperimentConfig(dimension=2, density=1.0, alpha=4.0,
                           user_process="type2", realizations=profile.n_big,
                           master_seed=1)
    curve = run_sir_experiment(cfg, [0.0])
    dev_mc = abs(float(curve.estimate[0]) - _PIN_TYPE2)
    elapsed = time.perf_counter() - started
    ok = dev_formula <= 1e-9 and dev_mc <= profile.tol_type2_mc and elapsed < 60.0
    return ok, (f"|formula-pin|={dev_formula:.1e} (<=1e-9), "
                f"|mc-pin|={dev_mc:.4f} (<={profile.tol_type2_mc}), "
                f"runtime {elapsed:.0f}s (<60s)")


def _criterion_2_exact_1d(profile: AcceptanceProfile) -> tuple[bool, str]:
    tau_db = np.array([-5.0, 0.0, 5.0, 10.0])
    worst = 0.0
    ok = True
    notes = []
    for alpha in (3.0, 4.0):
        params = ModelParams(alpha=alpha, density=1.0)
        quad = np.array([coverage_type1_1d(10.0 ** (db / 10.0), params)
                         for db in tau_db])
        cfg = ExperimentConfig(dimension=1, density=1.0, alpha=alpha,
                               user_process="type1", realizations=profile.n_big,
                               master_seed=314159)
        curve = run_sir_experiment(cfg, tau_db)
        half99 = _Z99 * np.sqrt(curve.estimate * (1.0 - curve.estimate) / curve.n)
        dev = np.abs(curve.estimate - quad)
        ratio = float(np.max(dev / half99))
        worst = max(worst, ratio)
        if np.any(dev > half99):
            ok = False
            bad = int(np.argmax(dev / half99))
            notes.append(f"alpha={alpha} tau={tau_db[bad]:+.0f}dB "
                         f"dev={dev[bad]:.5f}>ci99={half99[bad]:.5f}")
    detail = f"max |mc-quad|/ci99 = {worst:.2f} over 8 points (<=1)"
    if notes:
        detail += "; " + "; ".join(notes)
    return ok, detail


def _criterion_3_app2_self_consistency(profile: AcceptanceProfile) -> tuple[bool, str]:
    params = ModelParams(alpha=4.0, density=1.0)
    analytic = np.array([coverage_type1_2d(10.0 ** (db / 10.0), params)
                         for db in _TAU_GRID_DB])
    cfg = ExperimentConfig(dimension=2, density=1.0, alpha=4.0,
                           user_process="type1", method="app2",
                           realizations=profile.n_big, master_seed=777)
    curve = run_surrogate_experiment(cfg, _TAU_GRID_DB)
    gap = np.abs(curve.estimate - analytic)
    worst = float(gap.max())
    at = float(_TAU_GRID_DB[int(gap.argmax())])
    ok = worst <= profile.tol_app2
    return ok, (f"max |app2_mc - formula| = {worst:.4f} at {at:+.0f} dB "
                f"(<= {profile.tol_app2})")


def _criterion_4_accuracy_vs_truth(profile: AcceptanceProfile) -> tuple[bool, str]:
    params = ModelParams(alpha=4.0, density=1.0)
    analytic = np.array([coverage_type1_2d(10.0 ** (db / 10.0), params)
                         for db in _TAU_GRID_DB])
    cfg = ExperimentConfig(dimension=2, density=1.0, alpha=4.0,
                           user_process="type1", realizations=profile.n_big,
                           master_seed=20240801)
    curve = run_sir_experiment(cfg, _TAU_GRID_DB)
    gap = curve.estimate - analytic
    worst = float(np.max(np.abs(gap)))
    at = float(_TAU_GRID_DB[int(np.abs(gap).argmax())])
    ok = worst <= profile.tol_full2d
    detail = (f"max |full_mc - formula| = {worst:.4f} at {at:+.0f} dB "
              f"(<= {profile.tol_full2d})")
    if not ok:
        over = [f"{db:+.0f}dB:{g:+.4f}" for db, g in zip(_TAU_GRID_DB, gap)
                if abs(g) > profile.tol_full2d]
        detail += "; per-tau gaps beyond tolerance: " + ", ".join(over)
    return ok, detail


def _criterion_5_link_distances(profile: AcceptanceProfile) -> tuple[bool, str]:
    params = ModelParams(alpha=4.0, density=1.0)
    cfg = ExperimentConfig(dimension=2, density=1.0, alpha=4.0,
                           user_process="type1", realizations=profile.n_mid,
                           master_seed=99)
    r0, r1 = collect_distance_samples(cfg)
    ks0 = r0.ks_statistic(lambda x: cdf_ro_2d(x, params))
    ks1 = r1.ks_statistic(lambda x: cdf_r1_2d(x, params))
    ok = ks0 <= profile.ks_r0_max and ks1 <= profile.ks_r1_max
    return ok, (f"KS(R0)={ks0:.4f} (<= {profile.ks_r0_max}), "
                f"KS(R1)={ks1:.4f} (<= {profile.ks_r1_max}) "
                f"at {r0.count} samples")


def _criterion_6_area_ratio(profile: AcceptanceProfile) -> tuple[bool, str]:
    cfg = ExperimentConfig(dimension=2, density=1.0, alpha=4.0,
                           user_process="type1", realizations=profile.n_mid,
                           master_seed=4242)
    typical, crofton = collect_area_samples(cfg)
    ratio = float(np.mean(crofton.samples) / np.mean(typical.samples))
    ok = abs(ratio - _RHO0) <= profile.area_ratio_rtol * _RHO0
    return ok, (f"mean area ratio = {ratio:.4f} vs 9/7 = {_RHO0:.4f} "
                f"(within {profile.area_ratio_rtol:.0%})")


def _criterion_7_clustering(profile: AcceptanceProfile) -> tuple[bool, str]:
    cfg = ExperimentConfig(dimension=2, density=1.0, alpha=4.0,
                           user_process="type1", realizations=profile.n_pcf,
                           master_seed=31415)
    est = estimate_pcf(cfg, ro_center=0.3)
    centers = est.r_centers
    lower_edge = est.ro_center - est.ro_halfwidth
    below = est.g[est.r_edges[1:] <= lower_edge]
    zero_ok = bool(np.all(below == 0.0))
    peak_sel = (centers > 0.3) & (centers < 0.6)
    peak = float(est.g[peak_sel].max())
    peak_ok = peak > 1.05
    far_sel = (centers > 3.0) & (centers < 4.0)
    far_dev = float(np.max(np.abs(est.g[far_sel] - 1.0)))
    far_ok = far_dev <= profile.pcf_far_tol
    ok = zero_ok and peak_ok and far_ok
    return ok, (f"g=0 below R0: {zero_ok}, peak on (0.3,0.6) = {peak:.3f} (>1.05), "
                f"max |g-1| on (3,4) = {far_dev:.3f} (<= {profile.pcf_far_tol}) "
                f"[{est.conditioning_count} conditioning]")


def _criterion_8_orderings(profile: AcceptanceProfile) -> tuple[bool, str]:
    params = ModelParams(alpha=4.0, density=1.0)
    taus = 10.0 ** (_TAU_GRID_DB / 10.0)
    app1 = np.array([coverage_type1_app1_2d(t, params) for t in taus])
    app2 = np.array([coverage_type1_2d(t, params) for t in taus])
    order_ok = bool(np.all(app1 >= app2 - 1e-12))

    base = ExperimentConfig(dimension=2, density=1e-5, alpha=4.0,
                            user_process="type1", realizations=profile.n_mid,
                            master_seed=55, tx_power_dbm=30.0)
    s1, _ = collect_power_samples(base)
    s2, _ = collect_power_samples(replace(base, user_process="type2"))
    deciles = np.arange(0.1, 0.91, 0.1)
    q1 = np.array([s1.quantile(q) for q in deciles])
    q2 = np.array([s2.quantile(q) for q in deciles])
    dominance_ok = bool(np.all(q1 >= q2))
    gap = float(s1.quantile(0.5) - s2.quantile(0.5))
    gap_ok = 1.0 <= gap <= 4.0
    ok = order_ok and dominance_ok and gap_ok
    return ok, (f"app1>=app2 on grid: {order_ok}; in-cell signal dominates at "
                f"all deciles: {dominance_ok}; median signal gap = {gap:.2f} dB "
                f"(in [1,4])")


def _criterion_9_scale_invariance(profile: AcceptanceProfile) -> tuple[bool, str]:
    lams = (0.5, 1.0, 4.0)
    analytic_sets = {
        "type2": [coverage_type2(1.0, ModelParams(alpha=4.0, density=lam), 2)
                  for lam in lams],
        "type1_2d": [coverage_type1_2d(1.0, ModelParams(alpha=4.0, density=lam))
                     for lam in lams],
        "app1": [coverage_type1_app1_2d(1.0, ModelParams(alpha=4.0, density=lam))
                 for lam in lams],
    }
    exact_ok = all(len(set(v)) == 1 for v in analytic_sets.values())
    quad_1d = [coverage_type1_1d(1.0, ModelParams(alpha=4.0, density=lam))
               for lam in lams]
    quad_spread = max(quad_1d) - min(quad_1d)
    quad_ok = quad_spread <= 1e-4

    mc_ok = True
    mc_notes = []
    for dim, process in ((2, "type2"), (2, "type1"), (1, "type1")):
        ests, ns = [], []
        for k, lam in enumerate(lams):
            cfg = ExperimentConfig(dimension=dim, density=lam, alpha=4.0,
                                   user_process=process,
                                   realizations=profile.n_mid,
                                   master_seed=6000 + 10 * dim + k)
            curve = run_sir_experiment(cfg, [0.0])
            ests.append(float(curve.estimate[0]))
            ns.append(curve.n)
        for i in range(len(lams)):
            for j in range(i + 1, len(lams)):
                sigma = math.sqrt(ests[i] * (1 - ests[i]) / ns[i]
                                  + ests[j] * (1 - ests[j]) / ns[j])
                if abs(ests[i] - ests[j]) > 3.0 * sigma:
                    mc_ok = False
                    mc_notes.append(f"{dim}d/{process} lam {lams[i]} vs {lams[j]}: "
                                    f"|{ests[i]:.4f}-{ests[j]:.4f}| > 3sigma")
    ok = exact_ok and quad_ok and mc_ok
    detail = (f"analytic identical: {exact_ok}; 1-D quadrature spread "
              f"{quad_spread:.1e} (<=1e-4); mc within 3sigma: {mc_ok}")
    if mc_notes:
        detail += "; " + "; ".join(mc_notes)
    return ok, detail


def _criterion_10_determinism(profile: AcceptanceProfile) -> tuple[bool, str]:
    from . import cli

    n = 10_000  # three batches, so merging order matters
    outputs: dict[int, dict[str, bytes]] = {}
    saved = os.environ.get("TYPCELL_THREADS")
    try:
        with tempfile.TemporaryDirectory() as tmp:
            for workers in (1, 4, 16):
                os.environ["TYPCELL_THREADS"] = str(workers)
                cov_out = Path(tmp) / f"cov_{workers}.csv"
                link_out = Path(tmp) / f"link_{workers}.csv"
                cli.cmd_coverage({
                    "dim": 2, "alpha": 4.0, "lambda": 1.0, "process": "type1",
                    "method": "mc", "tau-db": "-4:10:2", "realizations": n,
                    "seed": 12345, "out": str(cov_out)})
                cli.cmd_linkdist({
                    "lambda": 1.0, "realizations": n, "grid": "0:2.5:0.05",
                    "seed": 12345, "out": str(link_out)})
                outputs[workers] = {"coverage": cov_out.read_bytes(),
                                    "linkdist": link_out.read_bytes()}
    finally:
        if saved is None:
            os.environ.pop("TYPCELL_THREADS", None)
        else:
            os.environ["TYPCELL_THREADS"] = saved
    same = all(outputs[w][k] == outputs[1][k]
               for w in (4, 16) for k in ("coverage", "linkdist"))
    return same, (f"coverage and linkdist CSVs bit-identical across "
                  f"workers 1/4/16: {same}")


CRITERIA = [
    (1, "type2-closed-form-and-mc", _criterion_1_type2_closed_form),
    (2, "exact-1d-vs-mc", _criterion_2_exact_1d),
    (3, "dominant-interferer-formula-vs-its-simulator", _criterion_3_app2_self_consistency),
    (4, "dominant-interferer-formula-vs-full-geometry", _criterion_4_accuracy_vs_truth),
    (5, "link-distance-approximations", _criterion_5_link_distances),
    (6, "mean-area-ratio", _criterion_6_area_ratio),
    (7, "clustering-signature", _criterion_7_clustering),
    (8, "ordering-properties", _criterion_8_orderings),
    (9, "scale-invariance", _criterion_9_scale_invariance),
    (10, "determinism-across-workers", _criterion_10_determinism),
]


def run_criterion(number: int, profile: AcceptanceProfile) -> CriterionResult:
    for num, name, fn in CRITERIA:
        if num == number:
            started = time.perf_counter()
            passed, details = fn(profile)
            return CriterionResult(num, name, passed, details,
                                   time.perf_counter() - started)
    raise ValueError(f"no criterion {number}")


def run_acceptance(profile: AcceptanceProfile, stream=None,
                   numbers=None) -> list[CriterionResult]:
    stream = stream or sys.stdout
    results = []
    print(f"acceptance profile: {profile.name}", file=stream)
    for num, _name, _fn in CRITERIA:
        if numbers is not None and num not in numbers:
            continue
        result = run_criterion(num, profile)
        print(result.line(), file=stream, flush=True)
        results.append(result)
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} criteria passed", file=stream)
    return results
