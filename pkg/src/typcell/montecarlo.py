"""Monte Carlo ground truth: SIR coverage for both user models in 1-D and
2-D, the two surrogate interferer fields, and empirical distance, power,
cell-area and pair-correlation statistics.

Realizations are generated in fixed-size batches; batch b draws from the
substream SeedSequence(master_seed, spawn_key=(task, process, method, b)).
Batch boundaries never depend on the worker count and partial results are
merged in batch order, so results are bit-identical for any parallelism.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import pointprocess as pp
from .analytic import ModelParams
from .pointprocess import SimWindow, default_window

__all__ = [
    "ExperimentConfig",
    "EmpiricalDistribution",
    "CoverageCurve",
    "PcfEstimate",
    "SimulationError",
    "InsufficientSamplesError",
    "db_to_linear",
    "linear_to_db",
    "wilson_interval",
    "resolve_workers",
    "run_sir_experiment",
    "run_surrogate_experiment",
    "collect_distance_samples",
    "collect_power_samples",
    "collect_area_samples",
    "estimate_pcf",
]

DEFAULT_BATCH_SIZE = 4096
MAX_DISCARD_FRACTION = 1e-3
_WILSON_Z = 1.959963984540054  # two-sided 95%

# substream tags, combined with (process, method, batch) in the spawn key
_TASK_SIR = 1
_TASK_DISTANCE = 2
_TASK_POWER = 3
_TASK_PCF = 4
_TASK_AREA = 5

_PROCESS_IDS = {"type1": 1, "type2": 2}
_METHOD_IDS = {"full": 0, "app1": 1, "app2": 2}


class SimulationError(RuntimeError):
    """Simulation could not produce trustworthy output (e.g. too many
    discarded realizations)."""


class InsufficientSamplesError(SimulationError):
    """Not enough conditioning realizations; rerun with more."""


def db_to_linear(db):
    value = 10.0 ** (np.asarray(db, dtype=float) / 10.0)
    return float(value) if value.ndim == 0 else value


def linear_to_db(x):
    value = 10.0 * np.log10(np.asarray(x, dtype=float))
    return float(value) if value.ndim == 0 else value


def wilson_interval(successes, trials):
    """Wilson 95% score interval, vectorized over success counts."""
    k = np.asarray(successes, dtype=float)
    n = float(trials)
    z2 = _WILSON_Z**2
    p = k / n
    denom = 1.0 + z2 / n
    centre = (p + z2 / (2.0 * n)) / denom
    half = _WILSON_Z * np.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    return np.maximum(centre - half, 0.0), np.minimum(centre + half, 1.0)


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument wins, then TYPCELL_THREADS, then the
    CPU count.  TYPCELL_THREADS always caps the result."""
    env = os.environ.get("TYPCELL_THREADS")
    cap = None
    if env:
        cap = max(1, min(int(env), 64))
    if workers is None:
        workers = cap if cap is not None else (os.cpu_count() or 1)
    if cap is not None:
        workers = min(workers, cap)
    return max(1, int(workers))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything an experiment needs to be reproduced bit-exactly."""

    dimension: int
    density: float
    alpha: float
    user_process: str = "type1"
    method: str = "full"
    realizations: int = 10_000
    master_seed: int = 0
    window: SimWindow | None = None
    rho0: float = 9.0 / 7.0
    tx_power_dbm: float = 30.0
    batch_size: int = DEFAULT_BATCH_SIZE

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if self.user_process not in _PROCESS_IDS:
            raise ValueError(f"unknown user_process {self.user_process!r}")
        if self.method not in _METHOD_IDS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.method in ("app1", "app2"):
            if self.dimension != 2:
                raise ValueError("surrogate methods are defined for dimension 2 only")
            if self.user_process != "type1":
                raise ValueError("surrogate methods model the type1 user process")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        # validates alpha/density/rho0 invariants
        ModelParams(alpha=self.alpha, density=self.density, rho0=self.rho0)
        if self.window is None:
            object.__setattr__(self, "window",
                               default_window(self.dimension, self.density))
        if self.window.dimension != self.dimension:
            raise ValueError("window dimension does not match experiment dimension")
        if self.density * self.window.measure < 50.0:
            raise ValueError("window too small: expected point count below 50")

    def model_params(self) -> ModelParams:
        return ModelParams(alpha=self.alpha, density=self.density, rho0=self.rho0)


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample set with right-continuous step CDF."""

    samples: np.ndarray

    @classmethod
    def from_samples(cls, values) -> "EmpiricalDistribution":
        arr = np.sort(np.asarray(values, dtype=float))
        return cls(arr)

    @property
    def count(self) -> int:
        return int(self.samples.size)

    def cdf(self, x):
        pos = np.searchsorted(self.samples, np.asarray(x, dtype=float), side="right")
        value = pos / self.count
        return float(value) if value.ndim == 0 else value

    def quantile(self, q) -> float:
        return float(np.quantile(self.samples, q))

    def ks_statistic(self, cdf: Callable) -> float:
        """Kolmogorov-Smirnov distance to a reference CDF."""
        n = self.count
        f = np.asarray(cdf(self.samples), dtype=float)
        i = np.arange(1, n + 1)
        return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))

    def ks_band(self) -> float:
        """95% sampling band of the KS statistic, 1.3581/sqrt(n)."""
        return 1.3581 / math.sqrt(self.count)


@dataclass(frozen=True)
class CoverageCurve:
    """Coverage estimates on a dB threshold grid with Wilson 95% bounds."""

    tau_db: np.ndarray
    estimate: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    n: int
    method: str

    def rows(self):
        for i in range(self.tau_db.size):
            yield (float(self.tau_db[i]), float(self.estimate[i]),
                   float(self.ci_low[i]), float(self.ci_high[i]), self.n, self.method)


@dataclass(frozen=True)
class PcfEstimate:
    """Binned conditional pair correlation of interferers around the user."""

    ro_center: float
    ro_halfwidth: float
    r_edges: np.ndarray
    g: np.ndarray
    pair_counts: np.ndarray
    conditioning_count: int
    density: float

    @property
    def r_centers(self) -> np.ndarray:
        return 0.5 * (self.r_edges[:-1] + self.r_edges[1:])


# --------------------------------------------------------------------------
# batching machinery


def _batch_bounds(n: int, batch_size: int):
    return [(lo, min(lo + batch_size, n)) for lo in range(0, n, batch_size)]


def _batch_rng(config: ExperimentConfig, task: int, batch_index: int) -> np.random.Generator:
    key = (task, _PROCESS_IDS[config.user_process],
           _METHOD_IDS[config.method], batch_index)
    ss = np.random.SeedSequence(entropy=config.master_seed, spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def _call_task(args):
    fn, config, task, batch_index, nb, extra = args
    rng = _batch_rng(config, task, batch_index)
    return fn(config, rng, nb, extra)


def _run_batches(config: ExperimentConfig, fn, task: int, extra,
                 workers: int | None = None) -> list:
    bounds = _batch_bounds(config.realizations, config.batch_size)
    args = [(fn, config, task, i, hi - lo, extra)
            for i, (lo, hi) in enumerate(bounds)]
    workers = resolve_workers(workers)
    if workers == 1 or len(args) == 1:
        return [_call_task(a) for a in args]
    chunk = max(1, len(args) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_call_task, args, chunksize=chunk))


def _offsets(counts: np.ndarray) -> np.ndarray:
    off = np.zeros(counts.size, dtype=np.int64)
    np.cumsum(counts[:-1], out=off[1:])
    return off


def _seg_reduce(ufunc, values, offsets, counts, empty_fill):
    if values.size == 0:
        return np.full(counts.size, empty_fill)
    safe = np.minimum(offsets, values.size - 1)
    out = ufunc.reduceat(values, safe)
    if np.any(counts == 0):
        out = np.where(counts == 0, empty_fill, out)
    return out


def _first_min_indices(values, offsets, counts, minima):
    """Flat index of the first per-segment minimum (segments non-empty)."""
    rep = np.repeat(minima, counts)
    hits = np.flatnonzero(values == rep)
    seg = np.repeat(np.arange(counts.size), counts)[hits]
    keep = np.ones(hits.size, dtype=bool)
    keep[1:] = seg[1:] != seg[:-1]
    return hits[keep]


# --------------------------------------------------------------------------
# realization kernels (one batch each); draw order within a batch is fixed


def _type2_distances(config, rng, nb):
    """Distances from the origin user to all in-window stations (flat) plus
    segment bookkeeping; works in 1-D and 2-D because only radii matter."""
    lam, radius = config.density, config.window.radius
    counts = rng.poisson(lam * config.window.measure, nb)
    total = int(counts.sum())
    u = rng.random(total)
    if config.dimension == 1:
        d = radius * u
    else:
        d = radius * np.sqrt(u)
    return counts, _offsets(counts), d


def _type1_1d_geometry(config, rng, nb):
    lam, radius = config.density, config.window.radius
    counts = rng.poisson(2.0 * lam * radius, nb)
    total = int(counts.sum())
    x = rng.uniform(-radius, radius, total)
    off = _offsets(counts)
    left = _seg_reduce(np.minimum, np.where(x < 0.0, -x, np.inf), off, counts, np.inf)
    right = _seg_reduce(np.minimum, np.where(x > 0.0, x, np.inf), off, counts, np.inf)
    ok = np.isfinite(left) & np.isfinite(right)
    u = rng.random(nb)
    y = np.where(ok, -left / 2.0 + u * (left + right) / 2.0, np.nan)
    r0 = np.abs(y)
    d = np.abs(x - np.repeat(y, counts))
    r1 = _seg_reduce(np.minimum, d, off, counts, np.inf)
    return counts, off, d, y, r0, r1, ok


def _type1_2d_geometry(config, rng, nb, want_crofton=False):
    lam, radius = config.density, config.window.radius
    counts = rng.poisson(lam * config.window.measure, nb)
    total = int(counts.sum())
    rad = radius * np.sqrt(rng.random(total))
    ang = 2.0 * math.pi * rng.random(total)
    px = rad * np.cos(ang)
    py = rad * np.sin(ang)
    off = _offsets(counts)

    ux = np.full(nb, np.nan)
    uy = np.full(nb, np.nan)
    area = np.full(nb, np.nan)
    carea = np.full(nb, np.nan) if want_crofton else None
    ok = np.zeros(nb, dtype=bool)

    for i in range(nb):
        lo = off[i]
        hi = lo + counts[i]
        if counts[i] == 0:
            continue
        sx = px[lo:hi]
        sy = py[lo:hi]
        d2 = rad[lo:hi] ** 2
        order = np.argsort(d2)
        poly = pp._clip_cell_local(sx, sy, d2, order, radius)
        if len(poly) < 3:
            continue
        try:
            pp._assert_closed(poly, (0.0, 0.0), radius)
        except pp.CellNotClosedError:
            continue
        if want_crofton:
            j = int(order[0])
            nx, ny = float(sx[j]), float(sy[j])
            lx = sx - nx
            ly = sy - ny
            ld2 = lx * lx + ly * ly
            lorder = np.argsort(ld2)
            cpoly = pp._clip_cell_local(lx, ly, ld2, lorder, radius)
            if len(cpoly) < 3:
                continue
            try:
                pp._assert_closed(cpoly, (nx, ny), radius)
            except pp.CellNotClosedError:
                continue
            carea[i] = _poly_area(cpoly)
        u3 = rng.random(3)
        x, y = pp._sample_in_polygon(poly, u3[0], u3[1], u3[2])
        ux[i] = x
        uy[i] = y
        area[i] = _poly_area(poly)
        ok[i] = True

    d = np.hypot(px - np.repeat(ux, counts), py - np.repeat(uy, counts))
    r0 = np.hypot(ux, uy)
    with np.errstate(invalid="ignore"):
        r1 = _seg_reduce(np.fmin, d, off, counts, np.inf)
    return counts, off, d, ux, uy, r0, r1, area, carea, ok


def _poly_area(poly) -> float:
    acc = 0.0
    x0, y0 = poly[-1]
    for x1, y1 in poly:
        acc += x0 * y1 - x1 * y0
        x0, y0 = x1, y1
    return 0.5 * acc


def _sir_full_batch(config, rng, nb, tau_linear):
    """One batch of full-geometry SIR samples reduced to per-tau hit counts."""
    alpha = config.alpha
    r1 = r0 = None
    if config.user_process == "type2":
        counts, off, d = _type2_distances(config, rng, nb)
        h = rng.standard_exponential(d.size)
        power = h * d**-alpha
        total_power = _seg_reduce(np.add, power, off, counts, 0.0)
        r0 = _seg_reduce(np.minimum, d, off, counts, np.inf)
        idx = _first_min_indices(d, off, counts, r0)
        serving_power = np.zeros(nb)
        seg_of = np.repeat(np.arange(nb), counts)
        serving_power[seg_of[idx]] = power[idx]
        interference = total_power - serving_power
        signal = serving_power
        ok = counts >= 1
        r1 = None
    elif config.dimension == 1:
        counts, off, d, y, r0, r1, ok = _type1_1d_geometry(config, rng, nb)
        h = rng.standard_exponential(d.size)
        h0 = rng.standard_exponential(nb)
        interference = _seg_reduce(np.add, h * d**-alpha, off, counts, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            signal = h0 * r0**-alpha
    else:
        counts, off, d, ux, uy, r0, r1, area, _, ok = _type1_2d_geometry(config, rng, nb)
        h = rng.standard_exponential(d.size)
        h0 = rng.standard_exponential(nb)
        with np.errstate(invalid="ignore"):
            interference = _seg_reduce(np.add, h * d**-alpha, off, counts, 0.0)
            signal = h0 * r0**-alpha
    if r1 is not None and np.any(ok & ~(r1 >= r0 - 1e-12)):
        raise SimulationError("dominant interferer closer than serving station")
    with np.errstate(divide="ignore", invalid="ignore"):
        sir = np.where(interference > 0.0, signal / interference, np.inf)
    sir = sir[ok]
    hits = (sir[:, None] > tau_linear[None, :]).sum(axis=0).astype(np.int64)
    return hits, int(ok.sum()), int(nb - ok.sum()), sir


def _sir_surrogate_batch(config, rng, nb, tau_linear):
    lam, radius, alpha = config.density, config.window.radius, config.alpha
    scale = math.pi * config.rho0 * lam
    r0 = np.sqrt(rng.standard_exponential(nb) / scale)
    if config.method == "app2":
        r1 = np.sqrt(r0**2 + rng.standard_exponential(nb) / scale)
        base = r1
    else:
        base = r0
    annulus = np.clip(radius**2 - base**2, 0.0, None)
    counts = rng.poisson(lam * math.pi * annulus)
    total = int(counts.sum())
    u = rng.random(total)
    d = np.sqrt(np.repeat(base**2, counts) + u * np.repeat(annulus, counts))
    h = rng.standard_exponential(total)
    off = _offsets(counts)
    interference = _seg_reduce(np.add, h * d**-alpha, off, counts, 0.0)
    if config.method == "app2":
        h_dom = rng.standard_exponential(nb)
        interference = interference + h_dom * r1**-alpha
    h0 = rng.standard_exponential(nb)
    signal = h0 * r0**-alpha
    with np.errstate(divide="ignore"):
        sir = np.where(interference > 0.0, signal / interference, np.inf)
    hits = (sir[:, None] > tau_linear[None, :]).sum(axis=0).astype(np.int64)
    return hits, nb, 0, sir


def _distance_batch(config, rng, nb, _extra):
    if config.user_process == "type2":
        counts, off, d = _type2_distances(config, rng, nb)
        r0 = _seg_reduce(np.minimum, d, off, counts, np.inf)
        idx = _first_min_indices(d, off, counts, np.where(counts >= 1, r0, np.inf))
        d2 = d.copy()
        d2[idx] = np.inf
        r1 = _seg_reduce(np.minimum, d2, off, counts, np.inf)
        ok = counts >= 2
        return r0[ok], r1[ok], int(nb - ok.sum())
    if config.dimension == 1:
        _, _, _, _, r0, r1, ok = _type1_1d_geometry(config, rng, nb)
    else:
        _, _, _, _, _, r0, r1, _, _, ok = _type1_2d_geometry(config, rng, nb)
    return r0[ok], r1[ok], int(nb - ok.sum())


def _power_batch(config, rng, nb, _extra):
    alpha = config.alpha
    if config.user_process == "type2":
        counts, off, d = _type2_distances(config, rng, nb)
        h = rng.standard_exponential(d.size)
        power = h * d**-alpha
        total_power = _seg_reduce(np.add, power, off, counts, 0.0)
        r0 = _seg_reduce(np.minimum, d, off, counts, np.inf)
        idx = _first_min_indices(d, off, counts, np.where(counts >= 1, r0, np.inf))
        serving_power = np.zeros(nb)
        seg_of = np.repeat(np.arange(nb), counts)
        serving_power[seg_of[idx]] = power[idx]
        signal = serving_power
        interference = total_power - serving_power
        ok = counts >= 2
    elif config.dimension == 1:
        counts, off, d, _, r0, _, ok = _type1_1d_geometry(config, rng, nb)
        h = rng.standard_exponential(d.size)
        h0 = rng.standard_exponential(nb)
        interference = _seg_reduce(np.add, h * d**-alpha, off, counts, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            signal = h0 * r0**-alpha
    else:
        counts, off, d, _, _, r0, _, _, _, ok = _type1_2d_geometry(config, rng, nb)
        h = rng.standard_exponential(d.size)
        h0 = rng.standard_exponential(nb)
        with np.errstate(invalid="ignore"):
            interference = _seg_reduce(np.add, h * d**-alpha, off, counts, 0.0)
            signal = h0 * r0**-alpha
    tx_mw = 10.0 ** (config.tx_power_dbm / 10.0)
    signal_dbm = 10.0 * np.log10(tx_mw * signal[ok])
    interference_dbm = 10.0 * np.log10(tx_mw * interference[ok])
    return signal_dbm, interference_dbm, int(nb - ok.sum())


def _pcf_batch(config, rng, nb, extra):
    ro_center, ro_halfwidth, r_edges = extra
    counts, off, d, _, _, r0, _, _, _, ok = _type1_2d_geometry(config, rng, nb)
    cond = ok & (np.abs(r0 - ro_center) <= ro_halfwidth)
    take = np.repeat(cond, counts)
    hist, _ = np.histogram(d[take], bins=r_edges)
    return hist.astype(np.int64), int(cond.sum()), int(nb - ok.sum())


def _area_batch(config, rng, nb, _extra):
    if config.dimension == 1:
        typical = np.empty(nb)
        crofton = np.empty(nb)
        ok = np.zeros(nb, dtype=bool)
        for i in range(nb):
            pts = pp.sample_ppp(config.window, config.density, rng)
            try:
                typical[i] = pp.typical_cell(pts, config.window).length
                crofton[i] = pp.crofton_cell(pts, config.window).length
            except pp.CellNotClosedError:
                continue
            ok[i] = True
        return typical[ok], crofton[ok], int(nb - ok.sum())
    _, _, _, _, _, _, _, area, carea, ok = _type1_2d_geometry(
        config, rng, nb, want_crofton=True)
    return area[ok], carea[ok], int(nb - ok.sum())


# --------------------------------------------------------------------------
# public experiment drivers


def _check_discards(discarded: int, total: int):
    if discarded > MAX_DISCARD_FRACTION * total:
        raise SimulationError(
            f"{discarded} of {total} realizations discarded "
            f"(> {MAX_DISCARD_FRACTION:.1%}); enlarge the window")


def run_sir_experiment(config: ExperimentConfig, tau_db, workers: int | None = None,
                       return_sir: bool = False):
    """Full-geometry coverage curve over a dB threshold grid.

    Every threshold is evaluated against the same SIR samples, so the curve
    is exactly monotone for each run.  Returns a CoverageCurve, plus the raw
    linear SIR samples when ``return_sir`` is set.
    """
    if config.method != "full":
        raise ValueError("run_sir_experiment runs the full geometry; "
                         "use run_surrogate_experiment for app1/app2")
    tau_db = np.atleast_1d(np.asarray(tau_db, dtype=float))
    tau_linear = db_to_linear(tau_db)
    parts = _run_batches(config, _sir_full_batch, _TASK_SIR, tau_linear, workers)
    hits = np.sum([p[0] for p in parts], axis=0)
    valid = sum(p[1] for p in parts)
    discarded = sum(p[2] for p in parts)
    _check_discards(discarded, config.realizations)
    lo, hi = wilson_interval(hits, valid)
    curve = CoverageCurve(tau_db=tau_db, estimate=hits / valid, ci_low=lo,
                          ci_high=hi, n=valid, method="mc")
    if return_sir:
        return curve, np.concatenate([p[3] for p in parts])
    return curve


def run_surrogate_experiment(config: ExperimentConfig, tau_db,
                             workers: int | None = None) -> CoverageCurve:
    """Coverage curve for the approximate interferer fields: a Poisson
    annulus beyond the serving distance (app1) or an explicit dominant
    interferer plus a Poisson annulus beyond it (app2)."""
    if config.method not in ("app1", "app2"):
        raise ValueError("method must be app1 or app2")
    tau_db = np.atleast_1d(np.asarray(tau_db, dtype=float))
    tau_linear = db_to_linear(tau_db)
    parts = _run_batches(config, _sir_surrogate_batch, _TASK_SIR, tau_linear, workers)
    hits = np.sum([p[0] for p in parts], axis=0)
    valid = sum(p[1] for p in parts)
    lo, hi = wilson_interval(hits, valid)
    return CoverageCurve(tau_db=tau_db, estimate=hits / valid, ci_low=lo,
                         ci_high=hi, n=valid, method=config.method)


def collect_distance_samples(config: ExperimentConfig, workers: int | None = None):
    """Serving distance R0 and dominant-interferer distance R1 samples."""
    parts = _run_batches(config, _distance_batch, _TASK_DISTANCE, None, workers)
    discarded = sum(p[2] for p in parts)
    _check_discards(discarded, config.realizations)
    r0 = EmpiricalDistribution.from_samples(np.concatenate([p[0] for p in parts]))
    r1 = EmpiricalDistribution.from_samples(np.concatenate([p[1] for p in parts]))
    return r0, r1


def collect_power_samples(config: ExperimentConfig, workers: int | None = None):
    """Received desired-signal and interference power samples in dBm."""
    parts = _run_batches(config, _power_batch, _TASK_POWER, None, workers)
    discarded = sum(p[2] for p in parts)
    _check_discards(discarded, config.realizations)
    signal = EmpiricalDistribution.from_samples(np.concatenate([p[0] for p in parts]))
    interference = EmpiricalDistribution.from_samples(np.concatenate([p[1] for p in parts]))
    return signal, interference


def collect_area_samples(config: ExperimentConfig, workers: int | None = None):
    """Typical-cell and Crofton-cell size samples from the same
    realizations (areas in 2-D, lengths in 1-D)."""
    parts = _run_batches(config, _area_batch, _TASK_AREA, None, workers)
    discarded = sum(p[2] for p in parts)
    _check_discards(discarded, config.realizations)
    typical = EmpiricalDistribution.from_samples(np.concatenate([p[0] for p in parts]))
    crofton = EmpiricalDistribution.from_samples(np.concatenate([p[1] for p in parts]))
    return typical, crofton


def estimate_pcf(config: ExperimentConfig, ro_center: float,
                 ro_halfwidth: float | None = None, r_edges=None,
                 workers: int | None = None) -> PcfEstimate:
    """Conditional pair correlation g(r | R0 in ro_center +/- halfwidth) of
    the interferers around the user, normalized by the annulus intensity."""
    if config.user_process != "type1" or config.dimension != 2:
        raise ValueError("pcf estimation is defined for the 2-D type1 process")
    if ro_halfwidth is None:
        ro_halfwidth = 0.025 / math.sqrt(config.density)
    if r_edges is None:
        r_edges = np.arange(0.0, 4.5 + 1e-9, 0.05) / math.sqrt(config.density)
    r_edges = np.asarray(r_edges, dtype=float)
    if r_edges.max() > config.window.radius / 2.0:
        raise ValueError("pcf bins must stay within half the window radius")
    extra = (float(ro_center), float(ro_halfwidth), r_edges)
    parts = _run_batches(config, _pcf_batch, _TASK_PCF, extra, workers)
    counts = np.sum([p[0] for p in parts], axis=0)
    conditioning = sum(p[1] for p in parts)
    discarded = sum(p[2] for p in parts)
    _check_discards(discarded, config.realizations)
    if conditioning < 1000:
        raise InsufficientSamplesError(
            f"only {conditioning} realizations fall in the R0 bin "
            f"{ro_center}+/-{ro_halfwidth}; increase realizations")
    annulus = math.pi * (r_edges[1:] ** 2 - r_edges[:-1] ** 2)
    g = counts / (conditioning * config.density * annulus)
    return PcfEstimate(ro_center=float(ro_center), ro_halfwidth=float(ro_halfwidth),
                       r_edges=r_edges, g=g, pair_counts=counts,
                       conditioning_count=int(conditioning), density=config.density)
