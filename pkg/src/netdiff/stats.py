"""Ensemble statistics: Monte-Carlo infection bands, the k-sample
Anderson-Darling test, Pearson correlation, and the SBM motif/speed
experiment driver.

The AD test is the Scholz-Stephens ties-adjusted (midrank) statistic,
standardized, with p-values interpolated from the published critical
points, so it behaves sensibly on the tied, discrete infection
fractions the cascades produce.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from netdiff import rng as _rng
from netdiff.generators import stochastic_block_model
from netdiff.kt import KTParams, SeedStrategy, diffusion_speed, kt_run, select_blocked, select_seeds
from netdiff.motifs import TEMPLATE_NAMES, census


@dataclass
class CurveEnsemble:
    """Infection[t, i]: fraction infected at timestep t in run i."""

    infection: np.ndarray

    def __post_init__(self):
        self.infection = np.asarray(self.infection, dtype=float)
        if self.infection.ndim != 2:
            raise ValueError("ensemble must be a timesteps x runs matrix")
        if np.any(self.infection < 0) or np.any(self.infection > 1):
            raise ValueError("infection fractions must lie in [0, 1]")
        if np.any(np.diff(self.infection, axis=0) < -1e-12):
            raise ValueError("each run's curve must be monotone non-decreasing")

    @property
    def runs(self) -> int:
        return self.infection.shape[1]


@dataclass
class BandedCurve:
    mean: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    method: str = "percentile"

    def __post_init__(self):
        if np.any(self.lo > self.mean + 1e-12) or np.any(self.mean > self.hi + 1e-12):
            raise ValueError("band ordering violated")


def infection_bands(ensemble: CurveEnsemble, resample: str = "percentile",
                    draws: int = 1000, rng: np.random.Generator | None = None) -> BandedCurve:
    """Mean curve with empirical 2.5/97.5 percentile bands per timestep.

    resample="percentile" takes the percentiles across the independent
    runs (the default Monte-Carlo band). resample="bootstrap" instead
    takes percentiles of mean curves over `draws` resamples of run
    indices, giving a confidence band for the mean itself.
    """
    m = ensemble.infection
    if ensemble.runs < 2:
        raise ValueError("need at least two runs for bands")
    mu = m.mean(axis=1)
    if resample == "percentile":
        lo, hi = np.percentile(m, [2.5, 97.5], axis=1)
        # strongly skewed timesteps can push the mean marginally past an
        # empirical percentile; widen the band to keep lo <= mean <= hi
        lo = np.minimum(lo, mu)
        hi = np.maximum(hi, mu)
    elif resample == "bootstrap":
        if rng is None:
            rng = _rng.generator(0)
        idx = rng.integers(0, ensemble.runs, size=(draws, ensemble.runs))
        boot_means = m[:, idx].mean(axis=2)  # timesteps x draws
        lo, hi = np.percentile(boot_means, [2.5, 97.5], axis=1)
        lo = np.minimum(lo, mu)
        hi = np.maximum(hi, mu)
    else:
        raise ValueError(f"unknown resample mode {resample!r}")
    return BandedCurve(mean=mu, lo=lo, hi=hi, method=resample)


# -- k-sample Anderson-Darling (Scholz & Stephens 1987) ---------------------

# critical points t_m(alpha) = b0 + b1/sqrt(m) + b2/m for m = k-1
_AD_LEVELS = np.array([0.25, 0.10, 0.05, 0.025, 0.01, 0.005, 0.001])
_AD_B0 = np.array([0.675, 1.281, 1.645, 1.960, 2.326, 2.573, 3.085])
_AD_B1 = np.array([-0.245, 0.250, 0.678, 1.149, 1.822, 2.364, 3.615])
_AD_B2 = np.array([-0.105, -0.305, -0.362, -0.391, -0.396, -0.345, -0.154])


def ad_statistic(samples) -> float:
    """Ties-adjusted (midrank) k-sample Anderson-Darling statistic A2akN."""
    samples = [np.sort(np.asarray(s, dtype=float)) for s in samples]
    n = np.array([len(s) for s in samples])
    pooled = np.sort(np.concatenate(samples))
    big_n = len(pooled)
    zstar, counts = np.unique(pooled, return_counts=True)
    if len(zstar) < 2:
        raise ValueError("no variation")
    lj = counts.astype(float)
    # B_j: pooled count below z*_j plus half the ties at it
    bj = np.cumsum(lj) - 0.5 * lj
    inner = 0.0
    for s, ni in zip(samples, n):
        left = np.searchsorted(s, zstar, side="left")
        right = np.searchsorted(s, zstar, side="right")
        mij = left + 0.5 * (right - left)
        num = (big_n * mij - ni * bj) ** 2
        den = bj * (big_n - bj) - big_n * lj / 4.0
        inner += (lj / big_n * num / den).sum() / ni
    return float((big_n - 1) / big_n * inner)


def _ad_variance(n, big_n: int) -> float:
    k = len(n)
    big_h = (1.0 / n).sum()
    little_h = (1.0 / np.arange(1, big_n)).sum()
    i = np.arange(1, big_n - 1, dtype=float)
    # g = sum_{i=1}^{N-2} sum_{j=i+1}^{N-1} 1 / ((N - i) j)
    inv_j_tail = np.cumsum(1.0 / np.arange(big_n - 1, 1, -1))[::-1]
    g = (inv_j_tail / (big_n - i)).sum()
    a = (4 * g - 6) * (k - 1) + (10 - 6 * g) * big_h
    b = (2 * g - 4) * k**2 + 8 * little_h * k + (2 * g - 14 * little_h - 4) * big_h - 8 * little_h + 4 * g - 6
    c = (6 * little_h + 2 * g - 2) * k**2 + (4 * little_h - 4 * g + 6) * k + (2 * little_h - 6) * big_h + 4 * little_h
    d = (2 * little_h + 6) * k**2 - 4 * little_h * k
    return float((a * big_n**3 + b * big_n**2 + c * big_n + d)
                 / ((big_n - 1.0) * (big_n - 2.0) * (big_n - 3.0)))


def ad_k_sample(samples):
    """Standardized k-sample AD statistic and interpolated p-value.

    p-values come from a quadratic fit of log-significance against the
    published critical points and are clipped to [0.001, 0.25]; values
    at the clip boundaries mean "at least" / "at most" respectively.
    """
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    for s in samples:
        if len(s) < 2:
            raise ValueError("each sample needs at least two values")
    n = np.array([len(s) for s in samples], dtype=float)
    big_n = int(n.sum())
    a2 = ad_statistic(samples)
    sigma = np.sqrt(_ad_variance(n, big_n))
    k = len(samples)
    tk = (a2 - (k - 1)) / sigma
    m = k - 1
    critical = _AD_B0 + _AD_B1 / np.sqrt(m) + _AD_B2 / m
    if tk < critical.min():
        p = 0.25  # capped: true p-value is at least this
    elif tk > critical.max():
        p = 0.001  # floored: true p-value is smaller
    else:
        coeffs = np.polyfit(critical, np.log(_AD_LEVELS), 2)
        p = float(np.exp(np.polyval(coeffs, tk)))
        p = min(max(p, 0.001), 0.25)
    return float(tk), p


def pearson_correlation(x, y) -> float:
    """Product-moment correlation; errors on zero variance."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("need two equal-length vectors of at least 2 points")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise ValueError("zero variance")
    xc = x - x.mean()
    yc = y - y.mean()
    return float((xc @ yc) / np.sqrt((xc @ xc) * (yc @ yc)))


# -- SBM motif-concentration vs diffusion-speed experiment -------------------


@dataclass
class MotifSpeedResult:
    mean_corr: dict
    sd_corr: dict
    valid_runs: dict


def _experiment_run(block_sizes, pw, pb_grid, kt_params, strategy, seed, run_index):
    speeds = []
    concs = {name: [] for name in TEMPLATE_NAMES}
    for j, pb in enumerate(pb_grid):
        gen = _rng.stream(seed, run_index * len(pb_grid) + j)
        graph_seed = int(gen.integers(0, 2**63))
        k = len(block_sizes)
        P = np.full((k, k), pb)
        np.fill_diagonal(P, pw)
        g = stochastic_block_model(block_sizes, P, seed=graph_seed)
        seeds = select_seeds(g, strategy, gen)
        blocked = select_blocked(g, kt_params.beta, seeds, gen)
        trace = kt_run(g, kt_params, seeds, blocked, gen)
        speeds.append(diffusion_speed(trace).value)
        c = census(g)
        total = c.total
        for name in TEMPLATE_NAMES:
            # a motif-free graph contributes zero concentration
            concs[name].append(c.counts[name] / total if total else 0.0)
    return speeds, concs


def motif_speed_experiment(block_sizes, pw: float, pb_grid, runs: int,
                           kt_params: KTParams, strategy: SeedStrategy,
                           seed: int, workers: int = 1) -> MotifSpeedResult:
    """Correlate diffusion speed with motif concentrations across a
    between-block probability grid.

    Each run sweeps the grid: one SBM instance and one cascade per grid
    point, recording the speed and the motif concentrations; the
    per-run correlation is taken across grid points. Runs where a
    motif's concentration (or the speed) has no variation are skipped
    for that motif with a warning.
    """
    if len(pb_grid) < 2:
        raise ValueError("need at least two grid points for correlations")
    if runs < 2:
        raise ValueError("need at least two runs")

    args = (block_sizes, pw, list(pb_grid), kt_params, strategy, seed)
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_experiment_run,
                                    *[[a] * runs for a in args], range(runs)))
    else:
        results = [_experiment_run(*args, r) for r in range(runs)]

    corr = {name: [] for name in TEMPLATE_NAMES}
    for r, (speeds, concs) in enumerate(results):
        for name in TEMPLATE_NAMES:
            try:
                corr[name].append(pearson_correlation(speeds, concs[name]))
            except ValueError:
                warnings.warn(f"run {r}: zero variance for {name}, skipped")
    if all(len(v) < 2 for v in corr.values()):
        raise ValueError("fewer than two valid runs for every motif")

    mean_corr, sd_corr, valid = {}, {}, {}
    for name in TEMPLATE_NAMES:
        vals = np.array(corr[name])
        valid[name] = len(vals)
        mean_corr[name] = float(vals.mean()) if len(vals) else float("nan")
        sd_corr[name] = float(vals.std(ddof=1)) if len(vals) > 1 else float("nan")
    return MotifSpeedResult(mean_corr=mean_corr, sd_corr=sd_corr, valid_runs=valid)
