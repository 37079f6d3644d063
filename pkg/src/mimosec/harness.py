"""Monte Carlo sweep driver: runs seeded trials over a grid of array sizes
and aggregates the rate metrics with standard errors."""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .beamforming import (BeamformerSet, analog_phase_match,
                          analog_selection_matrix, digital_mrt_selected,
                          mrt_effective, power_uniform, quantize_phases,
                          select_antennas_protocol1, stepwise_tas,
                          zf_effective)
from .channel import derive_seed, sample_realization
from .config import SystemConfig
from .errors import (ConfigurationError, DegenerateChannelError,
                     SingularChannelError)
from .metrics import RateReport, rate_report

log = logging.getLogger(__name__)

SCHEMES = ("TAS_A", "TAS_B", "HADP_A", "HADP_B")
COST_ESTIMATORS = ("mean_of_ratios", "ratio_of_means")

# Retry budget for resampling measure-zero degenerate draws.
_MAX_RESAMPLES = 16


@dataclass(frozen=True)
class SweepSpec:
    """One Monte Carlo sweep: a network profile swept over array sizes.

    ``m_values`` must be strictly increasing and each at least
    max(L, K) so every scheme stays feasible.  ``quant_bits`` is the
    phase-shifter resolution and is required exactly for scheme HADP_B.
    """

    scenario: str
    scheme: str
    K: int
    J: int
    L: int
    total_power: float
    sigma2: float
    rho2: float
    betas: np.ndarray
    thetas: np.ndarray
    weights: np.ndarray
    m_values: tuple
    trials: int
    master_seed: int
    quant_bits: int | None = None
    cost_estimator: str = "mean_of_ratios"

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme '{self.scheme}', expected one of {SCHEMES}")
        if self.cost_estimator not in COST_ESTIMATORS:
            raise ConfigurationError(f"unknown cost_estimator '{self.cost_estimator}', "
                                     f"expected one of {COST_ESTIMATORS}")
        m = tuple(int(v) for v in self.m_values)
        object.__setattr__(self, "m_values", m)
        if len(m) == 0:
            pass  # empty sweeps are allowed; they emit a header-only CSV
        elif any(b <= a for a, b in zip(m, m[1:])):
            raise ConfigurationError("m_values must be strictly increasing")
        floor = max(self.L, self.K)
        if any(v < floor for v in m):
            raise ConfigurationError(f"every m must be >= max(L, K) = {floor}")
        if (self.scheme == "HADP_B") != (self.quant_bits is not None):
            raise ConfigurationError("quant_bits is required for scheme HADP_B "
                                     "and must be absent otherwise")
        if self.trials < 1:
            raise ConfigurationError(f"trials must be >= 1, got {self.trials}")
        if self.master_seed < 0:
            raise ConfigurationError("master_seed must be non-negative")
        # Normalize vectors early so the sweep round-trips through manifests.
        probe = self.config_for(floor)
        object.__setattr__(self, "betas", probe.betas)
        object.__setattr__(self, "thetas", probe.thetas)
        object.__setattr__(self, "weights", probe.weights)

    def config_for(self, m: int) -> SystemConfig:
        """System config of this network at array size m."""
        return SystemConfig(M=int(m), K=self.K, J=self.J, L=self.L,
                            total_power=self.total_power, sigma2=self.sigma2,
                            rho2=self.rho2, betas=self.betas,
                            thetas=self.thetas, weights=self.weights)

    def with_seed(self, master_seed: int) -> "SweepSpec":
        return replace(self, master_seed=master_seed)


@dataclass(frozen=True)
class SweepPoint:
    """Aggregated statistics of one array size within a sweep."""

    m: int
    trials: int
    resamples: int
    r_sum_mean: float
    r_sum_se: float
    r_sum_noeve_mean: float
    r_sum_noeve_se: float
    leakage_mean: float
    leakage_se: float
    cost_mean: float
    cost_se: float
    se_valid: bool


@dataclass(frozen=True)
class SweepResult:
    """Per-m statistics plus an echo of the sweep that produced them."""

    spec: SweepSpec
    points: tuple

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points])


def build_beamformers(H: np.ndarray, cfg: SystemConfig, scheme: str,
                      quant_bits: int | None = None) -> BeamformerSet:
    """Construct the analog/digital pair of the given scheme from the user
    channels alone.

    TAS_A: per-user strongest-antenna selection with a single-tap matched
    filter per user.  TAS_B: greedy sum-rate antenna selection with MRT over
    the selected rows.  HADP_A: phase matching in the analog stage, identity
    digital stage.  HADP_B: quantized phase matching followed by zero
    forcing over the effective channel.
    """
    K = cfg.K
    powers = power_uniform(K, cfg.total_power)
    if scheme == "TAS_A":
        sel = select_antennas_protocol1(H)
        F = analog_selection_matrix(sel, cfg.M)
        W = digital_mrt_selected(H, sel)
    elif scheme == "TAS_B":
        sel = stepwise_tas(H, cfg.L, cfg)
        F = analog_selection_matrix(sel, cfg.M)
        W = mrt_effective(F.T @ H)
    elif scheme == "HADP_A":
        F = analog_phase_match(H)
        W = np.eye(K, dtype=complex)
    elif scheme == "HADP_B":
        if quant_bits is None:
            raise ConfigurationError("HADP_B requires quant_bits")
        F = quantize_phases(analog_phase_match(H), quant_bits)
        W = zf_effective(F.T @ H)
    else:
        raise ConfigurationError(f"unknown scheme '{scheme}'")
    return BeamformerSet(F=F, W=W, powers=powers)


def run_trial(cfg: SystemConfig, scheme: str, quant_bits: int | None,
              master_seed: int, trial_index: int) -> RateReport:
    """Sample one realization, build the scheme's beamformers from H only,
    and evaluate the rate metrics.

    Degenerate draws (exact-zero coefficients, ill-conditioned zero
    forcing) raise; the sweep driver resamples and counts them.
    """
    ch = sample_realization(cfg, master_seed, trial_index)
    bf = build_beamformers(ch.H, cfg, scheme, quant_bits)
    return rate_report(ch, bf, cfg)


def _trial_with_resampling(cfg, scheme, quant_bits, seed, trial_index, trials):
    """Run one trial, retrying on measure-zero degeneracies with a fresh
    derived stream; returns (report, number of resamples)."""
    for attempt in range(_MAX_RESAMPLES + 1):
        try:
            return run_trial(cfg, scheme, quant_bits, seed,
                             attempt * trials + trial_index), attempt
        except (DegenerateChannelError, SingularChannelError):
            if attempt == _MAX_RESAMPLES:
                raise
    raise AssertionError("unreachable")


def _trial_task(args):
    cfg, scheme, quant_bits, seed, trial_index, trials = args
    report, resamples = _trial_with_resampling(cfg, scheme, quant_bits, seed,
                                               trial_index, trials)
    return (trial_index, report.r_sum, report.r_sum_noeve, report.leakage,
            report.cost, resamples)


def _standard_error(x: np.ndarray) -> float:
    if x.size < 2:
        return 0.0
    return float(np.std(x, ddof=1) / np.sqrt(x.size))


def _cost_stats(r_sum, r_noeve, cost, estimator):
    """(mean, se) of the relative cost under the requested estimator."""
    n = cost.size
    if estimator == "mean_of_ratios":
        return float(np.mean(cost)), _standard_error(cost)
    # ratio of means, SE by first-order error propagation
    ym = float(np.mean(r_noeve))
    if ym == 0.0:
        return 0.0, 0.0
    xm = float(np.mean(r_sum))
    mean = 1.0 - xm / ym
    if n < 2:
        return mean, 0.0
    cov = np.cov(r_sum, r_noeve, ddof=1)
    var = (cov[0, 0] / ym ** 2 - 2.0 * xm * cov[0, 1] / ym ** 3
           + xm ** 2 * cov[1, 1] / ym ** 4) / n
    return mean, float(np.sqrt(max(var, 0.0)))


def _aggregate(spec: SweepSpec, m: int, r_sum, r_noeve, leakage, cost,
               resamples: int) -> SweepPoint:
    cost_mean, cost_se = _cost_stats(r_sum, r_noeve, cost, spec.cost_estimator)
    return SweepPoint(
        m=m, trials=spec.trials, resamples=resamples,
        r_sum_mean=float(np.mean(r_sum)), r_sum_se=_standard_error(r_sum),
        r_sum_noeve_mean=float(np.mean(r_noeve)), r_sum_noeve_se=_standard_error(r_noeve),
        leakage_mean=float(np.mean(leakage)), leakage_se=_standard_error(leakage),
        cost_mean=cost_mean, cost_se=cost_se,
        se_valid=spec.trials > 1,
    )


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Run the full sweep and aggregate per-m statistics.

    Parameters
    ----------
    spec : SweepSpec
        Network profile, scheme, m grid, trial count and master seed.
    workers : int
        Process count for the trial loop.  Results are placed by trial
        index before aggregation, so the output is bitwise-identical for
        any worker count.
    """
    points = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for m in spec.m_values:
            cfg = spec.config_for(m)
            seed = derive_seed(spec.master_seed, m)
            tasks = [(cfg, spec.scheme, spec.quant_bits, seed, t, spec.trials)
                     for t in range(spec.trials)]
            r_sum = np.empty(spec.trials)
            r_noeve = np.empty(spec.trials)
            leakage = np.empty(spec.trials)
            cost = np.empty(spec.trials)
            resamples = 0
            if pool is None:
                results = map(_trial_task, tasks)
            else:
                chunk = max(1, spec.trials // (workers * 4))
                results = pool.map(_trial_task, tasks, chunksize=chunk)
            for t, rs, rn, lk, c, extra in results:
                r_sum[t] = rs
                r_noeve[t] = rn
                leakage[t] = lk
                cost[t] = c
                resamples += extra
            points.append(_aggregate(spec, m, r_sum, r_noeve, leakage, cost,
                                     resamples))
            log.info("%s %s m=%d: r_sum=%.4f cost=%.4f (%d trials, %d resampled)",
                     spec.scenario, spec.scheme, m, points[-1].r_sum_mean,
                     points[-1].cost_mean, spec.trials, resamples)
    finally:
        if pool is not None:
            pool.shutdown()
    return SweepResult(spec=spec, points=tuple(points))
