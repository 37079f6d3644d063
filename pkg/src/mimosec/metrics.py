"""Per-realization rate metrics: SINR, eavesdropper SNR, secrecy rates,
leakage, and relative secrecy cost."""

from dataclasses import dataclass, field

import numpy as np

from .beamforming import BeamformerSet
from .channel import ChannelRealization
from .config import SystemConfig
from .errors import ConfigurationError


@dataclass(frozen=True)
class RateReport:
    """All rate quantities of one realization/beamformer pair.

    Rates are in bits per channel use.  ``interference[k]`` is the total
    received interference power sum_{i != k} P_i |h_k^T F w_i|^2 and
    ``eve_power[k]`` the aggregate overheard power
    sum_j theta_j |g_j^T F w_k|^2 (both without the noise scaling).
    """

    sinr: np.ndarray
    esnr: np.ndarray
    r_secrecy: np.ndarray
    r_noeve: np.ndarray
    r_sum: float
    r_sum_noeve: float
    leakage: float
    cost: float
    interference: np.ndarray = field(repr=False)
    eve_power: np.ndarray = field(repr=False)


def _check_dims(ch: ChannelRealization, bf: BeamformerSet, cfg: SystemConfig):
    M, K, J, L = cfg.M, cfg.K, cfg.J, cfg.L
    if ch.H.shape != (M, K) or ch.G.shape != (M, J):
        raise ConfigurationError(f"channel shapes {ch.H.shape}/{ch.G.shape} do not match "
                                 f"cfg (M={M}, K={K}, J={J})")
    if bf.F.shape[0] != M or bf.F.shape[1] != bf.W.shape[0] or bf.W.shape[1] != K:
        raise ConfigurationError(f"beamformer shapes F{bf.F.shape}, W{bf.W.shape} do not "
                                 f"compose to M x K")
    if bf.powers.shape != (K,):
        raise ConfigurationError("powers must be a length-K vector")


def _link_gains(ch: ChannelRealization, bf: BeamformerSet):
    """(K x K, J x K) matrices of h_k^T F w_i and g_j^T F w_i."""
    T = bf.F @ bf.W
    return ch.H.T @ T, ch.G.T @ T


def _sinr_values(a: np.ndarray, powers, betas, sigma2):
    sig = np.abs(a[np.arange(a.shape[0]), np.arange(a.shape[1])]) ** 2
    total = (np.abs(a) ** 2) @ powers
    interference = total - powers * sig
    interference = np.maximum(interference, 0.0)
    sinr = powers * betas * sig / (sigma2 + betas * interference)
    return sinr, interference


def _eve_values(b: np.ndarray, powers, thetas, rho2):
    eve_power = thetas @ (np.abs(b) ** 2)
    return powers * eve_power / rho2, eve_power


def sinr_k(k: int, ch: ChannelRealization, bf: BeamformerSet,
           cfg: SystemConfig) -> float:
    r"""SINR of user k:

        P_k beta_k |h_k^T F w_k|^2
        -----------------------------------------------
        sigma^2 + beta_k sum_{i != k} P_i |h_k^T F w_i|^2
    """
    _check_dims(ch, bf, cfg)
    a, _ = _link_gains(ch, bf)
    sinr, _ = _sinr_values(a, bf.powers, cfg.betas, cfg.sigma2)
    return float(sinr[k])


def esnr_k(k: int, ch: ChannelRealization, bf: BeamformerSet,
           cfg: SystemConfig) -> float:
    r"""Effective SNR of user k's signal at the cooperating eavesdroppers:

        (P_k / rho^2) sum_j theta_j |g_j^T F w_k|^2
    """
    _check_dims(ch, bf, cfg)
    _, b = _link_gains(ch, bf)
    esnr, _ = _eve_values(b, bf.powers, cfg.thetas, cfg.rho2)
    return float(esnr[k])


def rate_report(ch: ChannelRealization, bf: BeamformerSet,
                cfg: SystemConfig) -> RateReport:
    """Evaluate all per-user and network-level rate metrics.

    Per user: secrecy rate [log2((1+SINR)/(1+ESNR))]^+ and the
    no-eavesdropper rate log2(1+SINR).  Network level: weighted sums, their
    gap (the information leakage), and the relative secrecy cost
    1 - R_sum / R_sum_noeve (defined as 0 when R_sum_noeve is 0).
    """
    _check_dims(ch, bf, cfg)
    a, b = _link_gains(ch, bf)
    sinr, interference = _sinr_values(a, bf.powers, cfg.betas, cfg.sigma2)
    esnr, eve_power = _eve_values(b, bf.powers, cfg.thetas, cfg.rho2)

    r_noeve = np.log2(1.0 + sinr)
    r_secrecy = np.maximum(r_noeve - np.log2(1.0 + esnr), 0.0)
    r_sum = float(cfg.weights @ r_secrecy)
    r_sum_noeve = float(cfg.weights @ r_noeve)
    leakage = r_sum_noeve - r_sum
    cost = 1.0 - r_sum / r_sum_noeve if r_sum_noeve != 0.0 else 0.0
    return RateReport(sinr=sinr, esnr=esnr, r_secrecy=r_secrecy,
                      r_noeve=r_noeve, r_sum=r_sum, r_sum_noeve=r_sum_noeve,
                      leakage=leakage, cost=cost, interference=interference,
                      eve_power=eve_power)
