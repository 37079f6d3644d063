"""System-level parameters of one downlink wiretap instance."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError


def _as_vector(x, n: int, name: str) -> np.ndarray:
    v = np.atleast_1d(np.asarray(x, dtype=float))
    if v.ndim != 1 or v.size != n:
        raise ConfigurationError(f"{name} must be a length-{n} vector, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class SystemConfig:
    """All scalar parameters of one base-station / users / eavesdroppers setup.

    M transmit antennas serve K single-antenna users through L RF chains
    while J passive single-antenna eavesdroppers overhear.  ``betas`` and
    ``thetas`` are the large-scale (path-loss and shadowing) power gains of
    the user and eavesdropper channels; ``weights`` are the per-user QoS
    weights used in all weighted sum-rates.
    """

    M: int
    K: int
    J: int
    L: int
    total_power: float
    sigma2: float
    rho2: float
    betas: np.ndarray = field(repr=False)
    thetas: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.M < 1:
            raise ConfigurationError(f"M must be >= 1, got {self.M}")
        if self.K < 1:
            raise ConfigurationError(f"K must be >= 1, got {self.K}")
        if self.J < 0:
            raise ConfigurationError(f"J must be >= 0, got {self.J}")
        if not 1 <= self.L <= self.M:
            raise ConfigurationError(f"L must satisfy 1 <= L <= M, got L={self.L}, M={self.M}")
        if self.total_power < 0:
            raise ConfigurationError(f"total_power must be >= 0, got {self.total_power}")
        if self.sigma2 <= 0:
            raise ConfigurationError(f"sigma2 must be > 0, got {self.sigma2}")
        if self.rho2 <= 0:
            raise ConfigurationError(f"rho2 must be > 0, got {self.rho2}")
        object.__setattr__(self, "betas", _as_vector(self.betas, self.K, "betas"))
        object.__setattr__(self, "thetas", _as_vector(self.thetas, self.J, "thetas"))
        object.__setattr__(self, "weights", _as_vector(self.weights, self.K, "weights"))
        if np.any(self.betas < 0):
            raise ConfigurationError("betas must be non-negative")
        if np.any(self.thetas < 0):
            raise ConfigurationError("thetas must be non-negative")
        if np.any(self.weights < 0):
            raise ConfigurationError("weights must be non-negative")
        if not np.any(self.weights > 0):
            raise ConfigurationError("weights must not be all zero")

    @classmethod
    def uniform(cls, M: int, K: int, J: int, L: int, total_power: float,
                sigma2: float, rho2: float, beta: float = 1.0,
                theta: float = 0.1, weight: float = 1.0) -> "SystemConfig":
        """Build a config with identical large-scale gains and weights."""
        return cls(M=M, K=K, J=J, L=L, total_power=total_power,
                   sigma2=sigma2, rho2=rho2,
                   betas=np.full(K, float(beta)),
                   thetas=np.full(J, float(theta)),
                   weights=np.full(K, float(weight)))

    def snr_user_db(self) -> np.ndarray:
        """Per-user receive SNR beta_k * P / sigma^2 in dB."""
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.betas * self.total_power / self.sigma2)

    def snr_eve_db(self) -> np.ndarray:
        """Per-eavesdropper receive SNR theta_j * P / rho^2 in dB."""
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.thetas * self.total_power / self.rho2)
