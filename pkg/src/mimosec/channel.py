"""I.i.d. Rayleigh channel generation with reproducible per-trial streams."""

from dataclasses import dataclass, field

import numpy as np

from .config import SystemConfig
from .errors import ConfigurationError, MimosecError


def derived_rng(*key: int) -> np.random.Generator:
    """Independent generator derived by hashing a tuple of non-negative ints.

    Streams for distinct keys are statistically independent, and the mapping
    is stable across processes and call order, so trials can run on any
    number of workers without shared RNG state.
    """
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in key]))


def derive_seed(*key: int) -> int:
    """Collapse a key tuple into a single non-negative integer seed."""
    return int(np.random.SeedSequence([int(k) for k in key]).generate_state(1, np.uint64)[0])


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    r"""Draw CN(0, 1) entries as (x + jy)/sqrt(2) with x, y standard normal."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the fading matrices plus the fixed large-scale gains.

    ``H`` (M x K) holds the user fading vectors column-wise, ``G`` (M x J)
    the eavesdropper ones; entries are i.i.d. CN(0, 1).
    """

    H: np.ndarray
    G: np.ndarray
    betas: np.ndarray = field(repr=False)
    thetas: np.ndarray = field(repr=False)

    @property
    def B(self) -> np.ndarray:
        """Diagonal K x K matrix of user large-scale gains."""
        return np.diag(self.betas)

    @property
    def Theta(self) -> np.ndarray:
        """Diagonal J x J matrix of eavesdropper large-scale gains."""
        return np.diag(self.thetas)


def sample_realization(cfg: SystemConfig, master_seed: int,
                       trial_index: int) -> ChannelRealization:
    """Draw one channel realization for trial ``trial_index``.

    Pure function of (cfg dimensions, master_seed, trial_index): repeated
    calls return bitwise-identical matrices regardless of execution order
    or thread count.  H is drawn before G from the same derived stream.
    """
    if not isinstance(cfg, SystemConfig):
        raise ConfigurationError("cfg must be a SystemConfig")
    rng = derived_rng(master_seed, trial_index)
    H = complex_normal(rng, (cfg.M, cfg.K))
    G = complex_normal(rng, (cfg.M, cfg.J))
    return ChannelRealization(H=H, G=G, betas=cfg.betas, thetas=cfg.thetas)


def empirical_moment(values, p: int) -> float:
    r"""p-th raw moment (1/n) \sum_i values_i^p of a non-empty sample."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise MimosecError("empirical_moment of an empty sample is undefined")
    if int(p) != p or p < 1:
        raise MimosecError(f"moment order must be a positive integer, got {p}")
    return float(np.mean(v ** int(p)))
