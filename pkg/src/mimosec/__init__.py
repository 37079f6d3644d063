"""Monte Carlo secrecy-rate simulator for massive MIMO downlinks with
reduced-complexity transmitters (antenna selection and hybrid
analog-digital precoding)."""

__version__ = "0.1.0"

from .asymptotics import (FitResult, GumbelCheck, clt_check, fit_cost_anchor,
                          fit_growth, gumbel_check, phase_aligned_sums)
from .beamforming import (BeamformerSet, SelectionResult, analog_phase_match,
                          analog_selection_matrix, digital_mrt_selected,
                          mrt_effective, power_uniform, quantize_phases,
                          select_antennas_protocol1, stepwise_tas,
                          zf_effective)
from .channel import (ChannelRealization, complex_normal, derive_seed,
                      derived_rng, empirical_moment, sample_realization)
from .config import SystemConfig
from .errors import (ConfigParseError, ConfigurationError,
                     DegenerateChannelError, FitError, InfeasibleSelectionError,
                     MimosecError, SingularChannelError)
from .harness import (SCHEMES, SweepPoint, SweepResult, SweepSpec,
                      build_beamformers, run_sweep, run_trial)
from .metrics import RateReport, esnr_k, rate_report, sinr_k

__all__ = [
    "BeamformerSet", "ChannelRealization", "ConfigParseError",
    "ConfigurationError", "DegenerateChannelError", "FitError", "FitResult",
    "GumbelCheck", "InfeasibleSelectionError", "MimosecError", "RateReport",
    "SCHEMES", "SelectionResult", "SingularChannelError", "SweepPoint",
    "SweepResult", "SweepSpec", "SystemConfig", "analog_phase_match",
    "analog_selection_matrix", "build_beamformers", "clt_check",
    "complex_normal", "derive_seed", "derived_rng", "digital_mrt_selected",
    "empirical_moment", "esnr_k", "fit_cost_anchor", "fit_growth",
    "gumbel_check", "mrt_effective", "phase_aligned_sums", "power_uniform",
    "quantize_phases", "rate_report", "run_sweep", "run_trial",
    "sample_realization", "select_antennas_protocol1", "sinr_k",
    "stepwise_tas", "zf_effective",
]
