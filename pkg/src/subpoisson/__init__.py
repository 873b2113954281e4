"""Photon-number statistics of sub-Poissonian light in fluctuating thermal-loss channels.

The package answers one question in closed form: how transparent must a
noisy, fluctuating bosonic channel be for sub-Poissonian light to stay
sub-Poissonian?  It ships the moment algebra and critical-transmittance
solver (:mod:`subpoisson.moments`), closed-form moments for displaced
squeezed vacuum, odd cat and Fock input states (:mod:`subpoisson.states`), an
independent truncated Fock-space simulator used to verify every closed form
(:mod:`subpoisson.fock`), and a sweep engine plus CLI that produce
figure-ready CSV (:mod:`subpoisson.sweep`, ``subpoisson-sweep``).
"""

from .errors import (
    ConfigError,
    DomainError,
    InternalConsistencyError,
    SubPoissonError,
    TruncationError,
)
from .moments import (
    ChannelParams,
    DerivedStatistics,
    FluctuationModel,
    InputMoments,
    ThresholdResult,
    channel_mean,
    channel_q,
    coefficients_a_g,
    critical_transmittance,
    critical_transmittance_no_fluctuation,
    critical_transmittance_zero_temperature,
    derived_statistics,
    q_out,
    q_out_mixture,
    thermal_occupancy,
    thermal_occupancy_window,
)
from .states import (
    FockState,
    OddCat,
    SqueezedDisplaced,
    StateSpec,
    cat_moments,
    fock_moments,
    input_moments,
    squeezed_beta_critical_sq,
    squeezed_moments,
    squeezed_q2,
    squeezed_sub_poisson_condition,
    state_family,
)
from .sweep import CurvePoint, SweepConfig, build_config, emit_csv, run_sweep, verify_mode

__version__ = "0.1.0"

__all__ = [
    "ChannelParams",
    "ConfigError",
    "CurvePoint",
    "DerivedStatistics",
    "DomainError",
    "FluctuationModel",
    "FockState",
    "InputMoments",
    "InternalConsistencyError",
    "OddCat",
    "SqueezedDisplaced",
    "StateSpec",
    "SubPoissonError",
    "SweepConfig",
    "ThresholdResult",
    "TruncationError",
    "build_config",
    "cat_moments",
    "channel_mean",
    "channel_q",
    "coefficients_a_g",
    "critical_transmittance",
    "critical_transmittance_no_fluctuation",
    "critical_transmittance_zero_temperature",
    "derived_statistics",
    "emit_csv",
    "fock_moments",
    "input_moments",
    "q_out",
    "q_out_mixture",
    "run_sweep",
    "squeezed_beta_critical_sq",
    "squeezed_moments",
    "squeezed_q2",
    "squeezed_sub_poisson_condition",
    "state_family",
    "thermal_occupancy",
    "thermal_occupancy_window",
    "verify_mode",
]
