"""Energy-exchange-free detection with a total-internal-reflection ring resonator.

Deterministic cavity math (`resonator`), the stochastic single-photon
detection protocol (`protocol`), the which-path atom-interference experiment
(`welcherweg`), and a CLI (`motirr`). Hot loops run on a compiled kernel
backend when available; see :func:`kernel_backend`.
"""

from .errors import ContractViolationError, ParameterError, ResolutionError
from .kernels import BACKEND as _KERNEL_BACKEND
from .kernels import available_backends
from .protocol import (
    CountBudget,
    DetectorModel,
    OutcomeDistribution,
    ProtocolConfig,
    ProtocolMetrics,
    TrialRecord,
    count_budget,
    estimate_metrics,
    outcome_probs_object_absent,
    outcome_probs_object_present,
    run_trial,
    run_trials,
    sample_photon_outcome,
    trial_rng,
)
from .resonator import (
    C_VACUUM,
    DetuningState,
    ResonatorParams,
    SweepRow,
    amplitude_partial_sums,
    detuning_phase,
    efficiency_brute_force,
    efficiency_closed_form,
    efficiency_sweep,
    max_round_trips_from_coherence,
    pulse_round_trip_ratio,
    round_trip_time,
    roundtrip_amplitude,
)
from .welcherweg import (
    NEON20_MASS_KG,
    PLANCK_H,
    DoubleSlitGeometry,
    FringePattern,
    MonitoringBudget,
    PathMonitor,
    VelocityGroup,
    de_broglie_wavelength,
    fringe_intensity,
    fringe_period,
    gravity_correction_factor,
    monitoring_budget,
    profile_visibility,
    sample_arrivals,
    simulate_run,
    visibility,
    visibility_with_stderr,
)

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Name of the active kernel backend ('cython' or 'python')."""
    return _KERNEL_BACKEND
