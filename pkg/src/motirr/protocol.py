"""Single-photon detection protocol: per-photon outcomes, click streaks, metrics.

One photon is injected per time window. With an object in the cavity the
per-photon outcome probabilities are (R, R(1-R), (1-R)^2) for the reflected
detector, absorption by the object, and the transmitted detector; with an
empty cavity the reflected detector fires with the device efficiency eta.
A trial ends when the same detector has fired ``consecutive_clicks_required``
times in a row (the "two or three in a row" stopping rule), or when the
photon budget runs out, which is recorded as inconclusive.

Trials are reproducible and order-independent: trial i draws its uniforms
from a counter-based Philox stream keyed (rng_seed, i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import ContractViolationError, ParameterError
from .resonator import ResonatorParams, _check_reflectivity, _snapped_floor, efficiency_closed_form

# Event codes (shared with the kernels) and their serialized labels.
EVENT_DR = kernels.EVENT_DR
EVENT_DT = kernels.EVENT_DT
EVENT_ABSORBED = kernels.EVENT_ABSORBED
EVENT_LOST = kernels.EVENT_LOST
EVENT_UNDETECTED = kernels.EVENT_UNDETECTED
EVENT_LABELS = ("Dr", "Dt", "absorbed", "lost", "undetected")

_CHUNK_START = 64    # photons' worth of uniforms drawn per request
_CHUNK_MAX = 4096    # uniform-draw chunk policy is part of the rng contract


@dataclass(frozen=True)
class OutcomeDistribution:
    """Per-photon probabilities over {Dr click, Dt click, absorbed, lost}."""

    p_dr: float
    p_dt: float
    p_absorbed: float
    p_lost: float

    def __post_init__(self) -> None:
        for name in ("p_dr", "p_dt", "p_absorbed", "p_lost"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ParameterError(f"{name} must be a probability, got {p}")
        total = self.p_dr + self.p_dt + self.p_absorbed + self.p_lost
        if abs(total - 1.0) > 1e-12:
            raise ContractViolationError(f"outcome probabilities sum to {total}, not 1")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.p_dr, self.p_dt, self.p_absorbed, self.p_lost)


@dataclass(frozen=True)
class DetectorModel:
    """Single-photon detector imperfections."""

    quantum_efficiency: float = 0.85
    recovery_time: float = 1e-8       # [s]
    dark_count_rate: float = 0.0      # [Hz]

    def __post_init__(self) -> None:
        if not 0.0 <= self.quantum_efficiency <= 1.0:
            raise ParameterError(
                f"quantum_efficiency must be in [0, 1], got {self.quantum_efficiency}")
        if self.recovery_time < 0.0:
            raise ParameterError(f"recovery_time must be >= 0, got {self.recovery_time}")
        if self.dark_count_rate < 0.0:
            raise ParameterError(f"dark_count_rate must be >= 0, got {self.dark_count_rate}")


@dataclass(frozen=True)
class ProtocolConfig:
    """One protocol run's parameters.

    ``break_streak_on_undetected`` selects the conservative reading of the
    stopping rule (a missed photon interrupts "in a row"); set it False to
    let quantum-efficiency failures pass silently.
    """

    resonator: ResonatorParams
    detector: DetectorModel = field(default_factory=DetectorModel)
    consecutive_clicks_required: int = 2
    time_window: float = 1e-6         # [s], within the stated 1 ns .. 1 ms bracket
    max_photons: int = 10_000
    rng_seed: int = 0
    break_streak_on_undetected: bool = True

    def __post_init__(self) -> None:
        if self.consecutive_clicks_required not in (1, 2, 3):
            raise ParameterError(
                "consecutive_clicks_required must be 1, 2 or 3, got "
                f"{self.consecutive_clicks_required}")
        if not 1e-9 <= self.time_window <= 1e-3:
            raise ParameterError(
                f"time_window must lie in [1e-9, 1e-3] s, got {self.time_window}")
        if self.max_photons < 1:
            raise ContractViolationError(
                f"max_photons must be >= 1, got {self.max_photons}")


@dataclass(frozen=True)
class TrialRecord:
    """One protocol trial: the event sequence and its classification."""

    truth: bool                     # object actually present?
    decision: Optional[bool]        # True/False, or None for inconclusive
    photon_events: np.ndarray       # uint8 event codes, one per window
    photons_absorbed_by_object: int
    photons_sent: int
    elapsed_windows: int

    def __post_init__(self) -> None:
        absorbed = int(np.count_nonzero(self.photon_events == EVENT_ABSORBED))
        if absorbed != self.photons_absorbed_by_object:
            raise ContractViolationError(
                f"absorbed count {self.photons_absorbed_by_object} does not match "
                f"the {absorbed} absorbed entries in photon_events")

    def event_labels(self) -> list[str]:
        return [EVENT_LABELS[code] for code in self.photon_events]


def outcome_probs_object_present(reflectivity: float) -> OutcomeDistribution:
    """Per-photon outcome probabilities with an object blocking the cavity:
    p_dr = R, p_absorbed = R(1-R), p_dt = (1-R)^2."""
    _check_reflectivity(reflectivity)
    r = reflectivity
    return OutcomeDistribution(p_dr=r, p_dt=(1.0 - r) ** 2,
                               p_absorbed=r * (1.0 - r), p_lost=0.0)


def outcome_probs_object_absent(reflectivity: float, round_trips: int,
                                loss: float = 0.0) -> OutcomeDistribution:
    """Per-photon outcome probabilities with an empty cavity: p_dr = eta.

    The optional loss extension routes the non-surviving share of the
    transmitted intensity to p_lost (photon survival over n round trips is
    (1-loss)^2n for an amplitude attenuation of (1-loss) per trip).
    """
    if not 0.0 <= loss < 1.0:
        raise ParameterError(f"loss must be in [0, 1), got {loss}")
    p_dr = efficiency_closed_form(reflectivity, round_trips)
    rest = 1.0 - p_dr
    survival = math.pow(1.0 - loss, 2 * round_trips)
    p_dt = survival * rest
    p_lost = rest - p_dt
    return OutcomeDistribution(p_dr=p_dr, p_dt=p_dt, p_absorbed=0.0, p_lost=p_lost)


def sample_photon_outcome(dist: OutcomeDistribution, detector: DetectorModel,
                          rng: np.random.Generator) -> int:
    """Draw one photon event. Consumes exactly two uniforms.

    A Dr/Dt draw is downgraded to ``EVENT_UNDETECTED`` with probability
    1 - quantum_efficiency. Dark counts need a time window and are handled
    by :func:`run_trial`, not here.
    """
    total = dist.p_dr + dist.p_dt + dist.p_absorbed + dist.p_lost
    if abs(total - 1.0) > 1e-12:
        raise ContractViolationError(f"outcome distribution sums to {total}, not 1")
    u = rng.random(2)
    return int(kernels.classify_photon(
        u[0], u[1], 1.0, 1.0,
        dist.p_dr, dist.p_dt, dist.p_absorbed,
        detector.quantum_efficiency, 0.0, 0.0))


def trial_rng(rng_seed: int, trial_index: int) -> np.random.Generator:
    """Counter-based substream for one trial, keyed (rng_seed, trial_index)."""
    key = np.array([rng_seed & 0xFFFFFFFFFFFFFFFF, trial_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def run_trial(config: ProtocolConfig, truth: bool,
              rng: np.random.Generator) -> TrialRecord:
    """Simulate one trial: inject photons window by window until the stopping
    rule fires or the photon budget is exhausted (inconclusive)."""
    params = config.resonator
    if truth:
        dist = outcome_probs_object_present(params.reflectivity)
    else:
        dist = outcome_probs_object_absent(params.reflectivity, params.round_trips,
                                           params.loss_per_round_trip)
    det = config.detector
    dark_enabled = det.dark_count_rate > 0.0
    p_dark = -math.expm1(-det.dark_count_rate * config.time_window)
    stride = 4 if dark_enabled else 2

    events = np.empty(config.max_photons, dtype=np.uint8)
    consumed = 0
    decision_code = kernels.DECISION_PENDING
    streak_det = kernels.STREAK_NONE
    streak_len = 0
    chunk = _CHUNK_START
    while consumed < config.max_photons and decision_code == kernels.DECISION_PENDING:
        m = min(chunk, config.max_photons - consumed)
        u = rng.random(m * stride)
        done, decision_code, streak_det, streak_len = kernels.trial_chunk(
            u, events[consumed:consumed + m],
            dist.p_dr, dist.p_dt, dist.p_absorbed,
            det.quantum_efficiency, p_dark, p_dark,
            config.consecutive_clicks_required, config.break_streak_on_undetected,
            streak_det, streak_len, dark_enabled)
        consumed += done
        chunk = min(chunk * 2, _CHUNK_MAX)

    if decision_code == kernels.DECISION_PENDING:
        decision: Optional[bool] = None
    else:
        decision = decision_code == kernels.DECISION_PRESENT
    trial_events = events[:consumed].copy()
    return TrialRecord(
        truth=truth,
        decision=decision,
        photon_events=trial_events,
        photons_absorbed_by_object=int(np.count_nonzero(trial_events == EVENT_ABSORBED)),
        photons_sent=consumed,
        elapsed_windows=consumed,
    )


def run_trials(config: ProtocolConfig, truth: bool, n_trials: int,
               first_trial_index: int = 0) -> list[TrialRecord]:
    """Run independent trials on their per-index substreams (order-free)."""
    if n_trials < 1:
        raise ParameterError(f"n_trials must be >= 1, got {n_trials}")
    return [
        run_trial(config, truth, trial_rng(config.rng_seed, first_trial_index + i))
        for i in range(n_trials)
    ]


@dataclass(frozen=True)
class ProtocolMetrics:
    misclassification_rate: float
    inconclusive_rate: float
    mean_photons_absorbed: float
    max_photons_absorbed: int
    mean_windows: float
    energy_exchange_free_fraction: float  # NaN when no present-truth trials


def estimate_metrics(records: Sequence[TrialRecord]) -> ProtocolMetrics:
    """Aggregate a batch of trials.

    The energy-exchange-free fraction is the share of present-truth trials
    that were both correctly classified and absorbed zero photons.
    """
    if not records:
        raise ContractViolationError("estimate_metrics needs at least one record")
    n = len(records)
    wrong = sum(1 for r in records if r.decision is not None and r.decision != r.truth)
    inconclusive = sum(1 for r in records if r.decision is None)
    absorbed = [r.photons_absorbed_by_object for r in records]
    present = [r for r in records if r.truth]
    if present:
        eef = sum(
            1 for r in present if r.decision is True and r.photons_absorbed_by_object == 0
        ) / len(present)
    else:
        eef = math.nan
    return ProtocolMetrics(
        misclassification_rate=wrong / n,
        inconclusive_rate=inconclusive / n,
        mean_photons_absorbed=sum(absorbed) / n,
        max_photons_absorbed=max(absorbed),
        mean_windows=sum(r.elapsed_windows for r in records) / n,
        energy_exchange_free_fraction=eef,
    )


@dataclass(frozen=True)
class CountBudget:
    """Detector count budget for an observation span: per channel from the
    recovery time, and the fiber-multiplied aggregate."""

    per_channel: int
    n_fibers: int
    aggregate: int


def count_budget(observation_time: float, recovery_time: float,
                 n_fibers: int) -> CountBudget:
    """Counts one detector channel can register, plus the fiber aggregate."""
    if observation_time <= 0.0:
        raise ParameterError(f"observation_time must be positive, got {observation_time}")
    if recovery_time <= 0.0:
        raise ParameterError(f"recovery_time must be positive, got {recovery_time}")
    if n_fibers < 1:
        raise ParameterError(f"n_fibers must be >= 1, got {n_fibers}")
    per_channel = _snapped_floor(observation_time / recovery_time)
    return CountBudget(per_channel=per_channel, n_fibers=n_fibers,
                       aggregate=per_channel * n_fibers)
