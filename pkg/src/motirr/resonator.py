"""Ring-resonator round-trip amplitudes, device efficiency, and feasibility math.

Model
-----
A beam of amplitude A enters a total-internal-reflection ring cavity through
an evanescent coupler of reflectivity R. The directly reflected portion is

    B_0 = -A sqrt(R),

and the portion rejoining it after the i-th full round trip is

    B_i = A (1 - R) sqrt(R) * [(1 - loss) R e^{i psi}]^(i-1) * (1 - loss) e^{i psi},

with psi = (omega - omega_res) T the phase picked up per round trip. The
per-round-trip amplitude ratio R e^{i psi} (one sqrt(R) coupling attenuation
at each of the two coupler faces per loop) reproduces the printed B_1 and
makes the series geometric.

Summing n round trips on resonance and squaring gives the device efficiency
(probability of the reflected-port detector firing with nothing in the
cavity). Two routes are exposed deliberately:

* ``efficiency_closed_form`` — the closed-form bracket expression, evaluated
  with its explicit finite sum. Algebraically it collapses to R^(2n).
* ``efficiency_brute_force`` — |sum of the amplitudes|^2, the independent
  oracle. On resonance it collapses to R^(2n+1).

The two differ by exactly one factor of R at every n; both vanish as
n -> infinity and agree on every qualitative statement. Neither is "fixed"
to match the other; the test suite asserts and reports the discrepancy.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from . import kernels
from .errors import ContractViolationError, ParameterError

C_VACUUM = 299_792_458.0  # speed of light [m/s], exact

# Below this value the subtractive closed form carries no information in
# double precision (cancellation floor ~1e-15); the sweep switches to the
# algebraically identical R^(2n) evaluation there.
_SWEEP_RESOLVABLE_MIN = 1e-9

# Relative slack when snapping float quotients of decimal inputs to integers.
_FLOOR_SNAP = 1e-12


def _snapped_floor(q: float) -> int:
    """floor(q) that forgives a quotient landing one ulp below an integer."""
    return int(math.floor(q * (1.0 + _FLOOR_SNAP)))


def _check_reflectivity(reflectivity: float) -> None:
    if not 0.0 <= reflectivity <= 1.0:
        raise ParameterError(f"reflectivity must be in [0, 1], got {reflectivity}")


def _check_loss(loss: float) -> None:
    if not 0.0 <= loss < 1.0:
        raise ParameterError(f"loss_per_round_trip must be in [0, 1), got {loss}")


@dataclass(frozen=True)
class ResonatorParams:
    """Cavity parameters.

    ``round_trip_length`` with ``effective_index`` is canonical; the
    round-trip time T = L * n_eff / c is derived unless supplied, in which
    case it must agree within a 1e-6 relative tolerance. The resonance
    frequency defaults to the mode condition omega_res = 2 pi k / T
    (equivalently, an in-medium wavelength lambda = L / k).

    Parameters
    ----------
    reflectivity : float
        Coupler reflectivity R in [0, 1].
    round_trip_length : float
        Geometrical round-trip path L [m].
    effective_index : float
        Effective refractive index along the round trip (>= 1).
    round_trips : int
        Number of completed round trips n (>= 0).
    loss_per_round_trip : float
        Scalar amplitude attenuation per round trip, in [0, 1).
    mode_number : int
        Longitudinal mode integer k (informational; sets omega_res default).
    round_trip_time : float, optional
        Override for T [s]; validated against L * n_eff / c.
    resonance_frequency : float, optional
        Override for omega_res [rad/s].
    """

    reflectivity: float = 0.999
    round_trip_length: float = 0.04           # [m]
    effective_index: float = 1.0
    round_trips: int = 10_013                 # operating point for the 2e-9 false-positive figure
    loss_per_round_trip: float = 0.0
    mode_number: int = 80_000                 # 0.04 m / 80000 = 500 nm in-medium
    round_trip_time: Optional[float] = None   # [s]
    resonance_frequency: Optional[float] = None  # [rad/s]

    def __post_init__(self) -> None:
        _check_reflectivity(self.reflectivity)
        if self.round_trip_length <= 0.0:
            raise ParameterError(f"round_trip_length must be positive, got {self.round_trip_length}")
        if self.effective_index < 1.0:
            raise ParameterError(f"effective_index must be >= 1, got {self.effective_index}")
        if self.round_trips < 0:
            raise ParameterError(f"round_trips must be >= 0, got {self.round_trips}")
        _check_loss(self.loss_per_round_trip)
        if self.mode_number < 1:
            raise ParameterError(f"mode_number must be >= 1, got {self.mode_number}")

        derived_t = self.round_trip_length * self.effective_index / C_VACUUM
        if self.round_trip_time is None:
            object.__setattr__(self, "round_trip_time", derived_t)
        elif self.round_trip_time <= 0.0:
            raise ParameterError(f"round_trip_time must be positive, got {self.round_trip_time}")
        elif abs(self.round_trip_time - derived_t) > 1e-6 * derived_t:
            raise ParameterError(
                f"round_trip_time {self.round_trip_time} inconsistent with "
                f"L*n/c = {derived_t} (relative tolerance 1e-6)"
            )

        if self.resonance_frequency is None:
            object.__setattr__(
                self, "resonance_frequency", 2.0 * math.pi * self.mode_number / self.round_trip_time
            )
        elif self.resonance_frequency <= 0.0:
            raise ParameterError(
                f"resonance_frequency must be positive, got {self.resonance_frequency}"
            )

    @property
    def wavelength(self) -> float:
        """In-medium wavelength lambda = L / k [m]."""
        return self.round_trip_length / self.mode_number


@dataclass(frozen=True)
class DetuningState:
    """An input frequency together with its per-round-trip phase."""

    omega: float  # [rad/s]
    psi: float    # [rad]

    @classmethod
    def for_input(cls, omega: float, params: ResonatorParams) -> "DetuningState":
        return cls(omega=omega, psi=detuning_phase(omega, params))


def detuning_phase(omega: float, params: ResonatorParams) -> float:
    """Phase added per round trip: psi = (omega - omega_res) * T.

    No range reduction is applied; callers may reduce mod 2 pi.
    """
    return (omega - params.resonance_frequency) * params.round_trip_time


def roundtrip_amplitude(i: int, amplitude: complex, reflectivity: float,
                        phase: float = 0.0, loss: float = 0.0) -> complex:
    """Amplitude of the i-th contribution at the reflected port.

    i = 0 is the direct reflection -A sqrt(R); i >= 1 is the portion that
    tunnelled in, circulated i times, and tunnelled back out. Successive
    terms are related by the ratio (1 - loss) R e^{i phase}.
    """
    if i < 0:
        raise ParameterError(f"round-trip index must be >= 0, got {i}")
    _check_reflectivity(reflectivity)
    _check_loss(loss)
    sqrt_r = math.sqrt(reflectivity)
    if i == 0:
        return -amplitude * sqrt_r
    ratio = (1.0 - loss) * reflectivity * cmath.exp(1j * phase)
    return (amplitude * (1.0 - reflectivity) * sqrt_r
            * ratio ** (i - 1) * (1.0 - loss) * cmath.exp(1j * phase))


def amplitude_partial_sums(reflectivity: float, n_max: int, phase: float = 0.0,
                           loss: float = 0.0, amplitude: complex = 1.0) -> list[complex]:
    """Partial sums B(n) = sum_{i=0..n} B_i for every n up to n_max.

    Terms are accumulated sequentially, so sums[n] == sums[n-1] + B_n holds
    exactly (the sum-linearity contract relied on by the tests).
    """
    if n_max < 0:
        raise ParameterError(f"n_max must be >= 0, got {n_max}")
    sums: list[complex] = []
    total = 0j
    for i in range(n_max + 1):
        total = total + roundtrip_amplitude(i, amplitude, reflectivity, phase, loss)
        sums.append(total)
    return sums


def efficiency_closed_form(reflectivity: float, round_trips: int) -> float:
    """Closed-form device efficiency eta for n free round trips.

    eta = 1 - ((1-R)/(1+R)) * [R^2n - 1 + 2 sum_{j=1..n} (1 + R^(2n-2j+1)) R^(j-1)]

    The bracket is evaluated with its explicit finite sum (compensated, see
    the kernel); the result is clamp-checked into [0, 1] within 1e-12 slack.
    R = 1 needs no special case: the (1-R) prefactor vanishes exactly.
    """
    _check_reflectivity(reflectivity)
    if round_trips < 0:
        raise ParameterError(f"round_trips must be >= 0, got {round_trips}")
    r = reflectivity
    bracket = math.pow(r, 2 * round_trips) - 1.0 + 2.0 * kernels.eta_bracket_sum(r, round_trips)
    eta = 1.0 - ((1.0 - r) / (1.0 + r)) * bracket
    if eta < 0.0:
        if eta < -1e-12:
            raise ContractViolationError(f"efficiency {eta} below 0 beyond numerical slack")
        return 0.0
    if eta > 1.0:
        if eta > 1.0 + 1e-12:
            raise ContractViolationError(f"efficiency {eta} above 1 beyond numerical slack")
        return 1.0
    return eta


def efficiency_brute_force(reflectivity: float, round_trips: int,
                           phase: float = 0.0, loss: float = 0.0) -> float:
    """|sum of round-trip amplitudes|^2 — the independent efficiency oracle.

    With phase = 0 and loss = 0 this evaluates analytically to R^(2n+1),
    one factor of R below the closed form (a deliberate, reported mismatch).
    """
    _check_reflectivity(reflectivity)
    if round_trips < 0:
        raise ParameterError(f"round_trips must be >= 0, got {round_trips}")
    total = 0j
    for i in range(round_trips + 1):
        total = total + roundtrip_amplitude(i, 1.0, reflectivity, phase, loss)
    return total.real * total.real + total.imag * total.imag


class SweepRow(NamedTuple):
    reflectivity: float
    round_trips: int
    eta_closed_form: float
    eta_brute_force: float


def efficiency_sweep(reflectivities: Sequence[float], n_max: int) -> list[SweepRow]:
    """Efficiency table over every (R, n) with n in 0..n_max.

    The closed-form column uses the verbatim bracket sum wherever it is
    resolvable in double precision and the algebraically identical R^(2n)
    power below ~1e-9, so curves stay strictly ordered and monotone all the
    way down. The brute-force column is the raw amplitude-sum oracle.
    An empty reflectivity list yields an empty table.
    """
    if n_max < 1:
        raise ParameterError(f"n_max must be >= 1, got {n_max}")
    for r in reflectivities:
        _check_reflectivity(r)
    rows: list[SweepRow] = []
    for r in reflectivities:
        sums = amplitude_partial_sums(r, n_max)
        for n in range(n_max + 1):
            eta = efficiency_closed_form(r, n)
            if eta < _SWEEP_RESOLVABLE_MIN:
                eta = math.pow(r, 2 * n)
            b = sums[n]
            rows.append(SweepRow(r, n, eta, b.real * b.real + b.imag * b.imag))
    return rows


def max_round_trips_from_coherence(coherence_length: float, round_trip_length: float) -> int:
    """How many round trips fit inside the source coherence length."""
    if coherence_length <= 0.0:
        raise ParameterError(f"coherence_length must be positive, got {coherence_length}")
    if round_trip_length <= 0.0:
        raise ParameterError(f"round_trip_length must be positive, got {round_trip_length}")
    return _snapped_floor(coherence_length / round_trip_length)


def round_trip_time(round_trip_length: float, effective_index: float = 1.0) -> float:
    """T = L * n_eff / c [s]."""
    if round_trip_length <= 0.0:
        raise ParameterError(f"round_trip_length must be positive, got {round_trip_length}")
    if effective_index < 1.0:
        raise ParameterError(f"effective_index must be >= 1, got {effective_index}")
    return round_trip_length * effective_index / C_VACUUM


def pulse_round_trip_ratio(pulse_duration: float, round_trip_time_s: float) -> float:
    """Pulse length in units of the round-trip time; >= 1 means the pulse
    spans at least one full round trip."""
    if pulse_duration <= 0.0:
        raise ParameterError(f"pulse_duration must be positive, got {pulse_duration}")
    if round_trip_time_s <= 0.0:
        raise ParameterError(f"round_trip_time must be positive, got {round_trip_time_s}")
    return pulse_duration / round_trip_time_s
