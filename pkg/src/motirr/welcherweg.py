"""Which-path atom interference: fringes, path-monitoring decoherence, visibility.

Ultracold metastable atoms fall through a double slit onto a detector plane;
each velocity group forms optical-style fringes at its de Broglie wavelength,
evaluated at the gravity-corrected arrival speed. A co-falling ring resonator
monitors the slit region: an atom whose path becomes known ("tagged", with
probability ``tagging_probability`` per transit) is drawn from the incoherent
single-slit mixture instead of the coherent two-slit density, so the fringe
contrast degrades linearly with the tagging probability.

The decoherence model is binary — an atom is either fully tagged or untouched
— mirroring the discrete nature of a reflected-port click. Densities live on
a finite screen support (default ±2 fringe periods) and are truncated and
renormalized there; atoms are drawn by inverse CDF on a dense tabulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ContractViolationError, ParameterError, ResolutionError
from .resonator import ResonatorParams, efficiency_closed_form

PLANCK_H = 6.62607015e-34          # Planck constant [J s], exact
ATOMIC_MASS_KG = 1.66053906660e-27  # unified atomic mass unit [kg]
NEON20_MASS_KG = 20.0 * ATOMIC_MASS_KG

_DENSITY_GRID_POINTS = 2 ** 14      # inverse-CDF tabulation resolution
_DEFAULT_SUPPORT_PERIODS = 2.0      # screen half-width in fringe periods
_MIN_BINS_PER_PERIOD = 8

MODE_MONITORED = "monitored"
MODE_UNMONITORED = "unmonitored"


@dataclass(frozen=True)
class VelocityGroup:
    """A free-falling velocity class of atoms.

    ``speed_at_screen`` is the arrival speed used for the de Broglie
    wavelength. If ``initial_speed`` is supplied, the arrival speed is
    re-derived as v0 + g * fall_time (the gravity chirp) and the stored
    value is ignored for wavelength purposes.
    """

    mass: float = NEON20_MASS_KG       # [kg]
    speed_at_screen: float = 2.0       # [m/s]
    fall_time: float = 0.1             # [s]
    cycle_period: float = 0.4          # [s]
    initial_speed: Optional[float] = None  # [m/s]

    def __post_init__(self) -> None:
        for name in ("mass", "speed_at_screen", "fall_time", "cycle_period"):
            v = getattr(self, name)
            if v <= 0.0:
                raise ParameterError(f"{name} must be positive, got {v}")
        if self.initial_speed is not None and self.initial_speed <= 0.0:
            raise ParameterError(f"initial_speed must be positive, got {self.initial_speed}")


@dataclass(frozen=True)
class DoubleSlitGeometry:
    """Double-slit and screen geometry (optical-analogy parameters)."""

    slit_separation: float = 6e-6          # [m]
    slit_width: float = 2e-6               # [m]
    slit_to_screen_distance: float = 0.85  # [m]
    gravity: float = 9.81                  # [m/s^2]

    def __post_init__(self) -> None:
        if not 0.0 < self.slit_width < self.slit_separation:
            raise ParameterError(
                f"need 0 < slit_width < slit_separation, got "
                f"{self.slit_width} vs {self.slit_separation}")
        if self.slit_to_screen_distance <= 0.0:
            raise ParameterError(
                f"slit_to_screen_distance must be positive, got {self.slit_to_screen_distance}")
        if self.gravity < 0.0:
            raise ParameterError(f"gravity must be >= 0, got {self.gravity}")


@dataclass(frozen=True)
class PathMonitor:
    """The co-falling resonator that can tag an atom's slit choice."""

    resonator: ResonatorParams = ResonatorParams()
    n_fibers: int = 300
    tagging_probability: float = 1.0

    def __post_init__(self) -> None:
        if self.n_fibers < 1:
            raise ParameterError(f"n_fibers must be >= 1, got {self.n_fibers}")
        if not 0.0 <= self.tagging_probability <= 1.0:
            raise ParameterError(
                f"tagging_probability must be in [0, 1], got {self.tagging_probability}")

    @property
    def photon_hit_probability(self) -> float:
        """Per-transit probability of a photon striking the atom: R(1-R)."""
        r = self.resonator.reflectivity
        return r * (1.0 - r)

    @property
    def false_dr_probability(self) -> float:
        """Reflected-port click probability with nothing in the cavity."""
        return efficiency_closed_form(self.resonator.reflectivity, self.resonator.round_trips)


@dataclass(frozen=True)
class FringePattern:
    """Binned atom arrivals on the screen plus the metadata needed to read them."""

    bin_edges: np.ndarray   # [m], strictly increasing, len = bins + 1
    counts: np.ndarray      # integer counts per bin
    n_atoms: int
    mode: str               # MODE_MONITORED or MODE_UNMONITORED
    geometry: DoubleSlitGeometry
    group: VelocityGroup
    p_tag: float

    def __post_init__(self) -> None:
        if self.mode not in (MODE_MONITORED, MODE_UNMONITORED):
            raise ParameterError(f"unknown mode {self.mode!r}")
        if np.any(np.diff(self.bin_edges) <= 0.0):
            raise ContractViolationError("bin_edges must be strictly increasing")
        if int(self.counts.sum()) != self.n_atoms:
            raise ContractViolationError(
                f"counts sum to {int(self.counts.sum())}, expected n_atoms={self.n_atoms}")

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


def de_broglie_wavelength(mass: float, speed: float) -> float:
    """lambda = h / (m v) [m]."""
    if mass <= 0.0:
        raise ParameterError(f"mass must be positive, got {mass}")
    if speed <= 0.0:
        raise ParameterError(f"speed must be positive, got {speed}")
    return PLANCK_H / (mass * speed)


def screen_speed(group: VelocityGroup, geometry: DoubleSlitGeometry) -> float:
    """Arrival speed at the screen: v0 + g * fall_time when the caller gave
    the initial speed, else the stored speed_at_screen."""
    if group.initial_speed is not None:
        return group.initial_speed + geometry.gravity * group.fall_time
    return group.speed_at_screen


def gravity_correction_factor(group: VelocityGroup, geometry: DoubleSlitGeometry) -> float:
    """The acceleration factor v_screen / v0 applied to the optical formula.

    When only the arrival speed is known, v0 is back-computed as
    v_screen - g * fall_time; a non-positive v0 yields +inf.
    """
    v_screen = screen_speed(group, geometry)
    if group.initial_speed is not None:
        v0 = group.initial_speed
    else:
        v0 = v_screen - geometry.gravity * group.fall_time
    if v0 <= 0.0:
        return math.inf
    return v_screen / v0


def effective_wavelength(group: VelocityGroup, geometry: DoubleSlitGeometry) -> float:
    """De Broglie wavelength at the gravity-corrected arrival speed."""
    return de_broglie_wavelength(group.mass, screen_speed(group, geometry))


def fringe_period(geometry: DoubleSlitGeometry, group: VelocityGroup) -> float:
    """Spacing of the cos^2 fringes on the screen: lambda_eff z / d."""
    lam = effective_wavelength(group, geometry)
    return lam * geometry.slit_to_screen_distance / geometry.slit_separation


def slit_envelope(x, geometry: DoubleSlitGeometry, group: VelocityGroup):
    """Single-slit envelope sinc^2(pi w x / (lambda_eff z)).

    The two slits' envelopes coincide on the screen axis in the Fraunhofer
    regime (slit offset << fringe scale), so this also serves as the
    equal-weight incoherent two-slit intensity.
    """
    lam = effective_wavelength(group, geometry)
    a = geometry.slit_width * np.asarray(x) / (lam * geometry.slit_to_screen_distance)
    return np.sinc(a) ** 2


def fringe_intensity(x, geometry: DoubleSlitGeometry, group: VelocityGroup):
    """Relative two-slit intensity E(x) cos^2(pi d x / (lambda_eff z))."""
    lam = effective_wavelength(group, geometry)
    arg = (math.pi * geometry.slit_separation / (lam * geometry.slit_to_screen_distance)) \
        * np.asarray(x)
    return slit_envelope(x, geometry, group) * np.cos(arg) ** 2


def default_support_halfwidth(geometry: DoubleSlitGeometry, group: VelocityGroup) -> float:
    return _DEFAULT_SUPPORT_PERIODS * fringe_period(geometry, group)


def _density_grid(geometry, group, support_halfwidth):
    return np.linspace(-support_halfwidth, support_halfwidth, _DENSITY_GRID_POINTS)


def _normalize(grid: np.ndarray, values: np.ndarray) -> np.ndarray:
    total = np.trapezoid(values, grid)
    if total <= 0.0:
        raise ContractViolationError("density integrates to zero on the support")
    return values / total


def coherent_density(x, geometry, group, support_halfwidth=None):
    """Two-slit arrival density, truncated and renormalized on the support."""
    if support_halfwidth is None:
        support_halfwidth = default_support_halfwidth(geometry, group)
    grid = _density_grid(geometry, group, support_halfwidth)
    norm = np.trapezoid(fringe_intensity(grid, geometry, group), grid)
    return fringe_intensity(x, geometry, group) / norm


def incoherent_density(x, geometry, group, support_halfwidth=None):
    """Equal-weight single-slit mixture density on the same support."""
    if support_halfwidth is None:
        support_halfwidth = default_support_halfwidth(geometry, group)
    grid = _density_grid(geometry, group, support_halfwidth)
    norm = np.trapezoid(slit_envelope(grid, geometry, group), grid)
    return slit_envelope(x, geometry, group) / norm


def _inverse_cdf_table(grid: np.ndarray, density: np.ndarray):
    dx = np.diff(grid)
    cdf = np.concatenate(([0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * dx)))
    cdf /= cdf[-1]
    return cdf


def sample_arrivals(geometry: DoubleSlitGeometry, group: VelocityGroup,
                    monitor: Optional[PathMonitor], n_atoms: int,
                    rng: np.random.Generator,
                    support_halfwidth: Optional[float] = None) -> np.ndarray:
    """Draw atom arrival positions on the screen.

    Untagged atoms come from the coherent two-slit density; tagged atoms
    (probability ``monitor.tagging_probability``, never without a monitor)
    from the incoherent single-slit mixture. Atom i consumes uniforms 2i
    (tag) and 2i + 1 (position), so with a counter-based generator the draws
    are per-atom substreams: a prefix of the batch is reproducible no matter
    how many atoms follow it.
    """
    if n_atoms < 1:
        raise ParameterError(f"n_atoms must be >= 1, got {n_atoms}")
    if support_halfwidth is None:
        support_halfwidth = default_support_halfwidth(geometry, group)
    if support_halfwidth <= 0.0:
        raise ParameterError(f"support_halfwidth must be positive, got {support_halfwidth}")

    grid = _density_grid(geometry, group, support_halfwidth)
    coh = _normalize(grid, fringe_intensity(grid, geometry, group))
    inc = _normalize(grid, slit_envelope(grid, geometry, group))
    cdf_coh = _inverse_cdf_table(grid, coh)
    cdf_inc = _inverse_cdf_table(grid, inc)

    p_tag = monitor.tagging_probability if monitor is not None else 0.0
    u = rng.random((n_atoms, 2))
    tagged = u[:, 0] < p_tag
    return np.where(tagged,
                    np.interp(u[:, 1], cdf_inc, grid),
                    np.interp(u[:, 1], cdf_coh, grid))


def simulate_run(geometry: DoubleSlitGeometry, group: VelocityGroup,
                 monitor: Optional[PathMonitor], n_atoms: int, bins: int,
                 rng: np.random.Generator,
                 support_halfwidth: Optional[float] = None) -> FringePattern:
    """Sample atom arrivals (see :func:`sample_arrivals`) and histogram them."""
    if bins < 2:
        raise ContractViolationError(f"need at least 2 bins, got {bins}")
    if support_halfwidth is None:
        support_halfwidth = default_support_halfwidth(geometry, group)
    positions = sample_arrivals(geometry, group, monitor, n_atoms, rng, support_halfwidth)
    edges = np.linspace(-support_halfwidth, support_halfwidth, bins + 1)
    counts, _ = np.histogram(positions, bins=edges)
    return FringePattern(
        bin_edges=edges,
        counts=counts,
        n_atoms=n_atoms,
        mode=MODE_MONITORED if monitor is not None else MODE_UNMONITORED,
        geometry=geometry,
        group=group,
        p_tag=monitor.tagging_probability if monitor is not None else 0.0,
    )


def _visibility_fit(centers, values, variances, period):
    """Weighted LSQ of A + C cos(2 pi x / period); returns V = C/A and its SE.

    V = C/A is (Imax - Imin)/(Imax + Imin) for the fitted central-fringe
    maximum A + C and adjacent minimum A - C.
    """
    cosx = np.cos(2.0 * math.pi * centers / period)
    design = np.column_stack([np.ones_like(cosx), cosx])
    w = 1.0 / variances
    xtwx = design.T @ (design * w[:, None])
    xtwy = design.T @ (w * values)
    try:
        cov = np.linalg.inv(xtwx)
    except np.linalg.LinAlgError as exc:
        raise ResolutionError("degenerate visibility fit (too few usable bins)") from exc
    a, c = cov @ xtwy
    if a <= 0.0:
        raise ResolutionError("fitted mean intensity is not positive")
    v = c / a
    var_v = (cov[1, 1] / a ** 2
             + (c ** 2 / a ** 4) * cov[0, 0]
             - 2.0 * (c / a ** 3) * cov[0, 1])
    return float(v), float(math.sqrt(max(var_v, 0.0)))


def visibility_with_stderr(pattern: FringePattern) -> tuple[float, float]:
    """Fringe visibility of a sampled pattern, with its standard error.

    The histogram is envelope-normalized, then the central fringe and its
    adjacent minima (|x| <= 3/4 period) determine Imax and Imin through a
    two-parameter cosine fit; V = (Imax - Imin)/(Imax + Imin).
    """
    geometry, group = pattern.geometry, pattern.group
    period = fringe_period(geometry, group)
    edges = pattern.bin_edges
    support = edges[-1] - edges[0]
    if support < period:
        raise ResolutionError(
            f"screen support {support} narrower than one fringe period {period}")
    bin_width = support / (len(edges) - 1)
    if period / bin_width < _MIN_BINS_PER_PERIOD:
        raise ResolutionError(
            f"need >= {_MIN_BINS_PER_PERIOD} bins per fringe period, have "
            f"{period / bin_width:.2f}")

    centers = pattern.bin_centers
    sel = np.abs(centers) <= 0.75 * period
    if int(sel.sum()) < 4:
        raise ResolutionError("fewer than 4 bins on the central fringe")
    env_mass = slit_envelope(centers[sel], geometry, group) * bin_width
    counts = pattern.counts[sel].astype(float)
    values = counts / env_mass
    variances = np.maximum(counts, 1.0) / env_mass ** 2  # Poisson
    return _visibility_fit(centers[sel], values, variances, period)


def visibility(pattern: FringePattern) -> float:
    """V = (Imax - Imin)/(Imax + Imin) from the central fringe; see
    :func:`visibility_with_stderr` for the error estimate."""
    return visibility_with_stderr(pattern)[0]


def profile_visibility(geometry: DoubleSlitGeometry, group: VelocityGroup,
                       p_tag: float, support_halfwidth: Optional[float] = None) -> float:
    """Visibility of the closed-form (infinite-statistics) mixture profile.

    Evaluates the envelope-normalized mixture density exactly at the central
    maximum and the adjacent minimum: 1 for the coherent profile, 0 for the
    incoherent one, and ~(1 - p_tag) in between.
    """
    if not 0.0 <= p_tag <= 1.0:
        raise ParameterError(f"p_tag must be in [0, 1], got {p_tag}")
    if support_halfwidth is None:
        support_halfwidth = default_support_halfwidth(geometry, group)
    grid = _density_grid(geometry, group, support_halfwidth)
    norm_coh = np.trapezoid(fringe_intensity(grid, geometry, group), grid)
    norm_inc = np.trapezoid(slit_envelope(grid, geometry, group), grid)
    period = fringe_period(geometry, group)
    lam = effective_wavelength(group, geometry)
    karg = math.pi * geometry.slit_separation / (lam * geometry.slit_to_screen_distance)

    def normalized(x: float) -> float:
        # mixture density / envelope at a point
        return (p_tag / norm_inc
                + (1.0 - p_tag) * math.cos(karg * x) ** 2 / norm_coh)

    i_max = normalized(0.0)
    i_min = normalized(period / 2.0)
    return float((i_max - i_min) / (i_max + i_min))


@dataclass(frozen=True)
class MonitoringBudget:
    """Operating numbers for a which-path monitoring campaign."""

    photon_hit_probability: float
    false_dr_probability: float
    target_successes: int
    minimum_time_seconds: float     # one tagging success per cycle
    expected_cycles: float          # target / tagging_probability
    expected_time_seconds: float


def monitoring_budget(monitor: PathMonitor, group: VelocityGroup,
                      target_successes: int = 1000) -> MonitoringBudget:
    """Per-transit probabilities and the wall-clock cost of collecting the
    target number of successful which-path detections."""
    if target_successes < 1:
        raise ParameterError(f"target_successes must be >= 1, got {target_successes}")
    p_tag = monitor.tagging_probability
    expected_cycles = math.inf if p_tag == 0.0 else target_successes / p_tag
    return MonitoringBudget(
        photon_hit_probability=monitor.photon_hit_probability,
        false_dr_probability=monitor.false_dr_probability,
        target_successes=target_successes,
        minimum_time_seconds=target_successes * group.cycle_period,
        expected_cycles=expected_cycles,
        expected_time_seconds=expected_cycles * group.cycle_period,
    )
