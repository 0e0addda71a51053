"""Resonator core: round-trip amplitudes, both efficiency routes, feasibility math."""

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from motirr import (
    C_VACUUM,
    DetuningState,
    ParameterError,
    ResonatorParams,
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

GRID_R = (0.0, 0.25, 0.5, 0.9, 0.95, 0.99, 0.995, 0.999, 1.0)


def eta_closed_form_fraction(r: Fraction, n: int) -> Fraction:
    """Independent exact-rational evaluation of the closed form, as printed."""
    bracket = r ** (2 * n) - 1
    for j in range(1, n + 1):
        bracket += 2 * (1 + r ** (2 * n - 2 * j + 1)) * r ** (j - 1)
    return 1 - Fraction(1 - r, 1 + r) * bracket


class TestResonatorParams:
    def test_defaults_are_consistent(self):
        p = ResonatorParams()
        assert p.round_trip_time == pytest.approx(0.04 / C_VACUUM, rel=1e-15)
        assert p.wavelength == pytest.approx(500e-9, rel=1e-12)
        assert p.resonance_frequency == pytest.approx(
            2 * math.pi * p.mode_number / p.round_trip_time, rel=1e-15)

    def test_supplied_round_trip_time_validated(self):
        t = 0.04 * 1.5 / C_VACUUM
        p = ResonatorParams(effective_index=1.5, round_trip_time=t)
        assert p.round_trip_time == t
        with pytest.raises(ParameterError):
            ResonatorParams(effective_index=1.5, round_trip_time=t * 1.01)

    @pytest.mark.parametrize("kwargs", [
        {"reflectivity": -0.1},
        {"reflectivity": 1.1},
        {"round_trip_length": 0.0},
        {"effective_index": 0.5},
        {"round_trips": -1},
        {"loss_per_round_trip": 1.0},
        {"loss_per_round_trip": -0.2},
        {"mode_number": 0},
    ])
    def test_rejects_out_of_domain(self, kwargs):
        with pytest.raises(ParameterError):
            ResonatorParams(**kwargs)


class TestDetuningPhase:
    def test_on_resonance_is_zero(self):
        p = ResonatorParams()
        assert detuning_phase(p.resonance_frequency, p) == 0.0

    def test_direct_product(self):
        # T = 1e-9 s via L = c * 1e-9; detuning 1e6 rad/s -> psi = 1e-3 rad
        p = ResonatorParams(round_trip_length=C_VACUUM * 1e-9)
        psi = detuning_phase(p.resonance_frequency + 1e6, p)
        assert psi == pytest.approx(1e-3, rel=1e-12)

    def test_two_pi_periodic_phase_factor(self):
        # mode_number=1 keeps omega_res + 2 pi / T representable in double;
        # at optical omega_res the input sum itself absorbs the increment
        p = ResonatorParams(mode_number=1)
        psi = detuning_phase(p.resonance_frequency + 2 * math.pi / p.round_trip_time, p)
        assert abs(cmath.exp(1j * psi) - cmath.exp(0j)) < 1e-12

    def test_no_range_reduction(self):
        p = ResonatorParams()
        omega = p.resonance_frequency + 100 * math.pi / p.round_trip_time
        assert detuning_phase(omega, p) == pytest.approx(100 * math.pi, rel=1e-9)

    def test_detuning_state_invariant(self):
        p = ResonatorParams()
        state = DetuningState.for_input(p.resonance_frequency + 3e5, p)
        assert state.psi == detuning_phase(state.omega, p)


class TestRoundtripAmplitude:
    def test_direct_reflection(self):
        b0 = roundtrip_amplitude(0, 1.0, 0.999)
        assert b0.real == pytest.approx(-math.sqrt(0.999), rel=1e-15)
        assert b0.imag == 0.0

    def test_first_round_trip_on_resonance(self):
        b1 = roundtrip_amplitude(1, 1.0, 0.999, phase=0.0)
        assert b1.real == pytest.approx((1 - 0.999) * math.sqrt(0.999), rel=1e-12)
        assert b1.real == pytest.approx(9.995e-4, rel=1e-3)

    def test_second_trip_matches_sum_oracle(self):
        # expected B2 = B1 * R; cross-checked against the brute-force sum:
        # the sum built term by term must advance by exactly this amount
        b1 = roundtrip_amplitude(1, 1.0, 0.5)
        b2 = roundtrip_amplitude(2, 1.0, 0.5)
        assert b2.real == pytest.approx(0.5 * math.sqrt(0.5) * 0.5, rel=1e-15)
        sums = amplitude_partial_sums(0.5, 2)
        assert sums[2] - sums[1] == b2
        assert b2.real == pytest.approx(b1.real * 0.5, rel=1e-15)

    @pytest.mark.parametrize("r", [0.25, 0.5, 0.95, 0.999])
    def test_signs_on_resonance(self, r):
        assert roundtrip_amplitude(0, 1.0, r).real <= 0.0
        for i in range(1, 50):
            term = roundtrip_amplitude(i, 1.0, r, phase=0.0)
            assert term.real >= 0.0
            assert term.imag == 0.0

    def test_loss_attenuation(self):
        loss = 0.003
        b1 = roundtrip_amplitude(1, 1.0, 0.9, loss=loss)
        assert b1.real == pytest.approx((1 - 0.9) * math.sqrt(0.9) * (1 - loss), rel=1e-14)
        b2 = roundtrip_amplitude(2, 1.0, 0.9, loss=loss)
        assert b2.real == pytest.approx(b1.real * (1 - loss) * 0.9, rel=1e-14)

    def test_phase_rotates_not_scales(self):
        psi = 0.37
        for i in (1, 2, 5):
            rotated = roundtrip_amplitude(i, 1.0, 0.8, phase=psi)
            flat = roundtrip_amplitude(i, 1.0, 0.8, phase=0.0)
            assert abs(rotated) == pytest.approx(abs(flat), rel=1e-13)
            assert rotated == pytest.approx(flat * cmath.exp(1j * psi * i), rel=1e-12)

    @pytest.mark.parametrize("kwargs", [
        {"i": -1, "reflectivity": 0.5},
        {"i": 0, "reflectivity": -0.1},
        {"i": 0, "reflectivity": 1.2},
        {"i": 0, "reflectivity": 0.5, "loss": 1.0},
        {"i": 0, "reflectivity": 0.5, "loss": -0.1},
    ])
    def test_rejects_out_of_domain(self, kwargs):
        i = kwargs.pop("i")
        r = kwargs.pop("reflectivity")
        with pytest.raises(ParameterError):
            roundtrip_amplitude(i, 1.0, r, **kwargs)


class TestEfficiencyClosedForm:
    def test_zero_trips_is_unity(self):
        rng = np.random.default_rng(2024)
        for r in list(GRID_R) + list(rng.random(50)):
            assert efficiency_closed_form(float(r), 0) == 1.0

    def test_decays_after_stated_round_trips(self):
        assert efficiency_closed_form(0.95, 100) <= 1e-4
        assert efficiency_closed_form(0.995, 1000) <= 1e-4

    def test_operating_point_false_positive(self):
        eta = efficiency_closed_form(0.999, 10_013)
        assert 1.8e-9 <= eta <= 2.2e-9

    def test_hidden_identity_on_grid(self):
        worst = 0.0
        for r in GRID_R:
            for n in range(0, 2001):
                worst = max(worst, abs(efficiency_closed_form(r, n) - math.pow(r, 2 * n)))
        assert worst <= 1e-12

    def test_hidden_identity_exact_rationals(self):
        # the simplification proof, run in exact arithmetic
        for r in (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(9, 10), Fraction(1)):
            for n in range(0, 41):
                assert eta_closed_form_fraction(r, n) == r ** (2 * n)

    def test_hidden_identity_symbolic(self):
        sympy = pytest.importorskip("sympy")
        r, n, j = sympy.symbols("r n j", positive=True)
        total = sympy.Sum((1 + r ** (2 * n - 2 * j + 1)) * r ** (j - 1), (j, 1, n)).doit()
        eta = 1 - (1 - r) / (1 + r) * (r ** (2 * n) - 1 + 2 * total)
        residual = sympy.simplify(eta - r ** (2 * n))
        # simplify leaves a piecewise for the removable r = 1 branch; both legs vanish
        if isinstance(residual, sympy.Piecewise):
            for expr, _cond in residual.args:
                assert sympy.simplify(sympy.limit(expr, r, 1)) == 0 or sympy.simplify(expr) == 0
        else:
            assert residual == 0

    def test_monotone_in_n_and_r(self):
        for r in GRID_R:
            values = [efficiency_closed_form(r, n) for n in range(0, 400)]
            assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
        for n in (1, 10, 137, 1200):
            values = [efficiency_closed_form(r, n) for r in GRID_R]
            assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_rejects_out_of_domain(self):
        with pytest.raises(ParameterError):
            efficiency_closed_form(1.5, 10)
        with pytest.raises(ParameterError):
            efficiency_closed_form(0.5, -1)


class TestEfficiencyBruteForce:
    def test_perfect_mirror(self):
        for n in (0, 3, 50):
            assert efficiency_brute_force(1.0, n) == pytest.approx(1.0, abs=1e-12)

    def test_open_coupler(self):
        for n in (0, 5, 40):
            assert efficiency_brute_force(0.0, n) == 0.0

    def test_geometric_sum_value(self):
        # closed-form geometric sum: B = -sqrt(R) R^n, magnitude squared R^(2n+1)
        assert efficiency_brute_force(0.95, 100) == pytest.approx(math.pow(0.95, 201), abs=1e-12)
        assert efficiency_brute_force(0.95, 100) == pytest.approx(3.3e-5, rel=0.02)

    def test_oracle_identity_on_grid(self):
        worst = 0.0
        for r in GRID_R:
            sums = amplitude_partial_sums(r, 2000)
            for n in range(0, 2001):
                b = sums[n]
                worst = max(worst, abs(b.real * b.real + b.imag * b.imag - math.pow(r, 2 * n + 1)))
        assert worst <= 1e-12

    def test_matches_partial_sums_bitwise(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            r = float(rng.random())
            n = int(rng.integers(0, 300))
            sums = amplitude_partial_sums(r, n)
            b = sums[n]
            assert efficiency_brute_force(r, n) == b.real * b.real + b.imag * b.imag

    def test_factor_r_discrepancy_is_reported(self):
        # brute force trails the closed form by exactly one factor of R
        mismatches = []
        for r in (0.5, 0.95, 0.999):
            for n in (1, 10, 100):
                cf = efficiency_closed_form(r, n)
                bf = efficiency_brute_force(r, n)
                assert abs(bf - r * cf) <= 1e-12
                mismatches.append((r, n, cf, bf))
        print("\nfactor-R discrepancy (closed form vs amplitude-sum oracle):")
        for r, n, cf, bf in mismatches:
            print(f"  R={r} n={n}: closed={cf:.6e} (R^2n) vs brute={bf:.6e} (R^(2n+1))")

    def test_sum_linearity_exact(self):
        for r, psi, loss in [(0.7, 0.0, 0.0), (0.95, 0.3, 0.0), (0.5, 1.1, 0.01)]:
            sums = amplitude_partial_sums(r, 60, phase=psi, loss=loss)
            for n in range(1, 61):
                assert sums[n] == sums[n - 1] + roundtrip_amplitude(n, 1.0, r, psi, loss)


class TestEfficiencySweep:
    def test_default_figure_curves(self):
        r_list = [0.95, 0.99, 0.995, 0.997, 0.998]
        rows = efficiency_sweep(r_list, 2000)
        assert len(rows) == 5 * 2001
        by_r = {r: [row for row in rows if row.reflectivity == r] for r in r_list}
        for r in r_list:
            etas = [row.eta_closed_form for row in by_r[r]]
            assert etas[0] == 1.0
            assert all(b <= a for a, b in zip(etas, etas[1:]))  # non-increasing
            assert min(etas) < 1e-3  # decays within the plotted range
        # strictly ordered by R at every n >= 1
        for n in range(1, 2001):
            col = [by_r[r][n].eta_closed_form for r in r_list]
            assert all(b > a for a, b in zip(col, col[1:]))

    def test_against_direct_power(self):
        rows = efficiency_sweep([0.995], 1000)
        eta = rows[-1].eta_closed_form
        assert rows[-1].round_trips == 1000
        assert eta == pytest.approx(math.pow(0.995, 2000), rel=1e-9)
        assert eta == pytest.approx(4.4e-5, rel=0.01)

    def test_brute_column_is_the_raw_oracle(self):
        rows = efficiency_sweep([0.9], 50)
        for row in rows:
            assert row.eta_brute_force == efficiency_brute_force(0.9, row.round_trips)

    def test_empty_list_gives_empty_table(self):
        assert efficiency_sweep([], 100) == []

    def test_rejects_bad_inputs(self):
        with pytest.raises(ParameterError):
            efficiency_sweep([0.5], 0)
        with pytest.raises(ParameterError):
            efficiency_sweep([1.5], 10)


class TestFeasibility:
    def test_coherence_budget(self):
        assert max_round_trips_from_coherence(3e5, 0.04) == 7_500_000
        assert max_round_trips_from_coherence(0.04, 0.04) == 1
        assert max_round_trips_from_coherence(0.02, 0.04) == 0

    def test_coherence_budget_rejects_nonpositive(self):
        with pytest.raises(ParameterError):
            max_round_trips_from_coherence(0.0, 0.04)
        with pytest.raises(ParameterError):
            max_round_trips_from_coherence(1.0, -0.1)

    def test_round_trip_time(self):
        t = round_trip_time(0.04, 1.0)
        assert t == 0.04 / C_VACUUM
        assert t == pytest.approx(1.334e-10, rel=1e-3)
        assert round_trip_time(0.04, 1.5) == pytest.approx(1.5 * t, rel=1e-15)
        with pytest.raises(ParameterError):
            round_trip_time(0.0)
        with pytest.raises(ParameterError):
            round_trip_time(0.04, 0.9)

    def test_pulse_spans_round_trip(self):
        for index in (1.0, 1.5):
            ratio = pulse_round_trip_ratio(250e-12, round_trip_time(0.04, index))
            assert ratio >= 1.0
        assert pulse_round_trip_ratio(250e-12, round_trip_time(0.04, 1.0)) == pytest.approx(
            1.8737, rel=1e-3)
