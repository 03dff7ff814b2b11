import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slowsol.analytic import (
    BackgroundField,
    SolitonParams,
    apply_polarization_frame,
    evaluate_soliton,
    launch_pulse,
    soliton_length_and_loss,
    soliton_velocity,
    stokes,
)
from slowsol.core import MediumProfile, make_detuning_distribution
from slowsol.errors import GridError, UnitaryError

SHARP = make_detuning_distribution("sharp")


def reference_params(q0=0.0, phi0=0.0):
    return SolitonParams.from_polar(10.0, 0.4 * math.pi, q0, phi0)


def constant_background(omega=0.5, half_span=600.0, n=2001):
    return BackgroundField.constant(omega, -half_span, half_span, n)


def unitary(alpha, beta, gamma, delta):
    """2x2 unitary from four angles (ZYZ decomposition times a phase)."""
    ca, sa = math.cos(alpha), math.sin(alpha)
    rot = np.array([[ca, -sa], [sa, ca]], dtype=complex)
    phases = np.diag([np.exp(1j * beta), np.exp(1j * gamma)])
    return np.exp(1j * delta) * phases @ rot


class TestClosedForm:
    def test_reference_point(self):
        # at Q = 0 the field split is set by the spectral argument alone
        params = reference_params()
        bg = constant_background()
        state = evaluate_soliton(params, bg, None, SHARP, 0.0, 0.0)
        ip = abs(state.omega_p / 0.5) ** 2
        im = abs(state.omega_m / 0.5) ** 2
        assert ip == pytest.approx(params.xi**2 / 100.0, abs=1e-12)
        assert im == pytest.approx(params.eta**2 / 100.0, abs=1e-12)
        assert ip + im == pytest.approx(1.0, abs=1e-12)
        assert complex(state.omega_p) == pytest.approx(
            0.5 * params.xi / (params.xi + 1j * params.eta), abs=1e-12
        )

    def test_dark_state_ahead(self):
        # Q -> -inf: plus-polarized field, atoms in the minus ground state
        params = reference_params(q0=-40.0)
        bg = constant_background()
        state = evaluate_soliton(params, bg, None, SHARP, 0.0, 0.0)
        assert abs(state.omega_p - 0.5) <= 1e-12
        assert abs(state.omega_m) <= 1e-12
        assert abs(state.psi_p[0]) <= 1e-12
        assert abs(abs(state.psi_m[0]) - 1.0) <= 1e-12

    def test_geometric_phase_behind(self):
        params = reference_params(q0=40.0)
        bg = constant_background()
        state = evaluate_soliton(params, bg, None, SHARP, 0.0, 0.0)
        phase = np.angle(complex(state.omega_p) / 0.5)
        expected = -2.0 * params.theta
        wrapped = (phase - expected + math.pi) % (2 * math.pi) - math.pi
        assert abs(wrapped) <= 1e-9

    @settings(max_examples=60, deadline=None)
    @given(
        modulus=st.floats(0.5, 100.0),
        argument=st.floats(0.05, math.pi - 0.05),
        q=st.floats(-30.0, 30.0),
        phi=st.floats(-10.0, 10.0),
    )
    def test_intensity_identity(self, modulus, argument, q, phi):
        # |phi_+|^2 + |phi_-|^2 = 1 for any twist coordinate and phase
        xi = modulus * math.cos(argument)
        eta = modulus * math.sin(argument)
        lam = xi + 1j * eta
        phi_p = (xi - 1j * eta * math.tanh(q)) / lam
        phi_m = eta * np.exp(-1j * phi) / (math.cosh(q) * lam)
        assert abs(phi_p) ** 2 + abs(phi_m) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_dark_residual_on_resonance(self):
        # Omega_+ psi_+ + Omega_- psi_- vanishes identically at zero detuning
        params = reference_params()
        bg = constant_background()
        tau = np.linspace(-500.0, 500.0, 401)
        state = evaluate_soliton(params, bg, None, SHARP, tau, 0.0)
        resid = (
            state.omega_p[:, None] * state.psi_p
            + state.omega_m[:, None] * state.psi_m
        )
        assert np.max(np.abs(resid)) <= 1e-12

    def test_atomic_norm_scaling(self):
        # norm deviation is |psi_e|^2, bounded by C * r with C frozen
        bg = constant_background()
        tau = np.linspace(-500.0, 500.0, 801)

        def bound(modulus):
            p = SolitonParams.from_polar(modulus, 0.4 * math.pi)
            st_ = evaluate_soliton(p, bg, None, SHARP, tau, 0.0)
            norm = (
                np.abs(st_.psi_p) ** 2
                + np.abs(st_.psi_m) ** 2
                + np.abs(st_.psi_e) ** 2
            )
            return float(np.max(np.abs(norm - 1.0)))

        r = 0.25 / 100.0
        b10, b14 = bound(10.0), bound(10.0 * math.sqrt(2.0))
        assert b10 <= 0.3 * r
        assert b14 <= 0.55 * b10

    def test_tau_outside_grid(self):
        params = reference_params()
        bg = constant_background(half_span=10.0)
        with pytest.raises(GridError):
            evaluate_soliton(params, bg, None, SHARP, 50.0, 0.0)


class TestBackgroundField:
    def test_intensity_anchor(self):
        bg = constant_background(omega=0.5)
        assert bg.intensity_integral_at(0.0) == pytest.approx(0.0, abs=1e-15)
        assert bg.intensity_integral_at(8.0) == pytest.approx(0.25 * 8.0)
        assert bg.intensity_integral_at(-8.0) == pytest.approx(-0.25 * 8.0)

    def test_grid_must_span_zero(self):
        with pytest.raises(GridError):
            BackgroundField.constant(0.5, 5.0, 10.0, 11)

    def test_nonuniform_grid_rejected(self):
        tau = np.array([0.0, 1.0, 3.0])
        with pytest.raises(GridError):
            BackgroundField(tau, np.ones(3, dtype=complex))


class TestPolarizationFrame:
    def test_identity(self):
        params = reference_params()
        bg = constant_background()
        state = evaluate_soliton(params, bg, None, SHARP, 0.0, 0.0)
        out = apply_polarization_frame(np.eye(2), state)
        assert complex(out.omega_p) == complex(state.omega_p)
        assert complex(out.omega_m) == complex(state.omega_m)

    def test_swap(self):
        params = reference_params()
        bg = constant_background()
        state = evaluate_soliton(params, bg, None, SHARP, 0.0, 0.0)
        swap = np.array([[0.0, 1.0], [1.0, 0.0]])
        out = apply_polarization_frame(swap, state)
        assert complex(out.omega_p) == pytest.approx(complex(state.omega_m))
        assert complex(out.omega_m) == pytest.approx(complex(state.omega_p))

    def test_non_unitary_rejected(self):
        params = reference_params()
        bg = constant_background()
        state = evaluate_soliton(params, bg, None, SHARP, 0.0, 0.0)
        with pytest.raises(UnitaryError):
            apply_polarization_frame(np.array([[1.0, 0.0], [0.0, 2.0]]), state)

    @settings(max_examples=100, deadline=None)
    @given(
        alpha=st.floats(0.0, 2 * math.pi),
        beta=st.floats(0.0, 2 * math.pi),
        gamma=st.floats(0.0, 2 * math.pi),
        delta=st.floats(0.0, 2 * math.pi),
        tau=st.floats(-400.0, 400.0),
    )
    def test_frame_invariants(self, alpha, beta, gamma, delta, tau):
        # intensity and the dark-state bilinear survive any frame change
        params = reference_params()
        bg = constant_background()
        state = evaluate_soliton(params, bg, None, SHARP, tau, 0.0)
        b = unitary(alpha, beta, gamma, delta)
        out = apply_polarization_frame(b, state)
        i_in = abs(state.omega_p) ** 2 + abs(state.omega_m) ** 2
        i_out = abs(out.omega_p) ** 2 + abs(out.omega_m) ** 2
        assert i_out == pytest.approx(float(i_in), rel=1e-12)
        dark_in = state.omega_p * state.psi_p[0] + state.omega_m * state.psi_m[0]
        dark_out = out.omega_p * out.psi_p[0] + out.omega_m * out.psi_m[0]
        assert abs(complex(dark_out - dark_in)) <= 1e-12


class TestStokes:
    def test_pure_circular(self):
        rec = stokes(1.0, 0.0)
        assert (rec.s0, rec.s1, rec.s2, rec.s3) == (1.0, 0.0, 0.0, 1.0)

    def test_equal_superposition(self):
        rec = stokes(1 / math.sqrt(2), 1 / math.sqrt(2))
        assert rec.s0 == pytest.approx(1.0)
        assert rec.s1 == pytest.approx(1.0)
        assert rec.s2 == pytest.approx(0.0, abs=1e-15)
        assert rec.s3 == pytest.approx(0.0, abs=1e-15)

    def test_handedness_flip(self):
        rec = stokes(0.3 + 0.1j, 0.2 - 0.4j, handedness=-1)
        ref = stokes(0.3 + 0.1j, 0.2 - 0.4j)
        assert rec.s2 == -ref.s2 and rec.s3 == -ref.s3
        assert rec.s0 == ref.s0 and rec.s1 == ref.s1

    @settings(max_examples=100, deadline=None)
    @given(
        re_p=st.floats(-5, 5), im_p=st.floats(-5, 5),
        re_m=st.floats(-5, 5), im_m=st.floats(-5, 5),
    )
    def test_full_polarization(self, re_p, im_p, re_m, im_m):
        rec = stokes(re_p + 1j * im_p, re_m + 1j * im_m)
        lhs = rec.s1**2 + rec.s2**2 + rec.s3**2
        assert lhs == pytest.approx(float(rec.s0) ** 2, rel=1e-10, abs=1e-20)

    def test_twist_depth_follows_spectral_argument(self):
        # deepest s3/s0 equals cos(2 theta); the opposite pole is
        # reached exactly at theta = pi/2
        bg = constant_background()
        tau = np.linspace(-500.0, 500.0, 2001)
        for frac in (0.25, 0.4, 0.5, 0.6):
            p = SolitonParams.from_polar(10.0, frac * math.pi)
            st_ = evaluate_soliton(p, bg, None, SHARP, tau, 0.0)
            rec = stokes(st_.omega_p, st_.omega_m)
            depth = float(np.min(rec.s3 / rec.s0))
            assert depth == pytest.approx(math.cos(2 * p.theta), abs=1e-6)
        pole = SolitonParams.from_polar(10.0, 0.5 * math.pi)
        st_ = evaluate_soliton(pole, bg, None, SHARP, tau, 0.0)
        rec = stokes(st_.omega_p, st_.omega_m)
        assert float(np.min(rec.s3 / rec.s0)) <= -1.0 + 1e-6


class TestVelocityLengthLoss:
    def test_sharp_line_collapse(self):
        params = reference_params()
        assert soliton_velocity(params, 50.0, SHARP, 0.25) == pytest.approx(
            2.5e-3, rel=1e-12
        )

    def test_narrow_gaussian_close_to_sharp(self):
        params = reference_params()
        nu = make_detuning_distribution("gaussian", 0.5, 21)
        v = soliton_velocity(params, 50.0, nu, 0.25)
        assert v == pytest.approx(2.5e-3, rel=1e-2)

    def test_track_slope_matches_velocity(self):
        # the tau location of Q = 0 drifts at dtau/dzeta = 2 g / |O|^2,
        # i.e. c/v - 1 for the exact lab-frame speed
        params = reference_params()
        g = 50.0
        omega = 0.5
        bg = constant_background(half_span=6000.0, n=1201)
        med = MediumProfile.uniform(g, 20.0)
        zetas = np.linspace(0.5, 10.0, 13)
        taus = []
        for z in zetas:
            coupling = 2.0 * g * z
            taus.append(coupling / omega**2)
            state = evaluate_soliton(params, bg, med, SHARP, taus[-1], z)
            assert abs(float(state.q)) <= 1e-8
        slope = np.polyfit(zetas, taus, 1)[0]
        assert slope == pytest.approx(2.0 * g / omega**2, rel=1e-8)

    def test_length_worked_example(self):
        params = reference_params()
        g = 50.0
        v = soliton_velocity(params, g, SHARP, 0.25)
        out = soliton_length_and_loss(
            params, g, SHARP, 0.25, v, 1e18, 5.89e-7, 1e-2
        )
        ls_c_us = 2.0 * params.spectral_sq / (params.eta * g)
        assert out.length_c_us == pytest.approx(ls_c_us, rel=1e-12)
        assert out.length_m == pytest.approx(126.089, rel=1e-4)

    def test_loss_worked_example(self):
        # direct arithmetic: nl^3 = 1, l = 1e-2 m, lambda = 5e-7 m,
        # ls = 1e-3 m gives 32 pi * 5e-3
        lam = 5e-7
        density = 1.0 / lam**3
        params = reference_params()
        out = soliton_length_and_loss(
            params, 50.0, SHARP, 0.25, None, density, lam, 1e-2
        )
        scale = (out.length_m / 1e-3) ** 2
        assert out.fractional_loss * scale == pytest.approx(
            32 * math.pi * 5e-3, rel=1e-9
        )

    def test_loss_inverse_square(self):
        lam = 5.89e-7
        params = reference_params()
        a = soliton_length_and_loss(params, 50.0, SHARP, 0.25, None, 1e18, lam, 1e-2)
        b = soliton_length_and_loss(params, 200.0, SHARP, 0.25, None, 1e18, lam, 1e-2)
        # quadrupling g quarters v and ls; loss scales as 1/ls^2
        assert b.length_m == pytest.approx(a.length_m / 4.0, rel=1e-12)
        assert b.fractional_loss == pytest.approx(16.0 * a.fractional_loss, rel=1e-12)


class TestLaunchPulse:
    def test_soliton_outside_window(self):
        params = reference_params(q0=-80.0)
        bg = constant_background(half_span=50.0, n=201)
        tau = np.linspace(-50.0, 50.0, 201)
        lp, lm = launch_pulse(params, bg, tau)
        assert np.max(np.abs(lp - 0.5)) <= 1e-12
        assert np.max(np.abs(lm)) <= 1e-12

    def test_total_intensity(self):
        params = reference_params()
        bg = constant_background()
        tau = np.linspace(-550.0, 550.0, 1501)
        lp, lm = launch_pulse(params, bg, tau)
        total = np.abs(lp) ** 2 + np.abs(lm) ** 2
        assert np.max(np.abs(total - 0.25)) <= 1e-12
