"""Closed-form slow-light soliton and its derived observables.

The soliton rides on a uniformly polarized background with complex
envelope Omega(tau).  Its internal coordinate Q and phase Phi
accumulate the background intensity in retarded time and the coupling
density along the propagation coordinate; the field components are
rational functions of tanh Q and sech Q.  All integration constants
are anchored at tau = 0 and zeta = 0 and absorbed into q0 and phi0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import METERS_PER_C_US, DetuningDistribution, MediumProfile
from .errors import GridError, UnitaryError


@dataclass(frozen=True)
class SolitonParams:
    """The four real soliton constants.

    ``xi + i*eta`` is the complex spectral parameter (MHz); its argument
    theta sets the maximal polarization deviation.  ``q0`` positions the
    twist and ``phi0`` fixes its phase.
    """

    xi: float
    eta: float
    q0: float = 0.0
    phi0: float = 0.0

    def __post_init__(self) -> None:
        if self.eta <= 0.0:
            raise ValueError("eta must be positive (eta = 0 is no soliton)")

    @property
    def theta(self) -> float:
        return math.atan2(self.eta, self.xi)

    @property
    def spectral_sq(self) -> float:
        return self.xi**2 + self.eta**2

    @classmethod
    def from_polar(
        cls, modulus: float, argument: float, q0: float = 0.0, phi0: float = 0.0
    ) -> "SolitonParams":
        return cls(
            modulus * math.cos(argument), modulus * math.sin(argument), q0, phi0
        )


@dataclass(frozen=True)
class BackgroundField:
    """Complex control envelope on a uniform retarded-time grid.

    The cumulative intensity I(tau) = int_0^tau |Omega|^2 dtau' is
    precomputed by trapezoid prefix sums (signed for tau < 0) and
    interpolated linearly; the grid must span tau = 0.
    """

    tau: np.ndarray
    omega: np.ndarray
    _cum_intensity: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        tau = np.asarray(self.tau, dtype=float)
        omega = np.asarray(self.omega, dtype=complex)
        if tau.ndim != 1 or tau.shape != omega.shape or tau.size < 2:
            raise GridError("tau and omega must be congruent 1-d arrays")
        dtau = np.diff(tau)
        if np.any(dtau <= 0) or not np.allclose(dtau, dtau[0], rtol=1e-9, atol=0):
            raise GridError("tau grid must be uniform and increasing")
        if not (tau[0] <= 0.0 <= tau[-1]):
            raise GridError("tau grid must span tau = 0 (intensity anchor)")
        inten = np.abs(omega) ** 2
        cum = np.concatenate(
            [[0.0], np.cumsum(0.5 * (inten[1:] + inten[:-1]) * dtau)]
        )
        cum = cum - np.interp(0.0, tau, cum)
        for name, arr in (("tau", tau), ("omega", omega), ("_cum_intensity", cum)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def constant(
        cls, omega: complex, tau_min: float, tau_max: float, n: int
    ) -> "BackgroundField":
        tau = np.linspace(tau_min, tau_max, n)
        return cls(tau, np.full(n, omega, dtype=complex))

    @property
    def dtau(self) -> float:
        return float(self.tau[1] - self.tau[0])

    def _check_range(self, tau) -> None:
        tau = np.asarray(tau, dtype=float)
        lo, hi = self.tau[0], self.tau[-1]
        pad = 1e-9 * max(1.0, abs(hi - lo))
        if np.any(tau < lo - pad) or np.any(tau > hi + pad):
            raise GridError("tau outside the background grid")

    def omega_at(self, tau) -> np.ndarray:
        self._check_range(tau)
        re = np.interp(tau, self.tau, self.omega.real)
        im = np.interp(tau, self.tau, self.omega.imag)
        return re + 1j * im

    def intensity_integral_at(self, tau) -> np.ndarray:
        self._check_range(tau)
        return np.interp(tau, self.tau, self._cum_intensity)


@dataclass(frozen=True)
class SolitonState:
    """Fields and per-detuning atomic amplitudes at evaluation points.

    ``psi_*`` carry one trailing axis over the detuning nodes; the
    atomic basis ordering is (e, +, -) everywhere in the package.
    """

    omega_p: np.ndarray
    omega_m: np.ndarray
    q: np.ndarray
    phi: np.ndarray
    psi_p: np.ndarray
    psi_m: np.ndarray
    psi_e: np.ndarray

    def psi_matrix(self) -> np.ndarray:
        """Stack amplitudes as [..., n_delta, 3] in (e, +, -) ordering."""
        return np.stack([self.psi_e, self.psi_p, self.psi_m], axis=-1)


@dataclass(frozen=True)
class StokesRecord:
    s0: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    s3: np.ndarray


def _sech(q: np.ndarray) -> np.ndarray:
    # overflow-safe for large |q|
    a = np.abs(q)
    e = np.exp(-a)
    return 2.0 * e / (1.0 + e * e)


def evaluate_soliton(
    params: SolitonParams,
    background: BackgroundField,
    medium: MediumProfile | None,
    nu: DetuningDistribution,
    tau,
    zeta,
) -> SolitonState:
    """Evaluate the closed-form soliton at (tau, zeta) points.

    ``tau`` and ``zeta`` broadcast against each other.  ``medium=None``
    means vacuum (the exterior launch-pulse shape).
    """
    tau = np.asarray(tau, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    xi, eta = params.xi, params.eta
    s = params.spectral_sq
    lam = xi + 1j * eta

    intensity_term = background.intensity_integral_at(tau) / (4.0 * s)
    if medium is None:
        coupling = np.zeros(np.shape(zeta))
    else:
        coupling = medium.coupling_integral_at(zeta)
    d = nu.nodes
    lorentz = 1.0 / ((xi - d) ** 2 + eta**2)
    kq = 0.5 * eta * float(np.sum(nu.weights * lorentz))
    kphi = 0.5 * float(np.sum(nu.weights * (xi - d) * lorentz))

    q = params.q0 - eta * intensity_term + kq * coupling
    phi = params.phi0 + xi * intensity_term - kphi * coupling
    q, phi = (np.asarray(x) for x in np.broadcast_arrays(q, phi))

    tanh_q = np.tanh(q)
    sech_q = _sech(q)
    ph_p = np.asarray((xi - 1j * eta * tanh_q) / lam)
    ph_m = np.asarray(eta * np.exp(-1j * phi) * sech_q / lam)

    omega = background.omega_at(tau)
    omega_p = omega * ph_p
    omega_m = omega * ph_m

    denom = (xi - d) + 1j * eta  # shape (n_delta,)
    psi_p = -lam * ph_m[..., None] / denom
    psi_m = (lam * ph_p[..., None] - d) / denom
    psi_e = omega_m[..., None] / (2.0 * denom)

    return SolitonState(omega_p, omega_m, q, phi, psi_p, psi_m, psi_e)


def launch_pulse(
    params: SolitonParams, background: BackgroundField, tau
) -> tuple[np.ndarray, np.ndarray]:
    """Boundary fields at the medium entrance (vacuum soliton shape)."""
    state = evaluate_soliton(params, background, None, _SHARP, tau, 0.0)
    return state.omega_p, state.omega_m


_SHARP = DetuningDistribution("sharp", np.array([0.0]), np.array([1.0]))


def apply_polarization_frame(b: np.ndarray, state: SolitonState) -> SolitonState:
    """Rotate the circular polarization basis by a constant unitary B.

    Fields transform with B, ground amplitudes with the complex
    conjugate of B (so the coupling Omega_+ psi_+ + Omega_- psi_- is
    frame independent); the excited amplitude does not transform.
    """
    b = np.asarray(b, dtype=complex)
    if b.shape != (2, 2):
        raise UnitaryError("frame matrix must be 2x2")
    if np.max(np.abs(b.conj().T @ b - np.eye(2))) > 1e-12:
        raise UnitaryError("frame matrix is not unitary within 1e-12")
    omega_p = b[0, 0] * state.omega_p + b[0, 1] * state.omega_m
    omega_m = b[1, 0] * state.omega_p + b[1, 1] * state.omega_m
    bc = b.conj()
    psi_p = bc[0, 0] * state.psi_p + bc[0, 1] * state.psi_m
    psi_m = bc[1, 0] * state.psi_p + bc[1, 1] * state.psi_m
    return SolitonState(
        omega_p, omega_m, state.q, state.phi, psi_p, psi_m, state.psi_e
    )


def stokes(omega_p, omega_m, handedness: int = 1) -> StokesRecord:
    """Stokes parameters in the circular basis.

    Convention: s3 = |Omega_+|^2 - |Omega_-|^2, s1 + i s2 = 2 conj(Omega_+)
    Omega_-.  ``handedness=-1`` flips the sign of s2 and s3 for the
    opposite circular labelling.
    """
    if handedness not in (1, -1):
        raise ValueError("handedness must be +1 or -1")
    omega_p = np.asarray(omega_p, dtype=complex)
    omega_m = np.asarray(omega_m, dtype=complex)
    ip = np.abs(omega_p) ** 2
    im = np.abs(omega_m) ** 2
    cross = 2.0 * np.conj(omega_p) * omega_m
    return StokesRecord(
        ip + im, cross.real, handedness * cross.imag, handedness * (ip - im)
    )


def soliton_velocity(
    params: SolitonParams, g: float, nu: DetuningDistribution, intensity: float
) -> float:
    """v/c from the background intensity and the detuning-averaged coupling.

    Collapses to intensity / (2 g) on a sharp line.
    """
    d = nu.nodes
    denom = g * float(np.sum(nu.weights / ((params.xi - d) ** 2 + params.eta**2)))
    if denom <= 0.0:
        raise ZeroDivisionError("empty medium: zero detuning-averaged coupling")
    return intensity / (2.0 * params.spectral_sq) / denom


@dataclass(frozen=True)
class FeasibilityNumbers:
    length_m: float
    length_c_us: float
    fractional_loss: float
    peak_excited_population: float


def soliton_length_and_loss(
    params: SolitonParams,
    g: float,
    nu: DetuningDistribution,
    intensity: float,
    v_over_c: float | None,
    density: float,
    wavelength: float,
    distance: float,
) -> FeasibilityNumbers:
    """Soliton length, fractional spontaneous-emission loss, peak
    excited-state population.

    ``density``, ``wavelength`` and the travelled ``distance`` are in SI
    units; the length is reported in metres.
    """
    if v_over_c is None:
        v_over_c = soliton_velocity(params, g, nu, intensity)
    ls_c_us = 4.0 * params.spectral_sq * v_over_c / (params.eta * intensity)
    ls_m = ls_c_us * METERS_PER_C_US
    n_lambda3 = density * wavelength**3
    loss = (32.0 * math.pi / n_lambda3) * (distance * wavelength / ls_m**2)
    peak_pop = 2.0 * v_over_c / (g * ls_c_us**2)
    return FeasibilityNumbers(ls_m, ls_c_us, loss, peak_pop)
