"""Fluctuation (Goldstone) modes of the soliton and their symplectic
structure.

Differentiating the closed-form fields with respect to the four soliton
constants yields the mode functions; their pairwise antisymmetrized
overlap integral forms a 4x4 bracket matrix whose canonical pattern
(position with xi, phase with eta) underpins the two Heisenberg pairs
of the quantized soliton.  With the MHz/us convention the bracket is
dimensionless and the canonical entries equal exactly 1; no extra
normalization factor is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import BackgroundField, SolitonParams, evaluate_soliton
from .core import (
    C_M_PER_S,
    EPS0_F_PER_M,
    HBAR_J_S,
    MHZ_TO_PER_S,
    DetuningDistribution,
    MediumProfile,
)
from .errors import DerivativeError, WindowError

PARAMETERS = ("xi", "eta", "q0", "phi0")

#: relative disagreement between step-halved difference quotients
FD_STABILITY_TOL = 1e-4

#: localized modes must fall below this fraction of their peak at the
#: window edges before a bracket quadrature is trusted
EDGE_FRACTION = 1e-6


@dataclass(frozen=True)
class FluctuationMode:
    """d Omega_pm / d alpha on the tau grid at fixed zeta."""

    alpha: str
    tau: np.ndarray
    d_omega_p: np.ndarray
    d_omega_m: np.ndarray

    @property
    def peak(self) -> float:
        return float(
            max(np.max(np.abs(self.d_omega_p)), np.max(np.abs(self.d_omega_m)))
        )

    def edge_fraction(self) -> float:
        peak = self.peak
        if peak == 0.0:
            return 0.0
        edges = max(
            abs(self.d_omega_p[0]),
            abs(self.d_omega_p[-1]),
            abs(self.d_omega_m[0]),
            abs(self.d_omega_m[-1]),
        )
        return float(edges / peak)


def _fields(
    params: SolitonParams,
    background: BackgroundField,
    medium: MediumProfile | None,
    nu: DetuningDistribution,
    tau: np.ndarray,
    zeta: float,
) -> tuple[np.ndarray, np.ndarray]:
    st = evaluate_soliton(params, background, medium, nu, tau, zeta)
    return st.omega_p, st.omega_m


def _replace(params: SolitonParams, alpha: str, value: float) -> SolitonParams:
    kw = {p: getattr(params, p) for p in PARAMETERS}
    kw[alpha] = value
    return SolitonParams(**kw)


def mode_field(
    params: SolitonParams,
    background: BackgroundField,
    medium: MediumProfile | None,
    nu: DetuningDistribution,
    alpha: str,
    tau: np.ndarray,
    zeta: float = 0.0,
    method: str = "auto",
) -> FluctuationMode:
    """Derivative of the soliton fields with respect to one parameter.

    ``q0`` and ``phi0`` enter the closed form only through Q and Phi
    with unit coefficient, so their modes have exact expressions;
    ``xi`` and ``eta`` thread through the quadrature coefficients and
    are differenced centrally with a step-halving stability rule.
    ``method`` is ``auto``, ``analytic`` (q0/phi0 only) or
    ``central-difference``.
    """
    if alpha not in PARAMETERS:
        raise ValueError(f"unknown parameter {alpha!r}")
    tau = np.asarray(tau, dtype=float)
    if method == "auto":
        method = "analytic" if alpha in ("q0", "phi0") else "central-difference"

    if method == "analytic":
        if alpha not in ("q0", "phi0"):
            raise ValueError("analytic modes exist only for q0 and phi0")
        st = evaluate_soliton(params, background, medium, nu, tau, zeta)
        lam = params.xi + 1j * params.eta
        omega = background.omega_at(tau)
        sech_q = np.cosh(np.clip(st.q, -700, 700)) ** -1.0
        if alpha == "q0":
            d_p = omega * (-1j * params.eta * sech_q**2) / lam
            d_m = -st.omega_m * np.tanh(st.q)
        else:
            d_p = np.zeros_like(st.omega_p)
            d_m = -1j * st.omega_m
        return FluctuationMode(alpha, tau, d_p, d_m)

    if method != "central-difference":
        raise ValueError(f"unknown method {method!r}")

    base = getattr(params, alpha)
    scale = max(1.0, math.sqrt(params.spectral_sq))
    h = 1e-3 * scale
    prev = None
    best = None
    best_err = math.inf
    for _ in range(6):
        fp = _fields(background=background, medium=medium, nu=nu, tau=tau,
                     zeta=zeta, params=_replace(params, alpha, base + h))
        fm = _fields(background=background, medium=medium, nu=nu, tau=tau,
                     zeta=zeta, params=_replace(params, alpha, base - h))
        est = ((fp[0] - fm[0]) / (2 * h), (fp[1] - fm[1]) / (2 * h))
        if prev is not None:
            ref = max(np.max(np.abs(est[0])), np.max(np.abs(est[1])), 1e-300)
            err = (
                max(
                    np.max(np.abs(est[0] - prev[0])),
                    np.max(np.abs(est[1] - prev[1])),
                )
                / ref
            )
            if err < best_err:
                best, best_err = est, err
            if err <= FD_STABILITY_TOL:
                return FluctuationMode(alpha, tau, est[0], est[1])
        prev = est
        h *= 0.5
    if best is None or best_err > FD_STABILITY_TOL:
        raise DerivativeError(
            f"finite difference for {alpha} did not stabilize "
            f"(best relative disagreement {best_err:.3g})"
        )
    return FluctuationMode(alpha, tau, best[0], best[1])


@dataclass(frozen=True)
class BracketMatrix:
    """Antisymmetric overlap matrix in the (xi, eta, q0, phi0) ordering."""

    values: np.ndarray
    order: tuple[str, ...] = PARAMETERS

    def entry(self, alpha: str, beta: str) -> float:
        return float(self.values[self.order.index(alpha), self.order.index(beta)])


#: target pattern: {q0, xi} = {phi0, eta} = 1, everything else 0
CANONICAL_PATTERN = np.zeros((4, 4))
CANONICAL_PATTERN[2, 0] = 1.0
CANONICAL_PATTERN[0, 2] = -1.0
CANONICAL_PATTERN[3, 1] = 1.0
CANONICAL_PATTERN[1, 3] = -1.0
CANONICAL_PATTERN.flags.writeable = False


def _pair_bracket(a: FluctuationMode, b: FluctuationMode) -> float:
    # (1/8i) int sum_pm (conj(da) db - da conj(db)) dtau
    #   = (1/4) int sum_pm Im(conj(da) db) dtau
    integrand = np.imag(np.conj(a.d_omega_p) * b.d_omega_p) + np.imag(
        np.conj(a.d_omega_m) * b.d_omega_m
    )
    return float(np.trapezoid(integrand, a.tau)) / 4.0


def bracket_matrix(modes) -> BracketMatrix:
    """Assemble the 4x4 bracket matrix from the four parameter modes.

    Only the upper triangle is integrated; the lower triangle is the
    exact negative, so antisymmetry holds to the last bit.  The
    localized q0/phi0 modes must have decayed at the window edges.
    """
    by_name = {m.alpha: m for m in modes}
    if set(by_name) != set(PARAMETERS):
        raise ValueError(f"need exactly the four modes {PARAMETERS}")
    for name in ("q0", "phi0"):
        frac = by_name[name].edge_fraction()
        if frac > EDGE_FRACTION:
            raise WindowError(
                f"{name} mode is {frac:.3g} of its peak at the window edge; "
                "widen the tau window"
            )
    values = np.zeros((4, 4))
    for i in range(4):
        for j in range(i + 1, 4):
            val = _pair_bracket(by_name[PARAMETERS[i]], by_name[PARAMETERS[j]])
            values[i, j] = val
            values[j, i] = -val
    return BracketMatrix(values)


@dataclass(frozen=True)
class QuantumScale:
    """Physical constants fixing the quantum spectral-parameter scale."""

    dipole_moment: float  # C m
    carrier_omega: float  # s^-1
    cross_section: float  # m^2

    def __post_init__(self) -> None:
        if min(self.dipole_moment, self.carrier_omega, self.cross_section) <= 0:
            raise ValueError("quantum-scale inputs must be positive")

    @property
    def rescale_factor_mhz(self) -> float:
        """kappa^2 omega / (16 eps0 hbar sigma c), expressed in MHz."""
        per_s = self.dipole_moment**2 * self.carrier_omega / (
            16.0 * EPS0_F_PER_M * HBAR_J_S * self.cross_section * C_M_PER_S
        )
        return per_s / MHZ_TO_PER_S


@dataclass(frozen=True)
class ModeReport:
    matrix: BracketMatrix
    max_deviation: float
    worst_pair: tuple[str, str]
    passed: bool
    tolerance: float
    xi0: float | None = None
    eta0: float | None = None
    pairing: tuple[tuple[str, str], ...] = (("q0", "xi0"), ("phi0", "eta0"))


def symplectic_check_and_rescale(
    matrix: BracketMatrix,
    params: SolitonParams | None = None,
    scale: QuantumScale | None = None,
    tol: float = 1e-2,
) -> ModeReport:
    """Compare a bracket matrix against the canonical pattern.

    Reports the worst entrywise deviation and, given a quantum scale,
    the dimensionless spectral-parameter components that pair with the
    position and phase operators.
    """
    dev = np.abs(matrix.values - CANONICAL_PATTERN)
    i, j = np.unravel_index(int(np.argmax(dev)), dev.shape)
    xi0 = eta0 = None
    if scale is not None and params is not None:
        factor = scale.rescale_factor_mhz
        xi0 = params.xi / factor
        eta0 = params.eta / factor
    max_dev = float(dev[i, j])
    return ModeReport(
        matrix,
        max_dev,
        (matrix.order[i], matrix.order[j]),
        max_dev <= tol,
        tol,
        xi0,
        eta0,
    )
