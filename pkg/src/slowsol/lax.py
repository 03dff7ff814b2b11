"""Lax pair of the Maxwell-Liouville system and its zero-curvature check.

U is -i times the interaction Hamiltonian with the detuning replaced by
a free spectral parameter; V is a weighted sum of atomic projectors
over the detuning nodes with simple poles at the nodes.  On exact
dynamics the curvature dU/dzeta - dV/dtau + [U, V] vanishes; the
residual of a sampled history therefore measures discretization error
plus the weak-background correction of the closed-form solution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .analytic import BackgroundField, SolitonParams, evaluate_soliton
from .core import DetuningDistribution, MediumProfile
from .dynamics import hamiltonian
from .errors import SpectralCollisionError

NODE_COLLISION_TOL = 1e-6


@dataclass(frozen=True)
class LaxPairSample:
    u: np.ndarray
    v: np.ndarray
    tau: float
    zeta: float
    spectral_delta: float


class HistorySampler(Protocol):
    """Pointwise access to a field/atom history."""

    nu: DetuningDistribution

    def sample(self, tau: float, zeta: float) -> tuple[complex, complex, np.ndarray]:
        """Return (omega_p, omega_m, psi[(n_delta, 3)]) at one point."""
        ...

    def g_at(self, zeta: float) -> float: ...


class AnalyticHistory:
    """Closed-form solution exposed as a history sampler."""

    def __init__(
        self,
        params: SolitonParams,
        background: BackgroundField,
        medium: MediumProfile,
        nu: DetuningDistribution,
    ):
        self.params = params
        self.background = background
        self.medium = medium
        self.nu = nu

    def sample(self, tau: float, zeta: float):
        st = evaluate_soliton(
            self.params, self.background, self.medium, self.nu, tau, zeta
        )
        return complex(st.omega_p), complex(st.omega_m), st.psi_matrix()

    def g_at(self, zeta: float) -> float:
        return float(self.medium.g_at(zeta))


class CorruptedHistory:
    """Negative control: scales one field component of a base history."""

    def __init__(self, base, omega_p_scale: float = 1.01):
        self.base = base
        self.nu = base.nu
        self.omega_p_scale = omega_p_scale

    def sample(self, tau: float, zeta: float):
        op, om, psi = self.base.sample(tau, zeta)
        return self.omega_p_scale * op, om, psi

    def g_at(self, zeta: float) -> float:
        return self.base.g_at(zeta)


def build_lax_pair(
    omega_p: complex,
    omega_m: complex,
    psi: np.ndarray,
    nu: DetuningDistribution,
    g: float,
    spectral_delta: float,
    tau: float = 0.0,
    zeta: float = 0.0,
) -> LaxPairSample:
    """Assemble (U, V) at one point for a real spectral parameter.

    ``psi`` has shape (n_delta, 3) in the (e, +, -) ordering.  The
    spectral parameter must stay off the detuning nodes; the principal
    value is handled by keeping it off the distribution support.
    """
    gaps = spectral_delta - nu.nodes
    if np.min(np.abs(gaps)) < NODE_COLLISION_TOL:
        raise SpectralCollisionError(
            f"spectral parameter {spectral_delta} MHz collides with a "
            "detuning node"
        )
    u = -1j * hamiltonian(omega_p, omega_m, spectral_delta)
    psi = np.asarray(psi, dtype=complex)
    coeff = nu.weights / gaps
    # rho(delta_k) = psi psi^dagger, fixed summation order over nodes
    v = np.zeros((3, 3), dtype=complex)
    for k in range(psi.shape[0]):
        v += coeff[k] * np.outer(psi[k], np.conj(psi[k]))
    v *= -0.5j * g
    return LaxPairSample(u, v, tau, zeta, spectral_delta)


def _pair_at(history, tau: float, zeta: float, spectral_delta: float):
    op, om, psi = history.sample(tau, zeta)
    return build_lax_pair(
        op, om, psi, history.nu, history.g_at(zeta), spectral_delta, tau, zeta
    )


def zero_curvature_residual(
    history,
    spectral_delta: float,
    h_tau: float,
    h_zeta: float,
    points,
) -> dict:
    """Central-difference curvature residual at the given (tau, zeta)
    points.

    Returns per-point Frobenius norms together with their max and mean,
    normalized and raw.  ``points`` is an iterable of (tau, zeta).
    """
    norms = []
    for tau, zeta in points:
        u_c = _pair_at(history, tau, zeta, spectral_delta)
        du = (
            _pair_at(history, tau, zeta + h_zeta, spectral_delta).u
            - _pair_at(history, tau, zeta - h_zeta, spectral_delta).u
        ) / (2.0 * h_zeta)
        dv = (
            _pair_at(history, tau + h_tau, zeta, spectral_delta).v
            - _pair_at(history, tau - h_tau, zeta, spectral_delta).v
        ) / (2.0 * h_tau)
        comm = u_c.u @ u_c.v - u_c.v @ u_c.u
        resid = du - dv + comm
        norms.append(float(np.linalg.norm(resid)))
    norms = np.asarray(norms)
    return {
        "h_tau": h_tau,
        "h_zeta": h_zeta,
        "spectral_delta": spectral_delta,
        "per_point": norms,
        "max_residual": float(norms.max()),
        "mean_residual": float(norms.mean()),
    }


def refinement_table(
    history,
    spectral_delta: float,
    h0_tau: float,
    h0_zeta: float,
    points,
    levels: int = 3,
) -> list[dict]:
    """Residuals at successively halved stencil spacings."""
    rows = []
    for lvl in range(levels):
        f = 0.5**lvl
        rows.append(
            zero_curvature_residual(
                history, spectral_delta, h0_tau * f, h0_zeta * f, points
            )
        )
    return rows


def loglog_slope(rows: list[dict]) -> float:
    """Order of convergence fitted from a refinement table."""
    h = np.array([r["h_tau"] for r in rows])
    e = np.array([r["max_residual"] for r in rows])
    return float(np.polyfit(np.log(h), np.log(e), 1)[0])
