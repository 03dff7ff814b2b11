"""Direct integration of the three-level Maxwell-Liouville system.

Everything is formulated in retarded coordinates tau = t - z/c,
zeta = z/c, where the field equation reduces to an ODE in zeta:

    dOmega_pm/dzeta = i g(zeta) <psi_e conj(psi_pm)>_nu

Atoms at a fixed zeta see the local field history and are integrated
over the full tau grid (RK4); the field is marched in zeta with a Heun
predictor-corrector.  This module is the independent oracle for the
closed-form solution in :mod:`slowsol.analytic`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import rk4_step, sweep_atoms
from .core import DetuningDistribution, MediumProfile
from .errors import GridError, IntegrationError, StepSizeError, TrackingError

#: dimensionless bound on (step size) * (fastest frequency)
STEP_RULE = 0.1


def check_step(dtau: float, *scales: float) -> None:
    """Refuse a tau step that under-resolves any supplied frequency."""
    fastest = max((abs(s) for s in scales), default=0.0)
    if dtau * fastest > STEP_RULE:
        raise StepSizeError(
            f"dtau = {dtau:.4g} us violates dtau * {fastest:.4g} MHz <= {STEP_RULE}"
        )


def dark_state(omega_p: complex, omega_m: complex) -> np.ndarray:
    """Ground-state superposition decoupled from the given field.

    Returns amplitudes (psi_e, psi_p, psi_m) with psi_e = 0 and
    Omega_+ psi_+ + Omega_- psi_- = 0 exactly.  The global phase is
    fixed so that psi_m is real and non-negative when Omega_- = 0
    (and psi_p real non-negative when Omega_+ = 0).
    """
    norm = np.hypot(abs(omega_p), abs(omega_m))
    if norm == 0.0:
        raise ValueError("dark state undefined for zero field")
    psi_p = omega_m / norm
    psi_m = -omega_p / norm
    if omega_p != 0.0:
        phase = -np.conj(omega_p) / abs(omega_p)
    else:
        phase = np.conj(omega_m) / abs(omega_m)
    return np.array([0.0, psi_p * phase, psi_m * phase], dtype=complex)


def hamiltonian(omega_p: complex, omega_m: complex, delta: float) -> np.ndarray:
    """Interaction-picture Hamiltonian in the (e, +, -) ordering (MHz)."""
    return np.array(
        [
            [-delta, -omega_p / 2.0, -omega_m / 2.0],
            [-np.conj(omega_p) / 2.0, 0.0, 0.0],
            [-np.conj(omega_m) / 2.0, 0.0, 0.0],
        ],
        dtype=complex,
    )


def liouville_step(
    psi: np.ndarray,
    omega_p_samples,
    omega_m_samples,
    delta: float,
    dtau: float,
    extra_scale: float = 0.0,
) -> np.ndarray:
    """One RK4 step of dpsi/dtau = -i H psi.

    ``omega_*_samples`` are the field values at the start and end of the
    step; the midpoint is interpolated linearly.  ``extra_scale`` is an
    additional frequency (e.g. the spectral-parameter modulus) included
    in the step-size check.
    """
    op0, op1 = complex(omega_p_samples[0]), complex(omega_p_samples[1])
    om0, om1 = complex(omega_m_samples[0]), complex(omega_m_samples[1])
    amp = max(abs(op0), abs(op1), abs(om0), abs(om1))
    check_step(dtau, delta, amp, extra_scale)
    psi = np.asarray(psi, dtype=complex)
    return rk4_step(
        psi,
        op0,
        0.5 * (op0 + op1),
        op1,
        om0,
        0.5 * (om0 + om1),
        om1,
        float(delta),
        float(dtau),
    )


def polarization_source(
    psi: np.ndarray, nu: DetuningDistribution, g: float
) -> tuple[np.ndarray, np.ndarray]:
    """Field source i g <psi_e conj(psi_pm)>_nu.

    ``psi`` has shape (..., n_delta, 3) in the (e, +, -) ordering; the
    detuning reduction runs in fixed node order.
    """
    pe = psi[..., 0]
    s_p = 1j * g * ((pe * np.conj(psi[..., 1])) @ nu.weights)
    s_m = 1j * g * ((pe * np.conj(psi[..., 2])) @ nu.weights)
    return s_p, s_m


@dataclass(frozen=True)
class FieldGrid:
    """Checkpointed field history Omega_pm(tau_i, zeta_j)."""

    tau: np.ndarray
    zeta: np.ndarray
    omega_p: np.ndarray  # (n_zeta, n_tau)
    omega_m: np.ndarray

    @property
    def dtau(self) -> float:
        return float(self.tau[1] - self.tau[0])


@dataclass(frozen=True)
class AtomGrid:
    """Checkpointed pure-state amplitudes psi(tau_i, zeta_j, delta_k)."""

    tau: np.ndarray
    zeta: np.ndarray
    deltas: np.ndarray
    psi: np.ndarray  # (n_zeta, n_tau, n_delta, 3), ordering (e, +, -)


@dataclass(frozen=True)
class ConservationStats:
    """Online residual of d_zeta(total flux) + 2 g d_tau <rho_ee>_nu.

    The two terms cancel for the exact dynamics; the residual measures
    discretization error.  ``max_flux_gradient`` is the larger of the
    two term magnitudes and serves as the normalization scale.
    """

    max_residual: float
    max_flux_gradient: float
    samples: int


@dataclass(frozen=True)
class PropagationResult:
    fields: FieldGrid
    atoms: AtomGrid
    conservation: ConservationStats | None
    max_norm_drift: float


def propagate(
    launch_p: np.ndarray,
    launch_m: np.ndarray,
    tau: np.ndarray,
    medium: MediumProfile,
    nu: DetuningDistribution,
    zeta_end: float,
    n_zeta: int,
    checkpoint_stride: int = 1,
    extra_scale: float = 0.0,
    initial_atoms: np.ndarray | None = None,
    collect_conservation: bool = True,
    norm_tol: float = 1e-9,
    zeta_start: float = 0.0,
) -> PropagationResult:
    """March the field from the entrance boundary through the medium.

    ``launch_p/launch_m`` are the boundary fields on the full tau grid at
    ``zeta_start`` (normally 0); atoms at every zeta start in the dark
    state of the field at tau[0] unless ``initial_atoms`` (n_delta, 3)
    overrides it.  Checkpoints (every ``checkpoint_stride``-th slice,
    always including first and last) are returned; conservation
    diagnostics are accumulated online from consecutive slices.
    """
    tau = np.asarray(tau, dtype=float)
    launch_p = np.ascontiguousarray(launch_p, dtype=complex)
    launch_m = np.ascontiguousarray(launch_m, dtype=complex)
    if tau.ndim != 1 or launch_p.shape != tau.shape or launch_m.shape != tau.shape:
        raise GridError("launch fields must live on the 1-d tau grid")
    dtau_all = np.diff(tau)
    if np.any(dtau_all <= 0) or not np.allclose(dtau_all, dtau_all[0], rtol=1e-9):
        raise GridError("tau grid must be uniform and increasing")
    dtau = float(dtau_all[0])
    if n_zeta < 1 or zeta_end <= zeta_start:
        raise GridError("need n_zeta >= 1 and zeta_end > zeta_start")
    amp = float(max(np.max(np.abs(launch_p)), np.max(np.abs(launch_m))))
    check_step(dtau, amp, extra_scale, *np.abs(nu.nodes))

    deltas = np.ascontiguousarray(nu.nodes)
    n_tau = tau.size
    n_delta = deltas.size
    if initial_atoms is None:
        psi0 = np.tile(dark_state(launch_p[0], launch_m[0]), (n_delta, 1))
    else:
        psi0 = np.ascontiguousarray(initial_atoms, dtype=complex)
        if psi0.shape != (n_delta, 3):
            raise GridError("initial_atoms must have shape (n_delta, 3)")
    psi0 = np.ascontiguousarray(psi0, dtype=complex)

    dzeta = (zeta_end - zeta_start) / n_zeta
    zetas = zeta_start + dzeta * np.arange(n_zeta + 1)
    psi_buf = np.empty((n_tau, n_delta, 3), dtype=complex)
    psi_pred = np.empty_like(psi_buf)

    chk_idx = sorted(set(range(0, n_zeta + 1, checkpoint_stride)) | {n_zeta})
    chk_pos = {j: i for i, j in enumerate(chk_idx)}
    chk_op = np.empty((len(chk_idx), n_tau), dtype=complex)
    chk_om = np.empty_like(chk_op)
    chk_psi = np.empty((len(chk_idx), n_tau, n_delta, 3), dtype=complex)

    max_drift = 0.0
    cons_max = 0.0
    cons_scale = 0.0
    cons_samples = 0
    flux_prev = None
    flux_curr = None
    atom_term_curr = None

    op = launch_p.copy()
    om = launch_m.copy()
    g_all = medium.g_at(zetas)

    for j in range(n_zeta + 1):
        drift = sweep_atoms(op, om, deltas, dtau, psi0, psi_buf)
        max_drift = max(max_drift, drift)
        if drift > norm_tol:
            raise IntegrationError(
                f"atomic norm drift {drift:.3g} exceeds {norm_tol:.3g} at "
                f"zeta index {j}; reduce dtau"
            )
        if j in chk_pos:
            i = chk_pos[j]
            chk_op[i] = op
            chk_om[i] = om
            chk_psi[i] = psi_buf

        if collect_conservation:
            flux_next = np.abs(op) ** 2 + np.abs(om) ** 2
            atom_term_next = (np.abs(psi_buf[:, :, 0]) ** 2) @ nu.weights
            if flux_prev is not None:
                dflux = (flux_next[1:-1] - flux_prev[1:-1]) / (2.0 * dzeta)
                datom = (
                    2.0
                    * g_all[j - 1]
                    * (atom_term_curr[2:] - atom_term_curr[:-2])
                    / (2.0 * dtau)
                )
                resid = dflux + datom
                cons_max = max(cons_max, float(np.max(np.abs(resid))))
                cons_scale = max(
                    cons_scale,
                    float(np.max(np.abs(dflux))),
                    float(np.max(np.abs(datom))),
                )
                cons_samples += resid.size
            flux_prev, flux_curr = flux_curr, flux_next
            atom_term_curr = atom_term_next

        if j == n_zeta:
            break

        # Heun predictor-corrector in zeta
        s_p, s_m = polarization_source(psi_buf, nu, g_all[j])
        op_pred = op + dzeta * s_p
        om_pred = om + dzeta * s_m
        drift = sweep_atoms(op_pred, om_pred, deltas, dtau, psi0, psi_pred)
        max_drift = max(max_drift, drift)
        sp_pred, sm_pred = polarization_source(psi_pred, nu, g_all[j + 1])
        op = op + 0.5 * dzeta * (s_p + sp_pred)
        om = om + 0.5 * dzeta * (s_m + sm_pred)
        if not (np.all(np.isfinite(op)) and np.all(np.isfinite(om))):
            bad = int(np.flatnonzero(~np.isfinite(op + om))[0])
            raise IntegrationError(
                f"non-finite field at tau index {bad}, zeta index {j + 1}"
            )

    fields = FieldGrid(tau, zetas[chk_idx], chk_op, chk_om)
    atoms = AtomGrid(tau, zetas[chk_idx], deltas, chk_psi)
    cons = (
        ConservationStats(cons_max, cons_scale, cons_samples)
        if collect_conservation and cons_samples
        else None
    )
    return PropagationResult(fields, atoms, cons, max_drift)


@dataclass(frozen=True)
class DynamicsReport:
    conservation_residual: float | None
    conservation_scale: float | None
    zeta_track: np.ndarray
    tau_centers: np.ndarray
    dtau_c_dzeta: float
    v_over_c: float


def _parabolic_min(x: np.ndarray, y: np.ndarray, i: int) -> float:
    """Sub-grid refinement of a discrete minimum at index i."""
    if i == 0 or i == y.size - 1:
        return float(x[i])
    denom = y[i - 1] - 2.0 * y[i] + y[i + 1]
    if denom <= 0:
        return float(x[i])
    shift = 0.5 * (y[i - 1] - y[i + 1]) / denom
    return float(x[i] + shift * (x[1] - x[0]))


def track_soliton_centers(
    fields: FieldGrid, deviation_threshold: float = 1e-3
) -> tuple[np.ndarray, np.ndarray]:
    """Locate the soliton center tau_c at each checkpointed zeta.

    The center is the deepest polarization deviation, i.e. the argmin of
    s3/s0, refined parabolically.  Slices whose deviation stays below
    ``deviation_threshold`` (relative to s0) or whose minimum touches
    the grid edge are skipped.
    """
    from .analytic import stokes

    zs, taus = [], []
    for i, zeta in enumerate(fields.zeta):
        rec = stokes(fields.omega_p[i], fields.omega_m[i])
        s0 = rec.s0
        if np.max(s0) <= 0:
            continue
        ratio = np.where(s0 > 0, rec.s3 / np.where(s0 > 0, s0, 1.0), 1.0)
        imin = int(np.argmin(ratio))
        if 0.5 * (1.0 - ratio[imin]) < deviation_threshold:
            continue
        if imin == 0 or imin == ratio.size - 1:
            continue
        zs.append(float(zeta))
        taus.append(_parabolic_min(fields.tau, ratio, imin))
    if len(zs) < 2:
        raise TrackingError("no identifiable soliton track in the history")
    return np.asarray(zs), np.asarray(taus)


def analyze_history(
    result: PropagationResult,
    nu: DetuningDistribution,
    medium: MediumProfile,
    deviation_threshold: float = 1e-3,
) -> DynamicsReport:
    """Conservation-law residual plus soliton velocity from the track.

    Uses the online conservation diagnostics when the run collected
    them.  The velocity follows from the fitted retarded-frame delay:
    v/c = 1 / (1 + dtau_c/dzeta).
    """
    zs, taus = track_soliton_centers(result.fields, deviation_threshold)
    slope = float(np.polyfit(zs, taus, 1)[0])
    cons = result.conservation
    return DynamicsReport(
        cons.max_residual if cons else None,
        cons.max_flux_gradient if cons else None,
        zs,
        taus,
        slope,
        1.0 / (1.0 + slope),
    )


def zeta_center_at_tau(fields: FieldGrid, tau_index: int) -> float:
    """Soliton center along zeta at one retarded time (needs dense
    checkpoints)."""
    from .analytic import stokes

    rec = stokes(fields.omega_p[:, tau_index], fields.omega_m[:, tau_index])
    s0 = rec.s0
    if np.max(s0) <= 0:
        raise TrackingError("zero field at the requested tau")
    ratio = np.where(s0 > 0, rec.s3 / np.where(s0 > 0, s0, 1.0), 1.0)
    imin = int(np.argmin(ratio))
    if 0.5 * (1.0 - ratio[imin]) < 1e-3:
        raise TrackingError("no polarization deviation at the requested tau")
    return _parabolic_min(fields.zeta, ratio, imin)
