"""Compiled inner loops for the atomic tau-integration.

The three-level Hamiltonian in the (e, +, -) ordering is

    H = -delta |e><e| - sum_pm ( conj(Omega_pm)/2 |pm><e|
                                 + Omega_pm/2 |e><pm| )

and pure states evolve as dpsi/dtau = -i H psi.  The sweep integrates
every detuning node over the full tau grid with classical RK4, the
field linearly interpolated at half steps.  Summation order over the
detuning nodes is fixed, so results are bit-identical run to run.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _deriv(pe, pp, pm, op, om, delta):
    de = 1j * delta * pe + 0.5j * (op * pp + om * pm)
    dp = 0.5j * np.conj(op) * pe
    dm = 0.5j * np.conj(om) * pe
    return de, dp, dm


@njit(cache=True)
def sweep_atoms(omega_p, omega_m, deltas, dtau, psi0, psi_out):
    """RK4-integrate all detuning nodes along the tau grid.

    omega_p/omega_m: complex field samples on the tau grid.
    psi0: (n_delta, 3) initial amplitudes at the first grid point.
    psi_out: (n_tau, n_delta, 3) output buffer.
    Returns the maximum norm deviation |  |psi|^2 - 1 | encountered.
    """
    n_tau = omega_p.shape[0]
    n_delta = deltas.shape[0]
    max_drift = 0.0
    for k in range(n_delta):
        delta = deltas[k]
        pe = psi0[k, 0]
        pp = psi0[k, 1]
        pm = psi0[k, 2]
        psi_out[0, k, 0] = pe
        psi_out[0, k, 1] = pp
        psi_out[0, k, 2] = pm
        for i in range(n_tau - 1):
            op0 = omega_p[i]
            om0 = omega_m[i]
            op1 = omega_p[i + 1]
            om1 = omega_m[i + 1]
            oph = 0.5 * (op0 + op1)
            omh = 0.5 * (om0 + om1)

            k1e, k1p, k1m = _deriv(pe, pp, pm, op0, om0, delta)
            h = 0.5 * dtau
            k2e, k2p, k2m = _deriv(
                pe + h * k1e, pp + h * k1p, pm + h * k1m, oph, omh, delta
            )
            k3e, k3p, k3m = _deriv(
                pe + h * k2e, pp + h * k2p, pm + h * k2m, oph, omh, delta
            )
            k4e, k4p, k4m = _deriv(
                pe + dtau * k3e, pp + dtau * k3p, pm + dtau * k3m, op1, om1, delta
            )
            sixth = dtau / 6.0
            pe = pe + sixth * (k1e + 2.0 * k2e + 2.0 * k3e + k4e)
            pp = pp + sixth * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
            pm = pm + sixth * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
            psi_out[i + 1, k, 0] = pe
            psi_out[i + 1, k, 1] = pp
            psi_out[i + 1, k, 2] = pm
        norm = abs(pe) ** 2 + abs(pp) ** 2 + abs(pm) ** 2
        drift = abs(norm - 1.0)
        if drift > max_drift:
            max_drift = drift
    return max_drift


@njit(cache=True)
def rk4_step(psi, op0, oph, op1, om0, omh, om1, delta, dtau):
    """Single RK4 step for one atom; psi is a length-3 complex array."""
    pe, pp, pm = psi[0], psi[1], psi[2]
    k1e, k1p, k1m = _deriv(pe, pp, pm, op0, om0, delta)
    h = 0.5 * dtau
    k2e, k2p, k2m = _deriv(pe + h * k1e, pp + h * k1p, pm + h * k1m, oph, omh, delta)
    k3e, k3p, k3m = _deriv(pe + h * k2e, pp + h * k2p, pm + h * k2m, oph, omh, delta)
    k4e, k4p, k4m = _deriv(
        pe + dtau * k3e, pp + dtau * k3p, pm + dtau * k3m, op1, om1, delta
    )
    sixth = dtau / 6.0
    out = np.empty(3, dtype=np.complex128)
    out[0] = pe + sixth * (k1e + 2.0 * k2e + 2.0 * k3e + k4e)
    out[1] = pp + sixth * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    out[2] = pm + sixth * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
    return out
