"""Scenario runners behind the command-line interface.

Each runner takes a plain-dict configuration (JSON-compatible), performs
one study, and returns a summary dict with a ``checks`` section of
named threshold comparisons.  Grids are derived from the physics: the
retarded-time step obeys the integrator step rule and the zeta step
obeys an empirical stability bound for the explicit predictor-corrector
march.

The medium responds resonantly at sideband frequencies +-|Omega|/2 with
effective zeta wavenumbers up to about g*width/4 (width = soliton width
in retarded time); the explicit march amplifies such modes unless
dzeta * g * width stays below roughly 5.  STABLE_ZETA_FACTOR = 2.5
keeps a factor-two margin.  The deliberately coarse base level of the
grid-refinement study sits just past the boundary (MARGINAL_ZETA_FACTOR)
so that refinement exhibits the scheme's convergence.
"""

from __future__ import annotations

import copy
import json
import math
from pathlib import Path

import numpy as np

from .analytic import (
    BackgroundField,
    SolitonParams,
    evaluate_soliton,
    launch_pulse,
    soliton_length_and_loss,
    soliton_velocity,
    stokes,
)
from .core import (
    METERS_PER_C_US,
    AtomicData,
    MediumProfile,
    coupling_from_atomic_data,
    make_detuning_distribution,
    validate_regime,
)
from .dynamics import (
    _parabolic_min,
    propagate,
    track_soliton_centers,
)
from .errors import SlowsolError, TrackingError
from .io import config_hash, write_csv, write_json
from .lax import (
    AnalyticHistory,
    CorruptedHistory,
    loglog_slope,
    refinement_table,
)
from .modes import (
    PARAMETERS,
    FluctuationMode,
    bracket_matrix,
    mode_field,
    symplectic_check_and_rescale,
)

#: dzeta <= STABLE_ZETA_FACTOR / (g * soliton_width)
STABLE_ZETA_FACTOR = 2.5

#: coarse base level for the convergence study: just past the stability
#: boundary, where the marginal medium response dominates the error
MARGINAL_ZETA_FACTOR = 5.65

#: retarded-time step rule with a cushion below the hard 0.1 refusal
TAU_STEP_FRACTION = 0.08

SCENARIOS = (
    "figure1",
    "oracle",
    "stop-retrieve",
    "lax",
    "modes",
    "feasibility",
)

_DEFAULTS: dict[str, dict] = {
    "figure1": {
        "omega_mhz": 0.5,
        "modulus_mhz": 10.0,
        "argument_rad": 0.4 * math.pi,
        "q0": 0.0,
        "phi0": 0.0,
        "g_mhz2": 50.0,
        "strip_widths": 16.0,
        "n_points": 4001,
    },
    "oracle": {
        "argument_rad": 0.4 * math.pi,
        "velocity": {
            "modulus_mhz": 4.0,
            "parameter_sets": [[0.5, 50.0], [0.5, 100.0], [0.7, 50.0]],
            "drift_widths": 3.0,
            "margin_widths": 8.0,
            "tolerance": 0.02,
        },
        "error_scaling": {
            "modulus_mhz": 4.0,
            "omega_mhz": 0.5,
            "g_mhz2": 50.0,
            "drift_widths": 3.0,
            "r_margin_widths": 14.0,
            "h_margin_widths": 8.0,
            "r_ratio_min": 1.8,
            "h_ratio_min": 3.0,
        },
        "conservation": {
            "modulus_mhz": 10.0,
            "omega_mhz": 0.5,
            "g_mhz2": 50.0,
            "drift_widths": 3.0,
            "margin_widths": 4.0,
            "residual_tolerance": 1e-6,
            "refine_drift_widths": 0.5,
            "refine_levels": 3,
            "rate_min": 3.5,
        },
    },
    "stop-retrieve": {
        "omega_mhz": 0.5,
        "modulus_mhz": 4.0,
        "argument_rad": 0.4 * math.pi,
        "g_mhz2": 50.0,
        "drift_widths": 3.0,
        "margin_widths": 8.0,
        "hold_times_us": [50.0, 80.0],
        "ramp_start_us": 120.0,
        "ramp_time_us": 15.0,
        "drift_tolerance": 1e-8,
        "position_tolerance": 0.02,
    },
    "lax": {
        "omega_mhz": 0.5,
        "modulus_mhz": 20.0,
        "argument_rad": 0.4 * math.pi,
        "g_mhz2": 50.0,
        "spectral_delta_mhz": 20.0,
        "h_tau_us": 16.0,
        "h_zeta_us": 0.16,
        "levels": 3,
        "control_h_tau_us": 4.0,
        "control_h_zeta_us": 0.04,
        "control_scale": 1.01,
        "slope_range": [1.8, 2.2],
        "control_ratio_min": 10.0,
    },
    "modes": {
        "omega_mhz": 0.5,
        "modulus_mhz": 10.0,
        "argument_rad": 0.4 * math.pi,
        "window_widths": 15.0,
        "n_points": 20001,
        "tolerance": 1e-2,
        "control_scale": 1.05,
    },
    "feasibility": {
        "omega_mhz": 0.5,
        "modulus_mhz": 1200.0,
        "argument_rad": 0.4 * math.pi,
        "g_mhz2": None,
        "atomic": {
            "einstein_a_per_s": 6.15e7,
            "density_per_m3": 1.0e18,
            "wavelength_m": 5.89e-7,
        },
        "distance_m": 1.0e-2,
        "loss_budget": 1.0,
    },
}


def default_config(scenario: str) -> dict:
    if scenario not in _DEFAULTS:
        raise SlowsolError(f"unknown scenario {scenario!r}")
    return copy.deepcopy(_DEFAULTS[scenario])


def merge_config(base: dict, override: dict) -> dict:
    """Recursively overlay ``override`` onto ``base`` (dicts only)."""
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge_config(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def apply_overrides(config: dict, assignments) -> dict:
    """Apply ``--set key.path=value`` style overrides.

    Values are parsed as JSON when possible, otherwise taken as strings.
    """
    out = copy.deepcopy(config)
    for item in assignments or ():
        key, sep, raw = item.partition("=")
        if not sep:
            raise SlowsolError(f"override {item!r} is not of the form key=value")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = out
        parts = key.split(".")
        for part in parts[:-1]:
            if not isinstance(node.get(part), dict):
                node[part] = {}
            node = node[part]
        node[parts[-1]] = value
    return out


def soliton_width_us(params: SolitonParams, intensity: float) -> float:
    """Soliton width in retarded time: the tau interval over which Q
    changes by one on a constant background."""
    return 4.0 * params.spectral_sq / (params.eta * intensity)


def _check(value, threshold, op: str) -> dict:
    if op == "<=":
        passed = value <= threshold
    elif op == ">=":
        passed = value >= threshold
    elif op == "in":
        passed = threshold[0] <= value <= threshold[1]
    else:
        raise ValueError(f"unknown comparison {op!r}")
    return {"value": value, "threshold": threshold, "op": op, "passed": bool(passed)}


def _summary(name: str, config: dict, checks: dict, **extra) -> dict:
    out = {
        "scenario": name,
        "config_hash": config_hash(config),
        "checks": checks,
        "passed": all(c["passed"] for c in checks.values()),
    }
    out.update(extra)
    return out


def _tau_step(*scales: float) -> float:
    return TAU_STEP_FRACTION / max(*scales, 1e-30)


def _stable_n_zeta(zeta_end: float, g: float, width: float, factor: float) -> int:
    return int(math.ceil(zeta_end * g * width / factor))


# ---------------------------------------------------------------------------
# figure1


def run_figure1(config: dict, out_dir=None, fmt: str = "csv") -> dict:
    """Analytic polarization strip at fixed lab time, axis in units of
    the soliton length."""
    params = SolitonParams.from_polar(
        config["modulus_mhz"], config["argument_rad"], config["q0"], config["phi0"]
    )
    omega = config["omega_mhz"]
    g = config["g_mhz2"]
    nu = make_detuning_distribution("sharp")
    half = config["strip_widths"]
    n = config["n_points"]

    # fixed-lab-time line tau = t0 - zeta; the snapshot time t0 is
    # chosen so the twist (Q = 0) sits mid-strip and Q spans +-half
    a1 = params.eta * omega**2 / (4.0 * params.spectral_sq)
    ls_zeta = 2.0 * params.spectral_sq / (params.eta * g)
    span = 2.0 * half / (1.0 / ls_zeta + a1)
    t0 = half / a1
    zeta = np.linspace(0.0, span, n)
    tau = t0 - zeta
    medium = MediumProfile.uniform(g, span)
    bg = BackgroundField.constant(omega, 0.0, t0, n)
    state = evaluate_soliton(params, bg, medium, nu, tau, zeta)
    rec = stokes(state.omega_p, state.omega_m)

    intensity = omega**2
    norm_dev = float(np.max(np.abs(rec.s0 - intensity))) / intensity
    mag_dev = float(
        np.max(np.abs(rec.s1**2 + rec.s2**2 + rec.s3**2 - rec.s0**2))
    ) / intensity**2
    phase_right = math.atan2(
        float(np.imag(state.omega_p[-1] / omega)),
        float(np.real(state.omega_p[-1] / omega)),
    )
    phase_dev = abs(
        (phase_right - (-2.0 * params.theta) + math.pi) % (2.0 * math.pi) - math.pi
    )
    # polarization returns to the background at both strip edges
    edge_dev = max(
        abs(rec.s1[0]), abs(rec.s2[0]), abs(rec.s0[0] - rec.s3[0]),
        abs(rec.s1[-1]), abs(rec.s2[-1]), abs(rec.s0[-1] - rec.s3[-1]),
    ) / intensity

    checks = {
        "intensity_identity": _check(norm_dev, 1e-12, "<="),
        "stokes_magnitude": _check(mag_dev, 1e-10, "<="),
        "geometric_phase": _check(phase_dev, 1e-9, "<="),
        "edge_return": _check(float(edge_dev), 1e-6, "<="),
    }
    summary = _summary("figure1", config, checks)
    if out_dir is not None:
        header = {"config_hash": summary["config_hash"], "scenario": "figure1"}
        columns = {
            "z_over_ls": (zeta - 0.5 * span) / ls_zeta,
            "tau_us": tau,
            "zeta_us": zeta,
            "re_omega_p": state.omega_p.real,
            "im_omega_p": state.omega_p.imag,
            "re_omega_m": state.omega_m.real,
            "im_omega_m": state.omega_m.imag,
            "s0": rec.s0,
            "s1": rec.s1,
            "s2": rec.s2,
            "s3": rec.s3,
        }
        _emit(out_dir, "figure1_strip", columns, header, summary, fmt)
    return summary


# ---------------------------------------------------------------------------
# oracle (velocity law, error scaling, conservation)


def _oracle_run(
    modulus,
    argument,
    omega,
    g,
    drift_widths,
    margin_widths,
    *,
    dtau=None,
    n_zeta=None,
    zeta_factor=STABLE_ZETA_FACTOR,
    checkpoint_count=24,
    collect_conservation=False,
    compare=True,
):
    """Launch the closed-form pulse, march it through a uniform sharp
    medium, optionally compare against the closed form at the exit."""
    params = SolitonParams.from_polar(modulus, argument)
    nu = make_detuning_distribution("sharp")
    width = soliton_width_us(params, omega**2)
    drift = drift_widths * width
    zeta_end = drift / (2.0 * g / omega**2 - 1.0)
    tau_min = -margin_widths * width
    tau_max = drift + margin_widths * width
    if dtau is None:
        dtau = min(0.02, _tau_step(modulus, omega))
    n_tau = int((tau_max - tau_min) / dtau) + 1
    tau = np.linspace(tau_min, tau_max, n_tau)
    bg = BackgroundField.constant(omega, tau_min, tau_max, n_tau)
    medium = MediumProfile.uniform(g, zeta_end * 1.25)
    if n_zeta is None:
        n_zeta = _stable_n_zeta(zeta_end, g, width, zeta_factor)
    lp, lm = launch_pulse(params, bg, tau)
    result = propagate(
        lp,
        lm,
        tau,
        medium,
        nu,
        zeta_end,
        n_zeta,
        checkpoint_stride=max(1, n_zeta // checkpoint_count),
        extra_scale=modulus,
        norm_tol=1e-6,
        collect_conservation=collect_conservation,
    )
    out = {
        "params": params,
        "nu": nu,
        "width": width,
        "zeta_end": zeta_end,
        "n_zeta": n_zeta,
        "tau": tau,
        "background": bg,
        "medium": medium,
        "result": result,
    }
    if compare:
        exact = evaluate_soliton(params, bg, medium, nu, tau, zeta_end)
        err = max(
            float(np.max(np.abs(result.fields.omega_p[-1] - exact.omega_p))),
            float(np.max(np.abs(result.fields.omega_m[-1] - exact.omega_m))),
        )
        out["field_error"] = err / omega
    return out


def velocity_study(config: dict) -> dict:
    """Tracked soliton velocity against the closed-form law for several
    (|Omega|, g) pairs, plus linearity of v/c in the intensity."""
    cfg = config["velocity"]
    rows = []
    for omega, g in cfg["parameter_sets"]:
        run = _oracle_run(
            cfg["modulus_mhz"],
            config["argument_rad"],
            omega,
            g,
            cfg["drift_widths"],
            cfg["margin_widths"],
        )
        zs, taus = track_soliton_centers(run["result"].fields)
        slope = float(np.polyfit(zs, taus, 1)[0])
        v_num = 1.0 / (1.0 + slope)
        v_th = soliton_velocity(run["params"], g, run["nu"], omega**2)
        rows.append(
            {
                "omega_mhz": omega,
                "g_mhz2": g,
                "v_over_c": v_num,
                "v_over_c_theory": v_th,
                "relative_error": abs(v_num - v_th) / v_th,
                "field_error": run["field_error"],
            }
        )
    worst = max(r["relative_error"] for r in rows)
    # linearity in |Omega|^2: v/c * 2g / |Omega|^2 should be one
    ratios = [r["v_over_c"] * 2.0 * r["g_mhz2"] / r["omega_mhz"] ** 2 for r in rows]
    linearity = max(abs(x - 1.0) for x in ratios)
    return {
        "rows": rows,
        "velocity_error": worst,
        "linearity_error": linearity,
    }


def error_scaling_study(config: dict) -> dict:
    """Field error against the closed form under (a) halving of the
    background-strength ratio r at fixed grid and (b) halving of both
    grid steps at fixed r."""
    cfg = config["error_scaling"]
    argument = config["argument_rad"]
    mod = cfg["modulus_mhz"]
    omega = cfg["omega_mhz"]
    g = cfg["g_mhz2"]

    # (a) fixed grid sized for the sqrt(2)-larger modulus
    mod_half_r = mod * math.sqrt(2.0)
    base = SolitonParams.from_polar(mod, argument)
    width = soliton_width_us(base, omega**2)
    drift = cfg["drift_widths"] * width
    zeta_end = drift / (2.0 * g / omega**2 - 1.0)
    dtau = _tau_step(mod_half_r, omega)
    tau_min = -cfg["r_margin_widths"] * width
    tau_max = drift + cfg["r_margin_widths"] * width
    n_tau = int((tau_max - tau_min) / dtau) + 1
    tau = np.linspace(tau_min, tau_max, n_tau)
    bg = BackgroundField.constant(omega, tau_min, tau_max, n_tau)
    medium = MediumProfile.uniform(g, zeta_end * 1.25)
    nu = make_detuning_distribution("sharp")
    n_zeta = _stable_n_zeta(
        zeta_end, g, width * math.sqrt(2.0), STABLE_ZETA_FACTOR
    )

    def run_fixed(modulus):
        p = SolitonParams.from_polar(modulus, argument)
        lp, lm = launch_pulse(p, bg, tau)
        res = propagate(
            lp, lm, tau, medium, nu, zeta_end, n_zeta,
            checkpoint_stride=n_zeta, extra_scale=modulus,
            norm_tol=1e-6, collect_conservation=False,
        )
        exact = evaluate_soliton(p, bg, medium, nu, tau, zeta_end)
        return max(
            float(np.max(np.abs(res.fields.omega_p[-1] - exact.omega_p))),
            float(np.max(np.abs(res.fields.omega_m[-1] - exact.omega_m))),
        ) / omega

    err_r = run_fixed(mod)
    err_r_half = run_fixed(mod_half_r)

    # (b) fixed r, grid halving from a deliberately coarse base
    def run_h(factor):
        return _oracle_run(
            mod,
            argument,
            omega,
            g,
            cfg["drift_widths"],
            cfg["h_margin_widths"],
            dtau=0.02 / factor,
            n_zeta=_stable_n_zeta(zeta_end, g, width, MARGINAL_ZETA_FACTOR) * factor,
            checkpoint_count=1,
        )["field_error"]

    err_h = run_h(1)
    err_h_half = run_h(2)
    return {
        "r_base_error": err_r,
        "r_half_error": err_r_half,
        "r_ratio": err_r / err_r_half,
        "h_base_error": err_h,
        "h_half_error": err_h_half,
        "h_ratio": err_h / err_h_half,
    }


def conservation_study(config: dict) -> dict:
    """Residual of the intensity/excitation conservation law over a
    full run, plus its decay rate under zeta refinement."""
    cfg = config["conservation"]
    argument = config["argument_rad"]
    base = _oracle_run(
        cfg["modulus_mhz"],
        argument,
        cfg["omega_mhz"],
        cfg["g_mhz2"],
        cfg["drift_widths"],
        cfg["margin_widths"],
        checkpoint_count=1,
        collect_conservation=True,
        compare=False,
    )
    cons = base["result"].conservation
    relative = cons.max_residual / cons.max_flux_gradient

    levels = []
    p = SolitonParams.from_polar(cfg["modulus_mhz"], argument)
    width = soliton_width_us(p, cfg["omega_mhz"] ** 2)
    g = cfg["g_mhz2"]
    drift = cfg["refine_drift_widths"] * width
    zeta_end = drift / (2.0 * g / cfg["omega_mhz"] ** 2 - 1.0)
    n_zeta0 = _stable_n_zeta(zeta_end, g, width, STABLE_ZETA_FACTOR)
    for level in range(cfg["refine_levels"]):
        run = _oracle_run(
            cfg["modulus_mhz"],
            argument,
            cfg["omega_mhz"],
            g,
            cfg["refine_drift_widths"],
            cfg["margin_widths"],
            n_zeta=n_zeta0 * 2**level,
            checkpoint_count=1,
            collect_conservation=True,
            compare=False,
        )
        c = run["result"].conservation
        levels.append(
            {
                "n_zeta": run["n_zeta"],
                "relative_residual": c.max_residual / c.max_flux_gradient,
            }
        )
    rates = [
        levels[i]["relative_residual"] / levels[i + 1]["relative_residual"]
        for i in range(len(levels) - 1)
    ]
    return {
        "relative_residual": relative,
        "max_residual": cons.max_residual,
        "max_flux_gradient": cons.max_flux_gradient,
        "refinement_levels": levels,
        "refinement_rates": rates,
        "min_rate": min(rates),
    }


def run_oracle(config: dict, out_dir=None, fmt: str = "csv") -> dict:
    vel = velocity_study(config)
    scaling = error_scaling_study(config)
    cons = conservation_study(config)
    checks = {
        "velocity_error": _check(
            vel["velocity_error"], config["velocity"]["tolerance"], "<="
        ),
        "velocity_linearity": _check(
            vel["linearity_error"], config["velocity"]["tolerance"], "<="
        ),
        "r_halving_ratio": _check(
            scaling["r_ratio"], config["error_scaling"]["r_ratio_min"], ">="
        ),
        "h_halving_ratio": _check(
            scaling["h_ratio"], config["error_scaling"]["h_ratio_min"], ">="
        ),
        "conservation_residual": _check(
            cons["relative_residual"],
            config["conservation"]["residual_tolerance"],
            "<=",
        ),
        "conservation_rate": _check(
            cons["min_rate"], config["conservation"]["rate_min"], ">="
        ),
    }
    summary = _summary(
        "oracle",
        config,
        checks,
        velocity=vel,
        error_scaling=scaling,
        conservation=cons,
    )
    if out_dir is not None:
        header = {"config_hash": summary["config_hash"], "scenario": "oracle"}
        columns = {
            "omega_mhz": [r["omega_mhz"] for r in vel["rows"]],
            "g_mhz2": [r["g_mhz2"] for r in vel["rows"]],
            "v_over_c": [r["v_over_c"] for r in vel["rows"]],
            "v_over_c_theory": [r["v_over_c_theory"] for r in vel["rows"]],
            "relative_error": [r["relative_error"] for r in vel["rows"]],
        }
        _emit(out_dir, "oracle_velocity", columns, header, summary, fmt)
    return summary


# ---------------------------------------------------------------------------
# stop-retrieve


def ramp_envelope(tau, t_start, t_ramp, t_hold):
    """C1 smoothstep envelope: on, ramp down, dark hold, ramp up, on."""
    tau = np.asarray(tau, dtype=float)
    down = np.clip((tau - t_start) / t_ramp, 0.0, 1.0)
    up = np.clip((tau - t_start - t_ramp - t_hold) / t_ramp, 0.0, 1.0)

    def smooth(u):
        return u * u * (3.0 - 2.0 * u)

    return 1.0 - smooth(down) + smooth(up)


def _retrieved_center(tau, omega_p, omega_m, search_from, min_s0):
    rec = stokes(omega_p, omega_m)
    mask = (tau >= search_from) & (rec.s0 >= min_s0)
    if not np.any(mask):
        raise TrackingError("no bright field beyond the dark window")
    ratio = np.where(rec.s0 > 0, rec.s3 / np.where(rec.s0 > 0, rec.s0, 1.0), 1.0)
    sub = np.where(mask, ratio, 1.0)
    imin = int(np.argmin(sub))
    return _parabolic_min(tau, sub, imin)


def run_stop_retrieve(config: dict, out_dir=None, fmt: str = "csv") -> dict:
    """Park the soliton by switching the background off, hold, retrieve.

    During the dark window the ground-state amplitudes must freeze; the
    retrieved twist position must depend only on the accumulated
    background intensity, hence be hold-time independent once the hold
    is subtracted through I(tau).
    """
    params = SolitonParams.from_polar(config["modulus_mhz"], config["argument_rad"])
    omega0 = config["omega_mhz"]
    g = config["g_mhz2"]
    nu = make_detuning_distribution("sharp")
    width = soliton_width_us(params, omega0**2)
    drift = config["drift_widths"] * width
    zeta_end = drift / (2.0 * g / omega0**2 - 1.0)
    t_start = config["ramp_start_us"]
    t_ramp = config["ramp_time_us"]
    dtau = min(0.02, _tau_step(config["modulus_mhz"], omega0))
    n_zeta = _stable_n_zeta(zeta_end, g, width, STABLE_ZETA_FACTOR)

    runs = []
    for t_hold in config["hold_times_us"]:
        tau_min = -config["margin_widths"] * width
        tau_max = drift + t_hold + 2.0 * t_ramp + config["margin_widths"] * width
        n_tau = int((tau_max - tau_min) / dtau) + 1
        tau = np.linspace(tau_min, tau_max, n_tau)
        envelope = ramp_envelope(tau, t_start, t_ramp, t_hold)
        bg = BackgroundField(tau, (omega0 * envelope).astype(complex))
        medium = MediumProfile.uniform(g, zeta_end * 1.25)
        lp, lm = launch_pulse(params, bg, tau)
        result = propagate(
            lp, lm, tau, medium, nu, zeta_end, n_zeta,
            checkpoint_stride=n_zeta, extra_scale=config["modulus_mhz"],
            norm_tol=1e-6, collect_conservation=False,
        )
        # ground amplitudes over the interior of the dark window
        dark = (tau >= t_start + t_ramp + 1.0) & (
            tau <= t_start + t_ramp + t_hold - 1.0
        )
        psi = result.atoms.psi[-1][dark]
        amp_drift = 0.0
        if psi.shape[0] > 1:
            amp_drift = max(
                float(np.max(np.abs(np.diff(psi[:, :, 1], axis=0)))),
                float(np.max(np.abs(np.diff(psi[:, :, 2], axis=0)))),
            )
        center = _retrieved_center(
            tau,
            result.fields.omega_p[-1],
            result.fields.omega_m[-1],
            t_start + 2.0 * t_ramp + t_hold,
            0.5 * omega0**2,
        )
        bright_time = float(bg.intensity_integral_at(center)) / omega0**2
        # closed-form prediction: the twist sits where the accumulated
        # intensity balances the coupling integral
        cum = bg.intensity_integral_at(tau)
        predicted = float(np.interp(2.0 * g * zeta_end, cum, tau))
        runs.append(
            {
                "hold_us": t_hold,
                "amplitude_drift": amp_drift,
                "center_us": center,
                "predicted_center_us": predicted,
                "bright_time_us": bright_time,
            }
        )
    b0, b1 = (r["bright_time_us"] for r in runs)
    agreement = abs(b0 - b1) / b0
    pred_err = max(
        abs(r["center_us"] - r["predicted_center_us"]) / width for r in runs
    )
    checks = {
        "dark_window_drift": _check(
            max(r["amplitude_drift"] for r in runs),
            config["drift_tolerance"],
            "<=",
        ),
        "hold_time_independence": _check(
            agreement, config["position_tolerance"], "<="
        ),
        "predicted_center": _check(pred_err, config["position_tolerance"], "<="),
    }
    summary = _summary("stop-retrieve", config, checks, runs=runs)
    if out_dir is not None:
        header = {"config_hash": summary["config_hash"], "scenario": "stop-retrieve"}
        columns = {
            "hold_us": [r["hold_us"] for r in runs],
            "center_us": [r["center_us"] for r in runs],
            "predicted_center_us": [r["predicted_center_us"] for r in runs],
            "bright_time_us": [r["bright_time_us"] for r in runs],
            "amplitude_drift": [r["amplitude_drift"] for r in runs],
        }
        _emit(out_dir, "stop_retrieve", columns, header, summary, fmt)
    return summary


# ---------------------------------------------------------------------------
# lax


def run_lax(config: dict, out_dir=None, fmt: str = "csv") -> dict:
    """Zero-curvature residual refinement on an analytic history, with
    a corrupted-field negative control."""
    params = SolitonParams.from_polar(config["modulus_mhz"], config["argument_rad"])
    omega = config["omega_mhz"]
    g = config["g_mhz2"]
    nu = make_detuning_distribution("sharp")
    width = soliton_width_us(params, omega**2)
    bg = BackgroundField.constant(omega, -30.0 * width, 30.0 * width, 4001)
    medium = MediumProfile.uniform(g, 10.0)
    history = AnalyticHistory(params, bg, medium, nu)
    zc = 2.0
    points = [
        (f * width, zc + dz)
        for f in (-1.0, -0.3, 0.0, 0.3, 1.0)
        for dz in (0.0, 0.3)
    ]
    rows = refinement_table(
        history,
        config["spectral_delta_mhz"],
        config["h_tau_us"],
        config["h_zeta_us"],
        points,
        levels=config["levels"],
    )
    slope = loglog_slope(rows)
    clean = refinement_table(
        history,
        config["spectral_delta_mhz"],
        config["control_h_tau_us"],
        config["control_h_zeta_us"],
        points,
        levels=1,
    )[0]["max_residual"]
    corrupted = refinement_table(
        CorruptedHistory(history, config["control_scale"]),
        config["spectral_delta_mhz"],
        config["control_h_tau_us"],
        config["control_h_zeta_us"],
        points,
        levels=1,
    )[0]["max_residual"]
    checks = {
        "refinement_slope": _check(slope, tuple(config["slope_range"]), "in"),
        "control_ratio": _check(
            corrupted / clean, config["control_ratio_min"], ">="
        ),
    }
    table = [
        {
            "h_tau": r["h_tau"],
            "h_zeta": r["h_zeta"],
            "max_residual": r["max_residual"],
            "mean_residual": r["mean_residual"],
        }
        for r in rows
    ]
    summary = _summary(
        "lax",
        config,
        checks,
        slope=slope,
        clean_residual=clean,
        corrupted_residual=corrupted,
        table=table,
    )
    if out_dir is not None:
        header = {"config_hash": summary["config_hash"], "scenario": "lax"}
        columns = {
            "h_tau": [r["h_tau"] for r in table],
            "h_zeta": [r["h_zeta"] for r in table],
            "spectral_delta": [config["spectral_delta_mhz"]] * len(table),
            "max_residual": [r["max_residual"] for r in table],
            "mean_residual": [r["mean_residual"] for r in table],
        }
        _emit(out_dir, "lax_refinement", columns, header, summary, fmt)
    return summary


# ---------------------------------------------------------------------------
# modes


def _bracket_deviation(modulus, argument, omega, window_widths, n_points):
    params = SolitonParams.from_polar(modulus, argument)
    width = soliton_width_us(params, omega**2)
    tau = np.linspace(-window_widths * width, window_widths * width, n_points)
    bg = BackgroundField.constant(omega, float(tau[0]), float(tau[-1]), n_points)
    nu = make_detuning_distribution("sharp")
    modes = [mode_field(params, bg, None, nu, a, tau) for a in PARAMETERS]
    report = symplectic_check_and_rescale(bracket_matrix(modes), params)
    return modes, report


def run_modes(config: dict, out_dir=None, fmt: str = "csv") -> dict:
    """Bracket matrix of the four parameter modes against the canonical
    symplectic pattern, with r-halving and a perturbed negative control."""
    omega = config["omega_mhz"]
    modes, report = _bracket_deviation(
        config["modulus_mhz"],
        config["argument_rad"],
        omega,
        config["window_widths"],
        config["n_points"],
    )
    _, report_half = _bracket_deviation(
        config["modulus_mhz"] * math.sqrt(2.0),
        config["argument_rad"],
        omega,
        config["window_widths"],
        config["n_points"],
    )
    scale = config["control_scale"]
    perturbed = [
        FluctuationMode(m.alpha, m.tau, scale * m.d_omega_p, scale * m.d_omega_m)
        if m.alpha == "q0"
        else m
        for m in modes
    ]
    control = symplectic_check_and_rescale(
        bracket_matrix(perturbed), tol=config["tolerance"]
    )
    checks = {
        "canonical_deviation": _check(
            report.max_deviation, config["tolerance"], "<="
        ),
        "r_halving_monotone": _check(
            report_half.max_deviation, report.max_deviation, "<="
        ),
        "control_fails": _check(
            control.max_deviation, config["tolerance"], ">="
        ),
    }
    summary = _summary(
        "modes",
        config,
        checks,
        bracket=report.matrix.values.tolist(),
        max_deviation=report.max_deviation,
        max_deviation_half_r=report_half.max_deviation,
        worst_pair=list(report.worst_pair),
        control_deviation=control.max_deviation,
    )
    if out_dir is not None:
        header = {"config_hash": summary["config_hash"], "scenario": "modes"}
        mat = report.matrix.values
        columns = {"pair_" + b: mat[:, j] for j, b in enumerate(PARAMETERS)}
        columns = {"alpha": np.arange(4.0), **columns}
        _emit(out_dir, "modes_bracket", columns, header, summary, fmt)
    return summary


# ---------------------------------------------------------------------------
# feasibility


def run_feasibility(config: dict, out_dir=None, fmt: str = "csv") -> dict:
    """Velocity, length, loss, and excitation numbers for a concrete
    medium, with a loss-budget warning."""
    params = SolitonParams.from_polar(config["modulus_mhz"], config["argument_rad"])
    omega = config["omega_mhz"]
    atomic_cfg = config.get("atomic") or {}
    if config.get("g_mhz2") is not None:
        g = config["g_mhz2"]
        density = atomic_cfg.get("density_per_m3", 1.0e18)
        wavelength = atomic_cfg.get("wavelength_m", 5.89e-7)
    else:
        data = AtomicData(
            atomic_cfg["einstein_a_per_s"],
            atomic_cfg["density_per_m3"],
            atomic_cfg["wavelength_m"],
        )
        g = coupling_from_atomic_data(data)
        density = data.density
        wavelength = data.wavelength
    nu = make_detuning_distribution("sharp")
    v_over_c = soliton_velocity(params, g, nu, omega**2)
    numbers = soliton_length_and_loss(
        params, g, nu, omega**2, v_over_c, density, wavelength,
        config["distance_m"],
    )
    budget = config["loss_budget"]
    # minimal soliton length keeping the loss inside the budget
    n_lambda3 = density * wavelength**3
    ls_min = math.sqrt(
        32.0 * math.pi * config["distance_m"] * wavelength / (n_lambda3 * budget)
    )
    bg = BackgroundField.constant(omega, -1.0, 1.0, 11)
    regime = validate_regime(params, bg, g, nu)
    checks = {
        "within_loss_budget": _check(numbers.fractional_loss, budget, "<="),
    }
    summary = _summary(
        "feasibility",
        config,
        checks,
        g_mhz2=g,
        v_over_c=v_over_c,
        soliton_length_m=numbers.length_m,
        soliton_length_c_us=numbers.length_c_us,
        fractional_loss=numbers.fractional_loss,
        peak_excited_population=numbers.peak_excited_population,
        min_length_for_budget_m=ls_min,
        background_ratio_r=regime.background_ratio,
        warnings=list(regime.warnings),
    )
    if out_dir is not None:
        header = {"config_hash": summary["config_hash"], "scenario": "feasibility"}
        columns = {
            "g_mhz2": [g],
            "v_over_c": [v_over_c],
            "soliton_length_m": [numbers.length_m],
            "fractional_loss": [numbers.fractional_loss],
            "peak_excited_population": [numbers.peak_excited_population],
            "min_length_for_budget_m": [ls_min],
        }
        _emit(out_dir, "feasibility", columns, header, summary, fmt)
    return summary


# ---------------------------------------------------------------------------


RUNNERS = {
    "figure1": run_figure1,
    "oracle": run_oracle,
    "stop-retrieve": run_stop_retrieve,
    "lax": run_lax,
    "modes": run_modes,
    "feasibility": run_feasibility,
}


def _emit(out_dir, stem, columns, header, summary, fmt):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt in ("csv", "bin"):
        write_csv(out_dir / f"{stem}.csv", columns, header)
    write_json(out_dir / f"{stem}_summary.json", _jsonable(summary))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj
