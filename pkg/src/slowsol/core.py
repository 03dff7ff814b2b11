"""Unit conventions, detuning distributions, medium profiles, regime checks.

Working units throughout the package:

* time in microseconds (us)
* frequencies (Rabi frequencies, spectral parameters, detunings) in MHz
* coupling constant g in MHz^2
* propagation coordinate zeta = z/c in microseconds

With these choices MHz * us = 1 exactly, so no conversion factor appears
in any downstream formula.  Physical lengths are reported in metres via
the speed of light; one c*us equals 299.792458 m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .errors import DistributionError, GridError

if TYPE_CHECKING:
    from .analytic import BackgroundField, SolitonParams

# CODATA values, fixed and not user-configurable.
C_M_PER_S = 2.99792458e8
HBAR_J_S = 1.054571817e-34
EPS0_F_PER_M = 8.8541878128e-12

#: metres per unit of the propagation coordinate (c * 1 us)
METERS_PER_C_US = C_M_PER_S * 1e-6

#: 1 MHz expressed in s^-1
MHZ_TO_PER_S = 1e6

# Lorentzian distributions are truncated at this many widths and
# renormalized; the tails contribute quadratically decaying integrands
# everywhere they are used.
LORENTZIAN_SUPPORT_WIDTHS = 8.0


def meters_from_c_us(length_c_us: float) -> float:
    return length_c_us * METERS_PER_C_US


def c_us_from_meters(length_m: float) -> float:
    return length_m / METERS_PER_C_US


@dataclass(frozen=True)
class DetuningDistribution:
    """Quadrature representation of the detuning distribution.

    ``sum(weights) == 1`` so that integrating any function against the
    distribution is the plain weighted sum ``sum(w_k * f(nodes_k))``.
    """

    kind: str
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise DistributionError("nodes and weights must be 1-d and congruent")
        if nodes.size == 0:
            raise DistributionError("empty distribution")
        if np.any(np.diff(nodes) <= 0):
            raise DistributionError("nodes must be strictly increasing")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise DistributionError("weights must sum to 1 within 1e-12")
        if self.kind == "sharp" and not (
            nodes.size == 1 and nodes[0] == 0.0 and weights[0] == 1.0
        ):
            raise DistributionError("sharp line must be a single node at 0")
        nodes.flags.writeable = False
        weights.flags.writeable = False

    @property
    def is_sharp(self) -> bool:
        return self.kind == "sharp"

    def mean(self, values: np.ndarray) -> np.ndarray:
        """Weighted sum over the detuning axis (assumed to be the last)."""
        return np.asarray(values) @ self.weights


def make_detuning_distribution(
    kind: str, width: float | None = None, node_count: int = 1
) -> DetuningDistribution:
    """Build a normalized node/weight set for the detuning distribution.

    ``kind`` is one of ``sharp``, ``gaussian`` or ``lorentzian``.  The
    symmetric kinds require an odd ``node_count`` so that zero detuning
    is always a node.  ``width`` is the Gaussian standard deviation or
    the Lorentzian half width, in MHz.
    """
    if node_count < 1:
        raise DistributionError("node_count must be >= 1")
    if kind == "sharp":
        return DetuningDistribution("sharp", np.array([0.0]), np.array([1.0]))
    if width is None or width <= 0.0:
        raise DistributionError(f"{kind} distribution needs a positive width")
    if node_count % 2 == 0:
        raise DistributionError(
            "symmetric distributions need an odd node_count so that 0 is a node"
        )
    if kind == "gaussian":
        x, w = np.polynomial.hermite.hermgauss(node_count)
        nodes = math.sqrt(2.0) * width * x
        weights = w / math.sqrt(math.pi)
    elif kind == "lorentzian":
        # Symmetric rational map clustering nodes near zero detuning,
        # trapezoid weights, support truncated at +-8 widths.
        t = np.linspace(-1.0, 1.0, node_count)
        nodes = LORENTZIAN_SUPPORT_WIDTHS * width * t / (4.0 - 3.0 * t * t)
        jac = (
            LORENTZIAN_SUPPORT_WIDTHS
            * width
            * (4.0 + 3.0 * t * t)
            / (4.0 - 3.0 * t * t) ** 2
        )
        dens = (width / math.pi) / (nodes**2 + width**2)
        dt = t[1] - t[0] if node_count > 1 else 1.0
        w = dens * jac * dt
        if node_count > 1:
            w[0] *= 0.5
            w[-1] *= 0.5
        weights = w
    else:
        raise DistributionError(f"unknown distribution kind {kind!r}")
    weights = weights / weights.sum()
    return DetuningDistribution(kind, nodes, weights)


@dataclass(frozen=True)
class MediumProfile:
    """Coupling density g(zeta) along the propagation coordinate.

    The medium entry sits at zeta = 0; g vanishes outside the sampled
    grid.  The cumulative integral int_0^zeta g dzeta' is precomputed by
    trapezoid and interpolated linearly.
    """

    zeta: np.ndarray
    g: np.ndarray
    _cum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        zeta = np.asarray(self.zeta, dtype=float)
        g = np.asarray(self.g, dtype=float)
        if zeta.ndim != 1 or zeta.shape != g.shape or zeta.size < 2:
            raise GridError("zeta and g must be congruent 1-d arrays (>= 2 points)")
        if np.any(np.diff(zeta) <= 0):
            raise GridError("zeta grid must be strictly increasing")
        if np.any(g < 0):
            raise GridError("coupling density must be non-negative")
        cum = np.concatenate(
            [[0.0], np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(zeta))]
        )
        cum = cum - np.interp(0.0, zeta, cum)
        for name, arr in (("zeta", zeta), ("g", g), ("_cum", cum)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def uniform(cls, g: float, zeta_end: float, n: int = 2) -> "MediumProfile":
        return cls(np.linspace(0.0, zeta_end, max(n, 2)), np.full(max(n, 2), g))

    def g_at(self, zeta) -> np.ndarray:
        return np.interp(zeta, self.zeta, self.g, left=0.0, right=0.0)

    def coupling_integral_at(self, zeta) -> np.ndarray:
        """int_0^zeta g(z') dz', constant beyond the sampled grid."""
        return np.interp(zeta, self.zeta, self._cum)


@dataclass(frozen=True)
class AtomicData:
    """SI-unit atomic inputs for the coupling and loss estimates."""

    einstein_a: float  # s^-1
    density: float  # m^-3
    wavelength: float  # m
    cross_section: float | None = None  # m^2, only used for mode rescaling

    def __post_init__(self) -> None:
        if self.einstein_a <= 0 or self.wavelength <= 0:
            raise ValueError("Einstein A and wavelength must be positive")
        if self.density < 0:
            raise ValueError("density must be non-negative")
        if self.cross_section is not None and self.cross_section <= 0:
            raise ValueError("cross section must be positive")


def coupling_from_atomic_data(data: AtomicData) -> float:
    """Coupling constant g in MHz^2 from Einstein A, density, wavelength.

    g = 3/(16 pi) * c * A * n * lambda^2, evaluated in SI and converted.
    """
    g_si = (
        3.0
        / (16.0 * math.pi)
        * C_M_PER_S
        * data.einstein_a
        * data.density
        * data.wavelength**2
    )
    return g_si / MHZ_TO_PER_S**2


@dataclass(frozen=True)
class RegimeReport:
    """Validity-of-approximation summary; report only, never raises."""

    background_ratio: float  # max |Omega|^2 / (xi^2 + eta^2)
    v_over_c: float
    peak_excited_population: float
    warnings: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.warnings


def validate_regime(
    params: "SolitonParams",
    background: "BackgroundField",
    g: float,
    nu: DetuningDistribution,
) -> RegimeReport:
    """Check the weak-background and slow-soliton conditions.

    Flags a warning when the intensity ratio exceeds 0.05 or the
    soliton speed exceeds 0.1 c.
    """
    from .analytic import soliton_velocity

    peak_intensity = float(np.max(np.abs(background.omega) ** 2))
    ratio = peak_intensity / params.spectral_sq
    v_over_c = soliton_velocity(params, g, nu, peak_intensity)
    ls_c_us = 4.0 * params.spectral_sq * v_over_c / (params.eta * peak_intensity)
    peak_pop = 2.0 * v_over_c / (g * ls_c_us**2)
    warnings = []
    if ratio > 0.05:
        warnings.append(
            f"background intensity ratio {ratio:.3g} exceeds 0.05; the "
            "closed-form solution degrades"
        )
    if v_over_c > 0.1:
        warnings.append(f"v/c = {v_over_c:.3g} exceeds 0.1; velocity formula degrades")
    return RegimeReport(ratio, v_over_c, peak_pop, tuple(warnings))
