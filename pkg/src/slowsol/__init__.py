"""slowsol: slow-light polarization solitons in a three-level medium.

Closed-form soliton evaluation, direct integration of the coupled
field/atom equations in retarded coordinates, a zero-curvature
(integrability) verifier, fluctuation-mode symplectic checks, and
feasibility estimates, all in MHz/microsecond units.
"""

from .analytic import (
    BackgroundField,
    SolitonParams,
    SolitonState,
    StokesRecord,
    apply_polarization_frame,
    evaluate_soliton,
    launch_pulse,
    soliton_length_and_loss,
    soliton_velocity,
    stokes,
)
from .core import (
    AtomicData,
    DetuningDistribution,
    MediumProfile,
    RegimeReport,
    coupling_from_atomic_data,
    make_detuning_distribution,
    validate_regime,
)
from .dynamics import (
    AtomGrid,
    DynamicsReport,
    FieldGrid,
    PropagationResult,
    analyze_history,
    dark_state,
    liouville_step,
    polarization_source,
    propagate,
    track_soliton_centers,
)
from .errors import SlowsolError
from .lax import (
    AnalyticHistory,
    LaxPairSample,
    build_lax_pair,
    refinement_table,
    zero_curvature_residual,
)
from .modes import (
    BracketMatrix,
    FluctuationMode,
    QuantumScale,
    bracket_matrix,
    mode_field,
    symplectic_check_and_rescale,
)

__version__ = "0.1.0"

__all__ = [
    "AtomGrid",
    "AtomicData",
    "AnalyticHistory",
    "BackgroundField",
    "BracketMatrix",
    "DetuningDistribution",
    "DynamicsReport",
    "FieldGrid",
    "FluctuationMode",
    "LaxPairSample",
    "MediumProfile",
    "PropagationResult",
    "QuantumScale",
    "RegimeReport",
    "SlowsolError",
    "SolitonParams",
    "SolitonState",
    "StokesRecord",
    "analyze_history",
    "apply_polarization_frame",
    "bracket_matrix",
    "build_lax_pair",
    "coupling_from_atomic_data",
    "dark_state",
    "evaluate_soliton",
    "launch_pulse",
    "liouville_step",
    "make_detuning_distribution",
    "mode_field",
    "polarization_source",
    "propagate",
    "refinement_table",
    "soliton_length_and_loss",
    "soliton_velocity",
    "stokes",
    "symplectic_check_and_rescale",
    "track_soliton_centers",
    "validate_regime",
    "zero_curvature_residual",
]
