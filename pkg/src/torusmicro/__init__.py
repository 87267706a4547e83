"""Numerical laboratory for frequency-set concentration on the torus.

Band-limited functions on (R/2piZ)^n, exact lattice quantization of
windowed symbols, directional-regularity measurements at linear coisotropic
submanifolds, blowup-style coordinate charts, split Hamiltonian flows, and
decay-rate detection of where semiclassical families concentrate.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .charts import (
    ChartDomainError,
    LiftCheck,
    PolarChart,
    PolarPoint,
    ProjectiveChart,
    ProjectivePoint,
    REGISTERED_CHART_FUNCTIONS,
    from_polar,
    from_projective,
    lift_check,
    to_polar,
    to_projective,
)
from .coisotropic import (
    LinearCoisotropic,
    RegularityEntry,
    RegularityReport,
    apply_generator_monomial,
    characteristic_apply,
    multi_indices,
    regularity_norm,
    regularity_order,
)
from .config import ConfigError, ExperimentConfig, load_config
from .fields import (
    SemiclassicalFamily,
    TorusFunction,
    inner_product,
    l2_norm,
    make_plane_wave_family,
    make_uk,
    make_uk_family,
    make_wavepacket_family,
    make_zero_family,
    semiclassical_fourier,
)
from .fitting import FitResult, fit_loglog
from .hamilton import (
    CancellationCheck,
    ChartSymbol,
    CodimTwoPolarField,
    CommutationCheck,
    PrincipalSymbol,
    Trajectory,
    VectorFieldSplit,
    cancellation_check,
    commutation_check,
    flow,
    free_particle,
    linear_drift,
    make_x_perturbation,
    quartic_radial,
    rescaled_field,
    standard_codim2,
    taylor_split,
)
from .profiles import (
    AngularWindowProfile,
    CallableProfile,
    GaussianBumpProfile,
    PolynomialProfile,
    Profile,
    ProductProfile,
    RadialPlateauProfile,
    SerializationError,
    SmoothstepHalflineProfile,
    SumProfile,
    conjugate_profile,
    constant_profile,
    coordinate_profile,
    profile_from_spec,
    scale_profile,
    smoothstep,
    smoothstep_slope,
)
from .quantize import (
    CommutatorCheck,
    CompositionCheck,
    QuantizationKind,
    Symbol,
    TruncationError,
    adjoint_apply,
    apply,
    commutator_check,
    compose_numeric,
    multiplier,
    operator_matrix,
    poisson_bracket,
    symbol_product,
    symbol_sum,
    symbol_x_derivative,
    symbol_xi_derivative,
)
from .serialize import (
    family_from_dict,
    family_to_dict,
    function_from_dict,
    function_to_dict,
    load_json,
    save_json,
    symbol_from_dict,
    symbol_to_dict,
)
from .wavefront import (
    ClassifyConfig,
    DecayFit,
    ProbePoint,
    ProbeWidths,
    PropagationReport,
    PropagationRow,
    WavefrontVerdict,
    boundary_grid,
    classify,
    decay_fit,
    interior_grid,
    probe_symbol,
    quasimode_defect_symbol,
    verify_propagation,
    wf_scan,
)

__all__ = [name for name in dir() if not name.startswith("_")]
