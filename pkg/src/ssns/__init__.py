"""Pseudo-spectral laboratory for self-similar Navier-Stokes flows on a periodic box."""

from .spectral import (
    Grid,
    Mollifier,
    ScalarField,
    SpectralError,
    VelocityField,
    build_mollifier,
    dealias,
    divergence,
    divergence_sup,
    grad_norm_sq,
    inner_product,
    l2_norm,
    l2_norm_sq,
    leray_project,
    mollify,
    nonlinear_term,
    pressure_from_velocity,
    random_divergence_free,
    sup_norm,
    to_physical,
    to_spectral,
)
from .initial_data import (
    ContinuumEvaluator,
    InitialDataError,
    InitialDataSpec,
    Window,
    default_spec,
    l2_loc_unif_norm,
    localize,
    sample_u0_alpha,
    verify_homogeneity,
)
from .solver import (
    CflViolation,
    NanDetected,
    SolverConfig,
    SolverError,
    Trajectory,
    bump_test_function,
    energy_balance_residual,
    energy_monotone,
    geometric_times,
    heat_trajectory,
    linear_heat_solve,
    local_energy_residual,
    run,
    step,
)
from .diagnostics import (
    CommutationReport,
    DiagnosticsError,
    DyadicLadder,
    ParabolicCylinder,
    ProfileField,
    ScalingResidualReport,
    SerrinNorm,
    commutation_check,
    decay_law,
    extract_profile,
    l2loc_convergence,
    profile_collapse,
    rescale_field,
    scaling_residual,
    serrin_admissible,
    serrin_norm,
    singular_candidate_scan,
    trig_interpolate,
)

__version__ = "0.1.0"
