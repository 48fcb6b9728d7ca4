"""Spectral toolkit for the nonlocal Fornberg-Whitham equation

    u_t + (3/2) u u_x = (1 - d_xx)^{-1} d_x u

on a large periodic box: Littlewood-Paley blocks and Besov norms, the
initial-data families behind non-uniform dependence and norm inflation, an
RK4 pseudospectral solver, a Picard iteration, and reproducible experiment
runners.
"""

from .errors import (
    BreakingDetectedError,
    DivergenceDetectedError,
    FrequencyOverflowError,
    FWLabError,
    HypothesisViolationError,
    InsufficientResolutionError,
    InvalidArgumentError,
    NumericFaultError,
    OutOfWindowError,
)
from .spectral_core import (
    Field,
    Grid,
    apply_multiplier,
    dealias,
    derivative,
    lp_norm,
    make_grid,
    nonlocal_multiplier,
    nonlocal_velocity,
    spectral_tail_fraction,
    transform,
    translate,
)
from .littlewood_paley import (
    BesovParams,
    CutoffPair,
    besov_norm,
    block_norms,
    chi,
    cutoff_eval,
    dyadic_block,
    low_freq_sum,
    phi,
    sobolev_norm,
)
from .initial_data import (
    DataFamily,
    build_family,
    bump_profile,
    combined_data,
    cross_wave,
    high_freq_data,
    lacunary_data,
    localized_wave,
    low_freq_data,
    peakon_field,
    quadratic_drift,
)
from .fw_solver import (
    SolverConfig,
    Trajectory,
    diagnostics,
    integrate,
    linear_transport_solve,
    picard_differences,
    picard_horizon,
    picard_solve,
    rhs_eval,
)
from .experiments import (
    ExperimentConfig,
    ExperimentReport,
    default_config,
    emit_report,
    render_report,
    run_decay_check,
    run_experiment,
    run_illposed,
    run_localization,
    run_nonuniform,
    run_peakon,
    run_picard,
    run_picard_convergence,
)

__version__ = "0.1.0"
