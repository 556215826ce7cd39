"""Penalized-likelihood logistic regression for high-dimensional designs.

Fits logistic regressions by maximum likelihood and by Jeffreys-prior
penalized likelihood, detects data separation, classifies asymptotic ML
existence, and runs the simulation pipeline that estimates and validates
the power-law rescaling of the penalized estimator.
"""

__version__ = "0.1.0"

from .analysis import (
    DEFAULT_RESCALE_COEFFICIENTS,
    BcaInterval,
    PowerLawFit,
    RescaleCoefficients,
    aggregate_bias,
    aggregate_mse,
    bootstrap_bca,
    fit_power_law,
    out_of_sample_r2,
    rescale_estimates,
    shrinkage_factor,
)
from .experiments import (
    TEST_GRID_POINTS,
    AmseCell,
    PointSummary,
    ReplicationRecord,
    TrainingResult,
    nonexistence_design,
    run_amse_experiment,
    run_replication,
    run_test_experiment,
    run_training_experiment,
    space_filling_design,
)
from .glm import (
    FitResult,
    GammaFit,
    GlmControl,
    LogisticData,
    fit_gamma_log,
    fit_ml,
    fit_mjpl,
    jeffreys_penalty,
    log_likelihood,
    penalized_loglik,
    penalized_score,
)
from .phase import (
    ExistenceVerdict,
    PhasePoint,
    mc_existence_boundary,
    mle_existence_threshold,
    mle_exists_asymptotically,
)
from .separation import (
    LinearProgram,
    LpSolution,
    SeparationVerdict,
    detect_separation,
    solve_lp,
)
from .simulate import (
    GeneratedSample,
    SimConfig,
    derive_seed,
    generate_dataset,
    make_signal,
)

__all__ = [name for name in dir() if not name.startswith("_")]
