"""Clique matrix decomposition and constrained covariance fitting."""

from ._core import (
    ConfigError,
    DimensionError,
    Error,
    ExpansionTooLargeError,
    NotDecomposableError,
    NumericalError,
    ParseError,
    beta_bernoulli_log_prior,
    covariance_mask,
    expand_clique_matrix,
    fit_covariance,
    four_cycle,
    heaviside_reconstruct,
    incidence_matrix,
    is_valid_clique_matrix,
    kappa,
    log_likelihood,
    perfect_elimination_order,
    rms_error,
    run_replication,
    solve_auto_c,
    solve_fixed_c,
)

__all__ = [name for name in dir() if not name.startswith("_")]
