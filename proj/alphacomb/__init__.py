"""Optimal alpha-weight combination via the O(M^2 N) regression pipeline."""

from ._core import (
    NumericError,
    ParseError,
    ValidationError,
    benchmark_weights,
    combine,
    correlation_pcs,
    dense_oracle_weights,
    exact_factor_weights,
    gen_synthetic,
    one_factor_weights,
    set_dense_cap,
    set_num_threads,
)

__all__ = [
    "NumericError",
    "ParseError",
    "ValidationError",
    "benchmark_weights",
    "combine",
    "correlation_pcs",
    "dense_oracle_weights",
    "exact_factor_weights",
    "gen_synthetic",
    "one_factor_weights",
    "set_dense_cap",
    "set_num_threads",
]
