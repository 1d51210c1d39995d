# Privacy package exports
from .context import PRIVACY_MODES, ContextReporter, PerturbedContext, perturb_context
from .histogram import Histogram, LinearQuery, dyadic_interval_queries, partition_queries
from .mechanisms import (
    dp_ratio_check,
    exponential_probabilities,
    exponential_select,
    k_rr,
    k_rr_estimate,
    k_rr_table,
    laplace_sample,
)
from .mwem import accuracy_bound, max_query_error, mwem

__all__ = [
    "PRIVACY_MODES",
    "ContextReporter",
    "PerturbedContext",
    "perturb_context",
    "Histogram",
    "LinearQuery",
    "dyadic_interval_queries",
    "partition_queries",
    "dp_ratio_check",
    "exponential_probabilities",
    "exponential_select",
    "k_rr",
    "k_rr_estimate",
    "k_rr_table",
    "laplace_sample",
    "accuracy_bound",
    "max_query_error",
    "mwem",
]
