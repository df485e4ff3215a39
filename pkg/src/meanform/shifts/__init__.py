"""Symbolic weight-sequence calculus for weighted shifts."""
from .calculus import (
    BridgeReport,
    ShiftMeanLimit,
    ShiftRadius,
    bilateral_extremes,
    binomial_average,
    exp_log_bridge,
    periodic_mean_iterate,
    shift_aluthge_iterate_weights,
    shift_aluthge_weights,
    shift_exp_weights,
    shift_mean_iterate_weights,
    shift_mean_limit,
    shift_mean_weights,
    shift_spectral_radius,
    truncated_shift_matrix,
)
from .expr import evaluate, parse_weight_expr, to_source
from .weights import ExplicitList, Expression, Periodic, WeightSequence, parse_weight_spec

__all__ = [
    "BridgeReport", "ExplicitList", "Expression", "Periodic", "ShiftMeanLimit", "ShiftRadius",
    "WeightSequence", "bilateral_extremes", "binomial_average", "evaluate", "exp_log_bridge", "periodic_mean_iterate",
    "parse_weight_expr", "parse_weight_spec", "shift_aluthge_iterate_weights",
    "shift_aluthge_weights", "shift_exp_weights", "shift_mean_iterate_weights",
    "shift_mean_limit", "shift_mean_weights", "shift_spectral_radius", "to_source",
    "truncated_shift_matrix",
]
