"""Mean transform laboratory: polar decompositions, mean and Aluthge transforms,
their iterates, numerical ranges, and weighted-shift weight calculus."""
from .classes import classify, is_p_hyponormal, is_partial_isometry, is_quasinormal, kernel_inclusion_check
from .linalg import eigenvalues_general, hermitian_eig, operator_norm, psd_power
from .numrange import (
    in_closure_numrange,
    numerical_radius,
    numerical_range_boundary,
    spectral_radius,
)
from .polar import (
    aluthge_transform,
    binomial_iterate,
    canonical_polar,
    mean_iterates,
    mean_limit_estimate,
    mean_transform,
    partial_isometry_mean,
    rank_one_mean_iterate,
)

__version__ = "0.1.0"
