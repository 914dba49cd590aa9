"""Finite-field simplex counting and character-sum verification toolkit."""

from .field import PrimeField
from .linalg import (
    Simplex,
    Subspace,
    construct_extremal_simplex,
    construct_self_dual_subspace,
    dot,
    extend_isometry,
    gram_matrix,
    is_isometric,
    is_isometric_ordered,
    length_sq,
    make_simplex,
    orthogonal_complement,
    reorder_for_prefix_ranks,
    simplex_rank,
    subspace_span,
)
from .fourier import DenseFunction, average, convolve, fourier_transform, inverse_transform, plancherel_check
from .charsums import gauss_sum, quadratic_sum_closed_form, twisted_kloosterman, weil_bound_audit
from .measures import (
    build_conditional,
    build_sigma,
    detection_product,
    verify_conditional_asymptotic,
    verify_sphere_asymptotic,
)
from .counting import (
    CountReport,
    PointSet,
    count_isometric_copies,
    random_set_experiment,
    s_weight,
    script_S,
    starred_average,
    verify_count_asymptotic,
    verify_dependent_bound,
    verify_error_lemma,
)

__version__ = "0.1.0"

__all__ = [
    "PrimeField",
    "Simplex",
    "Subspace",
    "DenseFunction",
    "PointSet",
    "CountReport",
    "average",
    "build_conditional",
    "build_sigma",
    "construct_extremal_simplex",
    "construct_self_dual_subspace",
    "convolve",
    "count_isometric_copies",
    "detection_product",
    "dot",
    "extend_isometry",
    "fourier_transform",
    "gauss_sum",
    "gram_matrix",
    "inverse_transform",
    "is_isometric",
    "is_isometric_ordered",
    "length_sq",
    "make_simplex",
    "orthogonal_complement",
    "plancherel_check",
    "quadratic_sum_closed_form",
    "random_set_experiment",
    "reorder_for_prefix_ranks",
    "s_weight",
    "script_S",
    "simplex_rank",
    "starred_average",
    "subspace_span",
    "twisted_kloosterman",
    "verify_conditional_asymptotic",
    "verify_count_asymptotic",
    "verify_dependent_bound",
    "verify_error_lemma",
    "verify_sphere_asymptotic",
    "weil_bound_audit",
]
