"""Bounded noncommutative functions on operator balls.

Free polynomials and power series evaluated on tuples of matrices,
transfer-function realizations with resolvent-based evaluation, matrix
balls cut out by linear pencils, difference operators via block upper
triangular points, numerical probes for sup norms and boundary blowup,
and varieties cut out by polynomial relations inside a ball.
"""

from .freealg import (
    BudgetExceededError,
    FreePolynomial,
    PolyParseError,
    Word,
    cesaro_sum,
    compose,
    format_poly,
    from_triples,
    homogeneous_component,
    left_divide,
    parse,
    to_triples,
    words_of_size,
)
from .mattuple import (
    MatrixTuple,
    ampliation,
    direct_sum,
    eval_poly,
    eval_word,
    is_nilpotent,
    point_from_dict,
    similarity,
    sup_norm,
    to_point_dict,
)
from .ncdiff import (
    TTReport,
    d1_difference_quotient,
    delta_first,
    gleason_split,
    nc_eval,
    pair_derivative,
    pair_point,
    tt_check,
)
from .opball import (
    BallMembership,
    OperatorBall,
    Pencil,
    ball_from_shorthand,
    ball_shorthand,
    factor_two_check,
    membership,
    pencil_eval,
    pencil_from_dict,
    pencil_to_dict,
    polydisk,
    row_ball,
    state_compression,
    ucp_compression,
)
from .probe import (
    BlowupReport,
    DichotomyResult,
    ProbeReport,
    RegularityReport,
    blowup_scan,
    builtin_dichotomy_case,
    corner_path,
    dichotomy_scan,
    estimate_sup,
    regularity_factors,
    sample_in_ball,
)
from .realize import (
    BUILTIN_REALIZATIONS,
    IllConditionedError,
    Realization,
    bidisk_witness,
    bidisk_witness_closed_form,
    make_realization,
    realization_from_dict,
    realization_to_dict,
    taylor_polynomial,
)
from .varieties import (
    AlgebraicVariety,
    HomogeneityReport,
    apply_poly_map,
    generator_defect,
    homogeneity_sample,
    parabola_cubic_pair,
    variety_from_dict,
    variety_membership,
    variety_to_dict,
)

__version__ = "0.1.0"

__all__ = [
    "AlgebraicVariety",
    "BUILTIN_REALIZATIONS",
    "BallMembership",
    "BlowupReport",
    "BudgetExceededError",
    "DichotomyResult",
    "FreePolynomial",
    "HomogeneityReport",
    "IllConditionedError",
    "MatrixTuple",
    "OperatorBall",
    "Pencil",
    "PolyParseError",
    "ProbeReport",
    "Realization",
    "RegularityReport",
    "TTReport",
    "Word",
    "ampliation",
    "apply_poly_map",
    "ball_from_shorthand",
    "ball_shorthand",
    "bidisk_witness",
    "bidisk_witness_closed_form",
    "blowup_scan",
    "builtin_dichotomy_case",
    "cesaro_sum",
    "compose",
    "corner_path",
    "d1_difference_quotient",
    "delta_first",
    "dichotomy_scan",
    "direct_sum",
    "estimate_sup",
    "eval_poly",
    "eval_word",
    "factor_two_check",
    "format_poly",
    "from_triples",
    "generator_defect",
    "gleason_split",
    "homogeneity_sample",
    "homogeneous_component",
    "is_nilpotent",
    "left_divide",
    "make_realization",
    "membership",
    "nc_eval",
    "pair_derivative",
    "pair_point",
    "parabola_cubic_pair",
    "parse",
    "pencil_eval",
    "pencil_from_dict",
    "pencil_to_dict",
    "point_from_dict",
    "polydisk",
    "realization_from_dict",
    "realization_to_dict",
    "regularity_factors",
    "row_ball",
    "sample_in_ball",
    "similarity",
    "state_compression",
    "sup_norm",
    "taylor_polynomial",
    "tt_check",
    "to_point_dict",
    "to_triples",
    "ucp_compression",
    "variety_from_dict",
    "variety_membership",
    "variety_to_dict",
    "words_of_size",
]
