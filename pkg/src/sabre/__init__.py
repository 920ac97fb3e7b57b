"""SABRE: seriation by aggregating bisections and re-evaluating comparisons."""

from sabre.core import (
    ComparisonMatrix,
    Permutation,
    SymMatrix,
    oracle_comparison_matrix,
    permutation_from_comparison,
    permute_matrix,
    reverse_permutation,
    round_scores,
)
from sabre.distance import DistanceEstimate, estimate_distance, nn_proxy
from sabre.evaluate import (
    LossReport,
    l_frobenius,
    l_kendall,
    l_max,
    l_one,
    loss_report,
)
from sabre.models import (
    CheckReport,
    NoiseSpec,
    check_average_lipschitz,
    check_bilipschitz,
    check_local_distance_equivalence,
    check_robinson,
    fit_average_lipschitz,
    fit_bilipschitz,
    gen_example,
    gen_f_alpha,
    read_through,
    sample_approx_permutation,
    sample_observation,
)
from sabre.pipeline import (
    Diagnostics,
    SabreConfig,
    SabreResult,
    Tuning,
    default_tuning_approx,
    default_tuning_practical,
    default_tuning_theoretical,
    sabre,
)
from sabre.stage1 import Thresholds, aggregate, bisect_all, orient
from sabre.stage2 import evaluate_comparison, leave_one_out_plan, refine, tripartition

__all__ = [
    "CheckReport",
    "ComparisonMatrix",
    "Diagnostics",
    "DistanceEstimate",
    "LossReport",
    "NoiseSpec",
    "Permutation",
    "SabreConfig",
    "SabreResult",
    "SymMatrix",
    "Thresholds",
    "Tuning",
    "aggregate",
    "bisect_all",
    "check_average_lipschitz",
    "check_bilipschitz",
    "check_local_distance_equivalence",
    "check_robinson",
    "default_tuning_approx",
    "default_tuning_practical",
    "default_tuning_theoretical",
    "estimate_distance",
    "evaluate_comparison",
    "fit_average_lipschitz",
    "fit_bilipschitz",
    "gen_example",
    "gen_f_alpha",
    "l_frobenius",
    "l_kendall",
    "l_max",
    "l_one",
    "loss_report",
    "nn_proxy",
    "oracle_comparison_matrix",
    "orient",
    "permutation_from_comparison",
    "permute_matrix",
    "read_through",
    "reverse_permutation",
    "round_scores",
    "sabre",
    "sample_approx_permutation",
    "sample_observation",
]

__version__ = "0.1.0"
