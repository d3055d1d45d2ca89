"""Composition operators on weighted Bergman spaces: self-maps, counting functions,
classification criteria and truncated matrices."""
from .counting import (
    CountingFunction,
    LittlewoodReport,
    counting_direct,
    counting_integral,
    jump_radii,
    littlewood_check,
    littlewood_grid,
)
from .criteria import (
    DEEP_RINGS,
    DEFAULT_RINGS,
    AngularDerivativeReport,
    BelowIndexReport,
    ClassificationReport,
    CompactnessReport,
    Condition113Report,
    EssentialNormReport,
    HilbertSchmidtReport,
    OperatorNormReport,
    SchattenReport,
    angular_derivative_scan,
    below_index_quantity,
    classification_quantities,
    column_norms_squared,
    compactness_classifier,
    condition_113,
    default_eta,
    essential_norm_quantities,
    hilbert_schmidt_check,
    operator_norm_estimate,
    ring_radii,
    schatten_criterion,
)
from .maps import SelfMap
from .matrix import CompositionMatrix, composition_matrix

__all__ = [
    "DEEP_RINGS", "DEFAULT_RINGS", "AngularDerivativeReport", "BelowIndexReport",
    "ClassificationReport", "CompactnessReport", "CompositionMatrix", "Condition113Report",
    "CountingFunction", "EssentialNormReport", "HilbertSchmidtReport", "LittlewoodReport",
    "OperatorNormReport", "SchattenReport", "SelfMap", "angular_derivative_scan",
    "below_index_quantity", "classification_quantities", "column_norms_squared",
    "compactness_classifier", "composition_matrix", "condition_113", "counting_direct",
    "counting_integral", "default_eta", "essential_norm_quantities", "hilbert_schmidt_check",
    "jump_radii", "littlewood_check", "littlewood_grid", "operator_norm_estimate", "ring_radii",
    "schatten_criterion",
]
