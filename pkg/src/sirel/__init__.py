"""sirel: simultaneous integer relation detection.

Find a nonzero integer vector orthogonal to t given real n-vectors at once,
or prove that none exists below a certified norm bound; apply the detector
to recover exact minimal polynomials of approximately known complex
algebraic numbers.
"""

from .arith import (NumericStateError, PrecisionContext, PrecisionError,
                    is_negligible, nearest_int)
from .engine import (DetectionState, EngineConfig, Exhausted, Found,
                     detect_sir, detect_sir_permuted, initial_state,
                     iterate_once, iteration_budget, pi_value, run_two_level,
                     termination_check)
from .hyperplane import (InputMatrix, LinearDependenceError,
                         MinorConditionError, check_minor, hyperplane_matrix,
                         permute_for_minor)
from .minpoly import (ApproxAlgebraicNumber, IntegerPolynomial,
                      RelationNotFound, VerificationError,
                      build_power_vectors, minimal_polynomial, primitive_part)
from .oracle import (ExactInputMatrix, conjugate_product_minpoly,
                     enumerate_relations, lambda_of)
from .reduction import (DegenerateMatrixError, ReductionRecord,
                        apply_inverse_to_columns, generalized_hermite_reduce,
                        modified_hermite_reduce)

__version__ = "0.1.0"

__all__ = [
    "ApproxAlgebraicNumber", "DegenerateMatrixError", "DetectionState",
    "EngineConfig", "ExactInputMatrix", "Exhausted", "Found",
    "InputMatrix", "IntegerPolynomial", "LinearDependenceError",
    "MinorConditionError", "NumericStateError", "PrecisionContext",
    "PrecisionError", "ReductionRecord", "RelationNotFound",
    "VerificationError", "apply_inverse_to_columns", "build_power_vectors",
    "check_minor", "conjugate_product_minpoly", "detect_sir",
    "detect_sir_permuted", "enumerate_relations",
    "generalized_hermite_reduce", "hyperplane_matrix", "initial_state",
    "is_negligible", "iterate_once", "iteration_budget", "lambda_of",
    "minimal_polynomial", "modified_hermite_reduce", "nearest_int",
    "permute_for_minor", "pi_value", "primitive_part", "run_two_level",
    "termination_check",
]
