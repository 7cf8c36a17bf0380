"""Discrete Hardy, Copson and Rellich weights with exact factorization checks.

All real arithmetic runs on MPFR (gmpy2) at a configurable mantissa width; see
:mod:`hardy_rellich.precision`.
"""
from .factorization import (CoverageError, FactorizationBreakdown, Remainder1Spec,
                            RemainderCoefficients, gamma_bounds_check, gamma_coefficients,
                            remainder1_apply, remainder2_apply, remainder_coefficients,
                            try_gamma_coefficients)
from .kernels import backend_name
from .operators import (NonHermitianResidueError, OperatorSpec, apply_bilaplacian_delta,
                        apply_dirichlet_laplacian, apply_generalized_laplacian,
                        apply_laplacian_power, apply_weighted_laplacian_delta,
                        backward_difference, hardy_energy, operator_matrix, quadratic_form,
                        rellich_energy)
from .precision import DEFAULT_PRECISION, PrecisionContext
from .report import VerificationReport, Witness
from .sequences import (BoundaryConditionError, FiniteSequence, InvalidHorizonError,
                        InvalidOrderError, PositiveSequence, knopp_transform,
                        weighted_partial_sum_transform)
from .verification import (CriticalitySequence, criticality_decay, knopp_improvement_chain,
                           knopp_rellich_identity, lemma_suite, pointwise_scan,
                           verify_copson_identity, verify_hardy_identity, verify_rellich_identity)
from .weights import WeightDomainWarning, WeightFamily, build_family

__version__ = "0.1.0"
