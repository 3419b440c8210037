"""High-precision evaluation and verification of basic hypergeometric summation identities."""

from .arith import PrecisionContext, approx_equal, make_context, parse_complex, relative_error
from .errors import DomainError, PoleError, QSumError, SchemaError
from .identities import IDENTITY_IDS, IdentityCase, describe, eval_lhs, eval_rhs, residual
from .qpoch import gamma_classical, gamma_q, qpoch_finite, qpoch_infinite, qpoch_multi
from .series import SeriesResult, SeriesSpec, Status, sum_bilateral, sum_unilateral, term_at
from .verifier import GridSpec, limit_study, sweep, verify_case

__version__ = "0.1.0"

__all__ = [
    "PrecisionContext", "make_context", "relative_error", "approx_equal", "parse_complex",
    "QSumError", "PoleError", "SchemaError", "DomainError",
    "qpoch_finite", "qpoch_infinite", "qpoch_multi", "gamma_q", "gamma_classical",
    "SeriesSpec", "SeriesResult", "Status", "term_at", "sum_unilateral", "sum_bilateral",
    "IDENTITY_IDS", "IdentityCase", "describe", "eval_lhs", "eval_rhs", "residual",
    "GridSpec", "sweep", "verify_case", "limit_study",
]
