"""Exact polynomial arithmetic substrate: scalars, universes, polynomials,
parsing, gcd, fraction-free linear algebra and 1-membership certification."""

from .scalars import Scalar, as_scalar
from .universe import VarUniverse
from .poly import (
    NotDivisible,
    Polynomial,
    UniverseMismatch,
    grlex_key,
    monic,
    primitive_normalize,
)
from .parser import ParseError, UnknownVariable, parse_polynomial
from .gcdtools import divexact, divides, gcd_multivariate
from .linalg import (
    RankWitness,
    bareiss_det,
    bareiss_rank,
    eval_matrix_rational,
    scalar_matrix_rank,
    submatrix,
)
from .groebner import MembershipResult, ideal_contains_one

__all__ = [
    "Scalar",
    "as_scalar",
    "VarUniverse",
    "Polynomial",
    "NotDivisible",
    "UniverseMismatch",
    "grlex_key",
    "monic",
    "primitive_normalize",
    "ParseError",
    "UnknownVariable",
    "parse_polynomial",
    "divexact",
    "divides",
    "gcd_multivariate",
    "RankWitness",
    "bareiss_det",
    "bareiss_rank",
    "eval_matrix_rational",
    "scalar_matrix_rank",
    "submatrix",
    "MembershipResult",
    "ideal_contains_one",
]
