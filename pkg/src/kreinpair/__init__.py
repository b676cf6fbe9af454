"""Spectral analysis of products AG of Hermitian matrices in the indefinite inner product they induce."""

__version__ = "0.1.0"

from .errors import KreinPairError
from .krein import KreinStructure, OperatorPair, build_g0
from .classify import classify_spectrum
from .definitize import RealPolynomial, build_certificate, find_definitizing_polynomial, is_definitizing
from .riesz import ContourProjector, riesz_projection
from .spectral_function import BorelSet, build_spectral_function, spectral_projection, verify_axioms
from .sturm_liouville import SLProblem, discretize, sl_report

__all__ = [
    "KreinPairError",
    "KreinStructure",
    "OperatorPair",
    "build_g0",
    "classify_spectrum",
    "RealPolynomial",
    "build_certificate",
    "find_definitizing_polynomial",
    "is_definitizing",
    "ContourProjector",
    "riesz_projection",
    "BorelSet",
    "build_spectral_function",
    "spectral_projection",
    "verify_axioms",
    "SLProblem",
    "discretize",
    "sl_report",
]
