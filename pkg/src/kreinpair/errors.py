"""Exception types raised across the package."""


class KreinPairError(Exception):
    """Base class for all package errors."""


class NonHermitianError(KreinPairError, ValueError):
    def __init__(self, name, residual, limit):
        self.name = name
        self.residual = residual
        self.limit = limit
        super().__init__(f"{name} is not Hermitian: ||{name} - {name}*|| = {residual:.3e} > {limit:.3e}")


class SingularMatrixError(KreinPairError, ArithmeticError):
    def __init__(self, pivot, message=None):
        self.pivot = pivot
        super().__init__(message or f"matrix is numerically singular (pivot magnitude {pivot:.3e})")


class IllConditionedError(SingularMatrixError):
    def __init__(self, condition, cap, pivot):
        self.condition = condition
        self.cap = cap
        super().__init__(pivot, f"condition estimate {condition:.3e} exceeds cap {cap:.1e}")


class ConvergenceError(KreinPairError, RuntimeError):
    def __init__(self, iterations, what="eigenvalue iteration"):
        self.iterations = iterations
        super().__init__(f"{what} did not converge after {iterations} iterations")


class NotIsolatedError(KreinPairError, ValueError):
    """A contour could not separate the requested points from the rest of the spectrum."""


class PreconditionError(KreinPairError, ValueError):
    pass


class AdmissibilityError(KreinPairError, ValueError):
    """A set is not admissible for the spectral function (a critical point lies on its boundary)."""

    def __init__(self, point, message=None):
        self.point = point
        super().__init__(message or f"critical point {point!r} lies on the boundary of the set")


class NotASpectralPointError(KreinPairError, ValueError):
    pass


class RankDeficientError(KreinPairError, ValueError):
    def __init__(self, rank, cols):
        self.rank = rank
        self.cols = cols
        super().__init__(f"basis has rank {rank} < {cols} columns")


class ZeroPolynomialError(KreinPairError, ValueError):
    pass


class DefinitizingPolynomialNotFound(KreinPairError, RuntimeError):
    def __init__(self, degree_cap, best_witness, best_polynomial=None):
        self.degree_cap = degree_cap
        self.best_witness = best_witness
        self.best_polynomial = best_polynomial
        super().__init__(
            f"no definitizing polynomial of degree <= {degree_cap}; best witness {best_witness:.3e}"
        )


class TheoremCheckError(KreinPairError, AssertionError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("theorem check failed: " + "; ".join(str(v) for v in self.violations))


class ConfigurationError(KreinPairError, ValueError):
    pass
