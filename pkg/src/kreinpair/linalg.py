"""Dense complex matrix kernels: eigensolvers, clustering, solves, polynomial evaluation.

The eigensolvers are implemented here on top of ``kernels`` rather than
delegated to LAPACK. Norms are Frobenius norms unless noted.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConvergenceError, IllConditionedError, NonHermitianError, SingularMatrixError

HERMITIAN_TOL = 1e-10
CONDITION_CAP = 1e12
QL_MAX_ITER = 60
QR_MAX_ITER = 300


@dataclass(frozen=True)
class SpectralPoint:
    value: complex
    algebraic_multiplicity: int
    cluster_radius: float = 0.0

    def to_dict(self):
        return {
            "value": {"re": float(self.value.real), "im": float(self.value.imag)},
            "multiplicity": int(self.algebraic_multiplicity),
            "cluster_radius": float(self.cluster_radius),
        }


def as_matrix(M, name="M") -> np.ndarray:
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def _square(M, name="M") -> np.ndarray:
    M = as_matrix(M, name)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    return M


def norm(M) -> float:
    return float(np.linalg.norm(M))


def hermiticity_residual(M) -> float:
    return norm(M - M.conj().T)


def check_hermitian(M, name="M", tol=HERMITIAN_TOL) -> float:
    res = hermiticity_residual(M)
    limit = tol * max(norm(M), 1.0)
    if res > limit:
        raise NonHermitianError(name, res, limit)
    return res


def hermitian_eig(M, tol=HERMITIAN_TOL):
    """Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix."""
    M = _square(M)
    check_hermitian(M, "M", tol)
    n = M.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=np.complex128)
    H = 0.5 * (M + M.conj().T)
    d, e, Q = kernels.hermitian_tridiagonal(H)
    w, V, info = kernels.tridiagonal_ql(d, e, Q, QL_MAX_ITER)
    if info >= 0:
        raise ConvergenceError(QL_MAX_ITER, f"tridiagonal QL (index {info})")
    order = np.argsort(w, kind="stable")
    return w[order], np.ascontiguousarray(V[:, order])


def hermitian_eigvals(M, tol=HERMITIAN_TOL) -> np.ndarray:
    return hermitian_eig(M, tol)[0]


def min_hermitian_eig(M, tol=1e-8) -> float:
    """Smallest eigenvalue of the Hermitian part of M."""
    M = _square(M)
    check_hermitian(M, "M", tol)
    return float(hermitian_eigvals(0.5 * (M + M.conj().T))[0])


def spectral_norm(M) -> float:
    M = as_matrix(M)
    if M.size == 0:
        return 0.0
    if M.shape[0] < M.shape[1]:
        M = M.conj().T
    w = hermitian_eigvals(M.conj().T @ M)
    return float(np.sqrt(max(w[-1], 0.0)))


def eigvals(M) -> np.ndarray:
    """All eigenvalues of a general square matrix (Hessenberg + shifted QR)."""
    M = _square(M)
    n = M.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.complex128)
    H, _ = kernels.hessenberg(M)
    w, total, info = kernels.hessenberg_qr_eigvals(H, QR_MAX_ITER)
    if info >= 0:
        raise ConvergenceError(total, "shifted QR")
    return w


def default_cluster_tol(radius: float) -> float:
    return 1e-8 * (1.0 + radius)


def cluster_values(values, cluster_tol):
    """Single-linkage grouping of complex values; returns lists of indices."""
    values = np.asarray(values, dtype=np.complex128)
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= cluster_tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def points_from_values(values, cluster_tol):
    values = np.asarray(values, dtype=np.complex128)
    points = []
    for idx in cluster_values(values, cluster_tol):
        members = values[idx]
        centre = complex(members.mean())
        radius = float(np.abs(members - centre).max())
        # imaginary noise below the tolerance is rounding on a real point
        if abs(centre.imag) <= cluster_tol:
            centre = complex(centre.real, 0.0)
        points.append(SpectralPoint(centre, len(idx), radius))
    points.sort(key=lambda p: (p.value.real, p.value.imag))
    return points


def eig_points(M, cluster_tol=None):
    """Spectral points of M with algebraic multiplicities, clustered at ``cluster_tol``."""
    w = eigvals(M)
    if cluster_tol is None:
        cluster_tol = default_cluster_tol(float(np.abs(w).max()) if len(w) else 0.0)
    return points_from_values(w, cluster_tol)


def spectral_radius(M) -> float:
    w = eigvals(M)
    return float(np.abs(w).max()) if len(w) else 0.0


def _onenorm(M):
    return float(np.abs(M).sum(axis=0).max()) if M.size else 0.0


def inverse_onenorm_estimate(LU, perm, max_steps=5) -> float:
    """Hager's estimate of the 1-norm of the inverse from an LU factorization."""
    n = LU.shape[0]
    x = np.full((n, 1), 1.0 / n, dtype=np.complex128)
    est = 0.0
    for _ in range(max_steps):
        y = kernels.lu_solve(LU, perm, x, False)
        new = float(np.abs(y).sum())
        if new <= est:
            break
        est = new
        ay = np.abs(y)
        xi = np.where(ay > 0, y / np.where(ay > 0, ay, 1.0), 1.0)
        z = kernels.lu_solve(LU, perm, xi, True)
        j = int(np.argmax(np.abs(z[:, 0])))
        if np.abs(z[j, 0]) <= (z[:, 0].conj() @ x[:, 0]).real:
            break
        x = np.zeros((n, 1), dtype=np.complex128)
        x[j, 0] = 1.0
    return est


class LUFactor:
    """Reusable LU factorization with singularity and conditioning checks."""

    def __init__(self, M, cond_cap=CONDITION_CAP):
        M = _square(M)
        self.n = M.shape[0]
        self.LU, self.perm, self.min_pivot = kernels.lu_factor(M)
        scale = max(float(np.abs(M).max()) if M.size else 0.0, np.finfo(float).tiny)
        if self.n and self.min_pivot <= np.finfo(float).eps * scale * 1e-2:
            raise SingularMatrixError(float(self.min_pivot))
        self.condition = _onenorm(M) * inverse_onenorm_estimate(self.LU, self.perm) if self.n else 1.0
        if self.condition > cond_cap:
            raise IllConditionedError(self.condition, cond_cap, float(self.min_pivot))

    def solve(self, B, adjoint=False):
        B = np.asarray(B, dtype=np.complex128)
        vec = B.ndim == 1
        X = kernels.lu_solve(self.LU, self.perm, B.reshape(self.n, -1), adjoint)
        return X[:, 0] if vec else X


def solve_linear(M, B, cond_cap=CONDITION_CAP):
    """Solve M X = B by partial-pivoting LU."""
    return LUFactor(M, cond_cap).solve(B)


def _coeffs(p):
    c = getattr(p, "coeffs", p)
    return np.atleast_1d(np.asarray(c, dtype=np.complex128))


def horner_matrix(p, M) -> np.ndarray:
    """p(M) by Horner's rule; ``p`` is ascending coefficients or has ``.coeffs``."""
    M = _square(M)
    c = _coeffs(p)
    n = M.shape[0]
    R = c[-1] * np.eye(n, dtype=np.complex128)
    for ck in c[-2::-1]:
        R = R @ M
        R[np.diag_indices(n)] += ck
    return R


def orthonormal_basis(V, rtol=1e-10) -> np.ndarray:
    """Orthonormal basis of the column span of V (SVD with relative rank cutoff)."""
    V = as_matrix(V)
    if V.shape[1] == 0:
        return V.copy()
    U, s, _ = np.linalg.svd(V, full_matrices=False)
    if len(s) == 0 or s[0] == 0:
        return V[:, :0]
    r = int(np.sum(s > rtol * s[0]))
    return U[:, :r]


def null_space(M, rtol=1e-10, atol=0.0) -> np.ndarray:
    M = as_matrix(M)
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=np.complex128)
    _, s, Vh = np.linalg.svd(M, full_matrices=True)
    cutoff = max(rtol * (s[0] if len(s) else 0.0), atol)
    r = int(np.sum(s > cutoff))
    return Vh[r:].conj().T
