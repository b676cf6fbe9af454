"""The operator pair, the symmetrizer G0 and subspace geometry of [x, y] = (G0 x, y)."""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .errors import NotIsolatedError, PreconditionError, RankDeficientError
from .report import Check, Report

DEGENERACY_RTOL = 1e-8
G0_HERMITIAN_RTOL = 1e-10
G0_SYMMETRY_RTOL = 1e-9


class OperatorPair:
    """Hermitian matrices A and G; the object of study is the product AG."""

    def __init__(self, A, G, tol=linalg.HERMITIAN_TOL):
        A = linalg.as_matrix(A, "A")
        G = linalg.as_matrix(G, "G")
        if A.shape != G.shape or A.shape[0] != A.shape[1]:
            raise ValueError(f"A and G must be square of equal size, got {A.shape} and {G.shape}")
        linalg.check_hermitian(A, "A", tol)
        linalg.check_hermitian(G, "G", tol)
        self.A = 0.5 * (A + A.conj().T)
        self.G = 0.5 * (G + G.conj().T)
        self.tol = tol
        self.A.setflags(write=False)
        self.G.setflags(write=False)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @cached_property
    def AG(self) -> np.ndarray:
        return self.A @ self.G

    @cached_property
    def GA(self) -> np.ndarray:
        return self.G @ self.A

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return linalg.eigvals(self.AG)

    @cached_property
    def spectral_radius(self) -> float:
        w = self.eigenvalues
        return float(np.abs(w).max()) if len(w) else 0.0

    @cached_property
    def cluster_tol(self) -> float:
        return linalg.default_cluster_tol(self.spectral_radius)

    @cached_property
    def points(self):
        return linalg.points_from_values(self.eigenvalues, self.cluster_tol)

    @cached_property
    def scale(self) -> float:
        """Size of the product used to scale absolute residual limits."""
        return max(linalg.norm(self.A) * linalg.norm(self.G), 1.0)

    @cached_property
    def projector(self):
        from .riesz import ContourProjector

        return ContourProjector(self.AG, points=self.points, cluster_tol=self.cluster_tol)

    def g_is_singular(self, rtol=1e-10) -> bool:
        s = np.sort(np.abs(linalg.hermitian_eigvals(self.G)))
        return bool(s[0] < rtol * max(s[-1], np.finfo(float).tiny))

    def swapped(self) -> "OperatorPair":
        return OperatorPair(self.G, self.A, self.tol)

    def to_dict(self):
        return {
            "n": self.n,
            "A": {"re": self.A.real.tolist(), "im": self.A.imag.tolist()},
            "G": {"re": self.G.real.tolist(), "im": self.G.imag.tolist()},
        }


@dataclass(eq=False)
class KreinStructure:
    lambda0: complex
    G0: np.ndarray
    build_residuals: dict = field(default_factory=dict)
    pair: OperatorPair = None

    @cached_property
    def g0_norm(self) -> float:
        w = linalg.hermitian_eigvals(self.G0, tol=1e-6)
        return float(np.abs(w).max()) if len(w) else 0.0

    @property
    def degeneracy_threshold(self) -> float:
        return DEGENERACY_RTOL * self.g0_norm

    @property
    def n(self) -> int:
        return self.G0.shape[0]

    @classmethod
    def from_gram(cls, G0, lambda0=1j):
        """Structure with a prescribed Hermitian inner-product matrix."""
        G0 = linalg.as_matrix(G0, "G0")
        linalg.check_hermitian(G0, "G0", 1e-8)
        res = linalg.hermiticity_residual(G0)
        return cls(complex(lambda0), 0.5 * (G0 + G0.conj().T), {"hermiticity": res, "symmetry": 0.0})


def choose_lambda0(pair: OperatorPair) -> complex:
    return complex(0.0, 1.0 + pair.spectral_radius)


def resolvent_product(T, lambda0) -> np.ndarray:
    """(T - lambda0)(T - conj(lambda0)) expanded with real coefficients."""
    lam = complex(lambda0)
    n = T.shape[0]
    M = T @ T - 2.0 * lam.real * T
    M[np.diag_indices(n)] += abs(lam) ** 2
    return M


def build_g0(pair: OperatorPair, lambda0=None) -> KreinStructure:
    """G0 = G (AG - lambda0)^-1 (AG - conj lambda0)^-1 with its residuals."""
    if lambda0 is None:
        lambda0 = choose_lambda0(pair)
    lambda0 = complex(lambda0)
    if lambda0.imag == 0.0:
        raise PreconditionError("lambda0 must be non-real")
    w = pair.eigenvalues
    if len(w):
        dist = float(np.min(np.abs(w - lambda0)))
        if dist <= pair.cluster_tol:
            raise NotIsolatedError(f"lambda0 = {lambda0} lies within {dist:.3e} of the spectrum")
    T = pair.AG
    M = resolvent_product(T, lambda0)
    # G0 = G M^-1, so G0* = M^-* G is one adjoint solve
    X = linalg.LUFactor(M).solve(pair.G, adjoint=True)
    G0 = X.conj().T
    herm = linalg.hermiticity_residual(G0)
    g0n = max(linalg.norm(G0), np.finfo(float).tiny)
    G0 = 0.5 * (G0 + G0.conj().T)
    sym = linalg.norm(G0 @ T - T.conj().T @ G0)
    residuals = {"hermiticity": herm, "symmetry": sym}
    if herm > G0_HERMITIAN_RTOL * g0n or sym > G0_SYMMETRY_RTOL * g0n * max(linalg.norm(T), 1.0):
        raise PreconditionError(f"G0 build residuals too large: {residuals}")
    return KreinStructure(lambda0, G0, residuals, pair)


def g0_report(ks: KreinStructure) -> Report:
    rep = Report("g0")
    g0n = max(linalg.norm(ks.G0), np.finfo(float).tiny)
    rep.add(Check.at_most("g0_hermiticity", ks.build_residuals["hermiticity"], G0_HERMITIAN_RTOL * g0n))
    if ks.pair is not None:
        tn = max(linalg.norm(ks.pair.AG), 1.0)
        rep.add(Check.at_most("g0_symmetry", ks.build_residuals["symmetry"], G0_SYMMETRY_RTOL * g0n * tn))
    return rep


def indefinite_inner(ks: KreinStructure, x, y) -> complex:
    """[x, y] = (G0 x, y), linear in x."""
    return complex(np.vdot(np.asarray(y), ks.G0 @ np.asarray(x)))


def gram_matrix(ks: KreinStructure, V) -> np.ndarray:
    V = linalg.as_matrix(V, "V")
    if V.shape[1]:
        s = np.linalg.svd(V, compute_uv=False)
        rank = int(np.sum(s > 1e-10 * s[0])) if s[0] > 0 else 0
        if rank < V.shape[1]:
            raise RankDeficientError(rank, V.shape[1])
    Gr = V.conj().T @ ks.G0 @ V
    return 0.5 * (Gr + Gr.conj().T)


POSITIVE = "UniformlyPositive"
NEGATIVE = "UniformlyNegative"
KREIN = "Krein"
DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class SubspaceVerdict:
    kind: str
    delta: float
    gram_extremes: tuple

    @property
    def definite(self) -> bool:
        return self.kind in (POSITIVE, NEGATIVE)

    def to_dict(self):
        return {"kind": self.kind, "delta": self.delta, "gram_extremes": list(self.gram_extremes)}


def verdict_from_gram(Gr, threshold) -> SubspaceVerdict:
    if Gr.shape[0] == 0:
        return SubspaceVerdict(DEGENERATE, 0.0, (0.0, 0.0))
    w = linalg.hermitian_eigvals(Gr, tol=1e-6)
    extremes = (float(w[0]), float(w[-1]))
    delta = float(np.abs(w).min())
    if delta < threshold:
        return SubspaceVerdict(DEGENERATE, 0.0, extremes)
    if w[0] > 0:
        return SubspaceVerdict(POSITIVE, delta, extremes)
    if w[-1] < 0:
        return SubspaceVerdict(NEGATIVE, delta, extremes)
    return SubspaceVerdict(KREIN, delta, extremes)


def subspace_verdict(ks: KreinStructure, V) -> SubspaceVerdict:
    V = linalg.as_matrix(V, "V")
    k = V.shape[1]
    if k and linalg.norm(V.conj().T @ V - np.eye(k)) > 1e-8:
        raise PreconditionError("subspace_verdict needs an orthonormal basis")
    return verdict_from_gram(gram_matrix(ks, V), ks.degeneracy_threshold)


def ortho_companion(ks: KreinStructure, V) -> np.ndarray:
    """Orthonormal basis of {x : [x, v] = 0 for every column v of V}."""
    V = linalg.as_matrix(V, "V")
    if V.shape[1] == 0:
        return np.eye(ks.n, dtype=np.complex128)
    Vo = linalg.orthonormal_basis(V)
    return linalg.null_space(Vo.conj().T @ ks.G0, rtol=0.0, atol=ks.degeneracy_threshold)


def ortho_complement_check(ks: KreinStructure, V) -> dict:
    """Whether span(V) and its companion together give a direct sum decomposition of the space."""
    Vo = linalg.orthonormal_basis(V)
    C = ortho_companion(ks, Vo)
    joint = np.hstack([Vo, C])
    rank = linalg.orthonormal_basis(joint, rtol=1e-8).shape[1] if joint.shape[1] else 0
    dims = Vo.shape[1] + C.shape[1]
    return {
        "dim": Vo.shape[1],
        "companion_dim": C.shape[1],
        "joint_rank": rank,
        "complemented": bool(dims == ks.n and rank == ks.n),
        "companion": C,
    }


def krein_subspace_check(ks: KreinStructure, T, V, tol=1e-8) -> Report:
    """Invariant, zero-free and complemented subspace should carry a nondegenerate Gram."""
    rep = Report("krein_subspace")
    Vo = linalg.orthonormal_basis(V)
    tn = max(linalg.norm(T), 1.0)
    inv = linalg.norm(T @ Vo - Vo @ (Vo.conj().T @ T @ Vo))
    rep.add(Check.at_most("invariance", inv, tol * tn))
    restricted = Vo.conj().T @ T @ Vo
    w = linalg.eigvals(restricted) if restricted.size else np.zeros(0)
    zero_free = bool(len(w) == 0 or np.abs(w).min() > linalg.default_cluster_tol(tn))
    rep.add(Check.flag("zero_not_in_restricted_spectrum", zero_free))
    comp = ortho_complement_check(ks, Vo)
    rep.add(Check.flag("complemented", comp["complemented"]))
    verdict = subspace_verdict(ks, Vo)
    rep.data["verdict"] = verdict.to_dict()
    if all(c.passed for c in rep.checks):
        rep.add(Check.flag("nondegenerate_gram", verdict.kind != DEGENERATE, verdict.kind))
    return rep
