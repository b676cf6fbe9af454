"""Spectral projections by trapezoidal quadrature of the resolvent on circles.

``ContourProjector`` reduces T to Hessenberg form once, then evaluates
sums of weighted resolvents node by node with a band-aware solver. Large
problems use a two-sided randomized sketch of the projector instead of
applying the resolvent to the identity.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels, linalg
from .errors import ConvergenceError, NotASpectralPointError, NotIsolatedError, PreconditionError
from .krein import KreinStructure, subspace_verdict
from .linalg import SpectralPoint
from .report import Check, Report

START_NODES = 64
MAX_NODES = 1024
QUAD_RTOL = 1e-11
# accepted when refinement stalls before QUAD_RTOL
FLOOR_RTOL = 1e-9
MAX_RATIO = 0.9
FULL_LIMIT = 64
OVERSAMPLE = 8


@dataclass(frozen=True)
class ContourSpec:
    center: complex
    radius: float
    nodes: int = START_NODES
    ratio: float = 0.5

    def to_dict(self):
        return {
            "center": {"re": self.center.real, "im": self.center.imag},
            "radius": self.radius,
            "nodes": self.nodes,
            "ratio": self.ratio,
        }


@dataclass(eq=False)
class ProjectionResult:
    """A spectral projection, either dense (P) or as range/co-range factors U M W*."""

    T: np.ndarray
    points: tuple
    rank: int
    nodes: int
    delta: float
    contours: tuple = ()
    dense: np.ndarray = None
    U: np.ndarray = None
    core: np.ndarray = None
    W: np.ndarray = None
    info: dict = field(default_factory=dict)

    @cached_property
    def P(self) -> np.ndarray:
        if self.dense is not None:
            return self.dense
        return (self.U @ self.core) @ self.W.conj().T

    @cached_property
    def range_basis(self) -> np.ndarray:
        if self.U is not None:
            return self.U
        return column_space(self.P, self.rank)

    @cached_property
    def trace(self) -> complex:
        if self.dense is None:
            return complex(np.trace(self.core @ (self.W.conj().T @ self.U)))
        return complex(np.trace(self.dense))

    @cached_property
    def idempotency_residual(self) -> float:
        P = self.P
        return linalg.norm(P @ P - P)

    @cached_property
    def commutation_residual(self) -> float:
        P = self.P
        return linalg.norm(P @ self.T - self.T @ P)

    @cached_property
    def norm(self) -> float:
        return linalg.norm(self.P)

    def apply(self, X) -> np.ndarray:
        if self.dense is not None:
            return self.dense @ X
        return self.U @ (self.core @ (self.W.conj().T @ X))

    def check(self) -> Report:
        rep = Report("projection")
        pn = self.norm
        rep.add(Check.at_most("idempotency", self.idempotency_residual, 1e-8 * (1 + pn * pn)))
        rep.add(Check.at_most("trace_vs_rank", abs(self.trace - self.rank), 1e-6))
        return rep

    def to_dict(self):
        return {
            "points": [p.to_dict() for p in self.points],
            "rank": self.rank,
            "nodes": self.nodes,
            "delta": self.delta,
            "idempotency_residual": self.idempotency_residual,
            "commutation_residual": self.commutation_residual,
            "contours": [c.to_dict() for c in self.contours],
        }


def column_space(P, rank) -> np.ndarray:
    if rank == 0:
        return np.zeros((P.shape[0], 0), dtype=np.complex128)
    U, _, _ = np.linalg.svd(P, full_matrices=False)
    return U[:, :rank]


def _bandwidth(H) -> int:
    n = H.shape[0]
    bw = 0
    nz = np.abs(H) > 0
    for k in range(n - 1, 0, -1):
        if np.any(np.diagonal(nz, k)):
            bw = k
            break
    return bw


class ContourProjector:
    """Riesz projections for one fixed matrix T."""

    def __init__(self, T, points=None, cluster_tol=None, method="auto", seed=0):
        self.T = linalg.as_matrix(T, "T")
        self.n = self.T.shape[0]
        if points is None:
            w = linalg.eigvals(self.T)
            if cluster_tol is None:
                cluster_tol = linalg.default_cluster_tol(float(np.abs(w).max()) if len(w) else 0.0)
            points = linalg.points_from_values(w, cluster_tol)
        if cluster_tol is None:
            rad = max((abs(p.value) for p in points), default=0.0)
            cluster_tol = linalg.default_cluster_tol(rad)
        self.points = list(points)
        self.cluster_tol = float(cluster_tol)
        self.method = method
        self.seed = seed
        H, Q = kernels.hessenberg(self.T)
        self.H = H
        self.Q = None if np.array_equal(Q, np.eye(self.n)) else Q
        self.bandwidth = _bandwidth(H)
        self._point_cache = {}

    def point_projection(self, pt) -> ProjectionResult:
        """Cached projection onto a single spectral point."""
        point = self.match(pt)
        if point not in self._point_cache:
            self._point_cache[point] = self.project([point])
        return self._point_cache[point]

    def match(self, target) -> SpectralPoint:
        if isinstance(target, SpectralPoint):
            value = target.value
        else:
            value = complex(target)
        best = min(self.points, key=lambda p: abs(p.value - value), default=None)
        if best is None or abs(best.value - value) > max(self.cluster_tol, best.cluster_radius + self.cluster_tol):
            raise NotASpectralPointError(f"{value} is not within cluster tolerance of the spectrum")
        return best

    def points_in(self, predicate):
        return [p for p in self.points if predicate(p.value)]

    def contour_for(self, group, nodes=START_NODES):
        """Circle around ``group`` separating it from the other points, or None."""
        others = [p for p in self.points if p not in group]
        weights = np.array([p.algebraic_multiplicity for p in group], dtype=float)
        values = np.array([p.value for p in group])
        centre = complex(np.sum(weights * values) / weights.sum())
        r_in = max(abs(p.value - centre) + p.cluster_radius for p in group)
        if not others:
            radius = max(2.0 * r_in, 1.0)
            return ContourSpec(centre, radius, nodes, r_in / radius)
        d_out = min(abs(p.value - centre) - p.cluster_radius for p in others)
        if d_out <= r_in:
            return None
        if len(group) == 1:
            radius = 0.5 * d_out
            ratio = 0.5
        else:
            radius = 0.5 * (r_in + d_out)
            ratio = max(r_in / radius, radius / d_out)
        if ratio > MAX_RATIO:
            return None
        return ContourSpec(centre, radius, nodes, ratio)

    def plan(self, group):
        """Split ``group`` into sub-groups each enclosed by a usable circle."""
        spec = self.contour_for(group)
        if spec is not None:
            return [(tuple(group), spec)]
        if len(group) == 1:
            raise NotIsolatedError(f"cannot isolate {group[0].value}")
        vals = np.array([p.value for p in group])
        spread_re = np.ptp(vals.real)
        spread_im = np.ptp(vals.imag)
        key = vals.real if spread_re >= spread_im else vals.imag
        order = np.argsort(key, kind="stable")
        half = len(group) // 2
        left = [group[i] for i in order[:half]]
        right = [group[i] for i in order[half:]]
        return self.plan(left) + self.plan(right)

    def _check_isolated(self, group):
        for p in group:
            for q in self.points:
                if q in group:
                    continue
                if abs(p.value - q.value) - p.cluster_radius - q.cluster_radius < 4 * self.cluster_tol:
                    raise NotIsolatedError(f"{p.value} and {q.value} are closer than 4*cluster_tol")

    def _resolvent_sum(self, spec, N, offset, stride, B, adjoint):
        k = np.arange(offset, N, stride)
        theta = 2.0 * np.pi * k / N
        z = spec.radius * np.exp(1j * theta)
        mus = spec.center + z
        weights = (np.conj(z) if adjoint else z) / N
        S, pivot = kernels.hessenberg_resolvent_sum(self.H, self.bandwidth, mus, weights, B, adjoint)
        return S, pivot

    def _integrate(self, spec, B, adjoint, start, max_nodes, history=None):
        """Refine one contour by nested doubling until relative change <= QUAD_RTOL."""
        N = start
        S, _ = self._resolvent_sum(spec, N, 0, 1, B, adjoint)
        prev_delta = np.inf
        while True:
            if N >= max_nodes:
                raise ConvergenceError(N, f"contour quadrature (last delta {prev_delta:.3e})")
            new, _ = self._resolvent_sum(spec, 2 * N, 1, 2, B, adjoint)
            S2 = 0.5 * S + new
            base = max(linalg.norm(S), np.finfo(float).tiny)
            delta = linalg.norm(S2 - S) / base
            if history is not None:
                history.append((2 * N, delta))
            S, N = S2, 2 * N
            if delta <= QUAD_RTOL:
                return S, N, delta
            if delta <= FLOOR_RTOL and delta > 0.1 * prev_delta:
                return S, N, delta
            prev_delta = delta

    def _use_sketch(self, rank):
        if self.method == "full":
            return False
        if self.method == "sketch":
            return rank + OVERSAMPLE < self.n
        return self.n > FULL_LIMIT and rank + OVERSAMPLE <= self.n // 2

    def project(self, targets, nodes=START_NODES, max_nodes=MAX_NODES, method=None) -> ProjectionResult:
        group = []
        for t in targets:
            p = self.match(t)
            if p not in group:
                group.append(p)
        rank = int(sum(p.algebraic_multiplicity for p in group))
        if not group:
            Z = np.zeros((self.n, self.n), dtype=np.complex128)
            return ProjectionResult(self.T, (), 0, 0, 0.0, dense=Z)
        if rank == self.n:
            return ProjectionResult(self.T, tuple(group), rank, 0, 0.0, dense=np.eye(self.n, dtype=np.complex128))
        self._check_isolated(group)
        pieces = self.plan(group)
        saved = self.method
        if method is not None:
            self.method = method
        try:
            sketch = self._use_sketch(rank)
        finally:
            self.method = saved
        if sketch:
            return self._project_sketch(group, pieces, rank, nodes, max_nodes)
        B = np.eye(self.n, dtype=np.complex128)
        P = np.zeros((self.n, self.n), dtype=np.complex128)
        used, worst = 0, 0.0
        for _, spec in pieces:
            S, N, delta = self._integrate(spec, B, False, nodes, max_nodes)
            P += S
            used = max(used, N)
            worst = max(worst, delta)
        if self.Q is not None:
            P = self.Q @ P @ self.Q.conj().T
        specs = tuple(ContourSpec(s.center, s.radius, used, s.ratio) for _, s in pieces)
        return ProjectionResult(self.T, tuple(group), rank, used, worst, specs, dense=P, info={"method": "full"})

    def _project_sketch(self, group, pieces, rank, nodes, max_nodes):
        rng = np.random.default_rng(self.seed)
        k = min(rank + OVERSAMPLE, self.n)
        Y = rng.standard_normal((self.n, k)) + 1j * rng.standard_normal((self.n, k))
        Yh = Y if self.Q is None else self.Q.conj().T @ Y
        X = np.zeros((self.n, k), dtype=np.complex128)
        Z = np.zeros((self.n, k), dtype=np.complex128)
        used, worst = 0, 0.0
        for _, spec in pieces:
            S, N, d1 = self._integrate(spec, Yh, False, nodes, max_nodes)
            X += S
            S, N2, d2 = self._integrate(spec, Yh, True, nodes, max_nodes)
            Z += S
            used = max(used, N, N2)
            worst = max(worst, d1, d2)
        if self.Q is not None:
            X = self.Q @ X
            Z = self.Q @ Z
        Ux, sx, _ = np.linalg.svd(X, full_matrices=False)
        Uz, sz, _ = np.linalg.svd(Z, full_matrices=False)
        tail = max(sx[rank] / sx[0] if rank < len(sx) else 0.0, sz[rank] / sz[0] if rank < len(sz) else 0.0)
        if tail > 1e-6:
            raise NotIsolatedError(f"sketched range has rank above {rank} (tail ratio {tail:.2e})")
        U = Ux[:, :rank]
        W = Uz[:, :rank]
        core = np.linalg.inv(W.conj().T @ U)
        specs = tuple(ContourSpec(s.center, s.radius, used, s.ratio) for _, s in pieces)
        return ProjectionResult(
            self.T, tuple(group), rank, used, worst, specs, U=U, core=core, W=W,
            info={"method": "sketch", "sketch_tail": tail},
        )

    def quadrature_history(self, targets, start=32, stop=MAX_NODES):
        """Relative change per doubling without early stopping, for convergence studies."""
        group = [self.match(t) for t in targets]
        pieces = self.plan(group)
        B = np.eye(self.n, dtype=np.complex128)
        history = []
        for _, spec in pieces:
            N = start
            S, _ = self._resolvent_sum(spec, N, 0, 1, B, False)
            while N < stop:
                new, _ = self._resolvent_sum(spec, 2 * N, 1, 2, B, False)
                S2 = 0.5 * S + new
                history.append((2 * N, linalg.norm(S2 - S) / max(linalg.norm(S), np.finfo(float).tiny)))
                S, N = S2, 2 * N
        return history


def riesz_projection(T, cluster, nodes=START_NODES, cluster_tol=None, projector=None) -> ProjectionResult:
    """Spectral projection of T onto the given spectral points."""
    if projector is None:
        projector = ContourProjector(T, cluster_tol=cluster_tol)
    if isinstance(cluster, (SpectralPoint, complex, float, int)):
        cluster = [cluster]
    return projector.project(cluster, nodes=nodes)


def pole_order(T, pt, projection=None, projector=None) -> int:
    """Smallest nu with (T - pt)^nu P negligible; the index of pt."""
    T = linalg.as_matrix(T, "T")
    if projection is None:
        projection = riesz_projection(T, pt, projector=projector)
    point = projection.points[0] if projection.points else None
    value = point.value if point is not None else complex(pt)
    mult = point.algebraic_multiplicity if point is not None else T.shape[0]
    n = T.shape[0]
    S = T - value * np.eye(n)
    sn = max(linalg.norm(S), np.finfo(float).tiny)
    if projection.dense is not None:
        X = projection.dense
    else:
        # W has orthonormal columns, so dropping it keeps Frobenius norms
        X = projection.U @ projection.core
    pn = linalg.norm(X)
    for nu in range(1, mult + 1):
        X = S @ X
        size = linalg.norm(X)
        if size <= 1e-8 * sn ** nu * pn:
            return nu
    return mult


def conjugate_point(projector: ContourProjector, pt: SpectralPoint) -> SpectralPoint:
    return projector.match(np.conj(pt.value))


def pair_space_krein_check(ks: KreinStructure, T, lam, projector=None) -> Report:
    """Adjoint symmetry of E(lam), Krein-ness of the pair space and equal pole orders."""
    if projector is None:
        projector = ContourProjector(T)
    pt = projector.match(lam)
    if abs(pt.value.imag) <= projector.cluster_tol:
        raise PreconditionError("pair_space_krein_check needs a non-real point; classify real points instead")
    ptc = conjugate_point(projector, pt)
    E = projector.project([pt])
    Ec = projector.project([ptc])
    rep = Report("pair_space")
    g0n = max(ks.g0_norm, np.finfo(float).tiny)
    asym = linalg.norm(ks.G0 @ E.P - Ec.P.conj().T @ ks.G0)
    rep.add(Check.at_most("adjoint_symmetry", asym, 1e-8 * g0n))
    both = projector.project([pt, ptc])
    V = both.range_basis
    verdict = subspace_verdict(ks, V)
    rep.add(Check.flag("pair_space_is_krein", verdict.kind == "Krein", verdict.kind))
    nu = pole_order(T, pt, projection=E)
    nuc = pole_order(T, ptc, projection=Ec)
    rep.add(Check.flag("equal_pole_orders", nu == nuc, f"{nu} vs {nuc}"))
    rep.data.update({"point": pt.value, "conjugate": ptc.value, "pole_orders": [nu, nuc], "verdict": verdict.to_dict()})
    return rep
