"""Sign-type classification of spectral points of AG and the structural checks on a pair."""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import NotASpectralPointError, PreconditionError
from .krein import (
    NEGATIVE,
    POSITIVE,
    KreinStructure,
    OperatorPair,
    build_g0,
    subspace_verdict,
)
from .linalg import SpectralPoint
from .report import Check, Report
from .riesz import ContourProjector

POSITIVE_TYPE = "PositiveType"
NEGATIVE_TYPE = "NegativeType"
CRITICAL = "Critical"
NON_REAL = "NonReal"

CROSS_CHECK_SAMPLES = 20


@dataclass
class PointClassification:
    point: SpectralPoint
    verdict: str
    gram_extremes: tuple = (0.0, 0.0)
    delta: float = 0.0
    cross_check: dict = field(default_factory=dict)

    @property
    def value(self) -> complex:
        return self.point.value

    def to_dict(self):
        return {
            "point": self.point.to_dict(),
            "verdict": self.verdict,
            "gram_extremes": list(self.gram_extremes),
            "delta": self.delta,
            "cross_check": self.cross_check,
        }


@dataclass
class SignClassification:
    points: list
    sigma_plus: list
    sigma_minus: list
    critical_candidates: list
    zero_forced: bool = False
    zero_consistent: bool = True

    def verdicts(self):
        return tuple(pc.verdict for pc in self.points)

    def verdict_at(self, value, tol) -> str:
        best = min(self.points, key=lambda pc: abs(pc.value - value))
        if abs(best.value - value) > tol + best.point.cluster_radius:
            raise NotASpectralPointError(f"{value} is not a spectral point")
        return best.verdict

    def real_points(self):
        return [pc for pc in self.points if pc.verdict != NON_REAL]

    def to_dict(self):
        return {
            "points": [pc.to_dict() for pc in self.points],
            "sigma_plus": self.sigma_plus,
            "sigma_minus": self.sigma_minus,
            "critical_candidates": self.critical_candidates,
            "zero_forced": self.zero_forced,
            "zero_consistent": self.zero_consistent,
        }


def _hausdorff(X, Y) -> float:
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    if len(X) == 0 and len(Y) == 0:
        return 0.0
    if len(X) == 0 or len(Y) == 0:
        return np.inf
    D = np.abs(X[:, None] - Y[None, :])
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def nonzero_spectrum(M, cluster_tol):
    pts = linalg.points_from_values(linalg.eigvals(M), cluster_tol)
    return [p.value for p in pts if abs(p.value) > cluster_tol + p.cluster_radius]


def pair_consistency_report(pair: OperatorPair) -> Report:
    """Adjoint relation, equality of nonzero spectra and resolvent intertwining."""
    rep = Report("pair_consistency")
    scale = pair.scale
    rep.add(Check.at_most("adjoint", linalg.norm(pair.AG.conj().T - pair.GA), 1e-10 * scale))
    tol = pair.cluster_tol
    s1 = nonzero_spectrum(pair.AG, tol)
    s2 = nonzero_spectrum(pair.GA, tol)
    rep.add(Check.at_most("nonzero_spectra_hausdorff", _hausdorff(s1, s2), 1e-8 * scale))
    radius = 1.0 + pair.spectral_radius
    n = pair.n
    eye = np.eye(n)
    worst = 0.0
    for k in range(5):
        lam = radius * np.exp(1j * np.pi * (2 * k + 1) / 10)
        R_ga = linalg.solve_linear(pair.GA - lam * eye, eye)
        R_ag = linalg.solve_linear(pair.AG - lam * eye, eye)
        res_a = linalg.norm(pair.A @ R_ga - R_ag @ pair.A)
        res_g = linalg.norm(pair.G @ R_ag - R_ga @ pair.G)
        size = max(linalg.norm(pair.A), linalg.norm(pair.G), 1.0) * max(linalg.norm(R_ga), linalg.norm(R_ag), 1.0)
        worst = max(worst, res_a / size, res_g / size)
    rep.add(Check.at_most("resolvent_identities", worst, 1e-8))
    rep.data.update({"spectrum_AG": s1, "spectrum_GA": s2})
    return rep


def _cross_check(pair, V, verdict, rng) -> dict:
    """Sign of (Gv, v) on random unit vectors of the range; must agree for definite verdicts."""
    if V.shape[1] == 0:
        return {"samples": 0, "agrees": True}
    C = rng.standard_normal((V.shape[1], CROSS_CHECK_SAMPLES)) + 1j * rng.standard_normal(
        (V.shape[1], CROSS_CHECK_SAMPLES)
    )
    X = V @ C
    X /= np.linalg.norm(X, axis=0)
    vals = np.einsum("ij,ij->j", X.conj(), pair.G @ X).real
    if verdict == POSITIVE_TYPE:
        agrees = bool(np.all(vals > 0))
    elif verdict == NEGATIVE_TYPE:
        agrees = bool(np.all(vals < 0))
    else:
        agrees = True
    return {"samples": CROSS_CHECK_SAMPLES, "min": float(vals.min()), "max": float(vals.max()), "agrees": agrees}


def classify_point(pair: OperatorPair, ks: KreinStructure, pt, projector=None, seed=0) -> PointClassification:
    """Positive, negative or critical type of a real spectral point via the Gram matrix on its eigenspace."""
    projector = projector or pair.projector
    point = projector.match(pt)
    if abs(point.value.imag) > projector.cluster_tol:
        return PointClassification(point, NON_REAL)
    E = projector.point_projection(point)
    V = E.range_basis
    verdict = subspace_verdict(ks, V)
    kind = {POSITIVE: POSITIVE_TYPE, NEGATIVE: NEGATIVE_TYPE}.get(verdict.kind, CRITICAL)
    rng = np.random.default_rng(seed)
    cross = _cross_check(pair, V, kind, rng)
    return PointClassification(point, kind, verdict.gram_extremes, verdict.delta, cross)


def classify_spectrum(pair: OperatorPair, ks: KreinStructure, projector=None, seed=0) -> SignClassification:
    projector = projector or pair.projector
    tol = projector.cluster_tol
    results = []
    for i, p in enumerate(projector.points):
        if abs(p.value.imag) > tol:
            results.append(PointClassification(p, NON_REAL))
        else:
            results.append(classify_point(pair, ks, p, projector, seed=seed + i))
    zero_forced = pair.g_is_singular()
    consistent = True
    if zero_forced:
        zero = [pc for pc in results if abs(pc.value) <= tol + pc.point.cluster_radius]
        if not zero:
            consistent = False
        for pc in zero:
            if pc.verdict != CRITICAL:
                consistent = False
                pc.verdict = CRITICAL
    plus = [pc.value.real for pc in results if pc.verdict == POSITIVE_TYPE]
    minus = [pc.value.real for pc in results if pc.verdict == NEGATIVE_TYPE]
    crit = [pc.value.real for pc in results if pc.verdict == CRITICAL]
    return SignClassification(results, plus, minus, crit, zero_forced, consistent)


def lambda0_invariance_check(pair: OperatorPair, lambda0, lambda0_other) -> bool:
    a = classify_spectrum(pair, build_g0(pair, lambda0))
    b = classify_spectrum(pair, build_g0(pair, lambda0_other))
    return a.verdicts() == b.verdicts()


def _min_singular(M) -> float:
    w = linalg.hermitian_eigvals(M.conj().T @ M, tol=1e-6)
    return float(np.sqrt(max(w[0], 0.0)))


def resolvent_growth_check(pair: OperatorPair, interval, eta_grid, ks=None, classification=None) -> Report:
    """max |eta| * ||(AG - x - i eta)^-1|| over the interval, which stays bounded near definite-type spectrum."""
    a, b = float(interval[0]), float(interval[1])
    if classification is None:
        classification = classify_spectrum(pair, ks or build_g0(pair))
    inside = [pc for pc in classification.real_points() if a - 1e-300 <= pc.value.real <= b]
    kinds = {pc.verdict for pc in inside}
    if CRITICAL in kinds or len(kinds) > 1:
        raise PreconditionError(f"[{a}, {b}] is not of one definite type: {sorted(kinds)}")
    xs = np.unique(np.concatenate([np.linspace(a, b, 21), [pc.value.real for pc in inside]]))
    etas = sorted((float(e) for e in eta_grid), reverse=True)
    T = pair.AG
    n = pair.n
    levels = []
    for eta in etas:
        c = 0.0
        for x in xs:
            s = _min_singular(T - complex(x, eta) * np.eye(n))
            c = max(c, abs(eta) / s if s > 0 else np.inf)
        levels.append(c)
    ratios = [levels[i + 1] / levels[i] for i in range(len(levels) - 1) if levels[i] > 0]
    rep = Report("resolvent_growth")
    rep.add(Check.at_most("growth_ratio", max(ratios, default=1.0), 1.5))
    rep.data.update({"C": max(levels, default=0.0), "levels": levels, "etas": etas})
    return rep


def nonneg_triple_classification(A0, G0, tol=1e-9) -> Report:
    """Real spectrum and half-line sign typing for A0 G0 with G0 A0 G0 nonnegative."""
    A0 = linalg.as_matrix(A0, "A0")
    G0 = linalg.as_matrix(G0, "G0")
    linalg.check_hermitian(A0, "A0", 1e-8)
    linalg.check_hermitian(G0, "G0", 1e-8)
    n = A0.shape[0]
    scale = max(linalg.norm(A0) * linalg.norm(G0), 1.0)
    triple = G0 @ A0 @ G0
    mn = linalg.min_hermitian_eig(0.5 * (triple + triple.conj().T))
    if mn < -tol * max(linalg.norm(triple), 1.0):
        raise PreconditionError(f"G0 A0 G0 is not nonnegative: min eigenvalue {mn:.3e}")
    T = A0 @ G0
    w = linalg.eigvals(T)
    ctol = linalg.default_cluster_tol(float(np.abs(w).max()) if len(w) else 0.0)
    rep = Report("nonneg_triple")
    rep.add(Check.at_most("imag_spectrum", float(np.abs(w.imag).max()) if len(w) else 0.0, 1e-8 * scale))
    # imaginary rounding is folded onto the real axis before clustering
    pts = linalg.points_from_values(np.where(np.abs(w.imag) <= 1e-8 * scale, w.real, w), ctol)
    projector = ContourProjector(T, points=pts, cluster_tol=ctol)
    ks = KreinStructure.from_gram(G0)
    violations = []
    typed = []
    for p in pts:
        if abs(p.value) <= ctol + p.cluster_radius:
            continue
        V = projector.point_projection(p).range_basis
        v = subspace_verdict(ks, V)
        kind = {POSITIVE: POSITIVE_TYPE, NEGATIVE: NEGATIVE_TYPE}.get(v.kind, CRITICAL)
        want = POSITIVE_TYPE if p.value.real > 0 else NEGATIVE_TYPE
        typed.append({"value": p.value, "verdict": kind})
        if kind != want:
            violations.append(p.value)
    rep.add(Check.at_most("half_line_violations", len(violations), 0))
    rep.data["typed_points"] = typed
    basis = invariant_subspace(T, pts, projector, ctol)
    if basis is not None:
        res = linalg.norm(T @ basis - basis @ (basis.conj().T @ T @ basis))
        rep.add(Check.at_most("invariant_subspace", res, 1e-8 * scale))
        rep.data["invariant_subspace_dim"] = basis.shape[1]
    rep.data["n"] = n
    return rep


def invariant_subspace(T, pts, projector, ctol):
    """Orthonormal basis of a proper nontrivial invariant subspace, or None for scalar T."""
    n = T.shape[0]
    if n < 2:
        return None
    centre = np.trace(T) / n
    if linalg.norm(T - centre * np.eye(n)) <= 1e-12 * max(linalg.norm(T), 1.0):
        return None
    nonzero = [p for p in pts if abs(p.value) > ctol + p.cluster_radius]
    if nonzero and len(pts) > 1:
        V = projector.point_projection(nonzero[-1]).range_basis
        if 0 < V.shape[1] < n:
            return V
    lam = pts[0].value if len(pts) == 1 else 0.0
    K = linalg.null_space(T - lam * np.eye(n), rtol=1e-8)
    if 0 < K.shape[1] < n:
        return K
    return None
