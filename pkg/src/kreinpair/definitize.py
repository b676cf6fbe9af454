"""Definitizing polynomials for a pair (A, G), critical points and the certificate operators."""

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .classify import CRITICAL, NEGATIVE_TYPE, NON_REAL, POSITIVE_TYPE, _hausdorff, classify_spectrum
from .errors import (
    ConfigurationError,
    DefinitizingPolynomialNotFound,
    PreconditionError,
    TheoremCheckError,
    ZeroPolynomialError,
)
from .krein import KreinStructure, OperatorPair, build_g0, resolvent_product
from .report import Check, Report
from .riesz import pole_order

LAMBDA = "λ"


class RealPolynomial:
    """Real polynomial with ascending coefficients.

    ``factors`` optionally records a factorization as (ascending coeffs, power)
    pairs; matrix evaluation then multiplies the factors, which is far more
    accurate than expanded Horner when the roots sit on the spectrum.
    """

    def __init__(self, coeffs, factors=None, scale=1.0):
        c = np.atleast_1d(np.asarray(coeffs, dtype=float)).copy()
        nz = np.nonzero(c)[0]
        c = c[: nz[-1] + 1] if len(nz) else np.zeros(1)
        self.coeffs = c
        self.factors = factors
        self.scale = float(scale)

    @classmethod
    def from_factors(cls, factors, scale=1.0):
        c = np.array([float(scale)])
        for f, power in factors:
            for _ in range(power):
                c = np.polynomial.polynomial.polymul(c, f)
        return cls(c, [(np.asarray(f, dtype=float), int(k)) for f, k in factors if k > 0], scale)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def m(self) -> int:
        return self.degree + 1

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def matrix(self, M) -> np.ndarray:
        if self.factors is None:
            return linalg.horner_matrix(self.coeffs, M)
        n = M.shape[0]
        R = self.scale * np.eye(n, dtype=np.complex128)
        for f, power in self.factors:
            F = linalg.horner_matrix(f, M)
            for _ in range(power):
                R = R @ F
        return R

    def matrix_bound(self, M) -> float:
        """A priori size of p(M) from its factors; rounding in p(M) is relative to this."""
        mn = linalg.norm(M)
        if self.factors is None:
            return float(np.sum(np.abs(self.coeffs) * mn ** np.arange(len(self.coeffs))))
        b = abs(self.scale)
        for f, power in self.factors:
            b *= float(np.sum(np.abs(f) * mn ** np.arange(len(f)))) ** power
        return b

    def roots(self) -> np.ndarray:
        if self.factors is not None:
            out = []
            for f, power in self.factors:
                out.extend(list(_small_roots(f)) * power)
            return np.array(out, dtype=complex)
        return _small_roots(self.coeffs)

    def shift(self) -> "RealPolynomial":
        """lambda * p(lambda)."""
        factors = None if self.factors is None else self.factors + [(np.array([0.0, 1.0]), 1)]
        return RealPolynomial(np.concatenate([[0.0], self.coeffs]), factors, self.scale)

    def __neg__(self):
        return RealPolynomial(-self.coeffs, self.factors, -self.scale)

    def __eq__(self, other):
        return isinstance(other, RealPolynomial) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __repr__(self):
        return f"RealPolynomial({self.coeffs.tolist()})"

    def __str__(self):
        return format_polynomial(self.coeffs)

    def to_dict(self):
        return {"coefficients": self.coeffs.tolist(), "degree": self.degree, "text": str(self)}


def _small_roots(c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    nz = np.nonzero(c)[0]
    c = c[: nz[-1] + 1]
    d = len(c) - 1
    if d <= 0:
        return np.zeros(0, dtype=complex)
    if d == 1:
        return np.array([-c[0] / c[1]], dtype=complex)
    C = np.zeros((d, d))
    C[1:, :-1] = np.eye(d - 1)
    C[:, -1] = -c[:-1] / c[-1]
    return linalg.eigvals(C)


def _fmt_coef(x) -> str:
    return f"{x:.12g}"


def format_polynomial(coeffs) -> str:
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = float(coeffs[k])
        if c == 0 and len(coeffs) > 1:
            continue
        mag = abs(c)
        if k == 0:
            body = _fmt_coef(mag)
        else:
            power = LAMBDA if k == 1 else f"{LAMBDA}^{k}"
            body = power if mag == 1 else f"{_fmt_coef(mag)}{power}"
        sign = "-" if c < 0 else "+"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(f" {sign} {body}")
    return "".join(parts) if parts else "0"


def as_polynomial(p) -> RealPolynomial:
    if isinstance(p, RealPolynomial):
        return p
    return RealPolynomial(p)


def _psd_tolerance(pair, pM) -> float:
    return 1e-10 * (1.0 + linalg.norm(pair.G) * max(1.0, linalg.norm(pM)))


def definitizing_witness(pair: OperatorPair, p) -> tuple:
    """(min eigenvalue of G p(AG), tolerance, p(AG))."""
    p = as_polynomial(p)
    if p.is_zero():
        raise ZeroPolynomialError("the zero polynomial is never definitizing")
    pM = p.matrix(pair.AG)
    H = pair.G @ pM
    herm = linalg.hermiticity_residual(H)
    limit = 1e-9 * max(linalg.norm(pair.G), 1.0) * max(linalg.norm(pM), 1.0)
    if herm > limit:
        raise PreconditionError(f"G p(AG) is not Hermitian: residual {herm:.3e} > {limit:.3e}")
    w = linalg.hermitian_eigvals(0.5 * (H + H.conj().T))
    return float(w[0]), _psd_tolerance(pair, pM), pM


def is_definitizing(pair: OperatorPair, p) -> tuple:
    """(True if G p(AG) is positive semidefinite within tolerance, witness)."""
    witness, tol, _ = definitizing_witness(pair, p)
    return bool(witness >= -tol), witness


def independence_witness(ks: KreinStructure, p) -> tuple:
    """(min eigenvalue of G0 p(AG), tolerance): the same test in the G0 inner product."""
    p = as_polynomial(p)
    pM = p.matrix(ks.pair.AG)
    H = ks.G0 @ pM
    w = linalg.hermitian_eigvals(0.5 * (H + H.conj().T), tol=1e-6)
    tol = 1e-10 * (ks.g0_norm + linalg.norm(ks.G0) * max(1.0, linalg.norm(pM)))
    return float(w[0]), tol


def _gap_root(lo, hi, interior) -> float:
    """Root location for a sign change between two definite points lo < hi."""
    if lo < 0.0 < hi and all(abs(x) > 0 for x in interior):
        return 0.0
    pts = [lo] + sorted(interior) + [hi]
    gaps = [(pts[i + 1] - pts[i], i) for i in range(len(pts) - 1)]
    _, i = max(gaps)
    return 0.5 * (pts[i] + pts[i + 1])


def candidate_polynomials(pair, classification, degree_cap):
    """Structured candidates in the search order (degree, exponents, sign)."""
    projector = pair.projector
    tol = projector.cluster_tol
    mandatory = []
    for pc in classification.points:
        if pc.verdict == NON_REAL and pc.value.imag > 0:
            nu = pole_order(projector.T, pc.point, projection=projector.point_projection(pc.point))
            mu = pc.value
            mandatory.append((np.array([abs(mu) ** 2, -2.0 * mu.real, 1.0]), nu))
    real = sorted(classification.real_points(), key=lambda pc: pc.value.real)
    crit = [pc for pc in real if pc.verdict == CRITICAL]
    definite = [pc for pc in real if pc.verdict in (POSITIVE_TYPE, NEGATIVE_TYPE)]
    choices = []
    for pc in crit:
        x = pc.value.real
        if abs(x) <= tol + pc.point.cluster_radius:
            choices.append(range(0, max(2, pc.point.algebraic_multiplicity) + 1))
        else:
            choices.append(range(1, pc.point.algebraic_multiplicity + 2))
    base_deg = sum(2 * k for _, k in mandatory)
    combos = []
    for ks in itertools.product(*choices):
        crit_factors = [(np.array([-pc.value.real, 1.0]), k) for pc, k in zip(crit, ks) if k > 0]
        base = mandatory + crit_factors
        signs_needed = []
        for pc in definite:
            x = pc.value.real
            val = 1.0
            for f, k in base:
                val *= np.polynomial.polynomial.polyval(x, f) ** k
            want = 1.0 if pc.verdict == POSITIVE_TYPE else -1.0
            signs_needed.append(want * np.sign(val))
        roots = []
        for i in range(len(definite) - 1):
            if signs_needed[i] != signs_needed[i + 1]:
                lo, hi = definite[i].value.real, definite[i + 1].value.real
                interior = [pc.value.real for pc in real if lo < pc.value.real < hi]
                roots.append(_gap_root(lo, hi, interior))
        deg = base_deg + sum(ks) + len(roots)
        if deg > degree_cap:
            continue
        factors = base + [(np.array([-r, 1.0]), 1) for r in roots]
        if definite:
            # every extra linear factor is positive right of all roots
            global_signs = [signs_needed[-1]]
        else:
            global_signs = [1.0, -1.0]
        for sgn in global_signs:
            combos.append((deg, tuple(ks), -sgn, factors, sgn))
    combos.sort(key=lambda c: (c[0], c[1], c[2]))
    for deg, _, _, factors, sgn in combos:
        yield RealPolynomial.from_factors(factors, scale=sgn)


def annihilating_polynomial(pair, classification):
    """Real polynomial vanishing on AG: conjugate-pair and real factors to the pole orders."""
    projector = pair.projector
    factors = []
    for pc in classification.points:
        nu = pole_order(projector.T, pc.point, projection=projector.point_projection(pc.point))
        if pc.verdict == NON_REAL:
            if pc.value.imag > 0:
                mu = pc.value
                factors.append((np.array([abs(mu) ** 2, -2.0 * mu.real, 1.0]), nu))
        else:
            factors.append((np.array([-pc.value.real, 1.0]), nu))
    return RealPolynomial.from_factors(factors)


@dataclass
class SearchResult:
    polynomial: RealPolynomial
    witness: float
    tried: int
    fallback: bool = False
    log: list = field(default_factory=list)


def find_definitizing_polynomial(pair: OperatorPair, degree_cap=None, ks=None, classification=None) -> SearchResult:
    """Lowest-degree definitizing polynomial among structured candidates."""
    if degree_cap is None:
        degree_cap = 2 * pair.n
    if degree_cap < 1:
        raise PreconditionError("degree_cap must be at least 1")
    if classification is None:
        classification = classify_spectrum(pair, ks or build_g0(pair))
    best = (-np.inf, None)
    tried = 0
    log = []
    for p in candidate_polynomials(pair, classification, degree_cap):
        tried += 1
        ok, w = is_definitizing(pair, p)
        log.append((str(p), w))
        if ok:
            return SearchResult(p, w, tried, False, log)
        if w > best[0]:
            best = (w, p)
    for sgn in (1.0, -1.0):
        q = annihilating_polynomial(pair, classification)
        if sgn < 0:
            q = -q
        if q.degree > degree_cap:
            break
        tried += 1
        ok, w = is_definitizing(pair, q)
        log.append((str(q), w))
        if ok:
            return SearchResult(q, w, tried, True, log)
        if w > best[0]:
            best = (w, q)
    raise DefinitizingPolynomialNotFound(degree_cap, float(best[0]), best[1])


def _root_distance(p: RealPolynomial, x) -> float:
    r = p.roots()
    if len(r) == 0:
        return np.inf
    return float(np.min(np.abs(r - x)))


def critical_points(pair: OperatorPair, ks: KreinStructure, p, classification=None) -> list:
    """Real spectral points of neither definite type; checked against the roots of p."""
    p = as_polynomial(p)
    ok, w = is_definitizing(pair, p)
    if not ok:
        raise PreconditionError(f"{p} is not definitizing (witness {w:.3e})")
    if classification is None:
        classification = classify_spectrum(pair, ks)
    tol = pair.cluster_tol
    crit = sorted(pc.value.real for pc in classification.points if pc.verdict == CRITICAL)
    problems = []
    for c in crit:
        if abs(c) > tol and _root_distance(p, c) > 1e-6 * (1 + abs(c)):
            problems.append(f"critical point {c:.6g} is not a root of {p}")
    if pair.g_is_singular() and not any(abs(c) <= tol for c in crit):
        problems.append("G is singular but 0 is not critical")
    if problems:
        raise TheoremCheckError(problems)
    return crit


@dataclass
class DefinitizabilityCertificate:
    p: RealPolynomial
    lambda0: complex
    psd_witness: float
    psd_tolerance: float
    indep_witness: float
    indep_tolerance: float
    A0: np.ndarray
    r1_residual: float
    r1_limit: float
    r2_residual: float
    r2_limit: float
    triple_witness: float
    triple_tolerance: float
    a0_hermiticity: float = 0.0
    ks: KreinStructure = None

    def report(self) -> Report:
        rep = Report("certificate")
        rep.add(Check.at_least("psd_witness", self.psd_witness, -self.psd_tolerance))
        rep.add(Check.at_least("indep_witness", self.indep_witness, -self.indep_tolerance))
        rep.add(Check.at_most("r1_residual", self.r1_residual, self.r1_limit))
        rep.add(Check.at_most("r2_residual", self.r2_residual, self.r2_limit))
        rep.add(Check.at_least("triple_witness", self.triple_witness, -self.triple_tolerance))
        return rep

    def to_dict(self):
        return {
            "p": self.p.to_dict(),
            "lambda0": self.lambda0,
            "psd_witness": self.psd_witness,
            "indep_witness": self.indep_witness,
            "r1_residual": self.r1_residual,
            "r2_residual": self.r2_residual,
            "triple_witness": self.triple_witness,
            "a0_norm": linalg.norm(self.A0),
            "checks": self.report().to_dict()["checks"],
        }


def _right_solve_power(X, lu, power):
    """X M^-power using adjoint solves: X M^-1 = (M^-* X*)*."""
    Y = X.conj().T
    for _ in range(power):
        Y = lu.solve(Y, adjoint=True)
    return Y.conj().T


def _left_solve_power(X, lu, power):
    for _ in range(power):
        X = lu.solve(X)
    return X


def _p_at_lambda0_small(p, lam) -> bool:
    size = float(np.sum(np.abs(p.coeffs) * np.abs(lam) ** np.arange(len(p.coeffs))))
    return abs(p(lam)) <= 1e-8 * max(size, np.finfo(float).tiny)


def build_certificate(pair: OperatorPair, ks: KreinStructure, p) -> DefinitizabilityCertificate:
    p = as_polynomial(p)
    lam = ks.lambda0
    attempts = 0
    while _p_at_lambda0_small(p, lam):
        attempts += 1
        if attempts > 6:
            raise ConfigurationError(f"no lambda0 with p(lambda0) != 0 found for {p}")
        lam = complex(0.37 * attempts * abs(lam), abs(lam) * (1.0 + 0.5 * attempts))
        ks = build_g0(pair, lam)
    m = p.m
    n = pair.n
    A, G = pair.A, pair.G
    GA, AG = pair.GA, pair.AG
    N = resolvent_product(GA, lam)
    lu_n = linalg.LUFactor(N)
    A0 = _right_solve_power(A @ G @ A @ p.matrix(GA), lu_n, m)
    a0_herm = linalg.hermiticity_residual(A0)
    A0 = 0.5 * (A0 + A0.conj().T)
    M = resolvent_product(AG, lam)
    lu_m = linalg.LUFactor(M)
    core = AG @ AG @ p.matrix(AG)
    r1 = _left_solve_power(core, lu_m, m + 1)
    r2 = lu_m.solve(r1)
    # limits are relative to the unreduced ingredient sizes, since p(AG) may vanish
    eye = np.eye(n)
    pb = p.matrix_bound(AG)
    inv_n = linalg.norm(lu_n.solve(eye))
    inv_m = linalg.norm(lu_m.solve(eye))
    g0n = linalg.norm(ks.G0)
    a0_size = linalg.norm(A) ** 2 * linalg.norm(G) * pb * inv_n ** m
    r1_size = linalg.norm(AG) ** 2 * pb * inv_m ** (m + 1)
    tiny = np.finfo(float).tiny
    A0G0 = A0 @ ks.G0
    r1_res = linalg.norm(r1 - A0G0)
    r1_lim = 1e-8 * max(r1_size + a0_size * g0n, tiny)
    triple = ks.G0 @ A0 @ ks.G0
    r2_res = linalg.norm(G @ r2 - triple)
    r2_lim = 1e-8 * max(linalg.norm(G) * r1_size * inv_m + a0_size * g0n ** 2, tiny)
    triple_h = 0.5 * (triple + triple.conj().T)
    tw = float(linalg.hermitian_eigvals(triple_h, tol=1e-6)[0]) if n else 0.0
    t_tol = 1e-9 * max(a0_size * g0n ** 2, tiny)
    psd, psd_tol, _ = definitizing_witness(pair, p)
    ind, ind_tol = independence_witness(ks, p)
    return DefinitizabilityCertificate(
        p, lam, psd, psd_tol, ind, ind_tol, A0, r1_res, r1_lim, r2_res, r2_lim, tw, t_tol, a0_herm, ks
    )


def theorem_main_report(pair: OperatorPair, ks: KreinStructure, p, classification=None) -> Report:
    """Non-real points are roots of p; the sign of p on real nonzero points matches the type."""
    p = as_polynomial(p)
    if classification is None:
        classification = classify_spectrum(pair, ks)
    projector = pair.projector
    tol = projector.cluster_tol
    rep = Report("theorem_main")
    root_violations = []
    type_violations = []
    pole_orders = {}
    for pc in classification.points:
        x = pc.value
        if pc.verdict == NON_REAL:
            d = _root_distance(p, x)
            if d > 1e-6 * (1 + abs(x)):
                root_violations.append(x)
            pole_orders[str(x)] = pole_order(projector.T, pc.point, projection=projector.point_projection(pc.point))
            continue
        if abs(x) <= tol + pc.point.cluster_radius:
            continue
        val = float(p(x.real))
        size = float(np.sum(np.abs(p.coeffs) * abs(x.real) ** np.arange(len(p.coeffs))))
        if abs(val) <= 1e-10 * size:
            continue
        want = POSITIVE_TYPE if val > 0 else NEGATIVE_TYPE
        if pc.verdict != want:
            type_violations.append((x.real, pc.verdict, want))
    rep.add(Check.at_most("nonreal_roots_of_p", len(root_violations), 0, str(root_violations[:3])))
    rep.add(Check.at_most("sign_type_violations", len(type_violations), 0, str(type_violations[:3])))
    rep.data.update({"pole_orders": pole_orders, "p": str(p)})
    return rep


def swap_polynomial(p) -> RealPolynomial:
    p = as_polynomial(p)
    if p.is_zero():
        raise ZeroPolynomialError("zero polynomial")
    return p.shift()


def _invertible(M, rtol=1e-10) -> bool:
    if M.shape[0] == 0:
        return True
    s = np.linalg.svd(M, compute_uv=False)
    return bool(s[0] > 0 and s[-1] > rtol * s[0])


def zero_invertibility_report(pair: OperatorPair) -> Report:
    """The equivalent invertibility conditions at 0 and equality of the full spectra."""
    conds = {
        "AG_injective": _invertible(pair.AG),
        "AG_surjective": _invertible(pair.AG.conj().T),
        "GA_injective": _invertible(pair.GA),
        "GA_surjective": _invertible(pair.GA.conj().T),
        "A_and_G_invertible": _invertible(pair.A) and _invertible(pair.G),
    }
    rep = Report("zero_invertibility")
    vals = set(conds.values())
    rep.add(Check.flag("conditions_equivalent", len(vals) == 1, str(conds)))
    tol = pair.cluster_tol
    s1 = linalg.points_from_values(linalg.eigvals(pair.AG), tol)
    s2 = linalg.points_from_values(linalg.eigvals(pair.GA), tol)
    zero1 = any(abs(p.value) <= tol + p.cluster_radius for p in s1)
    zero2 = any(abs(p.value) <= tol + p.cluster_radius for p in s2)
    if vals == {True}:
        d = _hausdorff([p.value for p in s1], [p.value for p in s2])
        rep.add(Check.at_most("spectra_equal", d, 1e-8 * pair.scale))
    else:
        rep.add(Check.flag("zero_in_both_spectra", zero1 and zero2))
    rep.data.update(conds)
    return rep
