"""Finite-difference pairs for -(p f')' + q f = lambda w f with Dirichlet ends."""

import math
import re
from dataclasses import dataclass

import numpy as np

from . import linalg
from .classify import CRITICAL, NON_REAL, classify_spectrum
from .definitize import RealPolynomial, is_definitizing
from .errors import ConfigurationError, PreconditionError
from .krein import OperatorPair, build_g0
from .report import Check, Report
from .spectral_function import BorelSet, SpectralFunction, partition_check

G_INVERTIBLE_RTOL = 1e-10


def parse_coefficients(spec, name="coefficient"):
    """Ascending coefficient list from a number, a list, or a polynomial literal such as "1+0.5*x"."""
    if isinstance(spec, (int, float)):
        return [float(spec)]
    if isinstance(spec, (list, tuple)):
        if not spec:
            raise ConfigurationError(f"{name}: empty coefficient list")
        try:
            return [float(c) for c in spec]
        except (TypeError, ValueError):
            raise ConfigurationError(f"{name}: coefficients must be numbers, got {spec!r}") from None
    if isinstance(spec, str):
        return _parse_poly_literal(spec, name)
    raise ConfigurationError(f"{name}: unsupported coefficient spec {spec!r}")


_TERM = re.compile(r"(?P<c>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?(?P<x>\*?x(?:(?:\^|\*\*)(?P<k>\d+))?)?")


def _parse_poly_literal(text, name):
    body = text.replace(" ", "")
    terms = [t for t in re.split(r"(?<![eE])(?=[+-])", body) if t]
    if not terms:
        raise ConfigurationError(f"{name}: empty polynomial")
    coeffs = {}
    for term in terms:
        sign = -1.0 if term[0] == "-" else 1.0
        core = term.lstrip("+-")
        m = _TERM.fullmatch(core)
        if not core or not m or (m.group("x") or "").startswith("*") and m.group("c") is None:
            raise ConfigurationError(f"{name}: cannot read term {term!r} of {text!r}")
        value = float(m.group("c")) if m.group("c") is not None else 1.0
        k = 0 if m.group("x") is None else int(m.group("k") or 1)
        coeffs[k] = coeffs.get(k, 0.0) + sign * value
    out = [0.0] * (max(coeffs) + 1)
    for k, v in coeffs.items():
        out[k] = v
    return out


def _as_function(spec, name):
    if callable(spec):
        return spec
    coeffs = parse_coefficients(spec, name)

    def f(x):
        acc = np.zeros_like(np.asarray(x, dtype=float))
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc

    return f


@dataclass
class SLProblem:
    interval: tuple
    n: int
    w: object = 1.0
    p: object = 1.0
    q: object = 0.0

    def __post_init__(self):
        try:
            a, b = (float(v) for v in self.interval)
        except (TypeError, ValueError):
            raise ConfigurationError(f"interval must be two numbers, got {self.interval!r}") from None
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ConfigurationError(f"interval must be finite with a < b, got {self.interval!r}")
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool) or self.n < 2:
            raise ConfigurationError(f"n must be an integer >= 2, got {self.n!r}")
        self.interval = (a, b)
        self.n = int(self.n)
        self._w = _as_function(self.w, "w")
        self._p = _as_function(self.p, "p")
        self._q = _as_function(self.q, "q")

    @classmethod
    def from_config(cls, cfg: dict) -> "SLProblem":
        missing = [k for k in ("interval", "n") if k not in cfg]
        if missing:
            raise ConfigurationError(f"SL config lacks {missing}")
        unknown = set(cfg) - {"interval", "n", "w", "p", "q"}
        if unknown:
            raise ConfigurationError(f"SL config has unknown keys {sorted(unknown)}")
        return cls(cfg["interval"], cfg["n"], cfg.get("w", 1.0), cfg.get("p", 1.0), cfg.get("q", 0.0))

    @property
    def h(self) -> float:
        a, b = self.interval
        return (b - a) / (self.n + 1)

    @property
    def grid(self) -> np.ndarray:
        a, _ = self.interval
        return a + self.h * np.arange(1, self.n + 1)

    def to_dict(self):
        def show(c):
            return "callable" if callable(c) else c

        return {"interval": list(self.interval), "n": self.n, "w": show(self.w), "p": show(self.p), "q": show(self.q)}


def _sample(f, x, name):
    vals = np.asarray(f(x), dtype=float) * np.ones_like(x)
    bad = np.nonzero(~np.isfinite(vals))[0]
    if len(bad):
        raise ConfigurationError(f"{name} is not finite at x = {x[bad[0]]:.6g}")
    return vals


def discretize(prob: SLProblem) -> OperatorPair:
    h = prob.h
    x = prob.grid
    half = np.concatenate([[x[0] - 0.5 * h], x + 0.5 * h])
    w = _sample(prob._w, x, "w")
    p = _sample(prob._p, half, "p")
    q = _sample(prob._q, x, "q")
    if np.any(w <= 0):
        i = int(np.argmax(w <= 0))
        raise ConfigurationError(f"w must be positive, w({x[i]:.6g}) = {w[i]:.6g}")
    if np.any(p == 0):
        i = int(np.argmax(p == 0))
        raise ConfigurationError(f"p vanishes at x = {half[i]:.6g}")
    G = np.diag((p[:-1] + p[1:]) / h**2 + q)
    off = -p[1:-1] / h**2
    G[np.arange(prob.n - 1), np.arange(1, prob.n)] = off
    G[np.arange(1, prob.n), np.arange(prob.n - 1)] = off
    A = np.diag(1.0 / w)
    return OperatorPair(A, G)


@dataclass(eq=False)
class SLAnalysis:
    problem: SLProblem
    pair: OperatorPair
    ks: object
    classification: object
    spectral_function: SpectralFunction
    report: Report


def sl_analysis(prob: SLProblem, seed=0) -> SLAnalysis:
    """Discretize, check invertibility of G, classify and build the spectral function."""
    pair = discretize(prob)
    g = np.abs(linalg.hermitian_eigvals(pair.G))
    gmin, gnorm = float(g.min()), linalg.norm(pair.G)
    if gmin <= G_INVERTIBLE_RTOL * gnorm:
        raise PreconditionError(f"discretized G is singular: min |eig| = {gmin:.3e}")
    rep = Report("sturm_liouville")
    ok, witness = is_definitizing(pair, RealPolynomial([0.0, 1.0]))
    rep.add(Check.flag("lambda_is_definitizing", ok, f"min eig of G A G = {witness:.6g}"))
    imag = float(np.abs(pair.eigenvalues.imag).max())
    rep.add(Check.at_most("spectrum_real", imag, 1e-8 * pair.scale))
    ks = build_g0(pair)
    cls = classify_spectrum(pair, ks, seed=seed)
    tol = pair.cluster_tol
    nonzero = [pc for pc in cls.points if abs(pc.value) > tol + pc.point.cluster_radius]
    indefinite = [pc.value for pc in nonzero if pc.verdict in (CRITICAL, NON_REAL)]
    rep.add(Check.flag("nonzero_points_definite", not indefinite, f"{len(indefinite)} not definite"))
    crit = [c for c in cls.critical_candidates if abs(c) > tol]
    rep.add(Check.flag("critical_set_within_zero", not crit, str(crit)))
    sf = SpectralFunction(pair, ks, [c for c in cls.critical_candidates if abs(c) <= tol], cls, seed=seed)
    if sf.critical_set:
        cover = [BorelSet.interval(-sf.R, sf.R)]
    else:
        cover = [BorelSet.interval(-sf.R, 0.0, True, False), BorelSet.interval(0.0, sf.R)]
    rep.add(Check.at_most("partition", partition_check(sf, cover), 1e-8))
    w = pair.eigenvalues.real
    rep.data.update(
        {
            "n": prob.n,
            "h": prob.h,
            "min_abs_eig_G": gmin,
            "smallest_eigenvalue": float(w.min()),
            "largest_eigenvalue": float(w.max()),
            "positive_type": len(cls.sigma_plus),
            "negative_type": len(cls.sigma_minus),
            "critical_set": sf.critical_set,
        }
    )
    return SLAnalysis(prob, pair, ks, cls, sf, rep)


def sl_report(prob: SLProblem, seed=0) -> Report:
    return sl_analysis(prob, seed=seed).report
