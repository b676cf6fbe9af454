"""Spectral function of AG on the real line, built from point projections, and its axiom checks."""

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import linalg
from .classify import CRITICAL, NEGATIVE_TYPE, NON_REAL, POSITIVE_TYPE, classify_spectrum
from .errors import AdmissibilityError, PreconditionError
from .krein import NEGATIVE, POSITIVE, KreinStructure, OperatorPair, build_g0, subspace_verdict
from .report import Check, Report
from .riesz import ContourProjector

AXIOM_TOL = 1e-8
ORACLE_NODES = 64


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def is_empty(self) -> bool:
        if self.lo > self.hi:
            return True
        if self.lo == self.hi:
            return not (self.lo_closed and self.hi_closed) or math.isinf(self.lo)
        return False

    def contains(self, x) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def __str__(self):
        left = "[" if self.lo_closed and not math.isinf(self.lo) else "("
        right = "]" if self.hi_closed and not math.isinf(self.hi) else ")"
        return f"{left}{_num(self.lo)},{_num(self.hi)}{right}"


def _num(x) -> str:
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return f"{x:.12g}"


def _intersect(a: Interval, b: Interval) -> Interval:
    if a.lo > b.lo:
        lo, lc = a.lo, a.lo_closed
    elif b.lo > a.lo:
        lo, lc = b.lo, b.lo_closed
    else:
        lo, lc = a.lo, a.lo_closed and b.lo_closed
    if a.hi < b.hi:
        hi, hc = a.hi, a.hi_closed
    elif b.hi < a.hi:
        hi, hc = b.hi, b.hi_closed
    else:
        hi, hc = a.hi, a.hi_closed and b.hi_closed
    return Interval(lo, hi, lc, hc)


def _touch(a: Interval, b: Interval) -> bool:
    """a lies left of b; true if their union is an interval."""
    if a.hi > b.lo:
        return True
    return a.hi == b.lo and (a.hi_closed or b.lo_closed)


class BorelSet:
    """Finite union of disjoint intervals, kept sorted and merged."""

    def __init__(self, intervals=()):
        ivs = sorted((iv for iv in intervals if not iv.is_empty()), key=lambda iv: (iv.lo, not iv.lo_closed))
        merged = []
        for iv in ivs:
            if merged and _touch(merged[-1], iv):
                last = merged[-1]
                if iv.hi > last.hi:
                    hi, hc = iv.hi, iv.hi_closed
                elif iv.hi < last.hi:
                    hi, hc = last.hi, last.hi_closed
                else:
                    hi, hc = last.hi, last.hi_closed or iv.hi_closed
                merged[-1] = Interval(last.lo, hi, last.lo_closed, hc)
            else:
                merged.append(iv)
        self.intervals = tuple(merged)

    @classmethod
    def interval(cls, lo, hi, lo_closed=True, hi_closed=True):
        return cls([Interval(float(lo), float(hi), lo_closed, hi_closed)])

    @classmethod
    def empty(cls):
        return cls()

    @classmethod
    def parse(cls, text: str) -> "BorelSet":
        """Parse unions like "[0,4]", "(-1,2]u[3,inf)"; "{}" is the empty set."""
        text = text.replace(" ", "")
        if text in ("", "{}", "empty"):
            return cls()
        pieces = re.split(r"[uU∪]", text)
        ivs = []
        for piece in pieces:
            m = re.fullmatch(r"([\[(])([^,]+),([^\])]+)([\])])", piece)
            if not m:
                raise ValueError(f"cannot parse interval {piece!r}")
            lo, hi = float(m.group(2)), float(m.group(3))
            ivs.append(Interval(lo, hi, m.group(1) == "[", m.group(4) == "]"))
        return cls(ivs)

    def is_empty(self) -> bool:
        return not self.intervals

    def contains(self, x) -> bool:
        return any(iv.contains(x) for iv in self.intervals)

    def is_bounded(self) -> bool:
        return all(not math.isinf(iv.lo) and not math.isinf(iv.hi) for iv in self.intervals)

    def boundary(self):
        pts = []
        for iv in self.intervals:
            for x in (iv.lo, iv.hi):
                if not math.isinf(x):
                    pts.append(x)
        return sorted(set(pts))

    def interior_contains(self, x) -> bool:
        return self.contains(x) and x not in self.boundary()

    def intersection(self, other: "BorelSet") -> "BorelSet":
        return BorelSet([_intersect(a, b) for a in self.intervals for b in other.intervals])

    def union(self, other: "BorelSet") -> "BorelSet":
        return BorelSet(self.intervals + other.intervals)

    def complement(self) -> "BorelSet":
        out = []
        lo, lc = -math.inf, False
        for iv in self.intervals:
            out.append(Interval(lo, iv.lo, lc, not iv.lo_closed))
            lo, lc = iv.hi, not iv.hi_closed
        out.append(Interval(lo, math.inf, lc, False))
        return BorelSet(out)

    def difference(self, other: "BorelSet") -> "BorelSet":
        return self.intersection(other.complement())

    def disjoint(self, other: "BorelSet") -> bool:
        return self.intersection(other).is_empty()

    def clip(self, R) -> "BorelSet":
        return self.intersection(BorelSet.interval(-R, R))

    def __eq__(self, other):
        return isinstance(other, BorelSet) and self.intervals == other.intervals

    def __hash__(self):
        return hash(self.intervals)

    def __str__(self):
        return "u".join(str(iv) for iv in self.intervals) if self.intervals else "{}"

    __repr__ = __str__


@dataclass(eq=False)
class SetProjection:
    """E(Delta) together with its consistency residuals."""

    delta: BorelSet
    P: np.ndarray
    rank: int
    points: tuple
    oracle_residual: float = 0.0
    symmetry_residual: float = 0.0
    parts: list = field(default_factory=list)

    def to_dict(self):
        return {
            "set": str(self.delta),
            "rank": self.rank,
            "points": [complex(p.value) for p in self.points],
            "oracle_residual": self.oracle_residual,
            "symmetry_residual": self.symmetry_residual,
            "parts": self.parts,
        }


class SpectralFunction:
    """E(Delta) for bounded Borel sets whose boundary avoids the critical set."""

    def __init__(self, pair: OperatorPair, ks: KreinStructure, critical_set, classification, projector=None, seed=0):
        self.pair = pair
        self.ks = ks
        self.classification = classification
        self.projector = projector or pair.projector
        self.critical_set = sorted(float(c) for c in critical_set)
        self.seed = seed
        tol = self.projector.cluster_tol
        self.tol = tol
        self.real_points = sorted(
            (pc.point for pc in classification.points if pc.verdict != NON_REAL), key=lambda p: p.value.real
        )
        self.nonreal_points = [pc.point for pc in classification.points if pc.verdict == NON_REAL]
        self.R = 2.0 * (1.0 + pair.spectral_radius)
        self._oracle_cache = {}

    @cached_property
    def oracle(self) -> ContourProjector:
        """Independent projector: separate Hessenberg reduction, sketch seed and start nodes."""
        return ContourProjector(
            self.pair.AG, points=self.projector.points, cluster_tol=self.tol, seed=self.seed + 7919
        )

    @property
    def n(self) -> int:
        return self.pair.n

    def check_admissible(self, delta: BorelSet):
        for x in delta.boundary():
            for c in self.critical_set:
                if abs(x - c) <= self.tol:
                    raise AdmissibilityError(c)

    def points_in(self, delta: BorelSet):
        return [p for p in self.real_points if delta.contains(p.value.real)]

    def _oracle_point(self, p):
        if p not in self._oracle_cache:
            self._oracle_cache[p] = self.oracle.project([self.oracle.match(p)], nodes=ORACLE_NODES)
        return self._oracle_cache[p]

    def _sum_points(self, points, oracle=False) -> np.ndarray:
        """Sum of point projections; factored pieces are stacked into one product."""
        P = np.zeros((self.n, self.n), dtype=np.complex128)
        left, right = [], []
        for p in points:
            E = self._oracle_point(p) if oracle else self.projector.point_projection(p)
            if E.dense is not None:
                P += E.dense
            else:
                left.append(E.U @ E.core)
                right.append(E.W)
        if left:
            P += np.hstack(left) @ np.hstack(right).conj().T
        return P

    def _critical_window(self, alpha, delta: BorelSet):
        """Small compact interval around alpha inside delta, free of other critical points."""
        others = [c for c in self.critical_set if c != alpha]
        bounds = [abs(alpha - c) for c in others] + [abs(alpha - b) for b in delta.boundary()]
        eps = 0.5 * min(bounds) if bounds else self.R
        eps = min(eps, self.R)
        lo, hi = alpha - eps, alpha + eps
        # keep window endpoints off the spectrum
        for p in self.real_points:
            x = p.value.real
            if abs(x - lo) <= self.tol:
                lo = 0.5 * (lo + alpha)
            if abs(x - hi) <= self.tol:
                hi = 0.5 * (hi + alpha)
        return lo, hi

    def _step2(self, lo, hi, alpha):
        """E([lo, hi]) for a window containing exactly one critical point, assembled literally."""
        inner = [p for p in self.real_points if lo <= p.value.real <= hi]
        left = [p for p in inner if p.value.real < alpha - self.tol - p.cluster_radius]
        right = [p for p in inner if p.value.real > alpha + self.tol + p.cluster_radius]
        centre = [p for p in inner if p not in left and p not in right]
        F = self._sum_points(left) + self._sum_points(right)
        eye = np.eye(self.n)
        comp = eye - F
        flank_rank = sum(p.algebraic_multiplicity for p in left + right)
        V = linalg.orthonormal_basis(comp)
        V = V[:, : self.n - flank_rank]
        Tc = V.conj().T @ self.pair.AG @ V
        if Tc.shape[0] == 0 or not centre:
            inner_P = np.zeros((self.n, self.n), dtype=np.complex128)
        else:
            sub = ContourProjector(Tc, cluster_tol=self.tol, seed=self.seed + 1)
            targets = [sub.match(p.value) for p in centre]
            Pt = sub.project(targets).P
            inner_P = V @ Pt @ V.conj().T @ comp
        info = {
            "window": [lo, hi],
            "critical": alpha,
            "flank_rank": flank_rank,
            "compressed_dim": int(V.shape[1]),
        }
        return F + inner_P, info

    def _assemble(self, delta: BorelSet):
        parts = []
        P = np.zeros((self.n, self.n), dtype=np.complex128)
        remainder = delta
        for alpha in self.critical_set:
            if not delta.interior_contains(alpha):
                continue
            lo, hi = self._critical_window(alpha, delta)
            Pa, info = self._step2(lo, hi, alpha)
            P += Pa
            parts.append(info)
            remainder = remainder.difference(BorelSet.interval(lo, hi))
        rest = self.points_in(remainder)
        P += self._sum_points(rest)
        parts.append({"definite_points": len(rest)})
        return P, parts

    def projection(self, delta, check=True) -> SetProjection:
        if isinstance(delta, str):
            delta = BorelSet.parse(delta)
        self.check_admissible(delta)
        delta = delta.clip(self.R)
        pts = tuple(self.points_in(delta))
        rank = int(sum(p.algebraic_multiplicity for p in pts))
        P, parts = self._assemble(delta)
        res = SetProjection(delta, P, rank, pts, parts=parts)
        if check:
            O = self._sum_points(pts, oracle=True)
            res.oracle_residual = linalg.norm(P - O)
            G0 = self.ks.G0
            res.symmetry_residual = linalg.norm(G0 @ P - P.conj().T @ G0) / max(self.ks.g0_norm, np.finfo(float).tiny)
        return res


def build_spectral_function(pair: OperatorPair, ks=None, critical_set=None, classification=None, seed=0):
    ks = ks or build_g0(pair)
    if classification is None:
        classification = classify_spectrum(pair, ks)
    if critical_set is None:
        critical_set = classification.critical_candidates
    return SpectralFunction(pair, ks, critical_set, classification, seed=seed)


def spectral_projection(sf: SpectralFunction, delta, check=True) -> SetProjection:
    return sf.projection(delta, check=check)


def _compression_spectrum(T, E, rank):
    if rank == 0:
        return np.zeros(0, dtype=complex)
    U, _, _ = np.linalg.svd(E, full_matrices=False)
    V = U[:, :rank]
    return linalg.eigvals(V.conj().T @ T @ V)


def _inclusion_gap(values, allowed_points) -> float:
    """Largest distance from a computed eigenvalue to the allowed spectral points, net of cluster radii."""
    if len(values) == 0:
        return 0.0
    if not allowed_points:
        return math.inf
    centres = np.array([p.value for p in allowed_points])
    radii = np.array([p.cluster_radius for p in allowed_points])
    d = np.abs(np.asarray(values)[:, None] - centres[None, :]) - radii[None, :]
    return float(max(d.min(axis=1).max(), 0.0))


def _inclusion_tol(sf, points):
    """cluster_tol, widened at defective points where eigenvalues are only accurate to tol**(1/nu)."""
    t = sf.tol
    for p in points:
        if p.algebraic_multiplicity > 1 and p.cluster_radius > 0:
            scale = 1.0 + sf.pair.spectral_radius
            t = max(t, (sf.tol / scale) ** (1.0 / p.algebraic_multiplicity) * scale)
    return t


def verify_axioms(sf: SpectralFunction, deltas, n_poly=20, n_resolvent=5, seed=0) -> Report:
    """Multiplicativity, additivity, commutation and spectral inclusion over a family of sets."""
    rng = np.random.default_rng(seed)
    rep = Report("axioms")
    sets = [BorelSet.parse(d) if isinstance(d, str) else d for d in deltas]
    proj = {}

    def E(d):
        d = d.clip(sf.R)
        if d not in proj:
            proj[d] = sf.projection(d)
        return proj[d].P

    s1 = s2 = 0.0
    npairs = 0
    for a, b in itertools.combinations_with_replacement(range(len(sets)), 2):
        da, db = sets[a], sets[b]
        s1 = max(s1, linalg.norm(E(da.intersection(db)) - E(da) @ E(db)))
        if da.disjoint(db):
            s2 = max(s2, linalg.norm(E(da.union(db)) - E(da) - E(db)))
            npairs += 1
    rep.add(Check.at_most("S1_multiplicative", s1, AXIOM_TOL))
    rep.add(Check.at_most("S2_additive", s2, AXIOM_TOL, f"{npairs} disjoint pairs"))
    T = sf.pair.AG
    n = sf.n
    scale = 1.0 + sf.pair.spectral_radius
    commutants = []
    for _ in range(n_poly):
        deg = int(rng.integers(0, 4))
        q = rng.standard_normal(deg + 1)
        commutants.append(linalg.horner_matrix(q, T / scale))
    for _ in range(n_resolvent):
        mu = scale * (1.0 + rng.random()) * np.exp(2j * np.pi * rng.random())
        commutants.append(linalg.solve_linear(T - mu * np.eye(n), np.eye(n)))
    base = [proj[d.clip(sf.R)] for d in sets]
    s3 = 0.0
    for B in commutants:
        bn = max(linalg.norm(B), np.finfo(float).tiny)
        for r in base:
            s3 = max(s3, linalg.norm(r.P @ B - B @ r.P) / bn)
    rep.add(Check.at_most("S3_commutes", s3, AXIOM_TOL, f"{len(commutants)} commutants, relative to |B|"))
    s4 = s5 = 0.0
    all_points = sf.real_points + sf.nonreal_points
    for r in base:
        inside = list(r.points)
        outside = [p for p in all_points if p not in inside]
        tol = _inclusion_tol(sf, all_points)
        gap_in = _inclusion_gap(_compression_spectrum(T, r.P, r.rank), inside)
        gap_out = _inclusion_gap(_compression_spectrum(T, np.eye(n) - r.P, n - r.rank), outside)
        s4 = max(s4, gap_in / tol)
        s5 = max(s5, gap_out / tol)
    rep.add(Check.at_most("S4_inclusion", s4, 1.0, "gap / tolerance"))
    rep.add(Check.at_most("S5_inclusion", s5, 1.0, "gap / tolerance"))
    oracle = max((r.oracle_residual for r in proj.values()), default=0.0)
    sym = max((r.symmetry_residual for r in proj.values()), default=0.0)
    rep.add(Check.at_most("step_assembly_vs_oracle", oracle, AXIOM_TOL))
    rep.add(Check.at_most("g0_symmetry", sym, AXIOM_TOL, "relative to |G0|"))
    rep.data.update({"sets": [str(s) for s in sets], "evaluated": len(proj)})
    return rep


def partition_check(sf: SpectralFunction, cover) -> float:
    """|| sum E(Delta_i) + non-real pair projections - I || for a disjoint cover of the real spectrum."""
    cover = [BorelSet.parse(c) if isinstance(c, str) else c for c in cover]
    for a, b in itertools.combinations(cover, 2):
        if not a.disjoint(b):
            raise PreconditionError(f"cover sets {a} and {b} overlap")
    for p in sf.real_points:
        if not any(c.contains(p.value.real) for c in cover):
            raise PreconditionError(f"cover misses spectral point {p.value.real:.6g}")
    total = np.zeros((sf.n, sf.n), dtype=np.complex128)
    for c in cover:
        total += sf.projection(c, check=False).P
    for p in sf.nonreal_points:
        total += sf.projector.point_projection(p).P
    return linalg.norm(total - np.eye(sf.n))


def boundary_limit_probe(sf: SpectralFunction, alpha, eps, t_grid) -> Report:
    """One-sided families E([alpha+t, alpha+eps]) and E([alpha-eps, alpha-t]) as t decreases."""
    if not any(abs(alpha - c) <= sf.tol for c in sf.critical_set):
        raise PreconditionError(f"{alpha} is not a critical point")
    for c in sf.critical_set:
        if abs(c - alpha) > sf.tol and abs(c - alpha) <= eps:
            raise PreconditionError(f"window of half-width {eps} around {alpha} meets critical point {c}")
    ts = sorted((float(t) for t in t_grid), reverse=True)
    rep = Report("boundary_limit")
    sides = {}
    for name, make in (
        ("right", lambda t: BorelSet.interval(alpha + t, alpha + eps)),
        ("left", lambda t: BorelSet.interval(alpha - eps, alpha - t)),
    ):
        mats = [sf.projection(make(t), check=False).P for t in ts]
        norms = [linalg.norm(M) for M in mats]
        steps = [linalg.norm(mats[i + 1] - mats[i]) for i in range(len(mats) - 1)]
        sides[name] = {"sup_norm": max(norms, default=0.0), "last_step": steps[-1] if steps else 0.0, "norms": norms}
        rep.add(Check.at_most(f"{name}_cauchy_tail", steps[-1] if steps else 0.0, AXIOM_TOL))
    rep.data.update(sides)
    rep.data["conclusion"] = "no singularity in finite dimension"
    return rep


@dataclass
class DefiniteIntervalResult:
    verdict: object
    rank: int
    maximal: bool
    symmetry_residual: float
    matches_expected: bool

    def to_dict(self):
        return {
            "verdict": None if self.verdict is None else self.verdict.to_dict(),
            "rank": self.rank,
            "maximal": self.maximal,
            "symmetry_residual": self.symmetry_residual,
            "matches_expected": self.matches_expected,
        }


def definite_interval_projection(sf: SpectralFunction, delta, expected_type) -> DefiniteIntervalResult:
    """E(Delta) range for a set of one definite type: uniformly signed and equal to the oracle range."""
    if isinstance(delta, str):
        delta = BorelSet.parse(delta)
    for c in sf.critical_set:
        if delta.contains(c):
            raise PreconditionError(f"{delta} contains critical point {c}")
    kinds = {sf.classification.verdict_at(p.value, sf.tol) for p in sf.points_in(delta.clip(sf.R))}
    if kinds - {expected_type} or CRITICAL in kinds:
        raise PreconditionError(f"{delta} is not purely {expected_type}: {sorted(kinds)}")
    r = sf.projection(delta)
    if r.rank == 0:
        return DefiniteIntervalResult(None, 0, True, r.symmetry_residual, True)
    U, _, _ = np.linalg.svd(r.P, full_matrices=False)
    V = U[:, : r.rank]
    verdict = subspace_verdict(sf.ks, V)
    O = sf._sum_points(r.points, oracle=True)
    Uo, _, _ = np.linalg.svd(O, full_matrices=False)
    Vo = Uo[:, : r.rank]
    maximal = bool(linalg.norm(Vo - V @ (V.conj().T @ Vo)) <= 1e-8)
    want = POSITIVE if expected_type == POSITIVE_TYPE else NEGATIVE
    matches = verdict.kind == want and verdict.delta > 0
    return DefiniteIntervalResult(verdict, r.rank, maximal, r.symmetry_residual, matches)


def generate_sets(sf: SpectralFunction, minimum=12, rng=None):
    """Admissible bounded sets with boundaries in spectral gaps, including ones around critical points."""
    rng = rng or np.random.default_rng(0)
    xs = sorted({round(p.value.real, 12) for p in sf.real_points})
    R = sf.R
    cuts = [-R]
    for a, b in zip(xs, xs[1:]):
        cuts.append(0.5 * (a + b))
    cuts.append(R)
    extra = [-0.5 * R, 0.5 * R, -0.25 * R, 0.25 * R]
    for e in extra:
        if all(abs(e - x) > 10 * sf.tol for x in xs):
            cuts.append(e)
    cuts = sorted(set(cuts))
    sets = []
    for i, j in itertools.combinations(range(len(cuts)), 2):
        lo_c, hi_c = bool(rng.integers(2)), bool(rng.integers(2))
        sets.append(BorelSet.interval(cuts[i], cuts[j], lo_c, hi_c))
    rng.shuffle(sets)
    chosen = sets[: max(minimum, 10)]
    for a, b in zip(chosen[::2], chosen[1::2]):
        if a.disjoint(b):
            chosen.append(a.union(b))
    if len(cuts) >= 3:
        chosen.append(BorelSet.interval(cuts[0], cuts[1]).union(BorelSet.interval(cuts[-2], cuts[-1])))
    chosen.append(BorelSet.empty())
    chosen.append(BorelSet.interval(-R, R))
    out = []
    for s in chosen:
        if s not in out:
            out.append(s)
    while len(out) < minimum:
        lo, hi = sorted(rng.uniform(-R, R, 2))
        s = BorelSet.interval(lo, hi)
        try:
            sf.check_admissible(s)
        except AdmissibilityError:
            continue
        if all(abs(lo - x) > 10 * sf.tol and abs(hi - x) > 10 * sf.tol for x in xs) and s not in out:
            out.append(s)
    return out


def gap_cover(sf: SpectralFunction):
    """Disjoint admissible cover of [-R, R] cut halfway between neighbouring real points."""
    xs = sorted({p.value.real for p in sf.real_points})
    edges = [-sf.R] + [0.5 * (a + b) for a, b in zip(xs, xs[1:])] + [sf.R]
    last = len(edges) - 2
    return [BorelSet.interval(a, b, True, k == last) for k, (a, b) in enumerate(zip(edges, edges[1:]))]
