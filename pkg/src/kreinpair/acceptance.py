"""Randomized acceptance suites, shared by the test suite and the `selftest` subcommand."""

import time
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .classify import (
    CRITICAL,
    NEGATIVE_TYPE,
    NON_REAL,
    POSITIVE_TYPE,
    classify_spectrum,
    nonneg_triple_classification,
    pair_consistency_report,
)
from .definitize import (
    RealPolynomial,
    build_certificate,
    critical_points,
    find_definitizing_polynomial,
    independence_witness,
    theorem_main_report,
)
from .errors import KreinPairError
from .krein import OperatorPair, build_g0
from .riesz import ContourProjector, pair_space_krein_check, pole_order
from .spectral_function import (
    AXIOM_TOL,
    BorelSet,
    build_spectral_function,
    definite_interval_projection,
    gap_cover,
    generate_sets,
    partition_check,
    verify_axioms,
)
from .sturm_liouville import SLProblem, discretize, sl_analysis

SINGULAR_FRACTION = 0.1
QUAD_NOISE_FLOOR = 1e-13


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    cases: int
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        worst = ", ".join(f"{k}={_fmt(v)}" for k, v in self.stats.items())
        worst = f", {worst}" if worst else ""
        return f"[{tag}] criterion {self.number:2d} {self.title}: {self.cases} cases{worst} ({self.seconds:.1f}s)"

    def to_dict(self):
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "cases": self.cases,
            "failures": self.failures[:10],
            "stats": {k: v for k, v in self.stats.items() if not k.endswith("_seconds")},
        }


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.2e}"
    return str(v)


def random_hermitian(rng, n) -> np.ndarray:
    X = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2 * n)
    return X + X.conj().T


def random_singular_hermitian(rng, n) -> np.ndarray:
    """Hermitian with a kernel of dimension at least one."""
    k = int(rng.integers(1, n)) if n > 1 else 1
    X = (rng.standard_normal((n, n - k)) + 1j * rng.standard_normal((n, n - k))) / np.sqrt(2 * n)
    d = rng.standard_normal(n - k)
    return (X * d) @ X.conj().T


def random_pair(rng, n, singular=False) -> OperatorPair:
    A = random_hermitian(rng, n)
    G = random_singular_hermitian(rng, n) if singular else random_hermitian(rng, n)
    return OperatorPair(A, G)


def corpus(rng, count, nmax=10, singular_fraction=0.0):
    out = []
    n_sing = int(round(singular_fraction * count))
    for k in range(count):
        n = int(rng.integers(2, nmax + 1))
        out.append(random_pair(rng, n, singular=k < n_sing))
    return out


class _Tracker:
    def __init__(self):
        self.stats = {}
        self.failures = []
        self.cases = 0

    def worst(self, key, value):
        self.stats[key] = max(self.stats.get(key, 0.0), float(value))

    def count(self, key, k=1):
        self.stats[key] = self.stats.get(key, 0) + k

    def fail(self, msg):
        self.failures.append(msg)


def _run(number, title, body, *args):
    t0 = time.perf_counter()
    tr = _Tracker()
    try:
        body(tr, *args)
    except KreinPairError as exc:
        tr.fail(f"{type(exc).__name__}: {exc}")
    res = CriterionResult(number, title, not tr.failures, tr.cases, tr.failures, tr.stats)
    res.seconds = time.perf_counter() - t0
    return res


def structural_identities(tr, pairs):
    for i, pair in enumerate(pairs):
        tr.cases += 1
        rep = pair_consistency_report(pair)
        for c in rep.checks:
            tr.worst(c.name, c.value / max(c.limit, 1e-300))
            if not c.passed:
                tr.fail(f"pair {i}: {c.name} = {c.value:.3e} > {c.limit:.3e}")
    tr.stats = {f"{k}/limit": v for k, v in tr.stats.items()}


def conjugation_symmetry(tr, pairs):
    for i, pair in enumerate(pairs):
        tr.cases += 1
        tol = pair.cluster_tol
        pts = pair.points
        vals = np.array([p.value for p in pts])
        worst = 0.0
        for p in pts:
            d = float(np.min(np.abs(vals - np.conj(p.value)))) - p.cluster_radius
            worst = max(worst, d)
        tr.worst("conjugate_gap/tol", worst / tol)
        if worst > tol:
            tr.fail(f"pair {i}: conjugate of a spectral point missing by {worst:.3e}")


def definitizability_search(tr, pairs, ctx):
    for i, pair in enumerate(pairs):
        tr.cases += 1
        ks = build_g0(pair)
        cls = classify_spectrum(pair, ks)
        res = find_definitizing_polynomial(pair, degree_cap=2 * pair.n, ks=ks, classification=cls)
        ctx.append((pair, ks, cls, res))
        if res.fallback:
            tr.count("fallbacks")
        tr.worst("max_degree", res.polynomial.degree)
        rel = -res.witness / pair.scale
        tr.worst("neg_witness/scale", max(rel, 0.0))
        if res.witness < -1e-10 * pair.scale:
            tr.fail(f"pair {i}: witness {res.witness:.3e} below -1e-10 scale")
        ind, ind_tol = independence_witness(ks, res.polynomial)
        if not ind >= -ind_tol:
            tr.fail(f"pair {i}: G0 cross-witness {ind:.3e} disagrees (tol {ind_tol:.3e})")


def theorem_main(tr, ctx):
    for i, (pair, ks, cls, res) in enumerate(ctx):
        tr.cases += 1
        p = res.polynomial
        cert = build_certificate(pair, ks, p)
        for c in cert.report().checks:
            if not c.passed:
                tr.fail(f"pair {i}: certificate {c.name} = {c.value:.3e} vs {c.limit:.3e}")
        rep = theorem_main_report(pair, ks, p, cls)
        for c in rep.checks:
            tr.count(c.name, int(c.value))
            if not c.passed:
                tr.fail(f"pair {i}: {c.name} {c.detail}")
        critical_points(pair, ks, p, cls)
        tr.count("nonreal_points", sum(pc.verdict == NON_REAL for pc in cls.points))


def lambda0_independence(tr, pairs, rng):
    for i, pair in enumerate(pairs):
        tr.cases += 1
        r = 1.0 + pair.spectral_radius
        lams = [complex(r * rng.uniform(-1, 1), r * rng.uniform(1, 3) * rng.choice([-1, 1])) for _ in range(2)]
        a = classify_spectrum(pair, build_g0(pair, lams[0])).verdicts()
        b = classify_spectrum(pair, build_g0(pair, lams[1])).verdicts()
        if a != b:
            tr.fail(f"pair {i}: verdicts {a} vs {b} under lambda0 {lams}")


def well_separated_matrix(rng, n):
    """T = V diag(l) V^-1 with real eigenvalues and conjugate pairs spaced three apart."""
    vals = []
    k = 0
    while len(vals) < n:
        if len(vals) + 2 <= n and rng.random() < 0.3:
            vals += [complex(k, 1.0), complex(k, -1.0)]
        else:
            vals.append(complex(k, 0.0))
        k += 3
    V = np.eye(n) + 0.3 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(n)
    return V @ np.diag(vals) @ np.linalg.inv(V)


def riesz_machinery(tr, pairs, rng):
    for i, pair in enumerate(pairs):
        tr.cases += 1
        proj = pair.projector
        Ps = [proj.point_projection(p) for p in proj.points]
        total = np.zeros((pair.n, pair.n), dtype=complex)
        for E in Ps:
            tr.worst("idempotency", E.idempotency_residual)
            if E.idempotency_residual > 1e-8:
                tr.fail(f"pair {i}: idempotency {E.idempotency_residual:.3e}")
            total += E.P
        for a in range(len(Ps)):
            for b in range(len(Ps)):
                if a != b:
                    r = linalg.norm(Ps[a].P @ Ps[b].P)
                    tr.worst("cross_products", r)
                    if r > 1e-8:
                        tr.fail(f"pair {i}: product of projections {a},{b} = {r:.3e}")
        r = linalg.norm(total - np.eye(pair.n))
        tr.worst("sum_minus_identity", r)
        if r > 1e-8:
            tr.fail(f"pair {i}: projections sum to I within {r:.3e}")
        ks = build_g0(pair)
        for p in proj.points:
            if p.value.imag > proj.cluster_tol:
                rep = pair_space_krein_check(ks, pair.AG, p, projector=proj)
                tr.count("conjugate_pairs")
                lemma = rep.checks[0]
                tr.worst("adjoint_symmetry/g0", lemma.value / max(ks.g0_norm, 1e-300))
                for c in rep.checks:
                    if c.name != "pair_space_is_krein" and not c.passed:
                        tr.fail(f"pair {i}: {c.name} {c.detail or c.value}")
    for j in range(10):
        n = int(rng.integers(3, 9))
        T = well_separated_matrix(rng, n)
        cp = ContourProjector(T)
        for p in cp.points:
            tr.cases += 1
            hist = cp.quadrature_history([p], start=32, stop=512)
            for (_, d0), (N, d1) in zip(hist, hist[1:]):
                if d0 <= QUAD_NOISE_FLOOR:
                    break
                factor = d0 / max(d1, 1e-300)
                tr.stats["min_doubling_gain"] = min(tr.stats.get("min_doubling_gain", np.inf), factor)
                if factor < 10:
                    tr.fail(f"matrix {j}: delta shrank only {factor:.2f}x at {N} nodes")


def spectral_axioms(tr, pairs, rng):
    for i, pair in enumerate(pairs):
        tr.cases += 1
        sf = build_spectral_function(pair, seed=i)
        sets = generate_sets(sf, rng=rng)
        tr.stats["min_family_size"] = min(tr.stats.get("min_family_size", 1 << 30), len(sets))
        rep = verify_axioms(sf, sets, seed=i)
        for c in rep.checks:
            tr.worst(c.name, c.value)
            if not c.passed:
                tr.fail(f"pair {i}: {c.name} = {c.value:.3e} > {c.limit:.3e}")
        if sf.critical_set:
            tr.count("with_critical_points")
        cover = gap_cover(sf)
        r = partition_check(sf, cover)
        tr.worst("partition", r)
        if r > AXIOM_TOL:
            tr.fail(f"pair {i}: partition residual {r:.3e}")
    if tr.stats.get("min_family_size", 12) < 12:
        tr.fail(f"generated family smaller than 12 sets: {tr.stats['min_family_size']}")


def definite_intervals(tr, pairs):
    for i, pair in enumerate(pairs):
        sf = build_spectral_function(pair, seed=i)
        g0n = max(sf.ks.g0_norm, 1e-300)
        xs = sorted(sf.real_points, key=lambda p: p.value.real)
        edges = [-sf.R] + [0.5 * (a.value.real + b.value.real) for a, b in zip(xs, xs[1:])] + [sf.R]
        runs = []
        for k, p in enumerate(xs):
            kind = sf.classification.verdict_at(p.value, sf.tol)
            if kind == CRITICAL:
                runs.append(None)
                continue
            if runs and runs[-1] is not None and runs[-1][0] == kind:
                runs[-1][2] = edges[k + 1]
            else:
                runs.append([kind, edges[k], edges[k + 1]])
        for run in runs:
            if run is None:
                continue
            kind, lo, hi = run
            tr.cases += 1
            res = definite_interval_projection(sf, BorelSet.interval(lo, hi), kind)
            tr.worst("g0_symmetry", res.symmetry_residual)
            if res.verdict is not None:
                tr.stats["min_delta/g0"] = min(tr.stats.get("min_delta/g0", np.inf), res.verdict.delta / g0n)
            if not res.matches_expected:
                tr.fail(f"pair {i}: [{lo:.4g},{hi:.4g}] {kind} gave {res.verdict}")
            if not res.maximal:
                tr.fail(f"pair {i}: [{lo:.4g},{hi:.4g}] range differs from the oracle range")
            if res.symmetry_residual > AXIOM_TOL:
                tr.fail(f"pair {i}: G0 symmetry {res.symmetry_residual:.3e}")


def nonneg_triples(tr, rng, count):
    for i in range(count):
        tr.cases += 1
        n = int(rng.integers(2, 11))
        k = int(rng.integers(1, n + 1))
        B = (rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))) / np.sqrt(2 * n)
        A0 = B @ B.conj().T
        G0 = random_hermitian(rng, n)
        rep = nonneg_triple_classification(A0, G0)
        scale = max(linalg.norm(A0) * linalg.norm(G0), 1.0)
        for c in rep.checks:
            if c.name == "imag_spectrum":
                tr.worst("imag/scale", c.value / scale)
            if c.name == "invariant_subspace":
                tr.count("subspaces_verified")
            if not c.passed:
                tr.fail(f"instance {i}: {c.name} = {c.value:.3e}")
        T = A0 @ G0
        scalar = linalg.norm(T - np.trace(T) / n * np.eye(n)) <= 1e-12 * max(linalg.norm(T), 1.0)
        if not scalar and "invariant_subspace_dim" not in rep.data:
            tr.fail(f"instance {i}: no invariant subspace emitted for a non-scalar product")


def sturm_liouville(tr):
    tr.cases += 1
    small = sl_analysis(SLProblem((0.0, 1.0), 3))
    got = np.sort(small.pair.eigenvalues.real)
    want = np.array([32 - 16 * np.sqrt(2), 32.0, 32 + 16 * np.sqrt(2)])
    rel = float(np.max(np.abs(got - want) / want))
    tr.worst("n3_rel_error", rel)
    if rel > 1e-8:
        tr.fail(f"n=3 spectrum {got} vs {want}")
    if not small.report.passed:
        tr.fail(f"n=3 report: {[c.name for c in small.report.failures()]}")
    tr.cases += 1
    t0 = time.perf_counter()
    big = sl_analysis(SLProblem((0.0, 1.0), 199, w=[1.0, 0.5]))
    pair = big.pair
    imag = float(np.abs(pair.eigenvalues.imag).max())
    tr.worst("imag/scale", imag / pair.scale)
    if imag > 1e-8 * pair.scale:
        tr.fail(f"n=199 spectrum not real: {imag:.3e}")
    kinds = set(big.classification.verdicts())
    if kinds != {POSITIVE_TYPE}:
        tr.fail(f"n=199 verdicts {sorted(kinds)}")
    sf = big.spectral_function
    if sf.critical_set:
        tr.fail(f"n=199 critical set {sf.critical_set} not empty")
    rep = verify_axioms(sf, generate_sets(sf))
    for c in rep.checks:
        tr.worst(c.name, c.value)
        if not c.passed:
            tr.fail(f"n=199 axiom {c.name} = {c.value:.3e}")
    for c in big.report.checks:
        if not c.passed:
            tr.fail(f"n=199 report {c.name}")
    elapsed = time.perf_counter() - t0
    tr.stats["n199_seconds"] = round(elapsed, 2)
    if elapsed > 10.0:
        tr.fail(f"n=199 run took {elapsed:.1f}s")
    tr.cases += 1
    lam1 = float(np.min(discretize(SLProblem((0.0, 1.0), 199)).eigenvalues.real))
    err = abs(lam1 - np.pi**2) / np.pi**2
    tr.worst("lambda1_rel_error", err)
    if err > 0.02:
        tr.fail(f"lambda1 = {lam1:.6g} off pi^2 by {err:.2%}")


def hand_fixtures(tr):
    tr.cases += 1
    pair = OperatorPair([[1, 1], [1, 1]], np.diag([1.0, -1.0]))
    ks = build_g0(pair)
    cls = classify_spectrum(pair, ks)
    res = find_definitizing_polynomial(pair, ks=ks, classification=cls)
    crit = critical_points(pair, ks, res.polynomial, cls)
    if len(crit) != 1 or abs(crit[0]) > pair.cluster_tol:
        tr.fail(f"nilpotent pair critical set {crit}")
    nu = pole_order(pair.AG, 0.0, projector=pair.projector)
    if nu != 2:
        tr.fail(f"nilpotent pair pole order {nu}")
    if res.polynomial != RealPolynomial([0.0, 1.0]):
        tr.fail(f"nilpotent pair polynomial {res.polynomial}")
    tr.stats["nilpotent_p"] = str(res.polynomial)
    tr.cases += 1
    pair = OperatorPair([[0, 1], [1, 0]], np.diag([1.0, -1.0]))
    ks = build_g0(pair)
    cls = classify_spectrum(pair, ks)
    vals = sorted((pc.value for pc in cls.points), key=lambda z: z.imag)
    if len(vals) != 2 or max(abs(vals[0] + 1j), abs(vals[1] - 1j)) > 1e-8:
        tr.fail(f"rotation spectrum {vals}")
    res = find_definitizing_polynomial(pair, ks=ks, classification=cls)
    if res.polynomial != RealPolynomial([1.0, 0.0, 1.0]):
        tr.fail(f"rotation polynomial {res.polynomial}")
    tr.stats["rotation_p"] = str(res.polynomial)
    cert = build_certificate(pair, ks, res.polynomial)
    a0 = linalg.norm(cert.A0)
    tr.worst("rotation_A0_norm", a0)
    if a0 > 1e-10 or not cert.report().passed:
        tr.fail(f"rotation certificate A0 norm {a0:.3e}")
    rep = pair_space_krein_check(ks, pair.AG, 1j, projector=pair.projector)
    if not rep.passed:
        tr.fail(f"rotation pair space check {[c.name for c in rep.failures()]}")


TITLES = {
    1: "structural identities",
    2: "conjugation symmetry",
    3: "definitizability search",
    4: "sign typing by the definitizing polynomial",
    5: "lambda0 independence",
    6: "Riesz machinery",
    7: "spectral function axioms",
    8: "definite-type intervals",
    9: "nonnegative triple products",
    10: "Sturm-Liouville discretization",
    11: "hand fixtures",
}


def run_criteria(seed=0, only=None, scale=1.0):
    """Run the criteria (all, or the numbers in `only`); `scale` shrinks the randomized corpora."""
    def rng_for(k):
        return np.random.default_rng([seed, k])

    def size(k):
        return max(2, int(round(k * scale)))

    wanted = set(only or TITLES)
    results = []
    base = corpus(rng_for(0), size(200), nmax=10, singular_fraction=SINGULAR_FRACTION)
    if 1 in wanted:
        results.append(_run(1, TITLES[1], structural_identities, base))
    if 2 in wanted:
        results.append(_run(2, TITLES[2], conjugation_symmetry, base))
    invertible = corpus(rng_for(1), size(200), nmax=10)
    ctx = []
    if wanted & {3, 4}:
        r3 = _run(3, TITLES[3], definitizability_search, invertible, ctx)
        if 3 in wanted:
            results.append(r3)
    if 4 in wanted:
        results.append(_run(4, TITLES[4], theorem_main, ctx))
    mid = corpus(rng_for(2), size(50), nmax=8, singular_fraction=0.2)
    if 5 in wanted:
        results.append(_run(5, TITLES[5], lambda0_independence, mid, rng_for(5)))
    if 6 in wanted:
        results.append(_run(6, TITLES[6], riesz_machinery, mid, rng_for(6)))
    if 7 in wanted:
        results.append(_run(7, TITLES[7], spectral_axioms, mid, rng_for(7)))
    if 8 in wanted:
        results.append(_run(8, TITLES[8], definite_intervals, mid))
    if 9 in wanted:
        results.append(_run(9, TITLES[9], nonneg_triples, rng_for(9), size(100)))
    if 10 in wanted:
        results.append(_run(10, TITLES[10], sturm_liouville))
    if 11 in wanted:
        results.append(_run(11, TITLES[11], hand_fixtures))
    return sorted(results, key=lambda r: r.number)
