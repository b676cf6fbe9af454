"""Command line front end: `analyze`, `sl`, `project` and `selftest`.

Exit codes: 0 when every check passes, 1 for unreadable or invalid input, 2 when a check fails.
"""

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, linalg
from .acceptance import run_criteria
from .classify import classify_spectrum, pair_consistency_report
from .definitize import (
    build_certificate,
    critical_points,
    find_definitizing_polynomial,
    independence_witness,
    theorem_main_report,
)
from .errors import (
    AdmissibilityError,
    ConfigurationError,
    DefinitizingPolynomialNotFound,
    KreinPairError,
    NonHermitianError,
    NotIsolatedError,
    PreconditionError,
    TheoremCheckError,
)
from .krein import OperatorPair, build_g0, g0_report
from .report import Check, Report, _jsonable
from .spectral_function import BorelSet, SpectralFunction, gap_cover, generate_sets, partition_check, verify_axioms
from .sturm_liouville import SLProblem, sl_analysis

SCHEMA = 1
EXIT_PASS, EXIT_INPUT, EXIT_FAIL = 0, 1, 2


class InputError(Exception):
    """Bad input file or option; maps to exit code 1."""


def _read(path):
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"parse error in {path}: {exc}") from None
    return data, hashlib.sha256(raw).hexdigest()


def _matrix(obj, name, n):
    if isinstance(obj, dict):
        if "re" not in obj:
            raise InputError(f"{name} lacks the 're' part")
        re_part = obj["re"]
        im_part = obj.get("im")
    else:
        re_part, im_part = obj, None
    try:
        M = np.array(re_part, dtype=float)
        if im_part is not None:
            M = M + 1j * np.array(im_part, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{name} has non-numeric or ragged entries") from None
    if M.shape != (n, n):
        raise InputError(f"dimension mismatch: {name} has shape {M.shape}, expected ({n}, {n})")
    if not np.all(np.isfinite(M)):
        raise InputError(f"{name} has non-finite entries")
    return M


def load_pair(path, tol=linalg.HERMITIAN_TOL):
    data, digest = _read(path)
    if not isinstance(data, dict) or not {"A", "G"} <= set(data):
        raise InputError(f"{path}: expected an object with keys 'A' and 'G'")
    n = data.get("n")
    if n is None:
        n = len(data["A"]["re"] if isinstance(data["A"], dict) else data["A"])
    if not isinstance(n, int) or n < 1:
        raise InputError(f"{path}: 'n' must be a positive integer")
    A = _matrix(data["A"], "A", n)
    G = _matrix(data["G"], "G", n)
    try:
        pair = OperatorPair(A, G, tol=tol)
    except NonHermitianError as exc:
        raise InputError(f"non-Hermitian input: {exc}") from None
    return pair, digest


def write_pair(pair, path):
    Path(path).write_text(json.dumps(pair.to_dict(), indent=1) + "\n", encoding="utf-8")


def _parse_lambda0(text):
    if text is None:
        return None
    try:
        re_part, im_part = (float(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"--lambda0 expects 're,im', got {text!r}") from None
    if im_part == 0.0:
        raise InputError("--lambda0 must be non-real")
    return complex(re_part, im_part)


def _spectrum_rows(cls):
    rows = []
    for pc in cls.points:
        rows.append(
            {
                "value": pc.value,
                "multiplicity": pc.point.algebraic_multiplicity,
                "verdict": pc.verdict,
                "delta": pc.delta,
            }
        )
    return rows


def analyze_pair(pair, lambda0=None, degree_cap=None, seed=0):
    """Full pipeline on one pair; returns the JSON-ready report body and the overall check report."""
    summary = Report("analysis")
    body = {"n": pair.n}
    try:
        ks = build_g0(pair, lambda0)
    except NotIsolatedError as exc:
        raise InputError(f"lambda0 rejected: {exc}") from None
    body["lambda0"] = ks.lambda0
    summary.extend(g0_report(ks), "g0.")
    cons = pair_consistency_report(pair)
    summary.extend(cons, "pair.")
    cls = classify_spectrum(pair, ks, seed=seed)
    body["spectrum"] = _spectrum_rows(cls)
    body["sigma_plus"] = sorted(cls.sigma_plus)
    body["sigma_minus"] = sorted(cls.sigma_minus)
    summary.add(Check.flag("zero_classification_consistent", cls.zero_consistent))
    try:
        search = find_definitizing_polynomial(pair, degree_cap=degree_cap, ks=ks, classification=cls)
    except DefinitizingPolynomialNotFound as exc:
        summary.add(Check.flag("definitizing_polynomial_found", False, str(exc)))
        body["definitizing_polynomial"] = None
        return body, summary
    p = search.polynomial
    ind, ind_tol = independence_witness(ks, p)
    body["definitizing_polynomial"] = {
        "p": str(p),
        "coeffs": list(p.coeffs),
        "witness": search.witness,
        "independence_witness": ind,
        "candidates_tried": search.tried,
        "fallback": search.fallback,
    }
    summary.add(Check.flag("definitizing_polynomial_found", True, str(p)))
    summary.add(Check.at_least("independence_witness", ind, -ind_tol))
    try:
        crit = critical_points(pair, ks, p, cls)
    except TheoremCheckError as exc:
        summary.add(Check.flag("critical_points_are_roots", False, str(exc)))
        crit = list(cls.critical_candidates)
    body["critical_set"] = crit
    cert = build_certificate(pair, ks, p)
    summary.extend(cert.report(), "certificate.")
    body["certificate"] = cert.to_dict()
    thm = theorem_main_report(pair, ks, p, cls)
    summary.extend(thm, "theorem.")
    body["pole_orders"] = thm.data["pole_orders"]
    sf = SpectralFunction(pair, ks, crit, cls, seed=seed)
    axioms = verify_axioms(sf, generate_sets(sf, rng=np.random.default_rng(seed)), seed=seed)
    summary.extend(axioms, "axioms.")
    part = partition_check(sf, gap_cover(sf))
    summary.add(Check.at_most("axioms.partition", part, 1e-8))
    body["axioms"] = {c.name: c.value for c in axioms.checks}
    body["axioms"]["partition"] = part
    body["axiom_sets"] = axioms.data["sets"]
    return body, summary


def _finish(body, summary, args, command, digest=None):
    out = {"schema": SCHEMA, "command": command, "version": __version__, "seed": args.seed}
    if digest is not None:
        out["input_sha256"] = digest
    out.update(body)
    out["checks"] = [c.to_dict() for c in summary.checks]
    out["summary"] = "PASS" if summary.passed else "FAIL"
    text = json.dumps(_jsonable(out), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"{out['summary']}: wrote {args.out}")
    else:
        sys.stdout.write(text)
    if not summary.passed:
        for c in summary.failures():
            print(f"FAIL {c.name}: {c.value:.3e} vs {c.limit:.3e} {c.detail}", file=sys.stderr)
    return EXIT_PASS if summary.passed else EXIT_FAIL


def cmd_analyze(args):
    pair, digest = load_pair(args.pair, tol=args.tol)
    body, summary = analyze_pair(pair, _parse_lambda0(args.lambda0), args.degree_cap, args.seed)
    return _finish(body, summary, args, "analyze", digest)


def cmd_sl(args):
    cfg, digest = _read(args.config)
    if not isinstance(cfg, dict):
        raise InputError("SL config must be a JSON object")
    try:
        prob = SLProblem.from_config(cfg)
        sl = sl_analysis(prob, seed=args.seed)
    except ConfigurationError as exc:
        raise InputError(f"SL config: {exc}") from None
    except PreconditionError as exc:
        raise InputError(f"SL precondition: {exc}") from None
    body, summary = analyze_pair(sl.pair, _parse_lambda0(args.lambda0), args.degree_cap, args.seed)
    summary.extend(sl.report, "sl.")
    body["problem"] = prob.to_dict()
    body["sl"] = sl.report.data
    return _finish(body, summary, args, "sl", digest)


def cmd_project(args):
    pair, digest = load_pair(args.pair, tol=args.tol)
    try:
        delta = BorelSet.parse(args.set)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    try:
        ks = build_g0(pair, _parse_lambda0(args.lambda0))
    except NotIsolatedError as exc:
        raise InputError(f"lambda0 rejected: {exc}") from None
    cls = classify_spectrum(pair, ks, seed=args.seed)
    sf = SpectralFunction(pair, ks, cls.critical_candidates, cls, seed=args.seed)
    try:
        res = sf.projection(delta)
    except AdmissibilityError as exc:
        raise InputError(f"set {args.set} is not admissible: {exc}") from None
    summary = Report("project")
    summary.add(Check.at_most("oracle_residual", res.oracle_residual, 1e-8))
    summary.add(Check.at_most("g0_symmetry", res.symmetry_residual, 1e-8))
    body = res.to_dict()
    body["critical_set"] = sf.critical_set
    body["E"] = {"re": res.P.real, "im": res.P.imag}
    return _finish(body, summary, args, "project", digest)


def emit_fixtures(directory):
    """Write the hand fixtures and Sturm-Liouville configs used by the examples."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    pairs = {
        "diag_pair": OperatorPair(np.diag([2.0, 3.0]), np.diag([1.0, -1.0])),
        "identity_pair": OperatorPair(np.eye(2), np.eye(2)),
        "nilpotent_pair": OperatorPair([[1.0, 1.0], [1.0, 1.0]], np.diag([1.0, -1.0])),
        "rotation_pair": OperatorPair([[0.0, 1.0], [1.0, 0.0]], np.diag([1.0, -1.0])),
    }
    written = []
    for name, pair in pairs.items():
        path = d / f"{name}.json"
        write_pair(pair, path)
        written.append(path)
    configs = {
        "sl_n3": {"interval": [0, 1], "n": 3, "w": "1", "p": "1", "q": "0"},
        "sl_n199_weighted": {"interval": [0, 1], "n": 199, "w": "1+0.5*x", "p": "1", "q": "0"},
        "sl_indefinite": {"interval": [0, 1], "n": 20, "w": [1], "p": [1], "q": [-50]},
    }
    for name, cfg in configs.items():
        path = d / f"{name}.json"
        path.write_text(json.dumps(cfg, indent=1) + "\n", encoding="utf-8")
        written.append(path)
    return written


def cmd_selftest(args):
    if args.emit_fixtures:
        for path in emit_fixtures(args.emit_fixtures):
            print(f"wrote {path}", file=sys.stderr)
    only = None
    if args.only:
        try:
            only = [int(k) for k in args.only.split(",")]
        except ValueError:
            raise InputError(f"--only expects comma-separated criterion numbers, got {args.only!r}") from None
    results = run_criteria(seed=args.seed, only=only, scale=args.scale)
    summary = Report("selftest")
    for r in results:
        print(r.line(), file=sys.stderr)
        summary.add(Check.flag(f"criterion_{r.number}", r.passed, r.title))
    body = {"criteria": [r.to_dict() for r in results]}
    return _finish(body, summary, args, "selftest")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda0", default=None, help="non-real point 're,im' for the inner product")
    common.add_argument("--degree-cap", type=int, default=None, help="largest polynomial degree searched (2n)")
    common.add_argument("--tol", type=float, default=linalg.HERMITIAN_TOL, help="Hermiticity tolerance for inputs")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    ap = argparse.ArgumentParser(prog="kreinpair", description="Spectral analysis of products AG of Hermitian matrices.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", parents=[common], help="analyze a pair file")
    p.add_argument("pair")
    p.set_defaults(func=cmd_analyze)
    p = sub.add_parser("sl", parents=[common], help="discretize and analyze a Sturm-Liouville config")
    p.add_argument("config")
    p.set_defaults(func=cmd_sl)
    p = sub.add_parser("project", parents=[common], help="evaluate E(set) for a pair file")
    p.add_argument("pair")
    p.add_argument("--set", required=True, help='union of intervals, e.g. "[0,4]" or "(-1,2]u[3,5]"')
    p.set_defaults(func=cmd_project)
    p = sub.add_parser("selftest", parents=[common], help="run the randomized acceptance suites")
    p.add_argument("--emit-fixtures", default=None, metavar="DIR", help="also write fixture inputs to DIR")
    p.add_argument("--only", default=None, help="comma-separated criterion numbers")
    p.add_argument("--scale", type=float, default=1.0, help="corpus size multiplier")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.degree_cap is not None and args.degree_cap < 1:
        print("error: --degree-cap must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except KreinPairError as exc:
        print(f"check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
