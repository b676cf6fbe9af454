import numpy as np
import pytest
from hypothesis import given

from kreinpair.classify import classify_spectrum
from kreinpair.definitize import (
    RealPolynomial,
    build_certificate,
    critical_points,
    definitizing_witness,
    find_definitizing_polynomial,
    is_definitizing,
    swap_polynomial,
    theorem_main_report,
    zero_invertibility_report,
)
from kreinpair.errors import DefinitizingPolynomialNotFound, PreconditionError, ZeroPolynomialError
from kreinpair.krein import OperatorPair, build_g0
from conftest import cmat, hermitian_pairs, seeds

DIAG = OperatorPair(np.diag([2.0, 3.0]), np.diag([1.0, -1.0]))
SWAP = OperatorPair([[0.0, 1.0], [1.0, 0.0]], np.diag([1.0, -1.0]))
NIL = OperatorPair([[1.0, 1.0], [1.0, 1.0]], np.diag([1.0, -1.0]))
IDENT = OperatorPair(np.eye(2), np.eye(2))
LAM = RealPolynomial([0.0, 1.0])


def test_witness_examples(frozen):
    w = frozen["definitizing_witness"]
    assert is_definitizing(DIAG, LAM) == (True, pytest.approx(w["diag_lambda"]))
    ok, wit = is_definitizing(DIAG, -LAM)
    assert not ok and wit == pytest.approx(w["diag_minus_lambda"])
    ok, wit = is_definitizing(SWAP, RealPolynomial([1.0, 0.0, 1.0]))
    assert ok and abs(wit - w["swap_lambda2p1"]) < 1e-12
    swapped = OperatorPair(np.diag([1.0, -1.0]), np.diag([2.0, 3.0]))
    ok, wit = is_definitizing(swapped, RealPolynomial([0.0, 0.0, 1.0]))
    assert ok and wit == pytest.approx(w["swapped_diag_lambda2"])
    with pytest.raises(ZeroPolynomialError):
        definitizing_witness(DIAG, RealPolynomial([0.0]))


def test_search_examples():
    assert str(find_definitizing_polynomial(DIAG).polynomial) == "λ"
    assert str(find_definitizing_polynomial(IDENT).polynomial) == "1"
    assert find_definitizing_polynomial(NIL).polynomial.degree == 1
    rot = find_definitizing_polynomial(SWAP).polynomial
    assert np.allclose(rot.coeffs, [1.0, 0.0, 1.0])
    with pytest.raises(DefinitizingPolynomialNotFound):
        find_definitizing_polynomial(SWAP, degree_cap=1)
    with pytest.raises(PreconditionError):
        find_definitizing_polynomial(DIAG, degree_cap=0)


def test_critical_points_examples():
    assert critical_points(DIAG, build_g0(DIAG), LAM) == []
    assert critical_points(NIL, build_g0(NIL), LAM) == [pytest.approx(0.0, abs=1e-6)]
    with pytest.raises(PreconditionError):
        critical_points(DIAG, build_g0(DIAG), -LAM)


def test_certificate_identity(frozen):
    ks = build_g0(IDENT, 2j)
    cert = build_certificate(IDENT, ks, RealPolynomial([1.0]))
    assert np.allclose(cert.A0, cmat(frozen["certificate_identity"]["A0"]), atol=1e-14)
    assert np.allclose(cert.A0 @ ks.G0, complex(*frozen["certificate_identity"]["r1_at_1"]) * np.eye(2))
    assert cert.report().passed


def test_certificate_rotation_has_zero_a0():
    ks = build_g0(SWAP, 2j)
    cert = build_certificate(SWAP, ks, RealPolynomial([1.0, 0.0, 1.0]))
    assert np.linalg.norm(cert.A0) < 1e-12
    assert cert.report().passed


def test_theorem_main_examples():
    for pair, p in ((DIAG, LAM), (SWAP, RealPolynomial([1.0, 0.0, 1.0])), (IDENT, RealPolynomial([1.0]))):
        assert theorem_main_report(pair, build_g0(pair), p).passed


def test_swap_polynomial_examples():
    assert np.allclose(swap_polynomial(LAM).coeffs, [0.0, 0.0, 1.0])
    assert np.allclose(swap_polynomial(RealPolynomial([1.0, 0.0, 1.0])).coeffs, [0.0, 1.0, 0.0, 1.0])
    swapped = OperatorPair(DIAG.G, DIAG.A)
    assert is_definitizing(swapped, swap_polynomial(LAM))[0]
    with pytest.raises(ZeroPolynomialError):
        swap_polynomial(RealPolynomial([0.0]))


def test_zero_invertibility_examples():
    assert zero_invertibility_report(DIAG).passed
    assert zero_invertibility_report(NIL).passed
    singular = OperatorPair(np.eye(2), np.diag([1.0, 0.0]))
    rep = zero_invertibility_report(singular)
    assert rep.passed and not rep.data["A_and_G_invertible"]


@given(pair=hermitian_pairs(nmax=6))
def test_found_polynomial_satisfies_main_theorem(pair):
    p = OperatorPair(*pair)
    ks = build_g0(p)
    cls = classify_spectrum(p, ks)
    res = find_definitizing_polynomial(p, ks=ks, classification=cls)
    assert is_definitizing(p, res.polynomial)[0]
    assert theorem_main_report(p, ks, res.polynomial, classification=cls).passed
    assert build_certificate(p, ks, res.polynomial).report().passed


@given(pair=hermitian_pairs(nmax=6))
def test_swapped_pair_definitized_by_shifted_polynomial(pair):
    p = OperatorPair(*pair)
    res = find_definitizing_polynomial(p)
    assert is_definitizing(OperatorPair(p.G, p.A), swap_polynomial(res.polynomial))[0]


@given(pair=hermitian_pairs(nmax=6), seed=seeds)
def test_certificate_verdicts_independent_of_lambda0(pair, seed):
    p = OperatorPair(*pair)
    poly = find_definitizing_polynomial(p).polynomial
    rng = np.random.default_rng(seed)
    r = 1 + p.spectral_radius
    verdicts = []
    for _ in range(2):
        lam = complex(r * rng.uniform(-1, 1), r * rng.uniform(1.5, 3))
        verdicts.append(build_certificate(p, build_g0(p, lam), poly).report().passed)
    assert verdicts == [True, True]
