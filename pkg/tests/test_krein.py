import numpy as np
import pytest
from hypothesis import given

from kreinpair import krein
from kreinpair.errors import NonHermitianError, NotIsolatedError, PreconditionError, RankDeficientError
from kreinpair.krein import (
    DEGENERATE,
    KREIN,
    NEGATIVE,
    POSITIVE,
    KreinStructure,
    OperatorPair,
    build_g0,
    choose_lambda0,
    gram_matrix,
    indefinite_inner,
    ortho_companion,
    ortho_complement_check,
    subspace_verdict,
)
from conftest import cmat, hermitian_pairs, seeds

DIAG = (np.diag([2.0, 3.0]), np.diag([1.0, -1.0]))
SWAP = ([[0.0, 1.0], [1.0, 0.0]], np.diag([1.0, -1.0]))
NIL = ([[1.0, 1.0], [1.0, 1.0]], np.diag([1.0, -1.0]))


def test_lambda0_rule(frozen):
    want = frozen["lambda0"]
    assert choose_lambda0(OperatorPair(*DIAG)) == pytest.approx(complex(*want["diag"]))
    assert choose_lambda0(OperatorPair(np.eye(2), np.eye(2))) == pytest.approx(complex(*want["identity"]))
    # the nilpotent product has a defective zero, so its computed radius is rounding-sized
    assert choose_lambda0(OperatorPair(*NIL)) == pytest.approx(complex(*want["nilpotent"]), abs=1e-6)


@pytest.mark.parametrize(
    "pair,lam,key",
    [(DIAG, 1j, "diag_i"), ((np.eye(2), np.eye(2)), 2j, "identity_2i"), (SWAP, 2j, "swap_2i")],
)
def test_build_g0_examples(frozen, pair, lam, key):
    ks = build_g0(OperatorPair(*pair), lam)
    assert np.allclose(ks.G0, cmat(frozen["g0"][key]), atol=1e-14)


def test_build_g0_rejects_real_or_spectral_lambda0():
    pair = OperatorPair(*DIAG)
    with pytest.raises(PreconditionError):
        build_g0(pair, 1.0)
    with pytest.raises(NotIsolatedError):
        build_g0(OperatorPair(*SWAP), 1j)


def test_pair_rejects_nonhermitian():
    with pytest.raises(NonHermitianError):
        OperatorPair([[1, 2], [0, 1]], np.eye(2))
    with pytest.raises(ValueError):
        OperatorPair(np.eye(2), np.eye(3))


def test_indefinite_inner_examples():
    ks = KreinStructure.from_gram(np.diag([0.2, -0.1]))
    e1, e2 = np.eye(2)
    assert indefinite_inner(ks, e1, e1) == pytest.approx(0.2)
    assert indefinite_inner(ks, e2, e2) == pytest.approx(-0.1)
    assert indefinite_inner(ks, e1, e2) == 0
    half = KreinStructure.from_gram(np.eye(3) / 2)
    x = np.array([1, 2j, -1])
    assert indefinite_inner(half, x, x) == pytest.approx(np.vdot(x, x) / 2)


def test_gram_examples(frozen):
    ks = build_g0(OperatorPair(*DIAG), 1j)
    assert np.allclose(gram_matrix(ks, np.eye(2)), ks.G0)
    assert gram_matrix(ks, [[1], [0]])[0, 0] == pytest.approx(frozen["gram_diag"]["e1"][0])
    v = np.array([[1], [1]]) / np.sqrt(2)
    assert gram_matrix(ks, v)[0, 0] == pytest.approx(frozen["gram_diag"]["mixed"][0])
    with pytest.raises(RankDeficientError):
        gram_matrix(ks, [[1, 2], [1, 2]])


def test_subspace_verdict_examples():
    ks = KreinStructure.from_gram(np.diag([0.2, -0.1]))
    v = subspace_verdict(ks, [[1], [0]])
    assert v.kind == POSITIVE and v.delta == pytest.approx(0.2)
    assert subspace_verdict(ks, [[0], [1]]).kind == NEGATIVE
    assert subspace_verdict(ks, np.eye(2)).kind == KREIN
    deg = KreinStructure.from_gram(np.diag([1.0, 0.0]))
    assert subspace_verdict(deg, [[0], [1]]).kind == DEGENERATE


def test_ortho_companion_examples():
    ks = KreinStructure.from_gram(np.diag([0.2, -0.1]))
    C = ortho_companion(ks, [[1], [0]])
    assert C.shape == (2, 1) and abs(C[0, 0]) < 1e-14
    deg = KreinStructure.from_gram(np.diag([1.0, 0.0]))
    assert ortho_companion(deg, [[0], [1]]).shape == (2, 2)
    assert ortho_companion(ks, np.eye(2)).shape == (2, 0)


@given(pair=hermitian_pairs())
def test_g0_residuals_within_limits(pair):
    p = OperatorPair(*pair)
    ks = build_g0(p)
    g0n = np.linalg.norm(ks.G0)
    assert ks.build_residuals["hermiticity"] <= 1e-10 * g0n
    assert ks.build_residuals["symmetry"] <= 1e-9 * g0n * max(np.linalg.norm(p.AG), 1)
    assert krein.g0_report(ks).passed


@given(pair=hermitian_pairs(), seed=seeds)
def test_nondegenerate_subspaces_are_complemented(pair, seed):
    ks = build_g0(OperatorPair(*pair))
    rng = np.random.default_rng(seed)
    n = ks.n
    k = int(rng.integers(1, n + 1))
    V, _ = np.linalg.qr(rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k)))
    verdict = subspace_verdict(ks, V)
    if verdict.kind != DEGENERATE:
        res = ortho_complement_check(ks, V)
        assert res["complemented"]
        assert res["dim"] + res["companion_dim"] == n


@given(pair=hermitian_pairs())
def test_invariant_zero_free_subspaces_are_krein(pair):
    p = OperatorPair(*pair)
    ks = build_g0(p)
    pts = [q for q in p.points if abs(q.value) > 1e-6]
    if not pts:
        return
    V = p.projector.project(pts).range_basis
    rep = krein.krein_subspace_check(ks, p.AG, V)
    if all(c.passed for c in rep.checks[:3]):
        assert rep.data["verdict"]["kind"] != DEGENERATE


@given(pair=hermitian_pairs(), seed=seeds)
def test_inner_product_sesquilinear_and_hermitian(pair, seed):
    ks = build_g0(OperatorPair(*pair))
    rng = np.random.default_rng(seed)
    n = ks.n
    x, y, z = (rng.standard_normal(n) + 1j * rng.standard_normal(n) for _ in range(3))
    a, b = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
    scale = np.linalg.norm(ks.G0) * 10
    lhs = indefinite_inner(ks, a * x + b * z, y)
    assert abs(lhs - (a * indefinite_inner(ks, x, y) + b * indefinite_inner(ks, z, y))) <= 1e-12 * scale * 100
    assert abs(indefinite_inner(ks, x, y) - np.conj(indefinite_inner(ks, y, x))) <= 1e-12 * scale * 100
