import numpy as np
import pytest
from hypothesis import given

from kreinpair.errors import NotIsolatedError, PreconditionError
from kreinpair.krein import OperatorPair, build_g0
from kreinpair.riesz import ContourProjector, pair_space_krein_check, pole_order, riesz_projection
from conftest import cmat, hermitian_pairs, seeds

ROT = np.array([[0.0, -1.0], [1.0, 0.0]])
NIL_T = np.array([[1.0, -1.0], [1.0, -1.0]])


def test_projection_examples(frozen):
    P = riesz_projection(np.diag([2.0, -3.0]), 2.0)
    assert np.allclose(P.P, np.diag([1.0, 0.0]), atol=1e-12)
    assert P.rank == 1
    R = riesz_projection(ROT, 1j)
    assert np.allclose(R.P, cmat(frozen["riesz_rotation_i"]), atol=1e-12)
    both = riesz_projection(ROT, [1j, -1j])
    assert np.allclose(both.P, np.eye(2), atol=1e-12)
    assert np.allclose(riesz_projection(NIL_T, 0.0).P, np.eye(2), atol=1e-10)


def test_projection_rejects_non_spectral_target():
    with pytest.raises((NotIsolatedError, PreconditionError, ValueError)):
        riesz_projection(np.diag([2.0, -3.0]), 0.5)


def test_pole_orders(frozen):
    want = frozen["pole_order"]
    assert pole_order(NIL_T, 0.0) == want["nilpotent"]
    assert pole_order(np.diag([2.0, -3.0]), 2.0) == want["diag"]
    assert pole_order(ROT, 1j) == want["rotation"]
    jordan = np.array([[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]])
    assert pole_order(jordan, 1.0) == 3


def test_pair_space_check_on_rotation():
    pair = OperatorPair([[0.0, 1.0], [1.0, 0.0]], np.diag([1.0, -1.0]))
    ks = build_g0(pair, 2j)
    rep = pair_space_krein_check(ks, pair.AG, 1j)
    assert rep.passed
    assert rep.data["pole_orders"] == [1, 1]
    with pytest.raises(PreconditionError):
        diag = OperatorPair(np.diag([2.0, 3.0]), np.diag([1.0, -1.0]))
        pair_space_krein_check(build_g0(diag), diag.AG, 2.0)


@given(pair=hermitian_pairs())
def test_point_projections_complete_and_orthogonal(pair):
    p = OperatorPair(*pair)
    proj = ContourProjector(p.AG)
    Ps = [proj.point_projection(pt) for pt in proj.points]
    total = sum(P.P for P in Ps)
    assert np.linalg.norm(total - np.eye(p.n)) <= 1e-7 * max(1.0, max(P.norm for P in Ps))
    assert sum(P.rank for P in Ps) == p.n
    for i in range(len(Ps)):
        assert Ps[i].check().passed
        for j in range(i + 1, len(Ps)):
            cross = np.linalg.norm(Ps[i].P @ Ps[j].P)
            assert cross <= 1e-7 * (1 + Ps[i].norm * Ps[j].norm)


@given(pair=hermitian_pairs(), seed=seeds)
def test_projection_commutes_with_operator(pair, seed):
    p = OperatorPair(*pair)
    proj = ContourProjector(p.AG, seed=seed % 1000)
    rng = np.random.default_rng(seed)
    pts = [pt for pt in proj.points if rng.random() < 0.5] or [proj.points[0]]
    P = proj.project(pts)
    scale = np.linalg.norm(p.AG) * (1 + P.norm)
    assert P.commutation_residual <= 1e-8 * scale


@given(pair=hermitian_pairs())
def test_pair_space_nonreal_points(pair):
    p = OperatorPair(*pair)
    ks = build_g0(p)
    proj = p.projector
    upper = [pt for pt in proj.points if pt.value.imag > 1e-3 * p.scale]
    if upper:
        rep = pair_space_krein_check(ks, p.AG, upper[0].value, projector=proj)
        assert rep.passed


def test_quadrature_converges_geometrically():
    T = np.diag([1.0, 1.5, -2.0]) + np.triu(np.ones((3, 3)), 1) * 0.3
    proj = ContourProjector(T)
    hist = proj.quadrature_history([proj.match(1.0)], start=8, stop=128)
    deltas = [d for _, d in hist]
    assert deltas[-1] < 1e-12
    assert deltas[1] < deltas[0] / 10
