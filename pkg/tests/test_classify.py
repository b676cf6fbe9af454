import numpy as np
import pytest
from hypothesis import given

from kreinpair.classify import (
    CRITICAL,
    NEGATIVE_TYPE,
    NON_REAL,
    POSITIVE_TYPE,
    classify_point,
    classify_spectrum,
    lambda0_invariance_check,
    nonneg_triple_classification,
    pair_consistency_report,
    resolvent_growth_check,
)
from kreinpair.errors import PreconditionError
from kreinpair.krein import OperatorPair, build_g0
from conftest import hermitian_pairs, seeds
from kreinpair.acceptance import random_hermitian

DIAG = OperatorPair(np.diag([2.0, 3.0]), np.diag([1.0, -1.0]))
SWAP = OperatorPair([[0.0, 1.0], [1.0, 0.0]], np.diag([1.0, -1.0]))
NIL = OperatorPair([[1.0, 1.0], [1.0, 1.0]], np.diag([1.0, -1.0]))
IDENT = OperatorPair(np.eye(2), np.eye(2))
SINGULAR = OperatorPair(np.eye(2), np.diag([1.0, 0.0]))


def test_pair_consistency_examples():
    for pair in (DIAG, SWAP, IDENT):
        rep = pair_consistency_report(pair)
        assert rep.passed
    assert np.allclose(SWAP.GA, [[0, 1], [-1, 0]])
    assert np.allclose(SWAP.AG.conj().T, SWAP.GA)
    assert pair_consistency_report(DIAG).checks[0].value == 0


def test_classify_point_examples(frozen):
    t = frozen["types"]
    ks = build_g0(DIAG, 1j)
    assert classify_point(DIAG, ks, 2.0).verdict == t["diag_2"]
    assert classify_point(DIAG, ks, -3.0).verdict == t["diag_m3"]
    assert classify_point(NIL, build_g0(NIL), 0.0).verdict == t["nilpotent_0"]
    assert classify_point(IDENT, build_g0(IDENT, 2j), 1.0).verdict == t["identity_1"]


def test_classify_spectrum_examples():
    c = classify_spectrum(DIAG, build_g0(DIAG))
    assert c.sigma_plus == [2.0] and c.sigma_minus == [-3.0] and c.critical_candidates == []
    assert classify_spectrum(NIL, build_g0(NIL)).critical_candidates == [0.0]
    s = classify_spectrum(SINGULAR, build_g0(SINGULAR))
    assert s.critical_candidates == [0.0] and s.zero_forced


def test_lambda0_invariance_examples():
    assert lambda0_invariance_check(DIAG, 1j, 4j)
    assert lambda0_invariance_check(IDENT, 2j, 1 + 1j)
    assert lambda0_invariance_check(SWAP, 3j, 3j)


def test_resolvent_growth_examples():
    rep = resolvent_growth_check(DIAG, (1, 3), [1e-1, 1e-2, 1e-3, 1e-4])
    assert rep.passed and rep.data["C"] == pytest.approx(1.0, rel=1e-6)
    rep = resolvent_growth_check(IDENT, (0.5, 1.5), [1e-1, 1e-2, 1e-3])
    assert rep.data["C"] == pytest.approx(1.0, rel=1e-6)
    with pytest.raises(PreconditionError):
        resolvent_growth_check(NIL, (-0.5, 0.5), [1e-1, 1e-2])


def test_nonneg_triple_examples():
    rep = nonneg_triple_classification(np.diag([2.0, 3.0]), np.diag([1.0, -1.0]))
    assert rep.passed
    kinds = {complex(d["value"]).real: d["verdict"] for d in rep.data["typed_points"]}
    assert kinds == {2.0: POSITIVE_TYPE, -3.0: NEGATIVE_TYPE}
    assert rep.data["invariant_subspace_dim"] == 1
    rep = nonneg_triple_classification(np.eye(2), np.eye(2))
    assert [d["verdict"] for d in rep.data["typed_points"]] == [POSITIVE_TYPE]
    v = np.ones((2, 1))
    rep = nonneg_triple_classification(v @ v.T, np.diag([1.0, -1.0]))
    assert rep.passed and rep.data["typed_points"] == []
    with pytest.raises(PreconditionError):
        nonneg_triple_classification(-np.eye(2), np.eye(2))


@given(pair=hermitian_pairs())
def test_definite_verdicts_only_on_real_points(pair):
    p = OperatorPair(*pair)
    c = classify_spectrum(p, build_g0(p))
    for pc in c.points:
        if pc.verdict in (POSITIVE_TYPE, NEGATIVE_TYPE):
            assert pc.value.imag == 0
            assert pc.cross_check["agrees"]
        if abs(pc.value.imag) > p.cluster_tol:
            assert pc.verdict == NON_REAL


@given(pair=hermitian_pairs(), seed=seeds)
def test_verdicts_independent_of_lambda0(pair, seed):
    p = OperatorPair(*pair)
    rng = np.random.default_rng(seed)
    r = 1 + p.spectral_radius
    a, b = (complex(r * rng.uniform(-1, 1), r * rng.uniform(1, 3)) for _ in range(2))
    assert lambda0_invariance_check(p, a, b)


@given(seed=seeds)
def test_nonneg_triples_random(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 8))
    B = rng.standard_normal((n, int(rng.integers(1, n + 1))))
    rep = nonneg_triple_classification(B @ B.T, random_hermitian(rng, n))
    assert rep.passed
