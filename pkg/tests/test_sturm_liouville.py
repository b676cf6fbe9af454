import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kreinpair.errors import ConfigurationError, PreconditionError
from kreinpair.sturm_liouville import SLProblem, discretize, parse_coefficients, sl_analysis, sl_report


def test_discretize_n3(frozen):
    pair = discretize(SLProblem((0, 1), 3))
    assert np.allclose(pair.G, frozen["sl_n3"]["G"])
    assert np.allclose(pair.A, np.eye(3))
    assert np.allclose(np.sort(pair.eigenvalues.real), frozen["sl_n3"]["eigenvalues"])


def test_discretize_weight_and_potential():
    assert np.allclose(discretize(SLProblem((0, 1), 3, w=2.0)).A, np.eye(3) / 2)
    base = discretize(SLProblem((0, 1), 4)).G
    shifted = discretize(SLProblem((0, 1), 4, q=1.0)).G
    assert np.allclose(shifted - base, np.eye(4))
    var = discretize(SLProblem((0, 2), 3, p="1+x"))
    h = 0.5
    assert var.G[0, 0] == pytest.approx((1.25 + 1.75) / h**2)
    assert var.G[0, 1] == pytest.approx(-1.75 / h**2)


def test_bad_problems():
    for kwargs in ({"n": 1}, {"interval": (1, 0)}, {"w": [1, -2]}, {"p": 0.0}, {"w": "1+"}):
        args = {"interval": (0, 1), "n": 4, **kwargs}
        with pytest.raises(ConfigurationError):
            discretize(SLProblem(**args))
    with pytest.raises(ConfigurationError):
        SLProblem.from_config({"interval": [0, 1], "n": 3, "r": 1})
    with pytest.raises(ConfigurationError):
        SLProblem.from_config({"n": 3})


def test_singular_g_rejected():
    # q shifts the lowest discrete Dirichlet eigenvalue 4 h^-2 sin^2(pi h / 2) to zero
    h = 1 / 4
    low = 4 / h**2 * np.sin(np.pi * h / 2) ** 2
    with pytest.raises(PreconditionError):
        sl_analysis(SLProblem((0, 1), 3, q=-low))


def test_parse_coefficients():
    assert parse_coefficients("1+0.5*x") == [1.0, 0.5]
    assert parse_coefficients("-3x^2") == [0.0, 0.0, -3.0]
    assert parse_coefficients("x**3 - 2") == [-2.0, 0.0, 0.0, 1.0]
    assert parse_coefficients("1e-2x") == [0.0, 0.01]
    assert parse_coefficients(4) == [4.0]
    assert parse_coefficients([1, 2]) == [1.0, 2.0]
    for bad in ("", "x^", "2y", []):
        with pytest.raises(ConfigurationError):
            parse_coefficients(bad)


def test_reports():
    rep = sl_report(SLProblem((0, 1), 3))
    assert rep.passed and rep.data["negative_type"] == 0
    ind = sl_report(SLProblem((0, 1), 20, q=-50.0))
    assert ind.passed and ind.data["negative_type"] >= 1 and ind.data["positive_type"] >= 1


def test_lowest_eigenvalue_n199(frozen):
    sl = sl_analysis(SLProblem((0, 1), 199))
    assert sl.report.data["smallest_eigenvalue"] == pytest.approx(frozen["sl_n199_lambda1"], rel=1e-10)
    assert abs(sl.report.data["smallest_eigenvalue"] - np.pi**2) < 1e-3


@given(
    n=st.integers(2, 24),
    w0=st.floats(0.2, 3.0),
    w1=st.floats(-0.15, 1.0),
    q0=st.floats(-5.0, 5.0),
)
def test_analysis_properties(n, w0, w1, q0):
    prob = SLProblem((0, 1), n, w=[w0, w1], q=q0)
    pair = discretize(prob)
    assert np.allclose(pair.G, pair.G.T)
    assert np.all(np.diag(pair.A) > 0)
    rep = sl_report(prob)
    assert rep.passed
    assert rep.data["positive_type"] + rep.data["negative_type"] == n
