import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given

from kreinpair import kernels
from kreinpair.kernels import _numba, _numpy
from conftest import dims, seeds

BACKENDS = [_numpy, _numba]


def rand(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


@pytest.mark.parametrize("mod", BACKENDS, ids=["numpy", "numba"])
def test_tridiagonal_ql_reconstructs(mod):
    rng = np.random.default_rng(1)
    X = rand(rng, 7)
    H = X + X.conj().T
    d, e, Q = mod.hermitian_tridiagonal(H)
    w, V, info = mod.tridiagonal_ql(d, e, Q, 60)
    assert info == -1
    assert np.allclose(V @ np.diag(w) @ V.conj().T, H, atol=1e-12)
    assert np.allclose(np.sort(w), np.linalg.eigvalsh(H), atol=1e-12)


@pytest.mark.parametrize("mod", BACKENDS, ids=["numpy", "numba"])
def test_hessenberg_qr_matches_reference(mod):
    rng = np.random.default_rng(2)
    M = rand(rng, 9)
    H, Q = mod.hessenberg(M)
    assert np.allclose(np.tril(H, -2), 0)
    assert np.allclose(Q @ H @ Q.conj().T, M, atol=1e-12)
    w, _, info = mod.hessenberg_qr_eigvals(H, 300)
    assert info == -1
    ref = np.linalg.eigvals(M)
    assert max(np.min(np.abs(ref - z)) for z in w) < 1e-10


@pytest.mark.parametrize("mod", BACKENDS, ids=["numpy", "numba"])
def test_lu_solve_both_directions(mod):
    rng = np.random.default_rng(3)
    M = rand(rng, 6)
    B = rand(rng, 6, 2)
    LU, perm, piv = mod.lu_factor(M)
    assert piv > 0
    assert np.allclose(M @ mod.lu_solve(LU, perm, B, False), B)
    assert np.allclose(M.conj().T @ mod.lu_solve(LU, perm, B, True), B)


def test_lu_diagonal_example():
    LU, perm, _ = kernels.lu_factor(np.diag([2.0, 4.0]).astype(complex))
    x = kernels.lu_solve(LU, perm, np.array([[2.0], [4.0]], dtype=complex), False)
    assert np.allclose(x[:, 0], [1, 1])


@given(seed=seeds, n=dims)
def test_backends_agree_on_resolvent_sum(seed, n):
    rng = np.random.default_rng(seed)
    H, _ = _numpy.hessenberg(rand(rng, n))
    mus = 3.0 * np.exp(2j * np.pi * np.arange(8) / 8)
    wts = np.full(8, 1 / 8, dtype=complex)
    B = rand(rng, n, 2)
    for adjoint in (False, True):
        a, pa = _numpy.hessenberg_resolvent_sum(H, n - 1, mus, wts, B, adjoint)
        b, pb = _numba.hessenberg_resolvent_sum(H, n - 1, mus, wts, B, adjoint)
        assert np.allclose(a, b, atol=1e-11 * max(1.0, np.abs(a).max()))
        shifted = [m * np.eye(n) - H for m in mus]
        ref = sum(w * np.linalg.solve(S.conj().T if adjoint else S, B) for S, w in zip(shifted, wts))
        assert np.allclose(a, ref, atol=1e-10 * max(1.0, np.abs(ref).max()))


@given(seed=seeds, n=dims)
def test_backends_agree_on_eigenvalues(seed, n):
    rng = np.random.default_rng(seed)
    M = rand(rng, n)
    wa = _numpy.hessenberg_qr_eigvals(_numpy.hessenberg(M)[0], 300)[0]
    wb = _numba.hessenberg_qr_eigvals(_numba.hessenberg(M)[0], 300)[0]
    assert max(np.min(np.abs(wa - z)) for z in wb) < 1e-9 * (1 + np.abs(wa).max())


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, KREINPAIR_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from kreinpair import kernels; print(kernels.backend)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_default_backend_is_numba():
    if os.environ.get("KREINPAIR_DISABLE_NUMBA"):
        pytest.skip("backend forced by the environment")
    assert kernels.backend == "numba"
