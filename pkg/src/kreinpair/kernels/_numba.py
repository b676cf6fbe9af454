"""Loop-level kernels compiled with numba.

Every function here has a vectorized twin in ``_numpy.py`` with the same
signature and return convention. Failures are reported through return codes
because jitted code cannot raise exceptions carrying runtime values.
"""

import numpy as np
from numba import njit

_EPS = np.finfo(np.float64).eps
_TINY = np.finfo(np.float64).tiny


@njit(cache=True)
def hermitian_tridiagonal(M):
    n = M.shape[0]
    A = M.copy()
    Q = np.eye(n, dtype=np.complex128)
    v = np.zeros(n, dtype=np.complex128)
    p = np.zeros(n, dtype=np.complex128)
    for k in range(n - 2):
        m = n - k - 1
        alpha2 = 0.0
        for i in range(k + 1, n):
            alpha2 += A[i, k].real ** 2 + A[i, k].imag ** 2
        x0 = A[k + 1, k]
        if alpha2 - (x0.real ** 2 + x0.imag ** 2) <= 0.0:
            continue
        alpha = np.sqrt(alpha2)
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        for i in range(m):
            v[i] = A[k + 1 + i, k]
        v[0] += phase * alpha
        vn2 = 0.0
        for i in range(m):
            vn2 += v[i].real ** 2 + v[i].imag ** 2
        beta = 2.0 / vn2
        # p = beta * A_sub v ; A_sub <- A_sub - v w^* - w v^*
        for i in range(m):
            s = 0.0 + 0.0j
            for j in range(m):
                s += A[k + 1 + i, k + 1 + j] * v[j]
            p[i] = beta * s
        vp = 0.0 + 0.0j
        for i in range(m):
            vp += np.conj(v[i]) * p[i]
        half = 0.5 * beta * vp.real
        for i in range(m):
            p[i] -= half * v[i]
        for i in range(m):
            for j in range(m):
                A[k + 1 + i, k + 1 + j] -= v[i] * np.conj(p[j]) + p[i] * np.conj(v[j])
        A[k + 1, k] = -phase * alpha
        A[k, k + 1] = np.conj(A[k + 1, k])
        for i in range(k + 2, n):
            A[i, k] = 0.0
            A[k, i] = 0.0
        for r in range(n):
            s = 0.0 + 0.0j
            for j in range(m):
                s += Q[r, k + 1 + j] * v[j]
            s *= beta
            for j in range(m):
                Q[r, k + 1 + j] -= s * np.conj(v[j])
    d = np.zeros(n)
    e = np.zeros(n)
    f = 1.0 + 0.0j
    for k in range(n):
        d[k] = A[k, k].real
        for r in range(n):
            Q[r, k] *= f
        if k < n - 1:
            sub = A[k + 1, k]
            a = abs(sub)
            e[k] = a
            if a > 0.0:
                f = f * sub / a
    return d, e, Q


@njit(cache=True)
def tridiagonal_ql(d, e, Z, max_iter):
    """Implicit QL on the symmetric tridiagonal (d, e), rotating columns of Z.

    ``e[i]`` couples rows i and i+1. Returns (d, Z, info) where info is -1 on
    success, otherwise the index whose iteration budget ran out.
    """
    n = d.shape[0]
    d = d.copy()
    e = e.copy()
    Z = Z.copy()
    rows = Z.shape[0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return d, Z, l
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(rows):
                    zf = Z[k, i + 1]
                    Z[k, i + 1] = s * Z[k, i] + c * zf
                    Z[k, i] = c * Z[k, i] - s * zf
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, Z, -1


@njit(cache=True)
def hessenberg(M):
    n = M.shape[0]
    A = M.copy()
    Q = np.eye(n, dtype=np.complex128)
    v = np.zeros(n, dtype=np.complex128)
    for k in range(n - 2):
        m = n - k - 1
        alpha2 = 0.0
        for i in range(k + 1, n):
            alpha2 += A[i, k].real ** 2 + A[i, k].imag ** 2
        x0 = A[k + 1, k]
        if alpha2 - (x0.real ** 2 + x0.imag ** 2) <= 0.0:
            continue
        alpha = np.sqrt(alpha2)
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        for i in range(m):
            v[i] = A[k + 1 + i, k]
        v[0] += phase * alpha
        vn2 = 0.0
        for i in range(m):
            vn2 += v[i].real ** 2 + v[i].imag ** 2
        beta = 2.0 / vn2
        for j in range(k, n):
            s = 0.0 + 0.0j
            for i in range(m):
                s += np.conj(v[i]) * A[k + 1 + i, j]
            s *= beta
            for i in range(m):
                A[k + 1 + i, j] -= s * v[i]
        for r in range(n):
            s = 0.0 + 0.0j
            for j in range(m):
                s += A[r, k + 1 + j] * v[j]
            s *= beta
            for j in range(m):
                A[r, k + 1 + j] -= s * np.conj(v[j])
            s = 0.0 + 0.0j
            for j in range(m):
                s += Q[r, k + 1 + j] * v[j]
            s *= beta
            for j in range(m):
                Q[r, k + 1 + j] -= s * np.conj(v[j])
        A[k + 1, k] = -phase * alpha
        for i in range(k + 2, n):
            A[i, k] = 0.0
    return A, Q


@njit(cache=True)
def _givens(x, y):
    if y == 0.0:
        return 1.0, 0.0 + 0.0j, x
    if x == 0.0:
        return 0.0, 1.0 + 0.0j, y
    ax = abs(x)
    nrm = np.hypot(ax, abs(y))
    alpha = x / ax
    return ax / nrm, alpha * np.conj(y) / nrm, alpha * nrm


@njit(cache=True)
def _eig2(a, b, c, d):
    t = 0.5 * (a + d)
    disc = np.sqrt((0.5 * (a - d)) ** 2 + b * c)
    l1 = t + disc
    l2 = t - disc
    if abs(l2) > abs(l1):
        l1, l2 = l2, l1
    if l1 != 0.0:
        l2 = (a * d - b * c) / l1
    return l1, l2


@njit(cache=True)
def hessenberg_qr_eigvals(H, max_iter):
    """Shifted complex QR on an upper Hessenberg matrix.

    Returns (eigenvalues, total_iterations, info); info is -1 on success or
    the active block end when the per-eigenvalue budget is exhausted.
    """
    n = H.shape[0]
    H = H.copy()
    w = np.zeros(n, dtype=np.complex128)
    hnorm = 0.0
    for i in range(n):
        for j in range(n):
            hnorm += H[i, j].real ** 2 + H[i, j].imag ** 2
    hnorm = np.sqrt(hnorm)
    total = 0
    its = 0
    hi = n - 1
    while hi >= 0:
        if hi == 0:
            w[0] = H[0, 0]
            break
        l = hi
        while l > 0:
            tst = abs(H[l - 1, l - 1]) + abs(H[l, l])
            if tst == 0.0:
                tst = hnorm
            h = abs(H[l, l - 1])
            if h <= _EPS * tst or h <= _TINY:
                H[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            w[hi] = H[hi, hi]
            hi -= 1
            its = 0
            continue
        if l == hi - 1:
            l1, l2 = _eig2(H[l, l], H[l, hi], H[hi, l], H[hi, hi])
            w[l] = l1
            w[hi] = l2
            hi -= 2
            its = 0
            continue
        if its >= max_iter:
            return w, total, hi
        its += 1
        total += 1
        if its % 10 == 0:
            sigma = H[hi, hi] + 0.75 * abs(H[hi, hi - 1])
        else:
            s1, s2 = _eig2(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
            sigma = s1 if abs(s1 - H[hi, hi]) <= abs(s2 - H[hi, hi]) else s2
        x = H[l, l] - sigma
        y = H[l + 1, l]
        for k in range(l, hi):
            if k > l:
                x = H[k, k - 1]
                y = H[k + 1, k - 1]
            c, s, r = _givens(x, y)
            j0 = l
            if k > l:
                H[k, k - 1] = r
                H[k + 1, k - 1] = 0.0
                j0 = k
            for j in range(j0, hi + 1):
                a = H[k, j]
                b = H[k + 1, j]
                H[k, j] = c * a + s * b
                H[k + 1, j] = -np.conj(s) * a + c * b
            iend = k + 2 if k + 2 < hi else hi
            for i in range(l, iend + 1):
                a = H[i, k]
                b = H[i, k + 1]
                H[i, k] = c * a + np.conj(s) * b
                H[i, k + 1] = -s * a + c * b
    return w, total, -1


@njit(cache=True)
def lu_factor(M):
    n = M.shape[0]
    LU = M.copy()
    perm = np.arange(n)
    min_pivot = np.inf
    for k in range(n):
        p = k
        best = abs(LU[k, k])
        for i in range(k + 1, n):
            a = abs(LU[i, k])
            if a > best:
                best = a
                p = i
        if best < min_pivot:
            min_pivot = best
        if best == 0.0:
            continue
        if p != k:
            for j in range(n):
                t = LU[k, j]
                LU[k, j] = LU[p, j]
                LU[p, j] = t
            t2 = perm[k]
            perm[k] = perm[p]
            perm[p] = t2
        piv = LU[k, k]
        for i in range(k + 1, n):
            LU[i, k] /= piv
            lik = LU[i, k]
            if lik != 0.0:
                for j in range(k + 1, n):
                    LU[i, j] -= lik * LU[k, j]
    return LU, perm, min_pivot


@njit(cache=True)
def lu_solve(LU, perm, B, adjoint):
    n = LU.shape[0]
    m = B.shape[1]
    X = np.empty((n, m), dtype=np.complex128)
    if not adjoint:
        for i in range(n):
            for c in range(m):
                X[i, c] = B[perm[i], c]
        for i in range(n):
            for k in range(i):
                lik = LU[i, k]
                if lik != 0.0:
                    for c in range(m):
                        X[i, c] -= lik * X[k, c]
        for i in range(n - 1, -1, -1):
            for k in range(i + 1, n):
                uik = LU[i, k]
                if uik != 0.0:
                    for c in range(m):
                        X[i, c] -= uik * X[k, c]
            piv = LU[i, i]
            for c in range(m):
                X[i, c] /= piv
        return X
    Y = B.astype(np.complex128).copy()
    for i in range(n):
        for k in range(i):
            uki = np.conj(LU[k, i])
            if uki != 0.0:
                for c in range(m):
                    Y[i, c] -= uki * Y[k, c]
        piv = np.conj(LU[i, i])
        for c in range(m):
            Y[i, c] /= piv
    for i in range(n - 1, -1, -1):
        for k in range(i + 1, n):
            lki = np.conj(LU[k, i])
            if lki != 0.0:
                for c in range(m):
                    Y[i, c] -= lki * Y[k, c]
    for i in range(n):
        for c in range(m):
            X[perm[i], c] = Y[i, c]
    return X


@njit(cache=True)
def hessenberg_resolvent_sum(H, bw, mus, weights, B, adjoint):
    """Sum of weights[k] * (mus[k] - H)^{-1} B over quadrature nodes.

    H is upper Hessenberg with upper bandwidth ``bw``; with ``adjoint`` the
    conjugate-transposed resolvents (mus[k] - H)^{-*} are used instead.
    Returns (sum, smallest pivot magnitude seen).
    """
    n = H.shape[0]
    m = B.shape[1]
    out = np.zeros((n, m), dtype=np.complex128)
    W = np.zeros((n, n), dtype=np.complex128)
    X = np.zeros((n, m), dtype=np.complex128)
    lmul = np.zeros(n, dtype=np.complex128)
    swp = np.zeros(n, dtype=np.bool_)
    min_pivot = np.inf
    for node in range(mus.shape[0]):
        mu = mus[node]
        for i in range(n):
            j0 = i - 1 if i > 0 else 0
            j1 = i + bw + 2 if i + bw + 2 < n else n
            for j in range(j0, j1):
                W[i, j] = -H[i, j]
            W[i, i] += mu
        for k in range(n - 1):
            hi = k + bw + 2 if k + bw + 2 < n else n
            if abs(W[k + 1, k]) > abs(W[k, k]):
                for j in range(k, hi):
                    t = W[k, j]
                    W[k, j] = W[k + 1, j]
                    W[k + 1, j] = t
                swp[k] = True
            else:
                swp[k] = False
            piv = W[k, k]
            if abs(piv) < min_pivot:
                min_pivot = abs(piv)
            if piv == 0.0:
                piv = _TINY
                W[k, k] = piv
            lk = W[k + 1, k] / piv
            lmul[k] = lk
            W[k + 1, k] = 0.0
            for j in range(k + 1, hi):
                W[k + 1, j] -= lk * W[k, j]
        if abs(W[n - 1, n - 1]) < min_pivot:
            min_pivot = abs(W[n - 1, n - 1])
        if W[n - 1, n - 1] == 0.0:
            W[n - 1, n - 1] = _TINY
        for i in range(n):
            for c in range(m):
                X[i, c] = B[i, c]
        if not adjoint:
            for k in range(n - 1):
                if swp[k]:
                    for c in range(m):
                        t = X[k, c]
                        X[k, c] = X[k + 1, c]
                        X[k + 1, c] = t
                lk = lmul[k]
                for c in range(m):
                    X[k + 1, c] -= lk * X[k, c]
            for i in range(n - 1, -1, -1):
                j1 = i + bw + 2 if i + bw + 2 < n else n
                for j in range(i + 1, j1):
                    u = W[i, j]
                    if u != 0.0:
                        for c in range(m):
                            X[i, c] -= u * X[j, c]
                piv = W[i, i]
                for c in range(m):
                    X[i, c] /= piv
        else:
            for i in range(n):
                j0 = i - bw - 1 if i - bw - 1 > 0 else 0
                for j in range(j0, i):
                    u = np.conj(W[j, i])
                    if u != 0.0:
                        for c in range(m):
                            X[i, c] -= u * X[j, c]
                piv = np.conj(W[i, i])
                for c in range(m):
                    X[i, c] /= piv
            for k in range(n - 2, -1, -1):
                lk = np.conj(lmul[k])
                for c in range(m):
                    X[k, c] -= lk * X[k + 1, c]
                if swp[k]:
                    for c in range(m):
                        t = X[k, c]
                        X[k, c] = X[k + 1, c]
                        X[k + 1, c] = t
        wk = weights[node]
        for i in range(n):
            for c in range(m):
                out[i, c] += wk * X[i, c]
    return out, min_pivot
