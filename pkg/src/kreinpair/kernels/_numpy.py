"""Vectorized numpy versions of the jitted kernels.

Same signatures and return conventions as ``_numba.py``. Inner loops are
replaced by array operations where the algorithm allows it.
"""

import numpy as np

_EPS = np.finfo(np.float64).eps
_TINY = np.finfo(np.float64).tiny


def _reflector(x):
    alpha2 = float(np.vdot(x, x).real)
    x0 = x[0]
    if alpha2 - abs(x0) ** 2 <= 0.0:
        return None
    alpha = np.sqrt(alpha2)
    phase = x0 / abs(x0) if abs(x0) > 0 else 1.0 + 0.0j
    v = x.copy()
    v[0] += phase * alpha
    beta = 2.0 / float(np.vdot(v, v).real)
    return v, beta, -phase * alpha


def hermitian_tridiagonal(M):
    n = M.shape[0]
    A = M.astype(np.complex128, copy=True)
    Q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        refl = _reflector(A[k + 1:, k])
        if refl is None:
            continue
        v, beta, head = refl
        S = A[k + 1:, k + 1:]
        p = beta * (S @ v)
        p -= 0.5 * beta * np.vdot(v, p).real * v
        S -= np.outer(v, p.conj()) + np.outer(p, v.conj())
        A[k + 1, k] = head
        A[k, k + 1] = np.conj(head)
        A[k + 2:, k] = 0.0
        A[k, k + 2:] = 0.0
        Q[:, k + 1:] -= beta * np.outer(Q[:, k + 1:] @ v, v.conj())
    d = np.diag(A).real.copy()
    sub = np.diag(A, -1)
    e = np.zeros(n)
    e[:n - 1] = np.abs(sub)
    phases = np.ones(n, dtype=np.complex128)
    unit = np.where(e[:n - 1] > 0, sub / np.where(e[:n - 1] > 0, e[:n - 1], 1.0), 1.0)
    phases[1:] = np.cumprod(unit)
    Q *= phases[None, :]
    return d, e, Q


def tridiagonal_ql(d, e, Z, max_iter):
    n = d.shape[0]
    d = d.copy()
    e = e.copy()
    Z = Z.copy()
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= _EPS * (abs(d[m]) + abs(d[m + 1])):
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
            s = c = 1.0
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
                zf = Z[:, i + 1].copy()
                Z[:, i + 1] = s * Z[:, i] + c * zf
                Z[:, i] = c * Z[:, i] - s * zf
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, Z, -1


def hessenberg(M):
    n = M.shape[0]
    A = M.astype(np.complex128, copy=True)
    Q = np.eye(n, dtype=np.complex128)
    for k in range(n - 2):
        refl = _reflector(A[k + 1:, k])
        if refl is None:
            continue
        v, beta, head = refl
        A[k + 1:, k:] -= beta * np.outer(v, v.conj() @ A[k + 1:, k:])
        A[:, k + 1:] -= beta * np.outer(A[:, k + 1:] @ v, v.conj())
        Q[:, k + 1:] -= beta * np.outer(Q[:, k + 1:] @ v, v.conj())
        A[k + 1, k] = head
        A[k + 2:, k] = 0.0
    return A, Q


def _givens(x, y):
    if y == 0:
        return 1.0, 0.0 + 0.0j, x
    if x == 0:
        return 0.0, 1.0 + 0.0j, y
    ax = abs(x)
    nrm = np.hypot(ax, abs(y))
    alpha = x / ax
    return ax / nrm, alpha * np.conj(y) / nrm, alpha * nrm


def _eig2(a, b, c, d):
    t = 0.5 * (a + d)
    disc = np.sqrt(complex((0.5 * (a - d)) ** 2 + b * c))
    l1, l2 = t + disc, t - disc
    if abs(l2) > abs(l1):
        l1, l2 = l2, l1
    if l1 != 0:
        l2 = (a * d - b * c) / l1
    return l1, l2


def hessenberg_qr_eigvals(H, max_iter):
    n = H.shape[0]
    H = H.astype(np.complex128, copy=True)
    w = np.zeros(n, dtype=np.complex128)
    hnorm = np.linalg.norm(H)
    total = its = 0
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
            w[l], w[hi] = _eig2(H[l, l], H[l, hi], H[hi, l], H[hi, hi])
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
            G = np.array([[c, s], [-np.conj(s), c]])
            H[k:k + 2, j0:hi + 1] = G @ H[k:k + 2, j0:hi + 1]
            iend = min(k + 2, hi)
            H[l:iend + 1, k:k + 2] = H[l:iend + 1, k:k + 2] @ G.conj().T
    return w, total, -1


def lu_factor(M):
    n = M.shape[0]
    LU = M.astype(np.complex128, copy=True)
    perm = np.arange(n)
    min_pivot = np.inf
    for k in range(n):
        p = k + int(np.argmax(np.abs(LU[k:, k])))
        best = abs(LU[p, k])
        min_pivot = min(min_pivot, best)
        if best == 0.0:
            continue
        if p != k:
            LU[[k, p]] = LU[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        LU[k + 1:, k] /= LU[k, k]
        LU[k + 1:, k + 1:] -= np.outer(LU[k + 1:, k], LU[k, k + 1:])
    return LU, perm, min_pivot


def _tri_solve(T, B, lower, unit):
    n = T.shape[0]
    X = B.astype(np.complex128, copy=True)
    order = range(n) if lower else range(n - 1, -1, -1)
    for i in order:
        if lower:
            X[i] -= T[i, :i] @ X[:i]
        else:
            X[i] -= T[i, i + 1:] @ X[i + 1:]
        if not unit:
            X[i] /= T[i, i]
    return X


def lu_solve(LU, perm, B, adjoint):
    L = np.tril(LU, -1) + np.eye(LU.shape[0])
    U = np.triu(LU)
    if not adjoint:
        Y = _tri_solve(L, B[perm], lower=True, unit=True)
        return _tri_solve(U, Y, lower=False, unit=False)
    Y = _tri_solve(U.conj().T, B, lower=True, unit=False)
    Y = _tri_solve(L.conj().T, Y, lower=False, unit=True)
    X = np.empty_like(Y)
    X[perm] = Y
    return X


def hessenberg_resolvent_sum(H, bw, mus, weights, B, adjoint):
    """Batched over nodes: one elimination sweep processes every node at once."""
    n = H.shape[0]
    q = mus.shape[0]
    W = -np.broadcast_to(H, (q, n, n)).copy()
    idx = np.arange(n)
    W[:, idx, idx] += mus[:, None]
    X = np.broadcast_to(B.astype(np.complex128), (q,) + B.shape).copy()
    lmul = np.zeros((q, n), dtype=np.complex128)
    swp = np.zeros((q, n), dtype=bool)
    min_pivot = np.inf
    for k in range(n - 1):
        hi = min(k + bw + 2, n)
        s = np.abs(W[:, k + 1, k]) > np.abs(W[:, k, k])
        swp[:, k] = s
        if s.any():
            top = W[s, k, k:hi].copy()
            W[s, k, k:hi] = W[s, k + 1, k:hi]
            W[s, k + 1, k:hi] = top
        piv = W[:, k, k]
        min_pivot = min(min_pivot, float(np.abs(piv).min()))
        piv = np.where(piv == 0, _TINY, piv)
        W[:, k, k] = piv
        lk = W[:, k + 1, k] / piv
        lmul[:, k] = lk
        W[:, k + 1, k] = 0.0
        W[:, k + 1, k + 1:hi] -= lk[:, None] * W[:, k, k + 1:hi]
    last = W[:, n - 1, n - 1]
    min_pivot = min(min_pivot, float(np.abs(last).min()))
    W[:, n - 1, n - 1] = np.where(last == 0, _TINY, last)
    if not adjoint:
        for k in range(n - 1):
            s = swp[:, k]
            if s.any():
                top = X[s, k].copy()
                X[s, k] = X[s, k + 1]
                X[s, k + 1] = top
            X[:, k + 1] -= lmul[:, k, None] * X[:, k]
        for i in range(n - 1, -1, -1):
            j1 = min(i + bw + 2, n)
            if j1 > i + 1:
                X[:, i] -= np.einsum("qj,qjc->qc", W[:, i, i + 1:j1], X[:, i + 1:j1])
            X[:, i] /= W[:, i, i, None]
    else:
        for i in range(n):
            j0 = max(i - bw - 1, 0)
            if i > j0:
                X[:, i] -= np.einsum("qj,qjc->qc", W[:, j0:i, i].conj(), X[:, j0:i])
            X[:, i] /= W[:, i, i, None].conj()
        for k in range(n - 2, -1, -1):
            X[:, k] -= lmul[:, k, None].conj() * X[:, k + 1]
            s = swp[:, k]
            if s.any():
                top = X[s, k].copy()
                X[s, k] = X[s, k + 1]
                X[s, k + 1] = top
    out = np.einsum("q,qic->ic", weights, X)
    return out, min_pivot
