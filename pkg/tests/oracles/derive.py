"""Exact reference values for the fixed examples, computed with sympy.

Run `python tests/oracles/derive.py` to regenerate frozen.json; the test suite only reads the JSON.
"""

import json
from pathlib import Path

import sympy as sp

I = sp.I
lam = sp.Symbol("lam")


def cnum(z):
    z = sp.nsimplify(sp.expand(z))
    return [float(sp.re(z)), float(sp.im(z))]


def cmat(M):
    return [[cnum(M[i, j]) for j in range(M.shape[1])] for i in range(M.shape[0])]


def g0(A, G, l0):
    T = A * G
    n = T.shape[0]
    M = (T - l0 * sp.eye(n)) * (T - sp.conjugate(l0) * sp.eye(n))
    return sp.simplify(G * M.inv())


def spectral_radius(T):
    return max(sp.Abs(v) for v in T.eigenvals())


def riesz(T, value):
    """Spectral projection onto the generalized eigenspace of `value` via the Jordan form."""
    P, J = T.jordan_form()
    n = T.shape[0]
    D = sp.zeros(n)
    for k in range(n):
        if sp.simplify(J[k, k] - value) == 0:
            D[k, k] = 1
    return sp.simplify(P * D * P.inv())


def gram_type(A, G, l0, value):
    """Type of a real eigenvalue from the exact Gram matrix on its generalized eigenspace."""
    T = A * G
    E = riesz(T, value)
    V = sp.Matrix.hstack(*E.columnspace())
    V = sp.Matrix.hstack(*sp.GramSchmidt([V[:, k] for k in range(V.shape[1])], orthonormal=True))
    Gr = sp.simplify(V.H * g0(A, G, l0) * V)
    ev = [sp.nsimplify(e) for e in Gr.eigenvals(multiple=True)]
    if all(e > 0 for e in ev):
        return "PositiveType"
    if all(e < 0 for e in ev):
        return "NegativeType"
    return "Critical"


def pole_order(T, value):
    n = T.shape[0]
    S = T - value * sp.eye(n)
    E = riesz(T, value)
    X = E
    for nu in range(1, n + 1):
        X = S * X
        if sp.simplify(X) == sp.zeros(n):
            return nu
    return n


def main():
    out = {}
    d23 = sp.diag(2, 3)
    s = sp.diag(1, -1)
    swap = sp.Matrix([[0, 1], [1, 0]])
    nil_a = sp.Matrix([[1, 1], [1, 1]])
    rot = sp.Matrix([[0, -1], [1, 0]])
    eye = sp.eye(2)

    out["eig_swap"] = sorted(float(v) for v in swap.eigenvals(multiple=True))
    out["eig_points_rotation"] = sorted((cnum(v) for v in rot.eigenvals(multiple=True)), key=lambda z: z[1])
    out["eig_points_nilpotent"] = {str(k): v for k, v in sp.Matrix([[1, -1], [1, -1]]).eigenvals().items()}
    M = sp.Matrix([[1, -1], [1, -1]]) - I * eye
    out["solve_shifted_nilpotent"] = [cnum(v) for v in M.inv() * sp.Matrix([1, 0])]
    out["min_eig_1m1"] = float(min(sp.Matrix([[1, -1], [-1, 1]]).eigenvals(multiple=True)))

    out["lambda0"] = {
        "diag": cnum(I * (1 + spectral_radius(d23 * s))),
        "identity": cnum(I * (1 + spectral_radius(eye))),
        "nilpotent": cnum(I * (1 + spectral_radius(nil_a * s))),
    }
    out["g0"] = {
        "diag_i": cmat(g0(d23, s, I)),
        "identity_2i": cmat(g0(eye, eye, 2 * I)),
        "swap_2i": cmat(g0(swap, s, 2 * I)),
    }
    G0 = g0(d23, s, I)
    v = sp.Matrix([1, 1]) / sp.sqrt(2)
    out["gram_diag"] = {"e1": cnum((sp.Matrix([1, 0]).H * G0 * sp.Matrix([1, 0]))[0]), "mixed": cnum((v.H * G0 * v)[0])}

    out["types"] = {
        "diag_2": gram_type(d23, s, I, 2),
        "diag_m3": gram_type(d23, s, I, -3),
        "nilpotent_0": gram_type(nil_a, s, I, 0),
        "identity_1": gram_type(eye, eye, 2 * I, 1),
    }
    out["riesz_rotation_i"] = cmat(riesz(rot, I))
    out["pole_order"] = {
        "nilpotent": pole_order(sp.Matrix([[1, -1], [1, -1]]), 0),
        "diag": pole_order(sp.diag(2, -3), 2),
        "rotation": pole_order(rot, I),
    }

    def witness(A, G, p):
        H = G * p(A * G)
        return float(min(sp.Matrix(H).eigenvals(multiple=True)))

    out["definitizing_witness"] = {
        "diag_lambda": witness(d23, s, lambda X: X),
        "diag_minus_lambda": witness(d23, s, lambda X: -X),
        "swap_lambda2p1": witness(swap, s, lambda X: X * X + eye),
        "swapped_diag_lambda2": witness(s, d23, lambda X: X * X),
    }
    # certificate pieces for A = G = I, p = 1, lambda0 = 2i
    l0 = 2 * I
    N = (eye - l0 * eye) * (eye - sp.conjugate(l0) * eye)
    out["certificate_identity"] = {
        "A0": cmat(N.inv()),
        "r1_at_1": cnum(1 / ((1 - l0) * (1 - sp.conjugate(l0))) ** 2),
    }
    out["g0_rotation_2i"] = cmat(g0(swap, s, 2 * I))

    h = sp.Rational(1, 4)
    G3 = (sp.diag(2, 2, 2) - sp.Matrix([[0, 1, 0], [1, 0, 1], [0, 1, 0]])) / h**2
    out["sl_n3"] = {
        "G": [[float(x) for x in G3.row(i)] for i in range(3)],
        "eigenvalues": sorted(float(x) for x in G3.eigenvals(multiple=True)),
    }
    hh = sp.Rational(1, 200)
    out["sl_n199_lambda1"] = float(4 / hh**2 * sp.sin(sp.pi * hh / 2) ** 2)

    path = Path(__file__).with_name("frozen.json")
    path.write_text(json.dumps(out, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
