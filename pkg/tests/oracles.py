"""Independent oracles used by the test suite.

Everything here deliberately avoids the library's own quadrature/solver
code paths: adaptive Simpson for the alpha integrals, dense numpy linear
algebra for the tridiagonal systems, a binomial recurrence for the
convolution weights, and the untransformed 2N+1-term contour sum.
"""

from __future__ import annotations

import numpy as np

PSI = 1.1721
C0 = 1.0818
C1 = 4.4920


def adaptive_simpson(f, a, b, tol=1e-13, depth=60):
    """Adaptive Simpson on [a, b]; complex-valued integrands allowed."""

    def simp(fa, fm, fb, a, b):
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        flm, frm = f(0.5 * (a + m)), f(0.5 * (m + b))
        left = simp(fa, flm, fm, a, m)
        right = simp(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) < 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return (rec(a, m, fa, flm, fm, left, tol / 2, depth - 1)
                + rec(m, b, fm, frm, fb, right, tol / 2, depth - 1))

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return rec(a, b, fa, fm, fb, simp(fa, fm, fb, a, b), tol, depth)


def w_oracle(mu_fn, z, pieces=((0.0, 1.0),), tol=1e-14):
    """w(z) by adaptive Simpson, split at the smoothness breakpoints of mu."""
    total = 0.0 + 0.0j
    for a, b in pieces:
        total += adaptive_simpson(lambda al: z ** (al - 1.0) * mu_fn(al), a, b, tol)
    return total


_GX64, _GW64 = np.polynomial.legendre.leggauss(64)


def series_weights(mu_fn, tau, n, pieces=((0.0, 1.0),)):
    """Convolution weights from the power series of the one-sided difference.

    b_j = integral tau**(-alpha) * (-1)**j * binom(alpha, j) * mu(alpha),
    binomials by the recurrence c_j = c_{j-1} * (j - 1 - alpha) / j and the
    alpha integral by 64-point Gauss per smooth piece.
    """
    out = np.zeros(n)
    for a, b in pieces:
        x = 0.5 * (b - a) * (_GX64 + 1.0) + a
        w = 0.5 * (b - a) * _GW64
        c = np.ones_like(x)
        fac = w * tau ** -x * mu_fn(x)
        out[0] += float(np.dot(fac, c))
        for j in range(1, n):
            c = c * (x - j + 1.0) / j * -1.0
            out[j] += float(np.dot(fac, c))
    return out


def dense_mass_stiffness(M):
    """Element-by-element assembly of the P1 matrices on interior nodes."""
    h = 1.0 / M
    me = h / 6.0 * np.array([[2.0, 1.0], [1.0, 2.0]])
    ke = 1.0 / h * np.array([[1.0, -1.0], [-1.0, 1.0]])
    mass = np.zeros((M + 1, M + 1))
    stiff = np.zeros((M + 1, M + 1))
    for e in range(M):
        sl = slice(e, e + 2)
        mass[sl, sl] += me
        stiff[sl, sl] += ke
    return mass[1:-1, 1:-1], stiff[1:-1, 1:-1]


def dense_helmholtz(M, s, rhs):
    """(s*mass + stiffness) phi = mass*rhs via dense LU."""
    mass, stiff = dense_mass_stiffness(M)
    return np.linalg.solve(s * mass + stiff, mass @ np.asarray(rhs))


def naive_contour_sum(N, t, M, w_of_z, vh):
    """Untransformed 2N+1-term trapezoid sum with dense solves.

    Builds every node z(j*k) for j = -N..N from the parametrisation and sums
    (k/2pi) * e^{z t} phi z'/i without exploiting conjugate symmetry.
    """
    k = C0 / N
    lam = C1 * N / t
    mass, stiff = dense_mass_stiffness(M)
    mv = mass @ np.asarray(vh)
    total = np.zeros(M - 1, dtype=complex)
    for j in range(-N, N + 1):
        xi = k * j
        z = lam * (1.0 - np.sin(PSI) * np.cosh(xi)) + 1j * lam * np.cos(PSI) * np.sinh(xi)
        zeta = lam * (np.cos(PSI) * np.cosh(xi) + 1j * np.sin(PSI) * np.sinh(xi))
        w = w_of_z(z)
        phi = np.linalg.solve(z * w * mass + stiff, w * mv)
        total += np.exp(z * t) * zeta * phi
    return k / (2.0 * np.pi) * total


def cq_step_residual(M, b, vh, U, n):
    """Residual of step n of the convolution scheme, re-evaluated densely.

    mass*(b_0 U^n + sum_{j=1}^{n-1} b_{n-j} U^j - Q_n(1) v_h) + stiff*U^n
    """
    mass, stiff = dense_mass_stiffness(M)
    conv = b[0] * U[n - 1]
    for j in range(1, n):
        conv = conv + b[n - j] * U[j - 1]
    qn1 = float(np.sum(b[:n]))
    return mass @ (conv - qn1 * np.asarray(vh)) + stiff @ U[n - 1]


def p1_function_error(mesh_fn, nodal, fn, n_gauss=8):
    """L2 distance between a P1 interior-node function and a callable."""
    import numpy.polynomial.legendre as leg

    x, w = leg.leggauss(n_gauss)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    M = len(nodal) + 1
    h = 1.0 / M
    full = np.zeros(M + 1)
    full[1:-1] = nodal
    total = 0.0
    for e in range(M):
        xs = (e + x) * h
        vals = full[e] * (1.0 - x) + full[e + 1] * x
        total += h * float(np.dot(w, (fn(xs) - vals) ** 2))
    return np.sqrt(total)
