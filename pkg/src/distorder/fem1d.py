"""P1 Galerkin discretisation on a uniform mesh of (0, 1) with zero Dirichlet data.

Provides the tridiagonal mass/stiffness pair, L2 and Ritz projections of the
initial data, a complex Helmholtz-type tridiagonal solve, and exact norms of
piecewise-linear differences between nested meshes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import (
    DomainError,
    MeshMismatchError,
    NotApplicableError,
    QuadratureError,
    SingularMatrixError,
    ToleranceError,
)

__all__ = [
    "Mesh1D",
    "SymTridiag",
    "FemSystem",
    "InitialKind",
    "InitialData",
    "l2_project",
    "ritz_project",
    "project_initial",
    "solve_helmholtz",
    "solve_sym_tridiag",
    "prolong",
    "error_norms",
    "fe_l2_norm",
    "fe_h1_seminorm",
    "data_l2_norm",
]

# 4-point Gauss-Legendre on [0, 1], enough for the smooth loads
_GX4, _GW4 = np.polynomial.legendre.leggauss(4)
_GX4 = 0.5 * (_GX4 + 1.0)
_GW4 = 0.5 * _GW4
# 8-point rule for norm integrals
_GX8, _GW8 = np.polynomial.legendre.leggauss(8)
_GX8 = 0.5 * (_GX8 + 1.0)
_GW8 = 0.5 * _GW8

# graded rule near a singular endpoint: geometric panels, ratio 1/2
_GRADED_PANELS = 16


@dataclass(frozen=True)
class Mesh1D:
    """Uniform mesh with M subintervals; interior nodes x_i = i/M."""

    M: int

    def __post_init__(self) -> None:
        if self.M < 2:
            raise DomainError("mesh needs at least 2 subintervals")

    @property
    def h(self) -> float:
        return 1.0 / self.M

    @property
    def dof(self) -> int:
        return self.M - 1

    @property
    def interior_nodes(self) -> np.ndarray:
        return np.arange(1, self.M) / self.M


@dataclass(frozen=True)
class SymTridiag:
    """Symmetric tridiagonal matrix stored as (diagonal, off-diagonal)."""

    diag: np.ndarray
    off: np.ndarray

    def __matmul__(self, v: np.ndarray) -> np.ndarray:
        r = self.diag * v
        if self.off.size:
            r = r.astype(np.result_type(r, self.off))
            r[:-1] += self.off * v[1:]
            r[1:] += self.off * v[:-1]
        return r

    def toarray(self) -> np.ndarray:
        n = self.diag.size
        a = np.zeros((n, n), dtype=np.result_type(self.diag, self.off))
        a[np.arange(n), np.arange(n)] = self.diag
        if n > 1:
            a[np.arange(n - 1), np.arange(1, n)] = self.off
            a[np.arange(1, n), np.arange(n - 1)] = self.off
        return a


@dataclass(frozen=True)
class FemSystem:
    """Assembled mass and stiffness matrices on the interior nodes."""

    mesh: Mesh1D
    mass: SymTridiag
    stiffness: SymTridiag

    @classmethod
    def build(cls, M: int) -> "FemSystem":
        mesh = Mesh1D(M)
        n, h = mesh.dof, mesh.h
        mass = SymTridiag(np.full(n, 2.0 * h / 3.0), np.full(n - 1, h / 6.0))
        stiff = SymTridiag(np.full(n, 2.0 / h), np.full(n - 1, -1.0 / h))
        return cls(mesh, mass, stiff)


class InitialKind(Enum):
    SMOOTH_SIN = "sin"
    INDICATOR_HALF = "indicator"
    SINGULAR_POW = "singular"
    CUSTOM = "custom"


@dataclass(frozen=True)
class InitialData:
    """Initial datum v on (0, 1) plus the quadrature hints its class needs.

    ``smooth`` marks data with Av in L2, for which the Ritz projection is the
    appropriate embedding; everything else is projected in L2.
    """

    kind: InitialKind
    fn: Callable[[np.ndarray], np.ndarray]
    dfn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    smooth: bool = False
    breakpoints: tuple[float, ...] = ()
    singular_origin: bool = False

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    @classmethod
    def smooth_sin(cls) -> "InitialData":
        """v(x) = sin(2 pi x)."""
        return cls(InitialKind.SMOOTH_SIN,
                   lambda x: np.sin(2.0 * np.pi * x),
                   dfn=lambda x: 2.0 * np.pi * np.cos(2.0 * np.pi * x),
                   smooth=True)

    @classmethod
    def indicator_half(cls) -> "InitialData":
        """v = 1 on (0, 1/2), 0 on (1/2, 1)."""
        return cls(InitialKind.INDICATOR_HALF,
                   lambda x: np.where(x < 0.5, 1.0, 0.0),
                   breakpoints=(0.5,))

    @classmethod
    def singular_pow(cls) -> "InitialData":
        """v(x) = x**(-1/4), integrable but unbounded at the left endpoint."""
        return cls(InitialKind.SINGULAR_POW,
                   lambda x: np.asarray(x, dtype=float) ** -0.25,
                   singular_origin=True)

    @classmethod
    def custom(cls, fn, dfn=None, smooth=False, breakpoints=(),
               singular_origin=False) -> "InitialData":
        return cls(InitialKind.CUSTOM, fn, dfn, smooth,
                   tuple(breakpoints), singular_origin)


def _gauss_piece(fn, a: float, b: float) -> float:
    x = a + (b - a) * _GX4
    return (b - a) * float(np.dot(_GW4, fn(x)))


def _graded_piece(fn, a: float, b: float) -> float:
    """Integrate fn on [a, b] with geometric panels shrinking toward a.

    Used for the element touching the singular endpoint; the leftover sliver
    [a, a + (b-a)/2**16] is dropped, which for an x**s integrand with s > 0
    is far below the discretisation error.
    """
    total = 0.0
    width = b - a
    for k in range(_GRADED_PANELS):
        hi = a + width * 0.5 ** k
        lo = a + width * 0.5 ** (k + 1)
        total += _gauss_piece(fn, lo, hi)
    return total


def _element_integrals(mesh: Mesh1D, v: InitialData, fn) -> tuple[np.ndarray, np.ndarray]:
    """Per-element integrals of fn(x)*phi_left and fn(x)*phi_right.

    phi_left is the hat decreasing across the element, phi_right the one
    increasing; element e spans [e*h, (e+1)*h].
    """
    M, h = mesh.M, mesh.h
    edges = np.arange(M + 1) / M
    xq = edges[:-1, None] + h * _GX4[None, :]
    fv = fn(xq)
    left = h * (fv * (1.0 - _GX4)) @ _GW4
    right = h * (fv * _GX4) @ _GW4

    def redo(e: int, pieces) -> None:
        a = edges[e]
        il = ir = 0.0
        for lo, hi, graded in pieces:
            wl = lambda x: fn(x) * (1.0 - (x - a) / h)
            wr = lambda x: fn(x) * (x - a) / h
            if graded:
                il += _graded_piece(wl, lo, hi)
                ir += _graded_piece(wr, lo, hi)
            else:
                il += _gauss_piece(wl, lo, hi)
                ir += _gauss_piece(wr, lo, hi)
        left[e], right[e] = il, ir

    for bp in v.breakpoints:
        e = int(bp * M)
        if 0 <= e < M and edges[e] < bp < edges[e + 1]:
            redo(e, [(edges[e], bp, False), (bp, edges[e + 1], False)])
    if v.singular_origin:
        redo(0, [(edges[0], edges[1], True)])
    return left, right


def l2_project(sys: FemSystem, v: InitialData) -> np.ndarray:
    """L2-orthogonal projection of v onto the interior hat functions.

    Solves mass * P = b with b_i = (v, phi_i); loads use 4-point Gauss per
    element, split at jump points of v, and a graded rule on the first
    element for data singular at x = 0.
    """
    mesh = sys.mesh
    left, right = _element_integrals(mesh, v, v.fn)
    # node i (1..M-1) collects the increasing hat on element i-1 and the
    # decreasing hat on element i
    b = right[:-1] + left[1:]
    if not np.all(np.isfinite(b)):
        raise QuadratureError("load integration produced non-finite entries")
    return solve_sym_tridiag(sys.mass.diag, sys.mass.off, b)


def ritz_project(sys: FemSystem, v: InitialData) -> np.ndarray:
    """Energy projection: (R', phi_i') = (v', phi_i') for all interior hats.

    Needs a computable derivative; data outside H1 (jumps, endpoint blow-up)
    is rejected.
    """
    if v.dfn is None or v.breakpoints or v.singular_origin:
        raise NotApplicableError(
            f"Ritz projection needs H1 data with a derivative; got {v.kind.value}")
    mesh = sys.mesh
    M, h = mesh.M, mesh.h
    edges = np.arange(M + 1) / M
    xq = edges[:-1, None] + h * _GX4[None, :]
    dint = h * (v.dfn(xq) @ _GW4)
    c = (dint[:-1] - dint[1:]) / h
    if not np.all(np.isfinite(c)):
        raise QuadratureError("energy load integration produced non-finite entries")
    return solve_sym_tridiag(sys.stiffness.diag, sys.stiffness.off, c)


def project_initial(sys: FemSystem, v: InitialData) -> np.ndarray:
    """Ritz projection for smooth data, L2 projection otherwise.

    This is the embedding the smooth/nonsmooth error theory is stated for;
    the convergence studies themselves project everything in L2, which is
    what the reference tables were computed with.
    """
    if v.smooth and v.dfn is not None:
        return ritz_project(sys, v)
    return l2_project(sys, v)


_PIVOT_FLOOR = 1e-300


def solve_sym_tridiag(diag: np.ndarray, off: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Thomas elimination for a symmetric tridiagonal system, no pivoting.

    All matrices produced here are rotated-definite (s*mass + stiffness with
    s off the negative real axis), for which elimination without pivoting is
    stable.  Raises SingularMatrixError when a pivot magnitude underflows.
    """
    n = diag.shape[0]
    dtype = np.result_type(diag, off, rhs, np.float64)
    cp = np.empty(max(n - 1, 0), dtype=dtype)
    dp = np.empty(n, dtype=dtype)
    piv = diag[0]
    if abs(piv) < _PIVOT_FLOOR:
        raise SingularMatrixError("pivot underflow at row 0")
    dp[0] = rhs[0] / piv
    for i in range(1, n):
        cp[i - 1] = off[i - 1] / piv
        piv = diag[i] - off[i - 1] * cp[i - 1]
        if abs(piv) < _PIVOT_FLOOR:
            raise SingularMatrixError(f"pivot underflow at row {i}")
        dp[i] = (rhs[i] - off[i - 1] * dp[i - 1]) / piv
    x = np.empty(n, dtype=dtype)
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


_RESIDUAL_RTOL = 1e-12

# extended precision for the shifted solve, when the platform provides it
_EXTENDED = np.finfo(np.longdouble).eps < np.finfo(np.float64).eps


def solve_helmholtz(sys: FemSystem, s: complex, rhs: np.ndarray) -> np.ndarray:
    """Solve (s*mass + stiffness) phi = mass*rhs by complex Thomas elimination.

    The matrix is formed and eliminated in extended precision where the
    platform has one: when |s|*||mass|| << ||stiffness|| the double rounding
    of the entry sums perturbs the effective shift by eps * lam_max / |s|,
    which the exponentially weighted contour reduction then amplifies; the
    extra mantissa bits keep that perturbation below the quadrature floor.
    One step of iterative refinement backs the residual guarantee
    ||A*phi - mass*rhs||_inf <= 1e-12 * ||mass*rhs||_inf, up to the
    floating-point floor eps*|| |A| |phi| ||_inf below which the residual
    cannot even be evaluated.
    """
    a = SymTridiag(s * sys.mass.diag + sys.stiffness.diag,
                   s * sys.mass.off + sys.stiffness.off)
    b = sys.mass @ np.asarray(rhs)
    if _EXTENDED:
        sl = np.clongdouble(s)
        diag_l = sl * sys.mass.diag.astype(np.longdouble) \
            + sys.stiffness.diag.astype(np.longdouble)
        off_l = sl * sys.mass.off.astype(np.longdouble) \
            + sys.stiffness.off.astype(np.longdouble)
        phi = solve_sym_tridiag(diag_l, off_l, b.astype(np.clongdouble))
        phi = phi.astype(complex)
    else:
        phi = solve_sym_tridiag(a.diag, a.off, b)
    bnorm = float(np.max(np.abs(b))) if b.size else 0.0
    if bnorm == 0.0:
        return phi
    abs_a = SymTridiag(np.abs(a.diag), np.abs(a.off))

    def tol() -> float:
        floor = float(np.max(abs_a @ np.abs(phi)))
        return _RESIDUAL_RTOL * bnorm + 10.0 * np.finfo(float).eps * floor

    res = b - (a @ phi)
    if np.max(np.abs(res)) > tol():
        phi = phi + solve_sym_tridiag(a.diag, a.off, res)
        res = b - (a @ phi)
        if np.max(np.abs(res)) > tol():
            raise ToleranceError(
                f"helmholtz residual {np.max(np.abs(res)):.3e} exceeds "
                f"{_RESIDUAL_RTOL:.0e} * ||rhs|| plus the evaluation floor")
    return phi


def _full_nodal(mesh: Mesh1D, u: np.ndarray) -> np.ndarray:
    full = np.zeros(mesh.M + 1, dtype=np.result_type(u, np.float64))
    full[1:-1] = u
    return full


def prolong(coarse_mesh: Mesh1D, coarse: np.ndarray, fine_mesh: Mesh1D) -> np.ndarray:
    """P1 interpolation of interior coarse values onto the fine interior nodes."""
    if fine_mesh.M % coarse_mesh.M != 0:
        raise MeshMismatchError(
            f"fine M = {fine_mesh.M} is not a multiple of coarse M = {coarse_mesh.M}")
    xc = np.arange(coarse_mesh.M + 1) / coarse_mesh.M
    uc = _full_nodal(coarse_mesh, np.asarray(coarse))
    xf = fine_mesh.interior_nodes
    if np.iscomplexobj(uc):
        return np.interp(xf, xc, uc.real) + 1j * np.interp(xf, xc, uc.imag)
    return np.interp(xf, xc, uc)


def _p1_norms(mesh: Mesh1D, full: np.ndarray) -> tuple[float, float]:
    a, b = full[:-1], full[1:]
    h = mesh.h
    l2sq = h / 3.0 * float(np.sum(np.abs(a) ** 2 + np.abs(b) ** 2
                                  + (a * np.conj(b)).real))
    h1sq = float(np.sum(np.abs(b - a) ** 2)) / h
    return math.sqrt(max(l2sq, 0.0)), math.sqrt(max(h1sq, 0.0))


def error_norms(fine_mesh: Mesh1D, fine: np.ndarray,
                coarse_mesh: Mesh1D, coarse: np.ndarray) -> tuple[float, float]:
    """Exact L2 and H1-seminorm of the P1 difference, coarse prolonged to fine."""
    d = _full_nodal(fine_mesh, np.asarray(fine))
    d[1:-1] -= prolong(coarse_mesh, coarse, fine_mesh)
    return _p1_norms(fine_mesh, d)


def fe_l2_norm(mesh: Mesh1D, u: np.ndarray) -> float:
    """Exact L2 norm of the P1 function with interior values u and zero trace."""
    return _p1_norms(mesh, _full_nodal(mesh, np.asarray(u)))[0]


def fe_h1_seminorm(mesh: Mesh1D, u: np.ndarray) -> float:
    return _p1_norms(mesh, _full_nodal(mesh, np.asarray(u)))[1]


def data_l2_norm(v: InitialData) -> float:
    """||v||_L2(0,1) by quadrature (graded toward 0 for singular data)."""
    sq = lambda x: np.abs(v.fn(x)) ** 2
    edges = sorted({0.0, 1.0, *v.breakpoints})
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if v.singular_origin and a == 0.0:
            # geometric panels down to (b-a)*2**-60, tail dropped
            width = b - a
            for k in range(60):
                hi = a + width * 0.5 ** k
                lo = a + width * 0.5 ** (k + 1)
                x = lo + (hi - lo) * _GX8
                total += (hi - lo) * float(np.dot(_GW8, sq(x)))
        else:
            for lo in np.linspace(a, b, 65)[:-1]:
                hi = lo + (b - a) / 64.0
                x = lo + (hi - lo) * _GX8
                total += (hi - lo) * float(np.dot(_GW8, sq(x)))
    if not np.isfinite(total):
        raise QuadratureError("norm integration produced non-finite value")
    return math.sqrt(total)
