"""Laplace-domain symbol of the distributed-order derivative.

The time-fractional operator with weight density ``mu`` on [0, 1] has the
Laplace symbol

    w(z) = integral_0^1 z**(alpha - 1) * mu(alpha) d(alpha),

evaluated here with a composite Gauss-Legendre rule split at the points
where ``mu`` is non-smooth.  The integrand is entire in alpha, so the rule
converges super-algebraically in the panel order.

The module also exposes numerically checkable forms of the structural
inequalities the solvers rely on: z*w(z) stays inside a sector of
half-angle < pi, |w(z)| <= sup|mu| * (|z|-1)/(|z| log|z|), and
|z*w(z)| <= |z|*w(|z|).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import DomainError, KernelBoundError

__all__ = [
    "WeightKind",
    "WeightFunction",
    "WeightHypothesisWarning",
    "AlphaQuadrature",
    "KernelEval",
    "KernelBoundReport",
    "eval_w",
    "eval_zw",
    "symbol_values",
    "kernel_bound_check",
    "upper_envelope",
]


class WeightHypothesisWarning(UserWarning):
    """The weight violates mu(0)*mu(1) > 0; the sector/lower-bound guarantees
    are not covered by theory, though they hold empirically for the presets."""


class WeightKind(Enum):
    POLY_HALF_SQUARED = "poly-half"
    INDICATOR_HALF_ONE = "indicator"
    CONSTANT = "const"
    TABULATED = "table"


@dataclass(frozen=True)
class WeightFunction:
    """Nonnegative weight density mu(alpha) on [0, 1].

    ``breakpoints`` lists the interior alpha values where mu is not smooth;
    quadrature panels never straddle them.  ``sup_norm`` is the C[0,1] norm,
    fixed at construction.
    """

    kind: WeightKind
    breakpoints: tuple[float, ...]
    sup_norm: float
    fn: Callable[[np.ndarray], np.ndarray]

    def __post_init__(self) -> None:
        pts = self.breakpoints
        if any(not (0.0 <= b <= 1.0) for b in pts):
            raise DomainError("breakpoints must lie in [0, 1]")
        if any(pts[i] >= pts[i + 1] for i in range(len(pts) - 1)):
            raise DomainError("breakpoints must be strictly increasing")
        if self.sup_norm < 0.0:
            raise DomainError("sup_norm must be nonnegative")

    def __call__(self, alpha):
        return self.fn(np.asarray(alpha, dtype=float))

    @classmethod
    def poly_half_squared(cls) -> "WeightFunction":
        """mu(alpha) = (alpha - 1/2)**2."""
        return cls(WeightKind.POLY_HALF_SQUARED, (), 0.25,
                   lambda a: (a - 0.5) ** 2)

    @classmethod
    def indicator_half_one(cls) -> "WeightFunction":
        """mu = 1 on [1/2, 1], 0 on [0, 1/2).

        Violates the mu(0) > 0 hypothesis of the sector/lower-bound lemmas;
        admitted because the reference experiments use it.
        """
        warnings.warn(
            "indicator weight has mu(0) = 0; sector and lower-bound "
            "guarantees are empirical only for this weight",
            WeightHypothesisWarning, stacklevel=2)
        return cls(WeightKind.INDICATOR_HALF_ONE, (0.5,), 1.0,
                   lambda a: np.where(a >= 0.5, 1.0, 0.0))

    @classmethod
    def constant(cls) -> "WeightFunction":
        """mu(alpha) = 1."""
        return cls(WeightKind.CONSTANT, (), 1.0, lambda a: np.ones_like(a))

    @classmethod
    def tabulated(cls, alphas, values) -> "WeightFunction":
        """Piecewise-linear interpolant of sorted (alpha, mu) pairs.

        The table must cover both endpoints 0 and 1 and be nonnegative.
        """
        a = np.asarray(alphas, dtype=float)
        v = np.asarray(values, dtype=float)
        if a.ndim != 1 or a.shape != v.shape or a.size < 2:
            raise DomainError("tabulated weight needs matching 1-d alpha/value arrays")
        if a[0] != 0.0 or a[-1] != 1.0:
            raise DomainError("tabulated weight must include endpoints alpha=0 and alpha=1")
        if np.any(np.diff(a) <= 0.0):
            raise DomainError("tabulated alphas must be strictly increasing")
        if np.any(v < 0.0):
            raise DomainError("tabulated weight values must be nonnegative")
        if not np.any(v > 0.0):
            raise DomainError("weight function must be nonzero")
        if v[0] == 0.0 or v[-1] == 0.0:
            warnings.warn(
                "tabulated weight vanishes at an endpoint; sector and "
                "lower-bound guarantees are empirical only",
                WeightHypothesisWarning, stacklevel=2)
        ac, vc = a.copy(), v.copy()
        return cls(WeightKind.TABULATED, tuple(ac[1:-1]), float(vc.max()),
                   lambda x: np.interp(x, ac, vc))


@dataclass(frozen=True)
class AlphaQuadrature:
    """Composite Gauss-Legendre rule on [0, 1] for the alpha integral."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def __post_init__(self) -> None:
        if self.order < 1:
            raise DomainError("quadrature order must be >= 1")
        total = float(np.sum(self.weights))
        if abs(total - 1.0) > 1e-14:
            raise DomainError(f"quadrature weights sum to {total!r}, expected 1")

    @classmethod
    def for_weight(cls, mu: WeightFunction, order: int = 32) -> "AlphaQuadrature":
        """Panels split at mu's breakpoints; a smooth mu gets two equal panels."""
        if order < 1:
            raise DomainError("quadrature order must be >= 1")
        edges = [0.0, *mu.breakpoints, 1.0]
        if len(edges) == 2:
            edges = [0.0, 0.5, 1.0]
        x, w = np.polynomial.legendre.leggauss(order)
        nodes, weights = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            half = 0.5 * (b - a)
            nodes.append(a + half * (x + 1.0))
            weights.append(half * w)
        return cls(np.concatenate(nodes), np.concatenate(weights), order)


@dataclass(frozen=True)
class KernelEval:
    """Symbol values at a single point: w = w(z) and zw = z*w(z)."""

    z: complex
    w: complex
    zw: complex


def _check_off_cut(z: np.ndarray) -> None:
    zf = np.atleast_1d(z)
    bad = (zf == 0) | ((zf.imag == 0.0) & (zf.real < 0.0))
    if np.any(bad):
        raise DomainError(
            f"z = {zf[bad][0]} lies at the origin or on the negative real axis")


def symbol_values(mu: WeightFunction, quad: AlphaQuadrature, z) -> np.ndarray:
    """Vectorised w(z) over an array of complex points off the branch cut."""
    z = np.asarray(z, dtype=complex)
    _check_off_cut(z)
    coeff = quad.weights * mu(quad.nodes)
    # w(z) = sum_q coeff_q * exp((alpha_q - 1) * Log z), principal log
    return np.exp(np.multiply.outer(np.log(z), quad.nodes - 1.0)) @ coeff


def eval_w(mu: WeightFunction, quad: AlphaQuadrature, z: complex) -> KernelEval:
    """Evaluate the symbol at one point.

    Raises DomainError for z = 0 or z on the negative real axis; everywhere
    else the principal branch of z**(alpha-1) is integrated against mu.
    """
    zc = complex(z)
    w = complex(symbol_values(mu, quad, zc))
    return KernelEval(z=zc, w=w, zw=zc * w)


def eval_zw(mu: WeightFunction, quad: AlphaQuadrature, z: complex) -> complex:
    """z * w(z), the symbol entering the resolvent (z w(z) I + A)^-1."""
    return eval_w(mu, quad, z).zw


def upper_envelope(r) -> np.ndarray:
    """(r - 1)/(r log r), extended by continuity to 1 at r = 1.

    Multiplied by sup|mu| this bounds |w(z)| for |z| = r.
    """
    r = np.asarray(r, dtype=float)
    d = r - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(d == 0.0, 1.0, d / np.log1p(np.where(d == 0.0, 1.0, d)))
    return ratio / r


@dataclass(frozen=True)
class KernelBoundReport:
    """Outcome of checking the kernel inequalities on a sample set."""

    n_samples: int
    min_comparison_ratio: float
    max_envelope_ratio: float


# multiplicative slack for inequalities that are exact in real arithmetic
_ROUNDING_SLACK = 1e-12


def kernel_bound_check(mu: WeightFunction, quad: AlphaQuadrature,
                       samples) -> KernelBoundReport:
    """Verify the upper bound and the two-sided comparison on every sample.

    Checks, for each z, that |w(z)| <= sup|mu| * (|z|-1)/(|z| log|z|) and
    that |z w(z)| <= |z| w(|z|); raises KernelBoundError naming the first
    violating sample.  Returns the observed minimum of
    |z w(z)| / (|z| w(|z|)), the empirical counterpart of the lower-bound
    constant, which the theory guarantees positive but does not pin down.
    """
    z = np.asarray(samples, dtype=complex).ravel()
    if z.size == 0:
        raise DomainError("empty sample set")
    w = symbol_values(mu, quad, z)
    r = np.abs(z)
    w_abs = symbol_values(mu, quad, r.astype(complex)).real

    envelope = mu.sup_norm * upper_envelope(r)
    env_ratio = np.abs(w) / envelope
    bad = env_ratio > 1.0 + _ROUNDING_SLACK
    if np.any(bad):
        i = int(np.argmax(bad))
        raise KernelBoundError(
            f"|w(z)| exceeds the envelope at z = {z[i]}: "
            f"|w| = {abs(w[i]):.6e}, bound = {envelope[i]:.6e}")

    zw_abs = r * np.abs(w)
    majorant = r * w_abs
    comp_ratio = zw_abs / majorant
    bad = comp_ratio > 1.0 + _ROUNDING_SLACK
    if np.any(bad):
        i = int(np.argmax(bad))
        raise KernelBoundError(
            f"|z w(z)| exceeds |z| w(|z|) at z = {z[i]}: "
            f"{zw_abs[i]:.6e} > {majorant[i]:.6e}")

    return KernelBoundReport(
        n_samples=int(z.size),
        min_comparison_ratio=float(comp_ratio.min()),
        max_envelope_ratio=float(env_ratio.max()),
    )
