"""Rate reports, fitting helpers, and the CSV emission format.

CSV layout: '#'-prefixed metadata lines, then the header
``param,error_l2,error_h1,rate``, one row per experiment cell.  All floats
are printed with fixed formats so identical configurations produce
byte-identical output.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateFitError, DomainError

__all__ = [
    "RateRow",
    "RateReport",
    "DecayFit",
    "successive_rates",
    "fit_exponential_rate",
    "fit_reciprocal_log",
    "linear_fit_r2",
]

CSV_HEADER = "param,error_l2,error_h1,rate"


@dataclass(frozen=True)
class RateRow:
    param: float
    error_l2: float
    error_h1: Optional[float] = None
    rate: Optional[float] = None


@dataclass
class RateReport:
    """Rows of (parameter, errors) plus the fitted and theoretical rates."""

    scheme: str
    metadata: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    fitted_rate: Optional[float] = None
    theoretical_rate: Optional[float] = None

    @property
    def errors_l2(self) -> np.ndarray:
        return np.array([r.error_l2 for r in self.rows])

    @property
    def params(self) -> np.ndarray:
        return np.array([r.param for r in self.rows])

    def write_csv(self, stream) -> None:
        stream.write(f"# scheme = {self.scheme}\n")
        for key in sorted(self.metadata):
            stream.write(f"# {key} = {self.metadata[key]}\n")
        if self.fitted_rate is not None:
            stream.write(f"# fitted_rate = {self.fitted_rate:.4f}\n")
        if self.theoretical_rate is not None:
            stream.write(f"# theoretical_rate = {self.theoretical_rate:.4f}\n")
        stream.write(CSV_HEADER + "\n")
        for r in self.rows:
            h1 = "" if r.error_h1 is None else f"{r.error_h1:.6e}"
            rate = "" if r.rate is None else f"{r.rate:.4f}"
            stream.write(f"{r.param:.12g},{r.error_l2:.6e},{h1},{rate}\n")

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def successive_rates(params: Sequence[float], errors: Sequence[float]) -> list:
    """Per-pair algebraic rates r with error ~ param**(-r).

    For a halving study (param doubling) this is log2(e_i / e_{i+1}); for a
    shrinking-time study pass the times as params (error ~ t**r comes out
    with the conventional sign).
    """
    rates: list = [None]
    for i in range(1, len(errors)):
        num = math.log(errors[i - 1] / errors[i])
        den = math.log(params[i] / params[i - 1])
        rates.append(num / den if den != 0.0 else float("nan"))
    # time studies refine downward; flip so error ~ t**r reports r > 0
    if len(params) > 1 and params[1] < params[0]:
        rates = [None] + [-r for r in rates[1:]]
    return rates


def fit_exponential_rate(ns: Sequence[float], errors: Sequence[float],
                         floor: float = 1e-13) -> float:
    """Least-squares decay rate r in error ~ C*exp(-r*N).

    Points at or below ``floor`` sit in the roundoff plateau and are
    excluded from the fit.
    """
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if ns.size < 2:
        raise DomainError("cannot fit a slope from fewer than two points")
    keep = errors > floor
    if keep.sum() < 2:
        raise DomainError(
            f"fewer than two errors above the {floor:g} noise floor")
    slope = np.polyfit(ns[keep], np.log(errors[keep]), 1)[0]
    return float(-slope)


@dataclass(frozen=True)
class DecayFit:
    """Fit of norms ~ C / (log10 t - k0); rejected means no decay is present."""

    C: float
    k0: float
    max_rel_residual: float
    rejected: bool


def fit_reciprocal_log(ks: Sequence[float], norms: Sequence[float]) -> DecayFit:
    """Fit 1/norm as an affine function of k = log10(t).

    The model norm = C/(k - k0) captures logarithmic decay with the constant
    offset the finite-time data carries.  Non-decaying input (nonpositive
    fitted slope) is rejected with an infinite residual.
    """
    ks = np.asarray(ks, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if ks.size < 3:
        raise DegenerateFitError("decay fit needs at least 3 points")
    if np.any(norms <= 0.0):
        raise DegenerateFitError("decay fit needs positive norms")
    slope, intercept = np.polyfit(ks, 1.0 / norms, 1)
    if slope <= 0.0:
        return DecayFit(C=float("nan"), k0=float("nan"),
                        max_rel_residual=float("inf"), rejected=True)
    C = 1.0 / slope
    k0 = -intercept / slope
    fitted = C / (ks - k0)
    resid = float(np.max(np.abs(fitted - norms) / norms))
    return DecayFit(C=float(C), k0=float(k0), max_rel_residual=resid,
                    rejected=False)


def linear_fit_r2(x: Sequence[float], y: Sequence[float]) -> tuple:
    """Least-squares line and its coefficient of determination."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise DomainError("cannot fit a line from fewer than two points")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0.0 else 0.0
    return float(slope), float(intercept), r2
