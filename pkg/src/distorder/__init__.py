"""Solvers for the distributed-order time-fractional diffusion equation on (0, 1).

Two fully discrete schemes on top of a P1 Galerkin semidiscretisation:

- ``laplace``: quadrature of the inverse Laplace transform on a hyperbolic
  contour (exponentially convergent in the node count, uniform in time);
- ``cq``: backward-Euler convolution quadrature (first order in the step).

``kernel`` evaluates the distributed-order symbol w(z), ``harness`` runs the
convergence and asymptotic-decay studies, and ``cli`` maps them to the
``distorder`` command.
"""

from .cq import CqWeights, TimeGrid, cq_convergence, step_scheme, weights_fft
from .errors import (
    BranchError,
    ContourOverflowError,
    DegenerateFitError,
    DistorderError,
    DomainError,
    KernelBoundError,
    MeshMismatchError,
    NotApplicableError,
    QuadratureError,
    SingularMatrixError,
    ToleranceError,
    WeightGridMismatchError,
)
from .fem1d import (
    FemSystem,
    InitialData,
    Mesh1D,
    data_l2_norm,
    error_norms,
    fe_l2_norm,
    l2_project,
    project_initial,
    ritz_project,
    solve_helmholtz,
)
from .harness import (
    ExperimentSpec,
    Scheme,
    decay_fit,
    decay_report,
    fig2_sharpness_study,
    laplace_study,
    small_time_study,
    spatial_study,
)
from .kernel import (
    AlphaQuadrature,
    KernelEval,
    WeightFunction,
    eval_w,
    eval_zw,
    kernel_bound_check,
)
from .laplace import ContourPlan, build_plan, decay_study, solve_contour
from .report import RateReport, RateRow

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AlphaQuadrature", "BranchError", "ContourOverflowError", "ContourPlan",
    "CqWeights", "DegenerateFitError", "DistorderError", "DomainError",
    "ExperimentSpec", "FemSystem", "InitialData", "KernelBoundError",
    "KernelEval", "Mesh1D", "MeshMismatchError", "NotApplicableError",
    "QuadratureError", "RateReport", "RateRow", "Scheme",
    "SingularMatrixError", "TimeGrid", "ToleranceError",
    "WeightFunction", "WeightGridMismatchError",
    "build_plan", "cq_convergence", "data_l2_norm", "decay_fit",
    "decay_report", "decay_study", "error_norms", "eval_w", "eval_zw",
    "fe_l2_norm", "fig2_sharpness_study", "kernel_bound_check",
    "l2_project", "laplace_study", "project_initial", "ritz_project",
    "small_time_study", "solve_contour", "solve_helmholtz", "spatial_study",
    "step_scheme", "weights_fft",
]
