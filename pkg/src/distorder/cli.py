"""Command-line front end for the solvers and the rate studies.

Exit codes: 0 success, 2 flag/validation problem, 1 numerical failure.
Output is CSV on stdout (or --out): '#' metadata lines, a
``param,error_l2,error_h1,rate`` header, one row per cell; sweeps over
several data/times emit one block per combination.
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable, Optional, Sequence

import numpy as np

from . import harness
from .cq import TimeGrid, cq_convergence, step_scheme, weights_fft
from .errors import DistorderError, DomainError
from .fem1d import FemSystem, InitialData, l2_project
from .kernel import AlphaQuadrature, WeightFunction
from .laplace import build_plan, solve_contour

__all__ = ["main", "run", "build_parser"]

_MU_CHOICES = "poly-half|indicator|const|table:<path>"
_V_CHOICES = {"sin": InitialData.smooth_sin,
              "indicator": InitialData.indicator_half,
              "singular": InitialData.singular_pow}


class CliError(DomainError):
    """Flag-level validation failure (exit code 2)."""


def _parse_mu(text: str) -> WeightFunction:
    if text == "poly-half":
        return WeightFunction.poly_half_squared()
    if text == "indicator":
        return WeightFunction.indicator_half_one()
    if text == "const":
        return WeightFunction.constant()
    if text.startswith("table:"):
        return _load_weight_table(text[len("table:"):])
    raise CliError(f"--mu: expected one of {_MU_CHOICES}, got {text!r}")


def _load_weight_table(path: str) -> WeightFunction:
    """Two whitespace-separated columns (alpha, mu), sorted, endpoints 0 and 1."""
    alphas, values = [], []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split()
                if len(parts) != 2:
                    raise CliError(
                        f"--mu table {path}:{lineno}: expected two columns")
                alphas.append(float(parts[0]))
                values.append(float(parts[1]))
    except OSError as exc:
        raise CliError(f"--mu: cannot read weight table {path}: {exc}") from exc
    except ValueError as exc:
        raise CliError(f"--mu: bad number in weight table {path}: {exc}") from exc
    try:
        return WeightFunction.tabulated(alphas, values)
    except DomainError as exc:
        raise CliError(f"--mu: invalid weight table {path}: {exc}") from exc


def _parse_v(text: str) -> InitialData:
    try:
        return _V_CHOICES[text]()
    except KeyError:
        raise CliError(
            f"--v: expected one of {'|'.join(_V_CHOICES)}, got {text!r}") from None


def _float_list(text: str, flag: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x != ""]
    except ValueError as exc:
        raise CliError(f"{flag}: bad number in {text!r}: {exc}") from exc
    if not vals:
        raise CliError(f"{flag}: empty list")
    return vals


def _int_list(text: str, flag: str) -> list[int]:
    vals = _float_list(text, flag)
    out = []
    for x in vals:
        if x != int(x):
            raise CliError(f"{flag}: expected integers, got {x!r}")
        out.append(int(x))
    return out


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="distorder",
        description="Distributed-order time-fractional diffusion on (0,1): "
                    "solvers and convergence studies.")
    sub = top.add_subparsers(dest="subcommand", required=True)

    def common(p, *, mu=True, v=True):
        if mu:
            p.add_argument("--mu", required=True,
                           help=f"weight function: {_MU_CHOICES}")
        if v:
            p.add_argument("--v", required=True,
                           help="initial data: sin|indicator|singular "
                                "(comma list allowed on study commands)")
        p.add_argument("--quad-order", type=int, default=32,
                       help="Gauss order per alpha panel (default 32)")
        p.add_argument("--out", default=None,
                       help="output path (default stdout)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap for independent solves/cells")

    p = sub.add_parser("solve-laplace", help="contour solve at one time")
    common(p)
    p.add_argument("--t", required=True, help="target time")
    p.add_argument("--M", required=True, help="mesh subintervals")
    p.add_argument("--N", required=True, help="contour truncation index")

    p = sub.add_parser("solve-cq", help="convolution-quadrature march to T")
    common(p)
    p.add_argument("--T", required=True, help="final time")
    p.add_argument("--steps", required=True, help="number of time steps")
    p.add_argument("--M", required=True, help="mesh subintervals")

    p = sub.add_parser("spatial-rates", help="mesh-halving error study")
    common(p)
    p.add_argument("--t", required=True, help="time (comma list allowed)")
    p.add_argument("--M", required=True, help="comma list of mesh sizes")
    p.add_argument("--ref-mult", type=int, default=8,
                   help="reference mesh multiple (default 8)")
    p.add_argument("--N", default="10",
                   help="contour index for the time evaluation (default 10)")

    p = sub.add_parser("laplace-rates", help="contour-count error study")
    common(p)
    p.add_argument("--t", required=True, help="time (comma list allowed)")
    p.add_argument("--N", required=True, help="comma list of truncation indices")
    p.add_argument("--M", default="1000", help="mesh subintervals (default 1000)")

    p = sub.add_parser("cq-rates", help="time-step halving error study")
    common(p)
    p.add_argument("--t", required=True, help="time (comma list allowed)")
    p.add_argument("--N", required=True, help="comma list of step counts")
    p.add_argument("--M", default="10000", help="mesh subintervals (default 10000)")

    p = sub.add_parser("small-time", help="fixed-step error at shrinking times")
    common(p)
    p.add_argument("--t", required=True, help="comma list of times")
    p.add_argument("--steps", default="10", help="steps per time (default 10)")
    p.add_argument("--M", default="10000", help="mesh subintervals (default 10000)")
    p.add_argument("--fig2-taus", default=None,
                   help="emit the single-step ratio series for these step sizes "
                        "instead of the error table")

    p = sub.add_parser("decay", help="solution norms at large times + 1/log fit")
    common(p)
    p.add_argument("--t", required=True, help="comma list of (large) times")
    p.add_argument("--N", default="10", help="contour truncation index (default 10)")
    p.add_argument("--M", default="1000", help="mesh subintervals (default 1000)")
    return top


def _vector_csv(mesh, u, metadata: dict) -> str:
    lines = [f"# {k} = {v}" for k, v in sorted(metadata.items())]
    lines.append("x,u")
    for x, val in zip(mesh.interior_nodes, u):
        lines.append(f"{x:.12g},{val:.12e}")
    return "\n".join(lines) + "\n"


def _run_solve_laplace(args) -> str:
    mu = _parse_mu(args.mu)
    v = _parse_v(args.v)
    t = _float_list(args.t, "--t")
    m = _int_list(args.M, "--M")
    n = _int_list(args.N, "--N")
    if len(t) != 1 or len(m) != 1 or len(n) != 1:
        raise CliError("solve-laplace takes single --t/--M/--N values")
    quad = AlphaQuadrature.for_weight(mu, args.quad_order)
    sys_m = FemSystem.build(m[0])
    u = solve_contour(build_plan(n[0], t[0]), sys_m, mu, quad,
                      l2_project(sys_m, v), threads=args.threads)
    return _vector_csv(sys_m.mesh, u,
                       {"scheme": "solve-laplace", "mu": args.mu, "v": args.v,
                        "t": t[0], "M": m[0], "N": n[0]})


def _run_solve_cq(args) -> str:
    mu = _parse_mu(args.mu)
    v = _parse_v(args.v)
    tt = _float_list(args.T, "--T")
    steps = _int_list(args.steps, "--steps")
    m = _int_list(args.M, "--M")
    if len(tt) != 1 or len(steps) != 1 or len(m) != 1:
        raise CliError("solve-cq takes single --T/--steps/--M values")
    quad = AlphaQuadrature.for_weight(mu, args.quad_order)
    sys_m = FemSystem.build(m[0])
    grid = TimeGrid(tt[0], steps[0])
    w = weights_fft(mu, quad, grid.tau, steps[0])
    u = step_scheme(sys_m, w, grid, l2_project(sys_m, v))[-1]
    return _vector_csv(sys_m.mesh, u,
                       {"scheme": "solve-cq", "mu": args.mu, "v": args.v,
                        "T": tt[0], "steps": steps[0], "M": m[0]})


def _study_blocks(args, one_cell: Callable[[InitialData, float], "object"]) -> str:
    """Run one_cell over the --v/--t comma lists and concatenate the reports."""
    blocks = []
    for vname in args.v.split(","):
        v = _parse_v(vname)
        for t in _float_list(args.t, "--t"):
            blocks.append(one_cell(v, t).to_csv())
    return "".join(blocks)


def _run_spatial(args) -> str:
    mu = _parse_mu(args.mu)
    m_list = _int_list(args.M, "--M")
    n_contour = _int_list(args.N, "--N")
    if len(n_contour) != 1:
        raise CliError("spatial-rates takes a single --N")
    if args.ref_mult < 2:
        raise CliError("--ref-mult must be at least 2")
    return _study_blocks(args, lambda v, t: harness.spatial_study(
        mu, v, t, m_list, quad_order=args.quad_order,
        n_contour=n_contour[0], ref_mult=args.ref_mult,
        threads=args.threads))


def _run_laplace_rates(args) -> str:
    mu = _parse_mu(args.mu)
    n_list = _int_list(args.N, "--N")
    m = _int_list(args.M, "--M")
    if len(m) != 1:
        raise CliError("laplace-rates takes a single --M")
    return _study_blocks(args, lambda v, t: harness.laplace_study(
        mu, v, t, n_list, M=m[0], quad_order=args.quad_order,
        threads=args.threads))


def _run_cq_rates(args) -> str:
    mu = _parse_mu(args.mu)
    n_list = _int_list(args.N, "--N")
    m = _int_list(args.M, "--M")
    if len(m) != 1:
        raise CliError("cq-rates takes a single --M")
    quad = AlphaQuadrature.for_weight(mu, args.quad_order)
    sys_m = FemSystem.build(m[0])
    return _study_blocks(args, lambda v, t: cq_convergence(
        sys_m, mu, quad, v, t, n_list))


def _run_small_time(args) -> str:
    mu = _parse_mu(args.mu)
    steps = _int_list(args.steps, "--steps")
    m = _int_list(args.M, "--M")
    if len(steps) != 1 or len(m) != 1:
        raise CliError("small-time takes single --steps/--M values")
    if args.fig2_taus is not None:
        taus = _float_list(args.fig2_taus, "--fig2-taus")
        blocks = []
        for vname in args.v.split(","):
            v = _parse_v(vname)
            blocks.append(harness.fig2_sharpness_study(
                mu, v, taus, M=m[0], quad_order=args.quad_order).to_csv())
        return "".join(blocks)
    times = _float_list(args.t, "--t")
    blocks = []
    for vname in args.v.split(","):
        v = _parse_v(vname)
        blocks.append(harness.small_time_study(
            mu, v, times, n_steps=steps[0], M=m[0],
            quad_order=args.quad_order).to_csv())
    return "".join(blocks)


def _run_decay(args) -> str:
    mu = _parse_mu(args.mu)
    n = _int_list(args.N, "--N")
    m = _int_list(args.M, "--M")
    if len(n) != 1 or len(m) != 1:
        raise CliError("decay takes single --N/--M values")
    times = _float_list(args.t, "--t")
    blocks = []
    for vname in args.v.split(","):
        v = _parse_v(vname)
        blocks.append(harness.decay_report(
            mu, v, times, n[0], M=m[0], quad_order=args.quad_order).to_csv())
    return "".join(blocks)


_DISPATCH = {
    "solve-laplace": _run_solve_laplace,
    "solve-cq": _run_solve_cq,
    "spatial-rates": _run_spatial,
    "laplace-rates": _run_laplace_rates,
    "cq-rates": _run_cq_rates,
    "small-time": _run_small_time,
    "decay": _run_decay,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, execute the mapped experiment, write CSV; returns exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = _DISPATCH[args.subcommand](args)
    except CliError as exc:
        print(f"distorder: {exc}", file=sys.stderr)
        return 2
    except DistorderError as exc:
        print(f"distorder: numerical failure: {exc}", file=sys.stderr)
        return 1
    except np.linalg.LinAlgError as exc:
        print(f"distorder: numerical failure: {exc}", file=sys.stderr)
        return 1
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


def main() -> None:
    raise SystemExit(run())
