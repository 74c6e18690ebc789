"""Command-line front end.

Examples::

    vimode solve --problem linear1 --grid 100 --tol 1e-5 --max-iters 5
    vimode solve --f "1-x^2" --x0 0 --exact "(1-exp(-2*t))/(1+exp(-2*t))"
    vimode solve-system --f x2 --f "-x1" --x0 0 --x0 1 --grid 201 --tol 1e-6 --max-iters 25
    vimode compare --problem riccati1 --out-json report.json
    vimode bound --L 2 --T 1 --dim 1 --e0 1 --n 0..10
    vimode list-builtins

Exit status is 0 when the iteration converged, 2 when it stopped at
``--max-iters`` without converging and 1 on any usage, parse or
evaluation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .bounds import BoundInput, contraction_constant, error_bound
from .expr import ExpressionError, depends_on, eval_expression, parse_expression, to_string
from .grid import GridFunction, mixed_norm
from .oracle import BUILTINS, builtin, rk4_solve
from .vim_scalar import ScalarIvp, SolveConfig, SolverError, vim_solve_scalar
from .vim_system import SystemIvp, vim_solve_system

EXIT_CONVERGED = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2

COMMANDS = ("solve", "solve-system", "bound", "compare", "list-builtins")


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    problem: Optional[str] = None
    f: list = field(default_factory=list)
    df: list = field(default_factory=list)
    x0: list = field(default_factory=list)
    t0: float = 0.0
    tf: float = 1.0
    exact: list = field(default_factory=list)
    config: SolveConfig = field(default_factory=SolveConfig)
    out_csv: Optional[str] = None
    out_json: Optional[str] = None
    precision: int = 17
    # bound command
    L: Optional[float] = None
    T: Optional[float] = None
    dim: int = 1
    e0: float = 1.0
    n: list = field(default_factory=list)

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not 6 <= self.precision <= 17:
            raise UsageError("--precision must lie in [6, 17]")
        if self.command in ("solve", "solve-system", "compare"):
            if (self.problem is None) == (not self.f):
                raise UsageError("give exactly one problem source: --problem or --f")
            if self.problem is not None and (self.x0 or self.df):
                raise UsageError("--x0/--df cannot be combined with --problem")
            if self.f and len(self.x0) != len(self.f):
                raise UsageError(f"need one --x0 per --f ({len(self.f)} given, {len(self.x0)} --x0)")
            if self.df and len(self.df) != len(self.f):
                raise UsageError("need one --df per --f")
        if self.command == "bound":
            if self.L is None or self.T is None:
                raise UsageError("bound needs --L and --T")
            if not self.n:
                raise UsageError("bound needs at least one --n")


# ---------------------------------------------------------------------------
# Formatting helpers
# ---------------------------------------------------------------------------


def _fmt(value: float, precision: int) -> str:
    return f"{value:.{precision}g}"


def _round(value: float, precision: int) -> float:
    value = float(value)
    if precision == 17 or not np.isfinite(value):
        return value
    return float(_fmt(value, precision))


def write_csv(path: str, components: Sequence[GridFunction], precision: int = 17):
    """Header ``t,u`` (one component) or ``t,u1,...,ud``; one row per node."""
    if len(components) == 1:
        header = "t,u"
    else:
        header = "t," + ",".join(f"u{k + 1}" for k in range(len(components)))
    nodes = components[0].grid.nodes
    lines = [header]
    for j, tj in enumerate(nodes):
        row = [tj] + [u.values[j] for u in components]
        lines.append(",".join(_fmt(v, precision) for v in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_csv(path: str) -> tuple[list, np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [[float(v) for v in line.strip().split(",")] for line in fh if line.strip()]
    return header, np.array(rows)


def write_json(path: str, report: dict):
    with open(path, "w", newline="\n") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Problem construction
# ---------------------------------------------------------------------------


@dataclass
class _Resolved:
    problem: object
    description: dict
    exact: Optional[object]  # callable t -> (d, N) array


def _exact_from_expressions(sources: Sequence[str], dimension: int):
    nodes = [parse_expression(src, dimension) for src in sources]
    for src, e in zip(sources, nodes):
        if any(depends_on(e, k) for k in range(1, dimension + 1)):
            raise UsageError(f"--exact {src!r} must depend on t only")

    def exact(t):
        return np.vstack([
            np.broadcast_to(np.asarray(eval_expression(e, t, ()), dtype=float), t.shape)
            for e in nodes
        ])

    return exact


def _resolve(manifest: RunManifest, system: bool) -> _Resolved:
    if manifest.problem is not None:
        b = builtin(manifest.problem)
        problem = b.problem
        if system and isinstance(problem, ScalarIvp):
            problem = SystemIvp.from_scalar(problem)
        elif not system and not isinstance(problem, ScalarIvp):
            raise UsageError(f"{b.name} is a system; use solve-system")
        exact = b.exact
        if manifest.exact:
            exact = _exact_from_expressions(manifest.exact, problem.dimension)
        description = {"name": b.name}
    else:
        if system:
            problem = SystemIvp.from_strings(
                manifest.f, manifest.x0, manifest.t0, manifest.tf, manifest.df or None
            )
        else:
            if len(manifest.f) != 1:
                raise UsageError("solve takes a single --f; use solve-system for systems")
            problem = ScalarIvp.from_strings(
                manifest.f[0], manifest.x0[0], manifest.t0, manifest.tf,
                manifest.df[0] if manifest.df else None,
            )
        exact = _exact_from_expressions(manifest.exact, problem.dimension) if manifest.exact else None
        description = {"name": None}
    if manifest.exact and len(manifest.exact) != problem.dimension:
        raise UsageError(f"need {problem.dimension} --exact expressions")
    description.update(
        f=[to_string(e) for e in problem.rhs],
        df=[to_string(e) for e in problem.diagonal],
        x0=[float(v) for v in problem.initial],
        t0=problem.t0,
        tf=problem.tf,
    )
    return _Resolved(problem, description, exact)


def _max_error(components: Sequence[GridFunction], reference: Sequence[GridFunction]) -> float:
    return mixed_norm([u - r for u, r in zip(components, reference)])


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _solve(manifest: RunManifest, out, system: bool, compare: bool) -> int:
    resolved = _resolve(manifest, system)
    problem = resolved.problem
    config = manifest.config
    p = manifest.precision
    if system:
        report = vim_solve_system(problem, config)
        solution = report.solution
        iterates = report.iterates
    else:
        report = vim_solve_scalar(problem, config)
        solution = [report.solution]
        iterates = None if report.iterates is None else [[u] for u in report.iterates]
    grid = solution[0].grid

    result = {
        "command": manifest.command,
        "problem": resolved.description,
        "config": {"n_points": config.n_points, "tol": config.tol, "max_iters": config.max_iters},
        "iterations": report.iterations,
        "converged": report.converged,
        "residual_history": [_round(r, p) for r in report.residual_history],
    }
    exact_on_grid = None
    if resolved.exact is not None:
        values = np.atleast_2d(resolved.exact(grid.nodes))
        exact_on_grid = [GridFunction(grid, row) for row in values]
        result["max_error_vs_exact"] = _round(_max_error(solution, exact_on_grid), p)
    if compare:
        fine = rk4_solve(problem, 10 * (grid.n_points - 1) + 1)
        sampled = [GridFunction(grid, u.values[::10]) for u in fine]
        result["max_error_vs_rk4"] = _round(_max_error(solution, sampled), p)
    if iterates is not None:
        result["iterates"] = [
            [[_round(v, p) for v in u.values] for u in step] for step in iterates
        ]
        if exact_on_grid is not None:
            result["iterate_errors_vs_exact"] = [
                _round(_max_error(step, exact_on_grid), p) for step in iterates
            ]

    if manifest.out_csv:
        write_csv(manifest.out_csv, solution, p)
    if manifest.out_json:
        write_json(manifest.out_json, result)

    status = "converged" if report.converged else "NOT converged"
    print(f"{status} after {report.iterations} iteration(s) on {grid.n_points} nodes", file=out)
    print("residuals: " + ", ".join(f"{r:.3e}" for r in report.residual_history), file=out)
    for key in ("max_error_vs_exact", "max_error_vs_rk4"):
        if key in result:
            print(f"{key.replace('_', ' ')}: {result[key]:.6e}", file=out)
    return EXIT_CONVERGED if report.converged else EXIT_NOT_CONVERGED


def _bound(manifest: RunManifest, out) -> int:
    try:
        values = [
            error_bound(BoundInput(manifest.L, manifest.T, manifest.dim, manifest.e0, n))
            for n in manifest.n
        ]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    p = manifest.precision
    m = contraction_constant(manifest.L, manifest.T, manifest.dim)
    result = {
        "command": "bound",
        "input": {"L": manifest.L, "T": manifest.T, "dim": manifest.dim, "e0": manifest.e0},
        "M": _round(m, p),
        "n_values": list(manifest.n),
        "bound_values": [_round(v, p) for v in values],
    }
    print(f"M = {_fmt(m, p)}", file=out)
    for n, v in zip(manifest.n, values):
        print(f"n={n} bound={_fmt(v, p)}", file=out)
    if manifest.out_json:
        write_json(manifest.out_json, result)
    return EXIT_CONVERGED


def _list_builtins(out) -> int:
    for name in sorted(BUILTINS):
        b = BUILTINS[name]
        print(f"{name}: {b.description}; {b.source}", file=out)
    return EXIT_CONVERGED


def run(manifest: RunManifest, out=None) -> int:
    """Execute ``manifest`` and return the process exit status.

    Errors are not caught here; :func:`main` turns them into a one-line
    diagnostic and exit status 1.
    """
    out = sys.stdout if out is None else out
    manifest.validate()
    if manifest.command == "list-builtins":
        return _list_builtins(out)
    if manifest.command == "bound":
        return _bound(manifest, out)
    return _solve(
        manifest, out,
        system=manifest.command in ("solve-system", "compare"),
        compare=manifest.command == "compare",
    )


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _n_values(text: str) -> list:
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise argparse.ArgumentTypeError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    return [int(text)]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vimode", description="Variational iteration method ODE solver")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def solver_args(p, system):
        src = p.add_argument_group("problem")
        src.add_argument("--problem", help="builtin problem name")
        src.add_argument("--f", action="append", default=[],
                         help="right-hand side" + (" (repeat per component)" if system else ""))
        src.add_argument("--df", action="append", default=[],
                         help="override for the diagonal partial derivative")
        src.add_argument("--x0", action="append", type=float, default=[])
        src.add_argument("--t0", type=float, default=0.0)
        src.add_argument("--tf", type=float, default=1.0)
        src.add_argument("--exact", action="append", default=[],
                         help="closed-form solution in t for error reporting")
        cfg = p.add_argument_group("iteration")
        cfg.add_argument("--grid", type=int, default=100, help="number of grid points")
        cfg.add_argument("--tol", type=float, default=1e-5)
        cfg.add_argument("--max-iters", type=int, default=5)
        cfg.add_argument("--keep-iterates", action="store_true")
        outp = p.add_argument_group("output")
        outp.add_argument("--out-csv")
        outp.add_argument("--out-json")
        outp.add_argument("--precision", type=int, default=17)

    solver_args(sub.add_parser("solve", help="solve a scalar problem"), False)
    solver_args(sub.add_parser("solve-system", help="solve a first-order system"), True)
    solver_args(sub.add_parser("compare", help="solve and compare against RK4"), True)

    b = sub.add_parser("bound", help="evaluate the factorial error bound")
    b.add_argument("--L", type=float, required=True)
    b.add_argument("--T", type=float, required=True)
    b.add_argument("--dim", type=int, default=1)
    b.add_argument("--e0", type=float, default=1.0)
    b.add_argument("--n", action="append", type=_n_values, required=True,
                   help="iteration index or range n0..n1 (repeatable)")
    b.add_argument("--out-json")
    b.add_argument("--precision", type=int, default=17)

    sub.add_parser("list-builtins", help="list the builtin problems")
    return parser


def manifest_from_args(args: argparse.Namespace) -> RunManifest:
    if args.command == "list-builtins":
        return RunManifest("list-builtins")
    if args.command == "bound":
        return RunManifest(
            "bound", L=args.L, T=args.T, dim=args.dim, e0=args.e0,
            n=[n for group in args.n for n in group],
            out_json=args.out_json, precision=args.precision,
        )
    try:
        config = SolveConfig(args.grid, args.tol, args.max_iters, args.keep_iterates)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return RunManifest(
        args.command, problem=args.problem, f=args.f, df=args.df, x0=args.x0,
        t0=args.t0, tf=args.tf, exact=args.exact, config=config,
        out_csv=args.out_csv, out_json=args.out_json, precision=args.precision,
    )


_EXPRESSION_FLAGS = ("--f", "--df", "--exact")


def _glue_expression_values(argv: Sequence[str]) -> list:
    # "--f -x1" would otherwise read "-x1" as an option
    out = []
    it = iter(argv)
    for arg in it:
        if arg in _EXPRESSION_FLAGS:
            value = next(it, None)
            out.append(arg if value is None else f"{arg}={value}")
        else:
            out.append(arg)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(_glue_expression_values(argv))
        return run(manifest_from_args(args))
    except (UsageError, ExpressionError, SolverError, KeyError, ValueError, OSError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"vimode: error: {message}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
