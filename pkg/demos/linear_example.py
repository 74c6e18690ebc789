"""Solve x' = 2x + t, x(0) = 0 on [0, 1] and watch the iterates settle.

The exact solution is (exp(2t) - 2t - 1)/4.  Each pass of the iteration
is printed with its residual and its distance to the exact solution.
"""

from vimode import SolveConfig, builtin, norm_inf, vim_solve_scalar

problem = builtin("linear1")
report = vim_solve_scalar(problem.problem, SolveConfig(100, 1e-5, 5, keep_iterates=True))
grid = report.solution.grid
exact = problem.exact_on(grid)[0]

print(f"f = {problem.problem.f}, h = {grid.h:.4g}")
for n, u in enumerate(report.iterates):
    residual = report.residual_history[n - 1] if n else float("nan")
    print(f"u_{n}: residual {residual:.3e}  error vs exact {norm_inf(u - exact):.3e}")
print("converged" if report.converged else "not converged", "after", report.iterations)
