"""Compare the factorial a-priori bound with the observed errors.

The bound (MT)^n/n! e0 first grows while n < MT and then collapses.
For the Riccati problem the Lipschitz constant is sampled around the
converged trajectory.
"""

from vimode import (BoundInput, SolveConfig, builtin, contraction_constant, error_bound,
                    norm_inf, sample_lipschitz, vim_solve_scalar)

problem = builtin("riccati1")
report = vim_solve_scalar(problem.problem, SolveConfig(100, 1e-5, 5, keep_iterates=True))
grid = report.solution.grid
exact = problem.exact_on(grid)[0]
L = sample_lipschitz(problem.problem, report.solution, padding=0.1)
e0 = norm_inf(report.iterates[0] - exact)
print(f"L = {L:.3f}, M = {contraction_constant(L, grid.T, 1):.3f}, e0 = {e0:.3f}")
for n, u in enumerate(report.iterates):
    bound = error_bound(BoundInput(L, grid.T, 1, e0, n))
    print(f"n={n}: observed {norm_inf(u - exact):.3e}  bound {bound:.3e}")
for n in (10, 20, 40, 80):
    print(f"n={n}: bound {error_bound(BoundInput(L, grid.T, 1, e0, n)):.3e}")
