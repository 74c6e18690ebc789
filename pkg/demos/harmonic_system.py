"""The harmonic oscillator x1' = x2, x2' = -x1 as a two-component system.

The diagonal derivatives are zero, so the multiplier is -1 and every
pass is a trapezoidal Picard step.  The result is checked against a
fixed-step RK4 reference on the same nodes.
"""

from vimode import SolveConfig, builtin, norm_inf, rk4_solve, vim_solve_system

problem = builtin("harmonic")
report = vim_solve_system(problem.problem, SolveConfig(201, 1e-6, 25))
exact = problem.exact_on(report.solution[0].grid)
reference = rk4_solve(problem.problem, 201)

print(f"{report.iterations} iterations, converged: {report.converged}")
for k, (u, e, r) in enumerate(zip(report.solution, exact, reference), start=1):
    print(f"x{k}: error vs exact {norm_inf(u - e):.3e}, vs RK4 {norm_inf(u - r):.3e}")
