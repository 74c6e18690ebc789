"""A Riccati equation, x' = 1 - x^2, whose solution is tanh(t).

The multiplier is rebuilt from -2u at every pass, so the scheme adapts
to the nonlinearity.  The same right-hand side with a plus sign follows
tan(t) instead; both are shown.
"""

import numpy as np

from vimode import ScalarIvp, SolveConfig, vim_solve_scalar

config = SolveConfig(100, 1e-5, 5)
for source, exact in (("1-x^2", np.tanh), ("x^2+1", np.tan)):
    report = vim_solve_scalar(ScalarIvp.from_strings(source, 0.0), config)
    t = report.solution.grid.nodes
    error = np.max(np.abs(report.solution.values - exact(t)))
    print(f"x' = {source:6s} iterations {report.iterations}  "
          f"residuals {[f'{r:.1e}' for r in report.residual_history]}  error {error:.3e}")
