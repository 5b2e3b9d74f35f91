"""The adaptive Gauss-Kronrod integrator on integrals with known values.

Every result carries an error estimate; the point of this tour is that the
estimate is never smaller than the actual error, and that a divergent
integral is reported rather than silently returned.

    python3 demos/quadrature_tour.py
"""
import math

import numpy as np

from interaural.quadrature import (QuadratureConfig, integrate_breakpoints, integrate_finite,
                                   integrate_semi_infinite)

cases = [
    ("x^2 on [0, 1]", integrate_finite(lambda x: x * x, 0, 1), 1 / 3),
    ("x^-1/2 on [0, 1]", integrate_finite(lambda x: x ** -0.5, 0, 1), 2.0),
    ("log x on [0, 1]", integrate_finite(np.log, 0, 1), -1.0),
    ("e^-x on [0, inf)", integrate_semi_infinite(lambda x: np.exp(-x), 0), 1.0),
    ("e^-x^2 on R", integrate_breakpoints(lambda x: np.exp(-x * x), [-math.inf, 0, math.inf]),
     math.sqrt(math.pi)),
]
for name, res, true in cases:
    err = abs(res.value - true)
    print(f"{name:18s} value={res.value:.15f} est={res.abs_error_estimate:.1e} "
          f"true err={err:.1e} evals={res.evaluations} "
          f"{'ok' if err <= res.abs_error_estimate else 'UNDER-REPORTED'}")

# 1/x is not integrable at 0: the routine says so
bad = integrate_finite(lambda x: 1 / x, 0, 1)
print(f"1/x on [0, 1]: converged={bad.converged} status={bad.status}")

# tighter tolerance, more work
for eps in (1e-6, 1e-10, 1e-13):
    r = integrate_finite(lambda x: np.sqrt(x) * np.log(x), 0, 1, QuadratureConfig(0.0, eps))
    print(f"epsrel={eps:.0e}: err={abs(r.value + 4 / 9):.1e} evals={r.evaluations}")
