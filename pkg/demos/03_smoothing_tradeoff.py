"""
Smoothing buys speed with accuracy. Larger mu needs longer signatures
(statistical dimension grows) but the dual method converges faster.
"""

import numpy as np

from jade import harness, statdim

a_bar, b_bar = statdim.gaussian_moments(2, statdim.DEFAULT_SIGMA_REAL)
print("mu       delta_seq   (rho=0.1, M=2, N=100)")
for mu in (0, 1e-3, 1e-2, 1e-1, 1):
    print("%-8g %.3f" % (mu, statdim.statdim_smoothed(0.1, 2, 100, mu, a_bar, b_bar).delta_seq))

# a quick version of the scaled convergence / error study
spec = harness.load_spec(preset="fig7_scaled", trials=3, mu_values=(0.01, 0.1, 1.0))
res = harness.run_error_vs_mu(spec)
print("\nmu      iterations  squared error  epsilon from")
for r in res.summary:
    print("%-7g %10.0f  %13.4f  %s" % (r["mu"], r["mean_iterations"], r["mean_sq_error"],
                                        r["epsilon_source"]))
