"""
Above the transition, the normalised prediction error of the constrained
estimator tracks delta/L. Scaled setting: N=150, M=3, S=21, sigma2=1e-3.
"""

from jade import harness, statdim

d = statdim.statdim_plain(21 / 150, 3, 150).delta_seq
Ls = tuple(int(round(k * d)) for k in (0.8, 1.2, 1.5, 2.0, 3.0))
res = harness.run_noisy_error(harness.load_spec(preset="fig4b_scaled", L_values=Ls, trials=10))
print("delta_seq = %.2f" % d)
print("  L   R/sigma2   delta/L")
for r in res.summary:
    print("%3d   %.3f      %.3f" % (r["L"], r["R_over_sigma2_real"], r["pred_worst_case_ratio"]))
