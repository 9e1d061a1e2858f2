"""
Where does exact recovery switch on? Compare the statistical-dimension
prediction with a small Monte Carlo sweep at N=100, M=2, S=10.

Use more trials (and JADE_NUM_THREADS) for smoother curves.
"""

from jade import harness, statdim

pred = statdim.predict_transition(100, 2, 10)
print("predicted transition: L = %.2f  (eta=0.05 bracket %d..%d)"
      % (pred.delta_seq, pred.L_fail, pred.L_success))

spec = harness.load_spec(preset="fig2", L_values=tuple(range(14, 41, 2)), trials=10)
res = harness.run_phase_map(spec)
for row in res.summary:
    bar = "#" * int(round(20 * row["success_prob"]))
    print("L=%3d  %-20s %.2f" % (row["L"], bar, row["success_prob"]))

L = [r["L"] for r in res.summary]
p = [r["success_prob"] for r in res.summary]
print("empirical 50%% point: L = %.2f" % harness.transition_point(L, p))
