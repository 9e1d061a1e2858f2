"""
One uplink block from start to finish: draw a scenario, solve it with both
solvers, then read off which devices were active and their channels.
"""

import numpy as np

from jade import detect, model, solvers

cfg = model.SystemConfig(N=100, M=2, L=40, S=10, sigma2=1e-4, master_seed=1)
truth, obs = model.generate_system(cfg, model.trial_seed(cfg.master_seed, 0))
print("active devices:", truth.support)

# everything below works on the real embedding
Qt = model.complex_to_real_operator(obs.Q)
Yt = model.complex_to_real_stack(obs.Y)
theta0 = model.complex_to_real_stack(truth.theta0)

# reference: projected gradient with the true regularizer value as radius
ref = solvers.solve_pb_projected_gradient(Qt, Yt, solvers.group_l21(theta0), accelerated=True)
print("reference: %d iterations, squared error %.2e"
      % (ref.iterations, np.sum((ref.theta_hat - theta0) ** 2)))

# smoothed dual method; eps is a rough noise level
eps = np.sqrt(cfg.sigma2 / 2 * 2 * cfg.L * cfg.M)
est = solvers.solve_smoothed_dual(Qt, Yt, solvers.SolverOptions(mu=0.05, epsilon=eps))
print("smoothed:  %d iterations, converged=%s, squared error %.2e"
      % (est.iterations, est.converged, np.sum((est.theta_hat - theta0) ** 2)))

det = detect.detect_activity(est.theta_complex, gamma_act=0.1, activity=truth.activity)
print("detected:", det.detected)
print("missed %d, false alarms %d" % (det.missed, det.false_alarm))
