"""Optimize the relay quantizer for one multiplier pair.

The solver alternates between recomputing posteriors and a softmax column
update of the quantizer pmf.  The penalized objective
J - lambda1*C1 - lambda2*C2 never decreases along the iteration, which is
the main thing worth watching here.
"""
import numpy as np

from qfrelay import build_bpsk_mac, optimize, optimize_restarts, uplink_sum_rate_bound

ch = build_bpsk_mac(1.5, 4.5)
LAM = 0.1
LEVELS = 32

res = optimize(ch, LAM, LAM, LEVELS, eps=1e-8, max_iter=2000, seed=3)
trace = np.asarray(res.lagrangian_trace)

print("converged:", res.converged, "after", res.iterations, "iterations")
print("first iterations:", np.array2string(trace[:5], precision=6))
print("last value: %.9f bits" % trace[-1])
print("monotone:", bool((np.diff(trace) >= -1e-12).all()))

rep = res.report
print("\nat lambda1 = lambda2 = %.2f:" % LAM)
print("  I_RD = %.6f bits (bound %.6f)" % (rep.j_value, uplink_sum_rate_bound(ch)))
print("  C1 = %.6f, C2 = %.6f" % (rep.c1_achieved, rep.c2_achieved))
print("  per-user splits: R1 = %.6f, R2 = %.6f" % (rep.r1, rep.r2))

# heavier penalties buy cheaper descriptions at the cost of I_RD
print("\nlambda sweep (single seed each):")
print("  lambda    I_RD      C1        C2")
for lam in (0.01, 0.05, 0.1, 0.3, 1.0):
    r = optimize(ch, lam, lam, LEVELS, seed=3).report
    print("  %-8.2f  %-8.6f  %-8.6f  %-8.6f" % (lam, r.j_value, r.c1_achieved, r.c2_achieved))

# restarts guard against bad random initializations; the winner and its
# seed are returned so any run can be reproduced exactly
best = optimize_restarts(ch, LAM, LAM, LEVELS, restarts=4, seed=0)
replay = optimize(ch, LAM, LAM, LEVELS, seed=best.seed)
print("\nbest of 4 restarts: L = %.9f (seed %d)" % (best.lagrangian_trace[-1], best.seed))
print("replay matches:", replay.lagrangian_trace[-1] == best.lagrangian_trace[-1])
