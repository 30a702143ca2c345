"""Build the discretized BPSK two-way relay uplink and read off its rates.

Two terminals send BPSK symbols through an additive Gaussian multiple-access
channel to the relay.  The relay observation is discretized to a finite bin
alphabet, so everything downstream is plain pmf arithmetic.
"""
import numpy as np

from qfrelay import (
    build_bpsk_mac,
    fixture_channel,
    rate_report,
    uplink_sum_rate_bound,
    yr_conditional_entropies,
    QuantizerPmf,
)

ch = build_bpsk_mac(snr1_db=1.5, snr2_db=4.5, num_bins=128)

print("alphabets:", ch.x1_alphabet, ch.x2_alphabet)
print("bin range: [%.3f, %.3f], %d bins"
      % (ch.bin_centers[0], ch.bin_centers[-1], ch.bin_centers.size))
print("p_yr sums to", ch.p_yr.sum())

ents = yr_conditional_entropies(ch)
print("H(Yr) = %.6f bits" % ents["h_yr"])
print("H(Yr|X1) = %.6f bits" % ents["h_yr_given_x1"])
print("H(Yr|X2) = %.6f bits" % ents["h_yr_given_x2"])
print("H(Yr|X1,X2) = %.6f bits" % ents["h_yr_given_x1x2"])
print("uplink sum-rate bound = %.6f bits" % uplink_sum_rate_bound(ch))

# the identity quantizer keeps the full observation: J meets the bound and
# the description rates pay the whole conditional entropies
ident = QuantizerPmf(np.eye(ch.p_yr.size))
rep = rate_report(ch, ident)
print("\nidentity quantizer:")
print("  J = %.6f  (bound gap %.2e)" % (rep.j_value, uplink_sum_rate_bound(ch) - rep.j_value))
print("  C1 = %.6f, C2 = %.6f" % (rep.c1_achieved, rep.c2_achieved))
print("  H(Yhat|Yr) = %.6f" % rep.h_yhat_given_y)

# a crude 2-level threshold quantizer throws most of that away
hard = np.zeros((2, ch.p_yr.size))
hard[0, ch.bin_centers < 0] = 1.0
hard[1, ch.bin_centers >= 0] = 1.0
rep2 = rate_report(ch, QuantizerPmf(hard))
print("\nsign quantizer (2 levels):")
print("  J = %.6f" % rep2.j_value)
print("  C1 = %.6f, C2 = %.6f" % (rep2.c1_achieved, rep2.c2_achieved))

# the small fixed test channel used throughout the docs
fx = fixture_channel()
print("\nfixture channel: |X1| x |X2| x |Yr| =", fx.p_yr_given_x1x2.shape)
print("fixture bound = %.6f bits" % uplink_sum_rate_bound(fx))
