"""Outer time-sharing problem for the two-phase relaying protocol.

A fraction alpha of channel uses carries the uplink multiple-access phase and
the rest carries the downlink broadcast, so the exchanged sum rate is
alpha * I_RD((1-alpha)/alpha * I1, (1-alpha)/alpha * I2) with I1, I2 the
downlink capacities.  I_RD is evaluated by the achievable lower-envelope
query over a precomputed multiplier sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qfrelay.sweep import Surface, query_lower_envelope

# Open interval for the time-sharing search; endpoints are degenerate
# (no uplink time or no downlink time).
ALPHA_MARGIN = 1e-6
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SumRateResult:
    alpha_star: float
    sum_rate: float
    c1_at_star: float
    c2_at_star: float
    i_rd_at_star: float
    evaluations: int


def downlink_rate(snr_db: float) -> float:
    """Real-Gaussian point-to-point capacity 0.5*log2(1+SNR) in bits.

    Callers with a different downlink model pass their capacities directly.
    """
    if not math.isfinite(snr_db):
        raise ValueError(f"snr_db must be finite, got {snr_db!r}")
    return 0.5 * math.log2(1.0 + 10.0 ** (snr_db / 10.0))


def _targets(i1: float, i2: float, alpha: float):
    ratio = (1.0 - alpha) / alpha
    return ratio * i1, ratio * i2


def sum_rate_at(s: Surface, i1: float, i2: float, alpha: float) -> float:
    """Exchanged sum rate for one time-sharing split, in bits per channel use."""
    if not (0 < alpha < 1):
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")
    if i1 < 0 or i2 < 0:
        raise ValueError("downlink capacities must be nonnegative")
    c1_t, c2_t = _targets(i1, i2, alpha)
    return alpha * query_lower_envelope(s, c1_t, c2_t)


def optimize_alpha(s: Surface, i1: float, i2: float,
                   tol_alpha: float = 1e-4) -> SumRateResult:
    """Maximize the sum rate over the time-sharing coefficient.

    The idealized objective is concave in alpha, so golden-section search
    applies; the envelope query makes the actual objective step-like, so the
    search is cross-checked against a 1000-point uniform grid and the better
    value wins.  The result is always achievable: it is alpha times an
    envelope value backed by a stored quantizer.
    """
    if not s.points:
        raise ValueError("surface has no points")
    if tol_alpha <= 0:
        raise ValueError(f"tol_alpha must be positive, got {tol_alpha!r}")
    if i1 < 0 or i2 < 0:
        raise ValueError("downlink capacities must be nonnegative")

    evals = 0

    def f(alpha):
        nonlocal evals
        evals += 1
        return sum_rate_at(s, i1, i2, alpha)

    lo, hi = ALPHA_MARGIN, 1.0 - ALPHA_MARGIN
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol_alpha:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = f(d)
    best_alpha, best_val = (c, fc) if fc >= fd else (d, fd)

    for alpha in np.linspace(ALPHA_MARGIN, 1.0 - ALPHA_MARGIN, 1000):
        v = f(alpha)
        if v > best_val:
            best_alpha, best_val = float(alpha), v

    c1_t, c2_t = _targets(i1, i2, best_alpha)
    ird = query_lower_envelope(s, c1_t, c2_t)
    return SumRateResult(
        alpha_star=float(best_alpha),
        sum_rate=best_alpha * ird,
        c1_at_star=c1_t,
        c2_at_star=c2_t,
        i_rd_at_star=ird,
        evaluations=evals,
    )


def alpha_objective_curve(s: Surface, i1: float, i2: float, num: int = 1000) -> list:
    """(alpha, sum rate) samples on a uniform grid, for plotting."""
    if num < 2:
        raise ValueError("num must be at least 2")
    return [
        (float(a), sum_rate_at(s, i1, i2, float(a)))
        for a in np.linspace(ALPHA_MARGIN, 1.0 - ALPHA_MARGIN, num)
    ]


def unimodality_report(s: Surface, i1: float, i2: float, num_alphas: int = 100,
                       tol: float = 1e-3) -> dict:
    """Count strict local maxima of the sampled objective, up to tol.

    The idealized objective is concave, hence unimodal; envelope
    discretization can create plateaus and small ripples, so this is a
    diagnostic report, never a fatal check.  Moves smaller than tol are
    treated as flat.
    """
    alphas = np.linspace(ALPHA_MARGIN, 1.0 - ALPHA_MARGIN, num_alphas)
    vals = np.array([sum_rate_at(s, i1, i2, float(a)) for a in alphas])

    dirs = []
    idx = []
    for k in range(len(vals) - 1):
        step = vals[k + 1] - vals[k]
        if abs(step) > tol:
            dirs.append(1 if step > 0 else -1)
            idx.append(k + 1)
    maxima = []
    for k in range(len(dirs) - 1):
        if dirs[k] == 1 and dirs[k + 1] == -1:
            maxima.append(float(alphas[idx[k]]))
    return {
        "num_alphas": int(num_alphas),
        "tol": float(tol),
        "num_strict_maxima": len(maxima),
        "maxima_alphas": maxima,
        "ok": len(maxima) <= 1,
    }
