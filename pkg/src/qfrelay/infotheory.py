"""Information measures induced by a channel model and a quantizer.

All public values are in bits; internal accumulation is in nats so the
optimizer's exp/log pair stays in one base.  The 0*log(0) = 0 convention is
applied everywhere via scipy's xlogy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from qfrelay.channel import INPUT_ATOL, ChannelModel, _readonly

LN2 = math.log(2.0)


def _entropy_nats(p: np.ndarray) -> float:
    return float(-xlogy(p, p).sum())


def entropy(p) -> float:
    """Shannon entropy of a pmf in bits, with 0*log(0) = 0."""
    p = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(p)):
        raise ValueError("pmf contains non-finite entries")
    neg = np.flatnonzero(p < 0)
    if neg.size:
        raise ValueError(f"pmf has negative entry at index {neg[0]}")
    s = p.sum()
    if abs(s - 1.0) > INPUT_ATOL:
        raise ValueError(f"pmf sums to {s!r}, expected 1 within {INPUT_ATOL}")
    return _entropy_nats(p) / LN2


@dataclass(frozen=True, eq=False)
class QuantizerPmf:
    """Column-stochastic L x |Yr| matrix q[i, j] = p(yhat_i | y_j).

    Columns are renormalized to machine precision on construction; inputs must
    already be column-normalized within 1e-9 and nonnegative.
    """

    q: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        if q.ndim != 2:
            raise ValueError("q must be a 2-D matrix")
        if not np.all(np.isfinite(q)):
            raise ValueError("q contains non-finite entries")
        if np.any(q < 0):
            i, j = np.argwhere(q < 0)[0]
            raise ValueError(f"q has negative entry at ({i}, {j})")
        cols = q.sum(axis=0)
        bad = np.flatnonzero(np.abs(cols - 1.0) > INPUT_ATOL)
        if bad.size:
            raise ValueError(
                f"column {bad[0]} sums to {cols[bad[0]]!r}, expected 1 within {INPUT_ATOL}"
            )
        object.__setattr__(self, "q", _readonly(q / cols[None, :]))

    @property
    def num_levels(self) -> int:
        return self.q.shape[0]

    # Alias matching the usual symbol for the number of quantizer levels.
    @property
    def L(self) -> int:
        return self.q.shape[0]

    @property
    def num_bins(self) -> int:
        return self.q.shape[1]

    @classmethod
    def uniform(cls, num_levels: int, num_bins: int) -> "QuantizerPmf":
        return cls(np.full((num_levels, num_bins), 1.0 / num_levels))

    @classmethod
    def identity(cls, num_bins: int) -> "QuantizerPmf":
        return cls(np.eye(num_bins))


@dataclass(frozen=True)
class RateReport:
    """All rate quantities induced by one (channel, quantizer) pair, in bits.

    j_value is the two-way objective r1 + r2 where r1 = I(X1;Yhat|X2) and
    r2 = I(X2;Yhat|X1); c1_achieved = I(Yr;Yhat|X1) and c2_achieved =
    I(Yr;Yhat|X2) are the description rates the downlinks must carry.
    """

    j_value: float
    c1_achieved: float
    c2_achieved: float
    h_yhat_given_y: float
    r1: float
    r2: float


def rate_report(ch: ChannelModel, q: QuantizerPmf) -> RateReport:
    """Evaluate every reported information measure for (ch, q).

    The Markov chain (X1, X2) - Yr - Yhat is structural, so conditional
    description rates reduce to I(Yr;Yhat|Xk) = H(Yhat|Xk) - H(Yhat|Yr).
    """
    if q.num_bins != ch.num_bins:
        raise ValueError(
            f"quantizer has {q.num_bins} columns, channel has {ch.num_bins} bins"
        )
    qm = q.q

    joint_abi = np.einsum("abj,ij->abi", ch.p_x1x2_yr, qm)
    h_abi = _entropy_nats(joint_abi)
    h_ai = _entropy_nats(joint_abi.sum(axis=1))
    h_bi = _entropy_nats(joint_abi.sum(axis=0))
    h_a = _entropy_nats(ch.p_x1)
    h_b = _entropy_nats(ch.p_x2)
    h_ab = h_a + h_b  # inputs independent by construction

    r1 = max(0.0, h_ab + h_bi - h_b - h_abi)
    r2 = max(0.0, h_ab + h_ai - h_a - h_abi)

    # H(Yhat|Yr) = sum_j p(y_j) H(q[:, j])
    col_ent = -xlogy(qm, qm).sum(axis=0)
    h_i_given_y = float(ch.p_yr @ col_ent)

    c1 = max(0.0, (h_ai - h_a) - h_i_given_y)
    c2 = max(0.0, (h_bi - h_b) - h_i_given_y)

    return RateReport(
        j_value=(r1 + r2) / LN2,
        c1_achieved=c1 / LN2,
        c2_achieved=c2 / LN2,
        h_yhat_given_y=h_i_given_y / LN2,
        r1=r1 / LN2,
        r2=r2 / LN2,
    )


def lagrangian(ch: ChannelModel, q: QuantizerPmf, lam1: float, lam2: float) -> float:
    """Penalized objective J - lam1*C1 - lam2*C2 in bits."""
    if lam1 < 0 or lam2 < 0:
        raise ValueError(f"multipliers must be nonnegative, got ({lam1}, {lam2})")
    rep = rate_report(ch, q)
    return rep.j_value - lam1 * rep.c1_achieved - lam2 * rep.c2_achieved


def yr_conditional_entropies(ch: ChannelModel) -> dict:
    """Entropies of the relay observation, in bits, keyed by conditioning."""
    h_y = _entropy_nats(ch.p_yr)
    h_y_a = float(-(ch.p_x1 @ xlogy(ch.p_yr_given_x1, ch.p_yr_given_x1).sum(axis=1)))
    h_y_b = float(-(ch.p_x2 @ xlogy(ch.p_yr_given_x2, ch.p_yr_given_x2).sum(axis=1)))
    w = ch.p_yr_given_x1x2
    pab = ch.p_x1[:, None] * ch.p_x2[None, :]
    h_y_ab = float(-(pab * xlogy(w, w).sum(axis=2)).sum())
    return {
        "h_yr": h_y / LN2,
        "h_yr_given_x1": h_y_a / LN2,
        "h_yr_given_x2": h_y_b / LN2,
        "h_yr_given_x1x2": h_y_ab / LN2,
    }


def uplink_sum_rate_bound(ch: ChannelModel) -> float:
    """I(X1;Yr|X2) + I(X2;Yr|X1) in bits, the ceiling for j_value over all Q."""
    ents = yr_conditional_entropies(ch)
    return (
        ents["h_yr_given_x1"]
        + ents["h_yr_given_x2"]
        - 2.0 * ents["h_yr_given_x1x2"]
    )
