"""Discrete memoryless models of the relay's uplink observation.

The relay sees Y_r = X1 + X2 + Z_r where the two users transmit BPSK symbols
and Z_r is Gaussian.  For numerical work the output is discretized onto a
uniform bin grid; arbitrary user-supplied discrete laws are accepted as well
so that tiny hand-checkable channels can drive the oracle tests.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

# Stored pmfs are renormalized to machine precision; inputs only need to be
# normalized to within INPUT_ATOL.
INPUT_ATOL = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(np.asarray(a, dtype=float))
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class ChannelModel:
    """Joint law p(x1)p(x2)p(y_r|x1,x2) with all derived marginals.

    Independence of the two inputs is structural: the joint is always formed
    as the product of the two priors and the conditional output law.
    Instances are immutable and safe to share across parallel workers.
    """

    x1_alphabet: np.ndarray
    x2_alphabet: np.ndarray
    p_x1: np.ndarray
    p_x2: np.ndarray
    p_yr_given_x1x2: np.ndarray  # shape (|X1|, |X2|, |Yr|)
    bin_centers: np.ndarray
    p_yr: np.ndarray = field(init=False)
    p_yr_given_x1: np.ndarray = field(init=False)
    p_yr_given_x2: np.ndarray = field(init=False)
    p_x1x2_yr: np.ndarray = field(init=False)

    def __post_init__(self):
        x1 = _readonly(self.x1_alphabet)
        x2 = _readonly(self.x2_alphabet)
        p1 = np.asarray(self.p_x1, dtype=float)
        p2 = np.asarray(self.p_x2, dtype=float)
        w = np.asarray(self.p_yr_given_x1x2, dtype=float)
        centers = _readonly(self.bin_centers)

        if x1.ndim != 1 or x2.ndim != 1:
            raise ValueError("alphabets must be 1-D")
        if p1.shape != x1.shape or p2.shape != x2.shape:
            raise ValueError("prior shapes must match alphabet shapes")
        if w.ndim != 3 or w.shape[:2] != (x1.size, x2.size):
            raise ValueError(
                f"conditional pmf must have shape ({x1.size}, {x2.size}, |Yr|), got {w.shape}"
            )
        if centers.shape != (w.shape[2],):
            raise ValueError("bin_centers length must equal |Yr|")

        p1 = _validated_pmf(p1, "p_x1")
        p2 = _validated_pmf(p2, "p_x2")
        w = w.copy()
        for a in range(w.shape[0]):
            for b in range(w.shape[1]):
                w[a, b] = _validated_pmf(w[a, b], f"p_yr_given_x1x2[{a},{b}]")

        joint = p1[:, None, None] * p2[None, :, None] * w
        object.__setattr__(self, "x1_alphabet", x1)
        object.__setattr__(self, "x2_alphabet", x2)
        object.__setattr__(self, "p_x1", _readonly(p1))
        object.__setattr__(self, "p_x2", _readonly(p2))
        object.__setattr__(self, "p_yr_given_x1x2", _readonly(w))
        object.__setattr__(self, "bin_centers", centers)
        object.__setattr__(self, "p_yr", _readonly(joint.sum(axis=(0, 1))))
        object.__setattr__(self, "p_yr_given_x1", _readonly(np.einsum("b,abj->aj", p2, w)))
        object.__setattr__(self, "p_yr_given_x2", _readonly(np.einsum("a,abj->bj", p1, w)))
        object.__setattr__(self, "p_x1x2_yr", _readonly(joint))

    @property
    def num_x1(self) -> int:
        return self.x1_alphabet.size

    @property
    def num_x2(self) -> int:
        return self.x2_alphabet.size

    @property
    def num_bins(self) -> int:
        return self.bin_centers.size

    def fingerprint(self) -> str:
        """SHA-256 over the defining arrays, stable across runs."""
        h = hashlib.sha256()
        for arr in (self.x1_alphabet, self.x2_alphabet, self.p_x1, self.p_x2,
                    self.p_yr_given_x1x2, self.bin_centers):
            h.update(np.asarray(arr.shape, dtype=np.int64).tobytes())
            h.update(arr.tobytes())
        return h.hexdigest()

    def to_dict(self) -> dict:
        return {
            "x1_alphabet": self.x1_alphabet.tolist(),
            "x2_alphabet": self.x2_alphabet.tolist(),
            "p_x1": self.p_x1.tolist(),
            "p_x2": self.p_x2.tolist(),
            "p_yr_given_x1x2": self.p_yr_given_x1x2.tolist(),
            "bin_centers": self.bin_centers.tolist(),
            "p_yr": self.p_yr.tolist(),
            "fingerprint": self.fingerprint(),
        }


def _validated_pmf(p: np.ndarray, name: str) -> np.ndarray:
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{name} contains non-finite entries")
    neg = np.flatnonzero(p < 0)
    if neg.size:
        raise ValueError(f"{name} has negative entry at index {neg[0]}")
    s = p.sum()
    if abs(s - 1.0) > INPUT_ATOL:
        raise ValueError(f"{name} sums to {s!r}, expected 1 within {INPUT_ATOL}")
    return p / s


def build_bpsk_mac(snr1_db: float, snr2_db: float, num_bins: int = 128,
                   span_sigmas: float = 4.0) -> ChannelModel:
    """Discretized BPSK multiple-access uplink with unit-variance Gaussian noise.

    Power P_k = 10^(snr_db/10) relative to the noise, so the input alphabets
    are {-sqrt(P_k), +sqrt(P_k)} with uniform priors.  The output axis is a
    uniform grid of `num_bins` bins covering all four mixture means plus
    `span_sigmas` noise deviations on each side; the outermost bins absorb the
    Gaussian tails so each conditional pmf sums to one.
    """
    if not (math.isfinite(snr1_db) and math.isfinite(snr2_db)):
        raise ValueError("SNRs must be finite")
    if not isinstance(num_bins, (int, np.integer)) or num_bins < 4:
        raise ValueError(f"num_bins must be an integer >= 4, got {num_bins!r}")
    if not (math.isfinite(span_sigmas) and span_sigmas > 0):
        raise ValueError(f"span_sigmas must be positive, got {span_sigmas!r}")

    amp1 = math.sqrt(10.0 ** (snr1_db / 10.0))
    amp2 = math.sqrt(10.0 ** (snr2_db / 10.0))
    x1 = np.array([-amp1, amp1])
    x2 = np.array([-amp2, amp2])

    means = x1[:, None] + x2[None, :]
    lo = means.min() - span_sigmas
    hi = means.max() + span_sigmas
    edges = np.linspace(lo, hi, num_bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])

    # Tail-absorbing bin probabilities: CDF at the interior edges, padded with
    # 0 and 1, then differenced.
    inner = edges[1:-1]
    w = np.empty((2, 2, num_bins))
    for a in range(2):
        for b in range(2):
            cdf = np.concatenate(([0.0], ndtr(inner - means[a, b]), [1.0]))
            w[a, b] = np.diff(cdf)

    return ChannelModel(
        x1_alphabet=x1,
        x2_alphabet=x2,
        p_x1=np.array([0.5, 0.5]),
        p_x2=np.array([0.5, 0.5]),
        p_yr_given_x1x2=w,
        bin_centers=centers,
    )


def from_pmfs(p_x1, p_x2, p_yr_given_x1x2, bin_centers=None) -> ChannelModel:
    """Build a model from explicit discrete laws.

    The alphabets default to 0..n-1 index values and `bin_centers` to the bin
    indices; the Gaussian structure is irrelevant for rate computations.
    """
    p_x1 = np.asarray(p_x1, dtype=float)
    p_x2 = np.asarray(p_x2, dtype=float)
    w = np.asarray(p_yr_given_x1x2, dtype=float)
    if w.ndim != 3:
        raise ValueError("p_yr_given_x1x2 must be a 3-D array")
    if bin_centers is None:
        bin_centers = np.arange(w.shape[2], dtype=float)
    return ChannelModel(
        x1_alphabet=np.arange(p_x1.size, dtype=float),
        x2_alphabet=np.arange(p_x2.size, dtype=float),
        p_x1=p_x1,
        p_x2=p_x2,
        p_yr_given_x1x2=w,
        bin_centers=np.asarray(bin_centers, dtype=float),
    )
