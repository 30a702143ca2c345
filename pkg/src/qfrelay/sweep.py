"""Trace the rate-distortion tradeoff surface by sweeping the multipliers.

Each (lam1, lam2) grid point is solved independently (best of several seeded
restarts) and recorded with its ACHIEVED description rates, so the surface is
a point cloud, not a lattice of targets.  Queries against the cloud use the
monotone lower envelope: the best swept point dominated by the target pair.
Every answer is therefore achievable by a concrete stored quantizer.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from qfrelay.channel import ChannelModel, _readonly
from qfrelay.infotheory import QuantizerPmf
from qfrelay.optimizer import optimize_restarts


@dataclass(frozen=True)
class LambdaGrid:
    """Multiplier values per axis; both axes strictly positive."""

    axis1: np.ndarray
    axis2: np.ndarray

    def __post_init__(self):
        a1 = np.asarray(self.axis1, dtype=float)
        a2 = np.asarray(self.axis2, dtype=float)
        if a1.ndim != 1 or a2.ndim != 1 or a1.size == 0 or a2.size == 0:
            raise ValueError("lambda axes must be non-empty 1-D arrays")
        if a1.min() <= 0 or a2.min() <= 0:
            raise ValueError(
                "lambda values must be strictly positive (the update divides by lam1 + lam2)"
            )
        object.__setattr__(self, "axis1", _readonly(a1))
        object.__setattr__(self, "axis2", _readonly(a2))

    @classmethod
    def log_spaced(cls, lam_min: float = 1e-3, lam_max: float = 10.0,
                   count: int = 12) -> "LambdaGrid":
        if not (lam_min > 0):
            raise ValueError(
                "lambda grid min must be > 0 (the update divides by lam1 + lam2)"
            )
        if not (lam_max >= lam_min):
            raise ValueError("lambda grid max must be >= min")
        if count < 1:
            raise ValueError("lambda grid count must be at least 1")
        axis = np.logspace(np.log10(lam_min), np.log10(lam_max), count)
        return cls(axis1=axis, axis2=axis.copy())


@dataclass(frozen=True)
class SurfacePoint:
    """One solved multiplier pair: achieved rates plus provenance.

    q is the winning quantizer when the point was produced in-process; points
    reloaded from CSV carry q=None (the CSV stores only the scalar columns).
    """

    lam1: float
    lam2: float
    c1: float
    c2: float
    i_rd: float
    h_scalar: float
    iterations: int
    converged: bool
    seed: int
    q: QuantizerPmf | None = None


@dataclass(frozen=True)
class Surface:
    points: tuple
    channel_fingerprint: str
    num_levels: int
    warnings: tuple = ()


def _solve_point(ch, num_levels, lam1, lam2, restarts, init, eps, max_iter, point_seed):
    res = optimize_restarts(ch, lam1, lam2, num_levels, restarts=restarts,
                            init=init, eps=eps, max_iter=max_iter, seed=point_seed)
    rep = res.report
    return SurfacePoint(
        lam1=float(lam1),
        lam2=float(lam2),
        c1=rep.c1_achieved,
        c2=rep.c2_achieved,
        i_rd=rep.j_value,
        h_scalar=rep.h_yhat_given_y,
        iterations=res.iterations,
        converged=res.converged,
        seed=res.seed,
        q=res.q_final,
    )


def _solve_point_star(args):
    return _solve_point(*args)


def sweep_grid(ch: ChannelModel, num_levels: int, grid: LambdaGrid | None = None,
               restarts: int = 4, init: str = "perturbed-uniform", eps: float = 1e-8,
               max_iter: int = 5000, seed: int = 0, workers: int | None = None) -> Surface:
    """Solve every multiplier pair on the grid and collect the point cloud.

    Per-point seeds derive deterministically from (seed, grid row, grid col),
    so the surface is identical whether points run serially or across worker
    processes.  Non-converged points are kept but flagged; if more than half
    fail to converge the surface carries a quality warning.
    """
    if grid is None:
        grid = LambdaGrid.log_spaced()
    tasks = []
    for gi, lam1 in enumerate(grid.axis1):
        for gj, lam2 in enumerate(grid.axis2):
            point_seed = int(np.random.SeedSequence((seed, gi, gj)).generate_state(1)[0])
            tasks.append((ch, num_levels, float(lam1), float(lam2), restarts,
                          init, eps, max_iter, point_seed))

    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_solve_point_star, tasks))
    else:
        points = [_solve_point(*t) for t in tasks]

    warnings = []
    bad = sum(1 for p in points if not p.converged)
    if bad > len(points) / 2:
        warnings.append(
            f"sweep quality: {bad} of {len(points)} grid points did not converge"
        )
    return Surface(
        points=tuple(points),
        channel_fingerprint=ch.fingerprint(),
        num_levels=int(num_levels),
        warnings=tuple(warnings),
    )


def query_lower_envelope(s: Surface, c1_target: float, c2_target: float) -> float:
    """Best swept objective among points dominated by the target rates.

    This is an achievability bound on the true tradeoff at the targets: it
    only uses quantizers whose achieved description rates fit under them, and
    it tightens as the sweep grid densifies.  With no qualifying point the
    answer is 0, which the single-level quantizer always achieves.
    """
    if c1_target < 0 or c2_target < 0:
        raise ValueError("rate targets must be nonnegative")
    best = 0.0
    for p in s.points:
        if p.c1 <= c1_target and p.c2 <= c2_target and p.i_rd > best:
            best = p.i_rd
    return best


def envelope_point(s: Surface, c1_target: float, c2_target: float) -> SurfacePoint | None:
    """The surface point realizing query_lower_envelope, or None if only the
    degenerate quantizer qualifies."""
    if c1_target < 0 or c2_target < 0:
        raise ValueError("rate targets must be nonnegative")
    best = None
    for p in s.points:
        if p.c1 <= c1_target and p.c2 <= c2_target:
            if best is None or p.i_rd > best.i_rd:
                best = p
    return best


def scalar_diagnostic(s: Surface) -> list:
    """(h_scalar, i_rd) pairs sorted by i_rd descending, ready for plotting.

    Near the top of the objective range the randomized-quantizer entropy
    H(Yhat|Yr) collapses toward zero, i.e. the best quantizers are scalar.
    """
    if not s.points:
        raise ValueError("surface has no points")
    pairs = [(p.h_scalar, p.i_rd) for p in s.points]
    pairs.sort(key=lambda t: -t[1])
    return pairs


def round_to_scalar(q: QuantizerPmf) -> QuantizerPmf:
    """Deterministic quantizer with each column one-hot at its argmax.

    Ties break toward the lower level index; the result has H(Yhat|Yr) = 0 by
    construction.
    """
    hard = np.zeros_like(q.q)
    hard[np.argmax(q.q, axis=0), np.arange(q.num_bins)] = 1.0
    return QuantizerPmf(hard)


def c2_interval_by_c1(s: Surface, num_slices: int = 8) -> list:
    """Empirical spread of achieved c2 within equal-width c1 slices.

    Report-only diagnostic: how much the second description rate varies among
    swept points whose first rate lands in the same band.  No threshold is
    asserted anywhere; empty slices are skipped.
    """
    if not s.points:
        raise ValueError("surface has no points")
    c1s = np.array([p.c1 for p in s.points])
    c2s = np.array([p.c2 for p in s.points])
    lo, hi = float(c1s.min()), float(c1s.max())
    edges = np.linspace(lo, hi, num_slices + 1)
    out = []
    for k in range(num_slices):
        upper_inclusive = k == num_slices - 1
        if upper_inclusive:
            mask = (c1s >= edges[k]) & (c1s <= edges[k + 1])
        else:
            mask = (c1s >= edges[k]) & (c1s < edges[k + 1])
        if not mask.any():
            continue
        out.append({
            "c1_lo": float(edges[k]),
            "c1_hi": float(edges[k + 1]),
            "count": int(mask.sum()),
            "c2_min": float(c2s[mask].min()),
            "c2_max": float(c2s[mask].max()),
            "c2_width": float(c2s[mask].max() - c2s[mask].min()),
        })
    return out


CSV_HEADER = "lambda1,lambda2,c1_bits,c2_bits,i_rd_bits,h_scalar_bits,iterations,converged,seed"


def surface_to_csv(s: Surface, path) -> None:
    """One row per point; floats use shortest round-trip repr for bytewise
    reproducibility across runs."""
    lines = [CSV_HEADER]
    for p in s.points:
        lines.append(",".join([
            repr(p.lam1), repr(p.lam2), repr(p.c1), repr(p.c2),
            repr(p.i_rd), repr(p.h_scalar), str(p.iterations),
            "true" if p.converged else "false", str(p.seed),
        ]))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def surface_from_csv(path) -> Surface:
    with open(path) as f:
        lines = [ln.strip() for ln in f if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: expected header {CSV_HEADER!r}")
    points = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != 9:
            raise ValueError(f"{path}: malformed row {ln!r}")
        points.append(SurfacePoint(
            lam1=float(cells[0]), lam2=float(cells[1]), c1=float(cells[2]),
            c2=float(cells[3]), i_rd=float(cells[4]), h_scalar=float(cells[5]),
            iterations=int(cells[6]), converged=cells[7] == "true",
            seed=int(cells[8]), q=None,
        ))
    return Surface(points=tuple(points), channel_fingerprint="", num_levels=0)


def surface_to_dict(s: Surface, include_q: bool = False) -> dict:
    points = []
    for p in s.points:
        d = {
            "lambda1": p.lam1, "lambda2": p.lam2, "c1_bits": p.c1,
            "c2_bits": p.c2, "i_rd_bits": p.i_rd, "h_scalar_bits": p.h_scalar,
            "iterations": p.iterations, "converged": p.converged, "seed": p.seed,
        }
        if include_q and p.q is not None:
            d["q"] = p.q.q.tolist()
        points.append(d)
    return {
        "channel_fingerprint": s.channel_fingerprint,
        "num_levels": s.num_levels,
        "warnings": list(s.warnings),
        "points": points,
    }


def surface_to_json(s: Surface, path, include_q: bool = False) -> None:
    with open(path, "w") as f:
        json.dump(surface_to_dict(s, include_q=include_q), f, indent=2)
        f.write("\n")


def surface_from_json(path) -> Surface:
    with open(path) as f:
        d = json.load(f)
    points = []
    for row in d["points"]:
        q = QuantizerPmf(np.asarray(row["q"], dtype=float)) if "q" in row else None
        points.append(SurfacePoint(
            lam1=row["lambda1"], lam2=row["lambda2"], c1=row["c1_bits"],
            c2=row["c2_bits"], i_rd=row["i_rd_bits"], h_scalar=row["h_scalar_bits"],
            iterations=row["iterations"], converged=row["converged"],
            seed=row["seed"], q=q,
        ))
    return Surface(
        points=tuple(points),
        channel_fingerprint=d.get("channel_fingerprint", ""),
        num_levels=d.get("num_levels", 0),
        warnings=tuple(d.get("warnings", ())),
    )
