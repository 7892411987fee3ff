"""Critical exponents from orbit balls.

The primary estimator fits the slope of log N(r) over the window [R/2, R],
where N(r) counts orbit points within distance r.  A second estimator bisects
on the exponent s at which the per-unit-radius increments of the Poincare
series stop growing.  Both work on any ball-like object exposing
``displacements``, ``radius`` and ``complete``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from rankone.orbits import BOUNDARY_EPS

MIN_RADIUS = 8.0
MIN_SAMPLES = 5
DELTA_SLACK = 0.1
PROBE_CONVERGING = -1.0
PROBE_DIVERGING = -0.25
HEURISTIC_NOTE = "finite-radius trend heuristic, not a proof"


@dataclass
class DisplacementSet:
    """Bare displacement multiset, e.g. for lattices given in model coordinates.

    ``weights`` (optional) are multiplicities of the displacements.
    """

    displacements: np.ndarray
    radius: float
    complete: bool = True
    ambient_delta: float | None = None
    weights: np.ndarray | None = None


def displacement_ball(displacements, radius: float, ambient_delta=None,
                      weights=None) -> DisplacementSet:
    d = np.asarray(displacements, dtype=float)
    keep = d <= radius + BOUNDARY_EPS
    w = None if weights is None else np.asarray(weights, dtype=float)[keep]
    return DisplacementSet(d[keep], float(radius), True, ambient_delta, w)


def _weighted(ball):
    d = np.asarray(ball.displacements, float)
    w = getattr(ball, "weights", None)
    return d, (np.ones_like(d) if w is None else np.asarray(w, float))


def _ambient_delta(ball):
    spec = getattr(ball, "spec", None)
    if spec is not None:
        return spec.group.deltaG
    return getattr(ball, "ambient_delta", None)


@dataclass
class ExponentEstimate:
    delta_hat: float
    fit_window: tuple
    residual: float
    counting_curve: list
    method: str
    flags: list = field(default_factory=list)

    @property
    def flagged(self) -> bool:
        return bool(self.flags)

    def to_json(self) -> dict:
        return {"delta_hat": self.delta_hat, "fit_window": list(self.fit_window),
                "residual": self.residual, "method": self.method, "flags": list(self.flags),
                "counting_curve": [[r, int(n)] for r, n in self.counting_curve]}


@dataclass
class ProbeResult:
    label: str               # diverging_trend | converging_trend | inconclusive
    s: float
    slope: float
    window: tuple
    shells: int
    note: str = HEURISTIC_NOTE

    def __str__(self):
        return f"{self.label} [{self.note}]"

    def to_json(self) -> dict:
        return {"label": self.label, "s": self.s, "slope": self.slope,
                "window": list(self.window), "shells": self.shells, "note": self.note}


def poincare_series(ball, s: float) -> float:
    """Truncated Poincare series sum of exp(-s d) over the ball."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    d, w = _weighted(ball)
    order = np.argsort(d)[::-1]          # small terms first
    return float(np.sum(w[order] * np.exp(-s * d[order])))


def counting_curve(ball, radii) -> np.ndarray:
    d, w = _weighted(ball)
    order = np.argsort(d, kind="stable")
    d, cum = d[order], np.concatenate([[0.0], np.cumsum(w[order])])
    idx = np.searchsorted(d, np.asarray(radii, float) + BOUNDARY_EPS, side="right")
    return np.rint(cum[idx]).astype(np.int64)


def _shell_increments(ball, s):
    """Sums of exp(-s d) over unit shells (r - 1, r] with r running down from R to R/2."""
    R = ball.radius
    tops = np.arange(R, R / 2 + 1 - 1e-12, -1.0)[::-1]
    d, w = _weighted(ball)
    inc = []
    for r in tops:
        sel = (d > r - 1 + BOUNDARY_EPS) & (d <= r + BOUNDARY_EPS)
        inc.append(float(np.sum(w[sel] * np.exp(-s * d[sel]))))
    return tops - 0.5, np.array(inc)


def _increment_slope(ball, s):
    centres, inc = _shell_increments(ball, s)
    ok = inc > 0
    if ok.sum() < 2 or ok.sum() < 0.5 * len(inc):
        return None, int(ok.sum())
    slope = np.polyfit(centres[ok], np.log(inc[ok]), 1)[0]
    return float(slope), int(ok.sum())


def _check_ball(ball):
    if ball.radius < MIN_RADIUS:
        raise ValueError(f"ball radius must be at least {MIN_RADIUS:g}")


def delta_estimate(ball, method: str = "counting_slope", samples: int = 50) -> ExponentEstimate:
    """Critical exponent estimate from a ball of radius R >= 8."""
    _check_ball(ball)
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} window samples")
    R = ball.radius
    radii = np.linspace(R / 2, R, samples)
    counts = counting_curve(ball, radii)
    curve = [(float(r), int(n)) for r, n in zip(radii, counts)]
    flags = []
    if not ball.complete:
        flags.append("incomplete ball: counts near R are lower bounds")
    if method == "counting_slope":
        y = np.log(counts.astype(float))
        coef, res, *_ = np.polyfit(radii, y, 1, full=True)
        delta_hat = float(coef[0])
        residual = float(np.sqrt(res[0] / len(radii))) if len(res) else 0.0
    elif method == "series_threshold":
        delta_hat, residual = _series_threshold(ball)
    else:
        raise ValueError(f"unknown method {method!r}")
    amb = _ambient_delta(ball)
    if amb is not None and delta_hat > amb + DELTA_SLACK:
        flags.append("estimate exceeds the ambient critical exponent")
    return ExponentEstimate(delta_hat, (R / 2, R), residual, curve, method, flags)


def _series_threshold(ball, tol=1e-6):
    """Bisect s for which shell increments of the series neither grow nor decay."""
    amb = _ambient_delta(ball) or 10.0
    lo, hi = 0.0, float(amb) + 1.0
    k_lo, _ = _increment_slope(ball, lo)
    if k_lo is None:
        raise ValueError("too few nonempty shells in the window for the series estimator")
    if k_lo <= 0:
        return 0.0, abs(k_lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        k, _ = _increment_slope(ball, mid)
        if k > 0:
            lo = mid
        else:
            hi = mid
    k, _ = _increment_slope(ball, 0.5 * (lo + hi))
    return 0.5 * (lo + hi), abs(k)


def divergence_probe(ball, s: float) -> ProbeResult:
    """Classify the trend of the series increments over [R/2, R] at exponent s.

    The log-increment slope times the window length R/2 is compared with
    fixed cut-offs: <= -1 converging, >= -1/4 diverging, otherwise inconclusive.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    R = ball.radius
    slope, shells = _increment_slope(ball, s)
    if slope is None:
        return ProbeResult("inconclusive", s, float("nan"), (R / 2, R), shells)
    change = slope * (R / 2)
    if change <= PROBE_CONVERGING:
        label = "converging_trend"
    elif change >= PROBE_DIVERGING:
        label = "diverging_trend"
    else:
        label = "inconclusive"
    return ProbeResult(label, s, slope, (R / 2, R), shells)


def export_counting_csv(estimate: ExponentEstimate, fh) -> None:
    """Write the counting curve as CSV rows R, N, log N."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["R", "N", "logN"])
    for r, n in estimate.counting_curve:
        w.writerow([f"{r:.6f}", n, f"{math.log(n):.10f}" if n > 0 else "-inf"])
