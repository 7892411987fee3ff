"""Cusp geometry in the upper half-space model.

A point is (x, e^t) with x in R^{n-1}; the metric is
ds^2 = (|dx|^2 + e^{2t} dt^2) / e^{2t} and the volume density e^{-(n-1)t} dx dt.
Complex and quaternionic cusps are handled through their volume and
diameter growth exponents only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from rankone.poincare import DisplacementSet

_SPACES = {"rhn": "real", "real": "real", "real_hyperbolic": "real",
           "chn": "complex", "complex": "complex", "complex_hyperbolic": "complex",
           "qhn": "quaternionic", "quaternionic": "quaternionic",
           "quaternionic_hyperbolic": "quaternionic"}
MIN_GRID = 100


@dataclass(frozen=True)
class UpperHalfSpacePoint:
    x: tuple
    t: float

    def __post_init__(self):
        x = tuple(float(v) for v in np.atleast_1d(self.x))
        if not all(math.isfinite(v) for v in x) or not math.isfinite(float(self.t)):
            raise ValueError("coordinates must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", float(self.t))

    @property
    def dim(self) -> int:
        return len(self.x) + 1


def hyperbolic_distance(p: UpperHalfSpacePoint, q: UpperHalfSpacePoint) -> float:
    """Closed-form distance, written as 2 asinh(|P - Q|_E / (2 sqrt(y_p y_q)))."""
    if len(p.x) != len(q.x):
        raise ValueError("points of different dimensions")
    dx2 = sum((a - b) ** 2 for a, b in zip(p.x, q.x))
    # scale by e^{-(t_p + t_q)/2} before squaring to stay in range
    mid = 0.5 * (p.t + q.t)
    dy = math.exp(p.t - mid) - math.exp(q.t - mid)
    s2 = dx2 * math.exp(-2 * mid) + dy * dy
    return 2.0 * math.asinh(0.5 * math.sqrt(s2))


def horoball_volume(n: int, base_volume: float, s: float) -> float:
    """Volume of T x [s, inf) over a horizontal region of Euclidean volume base_volume."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if base_volume < 0:
        raise ValueError("base_volume must be nonnegative")
    return base_volume * math.exp(-(n - 1) * s) / (n - 1)


@dataclass(frozen=True)
class CuspModel:
    space: str
    n: int

    def __post_init__(self):
        key = _SPACES.get(str(self.space).lower())
        if key is None:
            raise ValueError(f"unknown space {self.space!r}")
        object.__setattr__(self, "space", key)
        lo = 1 if key == "quaternionic" else 2
        if int(self.n) < lo:
            raise ValueError(f"n must be at least {lo} for {key} hyperbolic space")
        object.__setattr__(self, "n", int(self.n))

    @property
    def multiplicities(self) -> tuple[int, int]:
        n = self.n
        return {"real": (n - 1, 0), "complex": (2 * n - 2, 1),
                "quaternionic": (4 * n - 4, 3)}[self.space]

    @property
    def volume_exponent(self) -> Fraction:
        m1, m2 = self.multiplicities
        return Fraction(m1 + 2 * m2)

    @property
    def diameter_exponent(self) -> Fraction:
        return Fraction(1)

    def to_json(self) -> dict:
        short = {"real": "rhn", "complex": "chn", "quaternionic": "qhn"}[self.space]
        return {"space": short, "n": self.n}

    @classmethod
    def from_json(cls, obj) -> "CuspModel":
        return cls(obj["space"], int(obj["n"]))


@dataclass(frozen=True)
class Integrability:
    exponent: Fraction
    converges: bool

    def to_json(self) -> dict:
        return {"exponent": int(self.exponent) if self.exponent.denominator == 1
                else str(self.exponent), "converges": self.converges}


def cusp_integrability(model: CuspModel) -> Integrability:
    """Summability exponent 2 * diameter_exponent - volume_exponent of g(m)^2 v(m)."""
    e = 2 * model.diameter_exponent - model.volume_exponent
    return Integrability(e, e < 0)


@dataclass
class TailProbe:
    exponent: Fraction
    partial_sums: list
    limit: float | None
    error_bound: float | None
    converges: bool
    flags: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"exponent": str(self.exponent), "M": len(self.partial_sums),
                "partial_sums": self.partial_sums, "limit": self.limit,
                "error_bound": self.error_bound, "converges": self.converges,
                "flags": self.flags}


def tail_sum_probe(model: CuspModel, M: int = 40) -> TailProbe:
    """Partial sums of sum_{m=1}^M e^{exponent m}, with the tail bound when summable."""
    if M < 10:
        raise ValueError("M must be at least 10")
    e = cusp_integrability(model).exponent
    r = math.exp(float(e))
    sums = np.cumsum(r ** np.arange(1, M + 1, dtype=float)).tolist()
    if e < 0:
        lim = r / (1 - r)
        return TailProbe(e, sums, lim, r ** M / (1 - r), True)
    return TailProbe(e, sums, None, None, False, ["partial sums grow without bound: divergent"])


def translate_word_length(x) -> int:
    """Sup-norm word length of the Z^{n-1} translate moving x into the box [0, 1)^{n-1}."""
    return int(np.max(np.abs(np.floor(np.atleast_1d(np.asarray(x, float))))))


def neighbour_word_length(x, h: float) -> int:
    """Largest translate word length over the unit ball around (x, e^h).

    The hyperbolic unit ball around (x, y) projects onto the Euclidean disc of
    radius y sinh 1 about x, so the extreme coordinates are x_i +- y sinh 1.
    """
    x = np.atleast_1d(np.asarray(x, float))
    r = math.exp(h) * math.sinh(1.0)
    return int(max(np.max(np.abs(np.floor(x - r))), np.max(np.abs(np.floor(x + r)))))


@dataclass
class WordBoundReport:
    n: int
    fitted_C: float
    max_ratio: float
    tail_slope: float
    points: int
    bounded: bool
    flags: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"n": self.n, "fitted_C": self.fitted_C, "max_ratio": self.max_ratio,
                "tail_slope": self.tail_slope, "points": self.points,
                "bounded": self.bounded, "flags": self.flags}


def cusp_word_bound(n: int, per_axis: int = 10, heights: int = 100, h_min: float = 0.0,
                    h_max: float = 5.0) -> WordBoundReport:
    """Check w <= C e^h over a grid of cusp points (x, e^h), x in [0, 1)^{n-1}.

    fitted_C is the smallest C valid on the grid; max_ratio is the largest
    ratio among the top quarter of heights.  The bound is judged to hold when
    the per-height maximal ratio does not grow over the upper half of heights.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    axis = (np.arange(per_axis) + 0.5) / per_axis
    mesh = np.stack(np.meshgrid(*([axis] * (n - 1)), indexing="ij"), -1).reshape(-1, n - 1)
    hs = np.linspace(h_min, h_max, heights)
    ratios = np.empty((heights, mesh.shape[0]))
    r = np.exp(hs) * math.sinh(1.0)
    for i, rad in enumerate(r):
        w = np.maximum(np.abs(np.floor(mesh - rad)), np.abs(np.floor(mesh + rad))).max(axis=1)
        ratios[i] = w / math.exp(hs[i])
    points = ratios.size
    flags = [] if points >= MIN_GRID else [f"grid has only {points} points"]
    per_h = ratios.max(axis=1)
    upper = hs >= 0.5 * (h_min + h_max)
    slope = float(np.polyfit(hs[upper], per_h[upper], 1)[0]) if upper.sum() >= 2 else 0.0
    top = hs >= h_min + 0.75 * (h_max - h_min)
    return WordBoundReport(n, float(ratios.max()), float(ratios[top].max()), slope,
                           points, bool(slope <= 1e-3), flags)


def _square_counts(d: int, M: int) -> np.ndarray:
    """r_d(m) for m = 0..M: number of k in Z^d with |k|^2 = m."""
    K = int(math.isqrt(M))
    one = np.zeros(M + 1)
    ks = np.arange(-K, K + 1)
    np.add.at(one, ks * ks, 1.0)
    out = one.copy()
    size = 1 << int(math.ceil(math.log2(2 * M + 2)))
    f1 = np.fft.rfft(one, size)
    for _ in range(d - 1):
        out = np.fft.irfft(np.fft.rfft(out, size) * f1, size)[: M + 1]
    return np.rint(out)


def parabolic_displacements(n: int, radius: float) -> DisplacementSet:
    """Displacements arccosh(1 + |k|^2 / 2) of the standard Z^{n-1} cusp lattice,
    with multiplicities, for the base point (0, 1)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    M = int(math.floor(2 * (math.cosh(radius) - 1) + 1e-9))
    counts = _square_counts(n - 1, M)
    m = np.flatnonzero(counts)
    d = np.arccosh(1 + m / 2.0)
    return DisplacementSet(d, float(radius), True, float(n - 1), counts[m])
