"""Spherical functions of SO(n,1) and SU(n,1) and numerical checks of their bounds.

phi_x(t) denotes the spherical function at a_t with parameter lambda = x
(complementary series, 0 <= x <= rho) or lambda = i x (principal series).
In the Jacobi-function picture

    phi_lambda(t) = 2F1((rho + lambda)/2, (rho - lambda)/2; alpha + 1; -sinh^2 t)

with alpha = (m1 + m2 - 1)/2.  The primary evaluator uses mpmath's 2F1 (with
its analytic continuation for large |z|); the secondary evaluator integrates
the K-integral representation with Gauss-Legendre panels (see
``rankone.kernels``).  Xi = phi at lambda = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from rankone import kernels
from rankone.groups import RankOneGroup

MP_DPS = 20
T_GRID = np.round(np.arange(0.0, 30.0 + 1e-9, 0.25), 2)
N_X = 50
PRINCIPAL_YS = (0.25, 0.5, 1.0, 2.0, 4.0)
TAIL_FRACTION = 1.0 / 3.0
TAIL_SLOPE = 0.02          # allowed log-ratio growth per unit t in the tail
INEQ_TOL = 1e-12
LIMIT_REL_CHANGE = 1e-3
_GX, _GW = np.polynomial.legendre.leggauss(16)
_TX, _TW = np.polynomial.legendre.leggauss(24)


class SphericalEvaluationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SphericalParameter:
    """lambda = x (complementary, 0 <= x <= rho) or lambda = i x (principal, x >= 0)."""

    group: RankOneGroup
    kind: str
    x: float

    def __post_init__(self):
        if self.kind not in ("complementary", "principal"):
            raise ValueError(f"unknown kind {self.kind!r}")
        x = float(self.x)
        if not math.isfinite(x) or x < 0:
            raise ValueError("x must be finite and nonnegative")
        if self.kind == "complementary" and x > float(self.group.rho_beta) + 1e-12:
            raise ValueError(f"complementary x must lie in [0, {self.group.rho_beta}]")
        object.__setattr__(self, "x", x)

    @property
    def lam(self) -> complex:
        return complex(self.x, 0.0) if self.kind == "complementary" else complex(0.0, self.x)

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "kind": self.kind, "x": self.x}


def complementary(group, x) -> SphericalParameter:
    return SphericalParameter(group, "complementary", float(x))


def principal(group, y) -> SphericalParameter:
    return SphericalParameter(group, "principal", float(y))


@lru_cache(maxsize=200_000)
def _phi_mp(field_: str, n: int, kind: str, x: float, t: float):
    from rankone.groups import make_group
    g = make_group(field_, n)
    alpha, _ = g.jacobi
    rho = mpmath.mpf(g.rho_beta.numerator) / g.rho_beta.denominator
    with mpmath.workdps(MP_DPS):
        lam = mpmath.mpf(x) if kind == "complementary" else mpmath.mpc(0, x)
        z = -mpmath.sinh(mpmath.mpf(t)) ** 2
        try:
            v = mpmath.hyp2f1((rho + lam) / 2, (rho - lam) / 2,
                              mpmath.mpf(alpha.numerator) / alpha.denominator + 1, z)
        except (mpmath.libmp.NoConvergence, ZeroDivisionError, ValueError) as exc:
            raise SphericalEvaluationError(f"2F1 failed at x={x}, t={t}: {exc}") from exc
        if not mpmath.isfinite(v):
            raise SphericalEvaluationError(f"2F1 returned {v} at x={x}, t={t}")
        return v


def _check_t(t):
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise ValueError("t must be finite and nonnegative")
    return t


def phi(param: SphericalParameter, t: float):
    """phi_lambda(a_t); a float for complementary parameters, complex for principal ones."""
    t = _check_t(t)
    g = param.group
    v = _phi_mp(g.field, g.n, param.kind, param.x, t)
    if param.kind == "complementary":
        return float(mpmath.re(v))
    return complex(v)


def phi_curve(param: SphericalParameter, ts) -> np.ndarray:
    ts = np.asarray(ts, float)
    dtype = float if param.kind == "complementary" else complex
    return np.array([phi(param, t) for t in ts], dtype=dtype)


def phi_quadrature(param: SphericalParameter, ts) -> np.ndarray:
    """Secondary evaluator: Gauss-Legendre quadrature of the K-integral."""
    ts = np.atleast_1d(np.asarray(ts, float))
    if np.any(ts < 0) or not np.all(np.isfinite(ts)):
        raise ValueError("t must be finite and nonnegative")
    g = param.group
    alpha = float(g.jacobi[0])
    rho = float(g.rho_beta)
    xr = np.full(ts.shape, param.lam.real)
    xi_ = np.full(ts.shape, param.lam.imag)
    if g.field == "real":
        out = kernels.kint_real(xr, xi_, ts, rho, alpha, _GX, _GW)
    else:
        out = kernels.kint_complex(xr, xi_, ts, rho, alpha, _GX, _GW, _TX, _TW)
    return out.real if param.kind == "complementary" else out


def xi(group: RankOneGroup, t: float) -> float:
    """Harish-Chandra Xi function, phi at lambda = 0."""
    return float(phi(principal(group, 0.0), t).real)


def c_function(group: RankOneGroup, x: float) -> float:
    """Closed-form limit of e^{(rho - x) t} phi_x(t) for 0 < x (Jacobi c-function)."""
    alpha, beta = (float(v) for v in group.jacobi)
    rho = float(group.rho_beta)
    lg = math.lgamma
    return math.exp((rho - x) * math.log(2) + lg(alpha + 1) + lg(x)
                    - lg((x + rho) / 2) - lg((x + alpha - beta + 1) / 2))


@dataclass
class LimitResult:
    value: float
    previous: float          # the same quantity at t_max - 5
    rel_change: float
    t_max: float
    stabilized: bool

    def to_json(self) -> dict:
        return {"value": self.value, "previous": self.previous, "rel_change": self.rel_change,
                "t_max": self.t_max, "stabilized": self.stabilized}


def _scaled(param, t):
    g = param.group
    v = _phi_mp(g.field, g.n, param.kind, param.x, t)
    with mpmath.workdps(MP_DPS):
        rho = mpmath.mpf(g.rho_beta.numerator) / g.rho_beta.denominator
        return float(mpmath.re(mpmath.exp((rho - param.x) * t) * v))


def spherical_limit(param: SphericalParameter, t_max: float = 40.0) -> LimitResult:
    """e^{(rho - x) t_max} phi_x(t_max), certified by its change since t_max - 5."""
    if param.kind != "complementary" or param.x <= 0:
        raise ValueError("the limit needs a complementary parameter with x > 0")
    if t_max < 5:
        raise ValueError("t_max must be at least 5")
    a = _scaled(param, t_max - 5.0)
    b = _scaled(param, t_max)
    rel = abs(b - a) / abs(b) if b else math.inf
    return LimitResult(b, a, rel, float(t_max), bool(rel < LIMIT_REL_CHANGE))


def _tail_growth(ts, log_ratio, sign=1.0):
    """Tail slope of sign*log_ratio and the tail points whose growth since the
    tail start exceeds TAIL_SLOPE per unit t."""
    ts = np.asarray(ts, float)
    y = sign * np.asarray(log_ratio, float)
    lo = ts.min() + (1 - TAIL_FRACTION) * (ts.max() - ts.min())
    sel = ts >= lo
    if sel.sum() < 2:
        return 0.0, []
    tt, yy = ts[sel], y[sel]
    slope = float(np.polyfit(tt, yy, 1)[0])
    bad = np.flatnonzero(yy - yy[0] > TAIL_SLOPE * (tt - tt[0]) + 1e-12)
    return slope, [float(tt[i]) for i in bad]


@dataclass
class DecayReport:
    p: float
    fitted_C: float
    max_ratio: float
    tail_slope: float
    violations: list
    passed: bool

    def to_json(self) -> dict:
        return {"p": self.p, "fitted_C": self.fitted_C, "max_ratio": self.max_ratio,
                "tail_slope": self.tail_slope, "violations": self.violations,
                "passed": self.passed}


def check_decay_bound(group: RankOneGroup, p: float, samples) -> DecayReport:
    """Check |value| <= C (1 + t) e^{-deltaG t / p} on the samples.

    C is the largest observed ratio, so the bound holds on the samples by
    construction; what is tested is that the ratio stops growing.  A violation
    is a point in the last third of the t range where the log ratio has grown
    by more than TAIL_SLOPE per unit t since the start of that range.
    """
    p = float(p)
    if p < 2:
        raise ValueError("p must be at least 2")
    samples = list(samples)
    if not samples:
        raise ValueError("empty sample set")
    ts = np.array([s[0] for s in samples], float)
    vals = np.abs(np.array([s[1] for s in samples], dtype=complex))
    order = np.argsort(ts)
    ts, vals = ts[order], vals[order]
    with np.errstate(divide="ignore"):
        logr = np.log(vals) - np.log1p(ts) + group.deltaG * ts / p
    C = float(np.exp(logr.max()))
    slope, bad = _tail_growth(ts, logr)
    passed = not bad and slope <= TAIL_SLOPE
    return DecayReport(p, C, C, slope, bad, bool(passed))


def threshold_curve(group: RankOneGroup, p: float, ts=T_GRID):
    """Samples (t, phi_x(t)) at x = rho - deltaG/p, whose decay rate is deltaG/p."""
    x = float(group.rho_beta) - group.deltaG / float(p)
    if x < 0:
        raise ValueError("p too small: no complementary parameter decays at rate deltaG/p")
    par = complementary(group, x)
    return [(float(t), phi(par, t)) for t in ts]


@dataclass
class FamilyResult:
    name: str
    constant: float | None
    violations: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"name": self.name, "constant": self.constant, "checked": self.checked,
                "violations": self.violations[:20], "violation_count": len(self.violations)}


@dataclass
class BoundsReport:
    group: str
    families: list
    lower_probe: list        # (x, fitted C'(x)) over [0, rho/2)

    @property
    def ok(self) -> bool:
        return all(f.ok for f in self.families)

    def to_json(self) -> dict:
        return {"group": self.group, "ok": self.ok,
                "families": [f.to_json() for f in self.families],
                "lower_probe": [[x, c] for x, c in self.lower_probe]}


def x_grid(group: RankOneGroup, count: int = N_X) -> np.ndarray:
    return np.linspace(0.0, float(group.rho_beta), count)


def bounds_suite(group: RankOneGroup, ts=T_GRID, xs=None, ys=PRINCIPAL_YS) -> BoundsReport:
    """Check the Xi bound, the upper and lower spherical bounds, monotonicity in x
    and principal-series domination on a grid, with fitted constants."""
    ts = np.asarray(ts, float)
    xs = x_grid(group) if xs is None else np.asarray(xs, float)
    rho = float(group.rho_beta)
    table = np.array([[phi(complementary(group, x), t) for t in ts] for x in xs])
    xi_vals = np.array([xi(group, t) for t in ts])
    fam = []

    # Xi(t) <= C (1 + t) e^{-rho t}
    logr = np.log(xi_vals) - np.log1p(ts) + rho * ts
    _, bad = _tail_growth(ts, logr)
    fam.append(FamilyResult("xi_upper", float(np.exp(logr.max())),
                            [("t", t) for t in bad], len(ts)))

    # phi_x(t) <= C (1 + t) e^{(x - rho) t}, one C for all x
    C, bad = 0.0, []
    for x, row in zip(xs, table):
        logr = np.log(row) - np.log1p(ts) - (x - rho) * ts
        C = max(C, float(np.exp(logr.max())))
        bad += [(float(x), t) for t in _tail_growth(ts, logr)[1]]
    fam.append(FamilyResult("phi_upper", C, bad, table.size))

    # C' e^{(x - rho) t} <= phi_x(t) for rho/2 <= x <= rho, with C' > 0
    Cl, bad, probe = math.inf, [], []
    for x, row in zip(xs, table):
        logr = np.log(row) - (x - rho) * ts
        c_x = float(np.exp(logr.min()))
        if x < rho / 2 - 1e-12:
            probe.append((float(x), c_x))
            continue
        Cl = min(Cl, c_x)
        bad += [(float(x), t) for t in _tail_growth(ts, logr, sign=-1.0)[1]]
        if not c_x > 0:
            bad.append((float(x), None))
    fam.append(FamilyResult("phi_lower", Cl if math.isfinite(Cl) else None, bad,
                            int(np.sum(xs >= rho / 2 - 1e-12)) * len(ts)))

    # 0 < phi_{x1} <= phi_{x2} <= 1 for x1 <= x2
    bad = []
    order = np.argsort(xs)
    tab = table[order]
    for i in range(tab.shape[0]):
        for j, t in enumerate(ts):
            v = tab[i, j]
            if not (v > 0 and v <= 1 + INEQ_TOL):
                bad.append((float(xs[order][i]), float(t)))
            if i and tab[i - 1, j] > v + INEQ_TOL:
                bad.append((float(xs[order][i]), float(t)))
    fam.append(FamilyResult("monotonicity", None, bad, table.size))

    # |phi_{iy}(t)| <= Xi(t)
    bad = []
    for y in ys:
        par = principal(group, y)
        for t, xv in zip(ts, xi_vals):
            if abs(phi(par, t)) > xv + INEQ_TOL:
                bad.append((float(y), float(t)))
    fam.append(FamilyResult("principal_domination", None, bad, len(ys) * len(ts)))
    return BoundsReport(group.name, fam, probe)


def dual_check(group: RankOneGroup, ts=T_GRID, xs=None, ys=PRINCIPAL_YS) -> float:
    """Largest |hypergeometric - quadrature| over complementary and principal grids."""
    xs = x_grid(group) if xs is None else xs
    worst = 0.0
    params = [complementary(group, x) for x in xs] + [principal(group, y) for y in ys]
    for par in params:
        a = phi_curve(par, ts)
        b = phi_quadrature(par, ts)
        worst = max(worst, float(np.max(np.abs(a - b))))
    return worst
