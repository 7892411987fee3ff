"""Exact arithmetic of L^p exponents.

A representation is strongly L^p when a dense set of its matrix coefficients
lies in L^{p+eps} for every eps > 0; ``LpExponent.plus_epsilon`` carries that
"+eps".  Exponents are Fractions, with infinity as a separate flag and
saturating arithmetic.  Everything here is exact: no floats enter.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from rankone.groups import RankOneGroup


def rational(v) -> Fraction:
    """Read an exact rational from a Fraction, int, "a/b" string or float."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(repr(v))
    if isinstance(v, str):
        return Fraction(v.strip())
    raise TypeError(f"cannot read {v!r} as a rational")


def _delta(group_or_delta) -> Fraction:
    if isinstance(group_or_delta, RankOneGroup):
        return Fraction(group_or_delta.deltaG)
    return rational(group_or_delta)


@dataclass(frozen=True)
class LpExponent:
    p: Fraction = Fraction(0)
    infinite: bool = False
    plus_epsilon: bool = False

    def __post_init__(self):
        object.__setattr__(self, "p", rational(self.p) if not self.infinite else Fraction(0))
        if self.p < 0:
            raise ValueError("exponent must be nonnegative")

    @classmethod
    def inf(cls, plus_epsilon: bool = False) -> "LpExponent":
        return cls(Fraction(0), True, plus_epsilon)

    @classmethod
    def parse(cls, s, plus_epsilon: bool = False) -> "LpExponent":
        """'a/b', 'a', 'inf' or '∞'; a trailing '+' sets plus_epsilon."""
        if isinstance(s, LpExponent):
            return s
        if not isinstance(s, str):
            return cls(rational(s), False, plus_epsilon)
        s = s.strip()
        if s.endswith("+"):
            s, plus_epsilon = s[:-1].strip(), True
        if s.lower() in ("inf", "infinity", "∞", "+inf"):
            return cls.inf(plus_epsilon)
        return cls(rational(s), False, plus_epsilon)

    def reciprocal(self) -> Fraction:
        if self.infinite:
            return Fraction(0)
        if self.p == 0:
            raise ZeroDivisionError("reciprocal of exponent 0")
        return 1 / self.p

    def _key(self):
        return (1, Fraction(0)) if self.infinite else (0, self.p)

    def __lt__(self, other):
        return self._key() < other._key()

    def __le__(self, other):
        return self._key() <= other._key()

    def __str__(self):
        core = "inf" if self.infinite else str(self.p)
        return core + ("+" if self.plus_epsilon else "")

    def to_json(self) -> dict:
        return {"p": "inf" if self.infinite else str(self.p), "plus_epsilon": self.plus_epsilon}


def _from_reciprocal(r: Fraction, plus_epsilon: bool) -> LpExponent:
    if r == 0:
        return LpExponent.inf(plus_epsilon)
    return LpExponent(1 / r, False, plus_epsilon)


def complementary_threshold(group, x) -> LpExponent:
    """Strong L^p exponent of the complementary series at parameter x (beta units).

    p (deltaG/2 - x) >= deltaG at the threshold, i.e. p = 2 deltaG / (deltaG - 2x).
    """
    d = _delta(group)
    x = rational(x)
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x > d / 2:
        raise ValueError(f"x must not exceed deltaG/2 = {d / 2}")
    if x == d / 2:
        return LpExponent.inf(True)
    return LpExponent(2 * d / (d - 2 * x), False, True)


def threshold_parameter(group, p) -> Fraction:
    """Inverse of complementary_threshold: the x whose threshold exponent is p."""
    d = _delta(group)
    p = LpExponent.parse(p)
    if not p.infinite and p.p < 2:
        raise ValueError("p must be at least 2")
    return d / 2 - d * p.reciprocal()


def dictionary_parameter(group, p) -> Fraction:
    """x with 1/p = x / (2 rho), the parameter used in the tensor-product plan."""
    d = _delta(group)
    p = LpExponent.parse(p)
    if not p.infinite and p.p < 2:
        raise ValueError("p must be at least 2")
    return d * p.reciprocal()


def restrict_exponent(p, delta_sub, delta_g) -> LpExponent:
    """Exponent of the restriction to a discrete subgroup: (delta_sub / delta_g) p."""
    p = LpExponent.parse(p)
    ds, dg = rational(delta_sub), rational(delta_g)
    if not p.infinite and p.p < 2:
        raise ValueError("restriction needs p >= 2")
    if dg <= 0 or not 0 <= ds <= dg:
        raise ValueError("need 0 <= delta_sub <= delta_g with delta_g > 0")
    if p.infinite:
        return LpExponent.inf(p.plus_epsilon) if ds > 0 else LpExponent(0, False, p.plus_epsilon)
    return LpExponent(ds / dg * p.p, False, p.plus_epsilon)


@dataclass(frozen=True)
class QuotientExponent:
    exponent: LpExponent
    sharp: bool
    note: str = ""

    def to_json(self) -> dict:
        return {"exponent": self.exponent.to_json(), "sharp": self.sharp, "note": self.note}


def _check_pair(delta_g, delta_gamma):
    dg, dr = rational(delta_g), rational(delta_gamma)
    if dg <= 0:
        raise ValueError("deltaG must be positive")
    if not 0 <= dr <= dg:
        raise ValueError("need 0 <= deltaGamma <= deltaG")
    return dg, dr


def quotient_exponent(delta_g, delta_gamma) -> QuotientExponent:
    """Exponent of L^2(G/Gamma) minus constants: max{2, deltaG/(deltaG - deltaGamma)}."""
    dg, dr = _check_pair(delta_g, delta_gamma)
    if dr == dg:
        return QuotientExponent(LpExponent.inf(True), False, "no decay guarantee")
    p = max(Fraction(2), dg / (dg - dr))
    return QuotientExponent(LpExponent(p, False, True), p > 2)


def laplacian_bottom(delta_g, delta_gamma) -> Fraction:
    """Bottom of the spectrum of the Laplacian on Gamma backslash H."""
    dg, dr = _check_pair(delta_g, delta_gamma)
    if dr > dg / 2:
        return dr * (dg - dr)
    return (dg / 2) ** 2


@dataclass(frozen=True)
class TensorPlan:
    p: Fraction
    q: Fraction              # 1/q + 1/p = 1/2
    strategy: str            # single | squared
    x: Fraction              # parameter of the representation used
    t: Fraction | None       # 2q for the squared strategy
    constant_factor: str

    def to_json(self) -> dict:
        return {"p": str(self.p), "q": str(self.q), "strategy": self.strategy, "x": str(self.x),
                "t": None if self.t is None else str(self.t),
                "constant_factor": self.constant_factor}


def tensor_plan(group, p) -> TensorPlan:
    """Bookkeeping of the Hoelder argument that a strongly L^p spherical
    coefficient decays like e^{-deltaG t / p}."""
    d = _delta(group)
    rho = d / 2
    p = rational(p)
    if p <= 2:
        raise ValueError("p must exceed 2")
    q = 1 / (Fraction(1, 2) - 1 / p)
    if p <= 4:
        return TensorPlan(p, q, "single", rho - d / q, None, "1/C'")
    t = 2 * q
    return TensorPlan(p, q, "squared", rho - d / t, t, "1/C'^2")


def hoelder_combine(p, q) -> LpExponent:
    """r with 1/r = 1/p + 1/q."""
    p, q = LpExponent.parse(p), LpExponent.parse(q)
    for e in (p, q):
        if not e.infinite and e.p < 1:
            raise ValueError("Hoelder exponents must be at least 1")
    return _from_reciprocal(p.reciprocal() + q.reciprocal(), p.plus_epsilon or q.plus_epsilon)


@dataclass(frozen=True)
class ExponentScenario:
    deltaG: Fraction
    deltaGamma: Fraction
    deltaKer: Fraction | None = None
    deltaIm: Fraction | None = None

    def __post_init__(self):
        dg = rational(self.deltaG)
        object.__setattr__(self, "deltaG", dg)
        for name in ("deltaGamma", "deltaKer", "deltaIm"):
            v = getattr(self, name)
            if v is None:
                continue
            v = rational(v)
            if not 0 <= v <= dg:
                raise ValueError(f"{name} must lie in [0, deltaG]")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class Thm14Result:
    rhs: Fraction
    holds: bool
    equality: bool
    kernel_lower_bound: Fraction

    def to_json(self) -> dict:
        return {"rhs": str(self.rhs), "holds": self.holds, "equality": self.equality,
                "kernel_lower_bound": str(self.kernel_lower_bound)}


def kernel_lower_bound(delta_gamma, delta_im) -> Fraction:
    """Smallest delta(Ker) compatible with the kernel/image inequality."""
    dr, di = rational(delta_gamma), rational(delta_im)
    m = max(di / 2, Fraction(1))
    if dr / 2 + m >= dr:
        return Fraction(0)
    return dr - m


def thm14_bound(sc: ExponentScenario) -> Thm14Result:
    """delta(Gamma) <= max{delta(Ker), delta(Gamma)/2} + max{delta(Im)/2, 1}."""
    if sc.deltaKer is None or sc.deltaIm is None:
        raise ValueError("deltaKer and deltaIm are required")
    rhs = max(sc.deltaKer, sc.deltaGamma / 2) + max(sc.deltaIm / 2, Fraction(1))
    return Thm14Result(rhs, sc.deltaGamma <= rhs, sc.deltaGamma == rhs,
                       kernel_lower_bound(sc.deltaGamma, sc.deltaIm))


@dataclass(frozen=True)
class Thm16Result:
    bound: Fraction          # delta(Gamma) - 1
    holds: bool
    equality: bool
    strict_mode: bool

    def to_json(self) -> dict:
        return {"bound": str(self.bound), "holds": self.holds, "equality": self.equality,
                "strict_mode": self.strict_mode}


def thm16_bound(delta_gamma, delta_c, strict_mode: bool = False) -> Thm16Result:
    """Edge-stabilizer inequality delta(C) >= delta(Gamma) - 1 (strict in strict mode)."""
    dr, dc = rational(delta_gamma), rational(delta_c)
    if dr < 0 or dc < 0:
        raise ValueError("critical exponents are nonnegative")
    b = dr - 1
    holds = dc > b if strict_mode else dc >= b
    return Thm16Result(b, holds, dc == b, bool(strict_mode))


def p_of_group(group: RankOneGroup) -> Fraction:
    """Dictionary value p(G): the exponent at which first cohomology appears."""
    if group.field == "real":
        return Fraction(0) if group.n == 2 else Fraction(group.n - 1)
    return Fraction(2 * group.n)
