"""Rank-one groups SO(n,1) and SU(n,1).

Matrices act on F^{n+1} and preserve the form J = diag(1, ..., 1, -1).  The
base point of hyperbolic space is o = e_{n+1}; the displacement of g is
d(g.o, o) = arccosh |g[n, n]|, which equals the Cartan radius t of
g = k1 a_t k2.

SO(n,1) always means the identity component.  ``is_isometry`` checks the form
only; connectivity is the caller's business.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

FLOAT_TOL = 1e-9
CLAMP_WINDOW = 1e-9

_FIELD_ALIASES = {"real": "real", "so": "real", "r": "real",
                  "complex": "complex", "su": "complex", "c": "complex"}


class NotAnIsometryError(ValueError):
    pass


@dataclass(frozen=True)
class RankOneGroup:
    """SO(n,1) (field real) or SU(n,1) (field complex)."""

    field: str
    n: int
    m1: int
    m2: int
    deltaG: int
    rho_beta: Fraction

    @property
    def family(self) -> str:
        return "so" if self.field == "real" else "su"

    @property
    def dim(self) -> int:
        return self.n + 1

    @property
    def name(self) -> str:
        return f"{self.family.upper()}({self.n},1)"

    @property
    def jacobi(self) -> tuple[Fraction, Fraction]:
        """Jacobi-function parameters (alpha, beta)."""
        return Fraction(self.m1 + self.m2 - 1, 2), Fraction(self.m2 - 1, 2)

    def to_json(self) -> dict:
        return {"family": self.family, "n": self.n}

    @classmethod
    def from_json(cls, obj: dict) -> "RankOneGroup":
        return make_group(obj["family"], int(obj["n"]))

    def __str__(self):
        return self.name


def make_group(field: str, n: int) -> RankOneGroup:
    """Descriptor for SO(n,1) or SU(n,1); ``field`` accepts real/complex/so/su."""
    key = _FIELD_ALIASES.get(str(field).lower())
    if key is None:
        raise ValueError(f"unknown field {field!r}")
    n = int(n)
    if n < 2:
        raise ValueError("n must be at least 2")
    if key == "real":
        m1, m2 = n - 1, 0
    else:
        m1, m2 = 2 * n - 2, 1
    delta = m1 + 2 * m2
    return RankOneGroup(key, n, m1, m2, delta, Fraction(delta, 2))


SO21 = make_group("real", 2)
SO31 = make_group("real", 3)
SO41 = make_group("real", 4)
SU21 = make_group("complex", 2)
BUNDLED_GROUPS = (SO21, SO31, SO41, SU21)


def form_matrix(dim: int) -> np.ndarray:
    J = np.eye(dim)
    J[-1, -1] = -1.0
    return J


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v.strip())
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, float) and v.is_integer():
        return Fraction(int(v))
    raise TypeError(f"cannot read {v!r} as an exact rational")


class GroupElement:
    """Immutable (n+1)x(n+1) matrix in SO(n,1) or SU(n,1).

    ``entry_kind`` is "exact_rational" (entries are Fractions, real field only)
    or "float" (float64 / complex128).
    """

    __slots__ = ("group", "entries", "entry_kind", "_float")

    def __init__(self, group: RankOneGroup, entries, entry_kind: str = "float"):
        m = group.dim
        if entry_kind == "exact_rational":
            if group.field != "real":
                raise ValueError("exact entries are supported for SO(n,1) only")
            arr = np.empty((m, m), dtype=object)
            rows = list(entries)
            if len(rows) != m:
                raise ValueError(f"expected {m} rows")
            for i, row in enumerate(rows):
                row = list(row)
                if len(row) != m:
                    raise ValueError(f"expected {m} columns")
                for j, v in enumerate(row):
                    arr[i, j] = _to_fraction(v)
            fl = np.array([[float(v) for v in r] for r in arr], dtype=float)
        elif entry_kind == "float":
            dtype = complex if group.field == "complex" else float
            arr = np.array(entries, dtype=dtype)
            if arr.shape != (m, m):
                raise ValueError(f"expected a {m}x{m} matrix, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError("matrix entries must be finite")
            fl = arr
        else:
            raise ValueError(f"unknown entry kind {entry_kind!r}")
        arr.setflags(write=False)
        fl = np.array(fl)
        fl.setflags(write=False)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "entry_kind", entry_kind)
        object.__setattr__(self, "_float", fl)

    def __setattr__(self, name, value):
        raise AttributeError("GroupElement is immutable")

    @property
    def exact(self) -> bool:
        return self.entry_kind == "exact_rational"

    def as_float(self) -> np.ndarray:
        return self._float

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        if other.group != self.group:
            raise ValueError("elements of different groups")
        if self.exact and other.exact:
            return GroupElement(self.group, self.entries.dot(other.entries), "exact_rational")
        return GroupElement(self.group, self._float @ other._float, "float")

    def inverse(self) -> "GroupElement":
        # g* J g = J gives g^{-1} = J g* J
        m = self.group.dim
        sign = np.ones(m, dtype=int)
        sign[-1] = -1
        s = np.outer(sign, sign)
        if self.exact:
            return GroupElement(self.group, self.entries.T * s, "exact_rational")
        return GroupElement(self.group, self._float.conj().T * s, "float")

    def power(self, k: int) -> "GroupElement":
        if k < 0:
            return self.inverse().power(-k)
        out = identity(self.group, exact=self.exact)
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def equals(self, other: "GroupElement", tol: float = FLOAT_TOL) -> bool:
        if self.exact and other.exact:
            return bool(np.all(self.entries == other.entries))
        a, b = self._float, other._float
        scale = max(1.0, np.abs(a).max(), np.abs(b).max())
        return bool(np.abs(a - b).max() <= tol * scale)

    def to_json(self) -> list:
        if self.exact:
            return [[str(v) for v in row] for row in self.entries]
        if self.group.field == "complex":
            return [[[float(v.real), float(v.imag)] for v in row] for row in self._float]
        return [[float(v) for v in row] for row in self._float]

    @classmethod
    def from_json(cls, group: RankOneGroup, rows, entry_kind: str) -> "GroupElement":
        if entry_kind == "float" and group.field == "complex":
            rows = [[complex(v[0], v[1]) if isinstance(v, (list, tuple)) else v for v in r]
                    for r in rows]
        return cls(group, rows, entry_kind)

    def __repr__(self):
        return f"GroupElement({self.group.name}, {self.entry_kind}, {self.to_json()})"


def identity(group: RankOneGroup, exact: bool = True) -> GroupElement:
    m = group.dim
    if exact and group.field == "real":
        return GroupElement(group, [[int(i == j) for j in range(m)] for i in range(m)],
                            "exact_rational")
    return GroupElement(group, np.eye(m), "float")


def is_isometry(g: GroupElement, tol: float = FLOAT_TOL) -> bool:
    """True when g* J g = J (exactly for rational entries).

    For floats the tolerance is scaled by max(1, |g|_max^2), the size of the
    entries of g* J g.
    """
    m = g.group.dim
    if g.exact:
        J = np.diag([Fraction(1)] * (m - 1) + [Fraction(-1)])
        return bool(np.all(g.entries.T.dot(J).dot(g.entries) == J))
    a = g.as_float()
    J = form_matrix(m)
    err = np.abs(a.conj().T @ J @ a - J).max()
    return bool(err <= tol * max(1.0, np.abs(a).max() ** 2))


def displacement_from_corner(c, tol: float = CLAMP_WINDOW):
    """arccosh |c| with |c| in [1 - tol, 1) clamped to 0; vectorised."""
    c = np.abs(np.asarray(c)).astype(float)
    if np.any(c < 1.0 - tol):
        raise NotAnIsometryError("corner entry below 1: not in SO(n,1)/SU(n,1)")
    return np.arccosh(np.maximum(c, 1.0))


def cartan_radius(g: GroupElement) -> float:
    """Cartan radius t of g = k1 a_t k2, equal to d(g.o, o)."""
    # sinh t is the spatial norm of g.o; asinh keeps full precision near t = 0
    corner = g.entries[-1, -1]
    if g.exact:
        corner = abs(corner)
        if corner < 1:
            raise NotAnIsometryError("corner entry below 1")
        return float(math.asinh(math.sqrt(corner * corner - 1)))
    a = g.as_float()
    displacement_from_corner(a[-1, -1])
    return float(math.asinh(np.linalg.norm(a[:-1, -1])))


def haar_density(group: RankOneGroup, t) -> np.ndarray | float:
    """Density of Haar measure in polar coordinates, in the Cartan radius t."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be nonnegative")
    s = np.exp(t) - np.exp(-t)
    if group.field == "real":
        out = s ** (group.n - 1)
    else:
        out = (np.exp(2 * t) - np.exp(-2 * t)) * s ** (2 * group.n - 2)
    return float(out) if out.ndim == 0 else out


def cartan_element(group: RankOneGroup, t: float) -> GroupElement:
    """a_t = block(I, [[cosh t, sinh t], [sinh t, cosh t]])."""
    m = group.dim
    a = np.eye(m)
    a[m - 2, m - 2] = a[m - 1, m - 1] = math.cosh(t)
    a[m - 2, m - 1] = a[m - 1, m - 2] = math.sinh(t)
    return GroupElement(group, a, "float")


def random_compact(group: RankOneGroup, rng: np.random.Generator) -> GroupElement:
    """Haar-random k in K = SO(n) or S(U(n) x U(1)), embedded block-diagonally."""
    n = group.n
    if group.field == "real":
        z = rng.standard_normal((n, n))
    else:
        z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    k = np.eye(n + 1, dtype=q.dtype)
    if group.field == "real":
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        k[:n, :n] = q
    else:
        k[:n, :n] = q
        k[n, n] = 1.0 / np.linalg.det(q)
    return GroupElement(group, k, "float")


def random_element(group: RankOneGroup, t: float, rng: np.random.Generator) -> GroupElement:
    """k1 a_t k2 with Haar-random k1, k2."""
    return random_compact(group, rng) @ cartan_element(group, t) @ random_compact(group, rng)
