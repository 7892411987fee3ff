"""Finitely generated subgroups and breadth-first orbit balls.

A ball of radius R is the set of subgroup elements g with d(g.o, o) <= R.  It
is built shell by shell over the Cayley graph, keeping every word whose
displacement stays below R + slack (slack defaults to the largest generator
displacement, so one overshooting step is always explored).

Exact specs run on scaled integers: every element is stored as N = D * g with
a fixed common denominator D, and dedup is exact.  Float specs dedup within a
relative tolerance.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from pathlib import Path

import numpy as np

from rankone import kernels
from rankone.groups import (FLOAT_TOL, GroupElement, RankOneGroup, cartan_element,
                            cartan_radius, identity, is_isometry, make_group, SO21)

DEFAULT_BUDGET = 20_000_000
BOUNDARY_EPS = 1e-9          # displacement slack on the ball boundary (float noise)
COLLISION_WARN_RATE = 1e-3
CACHE_ENV = "RANKONE_CACHE_DIR"
_CACHE_VERSION = "2"


@dataclass(frozen=True, eq=False)
class DiscreteGroupSpec:
    """Generators of a discrete subgroup; inverse-closed and duplicate-free."""

    group: RankOneGroup
    generators: tuple
    label: str = ""
    certified_free: bool = False
    free_rank: int | None = None

    @property
    def entry_kind(self) -> str:
        return "exact_rational" if all(g.exact for g in self.generators) else "float"

    @property
    def max_generator_displacement(self) -> float:
        return max((cartan_radius(g) for g in self.generators), default=0.0)

    def to_json(self) -> dict:
        out = {"group": self.group.to_json(),
               "generators": [g.to_json() for g in self.generators],
               "entry_kind": self.entry_kind,
               "label": self.label}
        if self.certified_free:
            out["certified_free"] = True
            out["free_rank"] = self.free_rank
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "DiscreteGroupSpec":
        group = RankOneGroup.from_json(obj["group"])
        kind = obj.get("entry_kind", "float")
        gens = [GroupElement.from_json(group, rows, kind) for rows in obj["generators"]]
        return make_spec(group, gens, obj.get("label", ""),
                         certified_free=bool(obj.get("certified_free", False)),
                         free_rank=obj.get("free_rank"))

    def spec_hash(self) -> str:
        body = json.dumps({"group": self.group.to_json(),
                           "generators": [g.to_json() for g in self.generators],
                           "entry_kind": self.entry_kind}, sort_keys=True)
        return hashlib.sha256(body.encode()).hexdigest()

    def conjugate(self, h: GroupElement) -> "DiscreteGroupSpec":
        """Spec generated by h g h^{-1}."""
        hi = h.inverse()
        return make_spec(self.group, [h @ g @ hi for g in self.generators],
                         self.label + " (conjugated)", self.certified_free, self.free_rank)


def make_spec(group: RankOneGroup, generators, label: str = "", certified_free: bool = False,
              free_rank: int | None = None) -> DiscreteGroupSpec:
    """Validate generators, add inverses and drop duplicates and the identity."""
    gens = list(generators)
    if not gens:
        raise ValueError("at least one generator is required")
    exact = all(g.exact for g in gens)
    if not exact:
        gens = [GroupElement(group, g.as_float(), "float") for g in gens]
    one = identity(group, exact=exact)
    out = []
    for g in gens:
        if g.group != group:
            raise ValueError("generator belongs to a different group")
        if not is_isometry(g):
            raise ValueError(f"generator does not preserve the form: {g.to_json()}")
        for h in (g, g.inverse()):
            if h.equals(one) or any(h.equals(o) for o in out):
                continue
            out.append(h)
    if not out:
        raise ValueError("all generators are trivial")
    return DiscreteGroupSpec(group, tuple(out), label, certified_free, free_rank)


@dataclass(eq=False)
class OrbitBall:
    """Elements of a subgroup with displacement <= radius.

    ``elements`` holds (N, m, m) matrices: scaled integers (true entries are
    elements / denominator) for exact balls, floats otherwise.
    ``word_lengths`` are BFS depths, an upper bound on the word length.
    """

    spec: DiscreteGroupSpec
    radius: float
    elements: np.ndarray
    displacements: np.ndarray
    word_lengths: np.ndarray
    denominator: int | None
    tolerance: float
    complete: bool
    prune_slack: float
    collisions: int = 0

    @property
    def dedup_kind(self) -> str:
        if self.denominator is not None:
            return "exact"
        return "reduced-words" if self.spec.certified_free else f"rounded({self.tolerance:g})"

    def __len__(self):
        return int(self.displacements.shape[0])

    def element(self, i: int) -> GroupElement:
        a = self.elements[i]
        if self.denominator is not None:
            rows = [[Fraction(int(v), self.denominator) for v in r] for r in a]
            return GroupElement(self.spec.group, rows, "exact_rational")
        return GroupElement(self.spec.group, a, "float")

    @property
    def points(self) -> list:
        """List of (element, displacement); materialises every matrix."""
        return [(self.element(i), float(self.displacements[i])) for i in range(len(self))]

    def counting(self, radii) -> np.ndarray:
        """N(r) = #{g in ball : d(g) <= r} for each r."""
        d = np.sort(self.displacements)
        return np.searchsorted(d, np.asarray(radii, float) + BOUNDARY_EPS, side="right")

    def keys(self) -> set:
        """Hashable element keys; exact balls only."""
        if self.denominator is None:
            raise ValueError("element keys are only defined for exact balls")
        a = np.ascontiguousarray(self.elements.astype(np.int64)).reshape(len(self), -1)
        return {row.tobytes() for row in a}


def _lcm(a, b):
    return a * b // math.gcd(a, b)


def _exact_generators(spec):
    den = reduce(_lcm, (v.denominator for g in spec.generators for v in g.entries.flat), 1)
    m = spec.group.dim
    gens = np.array([[int(v * den) for v in g.entries.flat] for g in spec.generators],
                     dtype=np.int64).reshape(-1, m * m)
    return den, gens


def _append(parts, new, d, depth, total, budget):
    room = budget - total
    if new.shape[0] > room:
        new, d = new[:room], d[:room]
    parts[0].append(new)
    parts[1].append(d)
    parts[2].append(np.full(d.shape[0], depth, np.int32))
    return total + d.shape[0]


def _lex_order(rows):
    if rows.shape[0] <= 1:
        return np.arange(rows.shape[0])
    if np.iscomplexobj(rows):
        rows = rows.view(np.float64)
    return np.lexsort(rows.T[::-1])


def _bfs_exact(spec, R, slack, budget):
    m = spec.group.dim
    den, gens = _exact_generators(spec)
    reach = math.cosh(R + slack)
    if den * reach * max(1, int(np.abs(gens).max())) * m > 2 ** 62:
        raise OverflowError("radius too large for exact int64 enumeration; use float entries")
    corner_lim = int(math.floor(den * reach * (1 + 1e-12)))
    store = np.int32 if corner_lim < 2 ** 31 - 1 else np.int64
    ident = (den * np.eye(m, dtype=np.int64)).reshape(1, m * m)
    parts = ([ident.astype(store)], [np.zeros(1)], [np.zeros(1, np.int32)])
    total, complete, depth = 1, True, 0
    prev, cur = np.empty((0, m * m), np.int64), ident
    while cur.shape[0]:
        depth += 1
        prods, corners, inexact = kernels.expand_exact(cur, gens, m, den, corner_lim)
        if inexact:
            raise ValueError("products leave the rational lattice of the generators; "
                             "use float entries for this spec")
        keep = kernels.dedup_exact(np.concatenate([prev, cur]), prods)
        new, nc = prods[keep], corners[keep]
        order = _lex_order(new)
        new, nc = new[order], nc[order]
        d = np.arccosh(np.maximum(np.abs(nc) / den, 1.0))
        inball = d <= R + BOUNDARY_EPS
        room = budget - total
        total = _append(parts, new[inball].astype(store), d[inball], depth, total, budget)
        if int(inball.sum()) > room:
            complete = False
            break
        prev, cur = cur, new
    els = np.concatenate(parts[0]).reshape(-1, m, m)
    return els, np.concatenate(parts[1]), np.concatenate(parts[2]), den, complete, 0


def _inverse_index(spec, j):
    inv = spec.generators[j].inverse()
    for i, g in enumerate(spec.generators):
        if g.equals(inv):
            return i
    raise ValueError("generator set is not inverse-closed")


def _bfs_float(spec, R, slack, budget, tol, seed=0):
    m = spec.group.dim
    cplx = spec.group.field == "complex"
    dtype = np.complex128 if cplx else np.float64
    gens = np.array([g.as_float() for g in spec.generators], dtype=dtype).reshape(-1, m * m)
    corner_lim = math.cosh(R + slack) * (1 + 1e-9)
    proj = np.random.default_rng(seed).standard_normal(m * m * (2 if cplx else 1))
    ident = np.eye(m, dtype=dtype).reshape(1, m * m)
    parts = ([ident], [np.zeros(1)], [np.zeros(1, np.int32)])
    total, complete, depth, collisions, inserted = 1, True, 0, 0, 0
    prev, cur = np.empty((0, m * m), dtype), ident

    def real_view(a):
        return np.ascontiguousarray(a).view(np.float64) if cplx else a

    inverse_of = np.array([_inverse_index(spec, j) for j in range(len(spec.generators))],
                          dtype=np.int64)
    cur_last = np.full(1, -1, np.int64)
    free = bool(spec.certified_free)
    while cur.shape[0]:
        depth += 1
        prods, corners, gidx = kernels.expand_float(cur, gens, m, corner_lim, cur_last,
                                                    inverse_of)
        if free:
            # certified free: distinct reduced words are distinct elements
            keep, coll = np.ones(prods.shape[0], bool), 0
        else:
            keep, coll = kernels.dedup_float(real_view(np.concatenate([prev, cur])),
                                             real_view(prods), proj, tol)
        collisions += int(coll)
        new, nc, ng = prods[keep], corners[keep], gidx[keep]
        inserted += new.shape[0]
        order = _lex_order(new)
        new, nc, cur_last = new[order], nc[order], ng[order]
        d = np.arccosh(np.maximum(nc, 1.0))
        inball = d <= R + BOUNDARY_EPS
        room = budget - total
        total = _append(parts, new[inball], d[inball], depth, total, budget)
        if int(inball.sum()) > room:
            complete = False
            break
        prev, cur = cur, new
    if inserted and collisions / inserted > COLLISION_WARN_RATE:
        warnings.warn(f"float dedup collision rate {collisions / inserted:.2e} exceeds "
                      f"{COLLISION_WARN_RATE:g}; consider a different tolerance", RuntimeWarning)
    els = np.concatenate(parts[0]).reshape(-1, m, m)
    return els, np.concatenate(parts[1]), np.concatenate(parts[2]), None, complete, collisions


def enumerate_ball(spec: DiscreteGroupSpec, R: float, budget: int = DEFAULT_BUDGET,
                   tolerance: float = FLOAT_TOL, prune_slack: float | None = None,
                   cache: "BallCache | None" = None) -> OrbitBall:
    """Breadth-first enumeration of the orbit ball of radius R.

    If more than ``budget`` elements fall in the ball, the result holds the
    first ``budget`` of them (in BFS order) and is flagged incomplete.
    """
    if R < 0:
        raise ValueError("R must be nonnegative")
    if budget < 1:
        raise ValueError("budget must be positive")
    slack = spec.max_generator_displacement if prune_slack is None else float(prune_slack)
    if cache is not None:
        hit = cache.get(spec, R, tolerance, slack, budget)
        if hit is not None:
            return hit
    if spec.entry_kind == "exact_rational":
        res = _bfs_exact(spec, R, slack, budget)
    else:
        res = _bfs_float(spec, R, slack, budget, tolerance)
    els, d, w, den, complete, coll = res
    ball = OrbitBall(spec, float(R), els, d, w, den, tolerance, complete, slack, coll)
    if cache is not None:
        cache.put(ball, budget)
    return ball


class BallCache:
    """Directory of cached balls keyed by (spec hash, R, tolerance, slack)."""

    def __init__(self, directory: str | os.PathLike | None = None):
        if directory is None:
            directory = os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "rankone"
        self.directory = Path(directory)

    def _path(self, spec, R, tol, slack):
        key = json.dumps([_CACHE_VERSION, spec.spec_hash(), repr(float(R)), repr(float(tol)),
                          repr(float(slack))])
        return self.directory / (hashlib.sha256(key.encode()).hexdigest()[:32] + ".npz")

    def get(self, spec, R, tol, slack, budget=DEFAULT_BUDGET):
        path = self._path(spec, R, tol, slack)
        if not path.exists():
            return None
        with np.load(path, allow_pickle=False) as z:
            complete = bool(z["complete"])
            if not complete and int(z["budget"]) != budget:
                return None
            den = int(z["denominator"])
            return OrbitBall(spec, float(R), z["elements"], z["displacements"],
                             z["word_lengths"], den if den > 0 else None, float(tol),
                             complete, float(slack), int(z["collisions"]))

    def put(self, ball: OrbitBall, budget=DEFAULT_BUDGET):
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self._path(ball.spec, ball.radius, ball.tolerance, ball.prune_slack)
        tmp = path.with_suffix(".tmp.npz")
        np.savez(tmp, elements=ball.elements, displacements=ball.displacements,
                 word_lengths=ball.word_lengths, denominator=ball.denominator or 0,
                 complete=ball.complete, collisions=ball.collisions, budget=budget)
        os.replace(tmp, path)


def save_ball_json(ball: OrbitBall, fh) -> None:
    """Write a ball as JSON: spec, radius, and the (matrix, displacement) list."""
    json.dump({"spec": ball.spec.to_json(), "radius": ball.radius,
               "complete": ball.complete, "dedup_kind": ball.dedup_kind,
               "points": [[g.to_json(), d] for g, d in ball.points]}, fh)


# -- bundled specs -------------------------------------------------------------

def sym2(p, q, r, s) -> GroupElement:
    """Image of [[p, q], [r, s]] in SL(2,R) under the symmetric-square map into SO(2,1).

    Coordinates (u, v, w) on symmetric matrices [[w + u, v], [v, w - u]], whose
    determinant w^2 - u^2 - v^2 is preserved by X -> g X g^T.
    """
    p, q, r, s = (Fraction(x) for x in (p, q, r, s))
    if p * s - q * r != 1:
        raise ValueError("matrix must have determinant 1")

    def act(X):
        a, b, c, d = X
        # g X g^T for X = [[a, b], [c, d]]
        m11 = p * (p * a + q * c) + q * (p * b + q * d)
        m12 = p * (r * a + s * c) + q * (r * b + s * d)
        m22 = r * (r * a + s * c) + s * (r * b + s * d)
        return (m11 - m22) / 2, m12, (m11 + m22) / 2

    basis = [(1, 0, 0, -1), (0, 1, 1, 0), (1, 0, 0, 1)]
    cols = [act(tuple(Fraction(v) for v in X)) for X in basis]
    rows = [[cols[j][i] for j in range(3)] for i in range(3)]
    return GroupElement(SO21, rows, "exact_rational")


def modular_spec() -> DiscreteGroupSpec:
    """PSL(2,Z) in SO(2,1), generated by the images of S and T."""
    S = sym2(0, -1, 1, 0)
    T = sym2(1, 1, 0, 1)
    return make_spec(SO21, [S, T], "modular group PSL(2,Z)")


def cyclic_spec(t: float = 1.0, group: RankOneGroup = SO21) -> DiscreteGroupSpec:
    """Infinite cyclic group generated by the Cartan element a_t."""
    return make_spec(group, [cartan_element(group, t)], f"cyclic <a_{t:g}>")


def load_spec(text_or_path: str) -> DiscreteGroupSpec:
    """Spec from a JSON file path or an inline JSON string."""
    s = str(text_or_path).strip()
    if s.startswith("{"):
        return DiscreteGroupSpec.from_json(json.loads(s))
    with open(s) as fh:
        return DiscreteGroupSpec.from_json(json.load(fh))
