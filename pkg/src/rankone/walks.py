"""Spectral radius of the simple random walk (Kesten).

The norm of the Markov operator on l^2 equals lim p_{2m}(e)^{1/2m}.  Return
probabilities come from exact dynamic programs: word-length shells for free
groups, the lattice itself for Z^d, and the element distribution for a
matrix spec.  The limit is extrapolated by fitting
log p_{2m} = A + 2m log(rho) + C log m over the last quarter of the steps.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from rankone import kernels
from rankone.orbits import DiscreteGroupSpec

MIN_FIT_POINTS = 8
RESIDUAL_LIMIT = 1e-3
DEFAULT_SUPPORT = 200_000
KEY_RESOLUTION = 1e-9
FLOAT_EPS = 2.3e-16
MC_RETURN_TOL = 1e-6


@dataclass
class SpectralRadiusEstimate:
    value: float
    target: str
    steps: int
    method: str
    residual: float
    low_confidence: bool
    naive_root: float        # p_{2m}^{1/2m} at the last step, before extrapolation

    def to_json(self) -> dict:
        return {"value": self.value, "target": self.target, "steps": self.steps,
                "method": self.method, "residual": self.residual,
                "low_confidence": self.low_confidence, "naive_root": self.naive_root}


def parse_abstract(target: str) -> tuple[str, int]:
    """'free:k' -> ('free', k); 'Z', 'Z^d', 'Zd', 'abelian:d' -> ('abelian', d)."""
    s = target.strip().lower().replace(" ", "")
    m = re.fullmatch(r"free:(\d+)|f(\d+)", s)
    if m:
        k = int(m.group(1) or m.group(2))
        if k < 1:
            raise ValueError("free rank must be positive")
        return "free", k
    m = re.fullmatch(r"abelian:(\d+)|z\^?(\d*)", s)
    if m:
        d = int(m.group(1) or m.group(2) or 1)
        if not 1 <= d <= 3:
            raise ValueError("abelian rank must be 1, 2 or 3")
        return "abelian", d
    raise ValueError(f"unknown abstract group {target!r}")


def _fit(m, logp):
    """Extrapolate rho from the values log p_{2m} at the given m."""
    M = m.shape[0]
    start = max(0, M - max(MIN_FIT_POINTS, M // 4))
    mm, y = m[start:].astype(float), logp[start:]
    X = np.stack([np.ones_like(mm), 2 * mm, np.log(mm)], axis=1)
    coef, res, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    rms = float(np.sqrt(np.mean(resid ** 2)))
    return math.exp(coef[1]), rms


def _infinite_cyclic(spec: DiscreteGroupSpec) -> bool:
    """One hyperbolic generator and its inverse: the group is Z."""
    from rankone.groups import cartan_radius
    gens = spec.generators
    if len(gens) != 2 or not gens[0].inverse().equals(gens[1]):
        return False
    return cartan_radius(gens[0]) > 1e-6


def _spec_return_logprobs(spec: DiscreteGroupSpec, m_max: int, support: int):
    # exact distribution over group elements, keyed by scaled integer or rounded entries
    gens = [g.as_float() for g in spec.generators]
    exact = spec.entry_kind == "exact_rational"
    if exact:
        from rankone.orbits import _exact_generators
        den, ig = _exact_generators(spec)
        m = spec.group.dim
        gens = [row.reshape(m, m) for row in ig]
    q = 1.0 / len(gens)

    def key(a):
        if exact:
            return a.tobytes()
        # quantise relative to the corner entry, which carries the scale of g
        return (np.round(a / abs(a[-1, -1]) / KEY_RESOLUTION) + 0.0).tobytes()

    one = (den * np.eye(spec.group.dim, dtype=np.int64)) if exact else np.eye(spec.group.dim,
                                                                               dtype=gens[0].dtype)
    dist = {key(one): (one, 1.0)}
    ident = key(one)
    out = []
    for step in range(1, 2 * m_max + 1):
        nxt = {}
        for mat, p in dist.values():
            for g in gens:
                h = (mat @ g) // den if exact else mat @ g
                k = key(h)
                if k in nxt:
                    nxt[k] = (nxt[k][0], nxt[k][1] + p * q)
                else:
                    nxt[k] = (h, p * q)
        dist = nxt
        if not exact:
            # products of stored matrices carry absolute error ~ eps |g|^2; stop
            # once that reaches the key resolution and identities stop merging
            big = max(float(np.abs(mat).max()) for mat, _ in dist.values())
            if FLOAT_EPS * big * big > 0.1 * KEY_RESOLUTION:
                break
        if step % 2 == 0:
            out.append(math.log(dist[ident][1]) if ident in dist else -math.inf)
        if len(dist) > support:
            break
    return np.array(out)


def walk_spectral_radius(target, steps: int = 800, trials: int = 0, seed: int = 0,
                         support: int = DEFAULT_SUPPORT) -> SpectralRadiusEstimate:
    """Spectral radius of the simple random walk on a free group, Z^d or a matrix spec.

    ``target`` is 'free:k', 'Z', 'Z^d' / 'abelian:d', or a DiscreteGroupSpec; a
    spec certified free is routed to the free-group program of its rank.
    ``trials > 0`` switches matrix specs to a Monte Carlo estimate of the
    return probabilities (reproducible from ``seed``).
    """
    if steps < 2 or steps % 2:
        raise ValueError("steps must be even and at least 2")
    m_max = steps // 2
    if isinstance(target, DiscreteGroupSpec):
        if target.certified_free and target.free_rank:
            kind, k = "free", target.free_rank
            name = f"{target.label} (certified free, rank {k})"
        elif _infinite_cyclic(target):
            kind, k = "abelian", 1
            name = f"{target.label} (infinite cyclic)"
        else:
            kind, k, name = "spec", 0, target.label or "matrix spec"
    else:
        kind, k = parse_abstract(str(target))
        name = str(target)
    if kind == "free":
        logp = kernels.free_return_logprobs(k, m_max)
        method = "free-group shell DP"
    elif kind == "abelian":
        logp = kernels.lattice_return_logprobs(k, m_max)
        method = "lattice DP"
    elif trials > 0:
        logp = _monte_carlo_logprobs(target, m_max, trials, seed)
        method = "monte carlo"
    else:
        logp = _spec_return_logprobs(target, m_max, support)
        method = "element distribution DP"
    finite = np.isfinite(logp)
    reached = logp.shape[0]
    low = reached < 4 * MIN_FIT_POINTS or not finite.all()
    if finite.sum() < MIN_FIT_POINTS:
        val, rms, naive = float("nan"), float("inf"), float("nan")
    else:
        m = np.flatnonzero(finite) + 1
        val, rms = _fit(m, logp[finite])
        naive = math.exp(logp[finite][-1] / (2 * m[-1]))
        if rms > RESIDUAL_LIMIT or val > 1 + 1e-3:
            low = True
        val = min(val, 1.0)
    return SpectralRadiusEstimate(float(val), name, 2 * reached, method, rms, bool(low), naive)


def _monte_carlo_logprobs(spec, m_max, trials, seed):
    rng = np.random.default_rng(seed)
    gens = np.array([g.as_float() for g in spec.generators])
    m = spec.group.dim
    mats = np.repeat(np.eye(m, dtype=gens.dtype)[None], trials, axis=0)
    out = []
    for step in range(1, 2 * m_max + 1):
        pick = rng.integers(0, gens.shape[0], trials)
        mats = mats @ gens[pick]
        scale = np.maximum(1.0, np.abs(mats).reshape(trials, -1).max(axis=1))
        # a walker far out cannot be seen returning to within MC_RETURN_TOL: stop there
        if FLOAT_EPS * float(scale.max()) ** 2 > 0.1 * MC_RETURN_TOL:
            break
        if step % 2 == 0:
            err = np.abs(mats - np.eye(m)).reshape(trials, -1).max(axis=1)
            hits = int(np.sum(err <= MC_RETURN_TOL * scale))
            out.append(math.log(hits / trials) if hits else -math.inf)
    return np.array(out)
