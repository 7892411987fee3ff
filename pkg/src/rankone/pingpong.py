"""Ping-pong pairs: free subgroups <a^n, b^n> with numerically certified tables.

A hyperbolic element g fixes two points of the visual boundary: attracting
and repelling.  With a cap U(p) of chordal radius r around each of the four
fixed points of a and b, the table is certified at power n when every g in
{a^n, a^-n, b^n, b^-n} maps the complement of its repelling cap into its
attracting cap.  The check is done on a dense sample of boundary points
(including the cap rims), so certification is numerical, not a proof.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from rankone.groups import GroupElement, RankOneGroup, SO21, cartan_element, cartan_radius
from rankone.orbits import DiscreteGroupSpec, make_spec

CAP_FRACTION = 0.45   # cap radius as a fraction of the smallest fixed-point separation
MIN_SEPARATION = 1e-6


@dataclass
class PingPongCertificate:
    n: int
    certified: bool
    cap_radius: float
    worst_margin: float     # smallest (r - distance to attracting point) over samples
    samples: int


def boundary_fixed_points(g: GroupElement) -> tuple[np.ndarray, np.ndarray]:
    """(attracting, repelling) boundary points of a hyperbolic element."""
    w, v = np.linalg.eig(g.as_float())
    mags = np.abs(w)
    i_max, i_min = int(np.argmax(mags)), int(np.argmin(mags))
    if mags[i_max] <= 1 + 1e-9:
        raise ValueError("element is not hyperbolic")
    pts = []
    for i in (i_max, i_min):
        vec = v[:, i]
        xi = vec[:-1] / vec[-1]
        if g.group.field == "real":
            xi = xi.real
        pts.append(xi / np.linalg.norm(xi))
    return pts[0], pts[1]


def boundary_action(g: GroupElement, xi: np.ndarray) -> np.ndarray:
    """Image of boundary points xi (rows, unit vectors) under g."""
    xi = np.atleast_2d(xi)
    hom = np.concatenate([xi, np.ones((xi.shape[0], 1))], axis=1)
    out = hom @ g.as_float().T
    res = out[:, :-1] / out[:, -1:]
    return res.real if g.group.field == "real" else res


def _sphere_samples(group: RankOneGroup, count: int, rng) -> np.ndarray:
    n = group.n
    if group.field == "real":
        if n == 2:
            th = np.linspace(0, 2 * np.pi, count, endpoint=False)
            return np.stack([np.cos(th), np.sin(th)], axis=1)
        z = rng.standard_normal((count, n))
    else:
        z = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def _rim_samples(group, centre, r, count, rng):
    # points at chordal distance exactly r from centre
    cand = _sphere_samples(group, count * 4, rng)
    out = []
    for p in cand:
        # move along the great circle from centre towards p until distance r
        d = p - centre * np.vdot(centre, p)
        nd = np.linalg.norm(d)
        if nd < 1e-12:
            continue
        d = d / nd
        ang = 2 * math.asin(min(1.0, r / 2))
        out.append(math.cos(ang) * centre + math.sin(ang) * d)
        if len(out) == count:
            break
    return np.array(out)


def certify_pingpong(a: GroupElement, b: GroupElement, n: int, samples: int = 4000,
                     seed: int = 0) -> PingPongCertificate:
    """Check the ping-pong table for a^n, b^n on sampled boundary points."""
    group = a.group
    pa, ma = boundary_fixed_points(a)
    pb, mb = boundary_fixed_points(b)
    pts = [pa, ma, pb, mb]
    sep = min(np.linalg.norm(pts[i] - pts[j]) for i in range(4) for j in range(i + 1, 4))
    if sep < MIN_SEPARATION:
        raise ValueError("axis endpoints of a and b coincide")
    r = CAP_FRACTION * sep
    rng = np.random.default_rng(seed)
    base = _sphere_samples(group, samples, rng)
    rims = np.concatenate([_rim_samples(group, p, r, max(8, samples // 20), rng) for p in pts])
    probe = np.concatenate([base, rims])
    worst = np.inf
    an, bn = a.power(n), b.power(n)
    for g, attr, rep in ((an, pa, ma), (an.inverse(), ma, pa), (bn, pb, mb), (bn.inverse(), mb, pb)):
        outside = probe[np.linalg.norm(probe - rep, axis=1) >= r * (1 - 1e-12)]
        img = boundary_action(g, outside)
        margin = r - np.linalg.norm(img - attr, axis=1)
        worst = min(worst, float(margin.min()))
    return PingPongCertificate(n, bool(worst > 0), float(r), float(worst), int(probe.shape[0]))


def pingpong_powers(a: GroupElement, b: GroupElement, n: int, samples: int = 4000,
                    seed: int = 0) -> DiscreteGroupSpec:
    """Spec generated by a^n and b^n, marked certified-free when the table checks out."""
    if n < 1:
        raise ValueError("n must be positive")
    for g in (a, b):
        if cartan_radius(g) <= 0:
            raise ValueError("a and b must be hyperbolic")
    cert = certify_pingpong(a, b, n, samples, seed)
    label = f"ping-pong <a^{n}, b^{n}>" + ("" if cert.certified else " (uncertified)")
    return make_spec(a.group, [a.power(n), b.power(n)], label,
                     certified_free=cert.certified, free_rank=2 if cert.certified else None)


def pingpong_threshold(a: GroupElement, b: GroupElement, n_max: int = 64, **kw) -> int | None:
    """Smallest n <= n_max whose table certifies, or None."""
    for n in range(1, n_max + 1):
        if certify_pingpong(a, b, n, **kw).certified:
            return n
    return None


def rotation(group: RankOneGroup, angle: float) -> GroupElement:
    """Rotation by ``angle`` in the plane of the first and n-th coordinates (an element of K)."""
    m = group.dim
    k = np.eye(m)
    i, j = m - 2, 0
    c, s = math.cos(angle), math.sin(angle)
    k[i, i], k[i, j], k[j, i], k[j, j] = c, -s, s, c
    return GroupElement(group, k, "float")


def schottky_pair(T: float, angle: float = math.pi / 2,
                  group: RankOneGroup = SO21) -> tuple[GroupElement, GroupElement]:
    """a = a_T and b = k a_T k^-1, with k rotating the axis of a by ``angle``."""
    a = cartan_element(group, T)
    k = rotation(group, angle)
    return a, k @ a @ k.inverse()
