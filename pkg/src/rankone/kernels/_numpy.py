"""Vectorised numpy kernels.  Same signatures and results as ``_numba``."""
import math

import numpy as np
from math import lgamma as gammaln


def expand_exact(cur, gens, m, denom, corner_limit):
    F, G = cur.shape[0], gens.shape[0]
    a = cur.reshape(F, m, m)
    b = gens.reshape(G, m, m)
    corner = a[:, m - 1, :] @ b[:, :, m - 1].T  # (F, G)
    inexact = bool(np.any(corner % denom))
    sel = np.abs(corner // denom) <= corner_limit
    fi, gj = np.nonzero(sel)
    if fi.size == 0:
        return np.empty((0, m * m), np.int64), np.empty(0, np.int64), inexact
    prod = np.einsum("fij,fjk->fik", a[fi], b[gj])
    inexact = inexact or bool(np.any(prod % denom))
    prod //= denom
    return prod.reshape(-1, m * m), prod[:, m - 1, m - 1].copy(), inexact


def expand_float(cur, gens, m, corner_limit, last_gen, inverse_of):
    F, G = cur.shape[0], gens.shape[0]
    a = cur.reshape(F, m, m)
    b = gens.reshape(G, m, m)
    corner = np.abs(a[:, m - 1, :] @ b[:, :, m - 1].T)
    ok = corner <= corner_limit
    back = last_gen >= 0
    ok[np.flatnonzero(back), inverse_of[last_gen[back]]] = False
    fi, gj = np.nonzero(ok)
    if fi.size == 0:
        return np.empty((0, m * m), cur.dtype), np.empty(0), np.empty(0, np.int64)
    prod = np.einsum("fij,fjk->fik", a[fi], b[gj])
    return prod.reshape(-1, m * m), np.abs(prod[:, m - 1, m - 1]), gj.astype(np.int64)


def dedup_exact(ref, cand):
    both = np.ascontiguousarray(np.concatenate([ref, cand]).astype(np.int64))
    if both.shape[0] == 0:
        return np.zeros(0, bool)
    rows = both.view(np.dtype((np.void, both.dtype.itemsize * both.shape[1]))).ravel()
    _, first, inv = np.unique(rows, return_index=True, return_inverse=True)
    P = ref.shape[0]
    idx = np.arange(P, both.shape[0])
    return first[inv[P:]] == idx


KEY_WINDOW = 4.0   # equal rows have keys within ~3 tol |proj|_1
NEAR_MISS = 1e3    # distinct rows this close (in tolerances) count as collisions


def dedup_float(ref, cand, proj, tol):
    both = np.concatenate([ref, cand])
    P, n = ref.shape[0], both.shape[0]
    if n == 0:
        return np.zeros(0, bool), 0
    amax = np.abs(both).max(axis=1)
    scale = np.maximum(1.0, amax)
    l1 = np.abs(proj).sum()
    keys = (both @ proj) / scale + l1 * np.log(scale)
    window = KEY_WINDOW * tol * l1
    order = np.argsort(keys, kind="mergesort")
    ks = keys[order]
    dup = np.zeros(n, bool)
    collisions = 0
    off = 1
    while off < n:
        close = (ks[off:] - ks[:-off]) <= window
        if not close.any():
            break
        ia = order[:-off][close]
        ib = order[off:][close]
        lim = tol * np.maximum(1.0, np.maximum(amax[ia], amax[ib]))
        diff = np.abs(both[ia] - both[ib]).max(axis=1)
        same = diff <= lim
        dup[np.maximum(ia, ib)[same]] = True
        collisions += int(np.sum(~same & (diff <= NEAR_MISS * lim)))
        off += 1
    return ~dup[P:], collisions


def _panels(lo, hi, width, gx, gw):
    npan = max(1, int(math.ceil((hi - lo) / width)))
    h = (hi - lo) / npan
    starts = lo + h * np.arange(npan)
    nodes = (starts[:, None] + 0.5 * h * (gx[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * h * gw, npan)
    return nodes, weights


def kint_real(xr, xi, ts, rho, alpha, gx, gw):
    norm = math.exp(gammaln(alpha + 1.0) - 0.5 * math.log(math.pi) - gammaln(alpha + 0.5))
    out = np.empty(ts.shape[0], np.complex128)
    s2, w2 = _panels(0.0, 1.0, 0.5, gx, gw)
    wt2 = 2.0 * s2 ** (2.0 * alpha) * (2.0 - s2 * s2) ** (alpha - 0.5)
    for i, t in enumerate(ts):
        p = complex(xr[i] - rho, xi[i])
        slo = -(2.0 * t * (rho - xr[i]) + 40.0) / (alpha + 0.5)
        s, w = _panels(slo, 0.0, 2.0, gx, gw)
        lsh = math.log(math.sinh(t)) if t > 0 else -np.inf
        lb = np.logaddexp(-t, s + lsh)
        lw = (alpha - 0.5) * (s + np.log(2.0 - np.exp(s))) + s
        left = np.sum(w * np.exp(p * lb + lw))
        lb2 = np.log(math.cosh(t) + (1.0 - s2 * s2) * math.sinh(t))
        right = np.sum(w2 * wt2 * np.exp(p * lb2))
        out[i] = norm * (left + right)
    return out


def kint_complex(xr, xi, ts, rho, alpha, gx, gw, tx, tw):
    out = np.empty(ts.shape[0], np.complex128)
    u2, w2 = _panels(0.0, 1.0, 0.5, gx, gw)
    for i, t in enumerate(ts):
        p = complex(xr[i] - rho, xi[i])
        slo = -(2.0 * t * (rho - xr[i]) + 40.0) / (alpha + 1.0)
        s1, w1 = _panels(slo, 0.0, 2.0, gx, gw)
        r = np.concatenate([np.exp(s1), 2.0 - u2 * u2])
        w = np.concatenate([w1 * np.exp(s1), w2 * 2.0 * u2])
        big = np.arccos(0.5 * r)
        th = 0.5 * big[:, None] * (tx[None, :] + 1.0)
        ct = np.cos(th)
        q = math.exp(-2.0 * t) + r[:, None] * ct * (2.0 * math.exp(-t) * math.sinh(t)) \
            + (r[:, None] * math.sinh(t)) ** 2
        lb = 0.5 * np.log(q)
        wt = 0.5 * big[:, None] * tw[None, :] * (2.0 * ct - r[:, None]) ** (alpha - 1.0)
        inner = np.sum(wt * np.exp(p * lb), axis=1)
        out[i] = (2.0 * alpha / math.pi) * np.sum(w * r ** alpha * inner)
    return out


def free_return_logprobs(k, m_max):
    steps = 2 * m_max
    # shell j is stored as v_j (2k-1)^(-j/2): the recursion becomes symmetric and
    # the return mass stays polynomially close to the peak, so nothing underflows
    q = math.sqrt(2.0 * k - 1.0)
    side = q / (2.0 * k)
    v = np.zeros(steps + 2)
    v[0] = 1.0
    logscale = 0.0
    out = np.empty(m_max)
    for s in range(1, steps + 1):
        nv = np.zeros_like(v)
        nv[1] = v[0] / q
        nv[2:] += side * v[1:-1]
        nv[:-1] += side * v[1:]
        big = nv.max()
        v = nv / big
        logscale += math.log(big)
        if s % 2 == 0:
            out[s // 2 - 1] = math.log(v[0]) + logscale
    return out


def lattice_return_logprobs(d, m_max):
    steps = 2 * m_max
    size = 2 * steps + 3
    c = steps + 1
    v = np.zeros((size,) * d)
    v[(c,) * d] = 1.0
    out = np.empty(m_max)
    logscale = 0.0
    q = 1.0 / (2.0 * d)
    for s in range(1, steps + 1):
        box = tuple(slice(c - s - 1, c + s + 2) for _ in range(d))
        sub = v[box]
        nv = np.zeros_like(sub)
        for ax in range(d):
            nv += np.roll(sub, 1, axis=ax) + np.roll(sub, -1, axis=ax)
        nv *= q
        big = nv.max()
        v[box] = nv / big
        logscale += math.log(big)
        if s % 2 == 0:
            out[s // 2 - 1] = math.log(v[(c,) * d]) + logscale
    return out
