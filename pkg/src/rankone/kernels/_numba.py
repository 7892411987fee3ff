"""Numba-compiled loop kernels.  Signatures mirror ``_numpy`` exactly."""
import math

import numpy as np

from rankone._accel import njit

_FNV_PRIME = 1099511628211
_FNV_OFFSET = -3750763034362895579  # 14695981039346656037 as int64


# -- orbit products ---------------------------------------------------------

@njit
def expand_exact(cur, gens, m, denom, corner_limit):
    """All products cur[i] @ gens[j] / denom with |corner| <= corner_limit.

    Matrices are flattened rows of scaled integers (true entry = value / denom).
    Returns (products, corners, inexact) where ``inexact`` reports a product
    that left the denom-scaled lattice.
    """
    F = cur.shape[0]
    G = gens.shape[0]
    mm = m * m
    out = np.empty((F * G, mm), np.int64)
    corner = np.empty(F * G, np.int64)
    cnt = 0
    inexact = False
    last = m - 1
    for i in range(F):
        for j in range(G):
            s = 0
            for l in range(m):
                s += cur[i, last * m + l] * gens[j, l * m + last]
            if s % denom != 0:
                inexact = True
            c = s // denom
            if abs(c) > corner_limit:
                continue
            for r in range(m):
                for col in range(m):
                    s = 0
                    for l in range(m):
                        s += cur[i, r * m + l] * gens[j, l * m + col]
                    if s % denom != 0:
                        inexact = True
                    out[cnt, r * m + col] = s // denom
            corner[cnt] = c
            cnt += 1
    return out[:cnt].copy(), corner[:cnt].copy(), inexact


@njit
def expand_float(cur, gens, m, corner_limit, last_gen, inverse_of):
    """Float analogue of ``expand_exact``; corners are returned as |g[m-1,m-1]|.

    Products g * inverse_of[last_gen[i]] that undo the last step are skipped:
    they only recover the parent, and in floating point the cancellation can
    push them outside the dedup tolerance.  Also returns the generator index
    of each product.
    """
    F = cur.shape[0]
    G = gens.shape[0]
    mm = m * m
    out = np.empty((F * G, mm), cur.dtype)
    corner = np.empty(F * G, np.float64)
    gidx = np.empty(F * G, np.int64)
    cnt = 0
    last = m - 1
    for i in range(F):
        for j in range(G):
            if last_gen[i] >= 0 and j == inverse_of[last_gen[i]]:
                continue
            s = cur[i, 0] * 0
            for l in range(m):
                s += cur[i, last * m + l] * gens[j, l * m + last]
            c = abs(s)
            if c > corner_limit:
                continue
            for r in range(m):
                for col in range(m):
                    s = cur[i, 0] * 0
                    for l in range(m):
                        s += cur[i, r * m + l] * gens[j, l * m + col]
                    out[cnt, r * m + col] = s
            corner[cnt] = c
            gidx[cnt] = j
            cnt += 1
    return out[:cnt].copy(), corner[:cnt].copy(), gidx[:cnt].copy()


@njit
def _row_hash(a, i):
    h = _FNV_OFFSET
    for j in range(a.shape[1]):
        h = (h ^ a[i, j]) * _FNV_PRIME
    return h ^ (h >> 31)


@njit
def _rows_equal(a, i, b, j):
    for c in range(a.shape[1]):
        if a[i, c] != b[j, c]:
            return False
    return True


@njit
def dedup_exact(ref, cand):
    """Mask of rows of ``cand`` that are new: absent from ``ref`` and first of their kind."""
    P = ref.shape[0]
    C = cand.shape[0]
    size = 2
    while size < 2 * (P + C) + 2:
        size *= 2
    mask = size - 1
    table = np.full(size, -1, np.int64)
    for i in range(P):
        h = _row_hash(ref, i) & mask
        while True:
            e = table[h]
            if e == -1:
                table[h] = i
                break
            if _rows_equal(ref, e, ref, i):
                break
            h = (h + 1) & mask
    keep = np.zeros(C, np.bool_)
    for i in range(C):
        h = _row_hash(cand, i) & mask
        while True:
            e = table[h]
            if e == -1:
                table[h] = P + i
                keep[i] = True
                break
            if e < P:
                same = _rows_equal(ref, e, cand, i)
            else:
                same = _rows_equal(cand, e - P, cand, i)
            if same:
                break
            h = (h + 1) & mask
    return keep


KEY_WINDOW = 4.0
NEAR_MISS = 1e3


@njit
def dedup_float(ref, cand, proj, tol):
    """Tolerance dedup by sorting along a fixed random projection.

    Two rows are equal when every entry differs by at most
    tol * max(1, largest |entry| of either row).  The sort key of a row is its
    projection after scaling by s = max(1, largest |entry|), plus |proj|_1 log s
    so that rows of similar shape but different size stay apart.  Equal rows
    have keys within about 3 tol |proj|_1 whatever their size.  Returns (keep
    mask, number of near misses: distinct rows closer than NEAR_MISS times the
    tolerance, a sign that the tolerance sits near the data's resolution).
    """
    P = ref.shape[0]
    C = cand.shape[0]
    n = P + C
    k = proj.shape[0]
    keys = np.empty(n)
    amax = np.empty(n)
    for i in range(n):
        acc = 0.0
        big = 0.0
        for j in range(k):
            v = ref[i, j] if i < P else cand[i - P, j]
            acc += v * proj[j]
            if abs(v) > big:
                big = abs(v)
        keys[i] = acc / max(1.0, big)
        amax[i] = big
    l1 = 0.0
    for j in range(k):
        l1 += abs(proj[j])
    for i in range(n):
        keys[i] += l1 * math.log(max(1.0, amax[i]))
    window = KEY_WINDOW * tol * l1
    order = np.argsort(keys, kind="mergesort")
    dup = np.zeros(n, np.bool_)
    collisions = 0
    for a in range(n):
        ia = order[a]
        b = a + 1
        while b < n and keys[order[b]] - keys[ia] <= window:
            ib = order[b]
            lim = tol * max(1.0, max(amax[ia], amax[ib]))
            diff = 0.0
            for j in range(k):
                va = ref[ia, j] if ia < P else cand[ia - P, j]
                vb = ref[ib, j] if ib < P else cand[ib - P, j]
                if abs(va - vb) > diff:
                    diff = abs(va - vb)
            if diff <= lim:
                dup[max(ia, ib)] = True
            elif diff <= NEAR_MISS * lim:
                collisions += 1
            b += 1
    return ~dup[P:], collisions


# -- K-integral quadrature ----------------------------------------------------

@njit
def _logaddexp(a, b):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    hi = max(a, b)
    return hi + math.log1p(math.exp(-abs(a - b)))


@njit
def kint_real(xr, xi, ts, rho, alpha, gx, gw):
    """K-integral for SO(n,1) (Jacobi beta = -1/2), one value per (x, t) pair.

    phi = c * int_{-1}^{1} (cosh t + u sinh t)^{x - rho} (1 - u^2)^{alpha - 1/2} du.
    Left half in log(1 + u) to resolve the peak at 1 + u ~ e^{-2t}; right half
    with u = 1 - s^2 to absorb the endpoint singularity.
    """
    n = ts.shape[0]
    out = np.empty(n, np.complex128)
    norm = math.exp(math.lgamma(alpha + 1.0) - 0.5 * math.log(math.pi) - math.lgamma(alpha + 0.5))
    ng = gx.shape[0]
    for i in range(n):
        t = ts[i]
        pr = xr[i] - rho
        pim = xi[i]
        lsh = math.log(math.sinh(t)) if t > 0 else -np.inf
        acc_r = 0.0
        acc_i = 0.0
        slo = -(2.0 * t * (rho - xr[i]) + 40.0) / (alpha + 0.5)
        npan = int(math.ceil(-slo / 2.0))
        h = -slo / npan
        for p in range(npan):
            a0 = slo + p * h
            for q in range(ng):
                s = a0 + 0.5 * h * (gx[q] + 1.0)
                w = 0.5 * h * gw[q]
                lb = _logaddexp(-t, s + lsh)
                lw = (alpha - 0.5) * (s + math.log(2.0 - math.exp(s))) + s
                mag = w * math.exp(pr * lb + lw)
                acc_r += mag * math.cos(pim * lb)
                acc_i += mag * math.sin(pim * lb)
        ch = math.cosh(t)
        sh = math.sinh(t)
        for p in range(2):
            a0 = 0.5 * p
            for q in range(ng):
                s = a0 + 0.25 * (gx[q] + 1.0)
                w = 0.25 * gw[q]
                lb = math.log(ch + (1.0 - s * s) * sh)
                wt = 2.0 * s ** (2.0 * alpha) * (2.0 - s * s) ** (alpha - 0.5)
                mag = w * wt * math.exp(pr * lb)
                acc_r += mag * math.cos(pim * lb)
                acc_i += mag * math.sin(pim * lb)
        out[i] = norm * complex(acc_r, acc_i)
    return out


@njit
def kint_complex(xr, xi, ts, rho, alpha, gx, gw, tx, tw):
    """K-integral for SU(n,1) (Jacobi beta = 0, alpha = n - 1).

    phi = (alpha/pi) int_disk |cosh t + z sinh t|^{x - rho} (1 - |z|^2)^{alpha - 1} dA,
    in polar coordinates z = -1 + r e^{i theta} about the boundary point -1.
    """
    n = ts.shape[0]
    out = np.empty(n, np.complex128)
    norm = 2.0 * alpha / math.pi
    ng = gx.shape[0]
    nt = tx.shape[0]
    for i in range(n):
        t = ts[i]
        pr = xr[i] - rho
        pim = xi[i]
        e2 = math.exp(-2.0 * t)
        cc = 2.0 * math.exp(-t) * math.sinh(t)
        s2 = math.sinh(t) ** 2
        acc_r = 0.0
        acc_i = 0.0
        slo = -(2.0 * t * (rho - xr[i]) + 40.0) / (alpha + 1.0)
        npan = int(math.ceil(-slo / 2.0))
        h = -slo / npan
        # r in (0, 1]: r = e^sigma
        for p in range(npan + 2):
            if p < npan:
                a0 = slo + p * h
                hw = h
            else:
                a0 = 0.5 * (p - npan)
                hw = 0.5
            for q in range(ng):
                u = a0 + 0.5 * hw * (gx[q] + 1.0)
                w = 0.5 * hw * gw[q]
                if p < npan:
                    r = math.exp(u)
                    w = w * r
                else:
                    # r in [1, 2]: r = 2 - u^2, u in [0, 1]
                    r = 2.0 - u * u
                    w = w * 2.0 * u
                big = math.acos(0.5 * r)
                ir = 0.0
                ii = 0.0
                for k in range(nt):
                    th = 0.5 * big * (tx[k] + 1.0)
                    ct = math.cos(th)
                    lb = 0.5 * math.log(e2 + r * ct * cc + r * r * s2)
                    wt = 0.5 * big * tw[k] * (2.0 * ct - r) ** (alpha - 1.0)
                    mag = wt * math.exp(pr * lb)
                    ir += mag * math.cos(pim * lb)
                    ii += mag * math.sin(pim * lb)
                fac = w * r ** alpha
                acc_r += fac * ir
                acc_i += fac * ii
        out[i] = norm * complex(acc_r, acc_i)
    return out


# -- random walk return probabilities ----------------------------------------

@njit
def free_return_logprobs(k, m_max):
    """log p_{2m}(e) for m = 1..m_max, simple walk on the free group of rank k.

    Dynamic program over word-length shells.
    """
    steps = 2 * m_max
    # shell j is stored as v_j (2k-1)^(-j/2) so the recursion is symmetric
    q = math.sqrt(2.0 * k - 1.0)
    side = q / (2.0 * k)
    v = np.zeros(steps + 2)
    nv = np.zeros(steps + 2)
    v[0] = 1.0
    logscale = 0.0
    out = np.empty(m_max)
    for s in range(1, steps + 1):
        top = min(s, steps)
        for j in range(top + 1):
            nv[j] = 0.0
        for j in range(top + 1):
            if j == 1:
                nv[j] += v[0] / q
            elif j >= 2:
                nv[j] += v[j - 1] * side
            nv[j] += v[j + 1] * side
        big = 0.0
        for j in range(top + 1):
            v[j] = nv[j]
            if v[j] > big:
                big = v[j]
        for j in range(top + 1):
            v[j] /= big
        logscale += math.log(big)
        if s % 2 == 0:
            out[s // 2 - 1] = math.log(v[0]) + logscale
    return out


@njit
def lattice_return_logprobs(d, m_max):
    """log p_{2m}(0) for m = 1..m_max, simple walk on Z^d (d <= 3)."""
    steps = 2 * m_max
    size = 2 * steps + 3
    c = steps + 1
    n2 = size if d >= 2 else 1
    n3 = size if d >= 3 else 1
    c2 = c if d >= 2 else 0
    c3 = c if d >= 3 else 0
    v = np.zeros((size, n2, n3))
    nv = np.zeros((size, n2, n3))
    v[c, c2, c3] = 1.0
    q = 1.0 / (2.0 * d)
    out = np.empty(m_max)
    logscale = 0.0
    for s in range(1, steps + 1):
        b_lo, b_hi = (c - s, c + s) if d >= 2 else (0, 0)
        e_lo, e_hi = (c - s, c + s) if d >= 3 else (0, 0)
        big = 0.0
        for a in range(c - s, c + s + 1):
            for b in range(b_lo, b_hi + 1):
                for e in range(e_lo, e_hi + 1):
                    acc = v[a - 1, b, e] + v[a + 1, b, e]
                    if d >= 2:
                        acc += v[a, b - 1, e] + v[a, b + 1, e]
                    if d >= 3:
                        acc += v[a, b, e - 1] + v[a, b, e + 1]
                    nv[a, b, e] = q * acc
                    if nv[a, b, e] > big:
                        big = nv[a, b, e]
        for a in range(c - s, c + s + 1):
            for b in range(b_lo, b_hi + 1):
                for e in range(e_lo, e_hi + 1):
                    v[a, b, e] = nv[a, b, e] / big
        logscale += math.log(big)
        if s % 2 == 0:
            out[s // 2 - 1] = math.log(v[c, c2, c3]) + logscale
    return out
