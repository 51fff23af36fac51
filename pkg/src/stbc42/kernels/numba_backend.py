"""Numba-compiled twins of the hot kernels.

Same names, signatures and (tie-break) semantics as ``numpy_backend``; see
that module for the shared conventions.  Scalar loops here mirror the
vectorized reference expressions operation-for-operation, so the two
backends agree to rounding noise and produce identical decisions away from
exact metric ties.
"""

import warnings

import numpy as np
from numba import njit, prange

# parallel kernels trip an advisory about the image's outdated TBB; numba
# silently falls back to its workqueue threading layer, which is fine here
warnings.filterwarnings("ignore", message=".*TBB.*", category=Warning)

NAME = "numba"

_JIT = dict(cache=True, nogil=True)


@njit(**_JIT)
def qr_mgs(a):
    m, n = a.shape
    q = np.zeros((m, n))
    r = np.zeros((n, n))
    v = np.empty(m)
    for j in range(n):
        norm_in = 0.0
        for i in range(m):
            v[i] = a[i, j]
            norm_in += v[i] * v[i]
        norm_in = np.sqrt(norm_in)
        for _ in range(2):
            for k in range(j):
                c = 0.0
                for i in range(m):
                    c += q[i, k] * v[i]
                r[k, j] += c
                for i in range(m):
                    v[i] -= c * q[i, k]
        norm_v = 0.0
        for i in range(m):
            norm_v += v[i] * v[i]
        norm_v = np.sqrt(norm_v)
        if norm_v < 1e-12 * norm_in:
            return q, r, False
        r[j, j] = norm_v
        for i in range(m):
            q[i, j] = v[i] / norm_v
    return q, r, True


@njit(**_JIT)
def _slice_index(x, levels, step):
    k = int(np.ceil((x - levels[0]) / step - 0.5))
    if k < 0:
        k = 0
    elif k >= levels.shape[0]:
        k = levels.shape[0] - 1
    return k


@njit(**_JIT)
def decode_exhaustive(z, r, levels):
    ll = levels.shape[0]
    m = ll * ll
    count = m ** 8
    st = np.empty(16)
    sidx = np.empty(8, dtype=np.int64)
    best_idx = np.zeros(8, dtype=np.int64)
    best = np.inf
    for c in range(count):
        rem = c
        for j in range(7, -1, -1):
            sidx[j] = rem % m
            rem //= m
        for j in range(8):
            st[2 * j] = levels[sidx[j] // ll]
            st[2 * j + 1] = levels[sidx[j] % ll]
        met = 0.0
        for row in range(16):
            acc = z[row]
            for col in range(row, 16):
                acc -= r[row, col] * st[col]
            met += acc * acc
        if met < best:
            best = met
            for j in range(8):
                best_idx[j] = sidx[j]
    return best_idx, count, 16 * count


@njit(**_JIT)
def decode_sphere(z, r, levels):
    n = z.shape[0]
    ll = levels.shape[0]
    order = np.empty((n, ll), dtype=np.int64)
    rank = np.zeros(n, dtype=np.int64)
    num = np.zeros(n)
    acc = np.zeros(n + 1)
    x = np.zeros(n, dtype=np.int64)
    best_x = np.zeros(n, dtype=np.int64)
    key = np.empty(ll)
    best = np.inf
    leaves = 0
    evals = 0

    i = n - 1
    entering = True
    while True:
        if entering:
            s = z[i]
            for k in range(i + 1, n):
                s -= r[i, k] * levels[x[k]]
            num[i] = s
            c = s / r[i, i]
            for l in range(ll):
                key[l] = abs(levels[l] - c)
                order[i, l] = l
            for l in range(1, ll):          # insertion sort, stable
                kv = key[l]
                ov = order[i, l]
                p = l - 1
                while p >= 0 and key[p] > kv:
                    key[p + 1] = key[p]
                    order[i, p + 1] = order[i, p]
                    p -= 1
                key[p + 1] = kv
                order[i, p + 1] = ov
            rank[i] = 0
            entering = False
        if rank[i] == ll:
            i += 1
            if i == n:
                break
            rank[i] += 1
            continue
        li = order[i, rank[i]]
        t = num[i] - r[i, i] * levels[li]
        d = acc[i + 1] + t * t
        evals += 1
        if d >= best:
            i += 1
            if i == n:
                break
            rank[i] += 1
            continue
        x[i] = li
        if i == 0:
            leaves += 1
            best = d
            for k in range(n):
                best_x[k] = x[k]
            rank[i] += 1
            continue
        acc[i] = d
        i -= 1
        entering = True

    idx = np.empty(8, dtype=np.int64)
    for j in range(8):
        idx[j] = best_x[2 * j] * ll + best_x[2 * j + 1]
    return idx, leaves, evals


@njit(**_JIT)
def decode_fast(z, r, levels):
    ll = levels.shape[0]
    m = ll * ll
    n4 = m ** 4
    step = levels[1] - levels[0]
    s2 = np.empty(8)
    s2i = np.empty(4, dtype=np.int64)
    v = np.empty(8)
    cur_lev = np.empty(8, dtype=np.int64)
    best_lev = np.zeros(8, dtype=np.int64)
    best_s2i = np.zeros(4, dtype=np.int64)
    best = np.inf
    for c in range(n4):
        rem = c
        for j in range(3, -1, -1):
            s2i[j] = rem % m
            rem //= m
        for j in range(4):
            s2[2 * j] = levels[s2i[j] // ll]
            s2[2 * j + 1] = levels[s2i[j] % ll]
        outer = 0.0
        for row in range(8, 16):
            accr = z[row]
            for col in range(row, 16):
                accr -= r[row, col] * s2[col - 8]
            outer += accr * accr
        for a in range(8):
            accv = z[a]
            for col in range(8):
                accv -= r[a, 8 + col] * s2[col]
            v[a] = accv
        tot = outer
        for grp in range(4):
            a = grp
            b = grp + 4
            raa = r[a, a]
            rab = r[a, b]
            rbb = r[b, b]
            gbest = np.inf
            gla = 0
            glb = 0
            for lb in range(ll):
                xb = levels[lb]
                k = _slice_index((v[a] - rab * xb) / raa, levels, step)
                xa = levels[k]
                t1 = v[a] - raa * xa - rab * xb
                t2 = v[b] - rbb * xb
                mm = t1 * t1 + t2 * t2
                if mm < gbest:
                    gbest = mm
                    gla = k
                    glb = lb
            tot += gbest
            cur_lev[a] = gla
            cur_lev[b] = glb
        if tot < best:
            best = tot
            for j in range(8):
                best_lev[j] = cur_lev[j]
            for j in range(4):
                best_s2i[j] = s2i[j]
    idx = np.empty(8, dtype=np.int64)
    idx[0] = best_lev[0] * ll + best_lev[1]
    idx[1] = best_lev[2] * ll + best_lev[3]
    idx[2] = best_lev[4] * ll + best_lev[5]
    idx[3] = best_lev[6] * ll + best_lev[7]
    for j in range(4):
        idx[4 + j] = best_s2i[j]
    leaves = n4 * 4 * ll
    return idx, leaves, 8 * n4 + 2 * leaves


@njit(**_JIT)
def decode_fast_any(z, r, pts_re, pts_im):
    m = pts_re.shape[0]
    n4 = m ** 4
    s2 = np.empty(8)
    s2i = np.empty(4, dtype=np.int64)
    v = np.empty(8)
    best = np.inf
    best_s2i = np.zeros(4, dtype=np.int64)
    best_a1 = 0
    best_a3 = 0
    best_b2 = 0
    best_b4 = 0
    for c in range(n4):
        rem = c
        for j in range(3, -1, -1):
            s2i[j] = rem % m
            rem //= m
        for j in range(4):
            s2[2 * j] = pts_re[s2i[j]]
            s2[2 * j + 1] = pts_im[s2i[j]]
        outer = 0.0
        for row in range(8, 16):
            accr = z[row]
            for col in range(row, 16):
                accr -= r[row, col] * s2[col - 8]
            outer += accr * accr
        for a in range(8):
            accv = z[a]
            for col in range(8):
                accv -= r[a, 8 + col] * s2[col]
            v[a] = accv
        besta = np.inf
        ba1 = 0
        ba3 = 0
        for i1 in range(m):
            for i3 in range(m):
                t0 = v[0] - r[0, 0] * pts_re[i1] - r[0, 4] * pts_re[i3]
                t1 = v[1] - r[1, 1] * pts_im[i1] - r[1, 5] * pts_im[i3]
                t4 = v[4] - r[4, 4] * pts_re[i3]
                t5 = v[5] - r[5, 5] * pts_im[i3]
                mm = t0 * t0 + t1 * t1 + t4 * t4 + t5 * t5
                if mm < besta:
                    besta = mm
                    ba1 = i1
                    ba3 = i3
        bestb = np.inf
        bb2 = 0
        bb4 = 0
        for i2 in range(m):
            for i4 in range(m):
                t2 = v[2] - r[2, 2] * pts_re[i2] - r[2, 6] * pts_re[i4]
                t3 = v[3] - r[3, 3] * pts_im[i2] - r[3, 7] * pts_im[i4]
                t6 = v[6] - r[6, 6] * pts_re[i4]
                t7 = v[7] - r[7, 7] * pts_im[i4]
                mm = t2 * t2 + t3 * t3 + t6 * t6 + t7 * t7
                if mm < bestb:
                    bestb = mm
                    bb2 = i2
                    bb4 = i4
        tot = outer + besta + bestb
        if tot < best:
            best = tot
            for j in range(4):
                best_s2i[j] = s2i[j]
            best_a1 = ba1
            best_a3 = ba3
            best_b2 = bb2
            best_b4 = bb4
    idx = np.empty(8, dtype=np.int64)
    idx[0] = best_a1
    idx[1] = best_b2
    idx[2] = best_a3
    idx[3] = best_b4
    for j in range(4):
        idx[4 + j] = best_s2i[j]
    leaves = n4 * 2 * m * m
    return idx, leaves, 8 * n4 + 4 * leaves


@njit(cache=True, parallel=True)
def mindet_pair_scan(xa, xb, zero_a, zero_b):
    na = xa.shape[0]
    nb = xb.shape[0]
    row_best = np.empty(na)
    row_j = np.empty(na, dtype=np.int64)
    for i in prange(na):
        a00 = xa[i, 0, 0]
        a01 = xa[i, 0, 1]
        a02 = xa[i, 0, 2]
        a03 = xa[i, 0, 3]
        a10 = xa[i, 1, 0]
        a11 = xa[i, 1, 1]
        a12 = xa[i, 1, 2]
        a13 = xa[i, 1, 3]
        a20 = xa[i, 2, 0]
        a21 = xa[i, 2, 1]
        a22 = xa[i, 2, 2]
        a23 = xa[i, 2, 3]
        a30 = xa[i, 3, 0]
        a31 = xa[i, 3, 1]
        a32 = xa[i, 3, 2]
        a33 = xa[i, 3, 3]
        rb = np.inf
        rj = -1
        for j in range(nb):
            if i == zero_a and j == zero_b:
                continue
            s00 = a00 + xb[j, 0, 0]
            s01 = a01 + xb[j, 0, 1]
            s02 = a02 + xb[j, 0, 2]
            s03 = a03 + xb[j, 0, 3]
            s10 = a10 + xb[j, 1, 0]
            s11 = a11 + xb[j, 1, 1]
            s12 = a12 + xb[j, 1, 2]
            s13 = a13 + xb[j, 1, 3]
            s20 = a20 + xb[j, 2, 0]
            s21 = a21 + xb[j, 2, 1]
            s22 = a22 + xb[j, 2, 2]
            s23 = a23 + xb[j, 2, 3]
            s30 = a30 + xb[j, 3, 0]
            s31 = a31 + xb[j, 3, 1]
            s32 = a32 + xb[j, 3, 2]
            s33 = a33 + xb[j, 3, 3]
            m01_01 = s00 * s11 - s01 * s10
            m01_02 = s00 * s12 - s02 * s10
            m01_03 = s00 * s13 - s03 * s10
            m01_12 = s01 * s12 - s02 * s11
            m01_13 = s01 * s13 - s03 * s11
            m01_23 = s02 * s13 - s03 * s12
            m23_01 = s20 * s31 - s21 * s30
            m23_02 = s20 * s32 - s22 * s30
            m23_03 = s20 * s33 - s23 * s30
            m23_12 = s21 * s32 - s22 * s31
            m23_13 = s21 * s33 - s23 * s31
            m23_23 = s22 * s33 - s23 * s32
            det = (m01_01 * m23_23 - m01_02 * m23_13 + m01_03 * m23_12
                   + m01_12 * m23_03 - m01_13 * m23_02 + m01_23 * m23_01)
            dd = det.real * det.real + det.imag * det.imag
            if dd < rb:
                rb = dd
                rj = j
        row_best[i] = rb
        row_j[i] = rj
    best = np.inf
    bi = -1
    bj = -1
    for i in range(na):
        if row_best[i] < best:
            best = row_best[i]
            bi = i
            bj = row_j[i]
    return best, bi, bj


@njit(**_JIT)
def ber_batch(hc, wt, sidx, g, levels, labels, decoder_id):
    frames = hc.shape[0]
    ll = levels.shape[0]
    m = ll * ll
    biterr = np.zeros(frames, dtype=np.int64)
    leaves = np.zeros(frames, dtype=np.int64)
    ok = np.ones(frames, dtype=np.bool_)
    st = np.empty(16)
    xt = np.empty(32)
    yt = np.empty(16)
    heq = np.empty((16, 16))
    z = np.empty(16)
    pts_re = np.empty(m)
    pts_im = np.empty(m)
    for p in range(m):
        pts_re[p] = levels[p // ll]
        pts_im[p] = levels[p % ll]
    for f in range(frames):
        for j in range(8):
            st[2 * j] = levels[sidx[f, j] // ll]
            st[2 * j + 1] = levels[sidx[f, j] % ll]
        for row in range(32):
            acc = 0.0
            for col in range(16):
                acc += g[row, col] * st[col]
            xt[row] = acc
        for t in range(4):
            for i in range(4):
                acc = wt[f, 4 * t + i]
                for k in range(8):
                    acc += hc[f, i, k] * xt[8 * t + k]
                yt[4 * t + i] = acc
        for t in range(4):
            for i in range(4):
                for col in range(16):
                    acc = 0.0
                    for k in range(8):
                        acc += hc[f, i, k] * g[8 * t + k, col]
                    heq[4 * t + i, col] = acc
        q, r, full_rank = qr_mgs(heq)
        if not full_rank:
            ok[f] = False
            continue
        for c in range(16):
            acc = 0.0
            for row in range(16):
                acc += q[row, c] * yt[row]
            z[c] = acc
        if decoder_id == 0:
            didx, lv, _ = decode_exhaustive(z, r, levels)
        elif decoder_id == 1:
            didx, lv, _ = decode_sphere(z, r, levels)
        elif decoder_id == 2:
            didx, lv, _ = decode_fast(z, r, levels)
        else:
            didx, lv, _ = decode_fast_any(z, r, pts_re, pts_im)
        leaves[f] = lv
        err = 0
        for j in range(8):
            e = labels[sidx[f, j]] ^ labels[didx[j]]
            while e:
                err += e & 1
                e >>= 1
        biterr[f] = err
    return biterr, leaves, ok
