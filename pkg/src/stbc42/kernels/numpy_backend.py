"""Pure-numpy implementations of the hot kernels.

This is the fallback backend (and the reference the numba twins are tested
against).  Every function here has an identically-named, identically-shaped
twin in ``numba_backend``; the dispatch in ``kernels/__init__`` picks one of
the two modules at import time.

Shared conventions
------------------
* ``z`` is the 16-vector Q^T ytilde, ``r`` the 16x16 upper-triangular factor.
* ``levels`` are the ascending sqrt(M)-PAM levels of one axis; a complex
  symbol index is ``re_level_index * L + im_level_index``.
* Decoders return ``(indices (8,), leaf_visits, metric_evaluations)``.
  ``leaf_visits`` counts complete candidate evaluations (exhaustive: every
  lattice point; fast: every 1-D group candidate; fast_any: every 2-D pair
  candidate; sphere: every full-depth leaf reached).
  ``metric_evaluations`` counts scalar squared-residual accumulations.
* Ties are broken toward the candidate scanned first; scan orders are
  lexicographic in the symbol/level indices, so the exhaustive decoder
  returns the lexicographically smallest symbol-index vector among ties.
"""

import numpy as np

NAME = "numpy"

_SIDX_CACHE: dict = {}


def qr_mgs(a: np.ndarray):
    """Modified Gram-Schmidt QR with one reorthogonalization pass.

    Returns (q, r, ok); ok is False when a residual column norm drops below
    1e-12 times the original column norm (rank-deficient input).
    """
    m, n = a.shape
    q = np.zeros((m, n))
    r = np.zeros((n, n))
    for j in range(n):
        v = a[:, j].copy()
        norm_in = np.sqrt(v @ v)
        for _ in range(2):
            for k in range(j):
                c = q[:, k] @ v
                r[k, j] += c
                v -= c * q[:, k]
        norm_v = np.sqrt(v @ v)
        if norm_v < 1e-12 * norm_in:
            return q, r, False
        r[j, j] = norm_v
        q[:, j] = v / norm_v
    return q, r, True


def _symbol_index_table(n_syms: int, m: int) -> np.ndarray:
    """(m**n_syms, n_syms) table of symbol indices in lexicographic order."""
    key = (n_syms, m)
    if key not in _SIDX_CACHE:
        count = m ** n_syms
        c = np.arange(count)
        table = np.empty((count, n_syms), dtype=np.int64)
        for j in range(n_syms):
            table[:, j] = (c // m ** (n_syms - 1 - j)) % m
        _SIDX_CACHE[key] = table
    return _SIDX_CACHE[key]


def _tilde_table(sidx: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Interleaved real/imag table for symbol-index rows."""
    ll = len(levels)
    out = np.empty((sidx.shape[0], 2 * sidx.shape[1]))
    out[:, 0::2] = levels[sidx // ll]
    out[:, 1::2] = levels[sidx % ll]
    return out


def _slice_indices(x: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Vectorized nearest-level index, exact midpoints toward the lower level."""
    step = levels[1] - levels[0]
    k = np.ceil((x - levels[0]) / step - 0.5).astype(np.int64)
    return np.clip(k, 0, len(levels) - 1)


def decode_exhaustive(z: np.ndarray, r: np.ndarray, levels: np.ndarray):
    ll = len(levels)
    m = ll * ll
    sidx = _symbol_index_table(8, m)
    tilde = _tilde_table(sidx, levels)
    resid = z[None, :] - tilde @ r.T
    metrics = np.einsum("ij,ij->i", resid, resid)
    best = int(np.argmin(metrics))
    leaves = m ** 8
    return sidx[best].copy(), leaves, 16 * leaves


def decode_sphere(z: np.ndarray, r: np.ndarray, levels: np.ndarray):
    """Depth-first Schnorr-Euchner search, infinite initial radius."""
    n = z.shape[0]
    ll = len(levels)
    order = np.empty((n, ll), dtype=np.int64)
    rank = np.zeros(n, dtype=np.int64)
    num = np.zeros(n)              # z_i minus the already-fixed upper terms
    acc = np.zeros(n + 1)          # partial metric accumulated above depth i
    x = np.zeros(n, dtype=np.int64)
    best_x = np.zeros(n, dtype=np.int64)
    best = np.inf
    leaves = 0
    evals = 0

    def enter(i):
        s = z[i] - r[i, i + 1:] @ levels[x[i + 1:]]
        num[i] = s
        c = s / r[i, i]
        dist = np.abs(levels - c)
        order[i] = np.lexsort((np.arange(ll), dist))
        rank[i] = 0

    i = n - 1
    enter(i)
    while True:
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
            # enumeration is ordered by distance: later siblings can't win
            i += 1
            if i == n:
                break
            rank[i] += 1
            continue
        x[i] = li
        if i == 0:
            leaves += 1
            best = d
            best_x[:] = x
            rank[i] += 1
            continue
        acc[i] = d
        i -= 1
        enter(i)

    idx = best_x[0::2] * ll + best_x[1::2]
    return idx, leaves, evals


def decode_fast(z: np.ndarray, r: np.ndarray, levels: np.ndarray):
    """Conditional decoder for the proposed code on square QAM.

    Enumerates the last four symbols, then solves four independent 1-D
    PAM searches with a conditioned hard decision for the first four.
    """
    ll = len(levels)
    m = ll * ll
    n4 = m ** 4
    s2idx = _symbol_index_table(4, m)
    s2t = _tilde_table(s2idx, levels)
    r2 = r[:8, 8:]
    r4 = r[8:, 8:]
    outer_res = z[8:][None, :] - s2t @ r4.T
    tot = np.einsum("ij,ij->i", outer_res, outer_res)
    v = z[:8][None, :] - s2t @ r2.T
    lev_sel = np.empty((n4, 8), dtype=np.int64)
    rows = np.arange(n4)
    for grp in range(4):
        a, b = grp, grp + 4
        raa, rab, rbb = r[a, a], r[a, b], r[b, b]
        gm = np.empty((n4, ll))
        ga = np.empty((n4, ll), dtype=np.int64)
        for lb in range(ll):
            xb = levels[lb]
            la = _slice_indices((v[:, a] - rab * xb) / raa, levels)
            xa = levels[la]
            gm[:, lb] = (v[:, a] - raa * xa - rab * xb) ** 2 \
                + (v[:, b] - rbb * xb) ** 2
            ga[:, lb] = la
        bl = np.argmin(gm, axis=1)
        tot += gm[rows, bl]
        lev_sel[:, b] = bl
        lev_sel[:, a] = ga[rows, bl]
    best = int(np.argmin(tot))
    idx = np.empty(8, dtype=np.int64)
    sel = lev_sel[best]
    idx[0] = sel[0] * ll + sel[1]
    idx[1] = sel[2] * ll + sel[3]
    idx[2] = sel[4] * ll + sel[5]
    idx[3] = sel[6] * ll + sel[7]
    idx[4:8] = s2idx[best]
    leaves = n4 * 4 * ll
    evals = 8 * n4 + 2 * leaves
    return idx, leaves, evals


def decode_fast_any(z: np.ndarray, r: np.ndarray,
                    pts_re: np.ndarray, pts_im: np.ndarray):
    """Conditional decoder for the proposed code, arbitrary constellation.

    Enumerates the last four symbols, then runs two joint 2-D searches over
    the complex pairs (s1, s3) and (s2, s4).
    """
    m = len(pts_re)
    n4 = m ** 4
    s2idx = _symbol_index_table(4, m)
    pair = _symbol_index_table(2, m)       # (m^2, 2): (first, second)
    re_f, im_f = pts_re[pair[:, 0]], pts_im[pair[:, 0]]
    re_s, im_s = pts_re[pair[:, 1]], pts_im[pair[:, 1]]
    r2 = r[:8, 8:]
    r4 = r[8:, 8:]
    best = np.inf
    best_c = -1
    best_a = -1
    best_b = -1
    chunk = 4096
    for lo in range(0, n4, chunk):
        hi = min(lo + chunk, n4)
        s2t = np.empty((hi - lo, 8))
        s2t[:, 0::2] = pts_re[s2idx[lo:hi]]
        s2t[:, 1::2] = pts_im[s2idx[lo:hi]]
        outer_res = z[8:][None, :] - s2t @ r4.T
        outer = np.einsum("ij,ij->i", outer_res, outer_res)
        v = z[:8][None, :] - s2t @ r2.T
        # pair (s1, s3): tilde dims 0/1 from s1, 4/5 from s3
        ma = (v[:, 0:1] - r[0, 0] * re_f - r[0, 4] * re_s) ** 2 \
            + (v[:, 1:2] - r[1, 1] * im_f - r[1, 5] * im_s) ** 2 \
            + (v[:, 4:5] - r[4, 4] * re_s) ** 2 \
            + (v[:, 5:6] - r[5, 5] * im_s) ** 2
        # pair (s2, s4): tilde dims 2/3 from s2, 6/7 from s4
        mb = (v[:, 2:3] - r[2, 2] * re_f - r[2, 6] * re_s) ** 2 \
            + (v[:, 3:4] - r[3, 3] * im_f - r[3, 7] * im_s) ** 2 \
            + (v[:, 6:7] - r[6, 6] * re_s) ** 2 \
            + (v[:, 7:8] - r[7, 7] * im_s) ** 2
        ia = np.argmin(ma, axis=1)
        ib = np.argmin(mb, axis=1)
        rows = np.arange(hi - lo)
        tot = outer + ma[rows, ia] + mb[rows, ib]
        c = int(np.argmin(tot))
        if tot[c] < best:
            best = tot[c]
            best_c = lo + c
            best_a = int(ia[c])
            best_b = int(ib[c])
    idx = np.empty(8, dtype=np.int64)
    idx[0], idx[2] = pair[best_a]
    idx[1], idx[3] = pair[best_b]
    idx[4:8] = s2idx[best_c]
    leaves = n4 * 2 * m * m
    evals = 8 * n4 + 4 * leaves
    return idx, leaves, evals


def _det4_abs_sq(s: np.ndarray) -> np.ndarray:
    """|det|^2 of a stack of 4x4 complex matrices via 2x2-minor expansion."""
    a, b = s[:, 0, :], s[:, 1, :]
    c, d = s[:, 2, :], s[:, 3, :]
    m01_01 = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    m01_02 = a[:, 0] * b[:, 2] - a[:, 2] * b[:, 0]
    m01_03 = a[:, 0] * b[:, 3] - a[:, 3] * b[:, 0]
    m01_12 = a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1]
    m01_13 = a[:, 1] * b[:, 3] - a[:, 3] * b[:, 1]
    m01_23 = a[:, 2] * b[:, 3] - a[:, 3] * b[:, 2]
    m23_01 = c[:, 0] * d[:, 1] - c[:, 1] * d[:, 0]
    m23_02 = c[:, 0] * d[:, 2] - c[:, 2] * d[:, 0]
    m23_03 = c[:, 0] * d[:, 3] - c[:, 3] * d[:, 0]
    m23_12 = c[:, 1] * d[:, 2] - c[:, 2] * d[:, 1]
    m23_13 = c[:, 1] * d[:, 3] - c[:, 3] * d[:, 1]
    m23_23 = c[:, 2] * d[:, 3] - c[:, 3] * d[:, 2]
    det = (m01_01 * m23_23 - m01_02 * m23_13 + m01_03 * m23_12
           + m01_12 * m23_03 - m01_13 * m23_02 + m01_23 * m23_01)
    return det.real * det.real + det.imag * det.imag


def mindet_pair_scan(xa: np.ndarray, xb: np.ndarray,
                     zero_a: int, zero_b: int):
    """Minimum |det|^2 over all pairwise sums xa[i] + xb[j].

    The (zero_a, zero_b) pair (the all-zero difference) is skipped.  Ties
    resolve to the smallest (i, j).  Returns (min_value, i, j).
    """
    best = np.inf
    bi = -1
    bj = -1
    for i in range(xa.shape[0]):
        d = _det4_abs_sq(xa[i][None, :, :] + xb)
        if i == zero_a:
            d[zero_b] = np.inf
        j = int(np.argmin(d))
        if d[j] < best:
            best = float(d[j])
            bi, bj = i, j
    return best, bi, bj


def ber_batch(hc: np.ndarray, wt: np.ndarray, sidx: np.ndarray,
              g: np.ndarray, levels: np.ndarray, labels: np.ndarray,
              decoder_id: int):
    """Decode a batch of frames and count bit errors.

    Parameters (per frame f):
      hc[f]   : (4, 8) realified channel block
      wt[f]   : (16,) interleaved noise vector
      sidx[f] : (8,) transmitted symbol indices

    Returns (bit_errors (F,), leaf_visits (F,), ok (F,)); frames whose
    channel draw is rank deficient come back with ok=False and zero counts.
    """
    frames = hc.shape[0]
    ll = len(levels)
    stilde = _tilde_table(sidx, levels)
    xt = stilde @ g.T                     # (F, 32)
    yt = np.empty((frames, 16))
    for t in range(4):
        yt[:, 4 * t: 4 * t + 4] = np.einsum(
            "fij,fj->fi", hc, xt[:, 8 * t: 8 * t + 8]) + wt[:, 4 * t: 4 * t + 4]
    biterr = np.zeros(frames, dtype=np.int64)
    leaves = np.zeros(frames, dtype=np.int64)
    ok = np.ones(frames, dtype=bool)
    heq = np.empty((16, 16))
    pts_re = np.repeat(levels, ll)
    pts_im = np.tile(levels, ll)
    for f in range(frames):
        for t in range(4):
            heq[4 * t: 4 * t + 4, :] = hc[f] @ g[8 * t: 8 * t + 8, :]
        q, r, full_rank = qr_mgs(heq)
        if not full_rank:
            ok[f] = False
            continue
        z = q.T @ yt[f]
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
            e = int(labels[sidx[f, j]]) ^ int(labels[didx[j]])
            while e:
                err += e & 1
                e >>= 1
        biterr[f] = err
    return biterr, leaves, ok
