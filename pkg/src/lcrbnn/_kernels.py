"""Compiled numeric kernels.

Everything here is deterministic by construction: each output element is
accumulated by a single serial loop in a fixed order, so results are
bit-identical across runs and across worker-thread counts. fastmath stays
off; LLVM may vectorize elementwise work but cannot reassociate the sums.
"""

import numpy as np
from numba import njit, prange

F32 = np.float32


@njit(cache=True, parallel=True, fastmath=False)
def matmul_f32(a, b):
    """C = A @ B with per-element summation running left-to-right over k.

    Equivalent bit-for-bit to the scalar triple loop
    ``acc += a[i,k]*b[k,j]`` with k ascending, for any thread count.
    """
    m, k = a.shape
    _, n = b.shape
    out = np.zeros((m, n), dtype=F32)
    for i in prange(m):
        for kk in range(k):
            aik = a[i, kk]
            for j in range(n):
                out[i, j] += aik * b[kk, j]
    return out


@njit(cache=True, parallel=True, fastmath=False)
def gram_f32(g):
    """M = G^T @ G exploiting symmetry.

    Each M[i, j] is the same left-to-right sum over rows of G that
    matmul_f32(G^T, G) would produce; the lower triangle is a bit-exact
    mirror, so the result is exactly symmetric.
    """
    k, n = g.shape
    out = np.empty((n, n), dtype=F32)
    for i in prange(n):
        for j in range(i, n):
            acc = F32(0.0)
            for kk in range(k):
                acc += g[kk, i] * g[kk, j]
            out[i, j] = acc
            out[j, i] = acc
    return out


@njit(cache=True, fastmath=False)
def matvec_f64(m, v):
    d0, d1 = m.shape
    out = np.empty(d0, dtype=np.float64)
    for i in range(d0):
        acc = 0.0
        for j in range(d1):
            acc += m[i, j] * v[j]
        out[i] = acc
    return out


@njit(cache=True, fastmath=False)
def jacobi_eigenvalues(a, off_tol, max_sweeps):
    """Cyclic Jacobi diagonalization of a symmetric matrix (float64).

    Sweeps rotate away every |a[p,q]| until the off-diagonal Frobenius
    norm drops below off_tol. Returns (eigenvalues ascending, sweeps used,
    converged flag).
    """
    n = a.shape[0]
    a = a.copy()
    sweeps = 0
    while sweeps < max_sweeps:
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        off = np.sqrt(2.0 * off)
        if off < off_tol:
            vals = np.empty(n, dtype=np.float64)
            for i in range(n):
                vals[i] = a[i, i]
            return np.sort(vals), sweeps, True
        for p in range(n):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                phi = 0.5 * np.arctan2(2.0 * apq, aqq - app)
                c = np.cos(phi)
                s = np.sin(phi)
                a[p, p] = c * c * app + s * s * aqq - 2.0 * s * c * apq
                a[q, q] = s * s * app + c * c * aqq + 2.0 * s * c * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    if i != p and i != q:
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = c * aip - s * aiq
                        a[i, q] = c * aiq + s * aip
                        a[p, i] = a[i, p]
                        a[q, i] = a[i, q]
        sweeps += 1
    vals = np.empty(n, dtype=np.float64)
    for i in range(n):
        vals[i] = a[i, i]
    return np.sort(vals), sweeps, False


@njit(cache=True, parallel=True, fastmath=False)
def im2col_f32(x, kh, kw, stride, pad):
    """Unfold NCHW input into rows of flattened receptive fields.

    Out-of-image taps read as 0 (zero padding). Row layout: sample-major,
    then output row, then output column; columns are (c, di, dj).
    """
    n, c, h, w = x.shape
    oh = (h + 2 * pad - kh) // stride + 1
    ow = (w + 2 * pad - kw) // stride + 1
    cols = np.empty((n * oh * ow, c * kh * kw), dtype=F32)
    for s in prange(n):
        for oi in range(oh):
            for oj in range(ow):
                row = (s * oh + oi) * ow + oj
                col = 0
                for ch in range(c):
                    for di in range(kh):
                        ii = oi * stride - pad + di
                        for dj in range(kw):
                            jj = oj * stride - pad + dj
                            if 0 <= ii < h and 0 <= jj < w:
                                cols[row, col] = x[s, ch, ii, jj]
                            else:
                                cols[row, col] = F32(0.0)
                            col += 1
    return cols


@njit(cache=True, parallel=True, fastmath=False)
def col2im_f32(dcols, n, c, h, w, kh, kw, stride, pad):
    """Adjoint of im2col_f32: scatter-add rows back onto the input grid.

    Parallel over samples; within a sample the add order is fixed, so the
    result is deterministic.
    """
    oh = (h + 2 * pad - kh) // stride + 1
    ow = (w + 2 * pad - kw) // stride + 1
    dx = np.zeros((n, c, h, w), dtype=F32)
    for s in prange(n):
        for oi in range(oh):
            for oj in range(ow):
                row = (s * oh + oi) * ow + oj
                col = 0
                for ch in range(c):
                    for di in range(kh):
                        ii = oi * stride - pad + di
                        for dj in range(kw):
                            jj = oj * stride - pad + dj
                            if 0 <= ii < h and 0 <= jj < w:
                                dx[s, ch, ii, jj] += dcols[row, col]
                            col += 1
    return dx


@njit(cache=True, fastmath=False)
def _popcount64(x):
    # SWAR bit count on one uint64 word.
    m1 = np.uint64(0x5555555555555555)
    m2 = np.uint64(0x3333333333333333)
    m4 = np.uint64(0x0F0F0F0F0F0F0F0F)
    h01 = np.uint64(0x0101010101010101)
    x = x - ((x >> np.uint64(1)) & m1)
    x = (x & m2) + ((x >> np.uint64(2)) & m2)
    x = (x + (x >> np.uint64(4))) & m4
    return (x * h01) >> np.uint64(56)


@njit(cache=True, parallel=True, fastmath=False)
def xnor_gemm_i32(a_bits, b_bits, k):
    """out[i, j] = k - 2 * popcount(a_row_i XOR b_row_j).

    Both operands are zero-padded in the tail word, so padding bits XOR to
    0 and never enter the count.
    """
    m = a_bits.shape[0]
    n = b_bits.shape[0]
    words = a_bits.shape[1]
    out = np.empty((m, n), dtype=np.int32)
    for i in prange(m):
        for j in range(n):
            acc = np.uint64(0)
            for w in range(words):
                acc += _popcount64(a_bits[i, w] ^ b_bits[j, w])
            out[i, j] = np.int32(k) - np.int32(2) * np.int32(acc)
    return out


@njit(cache=True, parallel=True, fastmath=False)
def xnor_gemm_masked_i32(a_bits, a_mask, a_valid, b_bits):
    """Masked variant: out[i, j] = valid_i - 2 * popcount((a_i ^ b_j) & mask_i).

    Used for convolution patches where zero-padded taps must contribute 0
    to the dot product rather than +/-1.
    """
    m = a_bits.shape[0]
    n = b_bits.shape[0]
    words = a_bits.shape[1]
    out = np.empty((m, n), dtype=np.int32)
    for i in prange(m):
        for j in range(n):
            acc = np.uint64(0)
            for w in range(words):
                acc += _popcount64((a_bits[i, w] ^ b_bits[j, w]) & a_mask[i, w])
            out[i, j] = a_valid[i] - np.int32(2) * np.int32(acc)
    return out


@njit(cache=True, parallel=True, fastmath=False)
def render_glyphs_f32(bases, labels, params, out):
    """Rasterize affine-warped glyphs with bilinear sampling.

    params rows: (cos_t, sin_t, inv_scale, dx, dy, gain). The transform is
    applied around the image center, mapping output pixels back into the
    base glyph.
    """
    n = labels.shape[0]
    h = bases.shape[1]
    w = bases.shape[2]
    cy = (h - 1) * 0.5
    cx = (w - 1) * 0.5
    for s in prange(n):
        base = bases[labels[s]]
        ct = params[s, 0]
        st = params[s, 1]
        inv = params[s, 2]
        dx = params[s, 3]
        dy = params[s, 4]
        gain = params[s, 5]
        for r in range(h):
            for c in range(w):
                yr = (r - cy - dy) * inv
                xr = (c - cx - dx) * inv
                ys = ct * yr + st * xr + cy
                xs = -st * yr + ct * xr + cx
                y0 = int(np.floor(ys))
                x0 = int(np.floor(xs))
                fy = ys - y0
                fx = xs - x0
                v = 0.0
                for oy in range(2):
                    yy = y0 + oy
                    if yy < 0 or yy >= h:
                        continue
                    wy = fy if oy == 1 else 1.0 - fy
                    for ox in range(2):
                        xx = x0 + ox
                        if xx < 0 or xx >= w:
                            continue
                        wx = fx if ox == 1 else 1.0 - fx
                        v += wy * wx * base[yy, xx]
                out[s, r, c] = F32(gain * v)


@njit(cache=True, parallel=True, fastmath=False)
def blur3_batch_f32(imgs, weights):
    """Separable 3-tap blur per image; weights[s] = (side, center, side)."""
    n, h, w = imgs.shape
    out = np.empty_like(imgs)
    for s in prange(n):
        side = weights[s, 0]
        center = weights[s, 1]
        tmp = np.empty((h, w), dtype=F32)
        for r in range(h):
            for c in range(w):
                left = imgs[s, r, c - 1] if c > 0 else F32(0.0)
                right = imgs[s, r, c + 1] if c < w - 1 else F32(0.0)
                tmp[r, c] = side * left + center * imgs[s, r, c] + side * right
        for r in range(h):
            for c in range(w):
                up = tmp[r - 1, c] if r > 0 else F32(0.0)
                down = tmp[r + 1, c] if r < h - 1 else F32(0.0)
                out[s, r, c] = side * up + center * tmp[r, c] + side * down
    return out
