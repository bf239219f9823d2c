"""Compiled inner loops.  Arrays are 0-based; slot ``i`` holds index ``i + 1``
for the 1-based families."""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def toeplitz_exp_apply(w, x, r):
    """``out_n = w_n sum_m r**|n-m| w_m x_m``: forward and backward recurrences (0 <= r <= 1)."""
    N = x.shape[0]
    out = np.empty(N)
    acc = 0.0
    for n in range(N):
        acc = r * acc + w[n] * x[n]
        out[n] = acc
    acc = 0.0
    for n in range(N - 1, -1, -1):
        y = w[n] * x[n]
        acc = r * acc + y
        out[n] = w[n] * (out[n] + acc - y)
    return out


@njit(cache=True, nogil=True)
def semiseparable_apply(alpha, beta, x):
    """``out_n = alpha_n sum_{m<=n} beta_m x_m + beta_n sum_{m>n} alpha_m x_m``.

    Both running sums are Kahan-compensated.
    """
    N = x.shape[0]
    out = np.empty(N)
    s = 0.0
    c = 0.0
    for n in range(N):
        yk = beta[n] * x[n] - c
        t = s + yk
        c = (t - s) - yk
        s = t
        out[n] = alpha[n] * s
    s = 0.0
    c = 0.0
    for n in range(N - 1, -1, -1):
        out[n] += beta[n] * s
        yk = alpha[n] * x[n] - c
        t = s + yk
        c = (t - s) - yk
        s = t
    return out


BLOCK = 1 << 14


@njit(cache=True, nogil=True)
def _divisor_pass(src, w, dst, gather, block):
    """One harmonic pass over 1-based index pairs ``d | n``, blocked on ``n``.

    ``gather``: ``dst[d] += src[n]`` (Kahan-compensated, ``dst`` indexed by d).
    Otherwise: ``dst[n] += w[d]`` (``dst`` indexed by n).
    Small ``d <= block`` walk their multiples inside the block; larger ``d``
    are reached through the cofactor ``k = n / d <= N / block``, which gives
    a contiguous run of ``d``.  Both keep memory access local.
    """
    N = src.shape[0] if gather else w.shape[0]
    comp = np.zeros(N) if gather else np.zeros(1)
    for lo in range(1, N + 1, block):
        hi = min(lo + block - 1, N)
        for d in range(1, min(block, hi) + 1):
            first = ((lo + d - 1) // d) * d
            for n in range(first, hi + 1, d):
                if gather:
                    yk = src[n - 1] - comp[d - 1]
                    t = dst[d - 1] + yk
                    comp[d - 1] = (t - dst[d - 1]) - yk
                    dst[d - 1] = t
                else:
                    dst[n - 1] += w[d - 1]
        for k in range(1, hi // (block + 1) + 1):
            d_lo = max(block + 1, (lo + k - 1) // k)
            d_hi = hi // k
            for d in range(d_lo, d_hi + 1):
                n = k * d
                if gather:
                    yk = src[n - 1] - comp[d - 1]
                    t = dst[d - 1] + yk
                    comp[d - 1] = (t - dst[d - 1]) - yk
                    dst[d - 1] = t
                else:
                    dst[n - 1] += w[d - 1]


@njit(cache=True, nogil=True)
def gcd_gram_apply(y, jt):
    """``out_n = sum_m gcd(n, m)**tau y_m`` given ``jt[d-1] = J_tau(d)``.

    Harmonic pass ``S_d = sum_{d | m} y_m``, then ``out_n = sum_{d | n} J_tau(d) S_d``.
    """
    N = y.shape[0]
    S = np.zeros(N)
    _divisor_pass(y, y, S, True, BLOCK)
    z = jt * S
    out = np.zeros(N)
    # each out_n receives only d(n) terms, so plain accumulation is enough here
    _divisor_pass(z, z, out, False, BLOCK)
    return out


@njit(cache=True)
def jacobi_eigh(a, tol, max_sweeps):
    """Cyclic Jacobi on a symmetric matrix, in place.

    Returns ``(eigenvalues, vt, sweeps, off)`` where the rows of ``vt`` are
    eigenvectors and ``off`` is the final off-diagonal Frobenius norm.
    ``sweeps == -1`` signals the cap was hit.
    """
    n = a.shape[0]
    vt = np.eye(n)
    fro = np.sqrt(np.sum(a * a))
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += 2.0 * a[i, j] * a[i, j]
        off = np.sqrt(off)
        if off <= tol * fro:
            return np.diag(a).copy(), vt, sweep, off
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                g = 100.0 * abs(apq)
                if sweep > 3 and abs(app) + g == abs(app) and abs(aqq) + g == abs(aqq):
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[p, k]
                    akq = a[q, k]
                    a[p, k] = c * akp - s * akq
                    a[q, k] = s * akp + c * akq
                for k in range(n):
                    a[k, p] = a[p, k]
                    a[k, q] = a[q, k]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vp = vt[p, k]
                    vq = vt[q, k]
                    vt[p, k] = c * vp - s * vq
                    vt[q, k] = s * vp + c * vq
    return np.diag(a).copy(), vt, -1, off
