"""Pure-numpy counterparts of :mod:`kernels_numba` with identical signatures."""
from functools import lru_cache

import numpy as np
from scipy.signal import lfilter


def toeplitz_exp_apply(w, x, r):
    y = w * x
    fwd = lfilter([1.0], [1.0, -r], y)
    bwd = lfilter([1.0], [1.0, -r], y[::-1])[::-1]
    return w * (fwd + bwd - y)


def semiseparable_apply(alpha, beta, x):
    low = np.cumsum(beta * x)
    ax = alpha * x
    high = np.zeros_like(ax)
    high[:-1] = np.cumsum(ax[::-1])[::-1][1:]
    return alpha * low + beta * high


@lru_cache(maxsize=2)
def divisor_pairs(N):
    """All ``(d, m)`` with ``d | m <= N`` as 0-based int32 index arrays."""
    d = np.arange(1, N + 1, dtype=np.int64)
    counts = N // d
    total = int(counts.sum())
    d_rep = np.repeat(d, counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    k = np.arange(total, dtype=np.int64) - starts + 1
    m = d_rep * k
    return (d_rep - 1).astype(np.int32), (m - 1).astype(np.int32)


def gcd_gram_apply(y, jt):
    N = y.shape[0]
    di, mi = divisor_pairs(N)
    S = np.bincount(di, weights=y[mi], minlength=N)
    z = jt * S
    return np.bincount(mi, weights=z[di], minlength=N)


def _round_robin(n):
    """Rounds of disjoint index pairs covering every pair once (circle method)."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(a, tol, max_sweeps):
    """Jacobi with the round-robin ordering: each round rotates disjoint pairs at once."""
    n = a.shape[0]
    vt = np.eye(n)
    fro = np.sqrt(np.sum(a * a))
    rounds = _round_robin(n)
    off = 0.0
    for sweep in range(max_sweeps + 1):
        upper = np.triu(a, 1)
        off = np.sqrt(2.0 * np.sum(upper * upper))
        if off <= tol * fro:
            return np.diag(a).copy(), vt, sweep, off
        if sweep == max_sweeps:
            break
        for P, Q in rounds:
            if P.size == 0:
                continue
            apq = a[P, Q]
            active = apq != 0.0
            if not np.any(active):
                continue
            P, Q, apq = P[active], Q[active], apq[active]
            app = a[P, P]
            aqq = a[Q, Q]
            with np.errstate(over="ignore"):
                theta = (aqq - app) / (2.0 * apq)
            huge = np.abs(theta) > 1e150
            safe = np.where(huge, 1.0, theta)
            t = np.sign(safe) / (np.abs(safe) + np.sqrt(safe * safe + 1.0))
            t[theta == 0.0] = 1.0
            t[huge] = 0.5 / theta[huge]
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rp = a[P, :].copy()
            rq = a[Q, :]
            a[P, :] = c[:, None] * rp - s[:, None] * rq
            a[Q, :] = s[:, None] * rp + c[:, None] * rq
            cp = a[:, P].copy()
            cq = a[:, Q]
            a[:, P] = cp * c[None, :] - cq * s[None, :]
            a[:, Q] = cp * s[None, :] + cq * c[None, :]
            a[P, P] = app - t * apq
            a[Q, Q] = aqq + t * apq
            a[P, Q] = 0.0
            a[Q, P] = 0.0
            vp = vt[P, :].copy()
            vq = vt[Q, :]
            vt[P, :] = c[:, None] * vp - s[:, None] * vq
            vt[Q, :] = s[:, None] * vp + c[:, None] * vq
    return np.diag(a).copy(), vt, -1, off
