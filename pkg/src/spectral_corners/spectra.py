"""Eigensolvers and spectral diagnostics for truncations."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import _accel
from .families import DenseSymMatrix

DENSE_MAX = 2048
# above this size eig_dense defers to LAPACK (Jacobi is O(N^3) per sweep)
JACOBI_MAX = 512 if _accel.HAVE_NUMBA else 256
JACOBI_SWEEPS = 30
ZERO_TOL = 1e-10

_K = _accel.kernels()


class JacobiConvergenceError(RuntimeError):
    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


@dataclass
class SpectralSummary:
    eigenvalues: np.ndarray
    n_pos: int
    n_neg: int
    n_zero: int
    trace: float
    frobenius: float
    method: str = "jacobi"
    sweeps: int = 0
    off_norm: float = 0.0
    vectors: np.ndarray | None = field(default=None, repr=False)

    @property
    def size(self):
        return len(self.eigenvalues)

    @property
    def lambda_max(self):
        return float(self.eigenvalues[0])

    @property
    def lambda_min(self):
        return float(self.eigenvalues[-1])


@dataclass
class DecayFit:
    model: str
    rate: float
    fit_range: tuple[int, int]
    residual: float
    intercept: float = 0.0


def _as_array(M):
    if isinstance(M, DenseSymMatrix):
        return M.entries
    return np.asarray(M, dtype=float)


def inertia(s, tol=ZERO_TOL):
    """Counts ``(n_pos, n_neg, n_zero)``; ``|lambda| <= tol * max|lambda|`` counts as zero."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    ev = np.asarray(s.eigenvalues if isinstance(s, SpectralSummary) else s, dtype=float)
    if ev.size == 0:
        return 0, 0, 0
    cut = tol * np.max(np.abs(ev))
    pos = int(np.sum(ev > cut))
    neg = int(np.sum(ev < -cut))
    return pos, neg, int(ev.size - pos - neg)


def eig_dense(M, method="auto", vectors=False, tol=1e-12, max_sweeps=JACOBI_SWEEPS,
              zero_tol=ZERO_TOL) -> SpectralSummary:
    """Full symmetric eigendecomposition of a truncation.

    ``method="jacobi"`` runs cyclic Jacobi until the off-diagonal Frobenius
    norm is below ``tol * ||M||_F``; ``"lapack"`` calls ``numpy.linalg.eigh``.
    ``"auto"`` uses Jacobi up to ``JACOBI_MAX`` and LAPACK beyond.
    """
    a = _as_array(M)
    N = a.shape[0]
    if a.ndim != 2 or a.shape != (N, N):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if N > DENSE_MAX:
        raise ValueError(f"dense eigensolve is limited to N <= {DENSE_MAX}, got {N}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix is not symmetric")
    if method == "auto":
        method = "jacobi" if N <= JACOBI_MAX else "lapack"
    fro = float(np.linalg.norm(a))
    trace = float(np.trace(a))
    sweeps, off = 0, 0.0
    if method == "jacobi":
        w, vt, sweeps, off = _K.jacobi_eigh(a.copy(), tol, max_sweeps)
        vecs = vt.T
    elif method == "lapack":
        w, vecs = np.linalg.eigh(a)
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.argsort(w)[::-1]
    w = np.asarray(w)[order]
    pos, neg, zero = inertia(w, zero_tol)
    summary = SpectralSummary(w, pos, neg, zero, trace, fro, method, int(sweeps), float(off),
                              vecs[:, order] if vectors else None)
    if sweeps == -1:
        raise JacobiConvergenceError(
            f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal {off:.3e})", summary)
    return summary


def decay_fit(s, model, fit_range) -> DecayFit:
    """Least-squares line through ``log lambda_n`` against ``n`` (exponential)
    or ``log n`` (power), ``n`` counted from 1 in descending order."""
    ev = np.asarray(s.eigenvalues if isinstance(s, SpectralSummary) else s, dtype=float)
    lo, hi = int(fit_range[0]), int(fit_range[1])
    if not 1 <= lo < hi <= ev.size:
        raise ValueError(f"fit range {fit_range} is empty or outside 1..{ev.size}")
    n = np.arange(lo, hi + 1)
    lam = ev[lo - 1:hi]
    if np.any(lam <= 0):
        raise ValueError("decay fit needs strictly positive eigenvalues in the range")
    if model == "exponential":
        x = n.astype(float)
    elif model == "power":
        x = np.log(n)
    else:
        raise ValueError(f"unknown decay model {model!r}")
    y = np.log(lam)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return DecayFit(model, float(slope), (lo, hi), float(np.sqrt(np.mean(resid**2))),
                    float(intercept))


def interlaces(small, big, tol=1e-9):
    """True when the (descending) spectra of nested N and N+1 truncations interlace."""
    small = np.asarray(small)
    big = np.asarray(big)
    if big.size != small.size + 1:
        raise ValueError("spectra must differ in size by one")
    slack = tol * max(1.0, float(np.max(np.abs(big))))
    return bool(np.all(big[:-1] >= small - slack) and np.all(small >= big[1:] - slack))


# --- Lanczos ----------------------------------------------------------------

@dataclass
class LanczosResult:
    top: np.ndarray
    bottom: np.ndarray
    top_residuals: np.ndarray
    bottom_residuals: np.ndarray
    iterations: int
    converged: bool
    breakdown: bool

    @property
    def lambda_max(self):
        return float(self.top[0])

    @property
    def lambda_min(self):
        return float(self.bottom[0])


def _operator(op, size):
    if hasattr(op, "shape") and callable(op):
        return op, op.shape[0]
    if callable(op) and size is not None:
        return op, size
    raise TypeError("operator must be a handle with .shape or a callable plus size")


def lanczos_extremes(op, k=1, max_iter=300, tol=1e-10, seed=0, size=None,
                     which="both") -> LanczosResult:
    """Top-``k`` and bottom-``k`` Ritz values with fully reorthogonalised Lanczos.

    ``which`` ("both", "top", "bottom") selects the end(s) that must
    converge; the other end is still returned, unconverged.  Stops when
    every wanted Ritz pair has estimated residual
    ``beta_m |s_mi| <= tol * max|theta|``, at ``max_iter``, or on breakdown
    (an invariant subspace, in which case the Ritz values are exact).
    Reported residuals are recomputed explicitly as ``||A y - theta y|| / ||y||``.
    """
    apply, N = _operator(op, size)
    if k < 1:
        raise ValueError("k must be at least 1")
    if which not in ("both", "top", "bottom"):
        raise ValueError(f"which must be both, top or bottom, not {which!r}")
    m_max = min(int(max_iter), N)
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(N)
    q /= np.linalg.norm(q)
    cap = min(m_max, 64) + 1
    Q = np.empty((cap, N))
    Q[0] = q
    alphas, betas = [], []
    breakdown = converged = False
    theta = S = None
    beta_prev = 0.0
    j = 0
    for j in range(m_max):
        w = apply(Q[j])
        if not np.all(np.isfinite(w)):
            raise FloatingPointError("operator produced non-finite values")
        a = float(Q[j] @ w)
        w -= a * Q[j]
        if j:
            w -= beta_prev * Q[j - 1]
        for _ in range(2):
            w -= Q[:j + 1].T @ (Q[:j + 1] @ w)
        b = float(np.linalg.norm(w))
        if not (math.isfinite(a) and math.isfinite(b)):
            raise FloatingPointError("Lanczos coefficients overflowed")
        alphas.append(a)
        betas.append(b)
        theta, S = eigh_tridiagonal(np.array(alphas), np.array(betas[:-1])) if j else (
            np.array([a]), np.ones((1, 1)))
        scale = max(float(np.max(np.abs(theta))), np.finfo(float).tiny)
        bounds = b * np.abs(S[-1, :])
        kk = min(k, theta.size)
        wanted = np.r_[bounds[:kk] if which != "top" else [],
                       bounds[theta.size - kk:] if which != "bottom" else []]
        if b <= 1e-14 * scale:
            breakdown = True
            converged = True
            break
        if np.all(wanted <= tol * scale):
            converged = True
            break
        if j + 1 == m_max:
            break
        if j + 1 >= Q.shape[0]:
            grown = np.empty((min(2 * Q.shape[0], m_max + 1), N))
            grown[:Q.shape[0]] = Q
            Q = grown
        Q[j + 1] = w / b
        beta_prev = b
    m = len(alphas)
    if m == N and not converged:
        converged = True  # full Krylov space: T is similar to the operator
    kk = min(k, m)
    top_idx = np.arange(m - 1, m - 1 - kk, -1)
    bot_idx = np.arange(kk)

    def residuals(idx):
        out = []
        for i in idx:
            y = Q[:m].T @ S[:, i]
            out.append(np.linalg.norm(apply(y) - theta[i] * y) / np.linalg.norm(y))
        return np.array(out)

    return LanczosResult(theta[top_idx], theta[bot_idx], residuals(top_idx), residuals(bot_idx),
                         m, bool(converged), bool(breakdown))


def trace_of(M):
    a = _as_array(M)
    return math.fsum(np.diag(a))
