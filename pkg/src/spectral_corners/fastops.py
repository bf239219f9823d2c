"""Structured matrix-vector products for truncations far beyond dense storage.

* A with ``tau > 0``: ``D_w T D_w``, ``T`` the Toeplitz kernel ``r**|n-m|``,
  ``r = q**(tau/2)``, ``w_n = q**(rho*n/2)``; two first-order recurrences.
* A with ``tau <= 0`` and B: semiseparable ``M_{nm} = alpha_max(n,m) beta_min(n,m)``;
  for B this is the weighted L-matrix with weights ``n**((tau-rho)/2)`` and
  L-part ``max(n,m)**-tau``.  Two running sums.
* C: ``D_v G D_v`` with ``G_{nm} = gcd(n,m)**tau = sum_{d | n, d | m} J_tau(d)``
  and ``v_n = n**(-(tau+rho)/2)``; two harmonic passes, O(N log N).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _accel, ntheory
from .families import LOG_LIMIT, EntryRangeError, FamilyParams, entries
from .report import IdentityReport

UNDERFLOW_LOG = -745.0

_K = _accel.kernels()


def _exp_weights(logw):
    """Exponentiate log-weights: overflow raises, underflow zeroes."""
    if logw.size and np.max(logw) > LOG_LIMIT:
        raise EntryRangeError(f"weight exp({np.max(logw):.1f}) exceeds double range")
    under = logw < UNDERFLOW_LOG
    w = np.where(under, 0.0, np.exp(np.maximum(logw, UNDERFLOW_LOG)))
    return w, bool(np.any(under))


@dataclass
class LinearOperatorHandle:
    params: FamilyParams
    size: int
    kind: str
    weights: np.ndarray
    ratio: float = 0.0
    alpha: np.ndarray | None = None
    beta: np.ndarray | None = None
    jordan: np.ndarray | None = None
    underflow: bool = False
    matvecs: int = field(default=0, compare=False)

    @property
    def shape(self):
        return (self.size, self.size)

    def __call__(self, x):
        return matvec(self, x)

    def diagonal(self):
        idx = np.arange(self.params.origin, self.params.origin + self.size)
        return entries(self.params, idx, idx)

    def as_linear_operator(self):
        from scipy.sparse.linalg import LinearOperator
        return LinearOperator(self.shape, matvec=lambda x: matvec(self, np.ravel(x)),
                              rmatvec=lambda x: matvec(self, np.ravel(x)), dtype=float)


def make_handle(p: FamilyParams, N: int) -> LinearOperatorHandle:
    """Precompute weights (and Jordan totients for C) for ``N x N`` products."""
    if N < 1:
        raise ValueError("size must be positive")
    t, r = p.tau, p.rho
    if p.family == "A":
        n = np.arange(N, dtype=float)
        lq = math.log(p.q)
        if t > 0:
            w, under = _exp_weights(0.5 * r * lq * n)
            return LinearOperatorHandle(p, N, "toeplitz", w, ratio=math.exp(0.5 * t * lq),
                                        underflow=under)
        alpha, ua = _exp_weights(0.5 * (r + t) * lq * n)
        beta, ub = _exp_weights(0.5 * (r - t) * lq * n)
        return LinearOperatorHandle(p, N, "semiseparable", beta, alpha=alpha, beta=beta,
                                    underflow=ua or ub)
    ln = np.log(np.arange(1, N + 1, dtype=float))
    if p.family == "B":
        alpha, ua = _exp_weights(-0.5 * (r + t) * ln)
        beta, ub = _exp_weights(0.5 * (t - r) * ln)
        return LinearOperatorHandle(p, N, "semiseparable", beta, alpha=alpha, beta=beta,
                                    underflow=ua or ub)
    v, under = _exp_weights(-0.5 * (t + r) * ln)
    jt = ntheory.jordan_table(N, t)[1:]
    return LinearOperatorHandle(p, N, "gcd", v, jordan=jt, underflow=under)


def _check(h, x, family=None):
    if family is not None and h.params.family not in family:
        raise ValueError(f"handle is for family {h.params.family}, expected {family}")
    x = np.asarray(x, dtype=float)
    if x.shape != (h.size,):
        raise ValueError(f"vector of shape {x.shape} does not match operator size {h.size}")
    return np.ascontiguousarray(x)


def matvec_A(h: LinearOperatorHandle, x):
    x = _check(h, x, "A")
    h.matvecs += 1
    if h.kind == "toeplitz":
        return _K.toeplitz_exp_apply(h.weights, x, h.ratio)
    return _K.semiseparable_apply(h.alpha, h.beta, x)


def matvec_B(h: LinearOperatorHandle, x):
    x = _check(h, x, "B")
    h.matvecs += 1
    return _K.semiseparable_apply(h.alpha, h.beta, x)


def matvec_C(h: LinearOperatorHandle, x):
    x = _check(h, x, "C")
    h.matvecs += 1
    v = h.weights
    return v * _K.gcd_gram_apply(v * x, h.jordan)


_DISPATCH = {"A": matvec_A, "B": matvec_B, "C": matvec_C}


def matvec(h: LinearOperatorHandle, x):
    return _DISPATCH[h.params.family](h, x)


def gram_factor_check(tau: float, N: int, tol=1e-12) -> IdentityReport:
    """Compare ``gcd(n,m)**tau`` with ``sum_{d | gcd} J_tau(d)`` for all ``n, m <= N``."""
    jt = ntheory.jordan_table(N, tau)[1:]
    n = np.arange(1, N + 1)
    D = (n[None, :] % n[:, None] == 0).astype(float)  # D[d-1, n-1] = [d | n]
    G = D.T @ (jt[:, None] * D)
    direct = np.gcd.outer(n, n).astype(float) ** tau
    scale = D.T @ (np.abs(jt)[:, None] * D)
    gap = np.abs(G - direct)
    rel = gap / scale
    i, j = np.unravel_index(np.argmax(rel), rel.shape)
    notes = {"tau": tau, "size": N}
    if tau > 0:
        notes["jordan_min"] = float(jt.min())
        notes["jordan_nonnegative"] = bool(jt.min() >= 0.0)
    rep = IdentityReport.from_residual("gram-factor", G[i, j], direct[i, j], gap[i, j],
                                       scale[i, j], tol, measure="rel", notes=notes)
    if tau > 0 and jt.min() < 0.0:
        rep.rel_discrepancy = math.inf
    return rep
