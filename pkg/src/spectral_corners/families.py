"""Entry formulas and finite truncations of the three matrix families.

Family A is indexed from 0, families B and C from 1::

    A_{nm} = q**(tau*|n-m|/2) * q**(rho*(n+m)/2)
    B_{nm} = (nm)**(tau/2) * max(n,m)**-tau * (nm)**(-rho/2)
    C_{nm} = gcd(n,m)**tau * (nm)**(-(tau+rho)/2)

All entries are evaluated as ``exp(log value)`` with a symmetric
expression for the log, so ``entry(n, m) == entry(m, n)`` bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import ntheory
from .report import IdentityReport

LOG_LIMIT = 700.0


class EntryRangeError(OverflowError):
    """An entry's magnitude exceeds what a double can hold."""


class IndexOriginError(IndexError):
    pass


@dataclass(frozen=True)
class FamilyParams:
    family: str
    tau: float
    rho: float
    q: float | None = None

    def __post_init__(self):
        fam = str(self.family).upper()
        object.__setattr__(self, "family", fam)
        if fam not in ("A", "B", "C"):
            raise ValueError(f"family must be A, B or C, not {self.family!r}")
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "rho", float(self.rho))
        if not (math.isfinite(self.tau) and math.isfinite(self.rho)):
            raise ValueError("tau and rho must be finite")
        if fam == "A":
            if self.q is None or not 0.0 < float(self.q) < 1.0:
                raise ValueError(f"family A needs 0 < q < 1, got q={self.q!r}")
            object.__setattr__(self, "q", float(self.q))
        elif self.q is not None:
            raise ValueError(f"q is only meaningful for family A, got q={self.q!r}")

    @property
    def origin(self):
        return 0 if self.family == "A" else 1

    def with_tau(self, tau):
        return FamilyParams(self.family, tau, self.rho, self.q)

    def label(self):
        q = f";q={self.q:g}" if self.family == "A" else ""
        return f"{self.family}({self.tau:g},{self.rho:g}{q})"


@dataclass
class DenseSymMatrix:
    params: FamilyParams
    entries: np.ndarray
    origin: int

    @property
    def size(self):
        return self.entries.shape[0]

    @property
    def indices(self):
        return np.arange(self.origin, self.origin + self.size)


@dataclass
class RankTwoDecomposition:
    alpha: np.ndarray
    beta: np.ndarray


def _log_entries(p: FamilyParams, n, m):
    n = np.asarray(n, dtype=np.int64)
    m = np.asarray(m, dtype=np.int64)
    if p.family == "A":
        lq = math.log(p.q)
        return lq * (0.5 * p.tau * np.abs(n - m) + 0.5 * p.rho * (n + m))
    ln_nm = np.log(n.astype(float)) + np.log(m.astype(float))
    if p.family == "B":
        return 0.5 * (p.tau - p.rho) * ln_nm - p.tau * np.log(np.maximum(n, m).astype(float))
    g = np.gcd(n, m).astype(float)
    return p.tau * np.log(g) - 0.5 * (p.tau + p.rho) * ln_nm


def _exp_checked(logv):
    logv = np.asarray(logv, dtype=float)
    if logv.size and np.max(logv) > LOG_LIMIT:
        raise EntryRangeError(
            f"entry magnitude exp({float(np.max(logv)):.1f}) is out of double range")
    # tiny entries flush to zero rather than erroring
    return np.where(logv < -LOG_LIMIT, 0.0, np.exp(np.maximum(logv, -LOG_LIMIT - 1.0)))


def _check_indices(p, *idx):
    for i in idx:
        if np.any(np.asarray(i) < p.origin):
            raise IndexOriginError(
                f"family {p.family} is indexed from {p.origin}, got index {np.min(i)}")


def _direct_entries(p: FamilyParams, n, m):
    """Entries as products of powers: exact whenever the powers are."""
    n = np.asarray(n, dtype=np.int64)
    m = np.asarray(m, dtype=np.int64)
    t, r = p.tau, p.rho
    if p.family == "A":
        return p.q ** (0.5 * (t * np.abs(n - m) + r * (n + m)))
    nf, mf = n.astype(float), m.astype(float)
    if p.family == "B":
        return (np.minimum(nf, mf) / np.maximum(nf, mf)) ** (0.5 * t) * (nf * mf) ** (-0.5 * r)
    return np.gcd(n, m).astype(float) ** t * (nf * mf) ** (-0.5 * (t + r))


def entries(p: FamilyParams, n, m):
    """Vectorised entry evaluation over broadcastable index arrays.

    Magnitudes are range-checked in log space; in-range entries are then
    evaluated as direct power products so that e.g. dyadic values come out exact.
    """
    _check_indices(p, n, m)
    logv = _log_entries(p, n, m)
    safe = _exp_checked(logv)
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        direct = _direct_entries(p, n, m)
    good = np.isfinite(direct) & (direct > 0) & (np.abs(logv) < LOG_LIMIT)
    return np.where(good, direct, safe)


def entry(p: FamilyParams, n: int, m: int) -> float:
    return float(entries(p, np.array([n]), np.array([m]))[0])


def dense_truncation(p: FamilyParams, N: int) -> DenseSymMatrix:
    """The leading ``N x N`` block, filled on the upper triangle and mirrored."""
    if N < 1:
        raise ValueError(f"truncation size must be positive, got {N}")
    iu, ju = np.triu_indices(N)
    vals = entries(p, iu + p.origin, ju + p.origin)
    M = np.empty((N, N))
    M[iu, ju] = vals
    M[ju, iu] = vals
    return DenseSymMatrix(p, M, p.origin)


def diagonal(p: FamilyParams, N: int):
    idx = np.arange(p.origin, p.origin + N)
    return entries(p, idx, idx)


def defining_form_entries(p: FamilyParams, n, m):
    """Entries from the defining max/lcm expressions, independent of :func:`entries`.

    A uses ``q**(tau*max(n,m)) / q**(tau*(n+m)/2)``, C uses the lcm.
    """
    _check_indices(p, n, m)
    n = np.asarray(n, dtype=np.int64)
    m = np.asarray(m, dtype=np.int64)
    nf, mf = n.astype(float), m.astype(float)
    t, r = p.tau, p.rho
    if p.family == "A":
        q = p.q
        return q ** (t * np.maximum(nf, mf)) / q ** (t * (nf + mf) / 2) * q ** (r * (nf + mf) / 2)
    if p.family == "B":
        return (nf * mf) ** (t / 2) / np.maximum(nf, mf) ** t / (nf * mf) ** (r / 2)
    lcm = (n // np.gcd(n, m) * m).astype(float)
    return (nf * mf) ** (t / 2) / lcm ** t / (nf * mf) ** (r / 2)


def rank_two_decomposition(p: FamilyParams, N: int) -> RankTwoDecomposition:
    """``alpha, beta`` with ``M(tau) + M(-tau) = alpha beta^T + beta alpha^T``."""
    t, r = p.tau, p.rho
    if p.family == "A":
        n = np.arange(N, dtype=float)
        lq = math.log(p.q)
        return RankTwoDecomposition(np.exp(lq * (r + t) * n / 2), np.exp(lq * (r - t) * n / 2))
    if p.family == "B":
        n = np.arange(1, N + 1, dtype=float)
        return RankTwoDecomposition(n ** (-(r + t) / 2), n ** (-(r - t) / 2))
    raise ValueError("family C has no rank-two reduction")


def rank_two_residual(p: FamilyParams, N: int, tol=1e-12) -> IdentityReport:
    """Worst entrywise gap in ``M(tau) + M(-tau) = alpha beta^T + beta alpha^T`` over ``N x N``."""
    if p.family == "C":
        raise ValueError("family C has no rank-two reduction")
    plus = dense_truncation(p, N).entries
    minus = dense_truncation(p.with_tau(-p.tau), N).entries
    dec = rank_two_decomposition(p, N)
    ab = np.outer(dec.alpha, dec.beta)
    lhs = plus + minus
    rhs = ab + ab.T
    scale = np.maximum.reduce([np.abs(plus), np.abs(minus), np.abs(ab), np.abs(ab.T)])
    rel = np.abs(lhs - rhs) / np.where(scale > 0, scale, 1.0)
    i, j = np.unravel_index(np.argmax(rel), rel.shape)
    return IdentityReport.from_residual(
        "rank-two", lhs[i, j], rhs[i, j], residual=np.abs(lhs - rhs)[i, j], scale=scale[i, j],
        tolerance=tol, measure="rel",
        notes={"params": p.label(), "size": N, "worst_pair": [int(i + p.origin), int(j + p.origin)],
               "max_abs_residual": float(np.max(np.abs(lhs - rhs)))})


def scaling_check(p: FamilyParams, k: int, n: int, m: int, tol=1e-12) -> IdentityReport:
    """Shift relation ``A_{n+k,m+k} = q**(rho*k) A_{nm}``; homogeneity of degree ``-rho`` for B and C."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    if p.family == "A":
        lhs = entry(p, n + k, m + k)
        # the shift multiplies by q**(rho*k), as the entry formula dictates
        rhs = math.exp(p.rho * k * math.log(p.q)) * entry(p, n, m)
    else:
        lhs = entry(p, k * n, k * m)
        rhs = float(k) ** (-p.rho) * entry(p, n, m)
    return IdentityReport("scaling", lhs, rhs, tol, measure="rel",
                          notes={"params": p.label(), "k": k, "n": n, "m": m})


def tensor_factor_entry(p: FamilyParams, n: int, m: int) -> float:
    """C entry as a product over primes of A(tau, rho; 1/p) entries at the exponents."""
    if p.family != "C":
        raise ValueError("tensor factorisation applies to family C")
    _check_indices(p, n, m)
    fn = ntheory.factorize(n)
    fm = ntheory.factorize(m)
    out = 1.0
    for prime in sorted(set(fn.primes) | set(fm.primes)):
        a = FamilyParams("A", p.tau, p.rho, q=1.0 / prime)
        out *= entry(a, fn.exponent(prime), fm.exponent(prime))
    return out


def multiplicative_toeplitz(tau: float, N: int, ncols=None) -> np.ndarray:
    """``T[m-1, n-1] = (m/n)**(-tau/2)`` when ``n | m``, else 0 (rows ``m <= N``).

    ``ncols`` keeps only the first columns, which is all a Gram block needs.
    """
    if N < 1:
        raise ValueError("N must be positive")
    ncols = N if ncols is None else min(int(ncols), N)
    T = np.zeros((N, ncols))
    for n in range(1, ncols + 1):
        k = np.arange(1, N // n + 1)
        T[k * n - 1, n - 1] = k.astype(float) ** (-tau / 2)
    return T
