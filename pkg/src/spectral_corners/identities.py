"""Two-sided numerical checks of the integral and algebraic identities.

Each verifier evaluates one side by quadrature or series summation and the
other from closed-form matrix entries, and returns an
:class:`~spectral_corners.report.IdentityReport`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from . import ntheory
from .families import FamilyParams, defining_form_entries, dense_truncation, entries, \
    multiplicative_toeplitz
from .report import IdentityReport

CIRCLE_POINTS = 1024


@dataclass
class CoefficientVector:
    """Finitely supported coefficients ``f_n``, ``n`` from ``origin``."""

    coeffs: np.ndarray
    origin: int = 0

    def __post_init__(self):
        self.coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))

    @property
    def norm2(self):
        return float(np.sum(np.abs(self.coeffs) ** 2))


def _circle(M):
    return -math.pi + 2.0 * math.pi * np.arange(M) / M


def poisson_circle_aliasing(q, tau, n, M):
    """Exact trapezoid error for the n-th Poisson coefficient: the folded-back tail."""
    r = q ** (tau / 2)
    n = abs(n)
    return (r ** (M - n) + r ** (M + n)) / (1.0 - r**M)


def verify_poisson_circle(q, tau, n, M=CIRCLE_POINTS, tol=1e-10) -> IdentityReport:
    """n-th Fourier coefficient of the disk Poisson kernel at ``q**(tau/2)``, by
    the M-point trapezoid rule, against ``q**(tau*|n|/2)``."""
    if not tau > 0:
        raise ValueError("the Poisson identity needs tau > 0")
    if not 0 < q < 1:
        raise ValueError("need 0 < q < 1")
    if M < 8:
        raise ValueError("need at least 8 quadrature points")
    r = q ** (tau / 2)
    th = _circle(M)
    kernel = (1.0 - q**tau) / np.abs(1.0 - r * np.exp(1j * th)) ** 2
    lhs = float(np.mean(kernel * np.cos(n * th)))
    rhs = r ** abs(n)
    return IdentityReport("poisson-circle", lhs, rhs, tol, notes={
        "q": q, "tau": tau, "n": n, "points": M,
        "aliasing_estimate": poisson_circle_aliasing(q, tau, n, M) if abs(n) < M else None})


def _as_coeffs(f):
    return f if isinstance(f, CoefficientVector) else CoefficientVector(f)


def quadform_A_quadrature(p: FamilyParams, f, M=CIRCLE_POINTS):
    """``(1-q^tau) * mean |f(q^{rho/2} e^{i theta})|^2 / |1 - q^{tau/2} e^{i theta}|^2``."""
    f = _as_coeffs(f)
    th = _circle(M)
    z = math.sqrt(p.q) ** p.rho * np.exp(1j * th)
    fz = np.polyval(f.coeffs[::-1], z)
    weight = (1.0 - p.q**p.tau) / np.abs(1.0 - p.q ** (p.tau / 2) * np.exp(1j * th)) ** 2
    return float(np.mean(weight * np.abs(fz) ** 2))


def quadform_matrix(p: FamilyParams, f):
    f = _as_coeffs(f)
    A = dense_truncation(p, f.coeffs.size).entries
    return float(np.real(f.coeffs @ A @ np.conj(f.coeffs)))


def verify_quadform_A(p: FamilyParams, f, M=CIRCLE_POINTS, tol=1e-8) -> IdentityReport:
    """Quadratic form of A as a weighted circle integral versus the matrix sum."""
    if p.family != "A":
        raise ValueError("this identity is for family A")
    if not p.tau > 0:
        raise ValueError("the circle representation needs tau > 0")
    f = _as_coeffs(f)
    lhs = quadform_A_quadrature(p, f, M)
    rhs = quadform_matrix(p, f)
    return IdentityReport("quadform-a", lhs, rhs, tol, measure="rel",
                          notes={"params": p.label(), "degree": f.coeffs.size - 1, "points": M})


def polarized_entry_A(p: FamilyParams, n, m, M=CIRCLE_POINTS):
    """Recover ``A_{nm}`` from four circle quadratures by polarisation."""
    size = max(n, m) + 1
    total = 0.0 + 0.0j
    for k in range(4):
        f = np.zeros(size, dtype=complex)
        f[n] += 1.0
        f[m] += 1j**k
        total += (1j**k) * quadform_A_quadrature(p, f, M)
    return float(np.real(total / 4.0))


def halfplane_step(tau, n, m):
    L = abs(math.log(n / m))
    h = min(0.1, tau / 10.0)
    if L > 0:
        h = min(h, 1.0 / (4.0 * L))
    return h


def halfplane_integral(tau, n, m, T=None, step=None):
    """``(tau/2pi) int_{-T}^{T} cos(t log(n/m)) / (t^2 + tau^2/4) dt`` by composite Simpson.

    Returns ``(value, T, intervals)``.
    """
    T = max(1e4, 1e4 * tau) if T is None else float(T)
    h = halfplane_step(tau, n, m) if step is None else float(step)
    k = int(math.ceil(T / h))
    k += k % 2
    t = np.linspace(0.0, T, k + 1)
    L = math.log(n / m)
    f = np.cos(t * L) / (t * t + tau * tau / 4.0)
    return float(tau / math.pi * simpson(f, x=t)), T, k


def verify_halfplane_poisson(tau, n, m, T=None, step=None, tol=1e-4) -> IdentityReport:
    """Half-plane Poisson integral against ``exp(-|log(n/m)| tau/2)``."""
    if not tau > 0:
        raise ValueError("the half-plane identity needs tau > 0")
    lhs, T, k = halfplane_integral(tau, n, m, T, step)
    rhs = math.exp(-abs(math.log(n / m)) * tau / 2.0)
    return IdentityReport("halfplane", lhs, rhs, tol, tail_bound=tau / (math.pi * T),
                          notes={"tau": tau, "n": n, "m": m, "T": T, "intervals": k,
                                 "closed_form": "(nm)^(tau/2) / max(n,m)^tau"})


def verify_quadform_B(p: FamilyParams, f, T=None, tol=1e-4) -> IdentityReport:
    """Quadratic form of B expanded pairwise into half-plane integrals.

    ``tol`` and the tail bound are per pair and scaled by ``sum |f_n f_m| (nm)^{-rho/2}``.
    """
    if p.family != "B" or not p.tau > 0:
        raise ValueError("needs family B with tau > 0")
    f = CoefficientVector(f, origin=1) if not isinstance(f, CoefficientVector) else f
    c = f.coeffs
    N = c.size
    lhs = 0.0
    weight = 0.0
    tail = 0.0
    for i in range(N):
        for j in range(N):
            if c[i] == 0 or c[j] == 0:
                continue
            val, Tused, _ = halfplane_integral(p.tau, i + 1, j + 1, T)
            wgt = abs(c[i] * c[j]) * ((i + 1) * (j + 1)) ** (-p.rho / 2)
            lhs += float(np.real(c[i] * np.conj(c[j]))) * ((i + 1) * (j + 1)) ** (-p.rho / 2) * val
            weight += wgt
            tail = p.tau / (math.pi * Tused)
    B = dense_truncation(p, N).entries
    rhs = float(np.real(c @ B @ np.conj(c)))
    return IdentityReport("quadform-b", lhs, rhs, tol * weight, tail_bound=tail * weight,
                          notes={"params": p.label(), "terms": N})


def verify_divisor_sum_zeta(tau, n, m, K=100_000, tol=1e-12) -> IdentityReport:
    """Sum over ``k m = l n`` of ``(k l)^{-tau/2}``, parametrised by ``j``, against
    ``zeta(tau) (nm)^{tau/2} / lcm(n,m)^tau``."""
    if not tau > 2:
        raise ValueError("the divisor-sum identity needs tau > 2")
    g, l = ntheory.gcd_lcm(n, m)
    a, b = n // g, m // g
    j = np.arange(K, 0, -1, dtype=float)
    lhs = math.fsum((j * j * a * b) ** (-tau / 2))
    tail = (a * b) ** (-tau / 2) * ntheory.zeta_tail_bound(tau, K)
    rhs = ntheory.zeta(tau) * (n * m) ** (tau / 2) / float(l) ** tau
    return IdentityReport("zeta-divisor", lhs, rhs, tol, tail_bound=tail,
                          notes={"tau": tau, "n": n, "m": m, "K": K})


def verify_multiplier_gram(tau, N, K, tol=1e-12) -> IdentityReport:
    """Top-left ``N x N`` block of ``T^T T / zeta(tau)`` (T truncated at ``K``) against ``C(tau, 0)``."""
    if not tau > 2:
        raise ValueError("the multiplier is bounded only for tau > 2")
    if K < N:
        raise ValueError("need K >= N")
    T = multiplicative_toeplitz(tau, K, ncols=N)
    G = T.T @ T / ntheory.zeta(tau)
    C = dense_truncation(FamilyParams("C", tau, 0.0), N).entries
    gap = np.abs(G - C)
    idx = np.arange(1, N + 1)
    lcm = (idx[:, None] * idx[None, :]) // np.gcd.outer(idx, idx)
    J = (K // lcm).astype(float)
    # sum_{j > J} j^-tau: integral bound for J >= 1, the whole zeta sum when J = 0
    missing = np.where(J > 0, np.maximum(J, 1.0) ** (1.0 - tau) / (tau - 1.0), ntheory.zeta(tau))
    tails = C * missing / ntheory.zeta(tau)
    i, j = np.unravel_index(np.argmax(gap), gap.shape)
    return IdentityReport.from_residual(
        "multiplier-gram", G[i, j], C[i, j], gap[i, j], abs(C[i, j]), tol,
        tail_bound=float(tails.max()),
        notes={"tau": tau, "size": N, "K": K, "worst_pair": [int(i + 1), int(j + 1)]})


def bareiss_determinant(rows):
    """Exact determinant of an integer matrix by fraction-free elimination."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[-1][-1] if n else 1


SMITH_MAX = 24


def smith_determinant(N):
    """``(det{gcd(n,m)}_{n,m<=N}, prod_{k<=N} phi(k))`` in exact integers."""
    if not 1 <= N <= SMITH_MAX:
        raise ValueError(f"Smith determinant is supported for 1 <= N <= {SMITH_MAX}")
    rows = [[math.gcd(n, m) for m in range(1, N + 1)] for n in range(1, N + 1)]
    det = bareiss_determinant(rows)
    phi = math.prod(ntheory.euler_phi(k) for k in range(1, N + 1))
    return det, phi


def smith_report(N) -> IdentityReport:
    det, phi = smith_determinant(N)
    rep = IdentityReport("smith", float(det), float(phi), 0.0,
                         notes={"size": N, "det": det, "phi_product": phi})
    if det != phi:
        rep.abs_discrepancy = rep.rel_discrepancy = math.inf
    else:
        rep.abs_discrepancy = rep.rel_discrepancy = 0.0
    return rep


def toeplitz_symbol_range(tau, q):
    """Min and max of the Poisson-kernel symbol ``sum_n r^|n| e^{in theta}``, ``r = q**(tau/2)``."""
    if not tau > 0 or not 0 < q < 1:
        raise ValueError("need tau > 0 and 0 < q < 1")
    r = q ** (tau / 2)
    return (1.0 - r) / (1.0 + r), (1.0 + r) / (1.0 - r)


def tensor_factor_report(p: FamilyParams, N, tol=1e-12) -> IdentityReport:
    """Prime-by-prime product of A entries against the C entry, all ``n, m <= N``."""
    if p.family != "C":
        raise ValueError("tensor factorisation applies to family C")
    idx = np.arange(1, N + 1)
    C = entries(p, idx[:, None], idx[None, :])
    T = np.ones((N, N))
    for prime in ntheory.primes_upto(N):
        # p-adic exponents of every index, then the A(tau, rho; 1/p) block on them
        e = np.zeros(N, dtype=np.int64)
        k = idx.copy()
        while True:
            hit = k % prime == 0
            if not hit.any():
                break
            e += hit
            k = np.where(hit, k // prime, k)
        a = FamilyParams("A", p.tau, p.rho, q=1.0 / float(prime))
        T *= entries(a, e[:, None], e[None, :])
    rel = np.abs(T - C) / np.abs(C)
    i, j = np.unravel_index(np.argmax(rel), rel.shape)
    return IdentityReport.from_residual(
        "tensor", T[i, j], C[i, j], abs(T[i, j] - C[i, j]), abs(C[i, j]), tol, measure="rel",
        notes={"params": p.label(), "size": N, "worst_pair": [int(i + 1), int(j + 1)]})


def gcd_form_report(p: FamilyParams, N, tol=1e-12) -> IdentityReport:
    """Defining (max / lcm) entry form against the implemented one, all ``n, m <= N``."""
    idx = np.arange(p.origin, p.origin + N)
    a = entries(p, idx[:, None], idx[None, :])
    b = defining_form_entries(p, idx[:, None], idx[None, :])
    rel = np.abs(a - b) / np.maximum(np.abs(a), np.abs(b))
    i, j = np.unravel_index(np.argmax(rel), rel.shape)
    return IdentityReport.from_residual("defining-form", a[i, j], b[i, j], abs(a[i, j] - b[i, j]),
                                        max(abs(a[i, j]), abs(b[i, j])), tol, measure="rel",
                                        notes={"params": p.label(), "size": N})
