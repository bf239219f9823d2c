"""Exact integer arithmetic and multiplicative functions.

Everything here is a pure function.  Scalar routines work on Python ints;
the ``*_table`` helpers build numpy arrays indexed ``1..N`` (slot 0 unused)
for the vectorised kernels in :mod:`spectral_corners.fastops`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

INT64_MAX = 2**63 - 1


@dataclass(frozen=True)
class Factorization:
    """Prime factorisation ``n = prod p**e`` with primes increasing."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factorisation of {self.n}: {self.factors}")
            prod *= p**e
            last = p
        if prod != self.n:
            raise ValueError(f"factors multiply to {prod}, not {self.n}")

    @property
    def primes(self):
        return tuple(p for p, _ in self.factors)

    def exponent(self, p):
        for q, e in self.factors:
            if q == p:
                return e
        return 0


def _check_positive(*args):
    for a in args:
        if int(a) != a or a < 1:
            raise ValueError(f"expected a positive integer, got {a!r}")


def gcd_lcm(n, m):
    """Return ``(gcd, lcm)`` of two positive integers.

    Raises OverflowError when the lcm does not fit in a signed 64-bit int.
    """
    _check_positive(n, m)
    n, m = int(n), int(m)
    g = math.gcd(n, m)
    l = (n // g) * m
    if l > INT64_MAX:
        raise OverflowError(f"lcm({n}, {m}) exceeds the 64-bit range")
    return g, l


def factorize(n) -> Factorization:
    """Factor ``n`` by trial division (adequate for the index ranges used here)."""
    _check_positive(n)
    n = int(n)
    rest = n
    factors = []
    p = 2
    while p * p <= rest:
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            factors.append((p, e))
        p += 1 if p == 2 else 2
    if rest > 1:
        factors.append((rest, 1))
    return Factorization(n, tuple(factors))


def divisors(n):
    """Sorted list of the positive divisors of ``n``."""
    divs = [1]
    for p, e in factorize(n).factors:
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def mobius(n):
    _check_positive(n)
    f = factorize(n).factors
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(n):
    _check_positive(n)
    out = int(n)
    for p, _ in factorize(n).factors:
        out -= out // p
    return out


def jordan_totient(d, t):
    """Jordan totient ``J_t(d) = sum_{e | d} mu(d/e) e**t`` for real ``t``.

    Evaluated through the product ``d**t * prod_{p | d} (1 - p**-t)``.
    """
    _check_positive(d)
    t = float(t)
    out = float(d) ** t
    for p, _ in factorize(d).factors:
        out *= 1.0 - float(p) ** (-t)
    return out


def jordan_totient_divisor_sum(d, t):
    """Same quantity as :func:`jordan_totient`, by the defining Möbius sum."""
    t = float(t)
    return math.fsum(mobius(d // e) * float(e) ** t for e in divisors(d))


# Bernoulli numbers B_2 .. B_16 for the Euler-Maclaurin tail of zeta.
_BERNOULLI = [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
              Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510)]
_EM_TERMS = 6


def _em_terms(t, N):
    """Euler-Maclaurin correction terms for sum_{n >= N} n**-t beyond the integral."""
    terms = []
    rising = t  # (t)_{2k-1}
    fact = 2.0  # (2k)!
    for k in range(1, len(_BERNOULLI) + 1):
        if k > 1:
            rising *= (t + 2 * k - 3) * (t + 2 * k - 2)
            fact *= (2 * k - 1) * (2 * k)
        terms.append(float(_BERNOULLI[k - 1]) / fact * rising * N ** (1.0 - t - 2 * k))
    return terms


def zeta_cutoff(t, tol=1e-17):
    """Smallest partial-sum length whose Euler-Maclaurin remainder is below ``tol``."""
    N = 8
    while True:
        terms = _em_terms(t, N)
        if abs(terms[_EM_TERMS]) <= tol * max(1.0, N ** (1.0 - t) / (t - 1.0)):
            return N
        N *= 2


def zeta(t):
    """Riemann zeta for real ``t > 1`` to about 1e-15 relative.

    Partial sum up to ``N - 1`` plus the integral tail ``N**(1-t)/(t-1)``
    and Euler-Maclaurin corrections; ``N`` is picked from the size of the
    first neglected correction.
    """
    t = float(t)
    if not t > 1.0 + 1e-9:
        raise ValueError(f"zeta is only defined here for t > 1, got {t}")
    N = zeta_cutoff(t)
    n = np.arange(N - 1, 0, -1, dtype=float)  # small terms first
    head = math.fsum(n ** (-t))
    tail = [N ** (1.0 - t) / (t - 1.0), 0.5 * N ** (-t)] + _em_terms(t, N)[:_EM_TERMS]
    return math.fsum([head] + tail)


def zeta_tail_bound(t, K):
    """Integral bound for sum_{j > K} j**-t."""
    return K ** (1.0 - t) / (t - 1.0)


# --- tables ---------------------------------------------------------------

def spf_table(N):
    """Smallest-prime-factor sieve; ``spf[n]`` for ``1 <= n <= N`` (spf[1] = 1)."""
    spf = np.zeros(N + 1, dtype=np.int64)
    spf[1:] = np.arange(1, N + 1)
    for p in range(2, math.isqrt(N) + 1):
        if spf[p] == p:
            block = spf[p * p::p]
            mask = block == np.arange(p * p, N + 1, p)
            block[mask] = p
    return spf


def primes_upto(N):
    if N < 2:
        return np.zeros(0, dtype=np.int64)
    spf = spf_table(N)
    idx = np.arange(N + 1)
    return idx[2:][spf[2:] == idx[2:]]


def jordan_table(N, t):
    """``J_t(d)`` for ``d = 0..N`` (slot 0 is 0) via the multiplicative product."""
    t = float(t)
    d = np.arange(N + 1, dtype=float)
    out = np.zeros(N + 1)
    out[1:] = d[1:] ** t
    for p in primes_upto(N):
        out[p::p] *= 1.0 - float(p) ** (-t)
    return out


def phi_table(N):
    """Euler totient for ``0..N`` (slot 0 is 0), exact int64."""
    phi = np.arange(N + 1, dtype=np.int64)
    for p in primes_upto(N):
        phi[p::p] -= phi[p::p] // p
    return phi
