"""Analytic classification of (tau, rho) and its empirical counterpart.

The analytic side encodes the known boundedness / compactness / trace-class
table for each family.  The empirical side watches ``lambda_max`` of nested
truncations: interlacing makes it nondecreasing in ``N``, so it either
settles (bounded) or keeps climbing (unbounded).
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .families import EntryRangeError, FamilyParams, diagonal, entries
from .fastops import make_handle, matvec
from .spectra import lanczos_extremes

BAND = 0.1
GROWTH_RATIO = 1.05
SETTLE_SPREAD = 0.01
SCAN_SIZES = {"A": tuple(2**k for k in range(3, 9)),
              "B": tuple(2**k for k in range(6, 13)),
              "C": tuple(2**k for k in range(6, 13))}
# open bounded-and-compact region: intersection of a_tau*tau + a_rho*rho > c
REGION_HALFPLANES = {"A": ((0.0, 1.0, 0.0), (1.0, 1.0, 0.0)),
                     "B": ((0.0, 1.0, 1.0), (1.0, 1.0, 1.0)),
                     "C": ((0.0, 1.0, 0.0), (1.0, 1.0, 1.0))}
# wedge apex (tau, rho); the boundary rays leave it along (1, 0) and (-1, 1)
REGION_APEX = {"A": (0.0, 0.0), "B": (0.0, 1.0), "C": (1.0, 0.0)}
RAY_DIRECTIONS = ((1.0, 0.0), (-1.0 / math.sqrt(2.0), 1.0 / math.sqrt(2.0)))


@dataclass(frozen=True)
class ClassVerdict:
    psd: bool
    bounded: bool
    compact: bool
    trace_class: str  # "yes" | "no" | "unknown"

    def __post_init__(self):
        if self.trace_class not in ("yes", "no", "unknown"):
            raise ValueError(f"bad trace_class {self.trace_class!r}")
        if self.trace_class == "yes" and not self.compact:
            raise ValueError("trace class must be compact")
        if self.compact and not self.bounded:
            raise ValueError("compact must be bounded")


@dataclass
class RegionVerdict:
    family: str
    tau: float
    rho: float
    analytic: ClassVerdict
    empirical: str
    lambda_max_by_size: list = field(default_factory=list)
    in_band: bool = False
    q: float | None = None
    note: str = ""

    @property
    def lmax_last(self):
        return self.lambda_max_by_size[-1][1] if self.lambda_max_by_size else math.nan

    @property
    def agrees(self):
        if self.empirical == "inconclusive":
            return None
        return (self.empirical == "bounded") == self.analytic.bounded

    def row(self):
        a = self.analytic
        return {"family": self.family, "tau": self.tau, "rho": self.rho, "psd": a.psd,
                "bounded": a.bounded, "compact": a.compact, "trace_class": a.trace_class,
                "empirical": self.empirical, "lmax_last": self.lmax_last}


CSV_COLUMNS = ["family", "tau", "rho", "psd", "bounded", "compact", "trace_class",
               "empirical", "lmax_last"]


def analytic_classification(p: FamilyParams) -> ClassVerdict:
    t, r = p.tau, p.rho
    psd = t >= 0
    if p.family == "A":
        bounded = (t > 0 and r >= 0) or (t == 0 and r > 0) or (t < 0 and r + t > 0)
        compact = bounded and not (t > 0 and r == 0)
        return ClassVerdict(psd, bounded, compact, "yes" if compact else "no")
    if p.family == "B":
        bounded = (t > 0 and r >= 1) or (t == 0 and r > 1) or (t < 0 and r + t > 1)
        compact = bounded and not (t > 0 and r == 1)
        return ClassVerdict(psd, bounded, compact, "yes" if compact else "no")
    bounded = ((t > 0 and r > 0 and r + t > 1) or (t > 0 and r == 0 and t > 2)
               or (t == 0 and r > 1) or (t < 0 and r + t > 1))
    compact = bounded and not (r == 0 and t > 2)
    if not compact:
        trace = "no"
    elif t > 0:
        trace = "yes" if r > 1 else "no"
    else:
        trace = "yes"
    return ClassVerdict(psd, bounded, compact, trace)


def in_region(family, tau, rho):
    """Membership in the open bounded-and-compact region of the figure."""
    return all(a * tau + b * rho > c for a, b, c in REGION_HALFPLANES[family])


def boundary_distance(family, tau, rho):
    """Euclidean distance in the (tau, rho) plane to the region's two boundary rays."""
    t0, r0 = REGION_APEX[family]
    best = math.inf
    for dt, dr in RAY_DIRECTIONS:
        s = max(0.0, (tau - t0) * dt + (rho - r0) * dr)
        best = min(best, math.hypot(tau - t0 - s * dt, rho - r0 - s * dr))
    return best


def in_boundary_band(family, tau, rho, band=BAND):
    return boundary_distance(family, tau, rho) < band


# --- empirical ---------------------------------------------------------------

def lambda_max(p: FamilyParams, N, max_iter=300, tol=1e-10):
    h = make_handle(p, N)
    return lanczos_extremes(h, k=1, max_iter=max_iter, tol=tol, which="top").lambda_max


def growth_tag(values):
    """``bounded``, ``unbounded`` or ``inconclusive`` from ``lambda_max`` at doubling sizes.

    Unbounded: the last value exceeds the one two sizes back by more than 5%
    and the last increment has not shrunk below half the previous one.
    Bounded: the last three values lie within 1% of each other.
    """
    v = [float(x) for x in values]
    if len(v) < 3:
        return "inconclusive"
    if any(math.isinf(x) for x in v):
        return "unbounded"
    a, b, c = v[-3:]
    if a <= 0:
        return "inconclusive"
    if (max(a, b, c) - min(a, b, c)) <= SETTLE_SPREAD * max(a, b, c):
        return "bounded"
    d1, d2 = b - a, c - b
    if c / a > GROWTH_RATIO and d2 > 0.5 * d1:
        return "unbounded"
    return "inconclusive"


def scan_point(p: FamilyParams, sizes, band=BAND) -> RegionVerdict:
    verdict = analytic_classification(p)
    lm = []
    note = ""
    for N in sizes:
        try:
            lm.append((int(N), lambda_max(p, N)))
        except (EntryRangeError, FloatingPointError) as exc:
            # entries or products past double range: the norm is out of reach too
            lm.append((int(N), math.inf))
            note = str(exc)
            break
    tag = growth_tag([x for _, x in lm]) if len(lm) == len(sizes) or note else "inconclusive"
    return RegionVerdict(p.family, p.tau, p.rho, verdict, tag, lm,
                         in_band_flag(p, band), p.q, note)


def in_band_flag(p, band):
    return in_boundary_band(p.family, p.tau, p.rho, band)


def scan_threads():
    env = os.environ.get("SPECTRAL_CORNERS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def grid(lo, hi, steps):
    return [float(x) for x in np.linspace(lo, hi, steps)]


def empirical_scan(family, taus, rhos, sizes=None, q=0.5, band=BAND, threads=None):
    """Scan every ``(tau, rho)`` grid point; results ordered tau-major as the grid."""
    family = family.upper()
    sizes = SCAN_SIZES[family] if sizes is None else tuple(sizes)
    pts = [FamilyParams(family, t, r, q if family == "A" else None) for t in taus for r in rhos]
    threads = scan_threads() if threads is None else threads
    if threads <= 1:
        return [scan_point(p, sizes, band) for p in pts]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda p: scan_point(p, sizes, band), pts))


def agreement(verdicts):
    """Fraction of decided, out-of-band points whose empirical tag matches the analytic one."""
    decided = [v for v in verdicts if not v.in_band and v.agrees is not None]
    if not decided:
        return math.nan, 0
    return sum(v.agrees for v in decided) / len(decided), len(decided)


# --- witnesses ---------------------------------------------------------------

@dataclass
class WitnessReport:
    params: str
    kind: str
    sizes: list
    values: list
    growing: bool
    sigma: float | None = None
    detail: str = ""


def _witness_kind(p: FamilyParams):
    t, r = p.tau, p.rho
    fam = p.family
    if fam == "A":
        if t > 0 and r < 0:
            return "diagonal"
        return "column"
    if r < 0 and t >= 0:
        return "diagonal"
    if fam == "B":
        if t > 0 and 0 <= r < 1:
            return "rayleigh"
        return "column"
    if t > 0 and r == 0 and 1 < t <= 2:
        return "prime-product"
    return "column"


def _primorial_sets(limit):
    """Squarefree supports ``{n | prod_{p <= p_J} p}`` for growing J, with product <= limit."""
    primes, prod, out = [], 1, []
    p = 2
    while True:
        if all(p % d for d in primes):
            if prod * p > limit:
                break
            primes.append(p)
            prod *= p
            out.append((prod, list(primes)))
        p += 1
    return out


def unboundedness_witness(p: FamilyParams, N, steps=4, sigma=None) -> WitnessReport:
    """Lower bounds on ``||M||`` along a witness family at sizes ``N / 2**k``.

    * diagonal: the largest diagonal entry (``rho < 0``);
    * column: ``||M e_first||`` over the truncation, a column that is not square summable;
    * rayleigh: ``<Mx, x>/<x, x>`` with ``x_n = n**-sigma``, ``1/2 < sigma < 1 - rho/2`` (B, ``0 <= rho < 1``);
    * prime-product: C(tau, 0) with ``1 < tau <= 2`` on the squarefree support of the
      first J primes, where the quotient is ``prod (1 + p**(-tau/2))``.
    """
    verdict = analytic_classification(p)
    if verdict.bounded:
        raise ValueError(f"{p.label()} is bounded; there is no unboundedness witness")
    kind = _witness_kind(p)
    if kind == "rayleigh":
        hi = 1.0 - p.rho / 2.0
        sigma = 0.5 * (0.5 + hi) if sigma is None else float(sigma)
        if not 0.5 < sigma < hi:
            raise ValueError(f"sigma must lie in (1/2, {hi:g}), got {sigma}")
    else:
        sigma = None
    detail = ""
    if kind == "prime-product":
        sets = _primorial_sets(N)
        sizes, values = [], []
        for prod, primes in sets:
            x = np.zeros(prod)
            n = np.arange(1, prod + 1)
            x[(prod % n) == 0] = 1.0  # divisors of the primorial
            h = make_handle(p, prod)
            values.append(float(x @ matvec(h, x) / (x @ x)))
            sizes.append(prod)
        detail = "primes " + ",".join(map(str, sets[-1][1])) if sets else ""
        growing = len(values) >= 2 and all(b > a for a, b in zip(values, values[1:]))
        return WitnessReport(p.label(), kind, sizes, values, bool(growing), None, detail)
    sizes = sorted({max(2, N >> k) for k in range(steps)})
    values = []
    for i, n_size in enumerate(sizes):
        try:
            values.append(_witness_value(p, kind, n_size, sigma))
        except (EntryRangeError, FloatingPointError):
            detail = f"stopped before N={n_size}: entries leave double range"
            sizes = sizes[:i]
            break
    inc = np.diff(values)
    growing = bool(len(values) >= 2 and np.all(inc > 0)
                   and (len(inc) < 2 or inc[-1] > 0.5 * inc[-2]))
    return WitnessReport(p.label(), kind, sizes, values, growing, sigma, detail)


def _witness_value(p, kind, n_size, sigma):
    if kind == "diagonal":
        return float(np.max(diagonal(p, n_size)))
    if kind == "column":
        idx = np.arange(p.origin, p.origin + n_size)
        col = entries(p, idx, np.full_like(idx, p.origin))
        val = float(np.linalg.norm(col))
        if not math.isfinite(val):
            raise FloatingPointError("column norm overflowed")
        return val
    x = np.arange(1, n_size + 1, dtype=float) ** (-sigma)
    h = make_handle(p, n_size)
    return float(x @ matvec(h, x) / (x @ x))


def b_edge_exploration(taus, sizes=(2**10, 2**12, 2**14)):
    """``lambda_max`` of B(tau, 1) against the continuous-spectrum edge ``4/tau``.

    Exploratory output only: where eigenvalues detach above the edge is not
    pinned down, so nothing here is pass/fail.
    """
    rows = []
    for tau in taus:
        p = FamilyParams("B", float(tau), 1.0)
        for N in sizes:
            lm = lambda_max(p, N)
            rows.append({"tau": float(tau), "size": int(N), "lambda_max": lm,
                         "edge": 4.0 / tau, "ratio": lm * tau / 4.0})
    return rows


@dataclass
class Figure1:
    family: str
    rows: list
    svg: str
    verdicts: list
    agreement: float
    decided: int
    paths: tuple = ()


def figure1_dataset(family, resolution=15, out=None, lo=-2.5, hi=2.5, sizes=None, q=0.5,
                    threads=None) -> Figure1:
    """Scan a ``resolution x resolution`` grid and render the region diagram.

    With ``out`` (a directory) writes ``figure1_<family>.csv`` and ``.svg`` there.
    """
    from . import figure
    from .report import emit

    if resolution < 5:
        raise ValueError("resolution must be at least 5 per axis")
    family = family.upper()
    g = grid(lo, hi, resolution)
    verdicts = empirical_scan(family, g, g, sizes=sizes, q=q, threads=threads)
    pad = 0.05 * (hi - lo)
    svg = figure.render_svg(family, verdicts, (lo - pad, hi + pad, lo - pad, hi + pad))
    rows = [v.row() for v in verdicts]
    frac, decided = agreement(verdicts)
    paths = ()
    if out is not None:
        base = os.path.join(os.fspath(out), f"figure1_{family}")
        emit(rows, "csv", base + ".csv", columns=CSV_COLUMNS)
        emit(svg, "svg", base + ".svg")
        paths = (base + ".csv", base + ".svg")
    return Figure1(family, rows, svg, verdicts, frac, decided, paths)
