import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectral_corners.classify import BAND, CSV_COLUMNS, ClassVerdict, agreement, \
    analytic_classification, b_edge_exploration, boundary_distance, empirical_scan, \
    figure1_dataset, growth_tag, in_boundary_band, in_region, scan_point, unboundedness_witness
from spectral_corners.families import FamilyParams, dense_truncation, diagonal
from spectral_corners.figure import region_polygon
from spectral_corners.spectra import eig_dense, inertia

from oracles import region_oracle, svg_region_vertices


def P(f, t, r):
    return FamilyParams(f, t, r, 0.5 if f == "A" else None)


# --- analytic ----------------------------------------------------------------------

def test_examples():
    assert analytic_classification(P("A", 1, 1)) == ClassVerdict(True, True, True, "yes")
    v = analytic_classification(P("C", 1, 0.5))
    assert v.bounded and v.compact and v.trace_class == "no"
    assert not analytic_classification(P("B", -0.5, 1.2)).bounded


@pytest.mark.parametrize("f,t,r,bounded,compact,trace", [
    ("A", 1, 0, True, False, "no"),      # Toeplitz with nonconstant symbol
    ("A", 0, 0.5, True, True, "yes"),     # rank one, geometric vector
    ("A", 0, 0, False, False, "no"),
    ("A", -1, 1.5, True, True, "yes"),
    ("A", 1, -0.5, False, False, "no"),
    ("B", 1, 1, True, False, "no"),
    ("B", 0.5, 2, True, True, "yes"),
    ("B", 0, 1, False, False, "no"),
    ("B", -1, 2.5, True, True, "yes"),
    ("C", 3, 0, True, False, "no"),       # zeta multiplier
    ("C", 2, 0, False, False, "no"),
    ("C", 1, 1.5, True, True, "yes"),
    ("C", 0, 1.5, True, True, "yes"),     # rank one
    ("C", -0.5, 2, True, True, "yes"),
    ("C", 0.4, 0.3, False, False, "no"),
])
def test_table(f, t, r, bounded, compact, trace):
    v = analytic_classification(P(f, t, r))
    assert (v.bounded, v.compact, v.trace_class) == (bounded, compact, trace)
    assert v.psd == (t >= 0)


# draws mix continuous values with the exact thresholds so the edge cases get hit
coord = st.one_of(st.floats(-3, 3), st.sampled_from([-1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0]))


@settings(max_examples=10_000)
@given(st.sampled_from("ABC"), coord, coord)
def test_implication_chain(f, t, r):
    v = analytic_classification(P(f, t, r))
    assert v.trace_class != "yes" or v.compact
    assert not v.compact or v.bounded


def test_verdict_validation():
    with pytest.raises(ValueError):
        ClassVerdict(True, True, False, "yes")
    with pytest.raises(ValueError):
        ClassVerdict(True, False, True, "no")
    with pytest.raises(ValueError):
        ClassVerdict(True, True, True, "maybe")


PSD_POINTS = [P("A", 1, 1), P("A", 0.5, -0.2), P("A", 2, 0), P("A", 0, 1),
              P("B", 1, 1), P("B", 2, 0.5), P("B", 0.5, 3), P("B", 0, 1.5),
              P("C", 1, 0.5), P("C", 3, 2), P("C", 2, 0), P("C", 0.4, 0.3)]


@pytest.mark.parametrize("p", PSD_POINTS, ids=lambda p: p.label())
def test_psd_verdict_matches_inertia(p):
    assert analytic_classification(p).psd
    s = eig_dense(dense_truncation(p, 128))
    assert inertia(s, 1e-10)[1] == 0


@pytest.mark.parametrize("p", [P("A", 1, 1), P("A", 2, 0.3), P("B", 1, 2), P("B", 0.5, 1.5),
                               P("C", 1, 2), P("C", 2, 1.5)], ids=lambda p: p.label())
def test_trace_class_diagonal_converges(p):
    assert analytic_classification(p).trace_class == "yes"
    d = diagonal(p, 2**12)
    s11, s12 = d[: 2**11].sum(), d.sum()
    assert (s12 - s11) / s12 < 0.01


@pytest.mark.parametrize("p", [P("A", 1, 0), P("B", 1, 1), P("B", 2, 0.5), P("C", 1, 0.5),
                               P("C", 3, 0), P("C", 0.5, 0.9)], ids=lambda p: p.label())
def test_not_trace_class_diagonal_grows(p):
    v = analytic_classification(p)
    assert v.psd and v.trace_class == "no"
    d = diagonal(p, 2**12)
    s11, s12 = d[: 2**11].sum(), d.sum()
    assert (s12 - s11) / s12 >= 0.01


# --- region geometry -------------------------------------------------------------------

def test_region_membership():
    assert in_region("A", 1, 0.1) and in_region("A", -1, 1.1) and not in_region("A", -1, 0.9)
    assert in_region("B", 0.5, 1.1) and not in_region("B", 0.5, 0.9)
    assert in_region("C", 1, 0.1) and not in_region("C", 2, -0.1) and not in_region("C", 0.5, 0.4)


def test_boundary_distance():
    assert boundary_distance("A", 0, 0) == 0
    assert boundary_distance("A", 2, 0.05) == pytest.approx(0.05)
    assert boundary_distance("B", -1, 2) == pytest.approx(0.0, abs=1e-15)
    assert boundary_distance("C", 1, -1) == pytest.approx(1.0)
    # behind the apex the nearest boundary point is the apex itself
    assert boundary_distance("B", -0.3, 0.6) == pytest.approx(0.5)
    assert in_boundary_band("C", 0.95, 0.0) and not in_boundary_band("C", 0.5, 0.0)
    assert in_boundary_band("A", 1.0, 0.05, band=BAND)


@given(st.sampled_from("ABC"), st.floats(-3, 3), st.floats(-3, 3))
def test_band_points_are_near_a_sign_change(f, t, r):
    # outside the band, a disc of radius BAND stays on one side of the region boundary
    if in_boundary_band(f, t, r):
        return
    inside = in_region(f, t, r)
    for ang in np.linspace(0, 2 * np.pi, 16, endpoint=False):
        assert in_region(f, t + 0.99 * BAND * np.cos(ang), r + 0.99 * BAND * np.sin(ang)) == inside


# --- empirical ------------------------------------------------------------------------

def test_growth_tag():
    assert growth_tag([1.0, 1.001, 1.002]) == "bounded"
    assert growth_tag([1.0, 2.0, 4.0]) == "unbounded"
    assert growth_tag([1.0, 1.5, 1.6]) == "inconclusive"
    assert growth_tag([1.0, 2.0]) == "inconclusive"
    assert growth_tag([1.0, 2.0, math.inf]) == "unbounded"


def test_scan_examples():
    v = scan_point(P("A", 1, -0.5), (8, 16, 32, 64, 128, 256))
    assert v.empirical == "unbounded" and v.agrees
    v = scan_point(P("C", 3, 2), (64, 128, 256, 512, 1024))
    assert v.empirical == "bounded" and v.agrees


def test_scan_monotone_and_ordered():
    taus, rhos = [-1.0, 0.5, 2.0], [-0.5, 0.7, 1.8]
    vs = empirical_scan("C", taus, rhos, sizes=(64, 128, 256, 512), threads=2)
    assert [(v.tau, v.rho) for v in vs] == [(t, r) for t in taus for r in rhos]
    for v in vs:
        lm = [x for _, x in v.lambda_max_by_size]
        assert all(b >= a - 1e-9 * abs(a) for a, b in zip(lm, lm[1:])), (v.tau, v.rho, lm)
    serial = empirical_scan("C", taus, rhos, sizes=(64, 128, 256, 512), threads=1)
    assert [v.row() for v in serial] == [v.row() for v in vs]


def test_overflow_counts_as_unbounded():
    v = scan_point(P("A", 1, -2.5), (8, 16, 32, 64, 128, 256, 512, 1024))
    assert v.empirical == "unbounded" and math.isinf(v.lmax_last) and v.note


def test_agreement_excludes_band_and_inconclusive():
    vs = empirical_scan("B", [-1.0, 1.0], [0.0, 1.0, 2.0], sizes=(64, 128, 256, 512, 1024))
    frac, decided = agreement(vs)
    assert decided == sum(1 for v in vs if not v.in_band and v.empirical != "inconclusive")
    assert frac == 1.0


# --- witnesses --------------------------------------------------------------------------

@pytest.mark.parametrize("p,kind,kw", [
    (P("B", 1, 0.5), "rayleigh", {"sigma": 0.7}),
    (P("A", 1, -0.5), "diagonal", {}),
    (P("C", 0.4, 0.3), "column", {}),
    (P("B", 0, 0.5), "column", {}),
    (P("C", 1, -0.5), "diagonal", {}),
], ids=lambda x: x.label() if hasattr(x, "label") else str(x))
def test_witness_grows(p, kind, kw):
    rep = unboundedness_witness(p, 4096, **kw)
    assert rep.kind == kind and rep.growing, rep
    assert rep.sizes == sorted(rep.sizes)


def test_witness_column_rate():
    # C(0.4, 0.3): column n^{-0.35}, squared partial sums grow like N^{0.3}
    rep = unboundedness_witness(P("C", 0.4, 0.3), 2**16, steps=5)
    n = np.array(rep.sizes, dtype=float)
    exact = [math.sqrt(math.fsum(k**-0.7 for k in range(1, int(N) + 1))) for N in n]
    np.testing.assert_allclose(rep.values, exact, rtol=1e-10)


def test_witness_A_column_stops_at_overflow():
    rep = unboundedness_witness(P("A", -1, 0.5), 4096)
    assert rep.kind == "column" and rep.growing and "double range" in rep.detail


@pytest.mark.parametrize("tau", [1.5, 2.0])
def test_prime_product_witness(tau):
    rep = unboundedness_witness(P("C", tau, 0), 510510)
    assert rep.kind == "prime-product" and rep.growing
    primes = [2, 3, 5, 7, 11, 13, 17]
    expect = np.cumprod([1 + p ** (-tau / 2) for p in primes])
    np.testing.assert_allclose(rep.values, expect, rtol=1e-12)


def test_witness_refusal_and_sigma_guard():
    with pytest.raises(ValueError):
        unboundedness_witness(P("C", 3, 2), 1024)
    with pytest.raises(ValueError):
        unboundedness_witness(P("B", 1, 0.5), 1024, sigma=0.8)


def test_b_edge_exploration_rows():
    rows = b_edge_exploration([1.0, 4.0], sizes=(256, 1024))
    assert [(r["tau"], r["size"]) for r in rows] == [(1.0, 256), (1.0, 1024), (4.0, 256), (4.0, 1024)]
    for r in rows:
        assert r["ratio"] == pytest.approx(r["lambda_max"] * r["tau"] / 4)


# --- figure ---------------------------------------------------------------------------

@pytest.mark.parametrize("family", "ABC")
def test_region_polygon_matches_oracle(family):
    from shapely.geometry import Polygon
    box = (-2.75, 2.75, -2.75, 2.75)
    poly = Polygon(region_polygon(family, box))
    ref = region_oracle(family, box)
    assert poly.is_valid
    assert poly.symmetric_difference(ref).area < 1e-12
    assert poly.area == pytest.approx(ref.area, rel=1e-14)


@pytest.mark.parametrize("family", "ABC")
def test_figure1_files(tmp_path, family):
    from shapely.geometry import Polygon
    fig = figure1_dataset(family, resolution=5, out=tmp_path, sizes=(16, 32, 64, 128))
    assert len(fig.rows) == 25
    with open(tmp_path / f"figure1_{family}.csv") as fh:
        reader = csv.reader(fh)
        assert next(reader) == CSV_COLUMNS
        assert len(list(reader)) == 25
    svg = (tmp_path / f"figure1_{family}.svg").read_text()
    assert svg.startswith("<?xml") and svg.rstrip().endswith("</svg>")
    assert svg.count('class="scan ') == 25
    verts = svg_region_vertices(svg)
    ref = region_oracle(family, (-2.75, 2.75, -2.75, 2.75))
    assert Polygon(verts).symmetric_difference(ref).area < 1e-12
    assert svg.count('class="disagree"') == sum(v.agrees is False for v in fig.verdicts)


def test_figure1_errors(tmp_path):
    with pytest.raises(ValueError):
        figure1_dataset("A", resolution=4)
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(OSError):
        figure1_dataset("A", resolution=5, out=blocker / "sub", sizes=(8, 16, 32))
