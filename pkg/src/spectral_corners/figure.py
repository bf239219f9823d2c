"""Standalone SVG region diagram: rho across, tau up.

The shaded polygon is the plotting box clipped by the analytic half-planes,
so its edges lie exactly on the threshold lines.  Scan points are dots
coloured by empirical tag; disagreements get a cross.
"""
from __future__ import annotations

from .classify import REGION_HALFPLANES

WIDTH = HEIGHT = 420
MARGIN = 50
COLOURS = {"bounded": "#2b6cb0", "unbounded": "#c53030", "inconclusive": "#a0aec0"}


def clip_halfplane(poly, a_tau, a_rho, c):
    """Sutherland-Hodgman clip of ``[(tau, rho), ...]`` to ``a_tau*tau + a_rho*rho >= c``."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = a_tau * p[0] + a_rho * p[1] - c
        fq = a_tau * q[0] + a_rho * q[1] - c
        if fp >= 0:
            out.append(p)
        if (fp >= 0) != (fq >= 0):
            s = fp / (fp - fq)
            out.append((p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])))
    return out


def region_polygon(family, box):
    """Vertices ``(tau, rho)`` of the bounded-compact region inside ``box = (tmin, tmax, rmin, rmax)``."""
    tmin, tmax, rmin, rmax = box
    poly = [(tmin, rmin), (tmin, rmax), (tmax, rmax), (tmax, rmin)]
    for a_t, a_r, c in REGION_HALFPLANES[family]:
        poly = clip_halfplane(poly, a_t, a_r, c)
        if not poly:
            break
    return poly


def _fmt(x):
    return format(float(x), ".17g")


def render_svg(family, verdicts, box):
    tmin, tmax, rmin, rmax = box
    span_r, span_t = rmax - rmin, tmax - tmin
    inner = WIDTH - 2 * MARGIN

    def px(tau, rho):
        return (MARGIN + (rho - rmin) / span_r * inner,
                HEIGHT - MARGIN - (tau - tmin) / span_t * inner)

    poly = region_polygon(family, box)
    pts = " ".join(f"{x:.3f},{y:.3f}" for x, y in (px(t, r) for t, r in poly))
    verts = " ".join(f"{_fmt(t)},{_fmt(r)}" for t, r in poly)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<title>Family {family}: bounded and compact region</title>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{inner}" height="{inner}" fill="white" stroke="black"/>',
        f'<polygon id="analytic-region" points="{pts}" data-tau-rho="{verts}" '
        'fill="#bee3f8" stroke="#2c5282" stroke-width="1.5"/>',
    ]
    x0, y0 = px(0.0, 0.0)
    if rmin <= 0 <= rmax:
        out.append(f'<line x1="{x0:.3f}" y1="{MARGIN}" x2="{x0:.3f}" y2="{HEIGHT - MARGIN}" '
                   'stroke="#718096" stroke-dasharray="3,3"/>')
    if tmin <= 0 <= tmax:
        out.append(f'<line x1="{MARGIN}" y1="{y0:.3f}" x2="{WIDTH - MARGIN}" y2="{y0:.3f}" '
                   'stroke="#718096" stroke-dasharray="3,3"/>')
    for v in verdicts:
        x, y = px(v.tau, v.rho)
        colour = COLOURS[v.empirical]
        out.append(f'<circle class="scan {v.empirical}" cx="{x:.3f}" cy="{y:.3f}" r="3" '
                   f'fill="{colour}" data-tau="{_fmt(v.tau)}" data-rho="{_fmt(v.rho)}"/>')
        if v.agrees is False:
            out.append(f'<path class="disagree" d="M{x - 5:.3f},{y - 5:.3f}L{x + 5:.3f},{y + 5:.3f}'
                       f'M{x - 5:.3f},{y + 5:.3f}L{x + 5:.3f},{y - 5:.3f}" stroke="black" '
                       f'stroke-width="1.5" data-tau="{_fmt(v.tau)}" data-rho="{_fmt(v.rho)}"/>')
    out += [
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" text-anchor="middle">rho</text>',
        f'<text x="15" y="{HEIGHT / 2}" text-anchor="middle" '
        f'transform="rotate(-90 15 {HEIGHT / 2})">tau</text>',
        f'<text x="{MARGIN}" y="{MARGIN - 8}">{rmin:g}..{rmax:g} x {tmin:g}..{tmax:g}</text>',
        "</svg>",
    ]
    return "\n".join(out) + "\n"
