"""Headless SVG rendering of the propagation and projection geometry.

Angles are radians clockwise from 12 o'clock; the screen mapping is
x = cx + r sin(theta), y = cy - r cos(theta). Element contract: the
propagation view renders one path per cell, one circle per ring boundary
and one circle for the center; the projection view renders one group per
case, each with an inner circle and exactly four arc paths.
"""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

from .config import ColorsConfig, GeometryConfig
from .layout import PropagationLayout
from .projection import ARC_QUADRANTS, GlyphSpec


def _pt(cx: float, cy: float, theta: float, r: float) -> tuple[float, float]:
    return cx + r * math.sin(theta), cy - r * math.cos(theta)


def annular_wedge_path(cx: float, cy: float, theta0: float, theta1: float,
                       r0: float, r1: float) -> str:
    """SVG path for the polar rectangle [theta0, theta1] x [r0, r1]."""
    large = 1 if (theta1 - theta0) > math.pi else 0
    ox0, oy0 = _pt(cx, cy, theta0, r1)
    ox1, oy1 = _pt(cx, cy, theta1, r1)
    ix1, iy1 = _pt(cx, cy, theta1, r0)
    ix0, iy0 = _pt(cx, cy, theta0, r0)
    return (f"M {ox0:.4f} {oy0:.4f} "
            f"A {r1:.4f} {r1:.4f} 0 {large} 1 {ox1:.4f} {oy1:.4f} "
            f"L {ix1:.4f} {iy1:.4f} "
            f"A {r0:.4f} {r0:.4f} 0 {large} 0 {ix0:.4f} {iy0:.4f} Z")


def propagation_svg(layout: PropagationLayout, colors: ColorsConfig,
                    canvas: float = 900.0) -> str:
    cx = cy = canvas / 2.0
    scale = (canvas / 2.0 - 10.0) / layout.total_radius
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{canvas:g}" '
        f'height="{canvas:g}" viewBox="0 0 {canvas:g} {canvas:g}">',
        f'<g class="propagation" data-case="{escape(layout.case_id)}">',
    ]
    labels = []
    for ring in layout.rings:
        for sector in ring.sectors:
            for cell in sector.cells:
                d = annular_wedge_path(cx, cy, cell.theta0, cell.theta1,
                                       cell.r0 * scale, cell.r1 * scale)
                parts.append(
                    f'<path class="cell" data-post="{escape(cell.post_id)}" '
                    f'd="{d}" fill="{colors.for_sentiment(cell.sentiment)}" '
                    f'stroke="#ffffff" stroke-width="0.6"/>')
                if cell.keyword:
                    mid_t = (cell.theta0 + cell.theta1) / 2.0
                    mid_r = (cell.r0 + cell.r1) / 2.0 * scale
                    x, y = _pt(cx, cy, mid_t, mid_r)
                    labels.append(
                        f'<text class="cell-label" x="{x:.2f}" y="{y:.2f}" '
                        f'font-size="10" text-anchor="middle">'
                        f"{escape(cell.keyword)}</text>")
    # Ring boundaries above cells, one circle per ring.
    for ring in layout.rings:
        parts.append(
            f'<circle class="ring" cx="{cx:g}" cy="{cy:g}" '
            f'r="{ring.r_outer * scale:.4f}" fill="none" '
            f'stroke="#ffffff" stroke-width="2"/>')
    parts.append(
        f'<circle class="center" cx="{cx:g}" cy="{cy:g}" '
        f'r="{layout.center_radius * scale:.4f}" fill="#4C78A8"/>')
    parts.extend(labels)
    parts.append("</g></svg>")
    return "\n".join(parts)


def glyph_svg_fragment(glyph: GlyphSpec, colors: ColorsConfig,
                       geom: GeometryConfig, canvas: float) -> str:
    x = glyph.center[0] * canvas
    y = (1.0 - glyph.center[1]) * canvas  # y up in data, down on screen
    palette = colors.topic_palette
    fill = palette[glyph.topic_color_index % len(palette)]
    parts = [f'<g class="glyph" data-case="{escape(glyph.case_id)}" '
             f'transform="translate({x:.4f} {y:.4f})">',
             f'<circle class="inner" r="{glyph.inner_radius:.4f}" fill="{fill}"/>']
    r0 = glyph.inner_radius + 1.5
    r1 = r0 + geom.glyph_arc_width
    for idx, arc in enumerate(glyph.arcs):
        start = ARC_QUADRANTS[idx] + geom.glyph_arc_gap / 2.0
        extent = arc.fraction * (math.pi / 2.0 - geom.glyph_arc_gap)
        d = annular_wedge_path(0.0, 0.0, start, start + extent, r0, r1)
        parts.append(f'<path class="arc" data-metric="{arc.metric}" d="{d}" '
                     f'fill="#6b6b6b"/>')
    parts.append("</g>")
    return "\n".join(parts)


def projection_svg(glyphs: Sequence[GlyphSpec], colors: ColorsConfig,
                   geom: GeometryConfig, canvas: float = 1000.0) -> str:
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{canvas:g}" '
        f'height="{canvas:g}" viewBox="0 0 {canvas:g} {canvas:g}">',
        '<g class="projection">',
    ]
    parts.extend(glyph_svg_fragment(g, colors, geom, canvas) for g in glyphs)
    parts.append("</g></svg>")
    return "\n".join(parts)
