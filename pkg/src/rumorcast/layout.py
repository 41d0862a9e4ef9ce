"""Circular propagation geometry for one cascade.

The root sits at the center; each retweet depth maps to one concentric
ring; within a ring, sectors hold one calendar day each, clockwise from
12 o'clock; each sector is strip-packed with one polar cell per retweet,
cell area proportional to 1 + word count. Angles are radians measured
clockwise from 12 o'clock. All geometry is deterministic: identical
inputs give byte-identical layouts.

Comments count toward cascade size and influence but never appear as
cells; they surface in the details view instead.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Optional, Sequence

from .config import GeometryConfig
from .features import PostVisual
from .ingest import Cascade, Post

TWO_PI = 2.0 * math.pi


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    post_id: str
    theta0: float
    theta1: float
    r0: float
    r1: float
    word_count: int
    sentiment: str
    keyword: Optional[str]

    @property
    def area(self) -> float:
        return 0.5 * (self.theta1 - self.theta0) * (self.r1 * self.r1 - self.r0 * self.r0)


@dataclass(frozen=True)
class Sector:
    day: date
    theta_start: float
    theta_extent: float
    cells: tuple[Cell, ...]


@dataclass(frozen=True)
class Ring:
    depth: int
    r_inner: float
    r_outer: float
    sectors: tuple[Sector, ...]


@dataclass(frozen=True)
class PropagationLayout:
    case_id: str
    center_radius: float
    total_radius: float
    rings: tuple[Ring, ...]
    histogram: tuple[tuple[date, int], ...]


def proportional_with_floor(
    weights: Sequence[float],
    total: float,
    floor: float,
    what: str,
) -> list[float]:
    """Split `total` proportionally to `weights` with a per-part floor.

    Parts that would fall below the floor are pinned to it and the rest is
    re-scaled proportionally; repeats until stable. Raises LayoutError
    when even all-floor parts cannot fit.
    """
    n = len(weights)
    if n == 0:
        return []
    if n * floor > total * (1 + 1e-12):
        raise LayoutError(
            f"infeasible {what}: {n} parts x floor {floor:g} exceeds available {total:g}")
    pinned: set[int] = set()
    while True:
        free_total = total - floor * len(pinned)
        free_weight = sum(w for i, w in enumerate(weights) if i not in pinned)
        parts = []
        for i, w in enumerate(weights):
            if i in pinned:
                parts.append(floor)
            elif free_weight > 0:
                parts.append(free_total * w / free_weight)
            else:
                parts.append(free_total / (n - len(pinned)))
        newly = [i for i, p in enumerate(parts)
                 if i not in pinned and p < floor * (1 - 1e-12)]
        if not newly:
            return parts
        pinned.update(newly)


def _retweets_by_depth(cascade: Cascade) -> dict[int, list[Post]]:
    grouped: dict[int, list[Post]] = {}
    for pid, post in cascade.nodes.items():
        if post.kind != "retweet":
            continue
        grouped.setdefault(cascade.depth[pid], []).append(post)
    return grouped


def pack_cells(
    theta_start: float,
    theta_extent: float,
    r_inner: float,
    r_outer: float,
    nodes: Sequence[Post],
    visuals: dict[str, PostVisual],
    geom: GeometryConfig,
) -> list[Cell]:
    """Strip-pack one sector wedge with one cell per node.

    Nodes must already be ordered by timestamp (ties by id). Rows fill
    inner-first; cells run clockwise within a row. Row radii come from
    cumulative cell areas, so every cell's area is exactly proportional
    to 1 + word_count and containment is exact.
    """
    n = len(nodes)
    if n == 0:
        raise LayoutError("pack_cells needs at least one node")
    wedge_area = 0.5 * theta_extent * (r_outer * r_outer - r_inner * r_inner)
    word_counts = [visuals[p.id].word_count for p in nodes]
    total_weight = float(sum(1 + wc for wc in word_counts))
    areas = [wedge_area * (1 + wc) / total_weight for wc in word_counts]

    # Aim for roughly square cells at the wedge's mid radius.
    r_mid = 0.5 * (r_inner + r_outer)
    m = round(math.sqrt(n * (r_outer - r_inner) / max(theta_extent * r_mid, 1e-12)))
    m = max(1, min(int(m), n))

    rows: list[list[int]] = [[] for _ in range(m)]
    row_target = wedge_area / m
    k = 0
    acc = 0.0
    for idx, a in enumerate(areas):
        nodes_left = n - idx
        rows_left = m - k
        if rows[k] and k < m - 1 and (acc + a / 2.0 > row_target or nodes_left == rows_left):
            k += 1
            acc = 0.0
        rows[k].append(idx)
        acc += a

    scale = geom.total_radius / 400.0
    min_arc = geom.label_min_arc * scale
    min_radial = geom.label_min_radial * scale

    cells: list[Cell] = []
    r_lo = r_inner
    for row_idx, row in enumerate(rows):
        row_area = sum(areas[i] for i in row)
        if row_idx == m - 1:
            r_hi = r_outer
        else:
            r_hi = math.sqrt(r_lo * r_lo + 2.0 * row_area / theta_extent)
        ring_sq = r_hi * r_hi - r_lo * r_lo
        theta = theta_start
        for pos, i in enumerate(row):
            if pos == len(row) - 1:
                theta_next = theta_start + theta_extent
            else:
                theta_next = theta + 2.0 * areas[i] / ring_sq
            visual = visuals[nodes[i].id]
            arc_len = (theta_next - theta) * 0.5 * (r_lo + r_hi)
            keyword = visual.keyword
            if arc_len < min_arc or (r_hi - r_lo) < min_radial:
                keyword = None
            cells.append(Cell(
                post_id=nodes[i].id,
                theta0=theta, theta1=theta_next, r0=r_lo, r1=r_hi,
                word_count=visual.word_count,
                sentiment=visual.sentiment.label,
                keyword=keyword,
            ))
            theta = theta_next
        r_lo = r_hi
    return cells


def compute_layout(
    cascade: Cascade,
    visuals: dict[str, PostVisual],
    geom: GeometryConfig = GeometryConfig(),
    influence_norm: float = 0.0,
) -> PropagationLayout:
    """Resolve the full polar geometry for one cascade.

    influence_norm is the dataset-wide min-max normalized influence of
    this case, driving the center radius. Ring widths split the annulus
    proportionally to log2(2 + retweets-at-depth) with a width floor;
    sector angles split each ring by per-day retweet counts with an angle
    floor. A singleton cascade yields zero rings.
    """
    center = geom.center_r_scale * math.sqrt(max(0.0, min(1.0, influence_norm)))
    center = min(max(center, geom.center_r_min), geom.center_r_max)

    depth_count = cascade.max_depth
    rings: list[Ring] = []
    if depth_count > 0:
        available = geom.total_radius - center - geom.ring_pad
        by_depth = _retweets_by_depth(cascade)
        weights = [math.log2(2 + len(by_depth.get(d, []))) for d in range(1, depth_count + 1)]
        widths = proportional_with_floor(
            weights, available, geom.min_ring_width, "ring widths (min_ring_width)")

        r = center + geom.ring_pad
        for depth in range(1, depth_count + 1):
            r_in, r_out = r, r + widths[depth - 1]
            if depth == depth_count:
                r_out = geom.total_radius
            nodes = sorted(by_depth.get(depth, []), key=lambda p: (p.created_at, p.id))
            sectors: list[Sector] = []
            if nodes:
                per_day: dict[date, list[Post]] = {}
                for post in nodes:
                    per_day.setdefault(post.created_at.date(), []).append(post)
                days = sorted(per_day)
                open_angle = TWO_PI - len(days) * geom.gap_angle
                if open_angle <= 0:
                    raise LayoutError(
                        f"infeasible sector gaps: {len(days)} sectors x gap_angle "
                        f"{geom.gap_angle:g} fills the circle")
                extents = proportional_with_floor(
                    [len(per_day[d]) for d in days], open_angle,
                    geom.min_sector_angle, "sector angles (min_sector_angle)")
                theta = 0.0
                for day, extent in zip(days, extents):
                    cells = pack_cells(theta, extent, r_in, r_out,
                                       per_day[day], visuals, geom)
                    sectors.append(Sector(
                        day=day, theta_start=theta, theta_extent=extent,
                        cells=tuple(cells)))
                    theta += extent + geom.gap_angle
            rings.append(Ring(depth=depth, r_inner=r_in, r_outer=r_out,
                              sectors=tuple(sectors)))
            r = r_out

    return PropagationLayout(
        case_id=cascade.root_id,
        center_radius=center,
        total_radius=geom.total_radius,
        rings=tuple(rings),
        histogram=tuple(retweet_histogram(cascade)),
    )


def retweet_histogram(cascade: Cascade) -> list[tuple[date, int]]:
    """Per-day retweet counts across all depths, zero-filled over the
    contiguous day range. Empty when the cascade has no retweets."""
    days = Counter(
        post.created_at.date()
        for pid, post in cascade.nodes.items()
        if post.kind == "retweet" and pid != cascade.root_id
    )
    if not days:
        return []
    first, last = min(days), max(days)
    out = []
    day = first
    while day <= last:
        out.append((day, days.get(day, 0)))
        day += timedelta(days=1)
    return out


def cells_for_day(layout: PropagationLayout, day: date) -> list[str]:
    """Ids of all cells in sectors of the given day, across rings."""
    ids = []
    for ring in layout.rings:
        for sector in ring.sectors:
            if sector.day == day:
                ids.extend(cell.post_id for cell in sector.cells)
    return ids


def layout_to_json(layout: PropagationLayout, influence: int) -> dict:
    """Serialize to the wire schema: {case_id, center, rings, histogram}."""
    return {
        "case_id": layout.case_id,
        "center": {"r": layout.center_radius, "influence": influence},
        "rings": [
            {
                "depth": ring.depth,
                "r0": ring.r_inner,
                "r1": ring.r_outer,
                "sectors": [
                    {
                        "day": sector.day.isoformat(),
                        "t0": sector.theta_start,
                        "dt": sector.theta_extent,
                        "cells": [
                            {
                                "post_id": cell.post_id,
                                "t0": cell.theta0,
                                "t1": cell.theta1,
                                "r0": cell.r0,
                                "r1": cell.r1,
                                "words": cell.word_count,
                                "sentiment": cell.sentiment,
                                **({"keyword": cell.keyword} if cell.keyword else {}),
                            }
                            for cell in sector.cells
                        ],
                    }
                    for sector in ring.sectors
                ],
            }
            for ring in layout.rings
        ],
        "histogram": [{"day": d.isoformat(), "count": c} for d, c in layout.histogram],
    }
