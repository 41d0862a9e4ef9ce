"""Exact t-SNE embedding of case feature vectors and projection glyphs.

The embedding is the exact O(n^2) variant: conditional Gaussian affinities
with a per-row bandwidth found by binary search against a perplexity
target, Student-t (1 dof) low-dimensional kernel, momentum gradient
descent with early exaggeration. Everything is deterministic for a given
seed, which the service relies on for byte-identical responses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .config import GeometryConfig, TsneConfig
from .features import CaseFeatures

P_FLOOR = 1e-12
PERPLEXITY_TOL = 1e-4
MAX_SEARCH_STEPS = 64


class EmbeddingError(RuntimeError):
    pass


@dataclass
class Embedding:
    coords: np.ndarray            # (n, 2), min-max normalized to [0, 1]^2
    kl_trace: list[float]         # KL sampled every 50 iterations


@dataclass(frozen=True)
class GlyphArc:
    metric: str      # fans | followees | tweets | integrity
    fraction: float  # in [0, 1]


@dataclass(frozen=True)
class GlyphSpec:
    case_id: str
    center: tuple[float, float]
    inner_radius: float
    topic_color_index: int
    arcs: tuple[GlyphArc, ...]  # fixed order: fans, followees, tweets, integrity


ARC_METRICS = ("fans", "followees", "tweets", "integrity")
# Quadrant start angles, clockwise from 12 o'clock: NE, SE, SW, NW.
ARC_QUADRANTS = (0.0, np.pi / 2, np.pi, 3 * np.pi / 2)


def _sq_distances(X: np.ndarray) -> np.ndarray:
    sq = np.sum(X * X, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def conditional_affinities(
    X: np.ndarray,
    perplexity: float,
) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Row-conditional Gaussian affinities at the requested perplexity.

    For each row the precision beta is bisected until the conditional
    distribution's effective neighbor count 2^H matches `perplexity`
    within 1e-4, with at most 64 search steps. Returns (P_cond, betas,
    unconverged_rows); rows that cannot realize the target (duplicates,
    tiny n) keep their best beta and are reported, not fatal.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise EmbeddingError("affinities need at least 2 points")
    if not np.isfinite(X).all():
        raise EmbeddingError("input matrix contains non-finite values")

    d2 = _sq_distances(X)
    mask = ~np.eye(n, dtype=bool)
    P = np.zeros((n, n))
    betas = np.ones(n)
    unconverged: list[int] = []

    for i in range(n):
        d_i = d2[i][mask[i]]
        d_i = d_i - d_i.min()  # shift for numerical stability
        beta, lo, hi = 1.0, 0.0, np.inf
        row = None
        converged = False
        for _ in range(MAX_SEARCH_STEPS):
            w = np.exp(-beta * d_i)
            total = w.sum()
            row = w / total
            # Shannon entropy in bits; realized perplexity is 2^H.
            nz = row > 0
            h_bits = -np.sum(row[nz] * np.log2(row[nz]))
            realized = 2.0 ** h_bits
            if abs(realized - perplexity) <= PERPLEXITY_TOL:
                converged = True
                break
            if realized > perplexity:
                lo = beta
                beta = beta * 2.0 if hi == np.inf else (beta + hi) / 2.0
            else:
                hi = beta
                beta = (lo + beta) / 2.0
        if not converged:
            unconverged.append(i)
        P[i][mask[i]] = row
        betas[i] = beta
    return P, betas, unconverged


def pairwise_affinities(X: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized joint affinities P = (P_cond + P_cond^T) / (2n).

    Zero diagonal, entries floored at 1e-12, total within 1e-9 of 1.
    """
    P_cond, _, _ = conditional_affinities(X, perplexity)
    n = X.shape[0]
    P = (P_cond + P_cond.T) / (2.0 * n)
    np.maximum(P, P_FLOOR, out=P)
    np.fill_diagonal(P, 0.0)
    P /= P.sum()
    np.maximum(P, P_FLOOR, out=P)
    np.fill_diagonal(P, 0.0)
    return P


def kl_divergence_and_grad(Y: np.ndarray, P: np.ndarray) -> tuple[float, np.ndarray]:
    """KL(P || Q) and its exact gradient for the Student-t (1 dof) kernel."""
    n = Y.shape[0]
    d2 = _sq_distances(Y)
    W = 1.0 / (1.0 + d2)
    np.fill_diagonal(W, 0.0)
    Q = W / W.sum()
    np.maximum(Q, P_FLOOR, out=Q)
    np.fill_diagonal(Q, 0.0)

    off = ~np.eye(n, dtype=bool)
    kl = float(np.sum(P[off] * np.log(np.maximum(P[off], P_FLOOR) / Q[off])))

    M = (P - Q) * W
    grad = 4.0 * (M.sum(axis=1)[:, None] * Y - M @ Y)
    return kl, grad


def clamp_perplexity(perplexity: float, n: int) -> float:
    """Auto-clamp to (n - 1) / 3, never below 1 + eps."""
    return max(min(perplexity, (n - 1) / 3.0), 1.0 + 1e-9)


def normalize_unit_square(Y: np.ndarray) -> np.ndarray:
    """Min-max normalize each axis to [0, 1]; a zero-range axis maps to 0."""
    out = np.zeros_like(Y, dtype=float)
    lo = Y.min(axis=0)
    span = Y.max(axis=0) - lo
    for axis in range(Y.shape[1]):
        if span[axis] > 0:
            out[:, axis] = (Y[:, axis] - lo[axis]) / span[axis]
    return out


def tsne_embed(X: np.ndarray, cfg: TsneConfig = TsneConfig()) -> Embedding:
    """Embed rows of X onto the unit square.

    Deterministic for a given seed: initial coordinates are drawn from a
    seeded Gaussian (sigma 1e-4). The KL trace is computed against the
    un-exaggerated P, sampled at iteration 0, every 50 iterations, and at
    the final iteration.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n == 0:
        raise EmbeddingError("cannot embed an empty matrix")
    if n == 1:
        return Embedding(coords=np.array([[0.5, 0.5]]), kl_trace=[])

    perplexity = clamp_perplexity(cfg.perplexity, n)
    P = pairwise_affinities(X, perplexity)

    rng = np.random.default_rng(cfg.seed)
    Y = rng.normal(0.0, 1e-4, size=(n, 2))
    update = np.zeros_like(Y)
    # Per-parameter adaptive gains (Jacobs scheme), as in the original
    # optimizer; learning rate 200 oscillates without them.
    gains = np.ones_like(Y)
    kl_trace: list[float] = []

    kl0, _ = kl_divergence_and_grad(Y, P)
    kl_trace.append(kl0)

    for it in range(1, cfg.iterations + 1):
        exaggerate = it <= cfg.exaggeration_iters
        P_eff = P * cfg.early_exaggeration if exaggerate else P
        _, grad = kl_divergence_and_grad(Y, P_eff)
        momentum = cfg.momentum_start if it <= cfg.momentum_switch_iter else cfg.momentum_final
        same_sign = (grad > 0) == (update > 0)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.clip(gains, 0.01, None, out=gains)
        update = momentum * update - cfg.learning_rate * gains * grad
        Y = Y + update
        if not np.isfinite(Y).all():
            raise EmbeddingError(f"non-finite coordinates at iteration {it}")
        if it % 50 == 0 or it == cfg.iterations:
            kl, _ = kl_divergence_and_grad(Y, P)
            kl_trace.append(kl)

    return Embedding(coords=normalize_unit_square(Y), kl_trace=kl_trace)


def _min_max_fraction(values: np.ndarray) -> np.ndarray:
    lo = values.min()
    span = values.max() - lo
    if span <= 0:
        return np.zeros_like(values, dtype=float)
    return (values - lo) / span


def build_glyphs(
    embedding: Embedding,
    features: Sequence[CaseFeatures],
    geom: GeometryConfig = GeometryConfig(),
    topic_labels: Optional[Sequence[str]] = None,
) -> list[GlyphSpec]:
    """Resolve one glyph per embedded case.

    Inner radius scales with the square root of min-max-normalized
    influence (dataset-wide, computed once), clamped to the configured
    radius range. Arc fractions are min-max normalized log-scaled user
    counts; integrity is used raw.
    """
    if embedding.coords.shape[0] != len(features):
        raise ValueError("one feature record per embedded case required")
    if topic_labels is None:
        topic_labels = sorted({cf.topic for cf in features})
    topic_index = {label: i for i, label in enumerate(topic_labels)}

    influence = np.array([cf.influence for cf in features], dtype=float)
    inf_norm = _min_max_fraction(influence)
    log_cols = {
        "fans": _min_max_fraction(np.array([cf.log_fans for cf in features])),
        "followees": _min_max_fraction(np.array([cf.log_followees for cf in features])),
        "tweets": _min_max_fraction(np.array([cf.log_tweets for cf in features])),
    }

    glyphs = []
    for i, cf in enumerate(features):
        radius = geom.glyph_r_scale * float(np.sqrt(inf_norm[i]))
        radius = min(max(radius, geom.glyph_r_min), geom.glyph_r_max)
        fractions = (
            float(log_cols["fans"][i]),
            float(log_cols["followees"][i]),
            float(log_cols["tweets"][i]),
            min(max(cf.integrity, 0.0), 1.0),
        )
        glyphs.append(GlyphSpec(
            case_id=cf.case_id,
            center=(float(embedding.coords[i, 0]), float(embedding.coords[i, 1])),
            inner_radius=radius,
            topic_color_index=topic_index[cf.topic],
            arcs=tuple(GlyphArc(m, f) for m, f in zip(ARC_METRICS, fractions)),
        ))
    return glyphs


def arc_geometry(arc_index: int, fraction: float, geom: GeometryConfig) -> tuple[float, float]:
    """(start_angle, extent) of one glyph arc, clockwise from 12 o'clock."""
    start = ARC_QUADRANTS[arc_index] + geom.glyph_arc_gap / 2.0
    extent = fraction * (np.pi / 2.0 - geom.glyph_arc_gap)
    return start, extent
