"""Independent reference implementations used to pin expected values.

Everything here is written with plain loops and dicts, deliberately not
sharing any code path with the package, so each check compares two
independently written routes.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict


def tfidf_brute(corpus):
    """Per-document {token: weight} via direct evaluation of
    (count/len) * (ln((1+N)/(1+df)) + 1)."""
    n = len(corpus)
    df = Counter()
    for doc in corpus:
        for tok in set(doc):
            df[tok] += 1
    out = []
    for doc in corpus:
        weights = {}
        for tok in set(doc):
            tf = doc.count(tok) / len(doc)
            idf = math.log((1 + n) / (1 + df[tok])) + 1.0
            weights[tok] = tf * idf
        out.append(weights)
    return out


def bfs_depths(root_id, parent_of):
    """{node: depth} for nodes reachable from root via child links.

    parent_of: {child_id: parent_id} over candidate nodes.
    """
    children = defaultdict(list)
    for child, parent in parent_of.items():
        children[parent].append(child)
    depths = {root_id: 0}
    frontier = [root_id]
    while frontier:
        nxt = []
        for node in frontier:
            for ch in children[node]:
                if ch not in depths:
                    depths[ch] = depths[node] + 1
                    nxt.append(ch)
        frontier = nxt
    return depths


def descendant_count(root_id, parent_of):
    return len(bfs_depths(root_id, parent_of)) - 1


def row_perplexities(p_cond):
    """Realized 2^H per row of a conditional affinity matrix."""
    out = []
    n = len(p_cond)
    for i in range(n):
        h = 0.0
        for j in range(n):
            p = p_cond[i][j]
            if j != i and p > 0:
                h -= p * math.log2(p)
        out.append(2.0 ** h)
    return out


def kl_plain(Y, P, floor=1e-12):
    """KL(P||Q) with the Student-t (1 dof) kernel, plain loops."""
    n = len(Y)
    W = [[0.0] * n for _ in range(n)]
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            dx = Y[i][0] - Y[j][0]
            dy = Y[i][1] - Y[j][1]
            w = 1.0 / (1.0 + dx * dx + dy * dy)
            W[i][j] = w
            total += w
    kl = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            q = max(W[i][j] / total, floor)
            p = P[i][j]
            if p > 0:
                kl += p * math.log(max(p, floor) / q)
    return kl


def fd_gradient(Y, P, h=1e-5):
    """Central-difference gradient of kl_plain, one coordinate at a time."""
    n = len(Y)
    grad = [[0.0, 0.0] for _ in range(n)]
    for i in range(n):
        for axis in (0, 1):
            plus = [list(row) for row in Y]
            minus = [list(row) for row in Y]
            plus[i][axis] += h
            minus[i][axis] -= h
            grad[i][axis] = (kl_plain(plus, P) - kl_plain(minus, P)) / (2.0 * h)
    return grad


def overlapping_cell_pairs(bounds, eps=1e-9):
    """Pairs of polar rectangles (t0, t1, r0, r1) with positive
    intersection area. Sweep over theta so strip layouts stay cheap."""
    order = sorted(range(len(bounds)), key=lambda i: bounds[i][0])
    bad = []
    active = []
    for i in order:
        t0 = bounds[i][0]
        active = [j for j in active if bounds[j][1] > t0 + eps]
        for j in active:
            if min(bounds[i][3], bounds[j][3]) > max(bounds[i][2], bounds[j][2]) + eps:
                bad.append((j, i))
        active.append(i)
    return bad


def daily_counts(dates):
    """Zero-filled contiguous {date: count}; empty input gives {}."""
    if not dates:
        return {}
    from datetime import timedelta
    counts = Counter(dates)
    day, last = min(counts), max(counts)
    out = {}
    while day <= last:
        out[day] = counts.get(day, 0)
        day += timedelta(days=1)
    return out
