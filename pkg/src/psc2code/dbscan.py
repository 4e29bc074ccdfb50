"""Minimal DBSCAN over a caller-supplied distance function.

Implemented directly (no learned-library dependency) because every use in
this package runs with min_pts=1 over small point sets and non-metric
distances (gated by overlap checks or set dissimilarities), where the
algorithm degenerates to connected components of the eps-neighborhood
graph. Cluster ids are assigned deterministically in first-seen input
order, so output is reproducible for a fixed input order.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Sequence

NOISE = -1


def dbscan(points: Sequence, distance: Callable, eps: float, min_pts: int = 1) -> list[int]:
    """Label each point with a cluster id (NOISE = -1 for unclustered points).

    A point's eps-neighborhood includes itself and every point at
    distance <= eps. Core points have at least ``min_pts`` neighbors.
    """
    n = len(points)
    neighborhoods = []
    for i in range(n):
        neigh = [j for j in range(n)
                 if i == j or distance(points[i], points[j]) <= eps]
        neighborhoods.append(neigh)
    is_core = [len(neighborhoods[i]) >= min_pts for i in range(n)]

    labels = [NOISE] * n
    cluster = 0
    for i in range(n):
        if labels[i] != NOISE or not is_core[i]:
            continue
        labels[i] = cluster
        queue = deque(neighborhoods[i])
        while queue:
            j = queue.popleft()
            if labels[j] == NOISE:
                labels[j] = cluster
                if is_core[j]:
                    queue.extend(neighborhoods[j])
        cluster += 1
    return labels


def groups(labels: list[int]) -> list[list[int]]:
    """Indices grouped by cluster id, noise omitted, clusters in id order."""
    out: dict[int, list[int]] = {}
    for idx, label in enumerate(labels):
        if label == NOISE:
            continue
        out.setdefault(label, []).append(idx)
    return [out[k] for k in sorted(out)]
