"""Deterministic clustering backends for the transductive sweep.

Determinism is load-bearing here: the prior over cluster labelings is only
well defined if the same point set always yields the same partitions, so
k-means uses farthest-first seeding (no randomness) with fixed tie-breaking
and empty-cluster repair, and the agglomerative variants cut a single
dendrogram at every level.  All distances are Euclidean.
"""

import numpy as np
from scipy.cluster.hierarchy import linkage
from scipy.spatial.distance import pdist

KMEANS_MAX_ITER = 100
KMEANS_TOL = 1e-9


def canonical_labels(labels: np.ndarray) -> np.ndarray:
    """Relabel clusters by order of first appearance so output ids are stable."""
    mapping: dict[int, int] = {}
    out = np.empty(len(labels), dtype=np.int64)
    for i, lab in enumerate(labels):
        lab = int(lab)
        if lab not in mapping:
            mapping[lab] = len(mapping)
        out[i] = mapping[lab]
    return out


def kmeans_labels(points: np.ndarray, tau: int) -> np.ndarray:
    """Lloyd's algorithm with farthest-first seeding, fully deterministic.

    The first center is the point nearest the grand centroid; each further
    center is the point farthest from its nearest chosen center (ties resolve
    to the lowest index).  Assignment ties resolve to the lowest cluster
    index; a cluster that empties is repaired by handing it the farthest
    member of the currently largest cluster.
    """
    n = len(points)
    if tau == 1:
        return np.zeros(n, dtype=np.int64)

    centroid = points.mean(axis=0)
    first = int(np.argmin(((points - centroid) ** 2).sum(axis=1)))
    seeds = [first]
    nearest = ((points - points[first]) ** 2).sum(axis=1)
    while len(seeds) < tau:
        nxt = int(np.argmax(nearest))
        seeds.append(nxt)
        nearest = np.minimum(nearest, ((points - points[nxt]) ** 2).sum(axis=1))
    centers = points[seeds].astype(float).copy()

    labels = np.zeros(n, dtype=np.int64)
    for _ in range(KMEANS_MAX_ITER):
        dists = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        labels = np.argmin(dists, axis=1).astype(np.int64)
        for j in range(tau):
            if not (labels == j).any():
                sizes = np.bincount(labels, minlength=tau)
                big = int(np.argmax(sizes))
                members = np.flatnonzero(labels == big)
                far = members[int(np.argmax(dists[members, big]))]
                labels[far] = j
        new_centers = np.stack([points[labels == j].mean(axis=0) for j in range(tau)])
        moved = np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max()
        centers = new_centers
        if moved <= KMEANS_TOL:
            break
    return canonical_labels(labels)


def agglomerative_sweep(points: np.ndarray, c: int, method: str) -> dict[int, np.ndarray]:
    """Cut one single- or complete-linkage dendrogram at every level 1..c.

    Returns {tau: labels}; the merges are replayed bottom-up and a snapshot
    is taken whenever the live cluster count drops to <= c.
    """
    if method not in ("single", "complete"):
        raise ValueError(f"unknown linkage {method!r}")
    n = len(points)
    merges = linkage(pdist(points), method=method)
    labels = np.arange(n, dtype=np.int64)
    out: dict[int, np.ndarray] = {}
    if n <= c:
        out[n] = canonical_labels(labels)
    for i in range(n - 1):
        a, b = int(merges[i, 0]), int(merges[i, 1])
        labels[(labels == a) | (labels == b)] = n + i
        live = n - 1 - i
        if live <= c:
            out[live] = canonical_labels(labels)
    return out
