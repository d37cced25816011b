"""Clustering-quality and map-quality metrics.

Pair-counting (Fowlkes-Mallows), spatial cluster scores (silhouette,
Davies-Bouldin, Calinski-Harabasz) over Euclidean point space, and the
SOM diagnostics: quantization error, topographic error, and map purity.
All functions are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .som import SomGrid, find_bmu_euclidean, find_bmu_quantum


@dataclass(frozen=True)
class LabeledAssignment:
    """Per-sample truth and map placement: true label, BMU index, grid coords."""

    labels: np.ndarray
    bmu_indices: np.ndarray
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=np.int64))
        object.__setattr__(self, "bmu_indices", np.asarray(self.bmu_indices, dtype=np.int64))
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=np.float64))
        n = len(self.labels)
        if len(self.bmu_indices) != n or len(self.coords) != n:
            raise ValueError("labels, bmu_indices and coords must have equal length")
        if n == 0:
            raise ValueError("empty assignment")

    @classmethod
    def from_grid(cls, grid: SomGrid, labels, bmu_indices) -> "LabeledAssignment":
        bmu_indices = np.asarray(bmu_indices, dtype=np.int64)
        if bmu_indices.min(initial=0) < 0 or bmu_indices.max(initial=0) >= grid.n_neurons:
            raise ValueError("BMU index out of range for grid")
        return cls(labels, bmu_indices, grid.coords[bmu_indices])


def _as_labels(labels) -> np.ndarray:
    arr = np.asarray(labels)
    _, inv = np.unique(arr, return_inverse=True)
    return inv


def fowlkes_mallows(labels_a, labels_b) -> float:
    """Pair-counting agreement TP / sqrt((TP+FP)(TP+FN)) between two labelings.

    Invariant under relabeling on either side; 0 when either side has no
    within-cluster pairs (degenerate case).
    """
    a = _as_labels(labels_a)
    b = _as_labels(labels_b)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise ValueError("need at least 2 samples")
    contingency = np.zeros((a.max() + 1, b.max() + 1), dtype=np.int64)
    np.add.at(contingency, (a, b), 1)

    def pairs(counts):
        return float(np.sum(counts * (counts - 1) / 2.0))

    same_both = pairs(contingency)
    same_a = pairs(contingency.sum(axis=1))
    same_b = pairs(contingency.sum(axis=0))
    if same_a == 0 or same_b == 0:
        return 0.0
    return same_both / math.sqrt(same_a * same_b)


def _check_clustered(points, labels):
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    lab = _as_labels(labels)
    if len(pts) != len(lab):
        raise ValueError("points and labels must have equal length")
    k = lab.max() + 1
    if k < 2:
        raise ValueError("need at least 2 clusters")
    return pts, lab, int(k)


def silhouette(points, labels) -> float:
    """Mean silhouette coefficient (b - a) / max(a, b) over samples.

    Samples in singleton clusters score 0 by convention.
    """
    pts, lab, k = _check_clustered(points, labels)
    n = len(pts)
    dists = np.sqrt(np.maximum(
        np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=2), 0.0))
    sizes = np.bincount(lab, minlength=k)
    scores = np.zeros(n)
    for i in range(n):
        own = lab[i]
        if sizes[own] == 1:
            continue
        mean_to = np.array([dists[i, lab == c].sum() / max(sizes[c], 1) for c in range(k)])
        a = dists[i, lab == own].sum() / (sizes[own] - 1)
        b = np.min([mean_to[c] for c in range(k) if c != own])
        denom = max(a, b)
        scores[i] = 0.0 if denom == 0 else (b - a) / denom
    return float(scores.mean())


def davies_bouldin(points, labels) -> float:
    """Mean over clusters of the worst scatter-to-separation ratio."""
    pts, lab, k = _check_clustered(points, labels)
    centroids = np.array([pts[lab == c].mean(axis=0) for c in range(k)])
    scatter = np.array(
        [np.mean(np.linalg.norm(pts[lab == c] - centroids[c], axis=1)) for c in range(k)]
    )
    worst = np.zeros(k)
    for i in range(k):
        ratios = []
        for j in range(k):
            if j == i:
                continue
            sep = float(np.linalg.norm(centroids[i] - centroids[j]))
            both = scatter[i] + scatter[j]
            if both == 0:
                ratios.append(0.0)
            elif sep == 0:
                ratios.append(np.inf)
            else:
                ratios.append(both / sep)
        worst[i] = max(ratios)
    return float(worst.mean())


def calinski_harabasz(points, labels) -> float:
    """Between-cluster over within-cluster dispersion ratio.

    Returns 1.0 when the within-cluster dispersion is zero (the degenerate
    all-points-on-centroids case).
    """
    pts, lab, k = _check_clustered(points, labels)
    n = len(pts)
    if n <= k:
        raise ValueError("need more samples than clusters")
    overall = pts.mean(axis=0)
    between = 0.0
    within = 0.0
    for c in range(k):
        members = pts[lab == c]
        centroid = members.mean(axis=0)
        between += len(members) * float(np.sum((centroid - overall) ** 2))
        within += float(np.sum((members - centroid) ** 2))
    if within == 0:
        return 1.0
    return (between / (k - 1)) / (within / (n - k))


# -- SOM diagnostics ----------------------------------------------------------


def _bmu_distance(grid: SomGrid, x, kind: str, est) -> tuple[int, float]:
    if kind == "euclidean":
        bmu = find_bmu_euclidean(grid, x)
        return bmu, float(np.linalg.norm(np.asarray(x, dtype=float) - grid.weights[bmu]))
    bmu, values = find_bmu_quantum(grid, est, x, return_values=True)
    return bmu, math.sqrt(max(2.0 - 2.0 * float(values[bmu]), 0.0))


def quantization_error(grid: SomGrid, data, kind: str = "euclidean", est=None) -> float:
    """Mean sample-to-BMU distance (Euclidean, or sqrt(2 - 2K) for quantum)."""
    if kind not in ("euclidean", "quantum"):
        raise ValueError(f"kind must be 'euclidean' or 'quantum', got {kind!r}")
    if kind == "quantum" and est is None:
        raise ValueError("quantum distance requires a KernelEstimator")
    samples = data if not isinstance(data, np.ndarray) else list(data)
    if len(samples) == 0:
        raise ValueError("dataset is empty")
    return float(np.mean([_bmu_distance(grid, x, kind, est)[1] for x in samples]))


def topographic_error(
    grid: SomGrid, data, kind: str = "euclidean", est=None, adjacency: int = 8
) -> float:
    """Fraction of samples whose two best units are not grid-adjacent.

    Adjacency defaults to the 8-neighbourhood (Chebyshev distance 1);
    ``adjacency=4`` restricts to the von Neumann neighbourhood.
    """
    if grid.n_neurons < 2:
        raise ValueError("topographic error needs at least 2 neurons")
    if adjacency not in (4, 8):
        raise ValueError(f"adjacency must be 4 or 8, got {adjacency}")
    if kind == "quantum" and est is None:
        raise ValueError("quantum distance requires a KernelEstimator")
    samples = data if not isinstance(data, np.ndarray) else list(data)
    if len(samples) == 0:
        raise ValueError("dataset is empty")

    def two_best(x):
        if kind == "euclidean":
            diff = grid.weights - np.asarray(x, dtype=float)
            order = np.einsum("ij,ij->i", diff, diff)
            first = int(np.argmin(order))
            # mask the winner, keep lowest-index tie-breaking for the runner-up
            masked = order.copy()
            masked[first] = np.inf
            return first, int(np.argmin(masked))
        values = est.kernel_values(x, grid.weights)
        first = int(np.argmax(values))
        masked = values.copy()
        masked[first] = -np.inf
        return first, int(np.argmax(masked))

    errors = 0
    for x in samples:
        b1, b2 = two_best(x)
        dr = abs(grid.coords[b1][0] - grid.coords[b2][0])
        dc = abs(grid.coords[b1][1] - grid.coords[b2][1])
        if adjacency == 8:
            adjacent = max(dr, dc) <= 1.0
        else:
            adjacent = (dr + dc) <= 1.0
        if not adjacent:
            errors += 1
    return errors / len(samples)


def majority_labels(assignment: LabeledAssignment) -> np.ndarray:
    """Per-sample predicted label: the majority true label of the sample's neuron.

    Ties break to the smallest label id, deterministically.
    """
    predicted = np.empty(len(assignment.labels), dtype=np.int64)
    for neuron in np.unique(assignment.bmu_indices):
        mask = assignment.bmu_indices == neuron
        values, counts = np.unique(assignment.labels[mask], return_counts=True)
        predicted[mask] = values[np.argmax(counts)]
    return predicted


def map_purity(assignment: LabeledAssignment) -> float:
    """Fraction of samples whose label matches their neuron's majority label."""
    return float(np.mean(majority_labels(assignment) == assignment.labels))
