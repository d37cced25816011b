"""Self-organizing map engine: grid, BMU search, updates, trainers.

Three trainers share the competitive-learning loop (draw a sample, find the
best matching unit, pull neighbouring neurons toward it under a Gaussian
neighbourhood with exponentially decaying learning rate and width):

- ``classical``: Euclidean BMU, additive weight update.
- ``kernelized``: BMU and update in a classical kernel's feature space via
  the kernel trick; gradient-descent update in the general two-term form,
  which collapses to the classical quantum-style update when K(w, w) is
  constant.
- ``quantum``: BMU by maximum state fidelity (for pure states the
  Hilbert-Schmidt distance satisfies d^2 = 2 - 2K, so argmax K is argmin
  distance) and gradient-ascent update on the fidelity via parameter-shift
  gradients.

Iterations are strictly sequential; within one iteration the per-neuron
kernel evaluations are read-only on the weights and may run concurrently.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .featuremap import FeatureMapConfig
from .kernel import KernelEstimator
from .statevector import Statevector

TRAINER_KINDS = ("classical", "kernelized", "quantum")


@dataclass
class SomGrid:
    """Rectangular neuron grid with per-neuron weight vectors.

    Neuron ``i`` sits at integer coordinates ``(i // cols, i % cols)``;
    ``weights`` has one row per neuron.
    """

    rows: int
    cols: int
    weights: np.ndarray

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid dims must be positive, got {self.rows}x{self.cols}")
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 2 or self.weights.shape[0] != self.rows * self.cols:
            raise ValueError(
                f"weights must be ({self.rows * self.cols}, N), got {self.weights.shape}"
            )
        k = self.rows * self.cols
        self.coords = np.stack(
            [np.arange(k) // self.cols, np.arange(k) % self.cols], axis=1
        ).astype(np.float64)

    @classmethod
    def create(cls, rows: int, cols: int, n_features: int) -> "SomGrid":
        return cls(rows, cols, np.zeros((rows * cols, n_features)))

    @property
    def n_neurons(self) -> int:
        return self.rows * self.cols

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]

    def coord_of(self, index: int) -> tuple[int, int]:
        return index // self.cols, index % self.cols


@dataclass(frozen=True)
class Schedule:
    """Exponential decay of learning rate and neighbourhood width.

    ``alpha(t) = alpha0 * exp(-alpha_decay * t / total_iters)`` and likewise
    for sigma, floored at ``sigma_floor`` so the neighbourhood never fully
    collapses. The default decay constants (1.0) leave alpha at
    ``alpha0 / e`` after the full run; the quantum trainer benefits from
    faster decay (e.g. ``alpha_decay = ln(1000)`` anneals alpha to 1e-3 of
    its start) because fidelity-gradient steps must shrink well below the
    feature map's angle scale before neurons settle.
    """

    alpha0: float
    sigma0: float
    total_iters: int
    sigma_floor: float = 0.1
    alpha_decay: float = 1.0
    sigma_decay: float = 1.0

    def __post_init__(self):
        if self.alpha0 <= 0 or self.sigma0 <= 0:
            raise ValueError("alpha0 and sigma0 must be positive")
        if self.total_iters < 0:
            raise ValueError("total_iters must be >= 0")
        if self.sigma_floor <= 0:
            raise ValueError("sigma_floor must be positive")
        if self.alpha_decay <= 0 or self.sigma_decay <= 0:
            raise ValueError("decay constants must be positive")

    def alpha(self, t: int) -> float:
        return self.alpha0 * math.exp(-self.alpha_decay * t / self.total_iters)

    def sigma(self, t: int) -> float:
        return max(
            self.sigma0 * math.exp(-self.sigma_decay * t / self.total_iters),
            self.sigma_floor,
        )


@dataclass
class TrainingRecord:
    """Per-iteration trace of a training run plus the final weights.

    ``quantization_errors[t]`` is the distance between iteration ``t``'s
    sample and its BMU at selection time (Euclidean, or sqrt(2 - 2K) for the
    quantum trainer); full-dataset quantization error is a metrics-module
    computation. ``bmu_evals``/``gradient_evals`` are kernel-evaluation
    counts for the quantum trainer (zero otherwise).
    """

    trainer: str
    seed: int
    sample_indices: np.ndarray
    bmu_indices: np.ndarray
    alphas: np.ndarray
    sigmas: np.ndarray
    quantization_errors: np.ndarray
    final_weights: np.ndarray
    bmu_evals: int = 0
    gradient_evals: int = 0

    def __len__(self):
        return len(self.sample_indices)


@dataclass(frozen=True)
class RbfKernel:
    """Gaussian RBF reference kernel K(a, b) = exp(-||a - b||^2 / (2 bw^2))."""

    bandwidth: float = 1.0

    def value(self, a, b) -> float:
        diff = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
        return float(np.exp(-float(diff @ diff) / (2.0 * self.bandwidth**2)))

    def grad_second(self, a, b) -> np.ndarray:
        """Gradient of K(a, b) in its second argument."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return self.value(a, b) * (a - b) / self.bandwidth**2


# -- grid geometry ---------------------------------------------------------


def grid_distance(grid: SomGrid, i: int, j: int) -> float:
    """Euclidean distance between two neurons' lattice coordinates."""
    k = grid.n_neurons
    if not (0 <= i < k and 0 <= j < k):
        raise IndexError(f"neuron index out of range for {k} neurons: {i}, {j}")
    d = grid.coords[i] - grid.coords[j]
    return float(np.sqrt(d @ d))


def neighborhood(d: float, sigma: float) -> float:
    """Gaussian neighbourhood weight exp(-d^2 / (2 sigma^2))."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return math.exp(-(d * d) / (2.0 * sigma * sigma))


def _neighborhood_row(grid: SomGrid, bmu: int, sigma: float) -> np.ndarray:
    """h(d(i, bmu), sigma) for every neuron i, vectorized."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    diff = grid.coords - grid.coords[bmu]
    d2 = np.einsum("ij,ij->i", diff, diff)
    return np.exp(-d2 / (2.0 * sigma * sigma))


# -- BMU search --------------------------------------------------------------


def find_bmu_euclidean(grid: SomGrid, x) -> int:
    """Index of the neuron with minimum Euclidean distance (ties: lowest index)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (grid.n_features,):
        raise ValueError(f"sample shape {x.shape} != ({grid.n_features},)")
    diff = grid.weights - x
    return int(np.argmin(np.einsum("ij,ij->i", diff, diff)))


def find_bmu_quantum(grid: SomGrid, est: KernelEstimator, x, return_values: bool = False):
    """Index of the neuron with maximum fidelity K(x, theta_i).

    Exactly one kernel evaluation per neuron; ties break to the lowest
    index. With ``return_values`` the full fidelity row is returned too.
    """
    values = est.kernel_values(x, grid.weights)
    bmu = int(np.argmax(values))
    return (bmu, values) if return_values else bmu


def _find_bmu_kernelized(grid: SomGrid, kernel_spec, x):
    """Feature-space BMU: argmin of K(x,x) + K(w,w) - 2 K(x,w)."""
    x = np.asarray(x, dtype=np.float64)
    kxx = kernel_spec.value(x, x)
    d2 = np.array(
        [
            kxx + kernel_spec.value(w, w) - 2.0 * kernel_spec.value(x, w)
            for w in grid.weights
        ]
    )
    bmu = int(np.argmin(d2))
    return bmu, float(d2[bmu])


# -- weight updates -----------------------------------------------------------


def update_classical(grid: SomGrid, x, bmu: int, alpha: float, sigma: float) -> None:
    """Pull every neuron toward the sample, damped by the neighbourhood."""
    x = np.asarray(x, dtype=np.float64)
    h = _neighborhood_row(grid, bmu, sigma)
    grid.weights += alpha * h[:, None] * (x - grid.weights)


def update_kernelized(grid: SomGrid, x, bmu: int, alpha: float, sigma: float, kernel_spec) -> None:
    """Gradient-descent step on the feature-space distance, per neuron.

    Implements the general two-term update
    ``w <- w - alpha h (dK(w,w)/dw - 2 dK(x,w)/dw)``; for kernels with
    constant self-similarity the first term vanishes and the step reduces to
    ``w <- w + 2 alpha h dK(x,w)/dw``.
    """
    x = np.asarray(x, dtype=np.float64)
    h = _neighborhood_row(grid, bmu, sigma)
    for i in range(grid.n_neurons):
        w = grid.weights[i]
        # total derivative of K(w, w); equals 0 for unit-diagonal kernels
        self_term = 2.0 * kernel_spec.grad_second(w, w)
        cross_term = kernel_spec.grad_second(x, w)
        grid.weights[i] = w - alpha * h[i] * (self_term - 2.0 * cross_term)


def update_quantum(
    grid: SomGrid,
    x,
    bmu: int,
    alpha: float,
    sigma: float,
    est: KernelEstimator,
    h_cutoff: float = 1e-3,
) -> None:
    """Fidelity-ascent step ``theta <- theta + 2 alpha h dK(x, theta)/dtheta``.

    Neurons with neighbourhood weight below ``h_cutoff`` skip the gradient
    (each one costs two evaluations per parameter occurrence); ``h_cutoff=0``
    recovers the literal all-neuron update.
    """
    h = _neighborhood_row(grid, bmu, sigma)
    for i in range(grid.n_neurons):
        if h[i] >= h_cutoff and h[i] > 0.0:
            grad = est.kernel_gradient(x, grid.weights[i])
            grid.weights[i] = grid.weights[i] + 2.0 * alpha * h[i] * grad


def init_weights(grid: SomGrid, low: float, high: float, seed) -> None:
    """I.i.d. uniform weight components in [low, high); deterministic per seed."""
    if not low < high:
        raise ValueError(f"need low < high, got [{low}, {high})")
    rng = np.random.default_rng(seed)
    grid.weights[:] = rng.uniform(low, high, size=grid.weights.shape)


# -- training and inference ---------------------------------------------------


def _as_samples(data):
    """Normalize a dataset to an indexable sequence of samples."""
    if isinstance(data, np.ndarray):
        if data.ndim != 2:
            raise ValueError(f"expected 2-D sample array, got shape {data.shape}")
        return data
    return list(data)


def train(
    grid: SomGrid,
    data,
    schedule: Schedule,
    trainer_kind: str,
    seed,
    *,
    est: KernelEstimator | None = None,
    kernel_spec=None,
    h_cutoff: float = 1e-3,
) -> TrainingRecord:
    """Run the competitive-learning loop, mutating ``grid.weights``.

    Samples are drawn uniformly with replacement from ``data`` using the
    given seed (draws beyond the dataset size repeat samples). Labels never
    enter: ``data`` holds feature vectors (rows) or raw statevectors only.
    Deterministic for a fixed seed with an exact-mode estimator.
    """
    samples = _as_samples(data)
    n_samples = len(samples)
    if n_samples == 0:
        raise ValueError("dataset is empty")
    if trainer_kind not in TRAINER_KINDS:
        raise ValueError(f"trainer_kind must be one of {TRAINER_KINDS}, got {trainer_kind!r}")
    if trainer_kind == "quantum" and est is None:
        raise ValueError("quantum trainer requires a KernelEstimator")
    if trainer_kind == "kernelized" and kernel_spec is None:
        raise ValueError("kernelized trainer requires a kernel_spec")

    total = schedule.total_iters
    rng = np.random.default_rng(seed)
    sample_indices = np.empty(total, dtype=np.int64)
    bmu_indices = np.empty(total, dtype=np.int64)
    alphas = np.empty(total)
    sigmas = np.empty(total)
    qerrors = np.empty(total)
    bmu_evals = 0
    gradient_evals = 0

    for t in range(total):
        alpha = schedule.alpha(t)
        sigma = schedule.sigma(t)
        idx = int(rng.integers(0, n_samples))
        x = samples[idx]

        if trainer_kind == "classical":
            bmu = find_bmu_euclidean(grid, x)
            qe = float(np.linalg.norm(np.asarray(x, dtype=float) - grid.weights[bmu]))
            update_classical(grid, x, bmu, alpha, sigma)
        elif trainer_kind == "kernelized":
            bmu, d2 = _find_bmu_kernelized(grid, kernel_spec, x)
            qe = math.sqrt(max(d2, 0.0))
            update_kernelized(grid, x, bmu, alpha, sigma, kernel_spec)
        else:
            before = est.eval_counter
            bmu, values = find_bmu_quantum(grid, est, x, return_values=True)
            bmu_evals += est.eval_counter - before
            qe = math.sqrt(max(2.0 - 2.0 * float(values[bmu]), 0.0))
            before = est.eval_counter
            update_quantum(grid, x, bmu, alpha, sigma, est, h_cutoff)
            gradient_evals += est.eval_counter - before

        sample_indices[t] = idx
        bmu_indices[t] = bmu
        alphas[t] = alpha
        sigmas[t] = sigma
        qerrors[t] = qe

    return TrainingRecord(
        trainer=trainer_kind,
        seed=int(seed) if np.isscalar(seed) else seed,
        sample_indices=sample_indices,
        bmu_indices=bmu_indices,
        alphas=alphas,
        sigmas=sigmas,
        quantization_errors=qerrors,
        final_weights=grid.weights.copy(),
        bmu_evals=bmu_evals,
        gradient_evals=gradient_evals,
    )


def infer(grid: SomGrid, data, trainer_kind: str, *, est=None, kernel_spec=None):
    """BMU lookup without weight updates.

    A single sample (1-D array or Statevector) returns one index; a dataset
    returns an index array.
    """
    if trainer_kind not in TRAINER_KINDS:
        raise ValueError(f"trainer_kind must be one of {TRAINER_KINDS}, got {trainer_kind!r}")

    def one(x):
        if trainer_kind == "classical":
            return find_bmu_euclidean(grid, x)
        if trainer_kind == "kernelized":
            return _find_bmu_kernelized(grid, kernel_spec, x)[0]
        return find_bmu_quantum(grid, est, x)

    if isinstance(data, Statevector) or (
        isinstance(data, np.ndarray) and data.ndim == 1
    ):
        return one(data)
    return np.array([one(x) for x in _as_samples(data)], dtype=np.int64)


# -- serialization ------------------------------------------------------------

MAP_FORMAT = "qsom-map-v1"


def map_to_dict(
    grid: SomGrid,
    *,
    trainer: str = "quantum",
    feature_config: FeatureMapConfig | None = None,
    schedule: Schedule | None = None,
    seed=None,
    estimator: KernelEstimator | None = None,
) -> dict:
    """JSON-ready description of a trained map; floats round-trip exactly."""
    if feature_config is not None and not feature_config.is_default_map:
        raise ValueError("cannot serialize a feature map with custom angle functions")
    doc = {
        "format": MAP_FORMAT,
        "trainer": trainer,
        "rows": grid.rows,
        "cols": grid.cols,
        "n_features": grid.n_features,
        "seed": seed,
        "feature_map": None
        if feature_config is None
        else {"n_features": feature_config.n_features, "reps": feature_config.reps},
        "schedule": None
        if schedule is None
        else {
            "alpha0": schedule.alpha0,
            "sigma0": schedule.sigma0,
            "total_iters": schedule.total_iters,
            "sigma_floor": schedule.sigma_floor,
            "alpha_decay": schedule.alpha_decay,
            "sigma_decay": schedule.sigma_decay,
        },
        "estimator": None
        if estimator is None
        else {"mode": estimator.mode, "shots": estimator.shots, "seed": estimator.seed},
        "weights": [[float(v) for v in row] for row in grid.weights],
    }
    return doc


def map_from_dict(doc: dict) -> tuple[SomGrid, dict]:
    """Rebuild the grid from a map document; returns (grid, metadata)."""
    if doc.get("format") != MAP_FORMAT:
        raise ValueError(f"not a {MAP_FORMAT} document")
    grid = SomGrid(doc["rows"], doc["cols"], np.array(doc["weights"], dtype=np.float64))
    meta = {k: doc[k] for k in doc if k != "weights"}
    return grid, meta


def save_map(path, grid: SomGrid, **meta) -> None:
    with open(path, "w") as fh:
        json.dump(map_to_dict(grid, **meta), fh, indent=1)
        fh.write("\n")


def load_map(path) -> tuple[SomGrid, dict]:
    with open(path) as fh:
        return map_from_dict(json.load(fh))
