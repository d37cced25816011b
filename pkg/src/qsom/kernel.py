"""Fidelity-kernel evaluation and parameter-shift gradients.

``K(x, theta) = |<0| U^dag(x) U(theta) |0>|^2`` is the squared overlap of
two feature-mapped states, estimated either exactly from the statevectors
or by sampling all-zeros outcomes of the compute-uncompute circuit.

The gradient with respect to ``theta`` uses the two-term shift rule per
gate occurrence: every rotation generated by ``Z/2`` or ``ZZ/2`` satisfies
``dK/da = [K(a + pi/2) - K(a - pi/2)] / 2`` in its gate angle ``a``, and a
parameter component's derivative is the chain-factor-weighted sum over its
occurrences (a component feeds one single-Z gate and up to two ZZ gates per
repetition).

The estimator counts every kernel evaluation; the counter substantiates the
linear-in-samples training cost and is updated under a lock so best-matching-
unit searches may evaluate neurons concurrently.
"""

from __future__ import annotations

import math
import threading

import numpy as np

from . import _backend
from .featuremap import FeatureMapConfig, embed, feature_arrays
from .statevector import Statevector

SHIFT = math.pi / 2  # exact two-term rule for half-angle Pauli rotations
_SHIFT_DENOM = 2.0 * math.sin(SHIFT)  # = 2: eigenvalue gap 1 of Z/2, ZZ/2


class KernelEstimator:
    """Evaluates K(x, theta) and its theta-gradient, counting evaluations.

    ``mode`` is ``"exact"`` (deterministic statevector overlap) or
    ``"shots"`` (finite sampling of the all-zeros outcome; ``shots`` and
    ``seed`` apply). The data side ``x`` may be a feature vector, embedded
    through ``x_config`` (defaults to ``feature_config``, the identical-map
    case), or a pre-built ``Statevector`` for quantum data.

    Shot noise is reproducible: each evaluation draws from a generator
    seeded by ``(seed, call_sequence_number)``, so a fixed seed fixes the
    whole stream. Concurrent shots-mode callers should use separate
    estimators (or accept interleaved sequence numbers).
    """

    def __init__(
        self,
        feature_config: FeatureMapConfig,
        mode: str = "exact",
        shots: int = 1024,
        seed: int = 0,
        x_config: FeatureMapConfig | None = None,
    ):
        if mode not in ("exact", "shots"):
            raise ValueError(f"mode must be 'exact' or 'shots', got {mode!r}")
        if mode == "shots" and int(shots) < 1:
            raise ValueError(f"shots must be >= 1, got {shots}")
        self.feature_config = feature_config
        self.x_config = x_config if x_config is not None else feature_config
        self.mode = mode
        self.shots = int(shots)
        self.seed = int(seed)
        self.eval_counter = 0
        self._lock = threading.Lock()
        self._call_seq = 0

    # -- counter --------------------------------------------------------

    def reset_counter(self) -> None:
        with self._lock:
            self.eval_counter = 0

    def _count(self, n: int) -> None:
        with self._lock:
            self.eval_counter += n

    def _next_rng(self) -> np.random.Generator:
        with self._lock:
            seq = self._call_seq
            self._call_seq += 1
        return np.random.default_rng((self.seed, seq))

    # -- embedding helpers ----------------------------------------------

    def _x_side(self, x):
        """Amplitudes of the data state plus its inverse circuit arrays.

        The inverse arrays realize the uncompute half of the Fig.-3 style
        compute-uncompute circuit; raw quantum data has none (None).
        """
        if isinstance(x, Statevector):
            if x.n_qubits != self.feature_config.n_features:
                raise ValueError(
                    f"data state has {x.n_qubits} qubits, feature map expects "
                    f"{self.feature_config.n_features}"
                )
            return x.amplitudes, None
        kinds, t0, t1, angles = feature_arrays(self.x_config, x, with_occurrences=False)
        inverse = None
        if self.mode == "shots":
            inverse = (
                np.ascontiguousarray(kinds[::-1]),
                np.ascontiguousarray(t0[::-1]),
                np.ascontiguousarray(t1[::-1]),
                np.ascontiguousarray(-angles[::-1]),
            )
        return self._run((kinds, t0, t1, angles)), inverse

    def _run(self, compiled, amps=None):
        """Run compiled gate arrays on |0...0> (or continue on ``amps``)."""
        n = self.feature_config.n_features
        if amps is None:
            amps = np.zeros(1 << n, dtype=np.complex128)
            amps[0] = 1.0
        _backend.run_circuit(amps, n, *compiled)
        return amps

    def _theta_amps(self, theta_compiled, angles_override=None):
        kinds, t0, t1, angles = theta_compiled
        if angles_override is not None:
            angles = angles_override
        return self._run((kinds, t0, t1, angles))

    # -- evaluation core --------------------------------------------------

    def _evaluate(self, x_amps, x_inverse, theta_compiled, angles_override=None):
        """One kernel evaluation (counts 1). Exact overlap or sampled estimate."""
        self._count(1)
        theta_amps = self._theta_amps(theta_compiled, angles_override)
        if self.mode == "exact":
            return min(_backend.overlap_prob(x_amps, theta_amps), 1.0)
        rng = self._next_rng()
        if x_inverse is not None:
            # Compute-uncompute: |0> -> U(theta) -> U^dag(x) -> measure all.
            final = self._run(x_inverse, amps=theta_amps)
            p0 = float(np.abs(final[0]) ** 2)
        else:
            # Raw quantum data has no uncompute circuit; sample the
            # distributionally identical binomial at the exact overlap.
            p0 = _backend.overlap_prob(x_amps, theta_amps)
        p0 = min(max(p0, 0.0), 1.0)
        return rng.binomial(self.shots, p0) / self.shots

    def _theta_side(self, theta, with_occurrences=False):
        theta = np.asarray(theta, dtype=np.float64)
        parts = feature_arrays(self.feature_config, theta, with_occurrences=with_occurrences)
        if with_occurrences:
            return parts[:4], parts[4:]
        return parts, None

    # -- public API -------------------------------------------------------

    def kernel_value(self, x, theta) -> float:
        """K(x, theta) in [0, 1]. Counts one evaluation."""
        x_amps, x_inverse = self._x_side(x)
        theta_compiled, _ = self._theta_side(theta)
        return self._evaluate(x_amps, x_inverse, theta_compiled)

    def kernel_values(self, x, thetas) -> np.ndarray:
        """K(x, theta_i) for each row of ``thetas``. Counts one evaluation per row."""
        x_amps, x_inverse = self._x_side(x)
        out = np.empty(len(thetas))
        for i, theta in enumerate(thetas):
            theta_compiled, _ = self._theta_side(theta)
            out[i] = self._evaluate(x_amps, x_inverse, theta_compiled)
        return out

    def kernel_gradient(self, x, theta) -> np.ndarray:
        """dK/dtheta via the shift rule, one array entry per component.

        Counts two evaluations per parameter occurrence.
        """
        theta = np.asarray(theta, dtype=np.float64)
        x_amps, x_inverse = self._x_side(x)
        theta_compiled, (occ_gate, occ_param, occ_chain) = self._theta_side(
            theta, with_occurrences=True
        )
        base_angles = theta_compiled[3]
        shifted = base_angles.copy()
        grad = np.zeros(theta.shape[0])
        for gi, pi, chain in zip(occ_gate, occ_param, occ_chain):
            shifted[gi] = base_angles[gi] + SHIFT
            k_plus = self._evaluate(x_amps, x_inverse, theta_compiled, shifted)
            shifted[gi] = base_angles[gi] - SHIFT
            k_minus = self._evaluate(x_amps, x_inverse, theta_compiled, shifted)
            shifted[gi] = base_angles[gi]
            grad[pi] += chain * (k_plus - k_minus) / _SHIFT_DENOM
        return grad


def embed_data(config: FeatureMapConfig, x) -> Statevector:
    """Convenience re-export: feature-map embedding of a single vector."""
    return embed(config, x)
