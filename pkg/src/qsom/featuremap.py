"""ZZ feature-map circuits with parameter-occurrence metadata.

The encoding unitary is one layer of Hadamards followed by ``reps``
repetitions of a diagonal block ``exp(i sum_i f(x_i) Z_i  +
i sum_<i,i+1> g(x_i, x_{i+1}) Z_i Z_{i+1})`` over nearest-neighbour pairs.
Under the simulator's ``RZ(a) = exp(-i a Z/2)`` convention the ``exp(+i f Z)``
factor becomes ``RZ(-2 f)``, and likewise ``RZZ(-2 g)`` for the pair term;
the sign is pinned by the matrix-exponential oracle test.

Every rotation gate records which parameter components feed its angle and
with what derivative (the chain factor), so the gradient engine can apply
the shift rule per occurrence and sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _backend
from .statevector import Circuit, Gate, Statevector, apply_circuit, zero_state


def phi_single(x: float) -> float:
    """Default single-qubit angle function: 2*x."""
    return 2.0 * x


def dphi_single(x: float) -> float:
    return 2.0


def phi_pair(x: float, y: float) -> float:
    """Default pair angle function: 2*(x - pi)*(y - pi)."""
    return 2.0 * (x - math.pi) * (y - math.pi)


def dphi_pair_dx(x: float, y: float) -> float:
    return 2.0 * (y - math.pi)


def dphi_pair_dy(x: float, y: float) -> float:
    return 2.0 * (x - math.pi)


@dataclass(frozen=True)
class FeatureMapConfig:
    """Configuration of the pairwise-entangled ZZ feature map.

    One qubit per feature; entanglement is fixed to nearest-neighbour pairs
    <i, i+1>. The angle functions are pluggable (with their partial
    derivatives, needed for chain factors) but default to the forms above.
    """

    n_features: int
    reps: int = 2
    single_fn: Callable[[float], float] = phi_single
    single_dfn: Callable[[float], float] = dphi_single
    pair_fn: Callable[[float, float], float] = phi_pair
    pair_dfn_dx: Callable[[float, float], float] = dphi_pair_dx
    pair_dfn_dy: Callable[[float, float], float] = dphi_pair_dy

    def __post_init__(self):
        if self.n_features < 1:
            raise ValueError(f"n_features must be >= 1, got {self.n_features}")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")

    @property
    def is_default_map(self) -> bool:
        return (
            self.single_fn is phi_single
            and self.pair_fn is phi_pair
        )


@dataclass(frozen=True)
class ParamOccurrence:
    """One appearance of a parameter component inside a rotation gate.

    ``chain_factor`` is d(gate angle)/d(parameter component) evaluated at the
    bound vector; summing chain-weighted per-gate derivatives over a
    component's occurrences yields the full derivative with respect to that
    component.
    """

    gate_index: int
    param_index: int
    chain_factor: float


def build_feature_circuit(
    config: FeatureMapConfig, vector
) -> tuple[Circuit, list[ParamOccurrence]]:
    """Bind a vector into the feature-map circuit.

    Returns the circuit and the occurrence list covering every rotation
    gate. Angles are not range-checked: data is expected pre-scaled to
    [-1, 1] but trained weight vectors may wander outside it.
    """
    vec = np.asarray(vector, dtype=np.float64)
    if vec.shape != (config.n_features,):
        raise ValueError(
            f"expected vector of length {config.n_features}, got shape {vec.shape}"
        )
    n = config.n_features
    gates = [Gate("H", (q,)) for q in range(n)]
    occurrences: list[ParamOccurrence] = []
    for _ in range(config.reps):
        for q in range(n):
            gates.append(Gate("RZ", (q,), -2.0 * config.single_fn(vec[q])))
            occurrences.append(
                ParamOccurrence(len(gates) - 1, q, -2.0 * config.single_dfn(vec[q]))
            )
        for q in range(n - 1):
            xa, xb = vec[q], vec[q + 1]
            gates.append(Gate("RZZ", (q, q + 1), -2.0 * config.pair_fn(xa, xb)))
            gi = len(gates) - 1
            occurrences.append(ParamOccurrence(gi, q, -2.0 * config.pair_dfn_dx(xa, xb)))
            occurrences.append(ParamOccurrence(gi, q + 1, -2.0 * config.pair_dfn_dy(xa, xb)))
    return Circuit(n, tuple(gates)), occurrences


def embed(config: FeatureMapConfig, vector) -> Statevector:
    """Encode a vector as a quantum state: the feature circuit applied to |0...0>."""
    circuit, _ = build_feature_circuit(config, vector)
    return apply_circuit(zero_state(config.n_features), circuit)


# -- compiled fast path --------------------------------------------------------
#
# The kernel estimator binds thousands of vectors per training run; building
# Gate objects each time would dominate the compiled backend's runtime. For
# the default angle functions the circuit structure is fixed per (n, reps),
# so only the angle/chain values need recomputing. Equivalence with
# ``build_feature_circuit`` is pinned by tests.

_TEMPLATES: dict = {}


def _template(n: int, reps: int):
    key = (n, reps)
    if key not in _TEMPLATES:
        kinds, t0, t1 = [], [], []
        single_slots = []
        pair_slots = []
        for q in range(n):
            kinds.append(_backend.OP_H)
            t0.append(q)
            t1.append(0)
        for _ in range(reps):
            rep_singles = []
            for q in range(n):
                rep_singles.append(len(kinds))
                kinds.append(_backend.OP_RZ)
                t0.append(q)
                t1.append(0)
            rep_pairs = []
            for q in range(n - 1):
                rep_pairs.append(len(kinds))
                kinds.append(_backend.OP_RZZ)
                t0.append(q)
                t1.append(q + 1)
            single_slots.append(rep_singles)
            pair_slots.append(rep_pairs)
        arrays = (
            np.array(kinds, dtype=np.int32),
            np.array(t0, dtype=np.int32),
            np.array(t1, dtype=np.int32),
            np.array(single_slots, dtype=np.int64),
            np.array(pair_slots, dtype=np.int64).reshape(reps, max(n - 1, 0)),
        )
        for arr in arrays[:3]:
            arr.setflags(write=False)
        _TEMPLATES[key] = arrays
    return _TEMPLATES[key]


def feature_arrays(config: FeatureMapConfig, vector, with_occurrences: bool = True):
    """Compiled form of the bound feature circuit, optionally with occurrences.

    Returns ``(kinds, targets0, targets1, angles)`` plus, when requested,
    ``(occ_gate, occ_param, occ_chain)`` appended; the first four feed the
    backend's ``run_circuit``, the occurrence arrays drive per-occurrence
    angle shifts in the gradient engine.
    """
    vec = np.asarray(vector, dtype=np.float64)
    if vec.shape != (config.n_features,):
        raise ValueError(
            f"expected vector of length {config.n_features}, got shape {vec.shape}"
        )
    if not config.is_default_map:
        circuit, occurrences = build_feature_circuit(config, vec)
        kinds, t0, t1, angles = circuit.compiled()
        if not with_occurrences:
            return kinds, t0, t1, angles.copy()
        occ_gate = np.array([o.gate_index for o in occurrences], dtype=np.int64)
        occ_param = np.array([o.param_index for o in occurrences], dtype=np.int64)
        occ_chain = np.array([o.chain_factor for o in occurrences])
        return kinds, t0, t1, angles.copy(), occ_gate, occ_param, occ_chain

    n = config.n_features
    kinds, t0, t1, single_slots, pair_slots = _template(n, config.reps)
    angles = np.zeros(len(kinds))
    shifted = vec - math.pi
    angles[single_slots] = -4.0 * vec  # -2 * phi_single, phi = 2x
    if n > 1:
        angles[pair_slots] = -4.0 * shifted[:-1] * shifted[1:]
    if not with_occurrences:
        return kinds, t0, t1, angles
    occ_gate = np.concatenate(
        [single_slots.ravel()]
        + ([pair_slots.ravel(), pair_slots.ravel()] if n > 1 else [])
    )
    occ_param = np.concatenate(
        [np.tile(np.arange(n), config.reps)]
        + (
            [
                np.tile(np.arange(n - 1), config.reps),
                np.tile(np.arange(1, n), config.reps),
            ]
            if n > 1
            else []
        )
    )
    occ_chain = np.concatenate(
        [np.full(n * config.reps, -4.0)]
        + (
            [
                np.tile(-4.0 * shifted[1:], config.reps),
                np.tile(-4.0 * shifted[:-1], config.reps),
            ]
            if n > 1
            else []
        )
    )
    return kinds, t0, t1, angles, occ_gate, occ_param, occ_chain
