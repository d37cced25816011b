"""Dense statevector simulator for small qubit counts.

Conventions, pinned by the test suite:

- Little-endian qubit ordering: qubit 0 is the least significant bit of the
  basis-state index.
- ``Z|0> = +|0>``; rotations use the half-angle form, e.g.
  ``RZ(a) = diag(exp(-i a/2), exp(+i a/2)) = exp(-i a Z / 2)``.
- Global phase is not tracked; every observable in this package is
  phase-insensitive.

Statevectors are immutable after construction. Operations take inputs and
return fresh outputs, so values can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _backend

MAX_QUBITS = 20  # 2^20 complex doubles = 16 MiB, the desk-scale ceiling

_ONE_QUBIT_KINDS = frozenset({"H", "X", "Y", "Z", "RX", "RY", "RZ"})
_TWO_QUBIT_KINDS = frozenset({"RZZ", "CX"})
_ROTATION_KINDS = frozenset({"RX", "RY", "RZ", "RZZ"})

_OPCODES = {
    "H": _backend.OP_H,
    "X": _backend.OP_X,
    "Y": _backend.OP_Y,
    "Z": _backend.OP_Z,
    "RX": _backend.OP_RX,
    "RY": _backend.OP_RY,
    "RZ": _backend.OP_RZ,
    "RZZ": _backend.OP_RZZ,
    "CX": _backend.OP_CX,
}


@dataclass(frozen=True)
class Gate:
    """A single gate: kind, target qubit(s) and, for rotations, an angle.

    ``RZZ`` and ``CX`` take exactly two targets (for ``CX``: control first),
    all other kinds exactly one. Rotation kinds carry an angle in radians;
    the rest must not.
    """

    kind: str
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if self.kind not in _ONE_QUBIT_KINDS and self.kind not in _TWO_QUBIT_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        want = 2 if self.kind in _TWO_QUBIT_KINDS else 1
        if len(self.targets) != want:
            raise ValueError(f"{self.kind} takes {want} target(s), got {len(self.targets)}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"duplicate targets in {self.targets}")
        if any(t < 0 for t in self.targets):
            raise IndexError(f"negative target in {self.targets}")
        if self.kind in _ROTATION_KINDS:
            if self.angle is None:
                raise ValueError(f"{self.kind} requires an angle")
            object.__setattr__(self, "angle", float(self.angle))
        elif self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list on a fixed number of qubits.

    ``compiled()`` lowers the gate list to flat opcode/target/angle arrays
    consumed by the backend kernels; the result is cached. Angle slots line
    up with gate indices (non-rotations hold 0.0), which is what lets the
    gradient engine shift a single occurrence's angle by index.
    """

    n_qubits: int
    gates: tuple[Gate, ...]
    _compiled: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        object.__setattr__(self, "gates", tuple(self.gates))
        for gate in self.gates:
            for t in gate.targets:
                if t >= self.n_qubits:
                    raise IndexError(f"gate target {t} out of range for {self.n_qubits} qubits")

    def compiled(self):
        """Return (kinds, targets0, targets1, angles) int32/int32/int32/float64 arrays."""
        cache = self._compiled
        if "arrays" not in cache:
            n = len(self.gates)
            kinds = np.empty(n, dtype=np.int32)
            t0 = np.empty(n, dtype=np.int32)
            t1 = np.zeros(n, dtype=np.int32)
            angles = np.zeros(n, dtype=np.float64)
            for i, g in enumerate(self.gates):
                kinds[i] = _OPCODES[g.kind]
                t0[i] = g.targets[0]
                if len(g.targets) == 2:
                    t1[i] = g.targets[1]
                if g.angle is not None:
                    angles[i] = g.angle
            for arr in (kinds, t0, t1, angles):
                arr.setflags(write=False)
            cache["arrays"] = (kinds, t0, t1, angles)
        return cache["arrays"]

    def inverse(self) -> "Circuit":
        """The inverse circuit: reversed gate order, rotation angles negated."""
        inv = []
        for g in reversed(self.gates):
            if g.kind in _ROTATION_KINDS:
                inv.append(Gate(g.kind, g.targets, -g.angle))
            else:
                inv.append(g)  # H, X, Y, Z, CX are self-inverse
        return Circuit(self.n_qubits, tuple(inv))


class Statevector:
    """Normalized amplitude vector over ``2**n_qubits`` basis states."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray, *, _trusted: bool = False):
        n_qubits = int(n_qubits)
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
        if _trusted:
            amps = amplitudes
        else:
            amps = np.asarray(amplitudes, dtype=np.complex128).copy()
            if amps.shape != (1 << n_qubits,):
                raise ValueError(
                    f"expected {1 << n_qubits} amplitudes for {n_qubits} qubits, got {amps.shape}"
                )
            norm_sq = float(np.sum(np.abs(amps) ** 2))
            if abs(norm_sq - 1.0) > 1e-8:
                raise ValueError(f"amplitudes not normalized: sum |a|^2 = {norm_sq!r}")
        amps.setflags(write=False)
        self.n_qubits = n_qubits
        self.amplitudes = amps

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __repr__(self):
        return f"Statevector(n_qubits={self.n_qubits})"


def zero_state(n_qubits: int) -> Statevector:
    """The all-zeros computational basis state |0...0>."""
    if not 1 <= int(n_qubits) <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << int(n_qubits), dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(int(n_qubits), amps, _trusted=True)


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    """Apply one gate, returning a fresh statevector."""
    for t in gate.targets:
        if t >= state.n_qubits:
            raise IndexError(f"gate target {t} out of range for {state.n_qubits} qubits")
    amps = state.amplitudes.copy()
    kinds = np.array([_OPCODES[gate.kind]], dtype=np.int32)
    t0 = np.array([gate.targets[0]], dtype=np.int32)
    t1 = np.array([gate.targets[1] if len(gate.targets) == 2 else 0], dtype=np.int32)
    angles = np.array([gate.angle if gate.angle is not None else 0.0], dtype=np.float64)
    _backend.run_circuit(amps, state.n_qubits, kinds, t0, t1, angles)
    return Statevector(state.n_qubits, amps, _trusted=True)


def apply_circuit(state: Statevector, circuit: Circuit) -> Statevector:
    """Apply every gate of a circuit, returning a fresh statevector."""
    if circuit.n_qubits != state.n_qubits:
        raise ValueError(
            f"circuit acts on {circuit.n_qubits} qubits, state has {state.n_qubits}"
        )
    amps = state.amplitudes.copy()
    _backend.run_circuit(amps, state.n_qubits, *circuit.compiled())
    return Statevector(state.n_qubits, amps, _trusted=True)


def overlap_probability(a: Statevector, b: Statevector) -> float:
    """|<a|b>|^2, the transition probability between two states."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit mismatch: {a.n_qubits} vs {b.n_qubits}")
    p = _backend.overlap_prob(a.amplitudes, b.amplitudes)
    # Guard against float drift just above 1 for (near-)identical states.
    return min(p, 1.0)


def sample_zero_outcome(state: Statevector, shots: int, seed) -> float:
    """Fraction of measurement shots that land on the all-zeros outcome.

    Outcomes are drawn from the |amplitudes|^2 distribution; only the
    all-zeros count is needed, so the draw is the (distributionally
    identical) binomial marginal at index 0. Deterministic for a fixed seed.
    """
    shots = int(shots)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    p0 = float(np.abs(state.amplitudes[0]) ** 2)
    p0 = min(max(p0, 0.0), 1.0)
    rng = np.random.default_rng(seed)
    return rng.binomial(shots, p0) / shots
