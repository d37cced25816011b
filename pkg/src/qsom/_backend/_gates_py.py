"""Pure-numpy gate kernels.

Fallback implementation of the hot loops; semantics are pinned by the
equivalence tests against the compiled backend. All functions mutate the
amplitude array in place; callers own the copy discipline.

Qubit ordering is little-endian throughout: qubit ``t`` is bit ``t`` of the
basis-state index, so its amplitude stride is ``2**t``.
"""

import numpy as np

# Opcode table shared with the compiled backend.
OP_H = 0
OP_X = 1
OP_Y = 2
OP_Z = 3
OP_RX = 4
OP_RY = 5
OP_RZ = 6
OP_RZZ = 7
OP_CX = 8

_SQRT1_2 = 1.0 / np.sqrt(2.0)


def apply_1q(amps, n_qubits, target, m00, m01, m10, m11):
    """Apply a 2x2 unitary [[m00, m01], [m10, m11]] to one qubit, in place."""
    view = amps.reshape(-1, 2, 1 << target)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = m00 * a0 + m01 * a1
    view[:, 1, :] = m10 * a0 + m11 * a1


def apply_diag2(amps, n_qubits, t0, t1, phase_eq, phase_ne):
    """Apply diag phases on two qubits: phase_eq where bits match, else phase_ne."""
    hi, lo = (t1, t0) if t1 > t0 else (t0, t1)
    view = amps.reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)
    view[:, 0, :, 0, :] *= phase_eq
    view[:, 1, :, 1, :] *= phase_eq
    view[:, 0, :, 1, :] *= phase_ne
    view[:, 1, :, 0, :] *= phase_ne


def apply_cx(amps, n_qubits, control, target):
    """Apply CX (control flips target), in place."""
    hi, lo = (control, target) if control > target else (target, control)
    view = amps.reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)
    if control == hi:
        block = view[:, 1]
        tmp = block[:, :, 0, :].copy()
        block[:, :, 0, :] = block[:, :, 1, :]
        block[:, :, 1, :] = tmp
    else:
        tmp = view[:, 0, :, 1, :].copy()
        view[:, 0, :, 1, :] = view[:, 1, :, 1, :]
        view[:, 1, :, 1, :] = tmp


def _rx(angle):
    c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
    return c, -1j * s, -1j * s, c


def _ry(angle):
    c, s = np.cos(angle / 2.0), np.sin(angle / 2.0)
    return c, -s, s, c


def run_circuit(amps, n_qubits, kinds, targets0, targets1, angles):
    """Run a compiled gate sequence in place.

    ``kinds`` holds opcodes; ``targets0``/``targets1`` hold qubit indices
    (``targets1`` is ignored for single-qubit gates); ``angles`` has one slot
    per gate (0.0 for non-rotations).
    """
    for g in range(len(kinds)):
        kind = kinds[g]
        t0 = targets0[g]
        if kind == OP_H:
            apply_1q(amps, n_qubits, t0, _SQRT1_2, _SQRT1_2, _SQRT1_2, -_SQRT1_2)
        elif kind == OP_X:
            apply_1q(amps, n_qubits, t0, 0.0, 1.0, 1.0, 0.0)
        elif kind == OP_Y:
            apply_1q(amps, n_qubits, t0, 0.0, -1j, 1j, 0.0)
        elif kind == OP_Z:
            apply_1q(amps, n_qubits, t0, 1.0, 0.0, 0.0, -1.0)
        elif kind == OP_RX:
            apply_1q(amps, n_qubits, t0, *_rx(angles[g]))
        elif kind == OP_RY:
            apply_1q(amps, n_qubits, t0, *_ry(angles[g]))
        elif kind == OP_RZ:
            half = np.exp(-0.5j * angles[g])
            apply_1q(amps, n_qubits, t0, half, 0.0, 0.0, np.conj(half))
        elif kind == OP_RZZ:
            half = np.exp(-0.5j * angles[g])
            apply_diag2(amps, n_qubits, t0, targets1[g], half, np.conj(half))
        elif kind == OP_CX:
            apply_cx(amps, n_qubits, t0, targets1[g])
        else:
            raise ValueError(f"unknown opcode {kind}")


def overlap_prob(a, b):
    """|<a|b>|^2 for two amplitude arrays of equal length."""
    inner = np.vdot(a, b)
    return float(inner.real * inner.real + inner.imag * inner.imag)
