# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled gate kernels: the hot inner loops of the statevector simulator.

Mirror of ``_gates_py``; the equivalence test suite keeps the two in lock
step. All functions mutate the amplitude array in place.
"""

from libc.math cimport cos, sin, sqrt

import numpy as np

ctypedef double complex cplx

# Opcode table shared with the python backend.
DEF OP_H = 0
DEF OP_X = 1
DEF OP_Y = 2
DEF OP_Z = 3
DEF OP_RX = 4
DEF OP_RY = 5
DEF OP_RZ = 6
DEF OP_RZZ = 7
DEF OP_CX = 8


cdef inline void _apply_1q(cplx[::1] amps, int n_qubits, int target,
                           cplx m00, cplx m01, cplx m10, cplx m11) nogil:
    cdef Py_ssize_t dim = (<Py_ssize_t>1) << n_qubits
    cdef Py_ssize_t step = (<Py_ssize_t>1) << target
    cdef Py_ssize_t block = step << 1
    cdef Py_ssize_t base = 0
    cdef Py_ssize_t off, i0, i1
    cdef cplx a0, a1
    while base < dim:
        for off in range(step):
            i0 = base + off
            i1 = i0 + step
            a0 = amps[i0]
            a1 = amps[i1]
            amps[i0] = m00 * a0 + m01 * a1
            amps[i1] = m10 * a0 + m11 * a1
        base += block


cdef inline void _apply_diag2(cplx[::1] amps, int n_qubits, int t0, int t1,
                              cplx phase_eq, cplx phase_ne) nogil:
    cdef Py_ssize_t dim = (<Py_ssize_t>1) << n_qubits
    cdef Py_ssize_t i
    for i in range(dim):
        if ((i >> t0) ^ (i >> t1)) & 1:
            amps[i] = amps[i] * phase_ne
        else:
            amps[i] = amps[i] * phase_eq


cdef inline void _apply_cx(cplx[::1] amps, int n_qubits, int control, int target) nogil:
    cdef Py_ssize_t dim = (<Py_ssize_t>1) << n_qubits
    cdef Py_ssize_t cmask = (<Py_ssize_t>1) << control
    cdef Py_ssize_t tmask = (<Py_ssize_t>1) << target
    cdef Py_ssize_t i, j
    cdef cplx tmp
    for i in range(dim):
        if (i & cmask) and not (i & tmask):
            j = i | tmask
            tmp = amps[i]
            amps[i] = amps[j]
            amps[j] = tmp


def apply_1q(cplx[::1] amps, int n_qubits, int target,
             cplx m00, cplx m01, cplx m10, cplx m11):
    _apply_1q(amps, n_qubits, target, m00, m01, m10, m11)


def apply_diag2(cplx[::1] amps, int n_qubits, int t0, int t1,
                cplx phase_eq, cplx phase_ne):
    _apply_diag2(amps, n_qubits, t0, t1, phase_eq, phase_ne)


def apply_cx(cplx[::1] amps, int n_qubits, int control, int target):
    _apply_cx(amps, n_qubits, control, target)


def run_circuit(cplx[::1] amps, int n_qubits, const int[::1] kinds,
                const int[::1] targets0, const int[::1] targets1, const double[::1] angles):
    cdef Py_ssize_t n_gates = kinds.shape[0]
    cdef Py_ssize_t g
    cdef int kind, t0
    cdef double inv_sqrt2 = 1.0 / sqrt(2.0)
    cdef double c, s
    cdef cplx half
    with nogil:
        for g in range(n_gates):
            kind = kinds[g]
            t0 = targets0[g]
            if kind == OP_H:
                _apply_1q(amps, n_qubits, t0, inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2)
            elif kind == OP_X:
                _apply_1q(amps, n_qubits, t0, 0, 1, 1, 0)
            elif kind == OP_Y:
                _apply_1q(amps, n_qubits, t0, 0, -1j, 1j, 0)
            elif kind == OP_Z:
                _apply_1q(amps, n_qubits, t0, 1, 0, 0, -1)
            elif kind == OP_RX:
                c = cos(angles[g] / 2.0)
                s = sin(angles[g] / 2.0)
                _apply_1q(amps, n_qubits, t0, c, -1j * s, -1j * s, c)
            elif kind == OP_RY:
                c = cos(angles[g] / 2.0)
                s = sin(angles[g] / 2.0)
                _apply_1q(amps, n_qubits, t0, c, -s, s, c)
            elif kind == OP_RZ:
                half = cos(angles[g] / 2.0) - 1j * sin(angles[g] / 2.0)
                _apply_1q(amps, n_qubits, t0, half, 0, 0, half.conjugate())
            elif kind == OP_RZZ:
                half = cos(angles[g] / 2.0) - 1j * sin(angles[g] / 2.0)
                _apply_diag2(amps, n_qubits, t0, targets1[g], half, half.conjugate())
            elif kind == OP_CX:
                _apply_cx(amps, n_qubits, t0, targets1[g])
            else:
                with gil:
                    raise ValueError(f"unknown opcode {kind}")


def overlap_prob(const cplx[::1] a, const cplx[::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    cdef cplx acc = 0
    for i in range(n):
        acc = acc + a[i].conjugate() * b[i]
    return acc.real * acc.real + acc.imag * acc.imag
