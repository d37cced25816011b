"""Backend selection: compiled Cython kernels with a numpy fallback.

The compiled module is preferred when importable; set ``QSOM_PURE_PYTHON=1``
to force the numpy implementation (used by the benchmark and the
equivalence tests).
"""

import os

from ._gates_py import OP_CX, OP_H, OP_RX, OP_RY, OP_RZ, OP_RZZ, OP_X, OP_Y, OP_Z

if os.environ.get("QSOM_PURE_PYTHON"):
    from . import _gates_py as _impl

    BACKEND_NAME = "python"
else:
    try:
        from . import _gates_cy as _impl

        BACKEND_NAME = "cython"
    except ImportError:
        from . import _gates_py as _impl

        BACKEND_NAME = "python"

apply_1q = _impl.apply_1q
apply_diag2 = _impl.apply_diag2
apply_cx = _impl.apply_cx
run_circuit = _impl.run_circuit
overlap_prob = _impl.overlap_prob

__all__ = [
    "BACKEND_NAME",
    "apply_1q",
    "apply_diag2",
    "apply_cx",
    "run_circuit",
    "overlap_prob",
    "OP_H",
    "OP_X",
    "OP_Y",
    "OP_Z",
    "OP_RX",
    "OP_RY",
    "OP_RZ",
    "OP_RZZ",
    "OP_CX",
]
