"""Variational quantum self-organizing map toolkit.

Unsupervised mapping of classical or quantum data onto a low-dimensional
neuron grid, with quantum state fidelity as the similarity measure and
parameter-shift gradients for the weight updates. Includes a classical SOM
baseline, a lattice Schwinger-model dataset generator, and clustering
metrics.
"""

from ._backend import BACKEND_NAME
from .featuremap import FeatureMapConfig, ParamOccurrence, build_feature_circuit, embed
from .kernel import KernelEstimator
from .metrics import (
    LabeledAssignment,
    calinski_harabasz,
    davies_bouldin,
    fowlkes_mallows,
    map_purity,
    quantization_error,
    silhouette,
    topographic_error,
)
from .schwinger import (
    LabeledQuantumState,
    SchwingerConfig,
    average_field,
    build_hamiltonian,
    export_dataset,
    ground_states,
    load_dataset,
)
from .som import (
    RbfKernel,
    Schedule,
    SomGrid,
    TrainingRecord,
    find_bmu_euclidean,
    find_bmu_quantum,
    grid_distance,
    infer,
    init_weights,
    load_map,
    neighborhood,
    save_map,
    train,
    update_classical,
    update_kernelized,
    update_quantum,
)
from .statevector import (
    Circuit,
    Gate,
    Statevector,
    apply_circuit,
    apply_gate,
    overlap_probability,
    sample_zero_outcome,
    zero_state,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "Circuit",
    "FeatureMapConfig",
    "Gate",
    "KernelEstimator",
    "LabeledAssignment",
    "LabeledQuantumState",
    "ParamOccurrence",
    "RbfKernel",
    "Schedule",
    "SchwingerConfig",
    "SomGrid",
    "Statevector",
    "TrainingRecord",
    "apply_circuit",
    "apply_gate",
    "average_field",
    "build_feature_circuit",
    "build_hamiltonian",
    "calinski_harabasz",
    "davies_bouldin",
    "embed",
    "export_dataset",
    "find_bmu_euclidean",
    "find_bmu_quantum",
    "fowlkes_mallows",
    "grid_distance",
    "ground_states",
    "infer",
    "init_weights",
    "load_dataset",
    "load_map",
    "map_purity",
    "neighborhood",
    "overlap_probability",
    "quantization_error",
    "sample_zero_outcome",
    "save_map",
    "silhouette",
    "topographic_error",
    "train",
    "update_classical",
    "update_kernelized",
    "update_quantum",
    "zero_state",
]
