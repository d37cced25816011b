"""Lattice Schwinger model: Hamiltonian, exact diagonalization, labeled dataset.

The spin Hamiltonian (staggered fermions after a Jordan-Wigner
transformation, open boundaries, one qubit per site) is

    H = J sum_{n=0}^{Ns-2} ( L_n + theta/(2 pi) )^2
      + (w/2) sum_{n=0}^{Ns-2} [ X_n X_{n+1} + Y_n Y_{n+1} ]
      + (m/2) sum_{n=0}^{Ns-1} (-1)^n Z_n,

with the cumulative link charge L_n = sum_{i<=n} (Z_i + (-1)^i)/2. The
electric and mass terms are diagonal in the computational basis; the
hopping term is real symmetric, so H is built as a dense real symmetric
matrix and diagonalized exactly.

The order parameter is the averaged electric field
``E = (1/(Ns-1)) sum_n <L_n>`` (no background term; the topological angle
appears only in H). States are labeled by the physical field including the
background, F = E + theta/(2 pi): on a finite open chain the screened
branch sits at small F (-> 0 with system size) and the field-carrying
branch near theta/(2 pi), so a threshold between the branches separates
the two phases.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

MAX_SITES = 10  # dense diagonalization ceiling
DEGENERACY_TOL = 1e-10


@dataclass(frozen=True)
class SchwingerConfig:
    """Couplings and sweep specification.

    ``J``/``w``/``m`` are in units of energy; the sweep varies the mass as
    ``m = (m/g) * g`` with g absorbed into J, w = 1 defaults, so sweep
    values are dimensionless mass-to-coupling ratios.
    """

    n_sites: int = 4
    J: float = 1.0
    w: float = 1.0
    m: float = 0.0
    theta_angle: float = math.pi
    mass_sweep: tuple = field(
        default_factory=lambda: tuple(np.linspace(0.0, 1.0, 20))
    )

    def __post_init__(self):
        if self.n_sites < 2 or self.n_sites % 2 != 0:
            raise ValueError(f"n_sites must be even and >= 2, got {self.n_sites}")
        sweep = tuple(float(v) for v in self.mass_sweep)
        if len(sweep) == 0:
            raise ValueError("mass_sweep must be non-empty")
        if any(b <= a for a, b in zip(sweep, sweep[1:])):
            raise ValueError("mass_sweep must be strictly increasing")
        object.__setattr__(self, "mass_sweep", sweep)


@dataclass
class LabeledQuantumState:
    """One eigenstate of the sweep with its order parameter and phase label."""

    n_sites: int
    theta: float
    m_over_g: float
    energy: float
    avg_field: float
    label: int
    amplitudes: np.ndarray
    state_index: int = 0
    degenerate: bool = False

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        norm_sq = float(np.sum(np.abs(self.amplitudes) ** 2))
        if abs(norm_sq - 1.0) > 1e-8:
            raise ValueError(f"state not normalized: sum |a|^2 = {norm_sq!r}")


def _z_table(n_sites: int) -> np.ndarray:
    """z_table[i, b] = Z-eigenvalue (+1/-1) of qubit i in basis state b."""
    idx = np.arange(1 << n_sites)
    return np.array([1 - 2 * ((idx >> i) & 1) for i in range(n_sites)], dtype=np.float64)


def _link_fields(n_sites: int) -> np.ndarray:
    """links[n, b] = L_n(b), the cumulative charge up to site n, per basis state."""
    z = _z_table(n_sites)
    charges = np.array([(z[i] + (-1) ** i) / 2.0 for i in range(n_sites)])
    return np.cumsum(charges, axis=0)[: n_sites - 1]


def build_hamiltonian(config: SchwingerConfig) -> np.ndarray:
    """Dense real symmetric Hamiltonian matrix in the computational basis."""
    n = config.n_sites
    if n > MAX_SITES:
        raise ValueError(f"n_sites {n} exceeds dense ceiling {MAX_SITES}")
    dim = 1 << n
    z = _z_table(n)
    links = _link_fields(n)

    diag = np.zeros(dim)
    offset = config.theta_angle / (2.0 * math.pi)
    for ln in range(n - 1):
        diag += config.J * (links[ln] + offset) ** 2
    for i in range(n):
        diag += (config.m / 2.0) * ((-1) ** i) * z[i]

    h = np.diag(diag)
    # (w/2)(XX + YY) couples basis states differing on two adjacent unequal bits
    idx = np.arange(dim)
    for i in range(n - 1):
        bit_i = (idx >> i) & 1
        bit_j = (idx >> (i + 1)) & 1
        src = idx[(bit_i == 1) & (bit_j == 0)]
        dst = src ^ ((1 << i) | (1 << (i + 1)))
        h[src, dst] += config.w
        h[dst, src] += config.w
    return h


def average_field(amplitudes, n_sites: int) -> float:
    """Averaged electric field <E> = mean over links of <L_n>.

    The operator is diagonal, so the expectation is a probability-weighted
    sum of per-basis-state link averages.
    """
    amps = np.asarray(amplitudes, dtype=np.complex128)
    if amps.shape != (1 << n_sites,):
        raise ValueError(f"expected {1 << n_sites} amplitudes, got shape {amps.shape}")
    probs = np.abs(amps) ** 2
    norm = float(probs.sum())
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state not normalized: sum |a|^2 = {norm!r}")
    per_basis = _link_fields(n_sites).mean(axis=0)
    return float(probs @ per_basis)


def field_label(avg_field_value: float, theta: float, threshold: float = 0.35) -> int:
    """Phase label from the physical field F = <E> + theta/(2 pi).

    Class 0 ("below critical field", the screened branch) when F <= threshold,
    class 1 ("above critical field") when F > threshold. The default
    threshold sits between the two branches at desk-scale lattice sizes.
    """
    f = avg_field_value + theta / (2.0 * math.pi)
    if f < -1e-9:
        raise ValueError(f"physical field unexpectedly negative: {f}")
    return 1 if f > threshold else 0


def ground_states(
    config: SchwingerConfig,
    states_per_point: int = 2,
    label_threshold: float = 0.35,
) -> list[LabeledQuantumState]:
    """Exactly diagonalize H at each sweep point and label the lowest states.

    For each mass ratio in the sweep the ``states_per_point`` lowest
    eigenstates are retained (default two: with the default couplings the
    ground and first excited states carry one branch each, giving a balanced
    two-phase dataset). Near-degenerate pairs (gap < 1e-10) are flagged.
    """
    if states_per_point < 1:
        raise ValueError("states_per_point must be >= 1")
    if config.n_sites > MAX_SITES:
        raise ValueError(f"n_sites {config.n_sites} exceeds dense ceiling {MAX_SITES}")
    out = []
    for m_over_g in config.mass_sweep:
        point = SchwingerConfig(
            n_sites=config.n_sites,
            J=config.J,
            w=config.w,
            m=m_over_g * 1.0,
            theta_angle=config.theta_angle,
            mass_sweep=config.mass_sweep,
        )
        h = build_hamiltonian(point)
        evals, evecs = np.linalg.eigh(h)
        for s in range(states_per_point):
            vec = evecs[:, s].astype(np.complex128)
            # canonical sign: largest-|amplitude| component real positive
            pivot = int(np.argmax(np.abs(vec)))
            if vec[pivot].real < 0:
                vec = -vec
            gap_below = evals[s] - evals[s - 1] if s > 0 else np.inf
            gap_above = evals[s + 1] - evals[s] if s + 1 < len(evals) else np.inf
            e_field = average_field(vec, config.n_sites)
            out.append(
                LabeledQuantumState(
                    n_sites=config.n_sites,
                    theta=config.theta_angle,
                    m_over_g=float(m_over_g),
                    energy=float(evals[s]),
                    avg_field=e_field,
                    label=field_label(e_field, config.theta_angle, label_threshold),
                    amplitudes=vec,
                    state_index=s,
                    degenerate=bool(min(gap_below, gap_above) < DEGENERACY_TOL),
                )
            )
    return out


# -- dataset file -------------------------------------------------------------

DATASET_FORMAT = "qsom-schwinger-v1"


def export_dataset(states: list[LabeledQuantumState], path) -> None:
    """Write sweep states as JSON; amplitudes as [re, im] pairs, bit-exact."""
    if not states:
        raise ValueError("no states to export")
    records = []
    for st in states:
        records.append(
            {
                "n_sites": st.n_sites,
                "theta": st.theta,
                "m_over_g": st.m_over_g,
                "energy": st.energy,
                "avg_field": st.avg_field,
                "label": st.label,
                "state_index": st.state_index,
                "degenerate": st.degenerate,
                "amplitudes": [[float(a.real), float(a.imag)] for a in st.amplitudes],
            }
        )
    with open(path, "w") as fh:
        json.dump({"format": DATASET_FORMAT, "states": records}, fh)
        fh.write("\n")


def load_dataset(path) -> list[LabeledQuantumState]:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != DATASET_FORMAT:
        raise ValueError(f"not a {DATASET_FORMAT} document")
    out = []
    for rec in doc["states"]:
        amps = np.array([complex(re, im) for re, im in rec["amplitudes"]])
        out.append(
            LabeledQuantumState(
                n_sites=rec["n_sites"],
                theta=rec["theta"],
                m_over_g=rec["m_over_g"],
                energy=rec["energy"],
                avg_field=rec["avg_field"],
                label=rec["label"],
                amplitudes=amps,
                state_index=rec.get("state_index", 0),
                degenerate=rec.get("degenerate", False),
            )
        )
    return out
