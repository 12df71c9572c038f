"""hamlab: Hamiltonian construction, Trotter encoding, phase estimation,
resource estimation and dense state-vector analysis."""

from .fermion import FermionTensors, bravyi_kitaev, jordan_wigner, pauli_count
from .pauli import (
    PauliString,
    PauliSum,
    PauliTerm,
    coeff_one_norm,
    commutator,
    commutes,
    multiply,
    to_matrix,
)
from .qpe import (
    BudgetSplit,
    QpeParams,
    build_qpe,
    build_time_evolution,
    derive_phase_qubits,
    derive_time_naive,
    optimize_time,
)
from .resources import ResourceCounts, SynthesisModel, count, structural_counts
from .simulator import (
    StateVector,
    basis_state,
    eigendecompose,
    exact_evolution,
    fidelity,
    qpe_distribution_analytic,
    run,
)
from .spin_models import SpinModelSpec, generate
from .trotter import (
    OrderingStrategy,
    TrotterPlan,
    apply_ordering,
    bound_first_order,
    bound_second_order,
    build_trotter,
    derive_steps,
    plan_for_steps,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetSplit",
    "FermionTensors",
    "OrderingStrategy",
    "PauliString",
    "PauliSum",
    "PauliTerm",
    "QpeParams",
    "ResourceCounts",
    "SpinModelSpec",
    "StateVector",
    "SynthesisModel",
    "TrotterPlan",
    "apply_ordering",
    "basis_state",
    "bound_first_order",
    "bound_second_order",
    "bravyi_kitaev",
    "build_qpe",
    "build_time_evolution",
    "build_trotter",
    "coeff_one_norm",
    "commutator",
    "commutes",
    "count",
    "derive_phase_qubits",
    "derive_steps",
    "derive_time_naive",
    "eigendecompose",
    "exact_evolution",
    "fidelity",
    "generate",
    "jordan_wigner",
    "multiply",
    "optimize_time",
    "pauli_count",
    "plan_for_steps",
    "qpe_distribution_analytic",
    "run",
    "structural_counts",
    "to_matrix",
]
