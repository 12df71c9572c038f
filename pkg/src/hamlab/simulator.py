"""Dense state-vector execution and spectral analyses.

The executor walks the nested graph structure directly (repeats are loops,
never matrix powers), applying PauliRotations as
cos(theta/2)*psi - i*sin(theta/2)*(P psi) without decomposition and
controlled gates exactly on the control's |1> subspace. Flattening the
graph first and replaying the primitive gates gives the same state up to
global phase; tests pin that equivalence.

Amplitude layout is big-endian: qubit 0 is the most significant bit of the
basis index, matching the Pauli matrix convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin, sqrt

import numpy as np

from .errors import CapExceededError, InputDataError
from .ir import AlgorithmGraph, Call, Definition, Gate
from .lowering import DEFAULT_FLATTEN_CAP, primitive_count
from .pauli import PauliSum, to_matrix

DEFAULT_WIDTH_CAP = 20
DEFAULT_DENSE_CAP = 12

_SQRT1_2 = 1 / sqrt(2)


@dataclass(frozen=True)
class StateVector:
    """Normalized dense amplitudes over 2^n basis states."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.shape != (2**self.n,):
            raise InputDataError(
                f"sim: amplitude vector of length {amps.size} is not 2^{self.n}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > 1e-10:
            raise InputDataError(f"sim: state norm {norm} deviates from 1")
        object.__setattr__(self, "amps", amps)


def basis_state(n: int, bits: str | int = 0) -> StateVector:
    """|bits> with qubit 0 as the leftmost character / most significant bit."""
    if isinstance(bits, str):
        if len(bits) != n or set(bits) - {"0", "1"}:
            raise InputDataError(f"sim: bad basis bitstring {bits!r} for {n} qubits")
        index = int(bits, 2)
    else:
        index = bits
    amps = np.zeros(2**n, dtype=complex)
    amps[index] = 1.0
    return StateVector(n, amps)


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2; invariant under global phase."""
    if a.n != b.n:
        raise InputDataError(f"sim: dimension mismatch {a.n} != {b.n}")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


# ---------------------------------------------------------------------------
# Gate kernels. States are carried as arrays of shape [2]*n; axis q is qubit q.
# ---------------------------------------------------------------------------


def _axis_slice(rank: int, axis: int, value: int) -> tuple:
    sl: list = [slice(None)] * rank
    sl[axis] = value
    return tuple(sl)


def _apply_single(state: np.ndarray, matrix: np.ndarray, q: int) -> np.ndarray:
    moved = np.tensordot(matrix, state, axes=(1, q))
    return np.moveaxis(moved, 0, q)


def _apply_pauli_letter(state: np.ndarray, letter: str, q: int) -> np.ndarray:
    rank = state.ndim
    if letter == "X":
        return np.flip(state, axis=q)
    if letter == "Z":
        out = state.copy()
        out[_axis_slice(rank, q, 1)] *= -1
        return out
    if letter == "Y":
        out = np.flip(state, axis=q).copy()
        out[_axis_slice(rank, q, 0)] *= -1j
        out[_axis_slice(rank, q, 1)] *= 1j
        return out
    return state


def _apply_pauli_string(state: np.ndarray, letters: str, qubits: tuple[int, ...]) -> np.ndarray:
    for letter, q in zip(letters, qubits):
        if letter != "I":
            state = _apply_pauli_letter(state, letter, q)
    return state


_FIXED_1Q = {
    "H": np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
}
_PHASE_1Q = {
    "Z": -1.0 + 0j,
    "S": 1j,
    "Sdg": -1j,
    "T": np.exp(1j * np.pi / 4),
    "Tdg": np.exp(-1j * np.pi / 4),
}


def _apply_gate_array(state: np.ndarray, gate: Gate, qubits: tuple[int, ...]) -> np.ndarray:
    """Apply one gate to a state array; ``qubits`` are its (shifted) axes."""
    rank = state.ndim
    kind = gate.kind
    if kind in _FIXED_1Q:
        return _apply_single(state, _FIXED_1Q[kind], qubits[0])
    if kind in _PHASE_1Q:
        state = state.copy()
        state[_axis_slice(rank, qubits[0], 1)] *= _PHASE_1Q[kind]
        return state
    if kind == "Rz":
        state = state.copy()
        state[_axis_slice(rank, qubits[0], 0)] *= np.exp(-1j * gate.angle / 2)
        state[_axis_slice(rank, qubits[0], 1)] *= np.exp(1j * gate.angle / 2)
        return state
    if kind == "CX":
        c, t = qubits
        state = state.copy()
        sub = state[_axis_slice(rank, c, 1)]
        t_shifted = t - 1 if t > c else t
        state[_axis_slice(rank, c, 1)] = np.flip(sub, axis=t_shifted).copy()
        return state
    if kind == "CZ":
        c, t = qubits
        state = state.copy()
        sl: list = [slice(None)] * rank
        sl[c] = 1
        sl[t] = 1
        state[tuple(sl)] *= -1
        return state
    if kind == "PauliRotation":
        theta = gate.angle
        rotated = _apply_pauli_string(state, gate.pauli.letters, qubits)
        if rotated is state:  # identity string: pure global phase
            return state * np.exp(-1j * theta / 2)
        return cos(theta / 2) * state - 1j * sin(theta / 2) * rotated
    raise InputDataError(f"sim: cannot apply gate kind {kind!r}")


def _apply_gate(state: np.ndarray, gate: Gate, controls: tuple[int, ...]) -> np.ndarray:
    if not controls:
        return _apply_gate_array(state, gate, gate.qubits)
    if len(controls) > 1:
        raise InputDataError(
            f"sim: control arity {len(controls)} is unsupported (maximum 1)"
        )
    c = controls[0]
    rank = state.ndim
    state = state.copy()
    shifted = tuple(q - 1 if q > c else q for q in gate.qubits)
    sub = state[_axis_slice(rank, c, 1)]
    state[_axis_slice(rank, c, 1)] = _apply_gate_array(sub, gate, shifted)
    return state


def run(
    graph: AlgorithmGraph,
    psi0: StateVector,
    width_cap: int = DEFAULT_WIDTH_CAP,
    gate_cap: int = DEFAULT_FLATTEN_CAP,
) -> StateVector:
    """Execute the graph on an initial state."""
    if graph.width != psi0.n:
        raise InputDataError(f"sim: graph width {graph.width} != state qubits {psi0.n}")
    if graph.width > width_cap:
        raise CapExceededError(f"sim: width {graph.width} exceeds cap {width_cap}")
    total = primitive_count(graph)
    if total > gate_cap:
        raise CapExceededError(f"sim: {total} primitive gates exceed cap {gate_cap}")

    state = psi0.amps.reshape([2] * graph.width).copy()

    def walk(definition: Definition, controls: tuple[int, ...]):
        nonlocal state
        for node in definition.body:
            if isinstance(node, Gate):
                state = _apply_gate(state, node, controls)
            else:
                merged = controls + node.controls
                callee = graph.definitions[node.target]
                for _ in range(node.repeat):
                    walk(callee, merged)

    walk(graph.root_definition(), ())
    return StateVector(graph.width, state.reshape(-1))


def replay_gates(gates: list[Gate], psi0: StateVector) -> StateVector:
    """Apply an already-flattened primitive gate list (flatten oracle)."""
    state = psi0.amps.reshape([2] * psi0.n).copy()
    for gate in gates:
        state = _apply_gate_array(state, gate, gate.qubits)
    return StateVector(psi0.n, state.reshape(-1))


# ---------------------------------------------------------------------------
# Spectral analyses.
# ---------------------------------------------------------------------------


def _hermitian_matrix(h: PauliSum, cap: int) -> np.ndarray:
    if h.n > cap:
        raise CapExceededError(f"sim: {h.n} qubits exceed the dense cap {cap}")
    if not h.is_hermitian():
        raise InputDataError("sim: Hamiltonian has non-real coefficients")
    matrix = to_matrix(h, qubit_cap=cap)
    return (matrix + matrix.conj().T) / 2


def eigendecompose(h: PauliSum, cap: int = DEFAULT_DENSE_CAP):
    """Eigenvalues (ascending) and eigenvectors of a Hermitian sum."""
    eigenvalues, eigenvectors = np.linalg.eigh(_hermitian_matrix(h, cap))
    return eigenvalues, eigenvectors


def exact_evolution(
    h: PauliSum, t: float, psi0: StateVector, cap: int = DEFAULT_DENSE_CAP
) -> StateVector:
    """Apply exp(-i H t) by eigendecomposition."""
    if psi0.n != h.n:
        raise InputDataError(f"sim: state on {psi0.n} qubits, Hamiltonian on {h.n}")
    eigenvalues, eigenvectors = eigendecompose(h, cap)
    phases = np.exp(-1j * eigenvalues * t)
    amps = eigenvectors @ (phases * (eigenvectors.conj().T @ psi0.amps))
    return StateVector(psi0.n, amps)


def qpe_kernel(delta: np.ndarray, m: int) -> np.ndarray:
    """|K_m(delta)|^2 = sin^2(2^m pi delta) / (2^{2m} sin^2(pi delta)).

    Periodic in delta with period 1; the removable singularity at integer
    delta evaluates to 1.
    """
    N = 2**m
    delta = np.asarray(delta, dtype=float)
    wrapped = delta - np.round(delta)
    out = np.empty_like(wrapped)
    tiny = np.abs(wrapped) < 1e-13
    out[tiny] = 1.0
    safe = ~tiny
    s = np.sin(np.pi * wrapped[safe])
    out[safe] = (np.sin(N * np.pi * wrapped[safe]) ** 2) / (N**2 * s**2)
    return out


def qpe_distribution_analytic(
    h: PauliSum,
    params,
    psi0: StateVector,
    cap: int = DEFAULT_DENSE_CAP,
) -> np.ndarray:
    """Exact textbook-QPE outcome distribution over 2^m phase values.

    ``params`` carries the phase-qubit count ``m``, evolution time ``t`` and
    energy ``shift`` (see :class:`hamlab.qpe.QpeParams`).
    """
    if psi0.n != h.n:
        raise InputDataError(f"sim: state on {psi0.n} qubits, Hamiltonian on {h.n}")
    eigenvalues, eigenvectors = eigendecompose(h, cap)
    thetas = ((eigenvalues + params.shift) * params.t / (2 * np.pi)) % 1.0
    weights = np.abs(eigenvectors.conj().T @ psi0.amps) ** 2
    N = 2**params.m
    ks = np.arange(N) / N
    distribution = np.zeros(N)
    for weight, theta in zip(weights, thetas):
        if weight < 1e-16:
            continue
        distribution += weight * qpe_kernel(theta - ks, params.m)
    return distribution
