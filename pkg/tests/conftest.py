"""Shared oracles: dense matrices built from first principles."""

import numpy as np
import pytest

from hamlab.ir import AlgorithmGraph, Call, Gate
from hamlab.pauli import PauliString, string_matrix
from hamlab.simulator import StateVector, basis_state, replay_gates, run

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j]).astype(complex)
T = np.diag([1, np.exp(1j * np.pi / 4)])

GATE_MATRICES = {
    "H": H, "S": S, "Sdg": S.conj().T, "X": X, "Y": Y, "Z": Z,
    "T": T, "Tdg": T.conj().T,
}


def rz_matrix(theta):
    return np.diag([np.exp(-1j * theta / 2), np.exp(1j * theta / 2)])


def embed(matrix, qubits, n):
    """Expand a k-qubit matrix acting on `qubits` to the full n-qubit space."""
    k = len(qubits)
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    others = [q for q in range(n) if q not in qubits]
    for col in range(dim):
        col_bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        col_sub = 0
        for q in qubits:
            col_sub = (col_sub << 1) | col_bits[q]
        for row_sub in range(2**k):
            amp = matrix[row_sub, col_sub]
            if amp == 0:
                continue
            row_bits = list(col_bits)
            for idx, q in enumerate(qubits):
                row_bits[q] = (row_sub >> (k - 1 - idx)) & 1
            row = 0
            for b in row_bits:
                row = (row << 1) | b
            out[row, col] += amp
    return out


def gate_matrix(gate: Gate, n: int) -> np.ndarray:
    if gate.kind == "Rz":
        base = rz_matrix(gate.angle)
    elif gate.kind == "PauliRotation":
        p = string_matrix(gate.pauli)
        dim = p.shape[0]
        base = np.cos(gate.angle / 2) * np.eye(dim) - 1j * np.sin(gate.angle / 2) * p
    elif gate.kind in ("CX", "CZ"):
        target = X if gate.kind == "CX" else Z
        base = np.eye(4, dtype=complex)
        base[2:, 2:] = target
    else:
        base = GATE_MATRICES[gate.kind]
    return embed(base, gate.qubits, n)


def controlled(matrix: np.ndarray) -> np.ndarray:
    """Exact controlled version with the control as the leading qubit."""
    dim = matrix.shape[0]
    out = np.eye(2 * dim, dtype=complex)
    out[dim:, dim:] = matrix
    return out


def unitary_from_gates(gates, n) -> np.ndarray:
    cols = [replay_gates(gates, basis_state(n, j)).amps for j in range(2**n)]
    return np.array(cols).T


def unitary_of_graph(graph: AlgorithmGraph) -> np.ndarray:
    n = graph.width
    cols = [run(graph, basis_state(n, j)).amps for j in range(2**n)]
    return np.array(cols).T


def assert_equal_up_to_global_phase(got, want, tol=1e-9):
    idx = np.unravel_index(np.argmax(np.abs(want)), want.shape)
    assert abs(want[idx]) > 1e-12
    phase = got[idx] / want[idx]
    assert abs(abs(phase) - 1) < tol
    assert np.max(np.abs(got - phase * want)) < tol


def random_state(rng, n) -> StateVector:
    amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return StateVector(n, amps / np.linalg.norm(amps))


def random_graph(rng, width=3, n_defs=4, max_body=6, max_repeat=4, allow_controls=True):
    """Random DAG of definitions over a small gate alphabet."""
    graph = AlgorithmGraph(width)
    names = []
    for d in range(n_defs):
        body = []
        for _ in range(rng.integers(1, max_body + 1)):
            if names and rng.random() < 0.35:
                target = names[rng.integers(0, len(names))]
                free = sorted(set(range(width)) - set(graph.footprint(target)))
                controls = ()
                if allow_controls and free and rng.random() < 0.5:
                    controls = (int(rng.choice(free)),)
                body.append(
                    Call(target, repeat=int(rng.integers(1, max_repeat + 1)), controls=controls)
                )
            else:
                kind = rng.choice(["H", "S", "X", "Z", "T", "Rz", "CX", "CZ", "PauliRotation"])
                if kind in ("CX", "CZ"):
                    q = rng.choice(width, size=2, replace=False)
                    body.append(Gate(kind, (int(q[0]), int(q[1]))))
                elif kind == "Rz":
                    body.append(
                        Gate("Rz", (int(rng.integers(0, width)),), angle=float(rng.uniform(0, 2)))
                    )
                elif kind == "PauliRotation":
                    k = int(rng.integers(1, width + 1))
                    qubits = tuple(int(x) for x in rng.choice(width, size=k, replace=False))
                    letters = "".join(rng.choice(list("IXYZ"), size=k))
                    body.append(
                        Gate(
                            "PauliRotation",
                            qubits,
                            angle=float(rng.uniform(0, 2)),
                            pauli=PauliString(letters),
                        )
                    )
                else:
                    body.append(Gate(kind, (int(rng.integers(0, width)),)))
        names.append(graph.add_definition(body))
    graph.set_root(names[-1])
    return graph
