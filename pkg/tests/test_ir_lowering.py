"""IR construction rules, gate lowering exactness, flatten semantics."""

import numpy as np
import pytest
from conftest import (
    assert_equal_up_to_global_phase,
    controlled,
    gate_matrix,
    random_graph,
    unitary_from_gates,
    unitary_of_graph,
)

from hamlab.errors import CapExceededError, InputDataError
from hamlab.ir import AlgorithmGraph, Call, Gate
from hamlab.lowering import flatten, lower_gate, primitive_count
from hamlab.pauli import PauliString
from hamlab.resources import structural_counts


def test_self_reference_is_a_cycle_error():
    graph = AlgorithmGraph(width=2)
    with pytest.raises(InputDataError, match="cycle"):
        graph.add_definition([Call("loop")], name="loop")


def test_dangling_reference_rejected():
    graph = AlgorithmGraph(width=2)
    with pytest.raises(InputDataError, match="dangling"):
        graph.add_definition([Call("missing")])


def test_empty_body_is_identity():
    graph = AlgorithmGraph(width=1)
    name = graph.add_definition([])
    graph.set_root(name)
    assert flatten(graph) == []


def test_shared_subdefinition_is_legal():
    graph = AlgorithmGraph(width=1)
    shared = graph.add_definition([Gate("H", (0,))])
    a = graph.add_definition([Call(shared)])
    b = graph.add_definition([Call(shared), Call(a)])
    graph.set_root(b)
    assert len(flatten(graph)) == 2


def test_control_overlapping_footprint_rejected():
    graph = AlgorithmGraph(width=2)
    inner = graph.add_definition([Gate("H", (0,))])
    with pytest.raises(InputDataError, match="overlap"):
        graph.add_definition([Call(inner, controls=(0,))])


def test_qubit_out_of_range():
    graph = AlgorithmGraph(width=2)
    with pytest.raises(InputDataError, match="out of range"):
        graph.add_definition([Gate("H", (2,))])


def test_flatten_unrolls_repeats():
    graph = AlgorithmGraph(width=1)
    d = graph.add_definition([Gate("H", (0,))])
    root = graph.add_definition([Call(d, repeat=3)])
    graph.set_root(root)
    assert [g.kind for g in flatten(graph)] == ["H", "H", "H"]


def test_nested_repeats_multiply():
    graph = AlgorithmGraph(width=1)
    d = graph.add_definition([Gate("X", (0,))])
    inner = graph.add_definition([Call(d, repeat=2)])
    root = graph.add_definition([Call(inner, repeat=4)])
    graph.set_root(root)
    assert len(flatten(graph)) == 8


def test_flatten_cap():
    graph = AlgorithmGraph(width=1)
    d = graph.add_definition([Gate("H", (0,))])
    root = graph.add_definition([Call(d, repeat=2**40)])
    graph.set_root(root)
    assert primitive_count(graph) == 2**40
    with pytest.raises(CapExceededError):
        flatten(graph)


def test_serialization_order_independent():
    def build(order):
        graph = AlgorithmGraph(width=2)
        if order:
            graph.add_definition([Gate("H", (0,))], name="a")
            graph.add_definition([Gate("X", (1,))], name="b")
        else:
            graph.add_definition([Gate("X", (1,))], name="b")
            graph.add_definition([Gate("H", (0,))], name="a")
        root = graph.add_definition([Call("a"), Call("b")], name="root")
        graph.set_root(root)
        return graph.serialize()

    assert build(True) == build(False)


# ---------------------------------------------------------------------------
# Lowering exactness: every lowered sequence equals the exact (controlled)
# matrix up to one global phase.
# ---------------------------------------------------------------------------

SINGLE_KINDS = ["H", "S", "Sdg", "X", "Y", "Z", "T", "Tdg"]


@pytest.mark.parametrize("kind", SINGLE_KINDS)
def test_controlled_single_qubit_lowering(kind):
    lowered = lower_gate(Gate(kind, (1,)), controls=(0,))
    got = unitary_from_gates(lowered, 2)
    want = controlled(gate_matrix(Gate(kind, (0,)), 1))
    assert_equal_up_to_global_phase(got, want)


def test_controlled_rz_lowering_matches_table_and_matrix():
    lowered = lower_gate(Gate("Rz", (1,), angle=0.918273), controls=(0,))
    kinds = [g.kind for g in lowered]
    assert kinds.count("CX") == 2 and kinds.count("Rz") == 2
    got = unitary_from_gates(lowered, 2)
    want = controlled(gate_matrix(Gate("Rz", (0,), angle=0.918273), 1))
    assert_equal_up_to_global_phase(got, want)
    # this lowering is exact, not merely phase-equivalent
    assert np.max(np.abs(got - want)) < 1e-12


@pytest.mark.parametrize("kind", ["CX", "CZ"])
def test_controlled_two_qubit_lowering(kind):
    lowered = lower_gate(Gate(kind, (1, 2)), controls=(0,))
    got = unitary_from_gates(lowered, 3)
    want = controlled(gate_matrix(Gate(kind, (0, 1)), 2))
    assert_equal_up_to_global_phase(got, want)


@pytest.mark.parametrize("letters", ["Z", "X", "Y", "ZZ", "XY", "IZX", "YXZ"])
def test_pauli_rotation_lowering(letters):
    n = len(letters)
    gate = Gate("PauliRotation", tuple(range(n)), angle=0.7312, pauli=PauliString(letters))
    lowered = lower_gate(gate)
    got = unitary_from_gates(lowered, n)
    want = gate_matrix(gate, n)
    assert_equal_up_to_global_phase(got, want, tol=1e-10)


@pytest.mark.parametrize("letters", ["Z", "XY", "IZX"])
def test_controlled_pauli_rotation_lowering(letters):
    n = len(letters)
    gate = Gate(
        "PauliRotation", tuple(range(1, n + 1)), angle=1.234, pauli=PauliString(letters)
    )
    base = Gate("PauliRotation", tuple(range(n)), angle=1.234, pauli=PauliString(letters))
    lowered = lower_gate(gate, controls=(0,))
    got = unitary_from_gates(lowered, n + 1)
    want = controlled(gate_matrix(base, n))
    assert_equal_up_to_global_phase(got, want, tol=1e-10)


def test_identity_rotation_lowerings():
    gate = Gate("PauliRotation", (1,), angle=0.5, pauli=PauliString("I"))
    assert lower_gate(gate) == []
    lowered = lower_gate(gate, controls=(0,))
    assert [g.kind for g in lowered] == ["Rz"]
    assert lowered[0].qubits == (0,)
    # Rz(-theta/2) on the control equals the controlled phase up to global phase.
    got = unitary_from_gates(lowered, 2)
    want = np.diag([1, 1, np.exp(-0.25j), np.exp(-0.25j)])
    assert_equal_up_to_global_phase(got, want)


def test_multi_control_unsupported():
    with pytest.raises(InputDataError, match="arity"):
        lower_gate(Gate("H", (2,)), controls=(0, 1))


# ---------------------------------------------------------------------------
# Flatten vs structural counting and vs nested execution.
# ---------------------------------------------------------------------------


def classify(gates):
    from hamlab.ir import CLIFFORD_KINDS, T_KINDS

    clifford = sum(1 for g in gates if g.kind in CLIFFORD_KINDS)
    t = sum(1 for g in gates if g.kind in T_KINDS)
    r = sum(1 for g in gates if g.kind == "Rz")
    return clifford, t, r


@pytest.mark.parametrize("seed", range(25))
def test_flatten_counts_match_structural_counts(seed):
    rng = np.random.default_rng(seed)
    graph = random_graph(rng, width=3, n_defs=4)
    counts = structural_counts(graph)
    flat = flatten(graph)
    assert classify(flat) == (counts.clifford, counts.t_gates, counts.rotations)
    assert len(flat) == primitive_count(graph)


@pytest.mark.parametrize("seed", range(8))
def test_flatten_preserves_semantics(seed):
    rng = np.random.default_rng(100 + seed)
    graph = random_graph(rng, width=3, n_defs=3, max_body=4, max_repeat=2)
    nested = unitary_of_graph(graph)
    flat = unitary_from_gates(flatten(graph), graph.width)
    assert_equal_up_to_global_phase(flat, nested, tol=1e-9)


def test_controlled_call_distributes_to_callee():
    # Call with one control over [Rz] lowers to the controlled-Rz sequence.
    graph = AlgorithmGraph(width=2)
    inner = graph.add_definition([Gate("Rz", (1,), angle=0.4)])
    root = graph.add_definition([Call(inner, controls=(0,))])
    graph.set_root(root)
    flat = flatten(graph)
    assert [g.kind for g in flat] == ["Rz", "CX", "Rz", "CX"]
    want = controlled(gate_matrix(Gate("Rz", (0,), angle=0.4), 1))
    assert_equal_up_to_global_phase(unitary_from_gates(flat, 2), want)
