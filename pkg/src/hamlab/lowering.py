"""Lowering of IR gates to the Clifford+T+Rz primitive set, and flattening.

One table drives everything: resource counting classifies the lowered
primitives, :func:`flatten` emits them, and the simulator's nested executor
agrees with them gate-by-gate (controlled gates are applied exactly, which
coincides with these sequences up to a global phase in the one place --
controlled identity-string rotations -- where a phase-correction Rz stands
in for a controlled global phase).

Only control arities 0 and 1 are supported; every algorithm built by this
package stays within that. Controlled forms were verified against exact
controlled matrices (up to one global phase) in the test suite.
"""

from __future__ import annotations

from functools import lru_cache
from math import pi

from .errors import CapExceededError, InputDataError
from .ir import CLIFFORD_KINDS, AlgorithmGraph, Definition, Gate, T_KINDS
from .pauli import PauliString

DEFAULT_FLATTEN_CAP = 10**7

_BASIS_IN = {"X": ("H",), "Y": ("Sdg", "H")}
_BASIS_OUT = {"X": ("H",), "Y": ("H", "S")}


def _basis_changes(gate: Gate) -> tuple[list[Gate], list[Gate], list[int]]:
    """Per-qubit basis-in/out gates and the support qubits of a rotation."""
    before: list[Gate] = []
    after: list[Gate] = []
    support: list[int] = []
    for letter, qubit in zip(gate.pauli.letters, gate.qubits):
        if letter == "I":
            continue
        support.append(qubit)
        for kind in _BASIS_IN.get(letter, ()):
            before.append(Gate(kind, (qubit,)))
        for kind in _BASIS_OUT.get(letter, ()):
            after.append(Gate(kind, (qubit,)))
    return before, after, support


def _staircase(support: list[int]) -> list[Gate]:
    pivot = support[-1]
    return [Gate("CX", (q, pivot)) for q in support[:-1]]


def _controlled_rz(control: int, target: int, angle: float) -> list[Gate]:
    # Exact: no global-phase residue.
    return [
        Gate("Rz", (target,), angle=angle / 2),
        Gate("CX", (control, target)),
        Gate("Rz", (target,), angle=-angle / 2),
        Gate("CX", (control, target)),
    ]


def _ccx(c1: int, c2: int, t: int) -> list[Gate]:
    return [
        Gate("H", (t,)),
        Gate("CX", (c2, t)),
        Gate("Tdg", (t,)),
        Gate("CX", (c1, t)),
        Gate("T", (t,)),
        Gate("CX", (c2, t)),
        Gate("Tdg", (t,)),
        Gate("CX", (c1, t)),
        Gate("T", (c2,)),
        Gate("T", (t,)),
        Gate("H", (t,)),
        Gate("CX", (c1, c2)),
        Gate("T", (c1,)),
        Gate("Tdg", (c2,)),
        Gate("CX", (c1, c2)),
    ]


def lower_gate(gate: Gate, controls: tuple[int, ...] = ()) -> list[Gate]:
    """Primitive sequence implementing ``gate`` under the given controls."""
    if len(controls) == 0:
        if gate.kind != "PauliRotation":
            return [gate]
        before, after, support = _basis_changes(gate)
        if not support:
            return []  # pure global phase
        stairs = _staircase(support)
        core = [Gate("Rz", (support[-1],), angle=gate.angle)]
        return before + stairs + core + list(reversed(stairs)) + after
    if len(controls) > 1:
        raise InputDataError(
            f"ir: control arity {len(controls)} is unsupported (maximum 1)"
        )
    (c,) = controls
    kind = gate.kind
    if kind == "X":
        return [Gate("CX", (c, gate.qubits[0]))]
    if kind == "Z":
        return [Gate("CZ", (c, gate.qubits[0]))]
    if kind == "Y":
        t = gate.qubits[0]
        return [Gate("Sdg", (t,)), Gate("CX", (c, t)), Gate("S", (t,))]
    if kind == "H":
        t = gate.qubits[0]
        return [
            Gate("S", (t,)),
            Gate("H", (t,)),
            Gate("T", (t,)),
            Gate("CX", (c, t)),
            Gate("Tdg", (t,)),
            Gate("H", (t,)),
            Gate("Sdg", (t,)),
        ]
    if kind == "S":
        t = gate.qubits[0]
        return [
            Gate("T", (c,)),
            Gate("T", (t,)),
            Gate("CX", (c, t)),
            Gate("Tdg", (t,)),
            Gate("CX", (c, t)),
        ]
    if kind == "Sdg":
        t = gate.qubits[0]
        return [
            Gate("Tdg", (c,)),
            Gate("Tdg", (t,)),
            Gate("CX", (c, t)),
            Gate("T", (t,)),
            Gate("CX", (c, t)),
        ]
    if kind in ("T", "Tdg"):
        t = gate.qubits[0]
        eighth = pi / 8 if kind == "T" else -pi / 8
        return [
            Gate("Rz", (c,), angle=eighth),
            Gate("Rz", (t,), angle=eighth),
            Gate("CX", (c, t)),
            Gate("Rz", (t,), angle=-eighth),
            Gate("CX", (c, t)),
        ]
    if kind == "Rz":
        return _controlled_rz(c, gate.qubits[0], gate.angle)
    if kind == "CX":
        return _ccx(c, gate.qubits[0], gate.qubits[1])
    if kind == "CZ":
        t = gate.qubits[1]
        return [Gate("H", (t,))] + _ccx(c, gate.qubits[0], t) + [Gate("H", (t,))]
    if kind == "PauliRotation":
        before, after, support = _basis_changes(gate)
        if not support:
            # Controlled global phase: a phase-correction Rz on the control
            # (equal to the exact controlled phase up to a global factor).
            return [Gate("Rz", (c,), angle=-gate.angle / 2)]
        stairs = _staircase(support)
        core = _controlled_rz(c, support[-1], gate.angle)
        return before + stairs + core + list(reversed(stairs)) + after
    raise InputDataError(f"ir: cannot lower gate kind {kind!r}")


@lru_cache(maxsize=None)
def _counts_per_lowering(kind: str, letters: str | None, arity: int) -> tuple[int, int, int]:
    """(clifford, t, rotation) totals for one gate kind lowered at an arity.

    ``letters`` is only set for PauliRotation, whose cost depends on them.
    Counts are position-independent, so a synthetic gate on qubits 0..k-1
    with a control parked past them stands in for the real one.
    """
    if kind == "PauliRotation":
        gate = Gate("PauliRotation", tuple(range(len(letters))), angle=0.5,
                    pauli=PauliString(letters))
    elif kind == "Rz":
        gate = Gate("Rz", (0,), angle=0.5)
    elif kind in ("CX", "CZ"):
        gate = Gate(kind, (0, 1))
    else:
        gate = Gate(kind, (0,))
    controls = (len(gate.qubits),) if arity else ()
    clifford = t_count = rotations = 0
    for g in lower_gate(gate, controls):
        if g.kind in CLIFFORD_KINDS:
            clifford += 1
        elif g.kind in T_KINDS:
            t_count += 1
        else:
            rotations += 1
    return clifford, t_count, rotations


def gate_costs(gate: Gate, arity: int) -> tuple[int, int, int]:
    """(clifford, t, rotation) contribution of one gate at a control arity."""
    if arity > 1:
        raise InputDataError(f"ir: control arity {arity} is unsupported (maximum 1)")
    key = gate.pauli.letters if gate.kind == "PauliRotation" else None
    return _counts_per_lowering(gate.kind, key, arity)


def primitive_count(graph: AlgorithmGraph) -> int:
    """Total primitive gates the flattened graph would contain."""
    memo: dict[tuple[str, int], int] = {}

    def count_def(name: str, arity: int) -> int:
        key = (name, arity)
        if key not in memo:
            total = 0
            for node in graph.definitions[name].body:
                if isinstance(node, Gate):
                    total += sum(gate_costs(node, arity))
                else:
                    total += node.repeat * count_def(
                        node.target, arity + len(node.controls)
                    )
            memo[key] = total
        return memo[key]

    return count_def(graph.root_definition().id, 0)


def flatten(graph: AlgorithmGraph, gate_cap: int = DEFAULT_FLATTEN_CAP) -> list[Gate]:
    """Depth-first expansion into the primitive gate list.

    Calls are expanded, repeats unrolled, and controls distributed onto each
    gate through the lowering table. Raises when the result would exceed
    ``gate_cap``.
    """
    total = primitive_count(graph)
    if total > gate_cap:
        raise CapExceededError(
            f"ir: flattening would produce {total} gates, cap is {gate_cap}"
        )
    out: list[Gate] = []

    def walk(definition: Definition, controls: tuple[int, ...]):
        for node in definition.body:
            if isinstance(node, Gate):
                out.extend(lower_gate(node, controls))
            else:
                merged = controls + node.controls
                callee = graph.definitions[node.target]
                for _ in range(node.repeat):
                    walk(callee, merged)

    walk(graph.root_definition(), ())
    return out
