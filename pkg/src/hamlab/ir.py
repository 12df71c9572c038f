"""Composite algorithm IR: a table of reusable definitions with call,
repeat and control modifiers.

Definitions can only reference previously inserted definitions, so the
reference structure is a DAG by construction; a repeated sub-circuit exists
once in the table no matter how many times (or how deeply) it is called.
Lowering and flattening live in :mod:`hamlab.lowering`, memoized counting in
:mod:`hamlab.resources`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InputDataError
from .pauli import PauliString

CLIFFORD_KINDS = ("H", "S", "Sdg", "X", "Y", "Z", "CX", "CZ")
T_KINDS = ("T", "Tdg")
GATE_KINDS = CLIFFORD_KINDS + T_KINDS + ("Rz", "PauliRotation")

_ARITY = {**{k: 1 for k in ("H", "S", "Sdg", "X", "Y", "Z", "T", "Tdg", "Rz")},
          "CX": 2, "CZ": 2}


@dataclass(frozen=True)
class Gate:
    """A primitive gate on explicit qubits.

    ``angle`` is set for Rz and PauliRotation; ``pauli`` only for
    PauliRotation, whose letters align with ``qubits`` (identity letters
    allowed). A PauliRotation implements exp(-i * angle/2 * P).
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    pauli: PauliString | None = None

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if self.kind not in GATE_KINDS:
            raise InputDataError(f"ir: unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise InputDataError(f"ir: duplicate qubits in {self.kind} {self.qubits}")
        if self.kind == "PauliRotation":
            if self.pauli is None or self.angle is None:
                raise InputDataError("ir: PauliRotation needs letters and an angle")
            if self.pauli.n != len(self.qubits):
                raise InputDataError(
                    f"ir: PauliRotation letters {self.pauli.letters!r} do not match "
                    f"{len(self.qubits)} qubits"
                )
        else:
            if self.kind == "Rz":
                if self.angle is None:
                    raise InputDataError("ir: Rz needs an angle")
            elif self.angle is not None:
                raise InputDataError(f"ir: {self.kind} takes no angle")
            if len(self.qubits) != _ARITY[self.kind]:
                raise InputDataError(
                    f"ir: {self.kind} expects {_ARITY[self.kind]} qubits, got {self.qubits}"
                )


@dataclass(frozen=True)
class Call:
    """Invoke a definition ``repeat`` times, optionally under controls."""

    target: str
    repeat: int = 1
    controls: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(self.controls))
        if self.repeat < 1:
            raise InputDataError(f"ir: repeat must be >= 1, got {self.repeat}")
        if len(set(self.controls)) != len(self.controls):
            raise InputDataError(f"ir: duplicate control qubits {self.controls}")


Node = Gate | Call


@dataclass(frozen=True)
class Definition:
    id: str
    body: tuple[Node, ...]


class AlgorithmGraph:
    """Definition table plus a designated root."""

    def __init__(self, width: int):
        if width < 1:
            raise InputDataError(f"ir: width must be >= 1, got {width}")
        self.width = width
        self.definitions: dict[str, Definition] = {}
        self.root: str | None = None
        self._footprints: dict[str, frozenset[int]] = {}

    def add_definition(self, body: list[Node] | tuple[Node, ...], name: str | None = None) -> str:
        """Insert a definition and return its id.

        Referenced definitions must already exist (this keeps the table a
        DAG); control qubits of each call must be disjoint from the callee's
        qubit footprint; all qubit indices must fit the width.
        """
        if name is None:
            name = f"def{len(self.definitions)}"
        if name in self.definitions:
            raise InputDataError(f"ir: duplicate definition id {name!r}")
        footprint: set[int] = set()
        for node in body:
            if isinstance(node, Gate):
                for q in node.qubits:
                    if not 0 <= q < self.width:
                        raise InputDataError(
                            f"ir: qubit {q} out of range for width {self.width}"
                        )
                footprint.update(node.qubits)
            else:
                if node.target == name:
                    raise InputDataError(f"ir: cycle: {name!r} calls itself")
                if node.target not in self.definitions:
                    raise InputDataError(f"ir: dangling reference to {node.target!r}")
                callee_footprint = self._footprints[node.target]
                overlap = callee_footprint.intersection(node.controls)
                if overlap:
                    raise InputDataError(
                        f"ir: controls {sorted(overlap)} overlap the footprint of "
                        f"{node.target!r}"
                    )
                for q in node.controls:
                    if not 0 <= q < self.width:
                        raise InputDataError(
                            f"ir: control qubit {q} out of range for width {self.width}"
                        )
                footprint.update(callee_footprint)
                footprint.update(node.controls)
        definition = Definition(name, tuple(body))
        self.definitions[name] = definition
        self._footprints[name] = frozenset(footprint)
        return name

    def set_root(self, name: str) -> None:
        if name not in self.definitions:
            raise InputDataError(f"ir: dangling root reference {name!r}")
        self.root = name

    def root_definition(self) -> Definition:
        if self.root is None:
            raise InputDataError("ir: graph has no root definition")
        return self.definitions[self.root]

    def footprint(self, name: str) -> frozenset[int]:
        return self._footprints[name]

    # -- canonical serialization (debugging and golden tests) ---------------

    def to_document(self) -> dict:
        def node_doc(node: Node) -> dict:
            if isinstance(node, Gate):
                doc: dict = {"gate": node.kind, "qubits": list(node.qubits)}
                if node.angle is not None:
                    doc["angle"] = node.angle
                if node.pauli is not None:
                    doc["letters"] = node.pauli.letters
                return doc
            return {
                "call": node.target,
                "repeat": node.repeat,
                "controls": list(node.controls),
            }

        return {
            "format_version": 1,
            "width": self.width,
            "root": self.root,
            "definitions": {
                name: [node_doc(n) for n in d.body]
                for name, d in sorted(self.definitions.items())
            },
        }

    def serialize(self) -> str:
        return json.dumps(self.to_document(), indent=2, sort_keys=True) + "\n"
