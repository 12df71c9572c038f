"""Memoized Clifford+T resource estimation over algorithm graphs.

Each (definition, control-arity) pair is analyzed exactly once and reused,
so a call repeated 2^40 times costs one analysis. Counts are plain Python
integers and never overflow. Rotation synthesis uses an explicit affine
cost model (T-count per Rz of ceil(a + b*log2(1/eps))) with the synthesis
budget split equally across rotation instances.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log2

from .errors import InputDataError
from .ir import AlgorithmGraph, Call, Gate
from .lowering import gate_costs


@dataclass(frozen=True)
class ResourceCounts:
    """Gate and qubit totals; rotations are the pre-synthesis Rz count."""

    clifford: int
    t_gates: int
    rotations: int
    qubits: int

    def combined(self, other: "ResourceCounts") -> "ResourceCounts":
        return ResourceCounts(
            self.clifford + other.clifford,
            self.t_gates + other.t_gates,
            self.rotations + other.rotations,
            max(self.qubits, other.qubits),
        )

    def scaled(self, factor: int) -> "ResourceCounts":
        return ResourceCounts(
            self.clifford * factor,
            self.t_gates * factor,
            self.rotations * factor,
            self.qubits,
        )

    @property
    def total_gates(self) -> int:
        return self.clifford + self.t_gates + self.rotations


@dataclass(frozen=True)
class SynthesisModel:
    """T-cost of approximating one Rz at tolerance eps: ceil(a + b*log2(1/eps))."""

    a: int = 10
    b: float = 4.0

    def t_per_rotation(self, eps: float) -> int:
        if eps <= 0:
            raise InputDataError(f"resources: synthesis tolerance must be > 0, got {eps}")
        return max(0, ceil(self.a + self.b * log2(1.0 / eps)))


class ResourceCounter:
    """Structural counter with an instrumentation hook.

    ``definition_analyses`` counts cache fills, i.e. the number of distinct
    (definition, control-arity) pairs actually analyzed.
    """

    def __init__(self, graph: AlgorithmGraph):
        self.graph = graph
        self.definition_analyses = 0
        self._memo: dict[tuple[str, int], tuple[int, int, int]] = {}

    def _analyze(self, name: str, arity: int) -> tuple[int, int, int]:
        key = (name, arity)
        cached = self._memo.get(key)
        if cached is not None:
            return cached
        self.definition_analyses += 1
        clifford = t_gates = rotations = 0
        for node in self.graph.definitions[name].body:
            if isinstance(node, Gate):
                c, t, r = gate_costs(node, arity)
            else:
                c, t, r = self._analyze(node.target, arity + len(node.controls))
                c, t, r = c * node.repeat, t * node.repeat, r * node.repeat
            clifford += c
            t_gates += t
            rotations += r
        self._memo[key] = (clifford, t_gates, rotations)
        return self._memo[key]

    def structural_counts(self) -> ResourceCounts:
        c, t, r = self._analyze(self.graph.root_definition().id, 0)
        return ResourceCounts(c, t, r, self.graph.width)


def structural_counts(graph: AlgorithmGraph) -> ResourceCounts:
    """Pre-synthesis counts (rotations left as rotations)."""
    return ResourceCounter(graph).structural_counts()


def count(
    graph: AlgorithmGraph,
    model: SynthesisModel | None = None,
    synthesis_error: float | None = None,
) -> ResourceCounts:
    """Full resource estimate.

    With a synthesis budget, every rotation is charged the model's T-cost at
    the per-rotation tolerance ``synthesis_error / rotations``; the rotation
    count itself stays in the result for reference.
    """
    counts = structural_counts(graph)
    if synthesis_error is None or counts.rotations == 0:
        return counts
    model = model or SynthesisModel()
    per_rotation_eps = synthesis_error / counts.rotations
    synthesized = counts.rotations * model.t_per_rotation(per_rotation_eps)
    return ResourceCounts(
        counts.clifford, counts.t_gates + synthesized, counts.rotations, counts.qubits
    )


def definition_applications(graph: AlgorithmGraph, target: str) -> int:
    """How many times a definition's body executes in one run of the graph."""
    memo: dict[str, int] = {}

    def applications(name: str) -> int:
        if name == target:
            return 1
        if name not in memo:
            total = 0
            for node in graph.definitions[name].body:
                if isinstance(node, Call):
                    total += node.repeat * applications(node.target)
            memo[name] = total
        return memo[name]

    return applications(graph.root_definition().id)
