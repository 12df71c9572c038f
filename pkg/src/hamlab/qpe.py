"""Phase estimation and time evolution built on top of the Trotter encoder.

Phase convention: the estimated unitary is U = exp(-i H_shifted t) with
H_shifted = H + shift*I and shift = +lambda (the coefficient 1-norm), so
every shifted eigenvalue E_s lies in [0, 2*lambda] and its phase
theta = E_s t / (2 pi) lies in [0, 1). A measured phase-register integer k
estimates theta as k / 2^m, and the energy recovers as
E = 2 pi theta / t - shift. With this sign convention the phase-register
readout transform is the forward DFT (the conjugate of the usual
inverse-QFT closing a textbook circuit whose unitary has positive phases);
tests pin the circuit against the analytic kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, log2, pi
from typing import Callable

import numpy as np

from .errors import ConfigError, InputDataError
from .ir import AlgorithmGraph, Call, Gate
from .pauli import PauliSum, add_identity, coeff_one_norm
from .resources import ResourceCounts, SynthesisModel, count
from .trotter import (
    OrderingStrategy,
    TrotterPlan,
    build_trotter,
    derive_steps,
    plan_for_steps,
    step_body,
)

TIME_WINDOW_MARGIN = 1e-3
GRID_POINTS = 25
GRID_SPAN = 8.0

EncodingFactory = Callable[[PauliSum, float], TrotterPlan]


@dataclass(frozen=True)
class BudgetSplit:
    """Fractions of the energy-error budget for each error source."""

    trotter: float = 1 / 3
    discretization: float = 1 / 3
    synthesis: float = 1 / 3

    def __post_init__(self):
        parts = (self.trotter, self.discretization, self.synthesis)
        if any(p <= 0 for p in parts):
            raise ConfigError(f"qpe: budget split fractions must be > 0, got {parts}")
        if abs(sum(parts) - 1.0) > 1e-9:
            raise ConfigError(f"qpe: budget split must sum to 1, got {sum(parts)}")


@dataclass(frozen=True)
class QpeParams:
    """Resolved phase-estimation parameters."""

    m: int
    n_prec: int
    a_extra: int
    t: float
    shift: float
    energy_error: float
    failure_probability: float
    split: BudgetSplit = field(default_factory=BudgetSplit)

    def __post_init__(self):
        if self.m != self.n_prec + self.a_extra:
            raise InputDataError(
                f"qpe: m={self.m} != n_prec+a_extra={self.n_prec + self.a_extra}"
            )
        if not 0 < self.failure_probability < 1:
            raise InputDataError(
                f"qpe: failure probability must be in (0, 1), got {self.failure_probability}"
            )

    @property
    def trotter_operator_budget(self) -> float:
        return self.split.trotter * self.energy_error * self.t

    @property
    def discretization_energy_budget(self) -> float:
        return self.split.discretization * self.energy_error

    @property
    def synthesis_operator_budget(self) -> float:
        return self.split.synthesis * self.energy_error * self.t


def derive_time_naive(h: PauliSum) -> tuple[float, float]:
    """Naive evolution time and spectrum shift from the coefficient 1-norm.

    shift = +lambda puts the spectrum in [0, 2*lambda]; t = pi/(lambda*(1+mu))
    keeps every shifted eigenphase strictly inside [0, 1).
    """
    lam = coeff_one_norm(h)
    if lam <= 0:
        raise InputDataError("qpe: cannot derive a time window for a zero Hamiltonian")
    t = pi / (lam * (1 + TIME_WINDOW_MARGIN))
    return t, lam


def _ceil_log2(x: float) -> int:
    # Tolerate float dust just above an exact power of two.
    return ceil(log2(x) - 1e-9)


def derive_phase_qubits(t: float, energy_error: float, delta: float) -> tuple[int, int, int]:
    """Precision bits, confidence bits and their total for the phase register."""
    if t <= 0 or energy_error <= 0:
        raise InputDataError("qpe: time and energy error must be > 0")
    if not 0 < delta < 1:
        raise InputDataError(f"qpe: failure probability must be in (0, 1), got {delta}")
    n_prec = max(1, _ceil_log2(2 * pi / (t * energy_error)))
    a_extra = _ceil_log2(2 + 1 / (2 * delta))
    return n_prec, a_extra, n_prec + a_extra


# ---------------------------------------------------------------------------
# Circuit construction.
# ---------------------------------------------------------------------------


def qft_body(qubits: tuple[int, ...]) -> list[Gate]:
    """Forward DFT on the given register (first qubit = most significant bit).

    Controlled phases arrive pre-lowered to the CX+Rz form of the resource
    table; the residual global phase per controlled phase is unobservable.
    """
    m = len(qubits)
    body: list[Gate] = []
    for i in range(m):
        body.append(Gate("H", (qubits[i],)))
        for d in range(1, m - i):
            angle = 2 * pi / 2 ** (d + 1)
            control, target = qubits[i + d], qubits[i]
            body.append(Gate("Rz", (control,), angle=angle / 2))
            body.append(Gate("Rz", (target,), angle=angle / 2))
            body.append(Gate("CX", (control, target)))
            body.append(Gate("Rz", (target,), angle=-angle / 2))
            body.append(Gate("CX", (control, target)))
    for i in range(m // 2):
        a, b = qubits[i], qubits[m - 1 - i]
        body.append(Gate("CX", (a, b)))
        body.append(Gate("CX", (b, a)))
        body.append(Gate("CX", (a, b)))
    return body


def _qpe_graph(plan: TrotterPlan, m: int, n: int) -> AlgorithmGraph:
    graph = AlgorithmGraph(width=m + n)
    data = tuple(range(m, m + n))
    step = graph.add_definition(step_body(plan, data), name="u_step")
    qft = graph.add_definition(qft_body(tuple(range(m))), name="qft")
    body: list = [Gate("H", (j,)) for j in range(m)]
    for j in range(m):
        power = 2 ** (m - 1 - j)  # qubit j carries bit weight 2^(m-1-j)
        body.append(Call(step, repeat=plan.steps * power, controls=(j,)))
    body.append(Call(qft))
    root = graph.add_definition(body, name="qpe")
    graph.set_root(root)
    return graph


def build_qpe(h: PauliSum, params: QpeParams, encoding: EncodingFactory) -> AlgorithmGraph:
    """Textbook phase estimation over the encoded, shifted Hamiltonian.

    The definition table stays O(1) in m: one step definition, one DFT
    definition and the root; controlled powers are repeat-calls against the
    single step definition.
    """
    h_shifted = add_identity(h, params.shift)
    plan = encoding(h_shifted, params.t)
    return _qpe_graph(plan, params.m, h.n)


def build_time_evolution(
    h: PauliSum, t: float, controlled: bool, encoding: EncodingFactory
) -> AlgorithmGraph:
    """Pure or single-ancilla-controlled evolution under exp(-i H t)."""
    plan = encoding(h, t)
    if not controlled:
        return build_trotter(plan)
    graph = AlgorithmGraph(width=h.n + 1)
    data = tuple(range(1, h.n + 1))  # ancilla is qubit 0
    step = graph.add_definition(step_body(plan, data), name="trotter_step")
    evolution = graph.add_definition([Call(step, repeat=plan.steps)], name="evolution")
    root = graph.add_definition([Call(evolution, controls=(0,))], name="controlled_evolution")
    graph.set_root(root)
    return graph


# ---------------------------------------------------------------------------
# Evolution-time optimization.
# ---------------------------------------------------------------------------


def _candidate_times(t_naive: float) -> list[float]:
    grid = np.geomspace(t_naive / GRID_SPAN, t_naive * GRID_SPAN, GRID_POINTS)
    clipped = np.minimum(grid, t_naive)  # aliasing-safe window tops out at t_naive
    out: list[float] = []
    for t in clipped:
        if not out or abs(t - out[-1]) > 1e-15 * t_naive:
            out.append(float(t))
    return out


def optimize_time(
    h: PauliSum,
    energy_error: float,
    delta: float,
    split: BudgetSplit = BudgetSplit(),
    order: str | None = None,
    ordering: OrderingStrategy = OrderingStrategy(),
    synthesis: SynthesisModel = SynthesisModel(),
    steps: int | None = None,
    phase_qubits: int | None = None,
) -> QpeParams:
    """Pick the evolution time minimizing the lowered T-count.

    Evaluates a geometric grid of candidate times (clipped to the
    aliasing-safe window), fully deriving steps, phase qubits and resources
    for each; ties break toward the smaller time. Pinned ``steps`` or
    ``phase_qubits`` are honored at every candidate (only downstream
    quantities are re-derived).
    """
    if energy_error <= 0:
        raise InputDataError(f"qpe: energy error must be > 0, got {energy_error}")
    t_naive, shift = derive_time_naive(h)
    h_shifted = add_identity(h, shift)
    best: tuple[int, QpeParams] | None = None
    for t in _candidate_times(t_naive):
        if steps is not None:
            plan = plan_for_steps(
                h_shifted, t, steps, order=order or "first", ordering=ordering
            )
        else:
            plan = derive_steps(
                h_shifted, t, split.trotter * energy_error * t, order=order,
                ordering=ordering,
            )
        n_prec, a_extra, m = derive_phase_qubits(
            t, split.discretization * energy_error, delta
        )
        if phase_qubits is not None:
            m = phase_qubits
            n_prec = m - a_extra
            if n_prec < 1:
                raise InputDataError(
                    f"qpe: phase_qubits={m} leaves no precision bits after "
                    f"{a_extra} confidence bits"
                )
        graph = _qpe_graph(plan, m, h.n)
        resources = count(graph, synthesis, split.synthesis * energy_error * t)
        if best is None or resources.t_gates < best[0]:
            params = QpeParams(
                m=m,
                n_prec=n_prec,
                a_extra=a_extra,
                t=t,
                shift=shift,
                energy_error=energy_error,
                failure_probability=delta,
                split=split,
            )
            best = (resources.t_gates, params)
    return best[1]
