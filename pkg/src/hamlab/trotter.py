"""Product-formula encoding of exp(-i H t) with bound-driven step counts.

Error bounds are the tight first- and second-order commutator-scaling
bounds, evaluated by exact Pauli algebra: every (nested) commutator is
computed as a PauliSum (so cancellations count) and its spectral norm is
upper-bounded by the coefficient 1-norm. With tail sums
T_g = sum_{g' > g} H_g' over the chosen term order,

    first order:   (t^2 / 2r) * sum_g ||[T_g, H_g]||
    second order:  (t^3 / r^2) * ( (1/12) sum_g ||[T_g, [T_g, H_g]]||
                                 + (1/24) sum_g ||[H_g, [H_g, T_g]]|| )

Both are sound upper bounds on ||exp(-iHt) - S(t)^r|| in spectral norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, sqrt

import numpy as np

from .errors import CapExceededError, ConfigError, InputDataError
from .ir import AlgorithmGraph, Call, Gate
from .pauli import PauliString, PauliSum, PauliTerm

DEFAULT_SECOND_ORDER_TERM_CAP = 2000

ORDERS = ("first", "second")
ORDERING_KINDS = ("as_given", "lexicographic", "magnitude_descending", "random", "custom")

# Letter-pair commutator phases: [A, B] = 2*phase*(A B) when strings anticommute.
_MUL_PHASE = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


@dataclass(frozen=True)
class OrderingStrategy:
    """How to permute Hamiltonian terms inside a Trotter step.

    ``random`` permutes with numpy's PCG64 generator seeded by ``seed`` (a
    named, reproducible, splittable family); ``custom`` applies an explicit
    permutation of term indices.
    """

    kind: str = "as_given"
    seed: int | None = None
    permutation: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ORDERING_KINDS:
            raise ConfigError(f"trotter: unknown ordering kind {self.kind!r}")
        if self.kind == "random" and self.seed is None:
            raise ConfigError("trotter: random ordering requires a seed")
        if self.kind == "custom" and self.permutation is None:
            raise ConfigError("trotter: custom ordering requires a permutation")


def apply_ordering(h: PauliSum, strategy: OrderingStrategy) -> PauliSum:
    """Return ``h`` with its terms permuted per the strategy (deterministic)."""
    terms = list(h.terms)
    if strategy.kind == "as_given":
        ordered = terms
    elif strategy.kind == "lexicographic":
        ordered = sorted(terms, key=lambda t: t.string.letters)
    elif strategy.kind == "magnitude_descending":
        ordered = sorted(terms, key=lambda t: (-abs(t.coeff), t.string.letters))
    elif strategy.kind == "random":
        rng = np.random.default_rng(strategy.seed)
        ordered = [terms[i] for i in rng.permutation(len(terms))]
    else:
        perm = strategy.permutation
        if sorted(perm) != list(range(len(terms))):
            raise InputDataError(
                "trotter: custom permutation is not a bijection on term indices"
            )
        ordered = [terms[i] for i in perm]
    return PauliSum(h.n, tuple(ordered))


@dataclass(frozen=True)
class TrotterPlan:
    """A fully resolved product-formula choice for one Hamiltonian."""

    n: int
    order: str
    steps: int
    time: float
    ordering: OrderingStrategy
    error_bound: float
    term_sequence: tuple[PauliTerm, ...]


# ---------------------------------------------------------------------------
# Bound evaluation. Sparse dict algebra over (letters -> coefficient).
# ---------------------------------------------------------------------------


def _check_bound_input(h: PauliSum, t: float, r: int):
    if t <= 0:
        raise InputDataError(f"trotter: time must be > 0, got {t}")
    if r < 1:
        raise InputDataError(f"trotter: steps must be >= 1, got {r}")
    strings = [term.string.letters for term in h.terms]
    if len(strings) != len(set(strings)):
        raise InputDataError("trotter: Hamiltonian has duplicate strings; simplify first")
    if not h.is_hermitian():
        raise InputDataError("trotter: Hamiltonian has non-real coefficients")


def _pair_commutator(c1: complex, s1: str, c2: complex, s2: str):
    """[c1 s1, c2 s2] as (coeff, letters), or None when the strings commute."""
    phase = 1 + 0j
    out = []
    clashes = 0
    for a, b in zip(s1, s2):
        p, c = _MUL_PHASE[(a, b)]
        phase *= p
        out.append(c)
        if a != "I" and b != "I" and a != b:
            clashes += 1
    if clashes % 2 == 0:
        return None
    return 2 * phase * c1 * c2, "".join(out)


def _commutator_with_sum(acc: dict[str, complex], c: complex, s: str) -> dict[str, complex]:
    """[sum, c*s] with exact cancellation."""
    out: dict[str, complex] = {}
    for s1, c1 in acc.items():
        pair = _pair_commutator(c1, s1, c, s)
        if pair is not None:
            coeff, letters = pair
            out[letters] = out.get(letters, 0j) + coeff
    return {k: v for k, v in out.items() if abs(v) > 1e-15}


def _one_norm(acc: dict[str, complex]) -> float:
    return float(sum(abs(v) for v in acc.values()))


def _first_order_commutator_sum(h: PauliSum) -> float:
    """sum_g ||[T_g, H_g]|| over descending tails."""
    total = 0.0
    tail: dict[str, complex] = {}
    for term in reversed(h.terms):
        total += _one_norm(_commutator_with_sum(tail, term.coeff, term.string.letters))
        tail[term.string.letters] = tail.get(term.string.letters, 0j) + term.coeff
    return total


def _second_order_commutator_sums(h: PauliSum) -> tuple[float, float]:
    """(sum ||[T,[T,H]]||, sum ||[H,[H,T]]||) over descending tails."""
    sum_a = 0.0
    sum_b = 0.0
    tail: dict[str, complex] = {}
    for term in reversed(h.terms):
        c, s = term.coeff, term.string.letters
        inner = _commutator_with_sum(tail, c, s)  # [T_g, H_g]
        outer_a: dict[str, complex] = {}
        outer_b: dict[str, complex] = {}
        for s_inner, c_inner in inner.items():
            for s_tail, c_tail in tail.items():  # [T_g, inner]
                pair = _pair_commutator(c_tail, s_tail, c_inner, s_inner)
                if pair is not None:
                    coeff, letters = pair
                    outer_a[letters] = outer_a.get(letters, 0j) + coeff
            pair = _pair_commutator(c, s, c_inner, s_inner)  # [H_g, inner]
            if pair is not None:
                coeff, letters = pair
                outer_b[letters] = outer_b.get(letters, 0j) + coeff
        sum_a += _one_norm({k: v for k, v in outer_a.items() if abs(v) > 1e-15})
        sum_b += _one_norm({k: v for k, v in outer_b.items() if abs(v) > 1e-15})
        tail[s] = tail.get(s, 0j) + c
    return sum_a, sum_b


def bound_first_order(h: PauliSum, t: float, r: int) -> float:
    """Sound upper bound on the first-order Trotter error at r steps."""
    _check_bound_input(h, t, r)
    return (t**2 / (2 * r)) * _first_order_commutator_sum(h)


def bound_second_order(
    h: PauliSum, t: float, r: int, term_cap: int = DEFAULT_SECOND_ORDER_TERM_CAP
) -> float:
    """Sound upper bound on the second-order (symmetrized) Trotter error."""
    _check_bound_input(h, t, r)
    if len(h.terms) > term_cap:
        raise CapExceededError(
            f"trotter: {len(h.terms)} terms exceed the second-order cap {term_cap}"
        )
    sum_a, sum_b = _second_order_commutator_sums(h)
    return (t**3 / r**2) * (sum_a / 12 + sum_b / 24)


def _minimal_steps(coefficient: float, inverse_power: int, budget: float) -> int:
    """Smallest integer r with coefficient / r^inverse_power <= budget."""
    if coefficient <= 0:
        return 1
    if inverse_power == 1:
        r = max(1, ceil(coefficient / budget))
    else:
        r = max(1, ceil(sqrt(coefficient / budget)))
    while coefficient / r**inverse_power > budget:
        r += 1
    while r > 1 and coefficient / (r - 1) ** inverse_power <= budget:
        r -= 1
    return r


def derive_steps(
    h: PauliSum,
    t: float,
    budget: float,
    order: str | None = None,
    ordering: OrderingStrategy = OrderingStrategy(),
    term_cap: int = DEFAULT_SECOND_ORDER_TERM_CAP,
) -> TrotterPlan:
    """Choose the smallest step count whose bound fits the budget.

    With ``order=None`` both orders are derived and the one with fewer
    per-evolution rotations wins (second-order steps cost two sweeps), which
    under the equal-split synthesis model is also the smaller lowered
    T-count; ties go to first order.
    """
    if budget <= 0:
        raise InputDataError(f"trotter: error budget must be > 0, got {budget}")
    if order is not None and order not in ORDERS:
        raise ConfigError(f"trotter: unknown order {order!r}")
    ordered = apply_ordering(h, ordering)
    _check_bound_input(ordered, t, 1)

    candidates: dict[str, tuple[int, float]] = {}
    if order in (None, "first"):
        A = (t**2 / 2) * _first_order_commutator_sum(ordered)
        r1 = _minimal_steps(A, 1, budget)
        candidates["first"] = (r1, A / r1 if A > 0 else 0.0)
    if order in (None, "second"):
        if len(ordered.terms) > term_cap:
            if order == "second":
                raise CapExceededError(
                    f"trotter: {len(ordered.terms)} terms exceed the second-order cap"
                )
            # order=None beyond the cap: silently restrict to first order.
        else:
            sum_a, sum_b = _second_order_commutator_sums(ordered)
            B = t**3 * (sum_a / 12 + sum_b / 24)
            r2 = _minimal_steps(B, 2, budget)
            candidates["second"] = (r2, B / r2**2 if B > 0 else 0.0)

    if order is None:
        sweeps = {"first": 1, "second": 2}
        order = min(
            candidates,
            key=lambda k: (candidates[k][0] * sweeps[k] * len(ordered.terms), sweeps[k]),
        )
    steps, achieved = candidates[order]
    return TrotterPlan(
        n=h.n,
        order=order,
        steps=steps,
        time=t,
        ordering=ordering,
        error_bound=achieved,
        term_sequence=ordered.terms,
    )


def plan_for_steps(
    h: PauliSum,
    t: float,
    steps: int,
    order: str = "first",
    ordering: OrderingStrategy = OrderingStrategy(),
    term_cap: int = DEFAULT_SECOND_ORDER_TERM_CAP,
) -> TrotterPlan:
    """Plan with a pinned step count; the bound is evaluated, not enforced."""
    if order not in ORDERS:
        raise ConfigError(f"trotter: unknown order {order!r}")
    ordered = apply_ordering(h, ordering)
    if order == "first":
        achieved = bound_first_order(ordered, t, steps)
    else:
        achieved = bound_second_order(ordered, t, steps, term_cap=term_cap)
    return TrotterPlan(
        n=h.n,
        order=order,
        steps=steps,
        time=t,
        ordering=ordering,
        error_bound=achieved,
        term_sequence=ordered.terms,
    )


# ---------------------------------------------------------------------------
# Circuit emission.
# ---------------------------------------------------------------------------


def step_body(plan: TrotterPlan, data_qubits: tuple[int, ...] | None = None) -> list[Gate]:
    """Gates of one Trotter step on the given data qubits.

    First order sweeps the term sequence once with angle 2 c t / r per
    term; second order sweeps half-angles forward then reversed.
    """
    if data_qubits is None:
        data_qubits = tuple(range(plan.n))
    tau = plan.time / plan.steps

    def rotation(term: PauliTerm, dt: float) -> Gate:
        return Gate(
            "PauliRotation",
            data_qubits,
            angle=2 * term.coeff.real * dt,
            pauli=term.string,
        )

    if plan.order == "first":
        return [rotation(term, tau) for term in plan.term_sequence]
    forward = [rotation(term, tau / 2) for term in plan.term_sequence]
    backward = [rotation(term, tau / 2) for term in reversed(plan.term_sequence)]
    return forward + backward


def build_trotter(plan: TrotterPlan) -> AlgorithmGraph:
    """Graph computing exp(-i H t): one step definition under a repeat node."""
    graph = AlgorithmGraph(width=plan.n)
    step = graph.add_definition(step_body(plan), name="trotter_step")
    root = graph.add_definition([Call(step, repeat=plan.steps)], name="evolution")
    graph.set_root(root)
    return graph
