"""Phase-estimation parameter derivation and circuit structure."""

import numpy as np
import pytest
from conftest import random_state

from hamlab.errors import InputDataError
from hamlab.ir import Call, Gate
from hamlab.pauli import PauliSum, add_identity, coeff_one_norm, random_hermitian_sum, term
from hamlab.qpe import (
    BudgetSplit,
    QpeParams,
    build_qpe,
    build_time_evolution,
    derive_phase_qubits,
    derive_time_naive,
    optimize_time,
)
from hamlab.resources import count, definition_applications, SynthesisModel
from hamlab.simulator import (
    StateVector,
    basis_state,
    eigendecompose,
    exact_evolution,
    fidelity,
    qpe_distribution_analytic,
    run,
)
from hamlab.spin_models import SpinModelSpec, generate
from hamlab.trotter import OrderingStrategy, derive_steps, plan_for_steps


def exact_encoding(h, t):
    return plan_for_steps(h, t, steps=1, order="first")


def test_derive_time_naive_window():
    h = PauliSum.from_terms([term(1.0, "Z")])
    t, shift = derive_time_naive(h)
    assert shift == 1.0
    assert t == pytest.approx(np.pi / 1.001)
    h2 = PauliSum.from_terms([term(0.5, "X"), term(0.5, "Z")])
    t2, shift2 = derive_time_naive(h2)
    assert (t2, shift2) == (pytest.approx(np.pi / 1.001), 1.0)


def test_derive_time_naive_rejects_zero():
    with pytest.raises(InputDataError):
        derive_time_naive(PauliSum(2, ()))


@pytest.mark.parametrize("seed", range(10))
def test_aliasing_safety(seed):
    rng = np.random.default_rng(500 + seed)
    h = random_hermitian_sum(rng, int(rng.integers(1, 5)), int(rng.integers(1, 8)))
    if not len(h.terms):
        return
    t, shift = derive_time_naive(h)
    values, _ = eigendecompose(add_identity(h, shift))
    thetas = values * t / (2 * np.pi)
    assert np.all(thetas >= -1e-12)
    assert np.all(thetas < 1.0)


def test_derive_phase_qubits_exact_powers():
    n_prec, a_extra, m = derive_phase_qubits(1.0, 2 * np.pi / 16, 0.25)
    assert (n_prec, a_extra, m) == (4, 2, 6)


def test_derive_phase_qubits_generic():
    n_prec, a_extra, m = derive_phase_qubits(1.0, 0.01, 0.1)
    assert (n_prec, a_extra, m) == (10, 3, 13)


def test_halving_error_adds_one_bit():
    base = derive_phase_qubits(1.0, 2 * np.pi / 16, 0.25)[0]
    finer = derive_phase_qubits(1.0, 2 * np.pi / 32, 0.25)[0]
    assert finer == base + 1


def test_budget_split_validation():
    with pytest.raises(Exception):
        BudgetSplit(0.5, 0.5, 0.5)
    split = BudgetSplit()
    assert split.trotter == pytest.approx(1 / 3)


def params_with(h, m=4, n_prec=3, a_extra=1, delta=0.25):
    t, shift = derive_time_naive(h)
    return QpeParams(
        m=m, n_prec=n_prec, a_extra=a_extra, t=t, shift=shift,
        energy_error=0.1, failure_probability=delta,
    )


def test_qpe_definition_table_is_constant_size():
    h = generate(SpinModelSpec("xxz_chain", 3, {"J": 1.0, "delta": 0.5}))
    sizes = []
    for m in (2, 4, 6):
        params = params_with(h, m=m, n_prec=m - 1)
        graph = build_qpe(h, params, exact_encoding)
        sizes.append(len(graph.definitions))
    assert sizes == [3, 3, 3]


def test_qpe_total_controlled_applications():
    h = generate(SpinModelSpec("xxz_chain", 3, {"J": 1.0, "delta": 0.5}))
    for m in (2, 3, 5):
        params = params_with(h, m=m, n_prec=m - 1)
        plan_steps = 3
        graph = build_qpe(
            h, params, lambda hs, tt: plan_for_steps(hs, tt, steps=plan_steps)
        )
        assert definition_applications(graph, "u_step") == plan_steps * (2**m - 1)
        controlled_calls = [
            node
            for node in graph.definitions["qpe"].body
            if isinstance(node, Call) and node.controls
        ]
        assert sum(c.repeat for c in controlled_calls) == plan_steps * (2**m - 1)


def test_qpe_hadamard_test_structure_m1():
    h = PauliSum.from_terms([term(0.8, "Z")])
    params = QpeParams(
        m=1, n_prec=1, a_extra=0, t=1.0, shift=0.8,
        energy_error=0.5, failure_probability=0.4,
    )
    graph = build_qpe(h, params, exact_encoding)
    body = graph.definitions["qpe"].body
    assert body[0] == Gate("H", (0,))
    assert isinstance(body[1], Call) and body[1].controls == (0,)
    # m=1 DFT is a single Hadamard
    assert [g.kind for g in graph.definitions["qft"].body] == ["H"]


def test_qpe_circuit_matches_analytic_distribution():
    # n=1, m=4, commuting Hamiltonian so one Trotter step is exact.
    h = PauliSum.from_terms([term(0.37, "Z"), term(0.13, "I")])
    params = params_with(h, m=4, n_prec=3, a_extra=1)
    graph = build_qpe(h, params, exact_encoding)
    rng = np.random.default_rng(42)
    data = random_state(rng, 1)
    full = np.zeros(2**5, dtype=complex)
    full[: 2] = data.amps
    out = run(graph, StateVector(5, full))
    marginal = (np.abs(out.amps) ** 2).reshape(16, 2).sum(axis=1)
    analytic = qpe_distribution_analytic(h, params, data)
    assert 0.5 * np.abs(marginal - analytic).sum() < 1e-9


def test_eigenvalue_recovery():
    rng = np.random.default_rng(6)
    for n in (2, 3, 4):
        h = random_hermitian_sum(rng, n, 4)
        if len(h.terms) < 2:
            continue
        t, shift = derive_time_naive(h)
        params = QpeParams(
            m=8, n_prec=7, a_extra=1, t=t, shift=shift,
            energy_error=0.1, failure_probability=0.25,
        )
        values, vectors = eigendecompose(h)
        j = int(rng.integers(0, len(values)))
        eigenstate = StateVector(n, vectors[:, j])
        dist = qpe_distribution_analytic(h, params, eigenstate)
        k = int(np.argmax(dist))
        theta_hat = k / 2**params.m
        # compare on the circle: candidate energies differ by full turns
        candidates = [
            2 * np.pi * (theta_hat + wrap) / t - shift for wrap in (-1, 0, 1)
        ]
        error = min(abs(c - values[j]) for c in candidates)
        half_bin = 2 ** (-params.m - 1) * 2 * np.pi / t
        assert error <= half_bin + 1e-12


@pytest.mark.parametrize("delta", [0.5, 0.25, 0.1])
def test_success_mass_in_half_bin_window(delta):
    rng = np.random.default_rng(int(delta * 1000))
    for _ in range(8):
        n = int(rng.integers(1, 4))
        h = random_hermitian_sum(rng, n, int(rng.integers(2, 7)))
        if not len(h.terms):
            continue
        t, shift = derive_time_naive(h)
        n_prec = int(rng.integers(2, 5))
        a_extra = derive_phase_qubits(t, 2 * np.pi / (t * 2**n_prec), delta)[1]
        m = n_prec + a_extra
        params = QpeParams(
            m=m, n_prec=n_prec, a_extra=a_extra, t=t, shift=shift,
            energy_error=0.1, failure_probability=delta,
        )
        values, vectors = eigendecompose(h)
        j = int(rng.integers(0, len(values)))
        dist = qpe_distribution_analytic(h, params, StateVector(n, vectors[:, j]))
        theta = ((values[j] + shift) * t / (2 * np.pi)) % 1.0
        ks = np.arange(2**m) / 2**m
        circular = np.abs(ks - theta)
        circular = np.minimum(circular, 1 - circular)
        mass = dist[circular <= 2 ** (-n_prec - 1) + 1e-15].sum()
        assert mass >= 1 - delta


def test_pure_evolution_matches_exact():
    h = generate(SpinModelSpec("xxz_chain", 3, {"J": 1.0, "delta": 0.5}))
    rng = np.random.default_rng(9)
    psi = random_state(rng, 3)
    graph = build_time_evolution(
        h, 0.7, controlled=False,
        encoding=lambda hs, tt: derive_steps(hs, tt, 1e-5, order="second"),
    )
    got = run(graph, psi)
    want = exact_evolution(h, 0.7, psi)
    assert fidelity(got, want) >= 1 - 1e-8


def test_controlled_evolution_ancilla_behavior():
    h = generate(SpinModelSpec("xxz_chain", 2, {"J": 1.0, "delta": 0.5}))
    rng = np.random.default_rng(10)
    data = random_state(rng, 2)
    graph = build_time_evolution(
        h, 0.9, controlled=True,
        encoding=lambda hs, tt: derive_steps(hs, tt, 1e-6),
    )
    assert graph.width == 3
    # ancilla |0>: identity on the data register
    full = np.zeros(8, dtype=complex)
    full[:4] = data.amps
    out = run(graph, StateVector(3, full))
    assert np.max(np.abs(out.amps[:4] - data.amps)) < 1e-12
    assert np.max(np.abs(out.amps[4:])) == 0
    # ancilla |1>: reproduces the pure evolution
    full = np.zeros(8, dtype=complex)
    full[4:] = data.amps
    out = run(graph, StateVector(3, full))
    pure = run(
        build_time_evolution(
            h, 0.9, controlled=False, encoding=lambda hs, tt: derive_steps(hs, tt, 1e-6)
        ),
        data,
    )
    assert fidelity(StateVector(2, out.amps[4:]), pure) == pytest.approx(1.0, abs=1e-10)


def test_optimize_time_single_term_picks_largest_time():
    h = PauliSum.from_terms([term(0.9, "ZZ")])
    params = optimize_time(h, energy_error=0.05, delta=0.25)
    t_naive, _ = derive_time_naive(h)
    assert params.t == pytest.approx(t_naive)


def test_optimize_time_beats_naive():
    h = generate(SpinModelSpec("xxz_chain", 3, {"J": 1.0, "delta": 0.5}))
    params = optimize_time(h, energy_error=0.2, delta=0.25)
    t_naive, shift = derive_time_naive(h)

    def t_count_at(t):
        h_shifted = add_identity(h, shift)
        plan = derive_steps(h_shifted, t, params.split.trotter * 0.2 * t)
        n_prec, a_extra, m = derive_phase_qubits(t, params.split.discretization * 0.2, 0.25)
        from hamlab.qpe import _qpe_graph

        graph = _qpe_graph(plan, m, h.n)
        return count(graph, SynthesisModel(), params.split.synthesis * 0.2 * t).t_gates

    assert t_count_at(params.t) <= t_count_at(t_naive)
    # returned parameters satisfy the contracts they were derived from
    assert params.m == params.n_prec + params.a_extra
    assert params.t <= t_naive * (1 + 1e-12)


def test_optimize_time_deterministic():
    h = generate(SpinModelSpec("xxz_chain", 3, {"J": 1.0, "delta": 0.5}))
    a = optimize_time(h, energy_error=0.2, delta=0.25)
    b = optimize_time(h, energy_error=0.2, delta=0.25)
    assert a == b
