"""The two-command workflow: build Hamiltonian files, then analyze algorithms.

``hamgen`` materializes Hamiltonian files stage by stage with a content-hash
manifest, so rerunning with an unchanged upstream stage reuses the existing
file instead of recomputing it. ``analyze`` executes
load -> encode -> build -> analyze and writes a deterministic report.
``sweep`` expands a parameter grid over a template config and merges the
tabular rows.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import hamio
from .config import RunConfig, apply_overrides, build_config, load_document, parse_override
from .errors import ConfigError, InputDataError
from .fermion import bravyi_kitaev, jordan_wigner
from .hamio import AnalysisReport
from .pauli import PauliSum, coeff_one_norm
from .qpe import (
    BudgetSplit,
    QpeParams,
    build_qpe,
    build_time_evolution,
    derive_phase_qubits,
    derive_time_naive,
    optimize_time,
)
from .resources import SynthesisModel, count, structural_counts
from .simulator import (
    StateVector,
    eigendecompose,
    exact_evolution,
    fidelity,
    qpe_distribution_analytic,
    run,
)
from .spin_models import SpinModelSpec, generate
from .trotter import OrderingStrategy, TrotterPlan, derive_steps, plan_for_steps

MANIFEST_NAME = "manifest.json"
MANIFEST_SCHEMA = "hamgen-manifest-v1"


# ---------------------------------------------------------------------------
# Hamiltonian loading.
# ---------------------------------------------------------------------------


def _spin_spec(cfg) -> SpinModelSpec:
    couplings = (
        {"J": cfg.J, "delta": cfg.delta}
        if cfg.model == "xxz_chain"
        else {"J": cfg.J, "g": cfg.g}
    )
    return SpinModelSpec(cfg.model, cfg.L, couplings, cfg.boundary)


def load_hamiltonian(config: RunConfig) -> PauliSum:
    cfg = config.hamiltonian
    if cfg.source == "spin_model":
        return generate(_spin_spec(cfg))
    if cfg.source == "pauli_file":
        return hamio.read_pauli_text(cfg.path)
    tensors = hamio.read_tensor_file(cfg.path)
    mapper = jordan_wigner if cfg.mapping == "jordan_wigner" else bravyi_kitaev
    return mapper(tensors)


# ---------------------------------------------------------------------------
# hamgen with manifest-based reuse.
# ---------------------------------------------------------------------------


@dataclass
class HamgenResult:
    out_dir: Path
    built: list[str] = field(default_factory=list)
    reused: list[str] = field(default_factory=list)
    outputs: dict[str, str] = field(default_factory=dict)


def _sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _sha256_text(text: str) -> str:
    return _sha256_bytes(text.encode())


def hamgen(config_path: str | Path, out_dir: str | Path, overrides: tuple[str, ...] = ()) -> HamgenResult:
    """Build Hamiltonian files under ``out_dir``; reuse unchanged stages."""
    doc = apply_overrides(load_document(config_path), overrides)
    config = build_config(doc)
    cfg = config.hamiltonian
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / MANIFEST_NAME
    manifest = {"schema": MANIFEST_SCHEMA, "entries": {}}
    if manifest_path.exists():
        try:
            loaded = json.loads(manifest_path.read_text())
            if loaded.get("schema") == MANIFEST_SCHEMA:
                manifest = loaded
        except json.JSONDecodeError:
            pass
    result = HamgenResult(out_dir=out_dir)

    def stage(name: str, input_hash: str, outputs: list[str], build) -> None:
        entry = manifest["entries"].get(name)
        paths = [out_dir / o for o in outputs]
        if (
            entry
            and entry.get("input_hash") == input_hash
            and entry.get("outputs") == outputs
            and all(p.exists() for p in paths)
        ):
            result.reused.append(name)
        else:
            build()
            manifest["entries"][name] = {"input_hash": input_hash, "outputs": outputs}
            result.built.append(name)
        for o in outputs:
            result.outputs[name] = str(out_dir / o)

    section_hash = _sha256_text(json.dumps(doc.get("hamiltonian", {}), sort_keys=True))

    if cfg.source == "spin_model":
        stage(
            "pauli",
            section_hash,
            ["hamiltonian.txt"],
            lambda: hamio.write_pauli_text(generate(_spin_spec(cfg)), out_dir / "hamiltonian.txt"),
        )
    elif cfg.source == "tensor_file":
        source = Path(cfg.path)
        if not source.exists():
            raise InputDataError(f"hamgen: tensor file not found: {source}")
        tensors_hash = _sha256_bytes(source.read_bytes())

        def build_tensors():
            hamio.write_tensor_file(hamio.read_tensor_file(source), out_dir / "tensors.json")

        stage("tensors", tensors_hash, ["tensors.json"], build_tensors)

        def build_pauli():
            tensors = hamio.read_tensor_file(out_dir / "tensors.json")
            mapper = jordan_wigner if cfg.mapping == "jordan_wigner" else bravyi_kitaev
            hamio.write_pauli_text(mapper(tensors), out_dir / "hamiltonian.txt")

        pauli_hash = _sha256_text(
            _sha256_bytes((out_dir / "tensors.json").read_bytes()) + cfg.mapping
        )
        stage("pauli", pauli_hash, ["hamiltonian.txt"], build_pauli)
    else:  # pauli_file: normalize into the output directory
        source = Path(cfg.path)
        if not source.exists():
            raise InputDataError(f"hamgen: Pauli file not found: {source}")
        stage(
            "pauli",
            _sha256_bytes(source.read_bytes()),
            ["hamiltonian.txt"],
            lambda: hamio.write_pauli_text(
                hamio.read_pauli_text(source), out_dir / "hamiltonian.txt"
            ),
        )

    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return result


# ---------------------------------------------------------------------------
# Parameter derivation for analyze.
# ---------------------------------------------------------------------------


@dataclass
class DerivedRun:
    """Everything analyze resolved before running the requested analysis."""

    algorithm: str | None
    plan: TrotterPlan | None = None
    params: QpeParams | None = None
    time: float | None = None
    graph: object = None

    def derived_section(self) -> dict:
        out: dict = {"algorithm": self.algorithm}
        if self.plan is not None:
            out.update(
                {
                    "order": self.plan.order,
                    "steps": self.plan.steps,
                    "time": self.plan.time,
                    "trotter_bound": self.plan.error_bound,
                    "ordering": self.plan.ordering.kind,
                }
            )
        if self.params is not None:
            p = self.params
            out["shift"] = p.shift
            out["phase_qubits"] = {"n_prec": p.n_prec, "a_extra": p.a_extra, "m": p.m}
            out["budgets"] = {
                "total_energy_error": p.energy_error,
                "trotter_operator": p.trotter_operator_budget,
                "discretization_energy": p.discretization_energy_budget,
                "synthesis_operator": p.synthesis_operator_budget,
                "failure_probability": p.failure_probability,
            }
        return out


def _ordering_strategy(config: RunConfig) -> OrderingStrategy:
    enc = config.encoding
    if enc.ordering == "random":
        return OrderingStrategy("random", seed=enc.seed)
    return OrderingStrategy(enc.ordering)


def _encoding_factory(config: RunConfig, budget: float | None):
    enc = config.encoding
    ordering = _ordering_strategy(config)

    def factory(h: PauliSum, t: float) -> TrotterPlan:
        if enc.steps is not None:
            return plan_for_steps(h, t, enc.steps, order=enc.order or "first", ordering=ordering)
        if budget is None:
            raise ConfigError("config: encoding.max_error is required to derive steps")
        return derive_steps(h, t, budget, order=enc.order, ordering=ordering)

    return factory


def derive_run(config: RunConfig, h: PauliSum) -> DerivedRun:
    algorithm = config.circuit.algorithm
    if algorithm is None:
        return DerivedRun(algorithm=None)
    enc = config.encoding
    ordering = _ordering_strategy(config)

    if algorithm == "phase_estimation":
        split = BudgetSplit(*config.circuit.budget_split)
        delta = config.circuit.failure_probability
        energy_error = config.circuit.max_energy_error
        if config.circuit.evolution_time is not None:
            t = config.circuit.evolution_time
            _, shift = derive_time_naive(h)
            n_prec, a_extra, m = derive_phase_qubits(
                t, split.discretization * energy_error, delta
            )
            if config.circuit.phase_qubits is not None:
                m = config.circuit.phase_qubits
                n_prec = m - a_extra
                if n_prec < 1:
                    raise ConfigError(
                        f"config: circuit.phase_qubits={m} leaves no precision bits"
                    )
            params = QpeParams(
                m=m, n_prec=n_prec, a_extra=a_extra, t=t, shift=shift,
                energy_error=energy_error, failure_probability=delta, split=split,
            )
        else:
            params = optimize_time(
                h, energy_error, delta, split,
                order=enc.order, ordering=ordering,
                synthesis=SynthesisModel(config.analysis.synthesis_a, config.analysis.synthesis_b),
                steps=enc.steps,
                phase_qubits=config.circuit.phase_qubits,
            )
        budget = params.trotter_operator_budget
        factory = _encoding_factory(config, budget)
        graph = build_qpe(h, params, factory)
        from .pauli import add_identity

        plan = factory(add_identity(h, params.shift), params.t)
        return DerivedRun(algorithm=algorithm, plan=plan, params=params, time=params.t, graph=graph)

    # pure / controlled time evolution
    t = config.circuit.evolution_time
    if t is None:
        t, _ = derive_time_naive(h)
    factory = _encoding_factory(config, enc.max_error)
    controlled = algorithm == "controlled_time_evolution"
    graph = build_time_evolution(h, t, controlled, factory)
    plan = factory(h, t)
    return DerivedRun(algorithm=algorithm, plan=plan, params=None, time=t, graph=graph)


# ---------------------------------------------------------------------------
# analyze.
# ---------------------------------------------------------------------------


def _resolve_initial_state(config: RunConfig, data_qubits: int, width: int) -> StateVector:
    """Initial state for the data register, embedded into the full width.

    Accepts a basis bitstring or a state file; a full-width specification is
    also allowed. Unspecified qubits (phase register, ancilla) start in |0>.
    """
    spec = config.analysis.initial_state
    if spec is None:
        amps_data = np.zeros(2**data_qubits, dtype=complex)
        amps_data[0] = 1.0
    elif isinstance(spec, str):
        if set(spec) - {"0", "1"}:
            raise ConfigError(f"config: analysis.initial_state {spec!r} is not a bitstring")
        if len(spec) == width:
            full = np.zeros(2**width, dtype=complex)
            full[int(spec, 2)] = 1.0
            return StateVector(width, full)
        if len(spec) != data_qubits:
            raise ConfigError(
                f"config: initial_state length {len(spec)} matches neither the data "
                f"register ({data_qubits}) nor the full width ({width})"
            )
        amps_data = np.zeros(2**data_qubits, dtype=complex)
        amps_data[int(spec, 2)] = 1.0
    elif isinstance(spec, dict) and set(spec) == {"file"}:
        amps_data = hamio.read_state_file(spec["file"])
        n = int(np.log2(len(amps_data)))
        if n == width:
            return StateVector(width, amps_data)
        if n != data_qubits:
            raise ConfigError(
                f"config: state file has {n} qubits, expected {data_qubits} or {width}"
            )
    else:
        raise ConfigError("config: analysis.initial_state must be a bitstring or {file: path}")
    full = np.zeros(2**width, dtype=complex)
    full[: 2**data_qubits] = amps_data  # extra (most significant) qubits are |0>
    return StateVector(width, full)


def _data_state(config: RunConfig, n: int) -> StateVector:
    return _resolve_initial_state(config, n, n)


@dataclass
class AnalyzeResult:
    report: AnalysisReport
    report_path: Path
    extra_paths: dict[str, str] = field(default_factory=dict)


def analyze(
    config_path: str | Path,
    out_dir: str | Path,
    overrides: tuple[str, ...] = (),
    report_format: str = "structured",
) -> AnalyzeResult:
    doc = apply_overrides(load_document(config_path), overrides)
    return analyze_document(doc, out_dir, report_format=report_format)


def analyze_document(
    doc: dict, out_dir: str | Path, report_format: str = "structured"
) -> AnalyzeResult:
    config = build_config(doc)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    h = load_hamiltonian(config)
    derived = derive_run(config, h)

    report = AnalysisReport(
        config=config.document,
        hamiltonian={
            "qubits": h.n,
            "terms": len(h.terms),
            "coeff_one_norm": coeff_one_norm(h),
        },
        derived=derived.derived_section(),
        results={},
    )
    extra: dict[str, str] = {}
    analysis = config.analysis

    if analysis.type == "resources":
        graph = derived.graph
        pre = structural_counts(graph)
        results = {
            "qubits": pre.qubits,
            "clifford": pre.clifford,
            "t_gates_structural": pre.t_gates,
            "rotations": pre.rotations,
        }
        synthesis_budget = None
        if derived.params is not None:
            synthesis_budget = derived.params.synthesis_operator_budget
        elif analysis.synthesis_error is not None:
            synthesis_budget = analysis.synthesis_error
        if synthesis_budget is not None:
            model = SynthesisModel(analysis.synthesis_a, analysis.synthesis_b)
            post = count(graph, model, synthesis_budget)
            results["t_gates_total"] = post.t_gates
            results["synthesis_operator_budget"] = synthesis_budget
        report.results = results

    elif analysis.type == "simulate":
        graph = derived.graph
        data_qubits = h.n
        psi0 = _resolve_initial_state(config, data_qubits, graph.width)
        final = run(graph, psi0)
        state_path = out_dir / "final_state.json"
        hamio.write_state_file(final.amps, state_path)
        extra["final_state"] = str(state_path)
        results = {"final_state_file": state_path.name, "width": graph.width}
        if derived.algorithm == "time_evolution" and h.n <= 12:
            reference = exact_evolution(h, derived.time, _data_state(config, h.n))
            results["fidelity_vs_exact"] = fidelity(final, reference)
            results["error_norm_vs_exact"] = float(
                np.linalg.norm(final.amps - reference.amps)
            )
        report.results = results

    elif analysis.type == "qpe_distribution":
        params = derived.params
        psi0 = _data_state(config, h.n)
        distribution = qpe_distribution_analytic(h, params, psi0)
        k_map = int(np.argmax(distribution))
        theta = k_map / 2**params.m
        energy = 2 * np.pi * theta / params.t - params.shift
        eigenvalues, vectors = eigendecompose(h)
        weights = np.abs(vectors.conj().T @ psi0.amps) ** 2
        thetas = ((eigenvalues + params.shift) * params.t / (2 * np.pi)) % 1.0
        ks = np.arange(2**params.m) / 2**params.m
        success = 0.0
        window = 2.0 ** (-params.n_prec - 1)
        for weight, theta_j in zip(weights, thetas):
            circular = np.abs(ks - theta_j)
            circular = np.minimum(circular, 1 - circular)
            success += weight * distribution[circular <= window + 1e-15].sum()
        report.results = {
            "map_outcome": k_map,
            "map_energy": energy,
            "success_mass_half_bin": float(success),
            "distribution": [float(p) for p in distribution],
        }

    elif analysis.type == "eigen":
        eigenvalues, _ = eigendecompose(h)
        limit = analysis.num_states or len(eigenvalues)
        report.results = {
            "num_states": int(limit),
            "eigenvalues": [float(v) for v in eigenvalues[:limit]],
            "ground_energy": float(eigenvalues[0]),
        }

    suffix = "json" if report_format == "structured" else "csv"
    report_path = out_dir / f"{analysis.output}.{suffix}"
    hamio.write_report(report, report_path, report_format)
    return AnalyzeResult(report=report, report_path=report_path, extra_paths=extra)


# ---------------------------------------------------------------------------
# sweep.
# ---------------------------------------------------------------------------


@dataclass
class SweepResult:
    rows: list[dict]
    csv_path: Path
    point_dirs: list[Path]


def _grid_points(grid: dict) -> list[dict[str, object]]:
    if not grid:
        raise ConfigError("sweep: empty parameter grid")
    keys = list(grid)
    for key, values in grid.items():
        if not isinstance(values, list) or not values:
            raise ConfigError(f"sweep: grid values for {key!r} must be a non-empty list")
    combos = itertools.product(*(grid[k] for k in keys))
    return [dict(zip(keys, combo)) for combo in combos]


def sweep(
    sweep_config_path: str | Path,
    out_dir: str | Path,
    jobs: int = 1,
) -> SweepResult:
    """Materialize one config per grid point, run them all, merge rows."""
    doc = load_document(sweep_config_path)
    if not isinstance(doc, dict) or "grid" not in doc:
        raise ConfigError("sweep: config must contain 'template' and 'grid' sections")
    template = doc.get("template")
    if isinstance(template, str):
        template = load_document(Path(sweep_config_path).parent / template)
    if not isinstance(template, dict):
        raise ConfigError("sweep: 'template' must be a mapping or a config path")
    grid = doc["grid"]

    # every grid key must resolve to a known template key
    for key in grid:
        (section, name), _ = parse_override(f"{key}=0")
        if section not in template or name not in (template.get(section) or {}):
            raise ConfigError(f"sweep: grid key {key!r} does not exist in the template")

    points = _grid_points(grid)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def run_point(index_point):
        index, point = index_point
        point_doc = apply_overrides(
            template, tuple(f"{k}={json.dumps(v)}" for k, v in point.items())
        )
        point_dir = out_dir / f"point_{index:04d}"
        result = analyze_document(point_doc, point_dir)
        row = {"point": index}
        row.update({f"grid.{k}": v for k, v in point.items()})
        row.update(result.report.flat_row())
        return index, row, point_dir

    indexed = list(enumerate(points))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run_point, indexed))
    else:
        outcomes = [run_point(ip) for ip in indexed]
    outcomes.sort(key=lambda x: x[0])

    rows = [row for _, row, _ in outcomes]
    point_dirs = [d for _, _, d in outcomes]
    merged = AnalysisReport(config={}, hamiltonian={}, derived={}, results={})
    merged.tabular_rows = rows
    csv_path = out_dir / "sweep.csv"
    hamio.write_report(merged, csv_path, "tabular")
    return SweepResult(rows=rows, csv_path=csv_path, point_dirs=point_dirs)
