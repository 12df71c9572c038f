"""Declarative run configuration: YAML sections, dotted-key overrides.

Validation is strict: any key outside the schema is an error naming the
full dotted path, so typos never silently change behavior. Overrides are
applied to the raw document before validation and therefore always win
over derivation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError

SOURCES = ("pauli_file", "tensor_file", "spin_model")
MAPPINGS = ("jordan_wigner", "bravyi_kitaev")
ALGORITHMS = ("phase_estimation", "time_evolution", "controlled_time_evolution")
ANALYSES = ("resources", "simulate", "qpe_distribution", "eigen")
ORDERINGS = ("as_given", "lexicographic", "magnitude_descending", "random")

_NUMBER = (int, float)

# section -> key -> (types, allowed values or None)
_SCHEMA: dict[str, dict[str, tuple]] = {
    "hamiltonian": {
        "source": ((str,), SOURCES),
        "path": ((str,), None),
        "mapping": ((str,), MAPPINGS),
        "model": ((str,), ("xxz_chain", "tfim_chain")),
        "L": ((int,), None),
        "J": (_NUMBER, None),
        "delta": (_NUMBER, None),
        "g": (_NUMBER, None),
        "boundary": ((str,), ("open", "periodic")),
    },
    "encoding": {
        "method": ((str,), ("trotter",)),
        "max_error": (_NUMBER, None),
        "order": ((str,), ("first", "second")),
        "steps": ((int,), None),
        "ordering": ((str,), ORDERINGS),
        "seed": ((int,), None),
    },
    "circuit": {
        "algorithm": ((str,), ALGORITHMS),
        "max_energy_error": (_NUMBER, None),
        "failure_probability": (_NUMBER, None),
        "evolution_time": (_NUMBER, None),
        "phase_qubits": ((int,), None),
        "budget_split": ((list,), None),
    },
    "analysis": {
        "type": ((str,), ANALYSES),
        "initial_state": ((str, dict), None),
        "output": ((str,), None),
        "synthesis": ((dict,), None),
        "synthesis_error": (_NUMBER, None),
        "num_states": ((int,), None),
    },
}


@dataclass(frozen=True)
class HamiltonianConfig:
    source: str
    path: str | None = None
    mapping: str = "jordan_wigner"
    model: str | None = None
    L: int | None = None
    J: float | None = None
    delta: float | None = None
    g: float | None = None
    boundary: str = "open"


@dataclass(frozen=True)
class EncodingConfig:
    method: str = "trotter"
    max_error: float | None = None
    order: str | None = None
    steps: int | None = None
    ordering: str = "as_given"
    seed: int | None = None


@dataclass(frozen=True)
class CircuitConfig:
    algorithm: str | None = None
    max_energy_error: float | None = None
    failure_probability: float = 0.1
    evolution_time: float | None = None
    phase_qubits: int | None = None
    budget_split: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)


@dataclass(frozen=True)
class AnalysisConfig:
    type: str = "resources"
    initial_state: Any = None
    output: str = "report"
    synthesis_a: int = 10
    synthesis_b: float = 4.0
    synthesis_error: float | None = None
    num_states: int | None = None


@dataclass(frozen=True)
class RunConfig:
    hamiltonian: HamiltonianConfig
    encoding: EncodingConfig
    circuit: CircuitConfig
    analysis: AnalysisConfig
    document: dict = field(default_factory=dict)  # validated raw echo


def _require_mapping(value, path: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"config: {path} must be a mapping, got {type(value).__name__}")
    return value


def validate_document(doc: dict) -> dict:
    doc = _require_mapping(doc, "<root>")
    unknown_sections = set(doc) - set(_SCHEMA)
    if unknown_sections:
        raise ConfigError(f"config: unknown section {sorted(unknown_sections)[0]!r}")
    for section, keys in doc.items():
        keys = _require_mapping(keys, section)
        for key, value in keys.items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"config: unknown key {section}.{key}")
            types, allowed = _SCHEMA[section][key]
            # bool is an int subclass; never accept it for numeric keys
            if isinstance(value, bool) or not isinstance(value, types):
                raise ConfigError(
                    f"config: {section}.{key} expects {'/'.join(t.__name__ for t in types)},"
                    f" got {value!r}"
                )
            if allowed is not None and value not in allowed:
                raise ConfigError(
                    f"config: {section}.{key} must be one of {list(allowed)}, got {value!r}"
                )
    return doc


def parse_override(text: str) -> tuple[list[str], Any]:
    if "=" not in text:
        raise ConfigError(f"config: override {text!r} is not of the form key.path=value")
    key, _, raw_value = text.partition("=")
    path = [p for p in key.strip().split(".") if p]
    if len(path) != 2:
        raise ConfigError(f"config: override key {key!r} must be section.key")
    try:
        value = yaml.safe_load(raw_value)
    except yaml.YAMLError:
        value = raw_value
    return path, value


def apply_overrides(doc: dict, overrides: list[str] | tuple[str, ...]) -> dict:
    out = {section: dict(keys or {}) for section, keys in doc.items()}
    for text in overrides:
        (section, key), value = parse_override(text)
        out.setdefault(section, {})[key] = value
    return out


def load_document(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config: file not found: {path}")
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"config: {path} is not valid YAML: {exc}") from None
    if doc is None:
        doc = {}
    return doc


def build_config(doc: dict) -> RunConfig:
    doc = validate_document(doc)
    ham = doc.get("hamiltonian", {})
    if "source" not in ham:
        raise ConfigError("config: hamiltonian.source is required")
    hamiltonian = HamiltonianConfig(**ham)
    _check_hamiltonian(hamiltonian)

    encoding = EncodingConfig(**doc.get("encoding", {}))
    circuit_doc = dict(doc.get("circuit", {}))
    if "budget_split" in circuit_doc:
        split = circuit_doc["budget_split"]
        if len(split) != 3 or not all(isinstance(x, _NUMBER) for x in split):
            raise ConfigError("config: circuit.budget_split must be three numbers")
        circuit_doc["budget_split"] = tuple(float(x) for x in split)
    circuit = CircuitConfig(**circuit_doc)

    analysis_doc = dict(doc.get("analysis", {}))
    synthesis = analysis_doc.pop("synthesis", None)
    if synthesis is not None:
        unknown = set(synthesis) - {"a", "b"}
        if unknown:
            raise ConfigError(f"config: unknown key analysis.synthesis.{sorted(unknown)[0]}")
        analysis_doc["synthesis_a"] = int(synthesis.get("a", 10))
        analysis_doc["synthesis_b"] = float(synthesis.get("b", 4.0))
    analysis = AnalysisConfig(**analysis_doc)

    _check_cross_section(hamiltonian, encoding, circuit, analysis)
    return RunConfig(hamiltonian, encoding, circuit, analysis, document=doc)


def _check_hamiltonian(cfg: HamiltonianConfig):
    if cfg.source in ("pauli_file", "tensor_file") and not cfg.path:
        raise ConfigError(f"config: hamiltonian.path is required for source={cfg.source}")
    if cfg.source == "spin_model":
        if cfg.model is None or cfg.L is None:
            raise ConfigError(
                "config: hamiltonian.model and hamiltonian.L are required for spin_model"
            )
        if cfg.model == "xxz_chain" and (cfg.J is None or cfg.delta is None):
            raise ConfigError("config: xxz_chain requires hamiltonian.J and hamiltonian.delta")
        if cfg.model == "tfim_chain" and (cfg.J is None or cfg.g is None):
            raise ConfigError("config: tfim_chain requires hamiltonian.J and hamiltonian.g")


def _check_cross_section(hamiltonian, encoding, circuit, analysis):
    needs_circuit = analysis.type in ("resources", "simulate", "qpe_distribution")
    if needs_circuit and circuit.algorithm is None:
        raise ConfigError(
            f"config: circuit.algorithm is required for analysis.type={analysis.type}"
        )
    if analysis.type == "qpe_distribution" and circuit.algorithm != "phase_estimation":
        raise ConfigError(
            "config: analysis.type=qpe_distribution requires circuit.algorithm=phase_estimation"
        )
    if circuit.algorithm == "phase_estimation":
        if circuit.max_energy_error is None:
            raise ConfigError(
                "config: circuit.max_energy_error is required for phase_estimation"
            )
        if not 0 < circuit.failure_probability < 1:
            raise ConfigError("config: circuit.failure_probability must be in (0, 1)")
    if circuit.algorithm in ("time_evolution", "controlled_time_evolution"):
        if encoding.max_error is None and encoding.steps is None:
            raise ConfigError(
                "config: encoding.max_error (or encoding.steps) is required for time evolution"
            )
    if encoding.ordering == "random" and encoding.seed is None:
        raise ConfigError("config: encoding.seed is required for encoding.ordering=random")


def load_config(path: str | Path, overrides: tuple[str, ...] = ()) -> RunConfig:
    doc = apply_overrides(load_document(path), overrides)
    return build_config(doc)
