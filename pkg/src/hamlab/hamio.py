"""On-disk formats: Pauli text files, tensor files, state files, reports.

Two wire formats are defined here and documented in the README:

* **Pauli text** -- one term per line, ``<coefficient> <letters>``, with
  ``#`` comment lines. Qubit 0 is the leftmost letter. The writer emits a
  ``# qubits: N`` header so empty Hamiltonians round-trip, sorts terms by
  descending coefficient magnitude (lexicographic tie-break) and prints 17
  significant digits so doubles survive a round trip exactly.
* **Tensor file** -- a JSON document carrying the second-quantization
  tensors with complex entries as ``[re, im]`` pairs and the convention
  tag ``half-pqrs-v1`` (H = const + sum h_pq a+_p a_q
  + 1/2 sum h_pqrs a+_p a+_q a_r a_s).

Reports are JSON (structured) or CSV (tabular); both are byte-deterministic
for a fixed config and seed.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InputDataError
from .fermion import FermionTensors
from .pauli import PAULI_LETTERS, PauliString, PauliSum, PauliTerm

TENSOR_CONVENTION = "half-pqrs-v1"
TENSOR_FORMAT_VERSION = 1
STATE_FORMAT_VERSION = 1

_QUBITS_HEADER = re.compile(r"^#\s*qubits:\s*(\d+)\s*$")
_TERM_LINE = re.compile(r"^(\S+)\s+([IXYZ]+)\s*$")


# ---------------------------------------------------------------------------
# Pauli text format.
# ---------------------------------------------------------------------------


def read_pauli_text(path: str | Path) -> PauliSum:
    """Parse a Pauli text file into a simplified sum.

    Raises :class:`InputDataError` with a line number for malformed lines,
    inconsistent string lengths, or an empty file.
    """
    path = Path(path)
    terms: list[PauliTerm] = []
    n: int | None = None
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            header = _QUBITS_HEADER.match(line)
            if header:
                declared = int(header.group(1))
                if n is not None and declared != n:
                    raise InputDataError(
                        f"{path}:{lineno}: qubits header {declared} conflicts with {n}"
                    )
                n = declared
            continue
        match = _TERM_LINE.match(line)
        if not match:
            raise InputDataError(f"{path}:{lineno}: malformed term line {line!r}")
        coeff_text, letters = match.groups()
        try:
            coeff = float(coeff_text)
        except ValueError:
            raise InputDataError(
                f"{path}:{lineno}: bad coefficient {coeff_text!r}"
            ) from None
        if n is None:
            n = len(letters)
        elif len(letters) != n:
            raise InputDataError(
                f"{path}:{lineno}: string length {len(letters)} != {n}"
            )
        terms.append(PauliTerm(coeff, PauliString(letters)))
    if n is None:
        raise InputDataError(f"{path}: empty Hamiltonian file")
    return PauliSum(n, tuple(terms)).simplify()


def write_pauli_text(h: PauliSum, path: str | Path, real_tolerance: float = 1e-10) -> None:
    """Write a Hermitian sum in the Pauli text grammar."""
    path = Path(path)
    for t in h.terms:
        if abs(t.coeff.imag) > real_tolerance:
            raise InputDataError(
                f"hamio: non-real coefficient {t.coeff} on {t.string.letters}"
            )
    ordered = sorted(h.terms, key=lambda t: (-abs(t.coeff), t.string.letters))
    lines = [f"# qubits: {h.n}", f"# terms: {len(ordered)}"]
    for t in ordered:
        lines.append(f"{t.coeff.real:.17g} {t.string.letters}")
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Tensor file format.
# ---------------------------------------------------------------------------


def _complex_to_pairs(array: np.ndarray) -> list:
    stacked = np.stack([array.real, array.imag], axis=-1)
    return stacked.tolist()


def _pairs_to_complex(data: Any, shape: tuple[int, ...], what: str) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape != shape + (2,):
        raise InputDataError(f"hamio: {what} shape {arr.shape} != {shape + (2,)}")
    return arr[..., 0] + 1j * arr[..., 1]


def read_tensor_file(path: str | Path) -> FermionTensors:
    """Load and validate a tensor file (shapes, tag, Hermiticity)."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputDataError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InputDataError(f"{path}: expected a JSON object")
    tag = doc.get("convention")
    if tag != TENSOR_CONVENTION:
        raise InputDataError(
            f"{path}: unknown convention tag {tag!r}, expected {TENSOR_CONVENTION!r}"
        )
    missing = {"format_version", "n_modes", "constant", "one_body", "two_body"} - set(doc)
    if missing:
        raise InputDataError(f"{path}: missing fields {sorted(missing)}")
    n = doc["n_modes"]
    if not isinstance(n, int) or n <= 0:
        raise InputDataError(f"{path}: bad n_modes {n!r}")
    one = _pairs_to_complex(doc["one_body"], (n, n), "one_body")
    two = _pairs_to_complex(doc["two_body"], (n, n, n, n), "two_body")
    try:
        return FermionTensors(n, float(doc["constant"]), one, two)
    except InputDataError as exc:
        raise InputDataError(f"{path}: {exc}") from None


def write_tensor_file(tensors: FermionTensors, path: str | Path) -> None:
    doc = {
        "format_version": TENSOR_FORMAT_VERSION,
        "convention": TENSOR_CONVENTION,
        "n_modes": tensors.n_modes,
        "constant": tensors.constant,
        "one_body": _complex_to_pairs(tensors.one_body),
        "two_body": _complex_to_pairs(tensors.two_body),
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# State files (dense amplitude vectors).
# ---------------------------------------------------------------------------


def read_state_file(path: str | Path) -> np.ndarray:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputDataError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "amplitudes" not in doc or "n" not in doc:
        raise InputDataError(f"{path}: expected fields 'n' and 'amplitudes'")
    n = doc["n"]
    amps = _pairs_to_complex(doc["amplitudes"], (2**n,), "amplitudes")
    norm = np.linalg.norm(amps)
    if abs(norm - 1.0) > 1e-8:
        raise InputDataError(f"{path}: amplitudes have norm {norm}, expected 1")
    return amps


def write_state_file(amps: np.ndarray, path: str | Path) -> None:
    n = int(np.log2(len(amps)))
    doc = {
        "format_version": STATE_FORMAT_VERSION,
        "n": n,
        "amplitudes": _complex_to_pairs(np.asarray(amps, dtype=complex)),
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# Analysis reports.
# ---------------------------------------------------------------------------


@dataclass
class AnalysisReport:
    """Everything one run derived and produced, ready for serialization."""

    config: dict
    hamiltonian: dict
    derived: dict
    results: dict
    schema: str = "analysis-report-v1"
    tabular_rows: list[dict] = field(default_factory=list)

    def to_document(self) -> dict:
        return {
            "schema": self.schema,
            "config": self.config,
            "hamiltonian": self.hamiltonian,
            "derived": self.derived,
            "results": self.results,
        }

    def flat_row(self) -> dict:
        """One flat record for tabular output (sweeps concatenate these)."""
        row: dict[str, Any] = {}

        def _flatten(prefix: str, value: Any):
            if isinstance(value, dict):
                for k, v in value.items():
                    _flatten(f"{prefix}.{k}" if prefix else str(k), v)
            elif isinstance(value, (list, tuple)):
                row[prefix] = json.dumps(value)
            else:
                row[prefix] = value

        _flatten("", {"hamiltonian": self.hamiltonian, "derived": self.derived})
        for key, value in self.results.items():
            if isinstance(value, (int, float, str, bool)) or value is None:
                row[f"results.{key}"] = value
        return row


def render_report(report: AnalysisReport, format: str = "structured") -> str:
    """Render a report to text; deterministic byte-for-byte."""
    if format == "structured":
        return json.dumps(report.to_document(), indent=2, sort_keys=True) + "\n"
    if format == "tabular":
        rows = report.tabular_rows or [report.flat_row()]
        keys: list[str] = []
        for row in rows:
            for key in row:
                if key not in keys:
                    keys.append(key)
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        return buffer.getvalue()
    raise InputDataError(f"hamio: unknown report format {format!r}")


def write_report(report: AnalysisReport, path: str | Path, format: str = "structured") -> None:
    Path(path).write_text(render_report(report, format))
