"""Exception hierarchy shared across the toolkit.

Each class maps to one CLI exit code so that failures are scriptable:
config errors 2, input-data errors 3, cap overflows 4, everything else 5.
"""


class HamlabError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 5


class ConfigError(HamlabError):
    """Malformed or inconsistent run configuration (bad key, bad value)."""

    exit_code = 2


class InputDataError(HamlabError):
    """Malformed input data: Hamiltonian files, tensors, state files."""

    exit_code = 3


class CapExceededError(HamlabError):
    """A documented size cap (qubits, terms, flattened gates) was exceeded."""

    exit_code = 4
