"""Built-in spin-chain Hamiltonian generators.

These are the desk-scale stand-ins for an external Hamiltonian pipeline and
the source systems for the term-ordering studies. Couplings use the plain
Pauli convention (no spin-1/2 factors of 1/4):

* ``xxz_chain``:  H = sum_bonds J*(X X + Y Y) + J*Delta*(Z Z)
* ``tfim_chain``: H = -J sum_bonds Z Z - g sum_sites X

Bonds wrap around iff the boundary is periodic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError
from .pauli import PauliString, PauliSum, PauliTerm

MODELS = ("xxz_chain", "tfim_chain")
BOUNDARIES = ("open", "periodic")


@dataclass(frozen=True)
class SpinModelSpec:
    model: str
    L: int
    couplings: dict
    boundary: str = "open"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"spin_models: unknown model {self.model!r}")
        if self.boundary not in BOUNDARIES:
            raise ConfigError(f"spin_models: unknown boundary {self.boundary!r}")
        if self.L < 2:
            raise ConfigError(f"spin_models: L must be >= 2, got {self.L}")
        required = {"xxz_chain": {"J", "delta"}, "tfim_chain": {"J", "g"}}[self.model]
        missing = required - set(self.couplings)
        if missing:
            raise ConfigError(f"spin_models: missing couplings {sorted(missing)}")
        for key, value in self.couplings.items():
            if not isinstance(value, (int, float)) or value != value or value in (
                float("inf"),
                float("-inf"),
            ):
                raise ConfigError(f"spin_models: coupling {key}={value!r} is not finite")


def _bonds(L: int, boundary: str) -> list[tuple[int, int]]:
    bonds = [(i, i + 1) for i in range(L - 1)]
    if boundary == "periodic":
        bonds.append((L - 1, 0))
    return bonds


def _two_site(L: int, i: int, j: int, letter: str) -> PauliString:
    letters = ["I"] * L
    letters[i] = letter
    letters[j] = letter
    return PauliString("".join(letters))


def _one_site(L: int, i: int, letter: str) -> PauliString:
    letters = ["I"] * L
    letters[i] = letter
    return PauliString("".join(letters))


def generate(spec: SpinModelSpec) -> PauliSum:
    """Deterministically build the Hamiltonian for the given spec."""
    L = spec.L
    terms: list[PauliTerm] = []
    if spec.model == "xxz_chain":
        J = float(spec.couplings["J"])
        delta = float(spec.couplings["delta"])
        for i, j in _bonds(L, spec.boundary):
            terms.append(PauliTerm(J, _two_site(L, i, j, "X")))
            terms.append(PauliTerm(J, _two_site(L, i, j, "Y")))
            terms.append(PauliTerm(J * delta, _two_site(L, i, j, "Z")))
    else:
        J = float(spec.couplings["J"])
        g = float(spec.couplings["g"])
        for i, j in _bonds(L, spec.boundary):
            terms.append(PauliTerm(-J, _two_site(L, i, j, "Z")))
        for i in range(L):
            terms.append(PauliTerm(-g, _one_site(L, i, "X")))
    return PauliSum(L, tuple(terms)).simplify()
