"""Exact algebra over weighted Pauli strings.

This is the substrate everything else is built on: Hamiltonians and
observables are :class:`PauliSum` values, commutator error bounds are
evaluated with :func:`commutator`, and circuit lowering consumes
:class:`PauliString` letters directly.

Conventions (used consistently across the whole package):

* A string is a word over ``{I, X, Y, Z}`` with qubit 0 as the *leftmost*
  letter.
* Qubit 0 is the most significant bit of computational-basis indices, so
  ``to_matrix`` builds Kronecker products left-to-right.
* All values are immutable after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceededError, InputDataError

PAULI_LETTERS = "IXYZ"

DEFAULT_DROP_TOLERANCE = 1e-12
DEFAULT_MATRIX_QUBIT_CAP = 12

# Single-qubit products a*b -> (phase, letter).
_MUL = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}

_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    """An unweighted Pauli string; ``letters[i]`` acts on qubit ``i``."""

    letters: str

    def __post_init__(self):
        if not self.letters:
            raise InputDataError("pauli: empty Pauli string")
        bad = set(self.letters) - set(PAULI_LETTERS)
        if bad:
            raise InputDataError(f"pauli: invalid letters {sorted(bad)} in {self.letters!r}")

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        """Number of non-identity letters."""
        return sum(1 for c in self.letters if c != "I")

    def support(self) -> list[int]:
        """Qubit indices carrying a non-identity letter."""
        return [i for i, c in enumerate(self.letters) if c != "I"]

    def __str__(self) -> str:
        return self.letters


def identity_string(n: int) -> PauliString:
    return PauliString("I" * n)


def multiply(a: PauliString, b: PauliString) -> tuple[complex, PauliString]:
    """Letter-wise product ``a * b = phase * product``.

    The phase is always one of ``{1, -1, 1j, -1j}``.
    """
    if a.n != b.n:
        raise InputDataError(f"pauli: length mismatch {a.n} != {b.n}")
    phase = 1 + 0j
    out = []
    for ca, cb in zip(a.letters, b.letters):
        p, c = _MUL[(ca, cb)]
        phase *= p
        out.append(c)
    return phase, PauliString("".join(out))


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the strings commute.

    Two strings commute exactly when the number of positions where the
    letters differ and neither is identity is even.
    """
    if a.n != b.n:
        raise InputDataError(f"pauli: length mismatch {a.n} != {b.n}")
    clashes = sum(
        1 for ca, cb in zip(a.letters, b.letters) if ca != "I" and cb != "I" and ca != cb
    )
    return clashes % 2 == 0


@dataclass(frozen=True)
class PauliTerm:
    """A complex coefficient attached to a Pauli string."""

    coeff: complex
    string: PauliString

    def __post_init__(self):
        c = complex(self.coeff)
        if not (np.isfinite(c.real) and np.isfinite(c.imag)):
            raise InputDataError(f"pauli: non-finite coefficient {self.coeff!r}")
        object.__setattr__(self, "coeff", c)

    @property
    def n(self) -> int:
        return self.string.n


def term(coeff: complex, letters: str) -> PauliTerm:
    """Shorthand constructor used pervasively in tests and generators."""
    return PauliTerm(coeff, PauliString(letters))


@dataclass(frozen=True)
class PauliSum:
    """An ordered list of Pauli terms over a fixed qubit count.

    Term order is preserved on construction and by arithmetic; it only
    changes through an explicit :meth:`simplify` or an ordering strategy.
    """

    n: int
    terms: tuple[PauliTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if t.n != self.n:
                raise InputDataError(
                    f"pauli: term on {t.n} qubits in a sum over {self.n} qubits"
                )

    @classmethod
    def from_terms(cls, terms: Iterable[PauliTerm], n: int | None = None) -> "PauliSum":
        terms = tuple(terms)
        if n is None:
            if not terms:
                raise InputDataError("pauli: cannot infer qubit count of an empty sum")
            n = terms[0].n
        return cls(n, terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if self.n != other.n:
            raise InputDataError(f"pauli: length mismatch {self.n} != {other.n}")
        return PauliSum(self.n, self.terms + other.terms)

    def scaled(self, factor: complex) -> "PauliSum":
        return PauliSum(self.n, tuple(PauliTerm(t.coeff * factor, t.string) for t in self.terms))

    def simplify(self, drop_tolerance: float = DEFAULT_DROP_TOLERANCE) -> "PauliSum":
        """Merge equal strings and drop negligible coefficients.

        First-occurrence order of the surviving strings is kept, which makes
        the result deterministic and friendly to ordering studies.
        """
        acc: dict[str, complex] = {}
        for t in self.terms:
            key = t.string.letters
            acc[key] = acc.get(key, 0j) + t.coeff
        kept = [
            PauliTerm(c, PauliString(s)) for s, c in acc.items() if abs(c) >= drop_tolerance
        ]
        return PauliSum(self.n, tuple(kept))

    def is_hermitian(self, tolerance: float = 1e-10) -> bool:
        """True when every simplified coefficient is real within tolerance."""
        return all(abs(t.coeff.imag) <= tolerance for t in self.simplify().terms)


def coeff_one_norm(h: PauliSum) -> float:
    """Sum of coefficient magnitudes; upper-bounds the spectral norm."""
    return float(sum(abs(t.coeff) for t in h.terms))


def commutator(a: PauliTerm, b: PauliTerm) -> PauliSum:
    """Exact commutator ``[a, b] = ab - ba`` as a simplified sum.

    Empty when the strings commute, otherwise the single term
    ``2 * phase * coeff_a * coeff_b * (a.string b.string)``.
    """
    if a.n != b.n:
        raise InputDataError(f"pauli: length mismatch {a.n} != {b.n}")
    if commutes(a.string, b.string):
        return PauliSum(a.n, ())
    phase, product = multiply(a.string, b.string)
    return PauliSum(a.n, (PauliTerm(2 * phase * a.coeff * b.coeff, product),))


def string_matrix(s: PauliString) -> np.ndarray:
    return reduce(np.kron, (_MATRICES[c] for c in s.letters))


def to_matrix(h: PauliSum, qubit_cap: int = DEFAULT_MATRIX_QUBIT_CAP) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of the sum; Hermitian for real coefficients."""
    if h.n > qubit_cap:
        raise CapExceededError(
            f"pauli: to_matrix on {h.n} qubits exceeds the cap of {qubit_cap}"
        )
    out = np.zeros((2**h.n, 2**h.n), dtype=complex)
    for t in h.terms:
        out += t.coeff * string_matrix(t.string)
    return out


def add_identity(h: PauliSum, coeff: complex) -> PauliSum:
    """Return ``h + coeff * I``, simplified."""
    shifted = h + PauliSum(h.n, (PauliTerm(coeff, identity_string(h.n)),))
    return shifted.simplify()


def random_hermitian_sum(
    rng: np.random.Generator,
    n: int,
    num_terms: int,
    coeff_scale: float = 1.0,
) -> PauliSum:
    """Random Hermitian sum used by property tests and bound studies."""
    terms = []
    for _ in range(num_terms):
        letters = "".join(rng.choice(list(PAULI_LETTERS), size=n))
        coeff = float(rng.uniform(-coeff_scale, coeff_scale))
        terms.append(term(coeff, letters))
    return PauliSum(n, tuple(terms)).simplify()


def lexicographic_key(t: PauliTerm) -> str:
    return t.string.letters


def reorder(h: PauliSum, permutation: Sequence[int]) -> PauliSum:
    """Return the sum with terms permuted; permutation must be a bijection."""
    if sorted(permutation) != list(range(len(h.terms))):
        raise InputDataError("pauli: permutation is not a bijection on term indices")
    return PauliSum(h.n, tuple(h.terms[i] for i in permutation))
