"""Second-quantization tensors and fermion-to-qubit mappings.

Hamiltonian convention (pinned by the file format and the Fock-space
oracle in the tests):

    H = constant + sum_pq h_pq a+_p a_q + 1/2 sum_pqrs h_pqrs a+_p a+_q a_r a_s

Mode p maps to qubit p. Jordan-Wigner uses the usual Z-string on modes
below p; Bravyi-Kitaev uses the Fenwick-tree update/parity/flip sets, with
parity sets obtained by an exact GF(2) solve against the tree's stored
occupation sets (correctness is defined by isospectrality with JW, not by
any particular published sign convention).

Internally strings are carried as (x_bits, z_bits) integer pairs so the
n_modes^4 two-body assembly stays cheap; results surface as PauliSums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputDataError
from .pauli import PauliString, PauliSum, PauliTerm

HERMITICITY_TOLERANCE = 1e-10

_PHASES = (1 + 0j, 1j, -1 + 0j, -1j)


@dataclass(frozen=True)
class FermionTensors:
    """Constant, one-body and two-body coefficient tensors."""

    n_modes: int
    constant: float
    one_body: np.ndarray
    two_body: np.ndarray

    def __post_init__(self):
        n = self.n_modes
        if n <= 0:
            raise InputDataError(f"fermion: n_modes must be positive, got {n}")
        one = np.asarray(self.one_body, dtype=complex)
        two = np.asarray(self.two_body, dtype=complex)
        if one.shape != (n, n):
            raise InputDataError(f"fermion: one_body shape {one.shape} != ({n}, {n})")
        if two.shape != (n, n, n, n):
            raise InputDataError(f"fermion: two_body shape {two.shape} != ({n},)*4")
        if not np.allclose(one, one.conj().T, atol=HERMITICITY_TOLERANCE, rtol=0):
            raise InputDataError("fermion: one_body is not Hermitian (h_pq != conj(h_qp))")
        flipped = np.conj(np.transpose(two, (3, 2, 1, 0)))
        if not np.allclose(two, flipped, atol=HERMITICITY_TOLERANCE, rtol=0):
            raise InputDataError("fermion: two_body violates h_pqrs = conj(h_srqp)")
        object.__setattr__(self, "one_body", one)
        object.__setattr__(self, "two_body", two)


def random_tensors(
    rng: np.random.Generator,
    n_modes: int,
    scale: float = 1.0,
    real: bool = False,
) -> FermionTensors:
    """Dense random tensors satisfying the Hermiticity invariants."""
    if real:
        one = rng.uniform(-scale, scale, (n_modes,) * 2)
        one = (one + one.T) / 2
        two = rng.uniform(-scale, scale, (n_modes,) * 4)
    else:
        one = rng.uniform(-scale, scale, (n_modes,) * 2) + 1j * rng.uniform(
            -scale, scale, (n_modes,) * 2
        )
        one = (one + one.conj().T) / 2
        two = rng.uniform(-scale, scale, (n_modes,) * 4) + 1j * rng.uniform(
            -scale, scale, (n_modes,) * 4
        )
    two = (two + np.conj(np.transpose(two, (3, 2, 1, 0)))) / 2
    constant = float(rng.uniform(-scale, scale))
    return FermionTensors(n_modes, constant, one, two)


# ---------------------------------------------------------------------------
# Symplectic term algebra: a term is (coeff, x_bits, z_bits), bit i <-> qubit i.
# ---------------------------------------------------------------------------


def _mul_terms(c1, x1, z1, c2, x2, z2):
    x = x1 ^ x2
    z = z1 ^ z2
    # W(x, z) = i^popcount(x & z) * X^x * Z^z; push Z^z1 through X^x2.
    exponent = ((x1 & z1).bit_count() + (x2 & z2).bit_count() - (x & z).bit_count()) % 4
    phase = _PHASES[exponent]
    if (z1 & x2).bit_count() & 1:
        phase = -phase
    return c1 * c2 * phase, x, z


def _mul_lists(a, b):
    """Product of two term lists, merged and pruned of exact cancellations."""
    acc: dict[tuple[int, int], complex] = {}
    for c1, x1, z1 in a:
        for c2, x2, z2 in b:
            c, x, z = _mul_terms(c1, x1, z1, c2, x2, z2)
            key = (x, z)
            acc[key] = acc.get(key, 0j) + c
    return [(c, x, z) for (x, z), c in acc.items() if abs(c) > 1e-14]


def _letters(x: int, z: int, n: int) -> str:
    # (x, z) bit pairs: 00 -> I, 10 -> X, 01 -> Z, 11 -> Y.
    return "".join("IXZY"[((x >> i) & 1) + 2 * ((z >> i) & 1)] for i in range(n))


# ---------------------------------------------------------------------------
# Ladder operators.
# ---------------------------------------------------------------------------


def _jw_ladder(p: int, creation: bool):
    zstring = (1 << p) - 1
    x = 1 << p
    y_coeff = -0.5j if creation else 0.5j
    return [(0.5 + 0j, x, zstring), (y_coeff, x, zstring | (1 << p))]


class _FenwickTree:
    """Fenwick (binary indexed) tree over modes, built by bisection."""

    def __init__(self, n: int):
        self.n = n
        self.parent: list[int | None] = [None] * n
        self.children: list[list[int]] = [[] for _ in range(n)]
        if n > 1:
            self._build(0, n - 1, n - 1)
        # stored_mask[k] = modes whose occupation XORs into qubit k.
        self.stored_mask = [0] * n
        for k in range(n):
            mask = 0
            stack = [k]
            while stack:
                node = stack.pop()
                mask |= 1 << node
                stack.extend(self.children[node])
            self.stored_mask[k] = mask

    def _build(self, left: int, right: int, parent: int):
        if left >= right:
            return
        pivot = (left + right) >> 1
        self.parent[pivot] = parent
        self.children[parent].append(pivot)
        self._build(left, pivot, pivot)
        self._build(pivot + 1, right, parent)

    def ancestors(self, j: int) -> list[int]:
        out = []
        node = self.parent[j]
        while node is not None:
            out.append(node)
            node = self.parent[node]
        return out

    def parity_mask(self, j: int) -> int:
        """Qubits whose stored values XOR to the occupation parity of modes < j.

        stored_mask[k] always has bit k as its highest set bit, so the
        triangular GF(2) system solves by a single downward sweep.
        """
        residual = (1 << j) - 1
        chosen = 0
        for k in range(self.n - 1, -1, -1):
            if (residual >> k) & 1:
                chosen |= 1 << k
                residual ^= self.stored_mask[k]
        if residual != 0:
            raise AssertionError("fermion: Fenwick parity solve failed")
        return chosen


def _bk_ladders(n: int):
    """Ladder term lists for all modes under the Bravyi-Kitaev encoding."""
    tree = _FenwickTree(n)
    ladders = {}
    for j in range(n):
        update = 0
        for k in tree.ancestors(j):
            update |= 1 << k
        parity = tree.parity_mask(j)
        flip = 0
        for k in tree.children[j]:
            flip |= 1 << k
        remainder = parity & ~flip
        x_part = ((1 << j) | update, parity)
        y_part = ((1 << j) | update, remainder | (1 << j))
        for creation in (False, True):
            y_coeff = -0.5j if creation else 0.5j
            ladders[(j, creation)] = [
                (0.5 + 0j, x_part[0], x_part[1]),
                (y_coeff, y_part[0], y_part[1]),
            ]
    return ladders


# ---------------------------------------------------------------------------
# Hamiltonian assembly.
# ---------------------------------------------------------------------------


def _assemble(tensors: FermionTensors, ladders) -> PauliSum:
    n = tensors.n_modes
    acc: dict[tuple[int, int], complex] = {}
    if tensors.constant != 0.0:
        acc[(0, 0)] = complex(tensors.constant)

    def _accumulate(term_list, weight):
        for c, x, z in term_list:
            key = (x, z)
            acc[key] = acc.get(key, 0j) + weight * c

    one = tensors.one_body
    for p in range(n):
        for q in range(n):
            h = one[p, q]
            if h == 0:
                continue
            _accumulate(_mul_lists(ladders[(p, True)], ladders[(q, False)]), h)

    two = tensors.two_body
    if np.any(two):
        create_pair = {}
        annihilate_pair = {}
        for p in range(n):
            for q in range(n):
                create_pair[(p, q)] = _mul_lists(ladders[(p, True)], ladders[(q, True)])
                annihilate_pair[(p, q)] = _mul_lists(
                    ladders[(p, False)], ladders[(q, False)]
                )
        for p in range(n):
            for q in range(n):
                left = create_pair[(p, q)]
                if not left:
                    continue
                for r in range(n):
                    for s in range(n):
                        h = two[p, q, r, s]
                        if h == 0:
                            continue
                        right = annihilate_pair[(r, s)]
                        if not right:
                            continue
                        _accumulate(_mul_lists(left, right), 0.5 * h)

    terms = tuple(
        PauliTerm(c, PauliString(_letters(x, z, n)))
        for (x, z), c in acc.items()
        if abs(c) >= 1e-12
    )
    return PauliSum(n, terms).simplify()


def jordan_wigner(tensors: FermionTensors) -> PauliSum:
    """Map tensors to a Hermitian qubit Hamiltonian via Jordan-Wigner."""
    n = tensors.n_modes
    ladders = {
        (p, creation): _jw_ladder(p, creation)
        for p in range(n)
        for creation in (False, True)
    }
    return _assemble(tensors, ladders)


def bravyi_kitaev(tensors: FermionTensors) -> PauliSum:
    """Map tensors via Bravyi-Kitaev; isospectral with :func:`jordan_wigner`."""
    return _assemble(tensors, _bk_ladders(tensors.n_modes))


def pauli_count(h: PauliSum) -> int:
    """Number of distinct terms in a simplified sum."""
    return len(h.terms)
