"""Pauli algebra: multiplication, commutators, matrices, simplification."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamlab.errors import CapExceededError, InputDataError
from hamlab.pauli import (
    PauliString,
    PauliSum,
    PauliTerm,
    add_identity,
    coeff_one_norm,
    commutator,
    commutes,
    multiply,
    random_hermitian_sum,
    reorder,
    string_matrix,
    term,
    to_matrix,
)

letters_st = st.text(alphabet="IXYZ", min_size=1, max_size=5)


def strings_pair(n):
    return st.tuples(
        st.text(alphabet="IXYZ", min_size=n, max_size=n),
        st.text(alphabet="IXYZ", min_size=n, max_size=n),
    )


def test_multiply_single_qubit_table():
    phase, product = multiply(PauliString("X"), PauliString("Y"))
    assert phase == 1j and product.letters == "Z"


def test_multiply_involution():
    phase, product = multiply(PauliString("XX"), PauliString("XX"))
    assert phase == 1 and product.letters == "II"


def test_multiply_letter_wise():
    # X*Z = -iY on position 0, Z*X = +iY on position 1: phases cancel.
    phase, product = multiply(PauliString("XZ"), PauliString("ZX"))
    assert phase == 1 and product.letters == "YY"


def test_multiply_length_mismatch():
    with pytest.raises(InputDataError):
        multiply(PauliString("X"), PauliString("XX"))


@given(letters_st, letters_st.filter(lambda s: len(s) <= 4), letters_st)
@settings(max_examples=200)
def test_multiply_phase_is_unit(a, b, c):
    n = min(len(a), len(b), len(c))
    a, b = a[:n], b[:n]
    phase, _ = multiply(PauliString(a), PauliString(b))
    assert abs(abs(phase) - 1) < 1e-15
    assert phase in (1, -1, 1j, -1j)


@given(st.integers(1, 4), st.data())
@settings(max_examples=150)
def test_multiply_associative(n, data):
    pick = st.text(alphabet="IXYZ", min_size=n, max_size=n)
    a, b, c = (PauliString(data.draw(pick)) for _ in range(3))
    p1, ab = multiply(a, b)
    p2, ab_c = multiply(ab, c)
    q1, bc = multiply(b, c)
    q2, a_bc = multiply(a, bc)
    assert ab_c == a_bc
    assert p1 * p2 == q1 * q2


@given(st.integers(1, 5), st.data())
@settings(max_examples=100)
def test_multiply_matches_matrix_product(n, data):
    pick = st.text(alphabet="IXYZ", min_size=n, max_size=n)
    a = PauliString(data.draw(pick))
    b = PauliString(data.draw(pick))
    phase, product = multiply(a, b)
    lhs = string_matrix(a) @ string_matrix(b)
    rhs = phase * string_matrix(product)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_commutes_examples():
    assert not commutes(PauliString("X"), PauliString("Z"))
    assert commutes(PauliString("XZ"), PauliString("ZX"))
    assert commutes(PauliString("XI"), PauliString("IZ"))


def test_commutator_single_pair():
    out = commutator(term(0.5, "X"), term(0.3, "Z"))
    assert len(out) == 1
    assert out.terms[0].string.letters == "Y"
    assert abs(out.terms[0].coeff - (-0.3j)) < 1e-15
    assert abs(coeff_one_norm(out) - 0.3) < 1e-15


def test_commutator_self_vanishes():
    assert len(commutator(term(1.0, "X"), term(1.0, "X"))) == 0


def test_commutator_two_qubit_against_matrix():
    a, b = term(1.0, "XX"), term(1.0, "ZI")
    out = commutator(a, b)
    dense = to_matrix(PauliSum.from_terms([a])) @ to_matrix(PauliSum.from_terms([b]))
    dense -= to_matrix(PauliSum.from_terms([b])) @ to_matrix(PauliSum.from_terms([a]))
    assert np.max(np.abs(to_matrix(out) - dense)) < 1e-12
    assert len(out) == 1
    assert out.terms[0].string.letters == "YX"
    assert abs(out.terms[0].coeff - (-2j)) < 1e-15


@given(st.integers(1, 4), st.data())
@settings(max_examples=100)
def test_commutator_antisymmetric(n, data):
    pick = st.text(alphabet="IXYZ", min_size=n, max_size=n)
    coeffs = st.floats(-2, 2, allow_nan=False)
    a = PauliTerm(data.draw(coeffs), PauliString(data.draw(pick)))
    b = PauliTerm(data.draw(coeffs), PauliString(data.draw(pick)))
    ab = commutator(a, b)
    ba = commutator(b, a)
    assert len(ab) == len(ba)
    for ta, tb in zip(ab.terms, ba.terms):
        assert ta.string == tb.string
        assert abs(ta.coeff + tb.coeff) < 1e-12


def test_coeff_one_norm_basics():
    h = PauliSum.from_terms([term(0.5, "X"), term(0.5, "Z")])
    assert coeff_one_norm(h) == 1.0
    assert coeff_one_norm(PauliSum(2, ())) == 0.0


def test_coeff_one_norm_xxz_l2():
    from hamlab.spin_models import SpinModelSpec, generate

    h = generate(SpinModelSpec("xxz_chain", 2, {"J": 1.0, "delta": 2.0}))
    assert coeff_one_norm(h) == pytest.approx(4.0)


def test_to_matrix_examples():
    z = to_matrix(PauliSum.from_terms([term(1.0, "Z")]))
    assert np.allclose(z, np.diag([1, -1]))
    xz = to_matrix(PauliSum.from_terms([term(1.0, "X"), term(1.0, "Z")]))
    assert np.allclose(xz, np.array([[1, 1], [1, -1]]))


def test_to_matrix_big_endian_occupation():
    # (II - ZI)/2 measures qubit 0, the most significant index bit.
    h = PauliSum.from_terms([term(0.5, "II"), term(-0.5, "ZI")])
    assert np.allclose(to_matrix(h), np.diag([0, 0, 1, 1]))


def test_to_matrix_cap():
    with pytest.raises(CapExceededError):
        to_matrix(PauliSum.from_terms([term(1.0, "Z" * 13)]))


@given(st.integers(1, 5), st.integers(1, 8), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_one_norm_bounds_spectral_norm(n, num_terms, seed):
    rng = np.random.default_rng(seed)
    h = random_hermitian_sum(rng, n, num_terms)
    spectral = np.linalg.norm(to_matrix(h), 2) if len(h) else 0.0
    assert spectral <= coeff_one_norm(h) + 1e-9


@given(st.integers(1, 4), st.integers(1, 10), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_simplify_idempotent_and_matrix_preserving(n, num_terms, seed):
    rng = np.random.default_rng(seed)
    raw_terms = []
    for _ in range(num_terms):
        letters = "".join(rng.choice(list("IXYZ"), size=n))
        raw_terms.append(term(complex(rng.normal(), rng.normal()), letters))
    h = PauliSum(n, tuple(raw_terms))
    s1 = h.simplify()
    s2 = s1.simplify()
    assert [(t.coeff, t.string) for t in s1.terms] == [(t.coeff, t.string) for t in s2.terms]
    assert np.max(np.abs(to_matrix(h) - to_matrix(s1))) < 1e-12 if len(h) else True
    strings = [t.string.letters for t in s1.terms]
    assert len(strings) == len(set(strings))
    assert all(abs(t.coeff) >= 1e-12 for t in s1.terms)


def test_simplify_keeps_first_occurrence_order():
    h = PauliSum.from_terms([term(1.0, "XI"), term(1.0, "IZ"), term(2.0, "XI")])
    s = h.simplify()
    assert [t.string.letters for t in s.terms] == ["XI", "IZ"]
    assert s.terms[0].coeff == 3.0


def test_add_identity_merges():
    h = PauliSum.from_terms([term(1.0, "Z"), term(0.5, "I")])
    shifted = add_identity(h, 0.5)
    by_string = {t.string.letters: t.coeff for t in shifted.terms}
    assert by_string["I"] == 1.0


def test_reorder_validates_permutation():
    h = PauliSum.from_terms([term(1.0, "X"), term(2.0, "Z")])
    assert [t.coeff for t in reorder(h, [1, 0]).terms] == [2.0, 1.0]
    with pytest.raises(InputDataError):
        reorder(h, [0, 0])
