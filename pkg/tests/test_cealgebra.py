import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iwasawa.cealgebra import (
    DIM,
    KForm,
    basis_vector,
    ce_differential,
    e,
    jacobi_residual,
    lie_bracket,
    omega,
    omega_bar,
    structure_constants,
    wedge,
    wedge_all,
)


def test_wedge_basics():
    assert wedge(e(1), e(1)).is_zero()
    assert wedge(e(1), e(2)).coeffs == {(1, 2): 1}
    assert wedge(e(2), e(1)).coeffs == {(1, 2): -1}


def test_omega_wedge_conjugate():
    # (e1 + i e2) ^ (e1 - i e2) = -i e12 + i e21 = -2i e12
    w = wedge(omega(1), omega_bar(1))
    assert w.coeffs == {(1, 2): -2j}


def test_wedge_degree_overflow():
    with pytest.raises(ValueError):
        wedge(KForm.basis(1, 2, 3, 4), KForm.basis(1, 2, 3))


def test_structure_equations():
    assert ce_differential(e(5)).coeffs == {(1, 3): 1, (2, 4): -1}  # e13 + e42
    assert ce_differential(e(6)).coeffs == {(1, 4): 1, (2, 3): 1}
    for i in range(1, 5):
        assert ce_differential(e(i)).is_zero()


def test_d_omega3_is_omega12():
    assert ce_differential(omega(3)).allclose(wedge(omega(1), omega(2)))


def test_d_squared_zero_on_every_basis_form():
    for k in range(DIM + 1):
        for idx in itertools.combinations(range(1, DIM + 1), k):
            dd = ce_differential(ce_differential(KForm.basis(*idx))) if k < DIM else KForm.zero(DIM)
            assert dd.coeffs == {}


def test_top_degree_differential_is_zero():
    assert ce_differential(KForm.basis(1, 2, 3, 4, 5, 6)).is_zero()


def test_image_of_d_on_one_forms_is_self_dual():
    sd = [KForm.basis(1, 3) + KForm.basis(4, 2), KForm.basis(1, 4) + KForm.basis(2, 3)]
    for i in range(1, 7):
        w = ce_differential(e(i))
        residual = w - sd[0] * w.coefficient(1, 3) - sd[1] * w.coefficient(1, 4)
        assert residual.is_zero()


def test_brackets():
    E = basis_vector
    assert np.array_equal(lie_bracket(E(1), E(2)), np.zeros(6))
    assert np.array_equal(lie_bracket(E(1), E(3)), -E(5))
    assert np.array_equal(lie_bracket(E(5), E(6)), np.zeros(6))


def test_bracket_convention_matches_differential():
    # d alpha(X, Y) = -alpha([X, Y]) for every basis 1-form and basis pair
    for k in range(1, 7):
        dk = ce_differential(e(k))
        for i, j in itertools.combinations(range(1, 7), 2):
            X, Y = basis_vector(i), basis_vector(j)
            assert dk.evaluate(X, Y) == -lie_bracket(X, Y)[k - 1]


def test_structure_constants_exact():
    C = structure_constants(exact=True)
    assert all(isinstance(x, int) for m in C for r in m for x in r)
    # only e5 and e6 fail to be closed
    assert all(C[k][i][j] == 0 for k in range(4) for i in range(6) for j in range(6))
    assert jacobi_residual() == 0


def test_kform_json_round_trip():
    w = omega(1) ^ omega_bar(2) ^ e(5)
    data = w.to_dict()
    assert data["degree"] == 3
    assert {"idx", "re", "im"} <= set(data["terms"][0])
    assert KForm.from_dict(data).allclose(w)


@st.composite
def kforms(draw, degree=None):
    k = draw(st.integers(0, DIM)) if degree is None else degree
    indices = list(itertools.combinations(range(1, DIM + 1), k))
    chosen = draw(st.lists(st.sampled_from(indices), max_size=5, unique=True))
    coeff = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
    return KForm(k, {I: draw(coeff) for I in chosen})


@settings(max_examples=200, deadline=None)
@given(kforms(), kforms())
def test_leibniz_rule(a, b):
    if a.degree + b.degree >= DIM:
        return
    lhs = ce_differential(a ^ b)
    rhs = (ce_differential(a) ^ b) + (a ^ ce_differential(b)) * (-1) ** a.degree
    assert lhs.allclose(rhs, tol=1e-12 * (1 + a.norm() * b.norm()))


@settings(max_examples=200, deadline=None)
@given(kforms(), kforms())
def test_graded_anticommutativity(a, b):
    if a.degree + b.degree > DIM:
        return
    assert (a ^ b).allclose((b ^ a) * (-1) ** (a.degree * b.degree), tol=1e-12 * (1 + a.norm() * b.norm()))


@settings(max_examples=100, deadline=None)
@given(kforms(), kforms(), kforms())
def test_wedge_associative(a, b, c):
    if a.degree + b.degree + c.degree > DIM:
        return
    tol = 1e-10 * (1 + a.norm() * b.norm() * c.norm())
    assert ((a ^ b) ^ c).allclose(a ^ (b ^ c), tol=tol)


def test_leibniz_on_random_pairs(rng):
    # 500 random dense pairs across all admissible degrees
    for _ in range(500):
        p = rng.integers(0, 6)
        q = rng.integers(0, 6 - p)  # d(a ^ b) needs total degree <= 5
        forms = []
        for k in (p, q):
            idx = list(itertools.combinations(range(1, 7), k))
            forms.append(KForm(k, {I: complex(*rng.standard_normal(2)) for I in idx}))
        a, b = forms
        lhs = ce_differential(a ^ b)
        rhs = (ce_differential(a) ^ b) + (a ^ ce_differential(b)) * (-1) ** p
        assert lhs.allclose(rhs, tol=1e-12)


def test_wedge_all_top_form():
    top = wedge_all(*(omega(k) for k in (1, 2, 3)), *(omega_bar(k) for k in (1, 2, 3)))
    assert top.coeffs == {(1, 2, 3, 4, 5, 6): -8j}
