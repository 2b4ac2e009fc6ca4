import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from computable_ga.algebra import (
    BASIS,
    E1,
    E2,
    E3,
    E12,
    E23,
    E31,
    E123,
    ONE,
    CyclicityError,
    Multivector,
    PreconditionError,
    Rotor,
    boost,
    boost_volume,
    geometric_product,
    gp,
    grade0_cyclic_check,
    grade_projection,
    is_unit,
    reverse,
    rotor_exp,
    sandwich,
)
from computable_ga.representation import from_matrix, pauli_rep, to_matrix

coef = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
multivectors = st.lists(coef, min_size=8, max_size=8).map(Multivector)
angles = st.lists(st.floats(min_value=-2 * math.pi, max_value=2 * math.pi), min_size=3, max_size=3)


def close(a: Multivector, b: Multivector, tol=1e-12) -> bool:
    scale = max(1.0, float(np.max(np.abs(a.coefficients))), float(np.max(np.abs(b.coefficients))))
    return a.isclose(b, tol * scale)


# --- basis products ----------------------------------------------------------


@pytest.mark.parametrize("e", [E1, E2, E3])
def test_unit_vectors_square_to_one(e):
    assert e * e == ONE


@pytest.mark.parametrize(
    "a, b, expected",
    [
        (E1, E2, E12),
        (E2, E3, E23),
        (E3, E1, E31),
        (E2, E1, -E12),
        (E12, E3, E123),
        (E123, E123, -ONE),
        (E12, E12, -ONE),
    ],
)
def test_structure_constants(a, b, expected):
    assert a * b == expected


def test_anticommutation_of_distinct_vectors():
    for i, a in enumerate([E1, E2, E3]):
        for j, b in enumerate([E1, E2, E3]):
            expected = 2.0 * ONE if i == j else Multivector()
            assert a * b + b * a == expected


def test_pseudoscalar_is_central():
    for b in BASIS:
        assert E123 * b == b * E123


@given(multivectors)
def test_unit_scalar_is_identity(a):
    assert ONE * a == a
    assert a * ONE == a


@given(multivectors, multivectors, multivectors)
def test_associativity(a, b, c):
    assert close((a * b) * c, a * (b * c), 1e-12)


def test_associativity_bulk():
    rng = np.random.default_rng(11)
    a, b, c = (rng.standard_normal((1000, 8)) for _ in range(3))
    assert np.max(np.abs(gp(gp(a, b), c) - gp(a, gp(b, c)))) <= 1e-12


@given(multivectors, multivectors)
def test_product_matches_pauli_matrices(a, b):
    r = pauli_rep()
    lhs = to_matrix(geometric_product(a, b), r)
    rhs = to_matrix(a, r) @ to_matrix(b, r)
    scale = max(1.0, float(np.max(np.abs(lhs))))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


@given(multivectors, multivectors)
def test_scalar_part_is_cyclic(a, b):
    assert math.isclose((a * b).scalar_part, (b * a).scalar_part, rel_tol=1e-12, abs_tol=1e-10)


# --- reverse -----------------------------------------------------------------


def test_reverse_of_bivector_flips_sign():
    assert reverse(E1 * E2) == E2 * E1 == -E12


def test_reverse_fixes_grades_zero_and_one():
    a = 2.5 * ONE - 1.5 * E1
    assert reverse(a) == a


@given(multivectors, multivectors)
def test_reverse_is_antihomomorphism(a, b):
    assert close(reverse(a * b), reverse(b) * reverse(a))


@given(multivectors)
def test_reverse_is_involution(a):
    assert reverse(reverse(a)) == a


# --- grade projection ----------------------------------------------------------


def test_scalar_projection():
    assert grade_projection(3.0 * ONE + 2.0 * E1, 0) == 3.0 * ONE


def test_vector_part_of_bivector_is_zero():
    assert grade_projection(E1 * E2, 1) == Multivector()


@given(multivectors)
def test_projections_sum_to_input(a):
    assert sum((grade_projection(a, k) for k in range(4)), Multivector()) == a


@pytest.mark.parametrize("k", [-1, 4, 7])
def test_out_of_range_grade_is_domain_error(k):
    with pytest.raises(ValueError):
        grade_projection(E1, k)


def test_non_integer_grade_rejected():
    with pytest.raises(TypeError):
        grade_projection(E1, 1.0)


# --- cyclic grade-0 check ------------------------------------------------------


@given(multivectors, multivectors)
def test_cyclic_check_matches_rearranged_sandwich(F, O):
    v = grade0_cyclic_check([~F, O, F])
    w = grade0_cyclic_check([F, ~F, O])
    assert math.isclose(v, w, rel_tol=1e-12, abs_tol=1e-9)


def test_cyclic_check_single_factor():
    assert grade0_cyclic_check([3.0 * ONE + E12]) == 3.0


def test_cyclic_check_random_triple():
    rng = np.random.default_rng(2)
    a, b, c = (Multivector(rng.standard_normal(8)) for _ in range(3))
    direct = (a * b * c).scalar_part
    assert math.isclose(grade0_cyclic_check([a, b, c]), direct, rel_tol=1e-12)


def test_cyclic_check_rejects_empty():
    with pytest.raises(ValueError):
        grade0_cyclic_check([])


def test_cyclicity_error_is_arithmetic():
    assert issubclass(CyclicityError, ArithmeticError)


# --- rotors --------------------------------------------------------------------


def test_zero_angle_rotor_is_identity():
    assert rotor_exp([0, 0, 0]) == ONE


@pytest.mark.parametrize("t", [0.3, 1.0, -2.2, math.pi / 2])
def test_rotation_in_e12_plane(t):
    S = rotor_exp([0, 0, t])
    assert close(sandwich(S, E1), math.cos(t) * E1 - math.sin(t) * E2)
    assert close(sandwich(S, E3), E3)


def _pauli_expm(theta) -> np.ndarray:
    # exp of the Pauli image of 1/2 (t1 e23 + t2 e31 + t3 e12), via eigendecomposition
    B = Multivector([0, 0, 0, 0, *(0.5 * np.asarray(theta)), 0])
    M = to_matrix(B, pauli_rep())
    w, V = np.linalg.eig(M)
    return V @ np.diag(np.exp(w)) @ np.linalg.inv(V)


@given(angles)
def test_rotor_matches_matrix_exponential(theta):
    expected = from_matrix(_pauli_expm(theta), pauli_rep())
    assert close(rotor_exp(theta), expected, 1e-10)


@given(angles)
def test_rotor_is_unit(theta):
    S = rotor_exp(theta)
    assert (S * ~S).isclose(ONE, 1e-12)
    assert is_unit(S)


def test_rotor_rejects_non_finite_angles():
    with pytest.raises(ValueError):
        rotor_exp([0, math.nan, 0])


def test_rotor_type_rejects_odd_parts_and_non_unit():
    with pytest.raises(PreconditionError):
        Rotor(E1.coefficients)
    with pytest.raises(PreconditionError):
        Rotor((2.0 * ONE).coefficients)


# --- sandwich ------------------------------------------------------------------


@given(multivectors)
def test_sandwich_with_identity(a):
    assert sandwich(ONE, a) == a


@given(angles)
def test_sandwich_fixes_scalars_and_pseudoscalar(theta):
    S = rotor_exp(theta)
    assert close(sandwich(S, ONE), ONE)
    assert close(sandwich(S, E123), E123)


@given(angles, multivectors)
def test_sandwich_preserves_grades_and_invariants(theta, a):
    S = rotor_exp(theta)
    for k in range(4):
        img = sandwich(S, grade_projection(a, k))
        assert close(grade_projection(img, k), img, 1e-11)
    b = sandwich(S, a)
    assert math.isclose(b.scalar_part, a.scalar_part, rel_tol=1e-12, abs_tol=1e-11)
    assert math.isclose((b * ~b).scalar_part, (a * ~a).scalar_part, rel_tol=1e-11, abs_tol=1e-10)


def test_sandwich_rejects_non_unit():
    with pytest.raises(PreconditionError):
        sandwich(2.0 * ONE, E1)


# --- boosts --------------------------------------------------------------------


def test_zero_boost():
    B = boost([0, 0, 0])
    assert B == ONE
    assert boost_volume(B, E123) == E123


@given(st.lists(st.floats(min_value=-3, max_value=3), min_size=3, max_size=3))
def test_boost_inverse_and_self_reverse(w):
    B = boost(w)
    assert close(B * boost([-x for x in w]), ONE)
    assert reverse(B) == B


def test_boost_volume_uses_unreversed_factors():
    w = [0.7, 0.0, 0.0]
    B = boost(w)
    # e123 is central, so S d3x S = S^2 d3x = exp(w . e) d3x
    expected = (math.cosh(0.7) * ONE + math.sinh(0.7) * E1) * E123
    assert close(boost_volume(B, E123), expected)


def test_boost_records_rapidity():
    assert boost([0.1, 0.2, 0.3]).rapidity == (0.1, 0.2, 0.3)


# --- value semantics -------------------------------------------------------------


def test_multivector_is_immutable():
    a = Multivector(range(8))
    with pytest.raises(ValueError):
        a.coefficients[0] = 5.0


def test_indexing_by_name_and_slot():
    a = Multivector(range(8))
    assert a["e31"] == 5.0
    assert a[7] == 7.0


def test_equal_values_hash_equal():
    assert hash(E1 + E2) == hash(E2 + E1)


def test_repr_is_readable():
    assert repr(E1 - 2.5 * E23) == "Multivector(e1 - 2.5*e23)"
    assert repr(Multivector()) == "Multivector(0)"


def test_wrong_length_rejected():
    with pytest.raises(ValueError):
        Multivector([1.0, 2.0])
