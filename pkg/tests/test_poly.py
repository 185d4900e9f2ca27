from fractions import Fraction

import pytest
from hypothesis import given, settings

from backend.clifford_core import Multivector, vector_embed
from backend.errors import DimensionMismatch, UnknownVariable
from backend.poly import CliffordPoly, linear_images
from tests.strategies import polynomials


def test_vector_variable_squares_to_minus_norm():
    x = CliffordPoly.vector_variable(3, "x")
    assert x * x == -CliffordPoly.norm_squared(3, "x")


def test_dirac_of_vector_variable():
    x = CliffordPoly.vector_variable(4, "x")
    assert x.dirac_left("x") == CliffordPoly.constant(4, -4)


@settings(max_examples=30, deadline=None)
@given(polynomials(3))
def test_dirac_squares_to_minus_laplacian(p):
    assert p.dirac_left("x").dirac_left("x") == -p.laplacian("x")


@settings(max_examples=30, deadline=None)
@given(polynomials(3, ("x", "u")))
def test_partials_commute(p):
    assert p.partial("x", 1).partial("u", 2) == p.partial("u", 2).partial("x", 1)


@settings(max_examples=30, deadline=None)
@given(polynomials(3, ("x", "u")))
def test_euler_counts_degree(p):
    for degree, part in p.split_degree("u").items():
        assert part.euler("u") == part.scale(degree)


@settings(max_examples=30, deadline=None)
@given(polynomials(3))
def test_dirac_vector_anticommutator(p):
    # D_x x + x D_x = -2 E_x - m
    lhs = p.vector_left_mul("x").dirac_left("x") + p.dirac_left("x").vector_left_mul("x")
    assert lhs == -p.euler("x").scale(2) - p.scale(3)


def test_pairing_with_coordinates():
    p = CliffordPoly.pairing(3, "u", (1, 2, 3))
    assert p.evaluate({"u": (1, 1, 1)}) == Multivector.scalar(3, 6)


def test_evaluate_requires_every_variable():
    p = CliffordPoly.variable(3, "x", 1) * CliffordPoly.variable(3, "u", 2)
    with pytest.raises(UnknownVariable):
        p.evaluate({"x": (1, 0, 0)})
    assert p.evaluate({"x": (2, 0, 0), "u": (0, 3, 0)}) == Multivector.scalar(3, 6)


def test_substitute_checks_dimension():
    with pytest.raises(DimensionMismatch):
        CliffordPoly.variable(3, "x", 1).substitute({"x": (1, 2)})


def test_rename_and_compose():
    p = CliffordPoly.variable(3, "u", 1) * CliffordPoly.variable(3, "u", 2)
    assert p.rename("u", "v").variables() == {"v"}
    doubled = p.compose("u", linear_images(3, "u", [[2, 0, 0], [0, 1, 0], [0, 0, 1]]))
    assert doubled == p.scale(2)


def test_translation_images():
    p = CliffordPoly.variable(3, "x", 1)
    shifted = p.compose("x", linear_images(3, "x", [[1, 0, 0], [0, 1, 0], [0, 0, 1]], (Fraction(1), 0, 0)))
    assert shifted == p + CliffordPoly.constant(3)


def test_left_and_right_multiplication_differ():
    e1, e2 = Multivector.basis_vector(3, 1), Multivector.basis_vector(3, 2)
    p = CliffordPoly.from_multivector(e1)
    assert p.left_mul(e2) == -p.right_mul(e2)
    assert p.right_mul(e2).constant_multivector() == e1 * e2


def test_homogeneity_and_degrees():
    p = CliffordPoly.norm_squared(3, "u") * CliffordPoly.variable(3, "x", 1)
    assert p.is_homogeneous("u", 2)
    assert p.degrees("x") == {1}
    assert not p.is_homogeneous("u", 1)


def test_vector_poly_evaluates_to_vector():
    p = CliffordPoly.from_multivector(vector_embed([1, 2, 3]))
    assert p.constant_multivector().vector_coords() == (1, 2, 3)
