from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from backend.clifford_core import Multivector
from backend.config import SpaceKind
from backend.errors import NotInSpaceError, SamplePointError
from backend.poly import CliffordPoly
from backend.radial_ring import (
    RadialFn,
    align,
    inversion_substitute,
    kelvin_embed,
    reflect_substitute,
)
from backend.spaces import build_basis
from tests.strategies import polynomials


@pytest.mark.parametrize("m", [3, 4, 5])
def test_newton_kernel_is_harmonic(m):
    assert RadialFn.radial_power(m, 2 - m).laplacian("x").is_zero()


@pytest.mark.parametrize("m", [3, 4, 5])
def test_cauchy_kernel_is_monogenic(m):
    cauchy = RadialFn.from_poly(CliffordPoly.vector_variable(m, "x"), -m)
    assert cauchy.dirac_left("x").is_zero()


def test_normalization_absorbs_norm_powers():
    r2 = RadialFn.from_poly(CliffordPoly.norm_squared(3, "x"))
    assert r2 == RadialFn.radial_power(3, 2)
    assert (r2 * RadialFn.radial_power(3, -4)) == RadialFn.radial_power(3, -2)


@settings(max_examples=25, deadline=None)
@given(polynomials(3, ("x", "u"), max_power=2), st.integers(-5, 3))
def test_dirac_squares_to_minus_laplacian(p, t):
    f = RadialFn.from_poly(p, t)
    assert f.dirac_left("x").dirac_left("x") == -f.laplacian("x")


@settings(max_examples=25, deadline=None)
@given(polynomials(3, ("x", "u"), max_power=2), st.integers(-5, 3))
def test_inversion_substitution_is_an_involution(p, t):
    f = RadialFn.from_poly(p, t)
    assert inversion_substitute(inversion_substitute(f)) == f


@settings(max_examples=25, deadline=None)
@given(polynomials(3, ("x", "u"), max_power=2), st.integers(-3, 3))
def test_reflection_substitution_is_an_involution(p, t):
    f = RadialFn.from_poly(p, t)
    assert reflect_substitute(reflect_substitute(f)) == f


def test_evaluate_at_pythagorean_point(pythagorean_x):
    f = RadialFn.radial_power(3, -1)
    assert f.evaluate({"x": pythagorean_x}) == Multivector.scalar(3, Fraction(1, 13))


def test_evaluate_rejects_irrational_norm_and_origin():
    f = RadialFn.radial_power(3, -1)
    with pytest.raises(SamplePointError):
        f.evaluate({"x": (1, 1, 0)})
    with pytest.raises(SamplePointError):
        f.evaluate({"x": (0, 0, 0)})


def test_kelvin_embed_degree_bookkeeping():
    h = build_basis(3, 2, SpaceKind.HARMONIC_SCALAR).elements[0]
    f = kelvin_embed(h, 2, -1)
    assert set(f.terms) == {-5}
    assert f.homogeneity_degree() == -1


def test_kelvin_embed_requires_homogeneity():
    p = CliffordPoly.variable(3, "u", 1) + CliffordPoly.norm_squared(3, "u")
    with pytest.raises(NotInSpaceError):
        kelvin_embed(p, 1, 0)


def test_kelvin_embed_at_zero_weight_is_scale_invariant():
    for h in build_basis(3, 2, SpaceKind.HARMONIC_SCALAR, "u").elements:
        f = kelvin_embed(h, 2, 0)
        assert f.evaluate({"x": (3, 4, 12), "u": (1, 2, 2)}) == f.evaluate({"x": (6, 8, 24), "u": (1, 2, 2)})


def test_align_shares_exponents():
    f = RadialFn.radial_power(3, -3)
    g = RadialFn.from_poly(CliffordPoly.constant(3), -1)
    aligned = align(f, g)
    t0, (pf, pg) = aligned[1]
    assert t0 == -3
    assert pf == CliffordPoly.constant(3)
    assert pg == CliffordPoly.norm_squared(3, "x")


def test_term_count_and_text():
    f = RadialFn.from_poly(CliffordPoly.variable(3, "x", 1) + CliffordPoly.variable(3, "x", 2), -3)
    assert f.term_count() == 2
    assert f.to_text().startswith("||x||^(-3)*[")
    assert RadialFn.zero(3).to_text() == "0"
