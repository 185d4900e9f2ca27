from fractions import Fraction

import pytest

from backend.clifford_core import SymbolicConstant
from backend.config import BForm, SpaceKind
from backend.errors import BudgetExceeded, EngineError, PoleError
from backend.operators import (
    a_2,
    b_coefficients,
    build_operator,
    c_alpha_derived,
    c_alpha_printed,
    c_k1,
    constants,
    e_k1,
    lambda_2j,
    make_B,
    make_bosonic,
    make_dirac_power,
    make_fermionic,
    make_higher_spin_laplace,
    make_operator,
    make_rarita_schwinger,
    preserves_target_space,
    rk_squared_expansion_check,
    sum_to_text,
)
from backend.poly import CliffordPoly
from backend.spaces import monogenic_generators, sample_function


@pytest.fixture(scope="module")
def monogenic_functions():
    return [sample_function(3, 1, SpaceKind.MONOGENIC_CLIFFORD, seed) for seed in range(4)]


@pytest.fixture(scope="module")
def harmonic_functions():
    return [sample_function(3, 2, SpaceKind.HARMONIC_SCALAR, seed, x_degree=3) for seed in range(4)]


def test_printed_c_alpha_spot_value():
    assert c_alpha_printed(5, 1, -1) == Fraction(-24, 5)
    assert constants("c_alpha", m=5, k=1, alpha=-1) == Fraction(-24, 5)


def test_derived_c_alpha_spot_value():
    assert c_alpha_derived(5, 1, -1) == Fraction(14, 5)


def test_b_coefficients_spot_value():
    coef = b_coefficients(3, 1, 1)
    assert coef == {"a": Fraction(4, 5), "b": Fraction(-12, 5), "c": Fraction(-4, 5), "d": Fraction(6)}


def test_b_coefficients_pole():
    with pytest.raises(PoleError) as info:
        b_coefficients(4, 0, 1)
    assert info.value.params == {"m": 4, "k": 0, "s": 1}


def test_fundamental_constants():
    assert c_k1(3, 1) == Fraction(1, 3)
    assert a_2(3, 0) == SymbolicConstant(Fraction(-1, 4), -1)
    assert e_k1(3, 1) == SymbolicConstant(Fraction(-3, 4), -1)
    assert e_k1(3, 1, derived=False) == SymbolicConstant(Fraction(3, 4), -1)
    assert lambda_2j(3, 1, 2) == SymbolicConstant(Fraction(-1, 8), -1)


def test_a_2_in_dimension_four():
    assert a_2(4, 0) == SymbolicConstant(Fraction(-1, 4), -2)
    with pytest.raises(PoleError):
        a_2(4, 1)


def test_unknown_names():
    with pytest.raises(EngineError):
        build_operator("nabla", m=3, k=1)
    with pytest.raises(EngineError):
        constants("zeta", m=3)


def test_registry_builds_pipelines():
    op = build_operator("B", m=3, k=1, s=1, form=BForm.RK_DELTA)
    assert op.order == 2
    assert "B_2" in op.name


def test_fermionic_at_k0_is_dirac():
    functions = [sample_function(3, 0, SpaceKind.MONOGENIC_CLIFFORD, seed) for seed in range(3)]
    for f in functions:
        assert make_fermionic(3, 0, 1).apply(f) == make_dirac_power(3, 0, 1).apply(f)


def test_rarita_schwinger_preserves_monogenic_values(monogenic_functions):
    assert preserves_target_space(make_rarita_schwinger(3, 1), SpaceKind.MONOGENIC_CLIFFORD, monogenic_functions)


def test_higher_spin_laplace_preserves_harmonic_values(harmonic_functions):
    op = make_higher_spin_laplace(3, 2)
    assert preserves_target_space(op, SpaceKind.HARMONIC_SCALAR, harmonic_functions)


def test_higher_spin_laplace_forms_agree(harmonic_functions):
    plain = make_higher_spin_laplace(3, 2)
    twistor = make_higher_spin_laplace(3, 2, twistor_form=True)
    for f in harmonic_functions:
        assert plain.apply(f) == twistor.apply(f)


def test_rk_squared_expansion(monogenic_functions):
    assert rk_squared_expansion_check(3, 1, monogenic_functions)


def test_factored_and_expanded_application_agree(monogenic_functions):
    op = make_operator(3, 1, 3)
    for f in monogenic_functions:
        assert op.apply(f) == op.apply_expanded(f)


def test_composition_of_pipelines():
    left, right = make_B(3, 1, 1), make_B(3, 1, 2)
    composed = left @ right
    assert composed.order == 4
    assert composed.factors == left.factors + right.factors


def test_budget_is_enforced():
    x1, x2, x3 = (CliffordPoly.variable(3, "x", i) for i in (1, 2, 3))
    f = x1 * x1 * x2 * x3 * monogenic_generators(3, 1)[0]
    with pytest.raises(BudgetExceeded) as info:
        make_bosonic(3, 1, 2).apply(f, budget=1)
    assert info.value.budget == 1


def test_order_validation():
    with pytest.raises(EngineError):
        make_fermionic(3, 1, 0)
    with pytest.raises(EngineError):
        make_bosonic(3, 1, 0)


def test_text_rendering():
    assert sum_to_text(()) == "0"
    assert make_dirac_power(3, 0, 2).to_text() == "(1*[dirac_x]) . (1*[dirac_x])"
