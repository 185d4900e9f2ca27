from fractions import Fraction

import pytest

from backend.config import BForm, SpaceKind, VectorSource
from backend.errors import EngineError, PoleError
from backend.identities import (
    check_B_action,
    check_B_commute,
    check_B_forms,
    check_c_alpha,
    check_classical_reduction,
    check_fundamental_solution,
    check_lemma_mixed_ops,
    check_lemma_radial_laplacian,
    check_rk_squared,
    check_telescoping,
    check_twistor_split,
    fit_terms,
    lemma_terms,
    proportionality,
    source_vector,
    zero_check,
)
from backend.radial_ring import RadialFn


@pytest.mark.parametrize("order", [1, 2, 3, 4])
@pytest.mark.parametrize("k", [0, 1])
def test_fundamental_solutions_in_r3(k, order):
    result = check_fundamental_solution(3, k, order)
    assert result.passed, result.residual
    assert result.residual == "0"


@pytest.mark.slow
@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_fundamental_solutions_in_r5(order):
    assert check_fundamental_solution(5, 1, order).passed


def test_classical_restriction_is_flagged():
    result = check_fundamental_solution(6, 0, 6)
    assert result.passed
    assert result.details.get("classical_restriction") is True
    assert "classical_restriction" not in check_fundamental_solution(3, 0, 4).details


def test_c_alpha_operator_application_matches_derived_constant():
    result = check_c_alpha(5, 1, -1)
    assert result.passed
    assert result.details["printed_constant"] == "-24/5"
    assert result.details["measured_constant"] == str(Fraction(14, 5))
    assert result.details["printed_matches"] is False


@pytest.mark.parametrize("alpha", [0, 1, 3])
def test_c_alpha_in_r3(alpha):
    assert check_c_alpha(3, 1, alpha).passed


@pytest.mark.parametrize("source", [VectorSource.BASIS_ELEMENT, VectorSource.RANDOM_COMBINATION])
def test_c_alpha_constant_does_not_depend_on_the_vector(source):
    reference = check_c_alpha(3, 1, 1)
    result = check_c_alpha(3, 1, 1, source=source, seed=2)
    assert result.passed, result.residual
    assert result.details["measured_constant"] == reference.details["measured_constant"]


def test_c_alpha_rejects_small_alpha():
    with pytest.raises(EngineError):
        check_c_alpha(3, 1, -1)


def test_c_alpha_pole():
    with pytest.raises(PoleError):
        check_c_alpha(4, 0, 1)


def test_laplacian_lemma_at_k1():
    result = check_lemma_radial_laplacian(3, 1, 1)
    assert result.passed, result.residual
    assert result.details["fitted"] is not None


def test_mixed_lemma_at_k1():
    results = check_lemma_mixed_ops(3, 1, 1)
    assert set(results) == {"L1", "L2", "L3"}
    assert results["L1"].passed
    assert results["L3"].passed, results["L3"].residual


@pytest.mark.slow
def test_lemmas_at_k2():
    assert check_lemma_radial_laplacian(5, 2, 1).passed
    assert all(r.passed for r in check_lemma_mixed_ops(5, 2, 1).values())


def test_lemma_terms_by_degree():
    assert set(lemma_terms(3, 0, 1)) == {"T1"}
    assert set(lemma_terms(3, 1, 1)) == {"T1", "T2", "T3"}
    assert set(lemma_terms(5, 2, 1)) == {"T1", "T2", "T3", "T4"}


def test_fit_terms_recovers_combination():
    terms = lemma_terms(3, 1, 1)
    target = terms["T1"].scale(2) - terms["T3"].scale(Fraction(1, 2))
    assert fit_terms(target, terms) == {"T1": "2", "T2": "0", "T3": "-1/2"}


def test_B_action_spot_value():
    result = check_B_action(3, 1, 1)
    assert result.passed, result.residual
    assert result.details["d"] == "6"


@pytest.mark.parametrize("form", list(BForm))
def test_B_action_through_every_form(form):
    assert check_B_action(3, 1, 1, form=form).passed


def test_B_action_on_random_vector():
    assert check_B_action(3, 1, 1, source=VectorSource.RANDOM_COMBINATION, seed=3).passed


def test_B_action_pole():
    with pytest.raises(PoleError):
        check_B_action(4, 0, 1)


def test_telescoping():
    assert check_telescoping(3, 1, 2).passed


@pytest.mark.parametrize("seed", [1, 4])
def test_telescoping_on_random_vector(seed):
    result = check_telescoping(3, 1, 2, source=VectorSource.RANDOM_COMBINATION, seed=seed)
    assert result.passed, result.residual


def test_B_forms_agree():
    assert check_B_forms(3, 1, 1, count=4).passed


def test_rk_squared_and_twistor_split():
    assert check_rk_squared(3, 1, count=4).passed
    assert check_twistor_split(3, 1, count=4).passed


def test_B_operators_commute():
    assert check_B_commute(3, 1, 1, 2, count=2).passed


@pytest.mark.parametrize("j", [1, 2])
def test_classical_reduction(j):
    results = check_classical_reduction(3, j, count=4)
    assert results["fermionic"].passed
    assert results["bosonic"].passed


def test_source_vector_kinds():
    h = source_vector(3, 2, SpaceKind.HARMONIC_SCALAR, VectorSource.BASIS_ELEMENT, seed=1)
    assert not h.laplacian("u")
    f = source_vector(3, 2, SpaceKind.MONOGENIC_CLIFFORD, VectorSource.RANDOM_COMBINATION, seed=1)
    assert not f.dirac_left("u")


def test_proportionality():
    f = RadialFn.radial_power(3, -1)
    assert proportionality(f.scale(Fraction(3, 2)), f) == Fraction(3, 2)
    assert proportionality(RadialFn.radial_power(3, -3), f) is None


def test_zero_check_reports_residual():
    result = zero_check(RadialFn.radial_power(3, -1))
    assert not result.passed
    assert result.residual != "0"
    assert zero_check(RadialFn.zero(3)).passed
