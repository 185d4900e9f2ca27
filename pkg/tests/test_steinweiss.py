import pytest

from backend.config import SpaceKind
from backend.errors import NotInSpaceError
from backend.poly import CliffordPoly
from backend.spaces import sample_function
from backend.steinweiss import (
    dirac_duality_check,
    monogenic_witness,
    rs_projection_equivalence,
    spinor_basis,
)


def test_spinor_basis_spans_the_ideal():
    assert len(spinor_basis(3)) == 4


def test_duality_on_monogenic_witness():
    f = monogenic_witness(3)
    assert not f.dirac_left("x")
    result = dirac_duality_check(3, f)
    assert result.passed
    assert result.details["monogenic"] is True
    assert result.details["pairings_vanish"] is True


def test_duality_on_non_monogenic_function():
    result = dirac_duality_check(3, CliffordPoly.variable(3, "x", 1))
    assert result.passed
    assert result.details["monogenic"] is False
    assert result.details["dual_sign_consistent"] is True


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_rarita_schwinger_projection(seed):
    f = sample_function(3, 1, SpaceKind.MONOGENIC_CLIFFORD, seed)
    result = rs_projection_equivalence(3, 1, f)
    assert result.passed
    assert result.details["almansi_consistent"] is True


def test_projection_requires_monogenic_input():
    with pytest.raises(NotInSpaceError):
        rs_projection_equivalence(3, 1, CliffordPoly.variable(3, "u", 1))
