import logging
from fractions import Fraction

import pytest
from loguru import logger

from backend.config import SpaceKind
from backend.spaces import build_basis, reproducing_kernel


@pytest.fixture
def caplog(caplog):
    """Route loguru records into pytest's caplog."""

    class PropagateHandler(logging.Handler):
        def emit(self, record):
            logging.getLogger(record.name).handle(record)

    handler_id = logger.add(PropagateHandler(), format="{message}")
    yield caplog
    logger.remove(handler_id)


@pytest.fixture(scope="session")
def harmonic_basis_3_2():
    return build_basis(3, 2, SpaceKind.HARMONIC_SCALAR)


@pytest.fixture(scope="session")
def monogenic_kernel_3_1():
    return reproducing_kernel(3, 1, SpaceKind.MONOGENIC_CLIFFORD)


@pytest.fixture
def pythagorean_x():
    return (Fraction(3), Fraction(4), Fraction(12))
