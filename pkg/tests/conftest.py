from fractions import Fraction

import pytest

from curvlab.models import berger_product, random_chart


@pytest.fixture(scope="session")
def berger4():
    """Exact Berger product at t = 4."""
    return berger_product(Fraction(4))


@pytest.fixture(scope="session")
def berger4_stack(berger4):
    return berger4.stack


@pytest.fixture(scope="session")
def chart4():
    """One float random 4-chart shared across tests."""
    return random_chart(4, seed=42, jet_order=3)


@pytest.fixture(scope="session")
def chart4_stack(chart4):
    return chart4.stack
