import pytest

from bargainlab.presets import THEORY_TREATMENTS, treatment
from bargainlab.solver import solve


@pytest.fixture(scope="session")
def solutions():
    """Solved equilibria for the five theory treatments, computed once."""
    return {name: solve(treatment(name)) for name in THEORY_TREATMENTS}
