import pytest

from wsobolev import (CorpusSpec, EquilibriumSolution, build_eta_grid, hat_corpus,
                      make_pair, power_weight, unit_weight)


@pytest.fixture(scope="session")
def pair_x():
    """v0 = 1, v1 = x, p = 2: the main closed-form family."""
    return make_pair(unit_weight(), power_weight(1.0), 2.0)


@pytest.fixture(scope="session")
def pair_unit():
    return make_pair(unit_weight(), unit_weight(), 2.0)


@pytest.fixture(scope="session")
def pair_recip():
    """v0 = 1/x, v1 = 1, p = 2: the mirrored closed-form family."""
    return make_pair(power_weight(-1.0), unit_weight(), 2.0)


@pytest.fixture(scope="session")
def sol_x(pair_x):
    return EquilibriumSolution(pair_x)


@pytest.fixture(scope="session")
def sol_unit(pair_unit):
    return EquilibriumSolution(pair_unit, require_s6=False)


@pytest.fixture(scope="session")
def sol_recip(pair_recip):
    return EquilibriumSolution(pair_recip)


@pytest.fixture(scope="session")
def grid_x(sol_x):
    return build_eta_grid(sol_x, 6)


@pytest.fixture(scope="session")
def corpus():
    return hat_corpus(CorpusSpec())
