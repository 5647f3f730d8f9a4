import pytest

from wmgame.game_core import CostParameters, Scenario
from wmgame.game_core import PayoffMatrix


WORKED_COSTS = CostParameters(
    i_def=1.0, i_att=0.5, o_def=0.25, o_att=0.25,
    r_def_minus=0.2, r_def_plus=0.5, r_att_minus=0.2, r_att_plus=0.5,
    k=0.5, lam=0.2,
)


def worked_scenario(**cost_overrides) -> Scenario:
    s = Scenario((0.1, 0.5), (0.1, 0.9), ((0.6, 0.1), (0.9, 0.6)), WORKED_COSTS)
    return s.with_costs(**cost_overrides) if cost_overrides else s


@pytest.fixture
def worked():
    return worked_scenario()


@pytest.fixture
def pennies():
    a = [[1.0, -1.0], [-1.0, 1.0]]
    return PayoffMatrix(a, [[-v for v in row] for row in a])


@pytest.fixture
def dominant():
    # row 1 strictly dominant for Alice, column 1 for Bob
    return PayoffMatrix([[3.0, 2.0], [1.0, 0.0]], [[3.0, 1.0], [2.0, 0.0]])


@pytest.fixture
def no_interior():
    # Bob's column 1 dominates; the indifference solution leaves [0, 1]
    return PayoffMatrix([[2.0, 0.0], [1.0, 3.0]], [[4.0, 1.0], [3.0, 2.0]])
