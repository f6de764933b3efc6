import numpy as np
import pytest

from gamedecomp.core import Game, TableGame, UtilityTable
from gamedecomp.generator import GeneratorSpec, generate_game

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def record():
    def _record(line):
        ACCEPTANCE_LINES.append(line)
        print(line)
    return _record


def constant_game(choices, value=3.0):
    return Game(choices, lambda i, a: value)


@pytest.fixture
def three_player_game():
    """3 players, 3 choices; player 1's utility also depends on player 2."""
    spec = GeneratorSpec(3, 3, ((0, 1), (0, 1, 2), (2,)), (0, 9), rng_seed=11)
    return generate_game(spec)


def random_table_game(rng, n_players, max_choices, payoff_max=4):
    choices = tuple(int(c) for c in rng.integers(1, max_choices + 1, size=n_players))
    tables = []
    for i in range(n_players):
        scope = sorted({i} | {int(j) for j in rng.choice(n_players, size=rng.integers(0, n_players + 1))})
        shape = tuple(choices[j] for j in scope)
        tables.append(UtilityTable(i, tuple(scope), rng.integers(0, payoff_max + 1, size=shape)))
    return TableGame(choices, tables)
