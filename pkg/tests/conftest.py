import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from novelgames.core import (  # noqa: E402
    ALL_DIRECTIONS,
    DIAGONALS,
    ORTHOGONALS,
    BoardGeometry,
    Direction,
    GameSpec,
    OpeningRule,
    Polarity,
    WinRule,
    apply_move,
    initial_state,
    legal_moves,
)


def square(n, m, **kw):
    return GameSpec.symmetric(BoardGeometry.finite(n, n), m, id=kw.pop("id", f"sq{n}m{m}"), **kw)


@pytest.fixture
def ttt():
    return square(3, 3, id="ttt")


@pytest.fixture
def five_by_five_three():
    return square(5, 3, id="5x5m3")


def play(spec, moves):
    state = initial_state(spec)
    for cell in moves:
        state = apply_move(state, cell, spec)
    return state


DIRECTION_SETS = [ALL_DIRECTIONS, ORTHOGONALS, DIAGONALS, frozenset({Direction.HORIZONTAL})]


@st.composite
def specs(draw, infinite=True, loses=True):
    if infinite and draw(st.booleans()) and draw(st.booleans()):
        geometry = BoardGeometry.infinite()
    else:
        geometry = BoardGeometry.finite(draw(st.integers(1, 8)), draw(st.integers(1, 8)))
    rules = []
    for _ in range(2):
        polarity = Polarity.COMPLETING_LOSES if loses and draw(st.integers(0, 4)) == 0 else Polarity.COMPLETING_WINS
        rules.append(WinRule(draw(st.integers(2, 5)), draw(st.sampled_from(DIRECTION_SETS)), polarity))
    opening = draw(st.sampled_from([OpeningRule(), OpeningRule(first=2), OpeningRule(second=2)]))
    return GameSpec("hyp", "hyp", geometry, rules[0], rules[1], opening)


@st.composite
def spec_and_state(draw, **kw):
    """A spec plus an ongoing state reached by random legal play."""
    spec = draw(specs(**kw))
    seed = draw(st.integers(0, 2**32 - 1))
    plies = draw(st.integers(0, 30))
    rng = np.random.default_rng(seed)
    state = initial_state(spec)
    for _ in range(plies):
        moves = legal_moves(state, spec)
        nxt = apply_move(state, moves[rng.integers(len(moves))], spec)
        if nxt.status.is_terminal:
            break
        state = nxt
    return spec, state


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for name, ok, detail in results:
            terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
