import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from checkersim import GameState, Player  # noqa: E402
from oracle import INDEX  # noqa: E402


def position(pieces, to_move=1):
    """GameState from ``{(row, col): player}``."""
    board = [0] * 32
    for rc, p in pieces.items():
        board[INDEX[rc]] = p
    return GameState(tuple(board), Player(to_move))


@pytest.fixture
def capture_fixture():
    # one capture (3,2)x(4,3) among five legal moves for player one
    return position({(3, 2): 1, (4, 3): 2, (0, 7): 1})


@pytest.fixture
def menace_fixture():
    # player one's piece on (3,2) is menaced by (4,3); it has three saving moves
    # out of eight legal moves
    return position({(3, 2): 1, (4, 3): 2, (5, 4): 2, (0, 1): 1, (0, 5): 1, (0, 7): 1})


TRAPPED_TEXT = """\
2#.#.#2#
#.#.#.#.
.#1#2#.#
#2#.#.#.
2#.#.#.#
#2#.#.#.
.#.#1#.#
#.#.#1#1
1
"""


@pytest.fixture
def trapped_fixture():
    # the menaced piece on square 21 can move, but every destination is capturable
    from checkersim import from_text
    return from_text(TRAPPED_TEXT)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
