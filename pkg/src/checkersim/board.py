"""Rules of the four-direction, single-capture, no-crowning checkers variant.

Squares are the 32 dark squares of an 8x8 board, numbered ``row * 4 + col // 2``
with a square dark when ``row + col`` is odd. Player one starts on rows 0-2,
player two on rows 5-7. Every piece steps to any of its four diagonal
neighbours if empty, or jumps a single adjacent opponent piece onto the empty
square directly behind it. There is no promotion, no multi-jump and no
obligation to capture.

Moves are listed by origin square, then direction in the order NE, NW, SE, SW
("north" is increasing row). At most one move exists per (piece, direction).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from . import _engine

EMPTY = 0
N_SQUARES = 32
PIECES_PER_SIDE = 12


class Player(enum.IntEnum):
    ONE = 1
    TWO = 2

    @property
    def opponent(self) -> Player:
        return Player(3 - self.value)


class Status(enum.Enum):
    ONGOING = "ongoing"
    WON = "won"
    DRAW_CAPPED = "draw_capped"


class MoveKind(enum.Enum):
    SIMPLE = "simple"
    CAPTURE = "capture"


class IllegalMoveError(ValueError):
    """Raised when a move is applied that the position does not allow."""


def square_to_rc(index: int) -> tuple[int, int]:
    if not 0 <= index < N_SQUARES:
        raise ValueError(f"square index out of range: {index}")
    row = index // 4
    return row, 2 * (index % 4) + (1 - row % 2)


def rc_to_square(row: int, col: int) -> int:
    if not (0 <= row < 8 and 0 <= col < 8) or (row + col) % 2 == 0:
        raise ValueError(f"({row}, {col}) is not a playable square")
    return row * 4 + col // 2


@dataclass(frozen=True)
class Move:
    kind: MoveKind
    from_sq: int
    to_sq: int
    captured: int | None = None

    def __post_init__(self):
        if (self.kind is MoveKind.CAPTURE) != (self.captured is not None):
            raise ValueError("captured square is required for, and only for, captures")


@dataclass(frozen=True)
class GameState:
    board: tuple[int, ...]
    to_move: Player
    ply: int = 0
    status: Status = Status.ONGOING
    winner: Player | None = None

    def __post_init__(self):
        if len(self.board) != N_SQUARES:
            raise ValueError("board must have 32 entries")
        for p in (Player.ONE, Player.TWO):
            if self.board.count(p) > PIECES_PER_SIDE:
                raise ValueError(f"more than 12 pieces for player {int(p)}")

    def count(self, player: Player) -> int:
        return self.board.count(player)

    def array(self) -> np.ndarray:
        return np.array(self.board, dtype=np.int8)


def initial_board() -> tuple[int, ...]:
    return (1,) * 12 + (EMPTY,) * 8 + (2,) * 12


def initial_state(first_mover: Player = Player.ONE) -> GameState:
    return GameState(board=initial_board(), to_move=Player(first_mover))


def _decode(board: np.ndarray, code: int) -> Move:
    sq = code >> 2
    to, cap = _engine.move_target(board, code)
    if cap < 0:
        return Move(MoveKind.SIMPLE, int(sq), int(to))
    return Move(MoveKind.CAPTURE, int(sq), int(to), int(cap))


def _generate(state: GameState):
    board = state.array()
    codes = np.empty(_engine.MAX_MOVES, dtype=np.int64)
    is_cap = np.empty(_engine.MAX_MOVES, dtype=np.bool_)
    n = _engine.gen_moves(board, int(state.to_move), codes, is_cap)
    return board, codes, is_cap, n


def legal_moves(state: GameState) -> list[Move]:
    board, codes, _, n = _generate(state)
    return [_decode(board, int(c)) for c in codes[:n]]


def captures_available(state: GameState) -> list[Move]:
    return [m for m in legal_moves(state) if m.kind is MoveKind.CAPTURE]


def menaced_pieces(state: GameState, side: Player) -> list[int]:
    """Squares of ``side``'s pieces that the opponent could capture on its turn."""
    board = state.array()
    return [sq for sq in range(N_SQUARES)
            if board[sq] == side and _engine.is_menaced(board, sq)]


def save_moves(state: GameState) -> list[Move]:
    """Moves of menaced pieces of the side to move that leave the moved piece safe."""
    board, codes, _, n = _generate(state)
    out = np.empty(_engine.MAX_MOVES, dtype=np.int64)
    k = _engine.save_moves(board, n, codes, out, True)
    return [_decode(board, int(codes[i])) for i in out[:k]]


def advantage(state: GameState) -> int:
    return state.count(Player.ONE) - state.count(Player.TWO)


def apply_move(state: GameState, move: Move) -> GameState:
    if state.status is not Status.ONGOING:
        raise IllegalMoveError(f"game is over ({state.status.value})")
    if move not in legal_moves(state):
        raise IllegalMoveError(f"{move} is not legal here")
    board = state.array()
    _engine.apply_code(board, move.from_sq * 4 + _direction(move))
    mover = state.to_move
    nxt = GameState(tuple(int(x) for x in board), mover.opponent, state.ply + 1)
    if nxt.count(mover.opponent) == 0 or not legal_moves(nxt):
        nxt = replace(nxt, status=Status.WON, winner=mover)
    return nxt


def _direction(move: Move) -> int:
    r0, c0 = square_to_rc(move.from_sq)
    r1, c1 = square_to_rc(move.to_sq)
    step = ((r1 > r0) - (r1 < r0), (c1 > c0) - (c1 < c0))
    return _engine.DIRECTIONS.index(step)


# ---------------------------------------------------------------------------
# text positions: row 7 first, '#' light squares, then a side-to-move line

_CELL = {EMPTY: ".", 1: "1", 2: "2"}


def to_text(state: GameState) -> str:
    lines = []
    for row in range(7, -1, -1):
        chars = []
        for col in range(8):
            if (row + col) % 2 == 0:
                chars.append("#")
            else:
                chars.append(_CELL[state.board[rc_to_square(row, col)]])
        lines.append("".join(chars))
    lines.append(str(int(state.to_move)))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> GameState:
    lines = text.splitlines()
    if len(lines) != 9:
        raise ValueError(f"expected 9 lines, got {len(lines)}")
    board = [EMPTY] * N_SQUARES
    for i, line in enumerate(lines[:8]):
        row = 7 - i
        if len(line) != 8:
            raise ValueError(f"row {row}: expected 8 characters")
        for col, ch in enumerate(line):
            dark = (row + col) % 2 == 1
            if not dark:
                if ch != "#":
                    raise ValueError(f"({row}, {col}) is a light square, expected '#'")
                continue
            if ch not in ".12":
                raise ValueError(f"({row}, {col}): bad character {ch!r}")
            board[rc_to_square(row, col)] = EMPTY if ch == "." else int(ch)
    side = lines[8].strip()
    if side not in ("1", "2"):
        raise ValueError(f"side-to-move must be 1 or 2, got {side!r}")
    return GameState(tuple(board), Player(int(side)))
