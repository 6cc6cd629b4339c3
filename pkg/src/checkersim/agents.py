"""Move selection for players with defensive/offensive expertise and a strategy.

Draw order inside one choice is fixed: the strategy coin (theta), then the
expertise coin (d or o), then one index draw. A coin whose probability is
exactly 0 or 1 is decided without a draw, which makes the pure strategies
trace-identical to the move type they reduce to.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _engine
from .board import GameState, Move, _decode, _generate
from .rng import RandomSource


class NoLegalMoveError(RuntimeError):
    """The side to move has pieces but nothing to play; the game should have ended."""


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class Expertise:
    d: float
    o: float

    def __post_init__(self):
        _check_probability("d", self.d)
        _check_probability("o", self.o)


@dataclass(frozen=True)
class Complementary:
    """Offensive move with probability ``theta``, defensive move otherwise."""

    theta: float

    def __post_init__(self):
        _check_probability("theta", self.theta)


@dataclass(frozen=True)
class FullyOffensive:
    """Capture whenever possible, otherwise a defensive move."""


@dataclass(frozen=True)
class AgentSpec:
    expertise: Expertise
    strategy: Complementary | FullyOffensive = field(default_factory=FullyOffensive)
    # Alternative reading of the defensive move: when no menaced piece can be
    # saved, still prefer a move whose moved piece lands unmenaced.
    cautious: bool = False

    def as_vector(self) -> np.ndarray:
        if isinstance(self.strategy, FullyOffensive):
            kind, theta = 1.0, 0.0
        else:
            kind, theta = 0.0, self.strategy.theta
        return np.array([kind, theta, self.expertise.d, self.expertise.o,
                         float(self.cautious)], dtype=np.float64)

    @classmethod
    def complementary(cls, d: float, o: float, theta: float, cautious: bool = False):
        return cls(Expertise(d, o), Complementary(theta), cautious)

    @classmethod
    def fully_offensive(cls, d: float, cautious: bool = False):
        return cls(Expertise(d, 1.0), FullyOffensive(), cautious)


def _prepare(state: GameState):
    board, codes, is_cap, n = _generate(state)
    if n == 0:
        raise NoLegalMoveError(f"player {int(state.to_move)} has no legal move")
    return board, codes, is_cap, n


def random_move(state: GameState, rng: RandomSource) -> Move:
    board, codes, _, n = _prepare(state)
    return _decode(board, int(codes[_engine.pick(rng.state, n)]))


def defensive_move(state: GameState, d: float, rng: RandomSource,
                   cautious: bool = False) -> Move:
    _check_probability("d", d)
    board, codes, _, n = _prepare(state)
    scratch = np.empty(_engine.MAX_MOVES, dtype=np.int64)
    i = _engine.defensive_pick(rng.state, d, board, n, codes, scratch, cautious)
    return _decode(board, int(codes[i]))


def offensive_move(state: GameState, o: float, rng: RandomSource) -> Move:
    _check_probability("o", o)
    board, codes, is_cap, n = _prepare(state)
    scratch = np.empty(_engine.MAX_MOVES, dtype=np.int64)
    i = _engine.offensive_pick(rng.state, o, n, is_cap, scratch)
    return _decode(board, int(codes[i]))


def choose_move(state: GameState, agent: AgentSpec, rng: RandomSource) -> Move:
    board, codes, is_cap, n = _prepare(state)
    scratch = np.empty(_engine.MAX_MOVES, dtype=np.int64)
    i = _engine.choose_pick(rng.state, agent.as_vector(), board, n, codes, is_cap, scratch)
    return _decode(board, int(codes[i]))
