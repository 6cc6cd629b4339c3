import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from checkersim import (AgentSpec, Complementary, Expertise, GameState, MoveKind,
                        NoLegalMoveError, Player, RandomSource, captures_available,
                        choose_move, defensive_move, initial_state, legal_moves,
                        offensive_move, random_move, save_moves)
from conftest import position
from oracle import random_positions

TRIALS = 100_000


def within_3_sigma(count, n, p):
    return abs(count / n - p) <= 3 * math.sqrt(p * (1 - p) / n)


def test_expertise_validation():
    with pytest.raises(ValueError):
        Expertise(1.2, 0.5)
    with pytest.raises(ValueError):
        Expertise(0.5, -0.1)
    with pytest.raises(ValueError):
        Complementary(1.2)


def test_single_legal_move_still_consumes_one_draw():
    s = position({(0, 7): 1, (7, 0): 2})
    assert len(legal_moves(s)) == 1
    rng, ref = RandomSource(5), RandomSource(5)
    assert random_move(s, rng) == legal_moves(s)[0]
    ref.next_u64()
    assert rng.next_u64() == ref.next_u64()


def test_no_legal_move_is_an_error():
    s = position({(7, 0): 2, (6, 1): 1, (5, 2): 1}, to_move=2)
    with pytest.raises(NoLegalMoveError):
        random_move(s, RandomSource(1))


def test_random_move_is_uniform_on_the_initial_position():
    s = initial_state()
    moves = legal_moves(s)
    rng = RandomSource(2024)
    counts = Counter(random_move(s, rng) for _ in range(TRIALS))
    assert set(counts) == set(moves)
    for m in moves:
        assert within_3_sigma(counts[m], TRIALS, 1 / 7)
    chi2 = sum((c - TRIALS / 7) ** 2 / (TRIALS / 7) for c in counts.values())
    assert chi2 < 22.46  # 0.999 quantile, 6 degrees of freedom


def test_equal_seeds_give_equal_moves():
    for board, side in random_positions(30, seed=3):
        s = GameState(board, Player(side))
        if not legal_moves(s):
            continue
        assert random_move(s, RandomSource(77)) == random_move(s, RandomSource(77))


def _trace(fn, states, seed):
    rng = RandomSource(seed)
    return [fn(s, rng) for s in states]


PLAYABLE = [GameState(b, Player(p)) for b, p in random_positions(200, seed=8)
            if GameState(b, Player(p)).count(Player(3 - p)) > 0
            and legal_moves(GameState(b, Player(p)))]


def test_zero_expertise_reduces_to_random_move():
    ref = _trace(random_move, PLAYABLE, 1)
    assert _trace(lambda s, r: defensive_move(s, 0.0, r), PLAYABLE, 1) == ref
    assert _trace(lambda s, r: offensive_move(s, 0.0, r), PLAYABLE, 1) == ref


def test_pure_strategies_reduce_to_single_move_types():
    for o, d in [(0.3, 0.8), (1.0, 0.0), (0.6, 1.0)]:
        off = _trace(lambda s, r: offensive_move(s, o, r), PLAYABLE, 4)
        dfn = _trace(lambda s, r: defensive_move(s, d, r), PLAYABLE, 4)
        always_off = AgentSpec(Expertise(d, o), Complementary(1.0))
        never_off = AgentSpec(Expertise(d, o), Complementary(0.0))
        assert _trace(lambda s, r: choose_move(s, always_off, r), PLAYABLE, 4) == off
        assert _trace(lambda s, r: choose_move(s, never_off, r), PLAYABLE, 4) == dfn


def test_full_defence_always_saves(menace_fixture):
    saves = set(save_moves(menace_fixture))
    rng = RandomSource(3)
    for _ in range(2000):
        assert defensive_move(menace_fixture, 1.0, rng) in saves


def test_half_defence_mixture(menace_fixture):
    saves = set(save_moves(menace_fixture))
    mass = len(saves) / len(legal_moves(menace_fixture))
    assert mass == 3 / 8
    rng = RandomSource(6)
    hits = sum(defensive_move(menace_fixture, 0.5, rng) in saves for _ in range(TRIALS))
    assert within_3_sigma(hits, TRIALS, 0.5 + 0.5 * mass)


def test_full_offence_always_captures(capture_fixture):
    rng = RandomSource(3)
    for _ in range(2000):
        assert offensive_move(capture_fixture, 1.0, rng).kind is MoveKind.CAPTURE


def _capture_rate(state, o, seed):
    rng = RandomSource(seed)
    return sum(offensive_move(state, o, rng).kind is MoveKind.CAPTURE for _ in range(TRIALS))


def test_offence_mixture(capture_fixture):
    assert len(legal_moves(capture_fixture)) == 5
    assert within_3_sigma(_capture_rate(capture_fixture, 0.75, 8), TRIALS, 0.75 + 0.25 / 5)


def test_capture_propensity_is_monotone_in_o(capture_fixture):
    rates = [_capture_rate(capture_fixture, o, 10 + i)
             for i, o in enumerate((0.0, 0.25, 0.5, 0.75, 1.0))]
    assert rates == sorted(rates)
    assert rates[-1] == TRIALS


@pytest.mark.parametrize("d", [0.0, 0.5, 1.0])
def test_fully_offensive_captures_regardless_of_d(capture_fixture, d):
    agent = AgentSpec.fully_offensive(d)
    rng = RandomSource(int(d * 10))
    for _ in range(500):
        assert choose_move(capture_fixture, agent, rng).kind is MoveKind.CAPTURE


def test_cautious_defence_prefers_safe_squares():
    # nothing is menaced; stepping to (4,3) would walk next to (5,4) with (3,2) empty
    s = position({(3, 4): 1, (5, 4): 2, (6, 5): 2}, to_move=1)
    assert save_moves(s) == []
    rng = RandomSource(1)
    for _ in range(500):
        m = defensive_move(s, 1.0, rng, cautious=True)
        assert m.to_sq != 17  # (4,3) is menaced by (5,4)


agent_strategy = st.builds(
    lambda d, o, theta, fo: AgentSpec.fully_offensive(d) if fo
    else AgentSpec.complementary(d, o, theta),
    st.floats(0, 1), st.floats(0, 1), st.floats(0, 1), st.booleans())


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(PLAYABLE), agent_strategy, st.integers(0, 2**64 - 1))
def test_choose_move_returns_a_legal_move(state, agent, seed):
    m = choose_move(state, agent, RandomSource(seed))
    assert m in legal_moves(state)
    if isinstance(agent.strategy, type(AgentSpec.fully_offensive(0).strategy)):
        if captures_available(state):
            assert m.kind is MoveKind.CAPTURE


def test_agent_vector_layout():
    v = AgentSpec.complementary(0.25, 0.5, 0.75).as_vector()
    assert np.array_equal(v, [0.0, 0.75, 0.25, 0.5, 0.0])
    assert AgentSpec.fully_offensive(0.5, cautious=True).as_vector()[[0, 2, 3, 4]].tolist() == [1, 0.5, 1, 1]
