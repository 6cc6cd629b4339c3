"""Complete matches and reproducible batches of matches.

Match ``i`` of a batch is seeded with ``derive_match_seed(master_seed, i)`` and
nothing else, so batches can be cut into chunks and run on any number of
threads; results are reassembled by index and never depend on the schedule.
"""

from __future__ import annotations

import csv
import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _engine
from .agents import AgentSpec
from .board import GameState, Player, initial_board
from .rng import derive_match_seed, derive_match_seeds

DEFAULT_MAX_PLIES = 10_000


class EndedBy(enum.IntEnum):
    ELIMINATION = _engine.ELIMINATION
    STALEMATE = _engine.STALEMATE
    CAP = _engine.CAP


@dataclass(frozen=True)
class MatchConfig:
    agent1: AgentSpec
    agent2: AgentSpec
    seed: int
    max_plies: int = DEFAULT_MAX_PLIES

    def __post_init__(self):
        if self.max_plies < 1:
            raise ValueError("max_plies must be at least 1")


@dataclass(frozen=True, eq=False)
class MatchRecord:
    winner: Player | None  # None is a capped draw
    tau: int
    first_mover: Player
    v_trajectory: np.ndarray  # v(t) for t = 1..tau
    capture_plies: np.ndarray
    ended_by: EndedBy

    def __eq__(self, other):
        if not isinstance(other, MatchRecord):
            return NotImplemented
        return (self.winner == other.winner and self.tau == other.tau
                and self.first_mover == other.first_mover
                and self.ended_by == other.ended_by
                and np.array_equal(self.v_trajectory, other.v_trajectory)
                and np.array_equal(self.capture_plies, other.capture_plies))


def _winner(code: int) -> Player | None:
    return None if code == 0 else Player(code)


def _agents(agent1: AgentSpec, agent2: AgentSpec) -> np.ndarray:
    return np.stack([agent1.as_vector(), agent2.as_vector()])


def play_match(config: MatchConfig, start: GameState | None = None) -> MatchRecord:
    """Play one match. With ``start`` the match begins there with ``start.to_move``;
    otherwise from the standard setup with the first mover drawn first."""
    if start is None:
        board = np.array(initial_board(), dtype=np.int8)
        first = 0
    else:
        board = start.array()
        first = int(start.to_move)
    v = np.empty(config.max_plies, dtype=np.int8)
    caps = np.empty(config.max_plies, dtype=np.bool_)
    w, tau, f, e = _engine.play(board, first, _agents(config.agent1, config.agent2),
                                np.uint64(config.seed), config.max_plies, v, caps)
    return MatchRecord(_winner(w), int(tau), Player(f), v[:tau].copy(),
                       caps[:tau].copy(), EndedBy(e))


@dataclass(eq=False)
class BatchResult:
    n: int
    master_seed: int
    winners: np.ndarray  # 0 draw, 1, 2
    taus: np.ndarray
    first_movers: np.ndarray
    ended_by: np.ndarray
    # packed trajectories, present only when the batch was run with retain=True
    v_flat: np.ndarray | None = None
    capture_flat: np.ndarray | None = None
    offsets: np.ndarray | None = None

    @property
    def wins1(self) -> int:
        return int(np.count_nonzero(self.winners == 1))

    @property
    def wins2(self) -> int:
        return int(np.count_nonzero(self.winners == 2))

    @property
    def draws(self) -> int:
        return int(np.count_nonzero(self.winners == 0))

    @property
    def stalemates(self) -> int:
        return int(np.count_nonzero(self.ended_by == EndedBy.STALEMATE))

    @property
    def retained(self) -> bool:
        return self.offsets is not None

    def trajectory(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        if not self.retained:
            raise ValueError("batch was run without trajectory retention")
        lo, hi = self.offsets[i], self.offsets[i + 1]
        return self.v_flat[lo:hi], self.capture_flat[lo:hi]

    def record(self, i: int) -> MatchRecord:
        v, caps = self.trajectory(i)
        return MatchRecord(_winner(int(self.winners[i])), int(self.taus[i]),
                           Player(int(self.first_movers[i])), v, caps,
                           EndedBy(int(self.ended_by[i])))

    @property
    def records(self) -> list[MatchRecord]:
        return [self.record(i) for i in range(self.n)]


def _run_chunk(start_board, agents, master, lo, hi, max_plies, retain):
    count = hi - lo
    seeds = derive_match_seeds(master, lo, count)
    winners = np.empty(count, dtype=np.int8)
    taus = np.empty(count, dtype=np.int64)
    firsts = np.empty(count, dtype=np.int8)
    ended = np.empty(count, dtype=np.int8)
    offsets = np.empty(count + 1, dtype=np.int64)
    size = count * max_plies if retain else 1
    flat_v = np.empty(size, dtype=np.int8)
    flat_c = np.empty(size, dtype=np.bool_)
    used = _engine.play_many(start_board, seeds, agents, max_plies, retain,
                             winners, taus, firsts, ended, flat_v, flat_c, offsets)
    if retain:
        return winners, taus, firsts, ended, flat_v[:used].copy(), flat_c[:used].copy(), offsets
    return winners, taus, firsts, ended, None, None, None


def default_jobs() -> int:
    return os.cpu_count() or 1


def run_batch(agent1: AgentSpec, agent2: AgentSpec, n: int, master_seed: int,
              max_plies: int = DEFAULT_MAX_PLIES, retain: bool = False,
              jobs: int | None = None, chunk_size: int = 1024) -> BatchResult:
    """Play ``n`` independent matches from the standard setup.

    ``retain`` keeps every v(t) trajectory (needed by the statistics module);
    otherwise only per-match summaries are stored. ``jobs`` threads run chunks
    concurrently; the result does not depend on it.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if max_plies < 1:
        raise ValueError("max_plies must be at least 1")
    jobs = default_jobs() if jobs is None else int(jobs)
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    start_board = np.array(initial_board(), dtype=np.int8)
    agents = _agents(agent1, agent2)
    bounds = [(lo, min(lo + chunk_size, n)) for lo in range(0, n, chunk_size)]

    def work(b):
        return _run_chunk(start_board, agents, master_seed, b[0], b[1], max_plies, retain)

    if jobs == 1 or len(bounds) == 1:
        parts = [work(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(work, bounds))

    result = BatchResult(
        n=n, master_seed=int(master_seed),
        winners=np.concatenate([p[0] for p in parts]),
        taus=np.concatenate([p[1] for p in parts]),
        first_movers=np.concatenate([p[2] for p in parts]),
        ended_by=np.concatenate([p[3] for p in parts]),
    )
    if retain:
        result.v_flat = np.concatenate([p[4] for p in parts])
        result.capture_flat = np.concatenate([p[5] for p in parts])
        offsets = [np.zeros(1, dtype=np.int64)]
        base = 0
        for p in parts:
            offsets.append(p[6][1:] + base)
            base += p[6][-1]
        result.offsets = np.concatenate(offsets)
    return result


def match_config(agent1: AgentSpec, agent2: AgentSpec, master_seed: int, index: int,
                 max_plies: int = DEFAULT_MAX_PLIES) -> MatchConfig:
    """The config that reproduces match ``index`` of a batch in isolation."""
    return MatchConfig(agent1, agent2, derive_match_seed(master_seed, index), max_plies)


# ---------------------------------------------------------------------------
# CSV output

_ENDED_NAMES = {EndedBy.ELIMINATION: "elimination", EndedBy.STALEMATE: "stalemate",
                EndedBy.CAP: "cap"}


def write_batch_csv(result: BatchResult, path) -> None:
    """``index,winner,tau,first_mover,ended_by``; winner 0 marks a capped draw."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "winner", "tau", "first_mover", "ended_by"])
        for i in range(result.n):
            w.writerow([i, int(result.winners[i]), int(result.taus[i]),
                        int(result.first_movers[i]),
                        _ENDED_NAMES[EndedBy(int(result.ended_by[i]))]])


def write_trajectory_csv(result: BatchResult, path) -> None:
    """``index,t,v,capture`` for every ply of every retained match."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "t", "v", "capture"])
        for i in range(result.n):
            v, caps = result.trajectory(i)
            for t in range(len(v)):
                w.writerow([i, t + 1, int(v[t]), int(caps[t])])
