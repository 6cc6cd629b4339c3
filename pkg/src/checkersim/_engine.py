"""Compiled inner loops: move generation, move selection and whole matches.

Everything here works on a 32-entry ``int8`` occupancy array (0 empty,
1 player one, 2 player two) and a one-element ``uint64`` array holding the
random stream state. The Python-facing modules wrap these kernels; nothing
else in the package re-implements the rules.

A move is encoded as ``square * 4 + direction``. Whether it is a step or a
jump follows from the board it is played on.
"""

import numpy as np
from numba import njit

# Directions, in move-ordering order: NE, NW, SE, SW. "North" is increasing row.
DIRECTIONS = ((1, 1), (1, -1), (-1, 1), (-1, -1))
MAX_MOVES = 48  # 12 pieces x 4 directions, at most one move per (piece, direction)

# ended_by codes
ELIMINATION = 0
STALEMATE = 1
CAP = 2


def _build_tables():
    neigh = np.full((32, 4), -1, dtype=np.int64)
    jump = np.full((32, 4), -1, dtype=np.int64)

    def index(row, col):
        if 0 <= row < 8 and 0 <= col < 8 and (row + col) % 2 == 1:
            return row * 4 + col // 2
        return -1

    for sq in range(32):
        row = sq // 4
        col = 2 * (sq % 4) + (1 - row % 2)
        for d, (dr, dc) in enumerate(DIRECTIONS):
            neigh[sq, d] = index(row + dr, col + dc)
            jump[sq, d] = index(row + 2 * dr, col + 2 * dc)
    return neigh, jump


NEIGH, JUMP = _build_tables()

# splitmix64 constants
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0


# ---------------------------------------------------------------------------
# random stream

@njit(cache=True, nogil=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def next_u64(rng):
    rng[0] += _GOLDEN
    return mix64(rng[0])


@njit(cache=True, nogil=True)
def uniform(rng):
    return np.float64(next_u64(rng) >> _S11) * _INV53


@njit(cache=True, nogil=True)
def pick(rng, n):
    k = np.int64(uniform(rng) * n)
    return k if k < n else n - 1


@njit(cache=True, nogil=True)
def coin(rng, p):
    # Probabilities of exactly 0 or 1 are decided without consuming a draw.
    if p <= 0.0:
        return False
    if p >= 1.0:
        return True
    return uniform(rng) < p


@njit(cache=True, nogil=True)
def derive_seed(master, index):
    return mix64(master + (index + np.uint64(1)) * _GOLDEN)


@njit(cache=True, nogil=True)
def derive_seeds(master, start, count):
    out = np.empty(count, dtype=np.uint64)
    for i in range(count):
        out[i] = derive_seed(master, np.uint64(start + i))
    return out


# ---------------------------------------------------------------------------
# rules

@njit(cache=True, nogil=True)
def gen_moves(board, side, codes, is_cap):
    opp = 3 - side
    n = 0
    for sq in range(32):
        if board[sq] != side:
            continue
        for d in range(4):
            nb = NEIGH[sq, d]
            if nb < 0:
                continue
            c = board[nb]
            if c == 0:
                codes[n] = sq * 4 + d
                is_cap[n] = False
                n += 1
            elif c == opp:
                j = JUMP[sq, d]
                if j >= 0 and board[j] == 0:
                    codes[n] = sq * 4 + d
                    is_cap[n] = True
                    n += 1
    return n


@njit(cache=True, nogil=True)
def is_menaced(board, sq):
    side = board[sq]
    if side == 0:
        return False
    opp = 3 - side
    for d in range(4):
        nb = NEIGH[sq, d]
        if nb >= 0 and board[nb] == opp:
            behind = NEIGH[sq, 3 - d]
            if behind >= 0 and board[behind] == 0:
                return True
    return False


@njit(cache=True, nogil=True)
def move_target(board, code):
    """Return (destination, captured square or -1) of ``code`` on ``board``."""
    sq = code >> 2
    d = code & 3
    nb = NEIGH[sq, d]
    if board[nb] == 0:
        return nb, -1
    return JUMP[sq, d], nb


@njit(cache=True, nogil=True)
def apply_code(board, code):
    sq = code >> 2
    to, cap = move_target(board, code)
    board[to] = board[sq]
    board[sq] = 0
    if cap >= 0:
        board[cap] = 0
    return cap


@njit(cache=True, nogil=True)
def save_moves(board, n, codes, out, menaced_only=True):
    """Indices (into ``codes``) of moves after which the moved piece is not menaced.

    With ``menaced_only`` only moves of currently menaced pieces qualify.
    """
    k = 0
    for i in range(n):
        sq = codes[i] >> 2
        if menaced_only and not is_menaced(board, sq):
            continue
        side = board[sq]
        to, cap = move_target(board, codes[i])
        board[to] = side
        board[sq] = 0
        if cap >= 0:
            board[cap] = 0
        safe = not is_menaced(board, to)
        board[sq] = side
        board[to] = 0
        if cap >= 0:
            board[cap] = 3 - side
        if safe:
            out[k] = i
            k += 1
    return k


# ---------------------------------------------------------------------------
# move selection; every function returns an index into ``codes[:n]``

@njit(cache=True, nogil=True)
def offensive_pick(rng, o, n, is_cap, scratch):
    if coin(rng, o):
        k = 0
        for i in range(n):
            if is_cap[i]:
                scratch[k] = i
                k += 1
        if k > 0:
            return scratch[pick(rng, k)]
    return pick(rng, n)


@njit(cache=True, nogil=True)
def defensive_pick(rng, d, board, n, codes, scratch, cautious=False):
    if coin(rng, d):
        k = save_moves(board, n, codes, scratch, True)
        if k > 0:
            return scratch[pick(rng, k)]
        if cautious:
            k = save_moves(board, n, codes, scratch, False)
            if k > 0:
                return scratch[pick(rng, k)]
    return pick(rng, n)


@njit(cache=True, nogil=True)
def choose_pick(rng, agent, board, n, codes, is_cap, scratch):
    """``agent`` is ``[kind, theta, d, o, cautious]``.

    kind 0 is the complementary strategy, 1 the fully-offensive one.
    """
    cautious = agent[4] != 0.0
    if agent[0] == 1.0:
        k = 0
        for i in range(n):
            if is_cap[i]:
                scratch[k] = i
                k += 1
        if k > 0:
            return scratch[pick(rng, k)]
        return defensive_pick(rng, agent[2], board, n, codes, scratch, cautious)
    if coin(rng, agent[1]):
        return offensive_pick(rng, agent[3], n, is_cap, scratch)
    return defensive_pick(rng, agent[2], board, n, codes, scratch, cautious)


# ---------------------------------------------------------------------------
# whole matches

@njit(cache=True, nogil=True)
def play(board, first, agents, seed, max_plies, v_out, cap_out):
    """Play one match in place on ``board``.

    ``first`` is 1 or 2 to fix the opening side, 0 to draw it from the stream.
    Returns ``(winner, tau, first_mover, ended_by)`` with winner 0 for a draw.
    """
    rng = np.empty(1, dtype=np.uint64)
    rng[0] = seed
    if first == 0:
        side = 1 if pick(rng, 2) == 0 else 2
    else:
        side = first
    first_mover = side
    codes = np.empty(MAX_MOVES, dtype=np.int64)
    is_cap = np.empty(MAX_MOVES, dtype=np.bool_)
    scratch = np.empty(MAX_MOVES, dtype=np.int64)
    c1 = 0
    c2 = 0
    for sq in range(32):
        if board[sq] == 1:
            c1 += 1
        elif board[sq] == 2:
            c2 += 1
    ply = 0
    while True:
        if c1 == 0:
            return 2, ply, first_mover, ELIMINATION
        if c2 == 0:
            return 1, ply, first_mover, ELIMINATION
        n = gen_moves(board, side, codes, is_cap)
        if n == 0:
            return 3 - side, ply, first_mover, STALEMATE
        if ply >= max_plies:
            return 0, ply, first_mover, CAP
        i = choose_pick(rng, agents[side - 1], board, n, codes, is_cap, scratch)
        cap = apply_code(board, codes[i])
        if cap >= 0:
            if side == 1:
                c2 -= 1
            else:
                c1 -= 1
        v_out[ply] = c1 - c2
        cap_out[ply] = cap >= 0
        ply += 1
        side = 3 - side


@njit(cache=True, nogil=True)
def play_many(start, seeds, agents, max_plies, retain,
              winners, taus, firsts, ended, flat_v, flat_cap, offsets):
    """Play ``len(seeds)`` matches from ``start``; trajectories packed when ``retain``."""
    v_buf = np.empty(max_plies, dtype=np.int8)
    c_buf = np.empty(max_plies, dtype=np.bool_)
    board = np.empty(32, dtype=np.int8)
    pos = 0
    offsets[0] = 0
    for m in range(seeds.shape[0]):
        board[:] = start
        w, t, f, e = play(board, 0, agents, seeds[m], max_plies, v_buf, c_buf)
        winners[m] = w
        taus[m] = t
        firsts[m] = f
        ended[m] = e
        if retain:
            flat_v[pos:pos + t] = v_buf[:t]
            flat_cap[pos:pos + t] = c_buf[:t]
            pos += t
        offsets[m + 1] = pos
    return pos
