"""Monte Carlo simulation of a simplified checkers variant with expertise-driven agents."""

__version__ = "0.1.0"

from .agents import (AgentSpec, Complementary, Expertise, FullyOffensive, NoLegalMoveError,
                     choose_move, defensive_move, offensive_move, random_move)
from .board import (GameState, IllegalMoveError, Move, MoveKind, Player, Status, advantage,
                    apply_move, captures_available, from_text, initial_state, legal_moves,
                    menaced_pieces, save_moves, to_text)
from .harness import (BatchResult, EndedBy, MatchConfig, MatchRecord, play_match, run_batch)
from .rng import RandomSource, derive_match_seed
from .winmatrix import SweepGrid, WinningMatrix, best_response, build_winning_matrix, matrix_element
