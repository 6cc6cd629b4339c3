"""Winning matrices over the (theta1, theta2) grid of complementary strategies."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .agents import AgentSpec, Expertise
from .board import Player
from .harness import DEFAULT_MAX_PLIES, run_batch
from .rng import derive_match_seed


def default_thetas() -> tuple[float, ...]:
    return tuple(k / 20 for k in range(21))


@dataclass(frozen=True)
class SweepGrid:
    theta_values: tuple[float, ...] = field(default_factory=default_thetas)
    n_per_cell: int = 100_000

    def __post_init__(self):
        vals = tuple(float(t) for t in self.theta_values)
        object.__setattr__(self, "theta_values", vals)
        if not vals:
            raise ValueError("theta grid is empty")
        if any(not 0.0 <= t <= 1.0 for t in vals):
            raise ValueError("theta values must lie in [0, 1]")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("theta values must be strictly ascending")
        if self.n_per_cell < 1:
            raise ValueError("n_per_cell must be at least 1")

    @classmethod
    def uniform(cls, points: int, n_per_cell: int = 100_000) -> SweepGrid:
        return cls(tuple(k / (points - 1) for k in range(points)), n_per_cell)

    def __len__(self):
        return len(self.theta_values)


def matrix_element(wins1: int, wins2: int, n: int) -> float:
    if n <= 0:
        raise ValueError("n must be positive")
    if wins1 < 0 or wins2 < 0 or wins1 + wins2 > n:
        raise ValueError("need 0 <= wins1 + wins2 <= n")
    return (wins1 - wins2) / n


def element_sigma(wins1, wins2, n):
    """Standard error of ``(wins1 - wins2) / n`` with per-match outcomes in {1, 0, -1}."""
    p1 = np.asarray(wins1, dtype=float) / n
    p2 = np.asarray(wins2, dtype=float) / n
    var = p1 + p2 - (p1 - p2) ** 2
    return np.sqrt(np.maximum(var, 0.0) / n)


def cell_seed(master_seed: int, row: int, col: int) -> int:
    return derive_match_seed(master_seed, row * 1000 + col)


@dataclass(eq=False)
class WinningMatrix:
    """Rows follow theta1, columns theta2; positive elements favour player one."""

    grid: SweepGrid
    expertise1: Expertise
    expertise2: Expertise
    master_seed: int
    wins1: np.ndarray
    wins2: np.ndarray
    draws: np.ndarray

    @property
    def n_per_cell(self) -> int:
        return self.grid.n_per_cell

    @property
    def thetas(self) -> np.ndarray:
        return np.asarray(self.grid.theta_values)

    @property
    def elements(self) -> np.ndarray:
        return (self.wins1 - self.wins2) / self.n_per_cell

    @property
    def sigma(self) -> np.ndarray:
        return element_sigma(self.wins1, self.wins2, self.n_per_cell)

    def index_of(self, theta: float) -> int:
        hits = np.flatnonzero(np.isclose(self.thetas, theta, rtol=0.0, atol=1e-9))
        if hits.size == 0:
            raise ValueError(f"theta {theta} is not on the grid")
        return int(hits[0])

    def signed_line(self, for_player: Player, opponent_theta: float):
        """Elements and sigmas from ``for_player``'s point of view against a fixed opponent."""
        j = self.index_of(opponent_theta)
        if Player(for_player) is Player.ONE:
            return self.elements[:, j], self.sigma[:, j]
        return -self.elements[j, :], self.sigma[j, :]


def build_winning_matrix(e1: Expertise, e2: Expertise, grid: SweepGrid, master_seed: int,
                         max_plies: int = DEFAULT_MAX_PLIES, jobs: int | None = None,
                         cautious: bool = False, progress=None) -> WinningMatrix:
    """Run one batch per cell; cell (j, k) is seeded from (master_seed, j, k) only."""
    size = len(grid)
    wins1 = np.zeros((size, size), dtype=np.int64)
    wins2 = np.zeros_like(wins1)
    draws = np.zeros_like(wins1)
    for j, t1 in enumerate(grid.theta_values):
        for k, t2 in enumerate(grid.theta_values):
            a1 = AgentSpec.complementary(e1.d, e1.o, t1, cautious)
            a2 = AgentSpec.complementary(e2.d, e2.o, t2, cautious)
            res = run_batch(a1, a2, grid.n_per_cell, cell_seed(master_seed, j, k),
                            max_plies=max_plies, jobs=jobs)
            wins1[j, k], wins2[j, k], draws[j, k] = res.wins1, res.wins2, res.draws
            if progress is not None:
                progress(j, k)
    return WinningMatrix(grid, e1, e2, int(master_seed), wins1, wins2, draws)


def best_response(matrix: WinningMatrix, for_player: Player, opponent_theta: float,
                  z: float = 2.0) -> set[float]:
    """Own theta values statistically tied with the best reply to ``opponent_theta``.

    A value is kept when its signed element trails the maximum by at most ``z``
    standard errors of the difference.
    """
    values, sig = matrix.signed_line(for_player, opponent_theta)
    best = int(np.argmax(values))
    tol = z * np.sqrt(sig ** 2 + sig[best] ** 2)
    keep = values[best] - values <= tol
    return {float(t) for t in matrix.thetas[keep]}


# ---------------------------------------------------------------------------
# output

def _fmt_theta(t: float) -> str:
    return f"{t:.6g}"


def write_matrix_csv(matrix: WinningMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta1\\theta2"] + [_fmt_theta(t) for t in matrix.thetas])
        for j, t1 in enumerate(matrix.thetas):
            w.writerow([_fmt_theta(t1)] + [f"{x:.6f}" for x in matrix.elements[j]])


def write_cells_csv(matrix: WinningMatrix, path) -> None:
    """Per-cell counts, so capped draws stay visible next to the elements."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta1", "theta2", "wins1", "wins2", "draws", "n", "element", "sigma"])
        el, sig = matrix.elements, matrix.sigma
        for j, t1 in enumerate(matrix.thetas):
            for k, t2 in enumerate(matrix.thetas):
                w.writerow([_fmt_theta(t1), _fmt_theta(t2), int(matrix.wins1[j, k]),
                            int(matrix.wins2[j, k]), int(matrix.draws[j, k]),
                            matrix.n_per_cell, f"{el[j, k]:.6f}", f"{sig[j, k]:.6f}"])


def element_color(value: float) -> tuple[int, int, int]:
    """Blue (-1) through white (0) to red (+1)."""
    v = min(1.0, max(-1.0, float(value)))
    fade = round(255 * (1.0 - abs(v)))
    return (255, fade, fade) if v >= 0 else (fade, fade, 255)


def write_matrix_ppm(matrix: WinningMatrix, path, cell_px: int = 16) -> None:
    """Binary PPM, theta1 growing bottom to top and theta2 left to right."""
    size = len(matrix.grid)
    img = np.zeros((size * cell_px, size * cell_px, 3), dtype=np.uint8)
    for j in range(size):
        r0 = (size - 1 - j) * cell_px
        for k in range(size):
            img[r0:r0 + cell_px, k * cell_px:(k + 1) * cell_px] = element_color(matrix.elements[j, k])
    with open(path, "wb") as fh:
        fh.write(f"P6\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(img.tobytes())
