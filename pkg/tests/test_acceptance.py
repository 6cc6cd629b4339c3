"""End-to-end acceptance checks at full sample sizes.

Each test appends one PASS/FAIL line to the summary printed at the end of the
run. Several minutes of single-core simulation in total.
"""

import hashlib
import math
from itertools import combinations

import numpy as np
import pytest

from checkersim import (AgentSpec, Expertise, GameState, Player, SweepGrid, best_response,
                        build_winning_matrix, legal_moves, run_batch)
from checkersim.cli import main
from checkersim.stats import (SequenceDistribution, advantage_collapse, fit_alpha, fit_lambda,
                              fit_lambda_mle, ks_distance, mean_advantage,
                              sequence_length_counts)
from conftest import ACCEPTANCE_LINES
from oracle import brute_moves, random_positions

pytestmark = pytest.mark.acceptance

N_FO = 100_000
N_CELL = 10_000
GRID5 = SweepGrid.uniform(5, N_CELL)


def report(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {detail}")
    assert ok, detail


# --- shared simulations -----------------------------------------------------

_fo_cache = {}


def fo_batch(d1, d2):
    """Fully-offensive batch with retained trajectories, simulated once per session."""
    if (d1, d2) not in _fo_cache:
        seed = 1000 + round(d1 * 100) * 10 + round(d2 * 10)
        _fo_cache[(d1, d2)] = run_batch(AgentSpec.fully_offensive(d1),
                                        AgentSpec.fully_offensive(d2), N_FO, seed,
                                        retain=True)
    return _fo_cache[(d1, d2)]


_matrix_cache = {}


def matrix(name):
    settings = {
        "equal": (Expertise(0.75, 0.75), Expertise(0.75, 0.75)),
        "dominant_a": (Expertise(1.0, 0.25), Expertise(0.25, 0.75)),
        "dominant_b": (Expertise(1.0, 0.5), Expertise(0.25, 0.75)),
        "dominant_c": (Expertise(0.75, 0.5), Expertise(0.25, 0.75)),
    }
    if name not in _matrix_cache:
        e1, e2 = settings[name]
        _matrix_cache[name] = build_winning_matrix(e1, e2, GRID5, master_seed=31)
    return _matrix_cache[name]


# --- criteria ---------------------------------------------------------------

def test_01_rules_match_the_brute_force_enumerator():
    positions = random_positions(1500, seed=2718)
    bad = 0
    for board, side in positions:
        got = {(m.from_sq, m.to_sq, m.captured) for m in legal_moves(GameState(board, Player(side)))}
        bad += got != brute_moves(board, side)
    report(1, "rules oracle", bad == 0, f"{bad} discrepancies over {len(positions)} positions")


def test_02_identical_agents_are_symmetric():
    agent = AgentSpec.complementary(0.5, 0.5, 0.5)
    res = run_batch(agent, agent, 10_000, master_seed=77)
    gap = abs(res.wins1 - res.wins2) / res.n
    report(2, "symmetry null", gap <= 0.04, f"|w1-w2|/n = {gap:.4f} (limit 0.04)")


def _monotone_violations(m):
    """Adjacent own-theta steps where a player's signed element drops."""
    el, sig = m.elements, m.sigma
    soft = hard = total = 0
    for k in range(len(m.grid)):
        for line, s in ((el[:, k], sig[:, k]), (-el[k, :], sig[k, :])):
            for i in range(len(line) - 1):
                total += 1
                drop = line[i] - line[i + 1]
                if drop > 0:
                    if drop > 2 * math.hypot(s[i], s[i + 1]):
                        hard += 1
                    else:
                        soft += 1
    return soft, hard, total


def test_03_offence_pays_at_equal_expertise():
    m = matrix("equal")
    soft, hard, total = _monotone_violations(m)
    corner = m.elements[m.index_of(1.0), m.index_of(0.0)]
    ok = hard == 0 and soft <= 0.2 * total and corner >= 0.3
    report(3, "equal-expertise offensiveness", ok,
           f"{soft} small and {hard} >2sigma inversions of {total}; element(1,0) = {corner:+.3f}")


def test_04_dominant_player_plays_full_offence():
    missing = []
    for name in ("dominant_a", "dominant_b", "dominant_c"):
        m = matrix(name)
        for t1 in m.grid.theta_values:
            if 1.0 not in best_response(m, Player.TWO, t1):
                missing.append(f"{name}@theta1={t1:g}")
    report(4, "dominant-player law", not missing,
           "theta=1 always a best response" if not missing else "missing at " + ", ".join(missing))


def test_05_weaker_attacker_should_defend():
    m = matrix("dominant_b")
    j = m.index_of(1.0)
    line, sig = m.signed_line(Player.ONE, 1.0)
    lo, hi = m.index_of(0.0), m.index_of(1.0)
    gap = line[lo] - line[hi]
    bound = 2 * math.hypot(sig[lo], sig[hi])
    best = sorted(best_response(m, Player.ONE, 1.0))
    report(5, "non-dominant defensive optimum", gap > bound,
           f"element(0,1) - element(1,1) = {line[lo]:+.3f} - ({line[hi]:+.3f}) = {gap:+.3f}, "
           f"need > {bound:.3f}; player-1 best response {best}; column {m.elements[:, j].round(3).tolist()}")


def test_06_shortest_match_length():
    mins = {d1: int(fo_batch(d1, 0.0).taus.min()) for d1 in (0.5, 0.75, 1.0)}
    ok = all(24 <= v <= 40 for v in mins.values())
    report(6, "tau_min at d2=0", ok, f"min tau by d1: {mins} (range [24, 40])")


def test_07_total_time_collapses_on_d2():
    d1s = (0.5, 0.75, 1.0)
    same = [ks_distance(fo_batch(a, 0.5).taus, fo_batch(b, 0.5).taus)
            for a, b in combinations(d1s, 2)]
    cross = [ks_distance(fo_batch(d, 0.5).taus, fo_batch(d, 0.0).taus) for d in d1s]
    worst = max(same)
    ok = worst <= 0.05 and min(cross) >= 2 * worst
    report(7, "tau collapse", ok,
           f"same-d2 KS max {worst:.4f} (limit 0.05); cross-d2 KS {[round(c, 4) for c in cross]} "
           f"(need each >= {2 * worst:.4f})")


def test_08_advantage_collapses_on_t_delta_d():
    pairs = [(0.75, 0.5), (0.5, 0.0), (0.75, 0.0), (1.0, 0.0), (1.0, 0.5)]
    curves = []
    for d1, d2 in pairs:
        res = fo_batch(d1, d2)
        curves.append(mean_advantage(res, int(res.taus.min()), d1 - d2))
    fit = advantage_collapse(curves)
    spread = max(abs(s / fit.slope - 1) for s in fit.curve_slopes)
    distinct = len({round(c.delta_d, 9) for c in curves})
    ok = distinct >= 4 and fit.r2 >= 0.9 and spread <= 0.15
    report(8, "advantage collapse", ok,
           f"{distinct} distinct delta_d; R2 = {fit.r2:.3f}; slope {fit.slope:.5f}, "
           f"per-pair {[round(s, 5) for s in fit.curve_slopes]} (max deviation {spread:.1%})")


def test_09_sequence_lengths_and_alpha():
    ds = (0.0, 0.5, 0.75)
    dists = {(d, d): SequenceDistribution(sequence_length_counts(fo_batch(d, d)), d, d)
             for d in ds}
    fits = {p: fit_lambda(dist) for p, dist in dists.items()}
    lams = [fits[(d, d)].lam for d in ds]
    r2 = [fits[(d, d)].r2 for d in ds]
    collapse = fit_alpha({p: f.lam for p, f in fits.items()}, distributions=dists)
    disp = collapse.dispersion
    planted = fit_alpha({(d, d): 0.4 * (1 - d) ** 0.65 for d in (0.0, 0.25, 0.5, 0.75)})
    checks = {
        "R2>=0.95": min(r2) >= 0.95,
        "lambda decreasing": all(b < a for a, b in zip(lams, lams[1:])),
        "alpha in [0.4,0.9]": 0.4 <= collapse.alpha <= 0.9,
        "dispersion dips": disp < collapse.dispersion_at(0.0) and disp < collapse.dispersion_at(1.0),
        "planted 0.65": abs(planted.alpha - 0.65) <= 0.01 + 1e-12,
    }
    failed = [k for k, v in checks.items() if not v]
    report(9, "exponential sequences and alpha", not failed,
           f"lambda {[round(x, 4) for x in lams]}, R2 {[round(x, 3) for x in r2]}, "
           f"alpha* = {collapse.alpha:.2f} (dispersion {disp:.4f} vs "
           f"{collapse.dispersion_at(0.0):.4f} at 0, {collapse.dispersion_at(1.0):.4f} at 1), "
           f"planted -> {planted.alpha:.2f}" + (f"; failed: {', '.join(failed)}" if failed else ""))


def _digests(directory):
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(directory.iterdir()) if p.suffix == ".csv"}


def test_10_outputs_independent_of_jobs(tmp_path):
    runs = {
        "sweep": "[run]\nn=2000\nseed=4\n[agent1]\nd=1\no=0.5\n[agent2]\nd=0.25\no=0.75\n"
                 "[grid]\ntheta_values=0 0.5 1\n",
        "batch": "[run]\nn=5000\nseed=8\nretain=yes\n[agent1]\nd=0.5\no=0.5\ntheta=0.3\n"
                 "[agent2]\nd=0.75\no=0.25\ntheta=0.8\n",
    }
    mismatched = []
    for mode, text in runs.items():
        cfg = tmp_path / f"{mode}.ini"
        cfg.write_text(text)
        seen = []
        for jobs in ("1", "2", "8"):
            out = tmp_path / f"{mode}_{jobs}"
            assert main([mode, "--config", str(cfg), "--out", str(out), "--jobs", jobs]) == 0
            seen.append(_digests(out))
        if any(s != seen[0] for s in seen[1:]):
            mismatched.append(mode)
    report(10, "determinism under --jobs", not mismatched,
           "sweep and batch CSVs byte-identical for jobs 1, 2, 8" if not mismatched
           else f"differences in {mismatched}")


def test_11_estimator_cross_checks():
    rng = np.random.default_rng(11)
    sample = rng.geometric(1 - math.exp(-0.2), size=100_000)
    dist = SequenceDistribution.from_lengths(sample)
    log_lin = fit_lambda(dist).lam
    mle = fit_lambda_mle(dist, L_min=2)
    rel = abs(log_lin - mle) / mle
    ks = (ks_distance([1, 2, 3], [1, 2, 3]), ks_distance([1, 2], [3, 4]),
          ks_distance([1, 2], [1, 3]))
    ok = rel <= 0.05 and ks == (0.0, 1.0, 0.5)
    report(11, "estimator cross-checks", ok,
           f"log-linear {log_lin:.4f} vs MLE {mle:.4f} ({rel:.2%}); KS fixtures {ks}")
