"""Command-line entry point: ``checkersim {play,batch,sweep,fo-analyze,fit-alpha}``."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .agents import AgentSpec
from .config import ConfigError, RunConfig, load_config, parse_config, parse_jobs, parse_seed, with_overrides
from .harness import (match_config, play_match, run_batch, write_batch_csv,
                      write_trajectory_csv, BatchResult)
from .rng import derive_match_seed
from . import stats
from .winmatrix import (SweepGrid, build_winning_matrix, write_cells_csv, write_matrix_csv,
                        write_matrix_ppm)

log = logging.getLogger("checkersim")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


@dataclass
class RunManifest:
    config: dict
    version: str
    started: str
    finished: str = ""
    outputs: dict = field(default_factory=dict)  # file name -> sha256

    def to_json(self) -> str:
        return json.dumps({"version": self.version, "started": self.started,
                           "finished": self.finished, "config": self.config,
                           "outputs": self.outputs}, indent=2, sort_keys=True) + "\n"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _fmt_d(d: float) -> str:
    return f"{d:g}"


def fo_pairs(cfg: RunConfig) -> list[tuple[float, float]]:
    excluded = {stats.canonical_pair(*p) for p in cfg.fo_exclude}
    ds = sorted(set(cfg.fo_d_values))
    return [(d1, d2) for d1 in ds for d2 in ds if d1 >= d2 and (d1, d2) not in excluded]


def pair_seed(master_seed: int, d1: float, d2: float) -> int:
    return derive_match_seed(master_seed, round(d1 * 1000) * 1000 + round(d2 * 1000))


def _play(cfg: RunConfig, out: Path) -> list[Path]:
    a1, a2 = cfg.agent1.spec(), cfg.agent2.spec()
    rec = play_match(match_config(a1, a2, cfg.master_seed, 0, cfg.max_plies))
    single = BatchResult(
        n=1, master_seed=cfg.master_seed,
        winners=np.array([0 if rec.winner is None else int(rec.winner)], dtype=np.int8),
        taus=np.array([rec.tau]), first_movers=np.array([int(rec.first_mover)], dtype=np.int8),
        ended_by=np.array([int(rec.ended_by)], dtype=np.int8),
        v_flat=rec.v_trajectory, capture_flat=rec.capture_plies,
        offsets=np.array([0, rec.tau]))
    paths = [out / "match.csv", out / "trajectory.csv"]
    write_batch_csv(single, paths[0])
    write_trajectory_csv(single, paths[1])
    return paths


def _batch(cfg: RunConfig, out: Path) -> list[Path]:
    res = run_batch(cfg.agent1.spec(), cfg.agent2.spec(), cfg.n, cfg.master_seed,
                    cfg.max_plies, retain=cfg.retain, jobs=cfg.jobs)
    log.info("wins1=%d wins2=%d draws=%d", res.wins1, res.wins2, res.draws)
    paths = [out / "batch.csv"]
    write_batch_csv(res, paths[0])
    if cfg.retain:
        paths.append(out / "trajectories.csv")
        write_trajectory_csv(res, paths[1])
    return paths


def _sweep(cfg: RunConfig, out: Path) -> list[Path]:
    grid = SweepGrid(cfg.thetas, cfg.n)
    matrix = build_winning_matrix(cfg.agent1.expertise, cfg.agent2.expertise, grid,
                                  cfg.master_seed, cfg.max_plies, cfg.jobs,
                                  cautious=cfg.agent1.cautious or cfg.agent2.cautious)
    paths = [out / "matrix.csv", out / "cells.csv"]
    write_matrix_csv(matrix, paths[0])
    write_cells_csv(matrix, paths[1])
    if cfg.emit_ppm:
        paths.append(out / "matrix.ppm")
        write_matrix_ppm(matrix, paths[-1])
    return paths


def _fo_analyze(cfg: RunConfig, out: Path) -> list[Path]:
    paths: list[Path] = []
    curves, dists, fits = [], {}, {}
    for d1, d2 in fo_pairs(cfg):
        tag = f"{_fmt_d(d1)}_{_fmt_d(d2)}"
        log.info("fully-offensive pair d1=%s d2=%s", d1, d2)
        res = run_batch(AgentSpec.fully_offensive(d1, cfg.cautious),
                        AgentSpec.fully_offensive(d2, cfg.cautious),
                        cfg.n, pair_seed(cfg.master_seed, d1, d2), cfg.max_plies,
                        retain=True, jobs=cfg.jobs)
        hist = stats.total_time_histogram(res.taus, cfg.bin_width)
        p = out / f"tau_hist_{tag}.csv"
        stats.write_histogram_csv(hist, p)
        paths.append(p)

        curve = stats.mean_advantage(res, int(res.taus.min()), d1 - d2)
        curves.append(curve)
        p = out / f"advantage_{tag}.csv"
        stats.write_curve_csv(curve, p)
        paths.append(p)

        dist = stats.SequenceDistribution(stats.sequence_length_counts(res), d1, d2)
        dists[(d1, d2)] = dist
        p = out / f"sequences_{tag}.csv"
        stats.write_sequence_csv(dist, p)
        paths.append(p)
        fits[(d1, d2)] = stats.fit_lambda(dist, cfg.L_min, cfg.L_max)

    p = out / "collapse.csv"
    stats.write_collapse_csv([c for c in curves if c.delta_d > 0], p)
    paths.append(p)
    p = out / "lambda.csv"
    stats.write_lambda_csv(fits, p)
    paths.append(p)
    usable = {k: v.lam for k, v in fits.items() if (k[0] + k[1]) / 2 < 1}
    try:
        fit = stats.fit_alpha(usable, _alpha_grid(cfg), distributions=dists, L_min=cfg.L_min)
    except ValueError as exc:
        log.warning("alpha fit skipped: %s", exc)
    else:
        p = out / "alpha.csv"
        stats.write_alpha_csv(fit, p)
        paths.append(p)
        log.info("alpha* = %.2f (dispersion %.4f)", fit.alpha, fit.dispersion)
    return paths


def _alpha_grid(cfg: RunConfig) -> np.ndarray:
    points = round(1 / cfg.alpha_step)
    return np.arange(points + 1) / points


def _fit_alpha(cfg: RunConfig, out: Path) -> list[Path]:
    table = stats.read_lambda_csv(cfg.lambda_table)
    usable = {k: v for k, v in table.items() if (k[0] + k[1]) / 2 < 1}
    fit = stats.fit_alpha(usable, _alpha_grid(cfg))
    log.info("alpha* = %.2f (dispersion %.4g)", fit.alpha, fit.dispersion)
    p = out / "alpha.csv"
    stats.write_alpha_csv(fit, p)
    return [p]


_DISPATCH = {"play": _play, "batch": _batch, "sweep": _sweep,
             "fo_analyze": _fo_analyze, "fit_alpha": _fit_alpha}


def execute(cfg: RunConfig) -> RunManifest:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(config=cfg.echo(), version=__version__, started=_now())
    paths = _DISPATCH[cfg.mode](cfg, out)
    manifest.outputs = {p.name: _sha256(p) for p in paths}
    manifest.finished = _now()
    (out / "manifest.json").write_text(manifest.to_json())
    return manifest


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="run configuration file")
    common.add_argument("--seed", metavar="U64", help="master seed (overrides run.seed)")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides run.out)")
    common.add_argument("--jobs", metavar="N",
                        help="worker threads or 'auto'; never changes the outputs")
    common.add_argument("--emit-ppm", action="store_true",
                        help="also write the winning matrix as a PPM image (sweep)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress")

    parser = argparse.ArgumentParser(
        prog="checkersim",
        description="Monte Carlo simulator for a simplified checkers variant.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "play": "play one match and write its trajectory",
        "batch": "play n matches between two agents",
        "sweep": "build the winning matrix over the theta grid",
        "fo-analyze": "fully-offensive statistics over a grid of defensive expertise",
        "fit-alpha": "fit the collapse exponent from a lambda table",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def resolve_config(args) -> RunConfig:
    mode = args.command.replace("-", "_")
    if args.config:
        cfg = load_config(args.config, mode)
    else:
        cfg = parse_config("", mode)
    return with_overrides(
        cfg,
        master_seed=parse_seed(args.seed, "--seed") if args.seed is not None else None,
        out=args.out,
        jobs=parse_jobs(args.jobs, "--jobs") if args.jobs is not None else None,
        emit_ppm=True if args.emit_ppm else None,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
    except FileNotFoundError as exc:
        print(f"config error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        manifest = execute(cfg)
    except Exception as exc:  # noqa: BLE001 - every runtime failure maps to one exit code
        log.debug("run failed", exc_info=True)
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for name in manifest.outputs:
        print(Path(cfg.out) / name)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
