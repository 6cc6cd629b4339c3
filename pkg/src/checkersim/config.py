"""Run configuration: an INI-style ``key = value`` file with one section per topic.

Example::

    [run]
    n = 10000
    seed = 7
    max_plies = 10000

    [agent1]
    d = 0.75
    o = 0.75
    strategy = complementary
    theta = 0.5

    [agent2]
    d = 0.75
    o = 0.75

    [grid]
    theta_step = 0.05

Sections: ``run``, ``agent1``, ``agent2``, ``grid``, ``fo`` (fully-offensive
analysis) and ``fit`` (alpha fit from a lambda table). Unknown sections or
keys are rejected.
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .agents import AgentSpec, Expertise
from .harness import DEFAULT_MAX_PLIES

MODES = ("play", "batch", "sweep", "fo_analyze", "fit_alpha")


class ConfigError(ValueError):
    """Invalid or unreadable run configuration."""


@dataclass(frozen=True)
class AgentConfig:
    d: float
    o: float
    strategy: str = "complementary"
    theta: float = 1.0
    cautious: bool = False

    def spec(self) -> AgentSpec:
        if self.strategy == "fully_offensive":
            return AgentSpec.fully_offensive(self.d, self.cautious)
        return AgentSpec.complementary(self.d, self.o, self.theta, self.cautious)

    @property
    def expertise(self) -> Expertise:
        return Expertise(self.d, self.o)


@dataclass(frozen=True)
class RunConfig:
    mode: str
    agent1: AgentConfig | None = None
    agent2: AgentConfig | None = None
    thetas: tuple[float, ...] = tuple(k / 20 for k in range(21))
    n: int = 100_000
    master_seed: int = 0
    max_plies: int = DEFAULT_MAX_PLIES
    out: str = "out"
    jobs: int | None = None
    emit_ppm: bool = False
    retain: bool = False
    fo_d_values: tuple[float, ...] = (0.0, 0.5, 0.75, 1.0)
    fo_exclude: tuple[tuple[float, float], ...] = ((1.0, 1.0),)
    bin_width: int = 5
    L_min: int = 2
    L_max: int = 15
    alpha_step: float = 0.01
    lambda_table: str | None = None
    cautious: bool = False  # fully-offensive analysis only

    def echo(self) -> dict:
        return asdict(self)


_KEYS = {
    "run": {"mode", "n", "seed", "max_plies", "out", "jobs", "emit_ppm", "retain"},
    "agent1": {"d", "o", "strategy", "theta", "cautious"},
    "agent2": {"d", "o", "strategy", "theta", "cautious"},
    "grid": {"theta_step", "theta_values"},
    "fo": {"d_values", "exclude", "bin_width", "L_min", "L_max", "cautious"},
    "fit": {"lambda_table", "alpha_step"},
}


def _prob(name, raw):
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{name}: not a number: {raw!r}") from None
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"{name}: must lie in [0, 1], got {value}")
    return value


def _int(name, raw, minimum=None):
    try:
        value = int(raw, 0) if isinstance(raw, str) else int(raw)
    except ValueError:
        raise ConfigError(f"{name}: not an integer: {raw!r}") from None
    if minimum is not None and value < minimum:
        raise ConfigError(f"{name}: must be >= {minimum}, got {value}")
    return value


def _bool(name, raw):
    low = str(raw).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{name}: not a boolean: {raw!r}")


def _float_list(name, raw):
    try:
        return tuple(float(x) for x in raw.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"{name}: not a list of numbers: {raw!r}") from None


def parse_seed(raw, name="seed") -> int:
    value = _int(name, raw, 0)
    if value >= 1 << 64:
        raise ConfigError(f"{name}: must fit in 64 unsigned bits")
    return value


def parse_jobs(raw, name="jobs") -> int | None:
    if raw is None or str(raw).strip().lower() == "auto":
        return None
    return _int(name, raw, 1)


def _agent(section, name) -> AgentConfig:
    if "d" not in section or "o" not in section:
        raise ConfigError(f"{name}: both d and o are required")
    strategy = section.get("strategy", "complementary").strip().lower().replace("-", "_")
    if strategy not in ("complementary", "fully_offensive"):
        raise ConfigError(f"{name}.strategy: expected complementary or fully_offensive")
    o = _prob(f"{name}.o", section["o"])
    if strategy == "fully_offensive" and o != 1.0:
        raise ConfigError(f"{name}.o: fully_offensive agents need o = 1")
    return AgentConfig(
        d=_prob(f"{name}.d", section["d"]),
        o=o,
        strategy=strategy,
        theta=_prob(f"{name}.theta", section.get("theta", "1")),
        cautious=_bool(f"{name}.cautious", section.get("cautious", "false")),
    )


def _thetas(section) -> tuple[float, ...]:
    if "theta_values" in section:
        vals = _float_list("grid.theta_values", section["theta_values"])
    else:
        step = float(section.get("theta_step", "0.05"))
        if not 0 < step <= 1:
            raise ConfigError("grid.theta_step: must lie in (0, 1]")
        points = round(1 / step)
        if abs(points * step - 1) > 1e-9:
            raise ConfigError("grid.theta_step: must divide 1 evenly")
        vals = tuple(k / points for k in range(points + 1))
    if not vals or any(not 0 <= v <= 1 for v in vals):
        raise ConfigError("grid.theta_values: values must lie in [0, 1]")
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ConfigError("grid.theta_values: must be strictly ascending")
    return vals


def parse_config(text: str, mode: str | None = None, base_dir: Path | None = None) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from None
    for name in parser.sections():
        if name not in _KEYS:
            raise ConfigError(f"unknown section [{name}]")
        extra = set(parser[name]) - _KEYS[name]
        if extra:
            raise ConfigError(f"{name}.{sorted(extra)[0]}: unknown key")

    run = parser["run"] if parser.has_section("run") else {}
    file_mode = run.get("mode")
    if file_mode is not None:
        file_mode = file_mode.strip().replace("-", "_")
        if file_mode not in MODES:
            raise ConfigError(f"run.mode: expected one of {', '.join(MODES)}")
    if mode is not None and file_mode is not None and mode != file_mode:
        raise ConfigError(f"run.mode: file says {file_mode}, command says {mode}")
    mode = mode or file_mode
    if mode is None:
        raise ConfigError("run.mode: no mode given")

    kwargs = {"mode": mode}
    for key in ("agent1", "agent2"):
        if parser.has_section(key):
            kwargs[key] = _agent(parser[key], key)
    if "n" in run:
        kwargs["n"] = _int("run.n", run["n"], 1)
    if "seed" in run:
        kwargs["master_seed"] = parse_seed(run["seed"], "run.seed")
    if "max_plies" in run:
        kwargs["max_plies"] = _int("run.max_plies", run["max_plies"], 1)
    if "out" in run:
        kwargs["out"] = run["out"]
    if "jobs" in run:
        kwargs["jobs"] = parse_jobs(run["jobs"], "run.jobs")
    if "emit_ppm" in run:
        kwargs["emit_ppm"] = _bool("run.emit_ppm", run["emit_ppm"])
    if "retain" in run:
        kwargs["retain"] = _bool("run.retain", run["retain"])
    if parser.has_section("grid"):
        kwargs["thetas"] = _thetas(parser["grid"])
    if parser.has_section("fo"):
        fo = parser["fo"]
        if "d_values" in fo:
            ds = _float_list("fo.d_values", fo["d_values"])
            for d in ds:
                _prob("fo.d_values", d)
            kwargs["fo_d_values"] = ds
        if "exclude" in fo:
            pairs = []
            for item in fo["exclude"].replace(",", " ").split():
                try:
                    a, b = item.split(":")
                    pairs.append((float(a), float(b)))
                except ValueError:
                    raise ConfigError(f"fo.exclude: expected d1:d2 items, got {item!r}") from None
            kwargs["fo_exclude"] = tuple(pairs)
        if "bin_width" in fo:
            kwargs["bin_width"] = _int("fo.bin_width", fo["bin_width"], 1)
        if "L_min" in fo:
            kwargs["L_min"] = _int("fo.L_min", fo["L_min"], 1)
        if "L_max" in fo:
            kwargs["L_max"] = _int("fo.L_max", fo["L_max"], 1)
        if "cautious" in fo:
            kwargs["cautious"] = _bool("fo.cautious", fo["cautious"])
    if parser.has_section("fit"):
        fit = parser["fit"]
        if "lambda_table" in fit:
            path = Path(fit["lambda_table"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            kwargs["lambda_table"] = str(path)
        if "alpha_step" in fit:
            step = float(fit["alpha_step"])
            if not 0 < step <= 1:
                raise ConfigError("fit.alpha_step: must lie in (0, 1]")
            kwargs["alpha_step"] = step
    cfg = RunConfig(**kwargs)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.mode not in MODES:
        raise ConfigError(f"run.mode: expected one of {', '.join(MODES)}")
    if cfg.mode in ("play", "batch", "sweep"):
        for key in ("agent1", "agent2"):
            if getattr(cfg, key) is None:
                raise ConfigError(f"{key}: section required for mode {cfg.mode}")
    if cfg.mode == "sweep":
        for key in ("agent1", "agent2"):
            if getattr(cfg, key).strategy != "complementary":
                raise ConfigError(f"{key}.strategy: sweeps need complementary agents")
    if cfg.L_max < cfg.L_min:
        raise ConfigError("fo.L_max: must be >= fo.L_min")
    if cfg.mode == "fit_alpha" and cfg.lambda_table is None:
        raise ConfigError("fit.lambda_table: required for mode fit_alpha")


def load_config(path, mode: str | None = None) -> RunConfig:
    path = Path(path)
    text = path.read_text()  # FileNotFoundError propagates as is
    return parse_config(text, mode, path.parent)


def with_overrides(cfg: RunConfig, **changes) -> RunConfig:
    changes = {k: v for k, v in changes.items() if v is not None}
    new = replace(cfg, **changes)
    validate(new)
    return new

