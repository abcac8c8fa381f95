"""Run configuration: key=value text with section headers.

The parameter space is flat, so the format is a plain INI file. Every
key is schema-checked (unknown keys are rejected for sweep safety),
defaults are materialized, and the normalized echo of a parsed config
is the provenance record hashed into every output file.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import math
from dataclasses import dataclass, replace

from .initial_data import InitialDataError, InitialDataSpec, Window
from .solver import SolverConfig, geometric_times
from .spectral import Grid


class ConfigError(ValueError):
    pass


_SCHEMA = {
    "grid": {"n", "length"},
    "initial-data": {"alpha", "delta", "window_radius", "window_width"},
    "solver": {
        "epsilon",
        "dt",
        "t_end",
        "nonlinear",
        "snapshot_count",
        "quartering_steps",
        "snapshot_times",
    },
    "output": {"directory", "seed"},
    "sweep": {"epsilon", "delta", "alpha", "lambda"},
}


@dataclass(frozen=True)
class RunConfig:
    """Validated, fully-defaulted parameters of one run (plus sweep lists)."""

    n: int
    length: float
    alpha: float
    delta: float
    window_radius: float
    window_width: float
    epsilon: float
    dt: float | None  # None means auto (CFL-derived at run time)
    t_end: float
    nonlinear: bool
    snapshot_count: int
    quartering_steps: int
    snapshot_times: tuple | None
    directory: str
    seed: int
    sweep_epsilon: tuple = ()
    sweep_delta: tuple = ()
    sweep_alpha: tuple = ()
    sweep_lambda: tuple = ()

    def grid(self) -> Grid:
        return Grid(self.n, self.length)

    def data_spec(self) -> InitialDataSpec:
        return InitialDataSpec(
            self.grid(),
            self.alpha,
            self.delta,
            Window(self.window_radius, self.window_width),
        )

    def resolved_snapshot_times(self) -> tuple:
        if self.snapshot_times is not None:
            return self.snapshot_times
        return geometric_times(self.t_end, self.snapshot_count, self.quartering_steps)

    def solver_config(self, dt: float | None = None) -> SolverConfig:
        dt = dt if dt is not None else self.dt
        if dt is None:
            raise ConfigError("solver.dt is 'auto' and has not been resolved yet")
        return SolverConfig(
            eps=self.epsilon,
            dt=dt,
            t_end=self.t_end,
            snapshot_times=self.resolved_snapshot_times(),
            nonlinear_on=self.nonlinear,
        )

    def has_sweep(self) -> bool:
        return bool(self.sweep_epsilon or self.sweep_delta or self.sweep_alpha)

    def expand_sweep(self) -> list:
        """Cartesian product of the sweep lists; singletons fall back to the scalars."""
        eps_list = self.sweep_epsilon or (self.epsilon,)
        delta_list = self.sweep_delta or (self.delta,)
        alpha_list = self.sweep_alpha or (self.alpha,)
        plans = []
        i = 0
        for eps in eps_list:
            for delta in delta_list:
                for alpha in alpha_list:
                    plans.append(
                        (
                            f"run_{i:03d}",
                            replace(
                                self,
                                epsilon=eps,
                                delta=delta,
                                alpha=alpha,
                                sweep_epsilon=(),
                                sweep_delta=(),
                                sweep_alpha=(),
                            ),
                        )
                    )
                    i += 1
        return plans


def _get(parser, section, key, cast, default, errors: list):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key).strip()
    try:
        return cast(raw)
    except (ValueError, ArithmeticError) as exc:
        errors.append(f"{section}.{key}: {exc}")
        return default


def _as_bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _as_float_list(raw: str) -> tuple:
    return tuple(float(v) for v in raw.split(",") if v.strip())


def _as_dt(raw: str):
    if raw.lower() == "auto":
        return None
    return float(raw)


def parse_config(text: str) -> RunConfig:
    """Parse and validate; unknown keys, bad values and constraint breaks all raise."""
    parser = configparser.ConfigParser(
        strict=True, interpolation=None, inline_comment_prefixes=("#",)
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from exc

    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser.options(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key '{key}' in section [{section}]")

    errors: list = []
    n = _get(parser, "grid", "n", int, 64, errors)
    length = _get(parser, "grid", "length", float, 2 * math.pi, errors)
    alpha = _get(parser, "initial-data", "alpha", float, 1.0, errors)
    delta = _get(parser, "initial-data", "delta", float, length / 64, errors)
    window_radius = _get(parser, "initial-data", "window_radius", float, 0.46 * length, errors)
    window_width = _get(parser, "initial-data", "window_width", float, 0.05 * length, errors)
    epsilon = _get(parser, "solver", "epsilon", float, 0.0, errors)
    dt = _get(parser, "solver", "dt", _as_dt, None, errors)
    t_end = _get(parser, "solver", "t_end", float, 0.002 * length**2, errors)
    nonlinear = _get(parser, "solver", "nonlinear", _as_bool, True, errors)
    snapshot_count = _get(parser, "solver", "snapshot_count", int, 25, errors)
    quartering_steps = _get(parser, "solver", "quartering_steps", int, 5, errors)
    snapshot_times = _get(parser, "solver", "snapshot_times", _as_float_list, None, errors)
    directory = _get(parser, "output", "directory", str, "ssns-out", errors)
    seed = _get(parser, "output", "seed", int, 0, errors)
    sweep_epsilon = _get(parser, "sweep", "epsilon", _as_float_list, (), errors)
    sweep_delta = _get(parser, "sweep", "delta", _as_float_list, (), errors)
    sweep_alpha = _get(parser, "sweep", "alpha", _as_float_list, (), errors)
    sweep_lambda = _get(parser, "sweep", "lambda", _as_float_list, (), errors)
    if errors:
        raise ConfigError("; ".join(errors))

    cfg = RunConfig(
        n=n,
        length=length,
        alpha=alpha,
        delta=delta,
        window_radius=window_radius,
        window_width=window_width,
        epsilon=epsilon,
        dt=dt,
        t_end=t_end,
        nonlinear=nonlinear,
        snapshot_count=snapshot_count,
        quartering_steps=quartering_steps,
        snapshot_times=tuple(snapshot_times) if snapshot_times is not None else None,
        directory=directory,
        seed=seed,
        sweep_epsilon=sweep_epsilon,
        sweep_delta=sweep_delta,
        sweep_alpha=sweep_alpha,
        sweep_lambda=sweep_lambda,
    )
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig):
    """Re-validate every cross-field constraint, naming the offending field."""
    if cfg.n < 8 or cfg.n % 2 != 0 or (cfg.n & (cfg.n - 1)) != 0:
        raise ConfigError(f"grid.n must be a power of two >= 8, got {cfg.n}")
    if not cfg.length > 0:
        raise ConfigError(f"grid.length must be positive, got {cfg.length}")
    try:
        cfg.data_spec()
    except InitialDataError as exc:
        raise ConfigError(f"initial-data: {exc}") from exc
    if cfg.epsilon < 0:
        raise ConfigError(f"solver.epsilon must be >= 0, got {cfg.epsilon}")
    if cfg.epsilon >= cfg.length / 4:
        raise ConfigError(f"solver.epsilon must be < length/4, got {cfg.epsilon}")
    if cfg.dt is not None and not cfg.dt > 0:
        raise ConfigError(f"solver.dt must be positive (or 'auto'), got {cfg.dt}")
    if not cfg.t_end > 0:
        raise ConfigError(f"solver.t_end must be positive, got {cfg.t_end}")
    if cfg.snapshot_count < 1:
        raise ConfigError("solver.snapshot_count must be >= 1")
    if cfg.quartering_steps < 1:
        raise ConfigError("solver.quartering_steps must be >= 1")
    try:
        times = cfg.resolved_snapshot_times()
        cfg.solver_config(dt=cfg.dt if cfg.dt is not None else times[0])
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"solver: {exc}") from exc
    for name, vals in (
        ("sweep.epsilon", cfg.sweep_epsilon),
        ("sweep.delta", cfg.sweep_delta),
        ("sweep.alpha", cfg.sweep_alpha),
    ):
        if any(v < 0 for v in vals):
            raise ConfigError(f"{name} entries must be >= 0")
    if any(not 0 < v <= 1 for v in cfg.sweep_lambda):
        raise ConfigError("sweep.lambda entries must lie in (0, 1]")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def normalized_text(cfg: RunConfig) -> str:
    """Canonical echo with every default materialized; hashed for provenance."""
    out = io.StringIO()
    out.write("[grid]\n")
    out.write(f"n = {cfg.n}\n")
    out.write(f"length = {_fmt(cfg.length)}\n\n")
    out.write("[initial-data]\n")
    out.write(f"alpha = {_fmt(cfg.alpha)}\n")
    out.write(f"delta = {_fmt(cfg.delta)}\n")
    out.write(f"window_radius = {_fmt(cfg.window_radius)}\n")
    out.write(f"window_width = {_fmt(cfg.window_width)}\n\n")
    out.write("[solver]\n")
    out.write(f"epsilon = {_fmt(cfg.epsilon)}\n")
    out.write(f"dt = {'auto' if cfg.dt is None else _fmt(cfg.dt)}\n")
    out.write(f"t_end = {_fmt(cfg.t_end)}\n")
    out.write(f"nonlinear = {_fmt(cfg.nonlinear)}\n")
    if cfg.snapshot_times is not None:
        out.write(f"snapshot_times = {', '.join(_fmt(t) for t in cfg.snapshot_times)}\n\n")
    else:
        out.write(f"snapshot_count = {cfg.snapshot_count}\n")
        out.write(f"quartering_steps = {cfg.quartering_steps}\n\n")
    out.write("[output]\n")
    out.write(f"directory = {cfg.directory}\n")
    out.write(f"seed = {cfg.seed}\n")
    sweeps = [
        ("epsilon", cfg.sweep_epsilon),
        ("delta", cfg.sweep_delta),
        ("alpha", cfg.sweep_alpha),
        ("lambda", cfg.sweep_lambda),
    ]
    if any(v for _, v in sweeps):
        out.write("\n[sweep]\n")
        for key, vals in sweeps:
            if vals:
                out.write(f"{key} = {', '.join(_fmt(v) for v in vals)}\n")
    return out.getvalue()


def config_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def resolve_dt(cfg: RunConfig, u0_sup: float, safety: float = 0.8) -> float:
    """CFL-derived step for dt='auto' runs; heat-only runs step snapshot gaps."""
    from .solver import CFL_FACTOR

    if cfg.dt is not None:
        return cfg.dt
    if not cfg.nonlinear or u0_sup == 0:
        return cfg.t_end
    h = cfg.length / cfg.n
    return safety * CFL_FACTOR * h / u0_sup
