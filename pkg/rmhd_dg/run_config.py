"""
run_config.py — RunConfig: load, validate and resolve solver run settings.

Config files are flat ``key=value`` text (parsed with python-dotenv, ``#``
comments allowed) or JSON objects. Command-line ``--key=value`` overrides are
merged on top. Unset values resolve from the problem defaults and the CFL
table; ``resolve()`` returns every effective parameter for the manifest.
"""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

from dotenv import dotenv_values, load_dotenv

from .console_utils import safe_print
from .dg.errors import ConfigError, UnknownProblemError
from .dg.limiter import LIMIT_MODES
from .dg.physics import NEWTON_MAX_ITER, NEWTON_TOL, Floors
from .dg.problems import get_problem
from .dg.schemes import METHODS
from .dg.time_integration import SCHEMES, default_cfl
from .dg.weno import WENO_EPS, WENO_POWER

load_dotenv()

OUTPUT_DIR_ENV = "RMHD_DG_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "rmhd_output"

CONFIG_TEMPLATE = """\
# rmhd-dg run configuration
# Unset keys fall back to the problem defaults (see `rmhd-dg list-problems`).

problem=smooth1d
# noncentral | central
method=noncentral
# polynomial degree 1, 2 or 3
K=2
# cells in x; 2D problems use N x (aspect N) unless Ny is set
N=40
# Ny=
# euler | rk3 | rk4
scheme=rk4
# cfl=
# M=
# theta=
# t_end=
# output_dir=
# write fields every n steps, 0 = final state only
output_every=0
# per-stage | per-step | off | global
limiter=per-stage
# local | global
lf_alpha=local
# floors=false
# workers=1
# dump_dual=false
"""

_BOOL_TRUE = {"true", "1", "yes", "on"}
_BOOL_FALSE = {"false", "0", "no", "off"}


@dataclass(frozen=True)
class RunConfig:
    problem: str
    method: str = "noncentral"
    K: int = 1
    N: int | None = None
    Ny: int | None = None
    scheme: str = "rk3"
    cfl: float | None = None
    M: float | None = None
    theta: float | None = None
    t_end: float | None = None
    output_dir: str | None = None
    output_every: int = 0
    limiter: str = "per-stage"
    lf_alpha: str = "local"
    floors: bool | None = None
    rho_floor: float = Floors.rho
    p_floor: float = Floors.p
    max_steps: int | None = None
    workers: int = 1
    dump_dual: bool = False

    # -- construction ----------------------------------------------------------

    @classmethod
    def from_file(cls, path: str | Path, overrides: Mapping[str, Any] | None = None) -> "RunConfig":
        """Load a config file; ``overrides`` win over file values.

        Raises:
            FileNotFoundError: the file does not exist.
            ConfigError: unknown keys, unparsable or invalid values.
        """
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}\nTip: `rmhd-dg init {path}` writes a template.")
        if path.suffix.lower() == ".json":
            try:
                data = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
            if not isinstance(data, dict):
                raise ConfigError(f"{path}: expected a JSON object")
        else:
            data = {k: v for k, v in dotenv_values(path).items() if v is not None}
        return cls.from_mapping(data, overrides, source=str(path))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], overrides: Mapping[str, Any] | None = None,
                     source: str = "config") -> "RunConfig":
        merged = dict(data)
        merged.update(overrides or {})
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = sorted(set(merged) - set(known))
        if unknown:
            raise ConfigError(f"{source}: unknown keys {', '.join(unknown)}")
        if "problem" not in merged:
            raise ConfigError(f"{source}: required key 'problem' is missing")
        values = {k: _coerce(k, v, known[k].type, source) for k, v in merged.items()}
        cfg = cls(**values)
        cls._validate(cfg, source)
        return cfg

    @classmethod
    def create_template(cls, path: str | Path) -> Path:
        path = Path(path)
        if path.exists():
            raise FileExistsError(f"config file already exists: {path}")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(CONFIG_TEMPLATE, encoding="utf-8")
        safe_print(f"Config template written: {path}", "SUCCESS")
        return path

    def with_overrides(self, **changes) -> "RunConfig":
        cfg = dataclasses.replace(self, **changes)
        self._validate(cfg)
        return cfg

    # -- validation --------------------------------------------------------------

    @staticmethod
    def _validate(cfg: "RunConfig", source: str = "config") -> None:
        """Checks ranges and enumerations. Raises ConfigError."""
        try:
            get_problem(cfg.problem)
        except UnknownProblemError as exc:
            raise ConfigError(f"{source}: {exc}") from None
        if cfg.method not in METHODS:
            raise ConfigError(f"{source}: method must be one of {', '.join(METHODS)}, got {cfg.method!r}")
        if cfg.K not in (1, 2, 3):
            raise ConfigError(f"{source}: K must be 1, 2 or 3, got {cfg.K}")
        if cfg.scheme not in SCHEMES:
            raise ConfigError(f"{source}: scheme must be one of {', '.join(SCHEMES)}, got {cfg.scheme!r}")
        if cfg.limiter not in LIMIT_MODES:
            raise ConfigError(f"{source}: limiter must be one of {', '.join(LIMIT_MODES)}, got {cfg.limiter!r}")
        if cfg.lf_alpha not in ("local", "global"):
            raise ConfigError(f"{source}: lf_alpha must be local or global, got {cfg.lf_alpha!r}")
        if cfg.theta is not None and not 0.0 < cfg.theta <= 1.0:
            raise ConfigError(f"{source}: theta must lie in (0, 1], got {cfg.theta}")
        if cfg.cfl is not None and not cfg.cfl > 0.0:
            raise ConfigError(f"{source}: cfl must be positive, got {cfg.cfl}")
        if cfg.M is not None and cfg.M < 0.0:
            raise ConfigError(f"{source}: M must be non-negative, got {cfg.M}")
        if cfg.t_end is not None and not cfg.t_end > 0.0:
            raise ConfigError(f"{source}: t_end must be positive, got {cfg.t_end}")
        for key in ("N", "Ny"):
            n = getattr(cfg, key)
            if n is not None and n < 2 * cfg.K + 1:
                raise ConfigError(f"{source}: {key} must be at least 2K+1 = {2 * cfg.K + 1}, got {n}")
        if cfg.output_every < 0:
            raise ConfigError(f"{source}: output_every must be >= 0, got {cfg.output_every}")
        if cfg.workers < 1:
            raise ConfigError(f"{source}: workers must be >= 1, got {cfg.workers}")
        if cfg.max_steps is not None and cfg.max_steps < 1:
            raise ConfigError(f"{source}: max_steps must be >= 1, got {cfg.max_steps}")
        if not (cfg.rho_floor > 0.0 and cfg.p_floor > 0.0):
            raise ConfigError(f"{source}: floors must be positive")

    # -- resolution ----------------------------------------------------------------

    def resolve(self) -> dict[str, Any]:
        """Every effective parameter of the run, defaults filled in."""
        spec = get_problem(self.problem)
        n = self.N if self.N is not None else spec.cells[0]
        cells = spec.mesh_cells(n, self.Ny)
        theta = self.theta if self.theta is not None else (spec.theta if self.method == "central" else 1.0)
        floors = spec.floors if self.floors is None else self.floors
        return {
            "problem": spec.id,
            "dim": spec.dim,
            "gamma": spec.gamma,
            "method": self.method,
            "K": self.K,
            "cells": list(cells),
            "scheme": self.scheme,
            "cfl": self.cfl if self.cfl is not None else default_cfl(self.method, spec.dim, self.K),
            "M": self.M if self.M is not None else spec.M,
            "theta": theta,
            "t_end": self.t_end if self.t_end is not None else spec.t_end,
            "limiter": self.limiter,
            "lf_alpha": self.lf_alpha,
            "floors": floors,
            "rho_floor": self.rho_floor,
            "p_floor": self.p_floor,
            "quadrature_points": self.K + 1,
            "weno_eps": WENO_EPS,
            "weno_power": WENO_POWER,
            "newton_tol": NEWTON_TOL,
            "newton_max_iter": NEWTON_MAX_ITER,
            "output_every": self.output_every,
            "max_steps": self.max_steps,
            "dump_dual": self.dump_dual,
            "output_dir": str(self.resolved_output_dir()),
        }

    def resolved_output_dir(self) -> Path:
        return Path(self.output_dir or os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR)

    def run_name(self) -> str:
        spec = get_problem(self.problem)
        n = self.N if self.N is not None else spec.cells[0]
        return f"{self.problem}_{self.method}_P{self.K}_N{n}"

    def floor_values(self) -> Floors | None:
        spec = get_problem(self.problem)
        enabled = spec.floors if self.floors is None else self.floors
        return Floors(self.rho_floor, self.p_floor) if enabled else None


def _coerce(key: str, value: Any, annotation: str, source: str):
    """Turn file/CLI strings into the field's type."""
    if value is None:
        return None
    if not isinstance(value, str):
        if "int" in annotation and isinstance(value, float) and value.is_integer():
            return int(value)
        return value
    text = value.strip()
    if text == "" or text.lower() == "none":
        if "None" in annotation:
            return None
        raise ConfigError(f"{source}: {key} needs a value")
    try:
        if annotation.startswith("bool"):
            low = text.lower()
            if low in _BOOL_TRUE:
                return True
            if low in _BOOL_FALSE:
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if annotation.startswith("int"):
            return int(text)
        if annotation.startswith("float"):
            return float(text)
    except ValueError as exc:
        raise ConfigError(f"{source}: invalid value for {key}: {exc}") from None
    return text
