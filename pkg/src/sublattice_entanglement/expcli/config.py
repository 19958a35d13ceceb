"""Experiment configuration and its validation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from typing import Any, Optional

from ..errors import ConfigError
from ..fockoracle import MAX_MODES

KINDS = ("spectrum_scatter", "mu_sweep", "interaction_sweep", "crosscheck")

DEFAULTS: dict[str, dict[str, Any]] = {
    "spectrum_scatter": {"n": 12, "boundary": "open"},
    "mu_sweep": {"n": 2000, "boundary": "periodic", "grid": (0.0, 0.25, 0.5, 0.75, 1.0, 1.1, 1.5, 2.0)},
    "interaction_sweep": {"n": 12, "boundary": "open", "grid": tuple(-20.0 + 0.5 * i for i in range(45))},
    "crosscheck": {"n": 8, "boundary": "open"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    n: int = 12
    seed: int = 1
    boundary: str = "open"
    topology: str = "chain_nn"
    grid: tuple[float, ...] = ()
    alpha: float = 1.0
    subset: str | tuple[int, ...] = "sublattice_B"
    out_path: Optional[str] = None
    format: str = "csv"
    plot: bool = False
    workers: int = 1

    def validate(self) -> "ExperimentConfig":
        if self.kind not in KINDS:
            raise ConfigError("kind", f"must be one of {', '.join(KINDS)}")
        if not isinstance(self.n, int) or self.n < 2:
            raise ConfigError("n", "must be an integer >= 2")
        if self.boundary not in ("open", "periodic"):
            raise ConfigError("boundary", "must be 'open' or 'periodic'")
        if self.topology not in ("chain_nn", "dense"):
            raise ConfigError("topology", "must be 'chain_nn' or 'dense'")
        if self.format not in ("csv", "json"):
            raise ConfigError("format", "must be 'csv' or 'json'")
        if not (self.alpha > 0):
            raise ConfigError("alpha", "must be positive (or inf)")
        if self.workers < 1:
            raise ConfigError("workers", "must be >= 1")
        if self.kind in ("mu_sweep", "interaction_sweep") and not self.grid:
            raise ConfigError("grid", "sweeps need a nonempty grid")
        if any(not math.isfinite(x) for x in self.grid):
            raise ConfigError("grid", "values must be finite")
        if self.kind == "mu_sweep":
            if min(self.grid) < 0:
                raise ConfigError("grid", "the analytic density is defined for mu >= 0 only")
            if self.boundary == "periodic" and self.n % 2:
                raise ConfigError("n", "a periodic chain needs even n")
        if self.kind in ("spectrum_scatter", "interaction_sweep") and self.n > MAX_MODES:
            raise ConfigError("n", f"exceeds the Fock-space guard of {MAX_MODES} modes")
        if self.kind == "crosscheck" and not 4 <= self.n <= 10:
            raise ConfigError("n", "crosscheck runs N = 4, 6, ... up to n with 4 <= n <= 10")
        if self.kind == "interaction_sweep" and self.boundary == "periodic" and self.n % 2:
            raise ConfigError("boundary", "a periodic chain needs even n")
        if not isinstance(self.subset, str):
            if not self.subset or any(not 1 <= i <= self.n for i in self.subset):
                raise ConfigError("subset", f"explicit subsets need 1-based modes in 1..{self.n}")
            if len(set(self.subset)) != len(self.subset):
                raise ConfigError("subset", "modes must be distinct")
        elif self.subset != "sublattice_B":
            raise ConfigError("subset", "must be 'sublattice_B' or a list of modes")
        return self

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["grid"] = list(self.grid)
        out["alpha"] = "inf" if math.isinf(self.alpha) else self.alpha
        if not isinstance(self.subset, str):
            out["subset"] = list(self.subset)
        return out


def parse_alpha(value) -> float:
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "oo"):
            return math.inf
        try:
            return float(value)
        except ValueError:
            raise ConfigError("alpha", f"cannot parse {value!r}") from None
    return float(value)


def parse_grid(value) -> tuple[float, ...]:
    """``a:b:step`` (inclusive of ``b``), a comma list, or a JSON list."""
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    text = str(value).strip()
    try:
        if text.count(":") == 2:
            a, b, step = (float(t) for t in text.split(":"))
            if step <= 0 or b < a:
                raise ConfigError("grid", "need a <= b and step > 0")
            count = int(math.floor((b - a) / step + 1e-9)) + 1
            return tuple(round(a + i * step, 12) for i in range(count))
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ConfigError("grid", f"cannot parse {value!r}") from None


def parse_subset(value) -> str | tuple[int, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    text = str(value).strip()
    if text in ("B", "sublattice_B"):
        return "sublattice_B"
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise ConfigError("subset", f"cannot parse {value!r}") from None


def make_config(kind: str, **overrides) -> ExperimentConfig:
    """Build a validated config from kind defaults plus non-None overrides."""
    if kind not in KINDS:
        raise ConfigError("kind", f"must be one of {', '.join(KINDS)}")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(overrides) - known
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown field")
    values: dict[str, Any] = dict(DEFAULTS[kind])
    values.update({k: v for k, v in overrides.items() if v is not None})
    if "grid" in values:
        values["grid"] = parse_grid(values["grid"])
    if "alpha" in values:
        values["alpha"] = parse_alpha(values["alpha"])
    if "subset" in values:
        values["subset"] = parse_subset(values["subset"])
    for name in ("n", "seed", "workers"):
        if name in values and not isinstance(values[name], int):
            try:
                values[name] = int(values[name])
            except (TypeError, ValueError):
                raise ConfigError(name, "must be an integer") from None
    return ExperimentConfig(kind=kind, **values).validate()


def load_config(path: str, **overrides) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("config", str(exc)) from None
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError("kind", "config file must be a JSON object with a 'kind'")
    data.update({k: v for k, v in overrides.items() if v is not None})
    kind = data.pop("kind")
    return make_config(kind, **data)
