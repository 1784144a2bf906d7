"""Scenario configuration: declarative key = value sections (INI)."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(Exception):
    """Unparseable or structurally invalid configuration."""


@dataclass
class ScenarioConfig:
    scenario: str
    output: str
    seed: int = 7
    params: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)

    def with_overrides(self, overrides: list[str]) -> "ScenarioConfig":
        params = dict(self.params)
        out = self.output
        scenario = self.scenario
        seed = self.seed
        for item in overrides:
            if "=" not in item:
                raise ConfigError(f"override {item!r} is not key=value")
            key, value = item.split("=", 1)
            key = key.strip()
            if key in ("output", "run.output"):
                out = value.strip()
            elif key in ("scenario", "run.scenario"):
                scenario = value.strip()
            elif key in ("seed", "run.seed"):
                seed = int(value)
            else:
                params[key.removeprefix("params.")] = _coerce(value.strip())
        return ScenarioConfig(scenario, out, seed, params, dict(self.sweep))


def _coerce(text: str):
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    return text


def load_config(path: str | Path) -> ScenarioConfig:
    parser = configparser.ConfigParser()
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    if not read:
        raise ConfigError(f"config file not found: {path}")
    if "run" not in parser or "scenario" not in parser["run"]:
        raise ConfigError("config needs a [run] section with a scenario key")
    run = parser["run"]
    params = {}
    if "params" in parser:
        params = {k: _coerce(v) for k, v in parser["params"].items()}
    sweep = {}
    if "sweep" in parser:
        sweep = {k: [_coerce(v) for v in vals.split()]
                 for k, vals in parser["sweep"].items()}
    return ScenarioConfig(
        scenario=run["scenario"].strip(),
        output=run.get("output", "run-output").strip(),
        seed=int(run.get("seed", "7")),
        params=params,
        sweep=sweep,
    )
