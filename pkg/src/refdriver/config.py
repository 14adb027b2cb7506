"""Run configuration: defaults, JSON file loading and the annotated dump."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .ccdm import CcdmParams
from .engine import DEFAULT_DT, HUMAN_ONSET_THRESHOLD, MODEL_NAMES
from .fsm import FsmParams
from .generator import PRESETS


class ConfigError(ValueError):
    pass


_NOTES = {
    "ccdm.wandering_half_width": "R157 Annex 3 CCDM: lateral wandering zone, each side of the POV lane centre (m)",
    "ccdm.risk_perception_time": "R157 Annex 3 CCDM: risk perception time (s)",
    "ccdm.braking_delay": "R157 Annex 3 CCDM: time from perception to brake onset (s)",
    "ccdm.ttc_threshold": "R157 Annex 3 CCDM: brake only while longitudinal TTC is below this (s)",
    "ccdm.max_decel": "R157 Annex 3 CCDM: constant braking deceleration (m/s^2)",
    "ccdm.jerk": "R157 Annex 3 CCDM: 7.6 m/s^2 reached 0.6 s after onset (m/s^3)",
    "fsm.comfortable_decel": "R157 Annex 3 FSM: comfortable deceleration, PFS-proportional range (m/s^2)",
    "fsm.max_decel": "R157 Annex 3 FSM: maximum deceleration when CFS > 0 (m/s^2)",
    "fsm.jerk": "R157 Annex 3 FSM: same jerk as the CCDM (m/s^3)",
    "fsm.prediction_horizon": "implementation choice: constant-velocity path prediction horizon (s)",
    "fsm.reaction_time_proactive": "implementation choice: reaction distance in the proactive requirement (s)",
    "fsm.lateral_speed_window": "implementation choice: finite-difference window for POV lateral speed (s)",
    "dt": "implementation choice: fixed simulation step (s)",
    "human_onset_threshold": "human evasive-manoeuvre onset: first ego accel at or below this (m/s^2)",
    "histogram_bin_time": "t_diff histogram bin width (s)",
    "histogram_bin_dist": "LDBO histogram bin width (m)",
    "alpha": "significance level of the Wilcoxon tests",
}


@dataclass(frozen=True)
class RunConfig:
    scenario_dir: str | None = None  # None: <output_dir>/scenarios
    output_dir: str = "out"
    models: tuple[str, ...] = MODEL_NAMES
    dt: float = DEFAULT_DT
    human_onset_threshold: float = HUMAN_ONSET_THRESHOLD
    ccdm: CcdmParams = field(default_factory=CcdmParams)
    fsm: FsmParams = field(default_factory=FsmParams)
    histogram_bin_time: float = 0.25
    histogram_bin_dist: float = 0.25
    alpha: float = 0.01
    preset: str = "paper_like"
    n: int = 38
    seed: int = 7
    workers: int = 1

    def __post_init__(self):
        if not self.models:
            raise ConfigError("models must not be empty")
        bad = [m for m in self.models if m not in MODEL_NAMES]
        if bad:
            raise ConfigError(f"unknown model(s) {bad}; expected a subset of {list(MODEL_NAMES)}")
        if not (self.histogram_bin_time > 0 and self.histogram_bin_dist > 0):
            raise ConfigError("histogram bin widths must be positive")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if not self.human_onset_threshold < 0:
            raise ConfigError("human_onset_threshold must be negative")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}")
        if self.n < 1:
            raise ConfigError("n must be >= 1")

    @property
    def scenarios_path(self) -> Path:
        return Path(self.scenario_dir) if self.scenario_dir else Path(self.output_dir) / "scenarios"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["models"] = list(self.models)
        d["_notes"] = dict(_NOTES)
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def config_from_dict(d: dict, base: RunConfig | None = None) -> RunConfig:
    base = base or RunConfig()
    known = {f.name for f in fields(RunConfig)}
    updates = {}
    for key, value in d.items():
        if key.startswith("_"):
            continue
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        if key in ("ccdm", "fsm"):
            cls = CcdmParams if key == "ccdm" else FsmParams
            names = {f.name for f in fields(cls)}
            extra = set(value) - names
            if extra:
                raise ConfigError(f"unknown {key} parameter(s): {sorted(extra)}")
            try:
                value = replace(getattr(base, key), **value)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        elif key == "models":
            value = tuple(value)
        updates[key] = value
    try:
        return replace(base, **updates)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> RunConfig:
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return config_from_dict(d)
