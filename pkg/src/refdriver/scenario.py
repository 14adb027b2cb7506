"""Scenario container and its JSON interchange format."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .kinematics import (LaneLayout, Trajectory, TrajectorySample, VehicleGeometry,
                         lateral_half_extent)

FORMAT_VERSION = "1.0"
MAX_SAMPLE_SPACING = 0.2
MIN_COMMON_SPAN = 1.0


class ParseError(ValueError):
    pass


class InvariantViolation(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    id: str
    lane: LaneLayout
    ego_geom: VehicleGeometry
    pov_geom: VehicleGeometry
    ego_traj: Trajectory
    pov_traj: Trajectory

    @property
    def start(self) -> float:
        return max(self.ego_traj.start, self.pov_traj.start)

    @property
    def end(self) -> float:
        return min(self.ego_traj.end, self.pov_traj.end)


def validate_scenario(s: Scenario) -> Scenario:
    """Raise :class:`InvariantViolation` naming the first failed check."""
    for who, traj in (("ego", s.ego_traj), ("pov", s.pov_traj)):
        if len(traj) < 2:
            raise InvariantViolation(f"{who}: at least two samples required")
        ts = traj.t
        for a, b in zip(ts, ts[1:]):
            if not b > a:
                raise InvariantViolation(f"{who}: t strictly increasing")
            if b - a > MAX_SAMPLE_SPACING + 1e-9:
                raise InvariantViolation(f"{who}: sample spacing <= {MAX_SAMPLE_SPACING} s")
        if any(v < 0 for v in traj.speed):
            raise InvariantViolation(f"{who}: speed >= 0")
        for col in (traj.x, traj.y, traj.speed, traj.accel, traj.heading):
            if not all(math.isfinite(v) for v in col):
                raise InvariantViolation(f"{who}: finite sample values")
    if s.end - s.start < MIN_COMMON_SPAN - 1e-9:
        raise InvariantViolation(f"common time interval >= {MIN_COMMON_SPAN} s")
    ego0 = s.ego_traj.interpolate(s.start)
    pov0 = s.pov_traj.interpolate(s.start)
    reach = (lateral_half_extent(s.ego_geom, ego0.heading)
             + lateral_half_extent(s.pov_geom, pov0.heading))
    if abs(pov0.y - ego0.y) <= reach:
        raise InvariantViolation("POV initially clear of the ego corridor")
    return s


# -- serialization ---------------------------------------------------------

def _traj_to_list(traj: Trajectory) -> list[dict]:
    return [{"t": s.t, "x": s.x, "y": s.y, "speed": s.speed, "accel": s.accel,
             "heading": s.heading} for s in traj]


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "id": s.id,
        "units": {"length": "m", "time": "s", "speed": "m/s", "accel": "m/s^2",
                  "heading": "rad"},
        "lane": {"lane_width": s.lane.lane_width, "pov_side": s.lane.pov_side,
                 "ego_lane_center_y": s.lane.ego_lane_center_y,
                 "marking_y": s.lane.marking_y},
        "ego_geom": {"length": s.ego_geom.length, "width": s.ego_geom.width},
        "pov_geom": {"length": s.pov_geom.length, "width": s.pov_geom.width},
        "ego_traj": _traj_to_list(s.ego_traj),
        "pov_traj": _traj_to_list(s.pov_traj),
    }


def dumps_scenario(s: Scenario) -> str:
    # repr-based float output is shortest round-trip, hence lossless
    return json.dumps(scenario_to_dict(s), indent=1) + "\n"


def _need(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise ParseError(f"{where}: missing field '{key}'")
    return obj[key]


def _num(obj, key, where) -> float:
    v = _need(obj, key, where)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"{where}.{key}: expected a number, got {v!r}")
    return float(v)


def _parse_traj(items, where) -> Trajectory:
    if not isinstance(items, list):
        raise ParseError(f"{where}: expected a list of samples")
    samples = []
    for i, it in enumerate(items):
        w = f"{where}[{i}]"
        samples.append(TrajectorySample(*(_num(it, k, w) for k in
                                          ("t", "x", "y", "speed", "accel", "heading"))))
    return Trajectory(samples)


def scenario_from_dict(d: dict, validate: bool = True) -> Scenario:
    version = _need(d, "format_version", "scenario")
    if version != FORMAT_VERSION:
        raise ParseError(f"format_version: unsupported version {version!r}")
    sid = _need(d, "id", "scenario")
    if not isinstance(sid, str):
        raise ParseError("id: expected a string")
    lane_d = _need(d, "lane", "scenario")
    side = _need(lane_d, "pov_side", "lane")
    try:
        lane = LaneLayout(_num(lane_d, "lane_width", "lane"), side,
                          _num(lane_d, "ego_lane_center_y", "lane"),
                          _num(lane_d, "marking_y", "lane"))
        ego_geom = VehicleGeometry(_num(_need(d, "ego_geom", "scenario"), "length", "ego_geom"),
                                   _num(d["ego_geom"], "width", "ego_geom"))
        pov_geom = VehicleGeometry(_num(_need(d, "pov_geom", "scenario"), "length", "pov_geom"),
                                   _num(d["pov_geom"], "width", "pov_geom"))
    except ParseError:
        raise
    except ValueError as exc:
        raise InvariantViolation(str(exc)) from exc
    s = Scenario(sid, lane, ego_geom, pov_geom,
                 _parse_traj(_need(d, "ego_traj", "scenario"), "ego_traj"),
                 _parse_traj(_need(d, "pov_traj", "scenario"), "pov_traj"))
    return validate_scenario(s) if validate else s


def loads_scenario(text: str, validate: bool = True) -> Scenario:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(d, validate)


def write_scenario(s: Scenario, path) -> None:
    Path(path).write_text(dumps_scenario(s), encoding="utf-8")


def read_scenario(path, validate: bool = True) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"{path}: not UTF-8 text") from exc
    try:
        return loads_scenario(text, validate)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc
