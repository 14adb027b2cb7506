"""Seeded synthetic cut-in events.

The POV changes lane with a smoothstep lateral position profile, so lateral
speed and heading are continuous and the peak lateral speed is an explicit
parameter. Speeds are constant except for an optional constant-deceleration
human braking segment on the ego.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .kinematics import (LaneLayout, OrientedBox, Trajectory, TrajectorySample,
                         VehicleGeometry, boxes_overlap, longitudinal_gap)
from .scenario import Scenario, validate_scenario

# Peak speed of a smoothstep 3u^2 - 2u^3 over duration T and displacement D
# is 1.5 D / T.
SMOOTHSTEP_PEAK = 1.5
JITTER = 0.1          # bound on seeded longitudinal start jitter, m
LATERAL_JITTER = 0.05  # bound on seeded lateral start jitter, m
PRECISION = 9          # decimals kept in generated values
PRESETS = ("paper_like", "stress_lateral", "slow_drift")


class InvalidParams(ValueError):
    pass


@dataclass(frozen=True)
class CutinParams:
    ego_speed: float
    pov_speed: float
    initial_gap: float
    pov_lateral_speed: float
    lane_change_start: float = 1.0
    lane_width: float = 3.5
    duration: float = 8.0
    sample_dt: float = 0.1
    human_brake_time: float | None = None  # None: crossing time + human_brake_delay
    human_brake_decel: float = 4.0         # 0 disables human braking
    seed: int = 0
    human_brake_delay: float = 1.2
    lateral_displacement: float | None = None  # None: one lane width
    ego_lateral_offset: float = 0.0           # toward the POV, within the ego lane
    pov_side: str = "left"
    ego_length: float = 4.5
    ego_width: float = 1.8
    pov_length: float = 4.5
    pov_width: float = 1.8
    scenario_id: str | None = None

    @property
    def displacement(self) -> float:
        return self.lane_width if self.lateral_displacement is None else self.lateral_displacement

    @property
    def lane_change_duration(self) -> float:
        return SMOOTHSTEP_PEAK * self.displacement / self.pov_lateral_speed


def _check(p: CutinParams) -> None:
    problems = []
    if not p.pov_speed < p.ego_speed:
        problems.append("pov_speed < ego_speed")
    if not p.pov_speed >= 0:
        problems.append("pov_speed >= 0")
    if not p.initial_gap > 0:
        problems.append("initial_gap > 0")
    if not p.pov_lateral_speed > 0:
        problems.append("pov_lateral_speed > 0")
    if not p.lane_width > 0:
        problems.append("lane_width > 0")
    if not 0 < p.sample_dt <= 0.2:
        problems.append("0 < sample_dt <= 0.2")
    if not p.duration >= 1.0:
        problems.append("duration >= 1")
    if not p.lane_change_start >= 0:
        problems.append("lane_change_start >= 0")
    if not p.displacement > 0:
        problems.append("lateral_displacement > 0")
    if not p.human_brake_decel >= 0:
        problems.append("human_brake_decel >= 0")
    if p.pov_side not in ("left", "right"):
        problems.append("pov_side in {left, right}")
    if problems:
        raise InvalidParams("invalid cut-in parameters: " + ", ".join(problems))


def smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def smoothstep_rate(u):
    inside = (u > 0.0) & (u < 1.0)
    return np.where(inside, 6.0 * u * (1.0 - u), 0.0)


def lateral_offset(p: CutinParams, t):
    """POV displacement toward the ego lane at time(s) ``t``, without jitter."""
    u = (np.asarray(t, dtype=float) - p.lane_change_start) / p.lane_change_duration
    return p.displacement * smoothstep(u)


def lateral_speed(p: CutinParams, t):
    u = (np.asarray(t, dtype=float) - p.lane_change_start) / p.lane_change_duration
    return p.displacement / p.lane_change_duration * smoothstep_rate(u)


def marking_crossing_time(p: CutinParams) -> float | None:
    """When the POV side nearest the ego reaches the marking (heading ignored)."""
    needed = 0.5 * p.lane_width - 0.5 * p.pov_width
    if needed <= 0:
        return p.lane_change_start
    if p.displacement < needed:
        return None
    # smoothstep is monotone on [0, 1]: solve 3u^2 - 2u^3 = r by bisection
    r = needed / p.displacement
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if mid * mid * (3 - 2 * mid) < r:
            lo = mid
        else:
            hi = mid
    return p.lane_change_start + 0.5 * (lo + hi) * p.lane_change_duration


def _human_brake_time(p: CutinParams) -> float | None:
    if p.human_brake_decel <= 0:
        return None
    if p.human_brake_time is not None:
        return p.human_brake_time
    crossing = marking_crossing_time(p)
    if crossing is None:
        return None
    return crossing + p.human_brake_delay


def generate(p: CutinParams) -> Scenario:
    """Build one synthetic cut-in event from ``p``."""
    _check(p)
    rng = np.random.default_rng(p.seed)
    gap_jitter = float(rng.uniform(-JITTER, JITTER))
    lat_jitter = float(rng.uniform(-LATERAL_JITTER, LATERAL_JITTER))

    lane = LaneLayout.from_center(p.lane_width, p.pov_side, 0.0)
    ego_geom = VehicleGeometry(p.ego_length, p.ego_width)
    pov_geom = VehicleGeometry(p.pov_length, p.pov_width)
    n = int(round(p.duration / p.sample_dt))
    t = np.round(np.arange(n + 1) * p.sample_dt, PRECISION)

    # ego: constant speed, then optional constant deceleration to standstill
    tb = _human_brake_time(p)
    v0 = p.ego_speed
    if tb is None:
        ego_v = np.full_like(t, v0)
        ego_x = v0 * t
        ego_a = np.zeros_like(t)
    else:
        a = p.human_brake_decel
        tau = np.clip(t - tb, 0.0, v0 / a)
        ego_v = v0 - a * tau
        # tau saturates at the stopping time, which freezes x at standstill
        ego_x = v0 * np.minimum(t, tb) + v0 * tau - 0.5 * a * tau ** 2
        ego_a = np.where((t >= tb) & (ego_v > 0), -a, 0.0)
    ego_y = np.full_like(t, lane.ego_lane_center_y + lane.toward_pov * p.ego_lateral_offset)

    # POV: constant speed, smoothstep lateral motion toward the ego lane
    pov_x0 = ego_geom.half_length + p.initial_gap + gap_jitter + pov_geom.half_length
    pov_x = pov_x0 + p.pov_speed * t
    pov_y = (lane.pov_lane_center_y + lat_jitter
             + lane.toward_ego * lateral_offset(p, t))
    vy = lane.toward_ego * lateral_speed(p, t)
    pov_h = np.arctan2(vy, p.pov_speed)

    def traj(x, y, v, acc, h):
        cols = [np.round(c, PRECISION) for c in (t, x, y, v, acc, h)]
        return Trajectory(TrajectorySample(*map(float, row)) for row in zip(*cols))

    sid = p.scenario_id or f"cutin_s{p.seed}"
    s = Scenario(sid, lane, ego_geom, pov_geom,
                 traj(ego_x, ego_y, ego_v, ego_a, np.zeros_like(t)),
                 traj(pov_x, pov_y, np.full_like(t, p.pov_speed), np.zeros_like(t), pov_h))
    return validate_scenario(s)


# -- suites ------------------------------------------------------------------

def original_collides(s: Scenario, dt: float = 0.01) -> bool:
    """Whether the recorded (human-driven) trajectories ever touch."""
    t0, t1 = s.start, s.end
    n = int(math.floor((t1 - t0) / dt + 1e-9))
    for k in range(n + 1):
        t = min(t0 + k * dt, t1)
        ego, pov = s.ego_traj.interpolate(t), s.pov_traj.interpolate(t)
        if boxes_overlap(OrientedBox.of(ego, s.ego_geom), OrientedBox.of(pov, s.pov_geom)):
            return True
    return False


def _cutin(rng, seed, ego_range, delta_range, lat_range, gap_range, decel_range,
           human_offset_range):
    ego = rng.uniform(*ego_range)
    delta = rng.uniform(*delta_range)
    lat = rng.uniform(*lat_range)
    gap_at_start = rng.uniform(*gap_range)
    start = rng.uniform(1.0, 2.0)
    p = CutinParams(ego, ego - delta, gap_at_start + delta * start, lat,
                    lane_change_start=start, human_brake_decel=rng.uniform(*decel_range),
                    seed=seed)
    human = max(0.5, marking_crossing_time(p) + rng.uniform(*human_offset_range))
    # recordings stop a few seconds after the human response
    end = human + rng.uniform(1.5, 4.0)
    return replace(p, human_brake_time=round(human, 3), duration=round(min(end, 15.0), 1))


def _paper_like(rng, seed):
    return _cutin(rng, seed, (20.0, 35.0), (3.0, 12.0), (0.4, 1.5), (5.0, 30.0),
                  (3.0, 6.0), (-1.0, 0.8))


def _stress_lateral(rng, seed):
    return _cutin(rng, seed, (22.0, 32.0), (6.0, 12.0), (1.2, 2.0), (10.0, 30.0),
                  (4.0, 6.0), (-0.2, 0.6))


def _slow_drift(rng, seed):
    ego = rng.uniform(20.0, 30.0)
    delta = rng.uniform(2.0, 8.0)
    p = CutinParams(ego, ego - delta, rng.uniform(10.0, 30.0), rng.uniform(0.1, 0.3),
                    lane_change_start=rng.uniform(1.0, 2.0),
                    lane_width=rng.uniform(3.0, 3.5),
                    lateral_displacement=rng.uniform(0.15, 0.3),
                    ego_lateral_offset=rng.uniform(0.0, 0.3),
                    human_brake_decel=rng.uniform(0.5, 2.0), seed=seed)
    human = p.lane_change_start + rng.uniform(0.5, 2.0)
    return replace(p, human_brake_time=round(human, 3), duration=6.0)


def _acceptable(s: Scenario, p: CutinParams) -> bool:
    crossing = marking_crossing_time(p)
    if crossing is not None and crossing <= s.end:
        # a cut-in happens ahead of the ego, not alongside or behind it
        ego, pov = s.ego_traj.interpolate(crossing), s.pov_traj.interpolate(crossing)
        if longitudinal_gap(ego, s.ego_geom, pov, s.pov_geom) <= 0.0:
            return False
    return not original_collides(s)


_SUITES = {"paper_like": _paper_like, "stress_lateral": _stress_lateral,
           "slow_drift": _slow_drift}
MAX_ATTEMPTS = 1000


def generate_suite(n: int, seed: int, preset: str = "paper_like") -> list[Scenario]:
    """Deterministic suite of ``n`` events drawn from one preset's ranges.

    Candidates whose recorded trajectories collide are redrawn: the source
    events are near-crashes, so the human-driven original must stay clear.
    """
    if preset not in _SUITES:
        raise ValueError(f"unknown preset {preset!r}; expected one of {PRESETS}")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        for attempt in range(MAX_ATTEMPTS):
            p = _SUITES[preset](rng, seed * 100003 + i * 1009 + attempt)
            p = replace(p, scenario_id=f"{preset}_{seed}_{i:04d}")
            s = generate(p)
            if _acceptable(s, p):
                out.append(s)
                break
        else:
            raise RuntimeError(f"{preset}: no collision-free event after {MAX_ATTEMPTS} draws")
    return out
