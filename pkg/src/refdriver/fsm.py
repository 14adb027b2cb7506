"""Fuzzy Safety Model (R157 "performance model 2"), cut-in branch.

A lateral check predicts when the POV footprint would first reach the ego
corridor; a longitudinal check turns the gap left at that instant into a
required deceleration. Two memberships follow:

* PFS ramps from 0 to 1 as the proactive requirement (gap shortened by one
  reaction distance) goes from 0 to the comfortable deceleration.
* CFS ramps from 0 to 1 as the plain requirement goes from the comfortable
  to the maximum deceleration.

The membership shapes are a self-contained construction; every constant sits
in :class:`FsmParams` so a different rule base can be dropped in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Sequence

from .base import DriverDecision
from .kinematics import (LaneLayout, Trajectory, TrajectorySample, VehicleGeometry,
                         lateral_half_extent, longitudinal_gap)


class InsufficientHistory(ValueError):
    pass


@dataclass(frozen=True)
class FsmParams:
    comfortable_decel: float = 4.0
    max_decel: float = 6.0
    jerk: float = 12.65
    prediction_horizon: float = 4.0
    reaction_time_proactive: float = 0.75
    lateral_speed_window: float = 0.3

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"FsmParams.{f.name} must be positive")
        if not self.comfortable_decel < self.max_decel:
            raise ValueError("comfortable_decel must be below max_decel")


@dataclass(frozen=True)
class FuzzyAssessment:
    pfs: float
    cfs: float
    encroachment_time: float | None = None
    lateral_speed: float = 0.0
    required_decel: float = 0.0
    proactive_decel: float = 0.0


def _clamp01(v: float) -> float:
    return 0.0 if v <= 0.0 else 1.0 if v >= 1.0 else v


def _required(closing: float, gap: float) -> float:
    if closing <= 0.0:
        return 0.0
    if gap <= 0.0:
        return math.inf
    return closing * closing / (2.0 * gap)


def encroachment_time(ego: TrajectorySample, ego_geom: VehicleGeometry,
                      pov: TrajectorySample, pov_geom: VehicleGeometry,
                      lateral_speed: float, horizon: float) -> float | None:
    """First time within ``horizon`` at which the POV, moving laterally at a
    constant rate, overlaps the corridor swept by the ego footprint."""
    reach = (lateral_half_extent(ego_geom, ego.heading)
             + lateral_half_extent(pov_geom, pov.heading))
    d = pov.y - ego.y
    if abs(d) <= reach:
        return 0.0
    closing_lat = -lateral_speed if d > 0 else lateral_speed
    if closing_lat <= 0.0:
        return None
    tau = (abs(d) - reach) / closing_lat
    return tau if tau <= horizon else None


def fsm_assess(params: FsmParams, ego: TrajectorySample, ego_geom: VehicleGeometry,
               pov_history: Sequence[TrajectorySample],
               pov_geom: VehicleGeometry) -> FuzzyAssessment:
    """Lateral + longitudinal safety check on the latest POV sample.

    ``pov_history`` must reach back at least ``lateral_speed_window``
    seconds; the POV lateral speed is the finite difference over that window.
    """
    hist = pov_history if isinstance(pov_history, Trajectory) else Trajectory(pov_history)
    if len(hist) < 2 or hist.end - hist.start < params.lateral_speed_window - 1e-9:
        raise InsufficientHistory(
            f"POV history spans {hist.end - hist.start if len(hist) else 0:.3f} s, "
            f"need {params.lateral_speed_window} s")
    pov = hist[-1]
    past = hist.interpolate(max(hist.start, pov.t - params.lateral_speed_window))
    v_lat = (pov.y - past.y) / (pov.t - past.t)

    tau = encroachment_time(ego, ego_geom, pov, pov_geom, v_lat, params.prediction_horizon)
    if tau is None:
        return FuzzyAssessment(0.0, 0.0, None, v_lat)

    closing = ego.speed - pov.speed
    g_enc = longitudinal_gap(ego, ego_geom, pov, pov_geom) - closing * tau
    if g_enc < -(ego_geom.length + pov_geom.length):
        # ego has already driven past the POV when the paths meet
        return FuzzyAssessment(0.0, 0.0, tau, v_lat)
    a_req = _required(closing, g_enc)
    a_pro = _required(closing, g_enc - ego.speed * params.reaction_time_proactive)

    pfs = _clamp01(a_pro / params.comfortable_decel) if a_pro < math.inf else 1.0
    span = params.max_decel - params.comfortable_decel
    cfs = _clamp01((a_req - params.comfortable_decel) / span) if a_req < math.inf else 1.0
    return FuzzyAssessment(pfs, cfs, tau, v_lat, a_req, a_pro)


def fsm_command(a: FuzzyAssessment, params: FsmParams) -> float:
    """Requested deceleration: PFS-proportional up to the comfortable level,
    CFS-proportional between comfortable and maximum."""
    if a.cfs <= 0.0:
        return a.pfs * params.comfortable_decel
    return params.comfortable_decel + a.cfs * (params.max_decel - params.comfortable_decel)


class FsmDriver:
    name = "fsm"
    latched = False

    def __init__(self, params: FsmParams | None = None):
        self.params = params or FsmParams()
        self.last: FuzzyAssessment | None = None

    @property
    def brake_jerk(self) -> float:
        return self.params.jerk

    def reset(self) -> None:
        self.last = None

    def decide(self, t: float, ego: TrajectorySample, ego_geom: VehicleGeometry,
               pov_traj: Trajectory, pov_geom: VehicleGeometry,
               lane: LaneLayout) -> DriverDecision:
        t_past = t - self.params.lateral_speed_window
        if t_past < pov_traj.start - 1e-12:
            return DriverDecision(0.0, "warmup")
        history = Trajectory([pov_traj.interpolate(max(t_past, pov_traj.start)),
                              pov_traj.interpolate(t)])
        self.last = fsm_assess(self.params, ego, ego_geom, history, pov_geom)
        decel = fsm_command(self.last, self.params)
        return DriverDecision(decel, "braking" if decel > 0.0 else "monitoring")
