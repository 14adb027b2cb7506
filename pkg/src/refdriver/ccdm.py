"""Competent and careful driver model (R157 "performance model 1"), cut-in branch.

The POV leaving its wandering zone starts a fixed perception + braking delay;
once that has elapsed the model brakes as soon as the longitudinal TTC drops
into ``(0, ttc_threshold)``. Braking is latched at ``max_decel``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, fields

from .base import DriverDecision
from .kinematics import (LaneLayout, Trajectory, TrajectorySample, VehicleGeometry,
                         ttc as _ttc)

# Float guard on the arming comparison so a delay that lands on a step is not
# missed by one ulp.
_TIME_EPS = 1e-9


@dataclass(frozen=True)
class CcdmParams:
    wandering_half_width: float = 0.375
    risk_perception_time: float = 0.4
    braking_delay: float = 0.75
    ttc_threshold: float = 2.0
    max_decel: float = 7.6
    jerk: float = 12.65

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"CcdmParams.{f.name} must be positive")

    @property
    def reaction_time(self) -> float:
        return self.risk_perception_time + self.braking_delay


class Phase(enum.IntEnum):
    IDLE = 0
    WAITING = 1
    ARMED = 2
    BRAKING = 3


@dataclass(frozen=True)
class CcdmState:
    phase: Phase = Phase.IDLE
    detection_time: float | None = None
    onset_time: float | None = None


def wandering_zone_exited(pov: TrajectorySample, lane: LaneLayout,
                          half_width: float) -> bool:
    """True when the POV centre is outside its zone on the ego side."""
    offset = lane.toward_ego * (pov.y - lane.pov_lane_center_y)
    return offset > half_width


def ccdm_step(state: CcdmState, params: CcdmParams, t: float,
              ego: TrajectorySample, ego_geom: VehicleGeometry,
              pov: TrajectorySample, pov_geom: VehicleGeometry,
              lane: LaneLayout) -> tuple[CcdmState, DriverDecision]:
    """Advance the CCDM state machine to time ``t``.

    Transitions only move forward; a POV returning inside the wandering zone
    does not reset the timer.
    """
    if state.phase == Phase.IDLE and wandering_zone_exited(pov, lane, params.wandering_half_width):
        state = CcdmState(Phase.WAITING, detection_time=t)

    if (state.phase == Phase.WAITING
            and t >= state.detection_time + params.reaction_time - _TIME_EPS):
        state = CcdmState(Phase.ARMED, detection_time=state.detection_time)

    if state.phase == Phase.ARMED:
        value = _ttc(ego, ego_geom, pov, pov_geom)
        if value is not None and 0.0 < value < params.ttc_threshold:
            state = CcdmState(Phase.BRAKING, state.detection_time, onset_time=t)

    decel = params.max_decel if state.phase == Phase.BRAKING else 0.0
    return state, DriverDecision(decel, state.phase.name.lower(), state.detection_time)


class CcdmDriver:
    name = "ccdm"
    latched = True

    def __init__(self, params: CcdmParams | None = None):
        self.params = params or CcdmParams()
        self.state = CcdmState()

    @property
    def brake_jerk(self) -> float:
        return self.params.jerk

    def reset(self) -> None:
        self.state = CcdmState()

    def decide(self, t: float, ego: TrajectorySample, ego_geom: VehicleGeometry,
               pov_traj: Trajectory, pov_geom: VehicleGeometry,
               lane: LaneLayout) -> DriverDecision:
        pov = pov_traj.interpolate(t)
        self.state, decision = ccdm_step(self.state, self.params, t, ego, ego_geom,
                                         pov, pov_geom, lane)
        return decision
