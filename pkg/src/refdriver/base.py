"""What every driver model hands back to the simulation engine."""

from __future__ import annotations

from dataclasses import dataclass

from .kinematics import LaneLayout, Trajectory, TrajectorySample, VehicleGeometry


@dataclass(frozen=True)
class DriverDecision:
    decel: float = 0.0  # requested deceleration magnitude, m/s^2
    phase: str = "idle"
    detection_time: float | None = None


class NoReaction:
    """Worst-case reference: the ego driver never reacts."""

    name = "none"
    brake_jerk = 0.0
    latched = False

    def reset(self) -> None:
        pass

    def decide(self, t: float, ego: TrajectorySample, ego_geom: VehicleGeometry,
               pov_traj: Trajectory, pov_geom: VehicleGeometry,
               lane: LaneLayout) -> DriverDecision:
        return DriverDecision()
