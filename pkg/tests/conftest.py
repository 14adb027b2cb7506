from __future__ import annotations

import math

import numpy as np
import pytest

from refdriver.base import DriverDecision
from refdriver.kinematics import (LaneLayout, Trajectory, TrajectorySample, VehicleGeometry)
from refdriver.scenario import Scenario


class ScriptedBrake:
    """Driver that requests a fixed deceleration from a given time on."""

    latched = True

    def __init__(self, onset: float, decel: float = 7.6, jerk: float = 12.65,
                 name: str = "scripted"):
        self.onset, self.decel, self.brake_jerk, self.name = onset, decel, jerk, name

    def reset(self):
        pass

    def decide(self, t, ego, ego_geom, pov_traj, pov_geom, lane):
        if t >= self.onset - 1e-9:
            return DriverDecision(self.decel, "braking")
        return DriverDecision()


def straight_traj(t0, t1, dt, x0, speed, y=0.0, heading=0.0):
    n = int(round((t1 - t0) / dt))
    ts = [t0 + k * dt for k in range(n + 1)]
    return Trajectory(TrajectorySample(t, x0 + speed * (t - t0), y, speed, 0.0, heading)
                      for t in ts)


def make_scenario(ego_traj, pov_traj, lane_width=3.5, sid="hand", geom=None):
    geom = geom or VehicleGeometry(4.5, 1.8)
    return Scenario(sid, LaneLayout.from_center(lane_width, "left"), geom, geom,
                    ego_traj, pov_traj)


@pytest.fixture
def lane():
    return LaneLayout.from_center(3.5, "left")


@pytest.fixture
def geom():
    return VehicleGeometry(4.5, 1.8)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance report -----------------------------------------------------------

_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance():
    """``report(number, ok, text)`` records one pass/fail line for the summary."""
    def report(number: int, ok: bool, text: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {text}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
