"""Counterfactual replay of cut-in events with a driver model in control.

The human evasive manoeuvre is removed by freezing ego speed at its onset;
the modified event is then replayed on a fixed time grid, and the driver
model takes over longitudinal control from the first step where it requests
braking. The POV always follows its recorded trajectory.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .base import DriverDecision, NoReaction
from .ccdm import CcdmDriver, CcdmParams
from .fsm import FsmDriver, FsmParams
from .kinematics import (OrientedBox, Trajectory, TrajectorySample, box_clearance,
                         boxes_overlap, laterally_overlapping, longitudinal_gap)
from .scenario import Scenario

HUMAN_ONSET_THRESHOLD = -0.2  # m/s^2
DEFAULT_DT = 0.01
MODEL_NAMES = ("ccdm", "fsm", "none")


class ExcludedEvent(ValueError):
    reason = "Excluded"


class NoOnset(ExcludedEvent):
    reason = "NoOnset"


class AlreadyDecelerating(ExcludedEvent):
    reason = "AlreadyDecelerating"


@dataclass(frozen=True)
class ModifiedScenario:
    base: Scenario
    human_onset_time: float
    modified_ego_traj: Trajectory


@dataclass
class BrakeActuator:
    """Deceleration that slews toward its target at a bounded jerk."""

    jerk_limit: float
    current_decel: float = 0.0
    target_decel: float = 0.0

    def step(self, dt: float) -> float:
        delta = self.target_decel - self.current_decel
        limit = self.jerk_limit * dt
        if abs(delta) <= limit:
            self.current_decel = self.target_decel
        else:
            self.current_decel += math.copysign(limit, delta)
        return self.current_decel


@dataclass
class SimulationResult:
    scenario_id: str
    model_name: str
    brake_onset_time: float | None
    collided: bool
    collision_time: float | None
    min_gap: float
    ego_trace: Trajectory
    human_onset_time: float | None = None
    detection_time: float | None = None
    end_reason: str = "data_end"


def detect_human_onset(scenario: Scenario, threshold: float = HUMAN_ONSET_THRESHOLD) -> float:
    """Time of the first ego sample whose acceleration is at or below ``threshold``."""
    accel = scenario.ego_traj.accel
    for i, a in enumerate(accel):
        if a <= threshold:
            if i == 0:
                raise AlreadyDecelerating(
                    f"{scenario.id}: ego already at {a} m/s^2 on the first sample")
            return scenario.ego_traj.t[i]
    raise NoOnset(f"{scenario.id}: ego deceleration never reaches {threshold} m/s^2")


def neutralize(scenario: Scenario, onset: float) -> ModifiedScenario:
    """Hold ego speed, lateral position and heading constant from ``onset`` on."""
    ego = scenario.ego_traj
    s0 = ego.interpolate(onset)
    v0 = s0.speed
    samples = [s for s in ego if s.t < onset]
    samples.append(TrajectorySample(onset, s0.x, s0.y, v0, 0.0, s0.heading))
    for s in ego:
        if s.t > onset:
            samples.append(TrajectorySample(s.t, s0.x + v0 * (s.t - onset), s0.y, v0, 0.0,
                                            s0.heading))
    return ModifiedScenario(scenario, onset, Trajectory(samples))


def make_driver(model, ccdm_params: CcdmParams | None = None,
                fsm_params: FsmParams | None = None):
    if not isinstance(model, str):
        return model
    if model == "ccdm":
        return CcdmDriver(ccdm_params)
    if model == "fsm":
        return FsmDriver(fsm_params)
    if model == "none":
        return NoReaction()
    raise ValueError(f"unknown model {model!r}; expected one of {MODEL_NAMES}")


def _clearance(ego, ego_geom, pov, pov_geom, best: float = math.inf) -> float:
    """Gap used for min_gap; may return any value >= ``best`` once it cannot beat it."""
    if laterally_overlapping(ego, ego_geom, pov, pov_geom):
        return max(longitudinal_gap(ego, ego_geom, pov, pov_geom),
                   longitudinal_gap(pov, pov_geom, ego, ego_geom))
    # circumscribed circles bound the footprint distance from below
    lower = (math.hypot(pov.x - ego.x, pov.y - ego.y)
             - math.hypot(ego_geom.half_length, ego_geom.half_width)
             - math.hypot(pov_geom.half_length, pov_geom.half_width))
    if lower >= best:
        return lower
    return box_clearance(OrientedBox.of(ego, ego_geom), OrientedBox.of(pov, pov_geom))


def simulate(mod: ModifiedScenario, model="none", dt: float = DEFAULT_DT,
             ccdm_params: CcdmParams | None = None,
             fsm_params: FsmParams | None = None) -> SimulationResult:
    """Replay ``mod`` with ``model`` ("ccdm", "fsm", "none" or a driver object)."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    driver = make_driver(model, ccdm_params, fsm_params)
    driver.reset()
    sc = mod.base
    ego_traj, pov_traj = mod.modified_ego_traj, sc.pov_traj
    ego_geom, pov_geom, lane = sc.ego_geom, sc.pov_geom, sc.lane
    t0 = max(ego_traj.start, pov_traj.start)
    t_end = min(ego_traj.end, pov_traj.end)
    n_steps = int(math.floor((t_end - t0) / dt + 1e-9))

    trace: list[TrajectorySample] = []
    onset = collision_time = detection = None
    actuator: BrakeActuator | None = None
    min_gap = math.inf
    end_reason = "data_end"
    ego = None
    decel = 0.0

    for k in range(n_steps + 1):
        t = min(t0 + k * dt, t_end)
        if actuator is None:
            ego = ego_traj.interpolate(t)
        else:
            prev_decel = decel
            decel = actuator.step(dt)
            speed = max(0.0, ego.speed - 0.5 * (prev_decel + decel) * dt)
            x = ego.x + 0.5 * (ego.speed + speed) * dt
            ref = ego_traj.interpolate(t)
            ego = TrajectorySample(t, x, ref.y, speed, -decel, ref.heading)
        pov = pov_traj.interpolate(t)
        trace.append(ego)

        min_gap = min(min_gap, _clearance(ego, ego_geom, pov, pov_geom, min_gap))
        if boxes_overlap(OrientedBox.of(ego, ego_geom), OrientedBox.of(pov, pov_geom)):
            collision_time = t
            end_reason = "collision"
            break
        if actuator is not None and ego.speed <= 0.0:
            end_reason = "standstill"
            break

        decision: DriverDecision = driver.decide(t, ego, ego_geom, pov_traj, pov_geom, lane)
        if decision.detection_time is not None:
            detection = decision.detection_time
        if actuator is None and decision.decel > 0.0:
            onset = t
            actuator = BrakeActuator(driver.brake_jerk)
        if actuator is not None:
            actuator.target_decel = decision.decel

    collided = collision_time is not None
    if collided:
        # penetration depth at the first overlapping step depends on dt only
        min_gap = 0.0
    return SimulationResult(sc.id, getattr(driver, "name", str(model)), onset, collided,
                            collision_time, min_gap, Trajectory(trace),
                            mod.human_onset_time, detection, end_reason)


# -- batch -----------------------------------------------------------------

@dataclass(frozen=True)
class Exclusion:
    scenario_id: str
    reason: str
    detail: str = ""


@dataclass
class BatchResult:
    results: list[SimulationResult] = field(default_factory=list)
    excluded: list[Exclusion] = field(default_factory=list)

    def get(self, scenario_id: str, model_name: str) -> SimulationResult:
        for r in self.results:
            if r.scenario_id == scenario_id and r.model_name == model_name:
                return r
        raise KeyError((scenario_id, model_name))


def _run_one(args):
    scenario, models, dt, ccdm_params, fsm_params, threshold = args
    try:
        onset = detect_human_onset(scenario, threshold)
    except ExcludedEvent as exc:
        return [], [Exclusion(scenario.id, exc.reason, str(exc))]
    mod = neutralize(scenario, onset)
    out = [simulate(mod, m, dt, ccdm_params, fsm_params) for m in models]
    return out, []


def run_batch(scenarios, models=MODEL_NAMES, dt: float = DEFAULT_DT,
              ccdm_params: CcdmParams | None = None, fsm_params: FsmParams | None = None,
              workers: int = 1,
              onset_threshold: float = HUMAN_ONSET_THRESHOLD) -> BatchResult:
    """Simulate every (scenario, model) pair.

    Scenarios without a usable human onset are reported in ``excluded``
    instead of aborting the batch. Output order is (scenario id, model name)
    whatever the number of workers.
    """
    models = list(models)
    if not models:
        raise ValueError("at least one model is required")
    for m in models:
        make_driver(m)
    jobs = [(s, models, dt, ccdm_params, fsm_params, onset_threshold) for s in scenarios]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_one, jobs))
    else:
        parts = [_run_one(j) for j in jobs]
    batch = BatchResult()
    for res, exc in parts:
        batch.results.extend(res)
        batch.excluded.extend(exc)
    batch.results.sort(key=lambda r: (r.scenario_id, r.model_name))
    batch.excluded.sort(key=lambda e: e.scenario_id)
    return batch
