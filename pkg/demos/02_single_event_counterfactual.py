"""
Replaying one cut-in without the human braking
==============================================

A synthetic event is generated, the human response is found and removed,
and the same event is replayed with no reaction, the CCDM and the FSM.
"""

from dataclasses import replace

from refdriver import (CutinParams, compute_event_metrics, detect_human_onset, generate,
                       neutralize, simulate)
from refdriver.generator import marking_crossing_time

# %% ego 25 m/s, POV 17 m/s, 25 m ahead, lateral speed 1.5 m/s;
# the human brakes half a second after the POV touches the marking
params = CutinParams(ego_speed=25.0, pov_speed=17.0, initial_gap=25.0, pov_lateral_speed=1.5,
                     seed=1, scenario_id="demo")
params = replace(params, human_brake_time=round(marking_crossing_time(params) + 0.5, 2))
scenario = generate(params)
human = detect_human_onset(scenario)
print(f"human braking starts at {human:.2f} s")

# %% ego speed frozen from the human onset on
mod = neutralize(scenario, human)
after = [s for s in mod.modified_ego_traj if s.t >= human]
print("modified ego speed after onset:", {round(s.speed, 3) for s in after})

# %% worst case first, then the two models
worst = simulate(mod, "none")
print(f"{'model':6} {'onset':>6} {'t_diff':>7} {'LDBO':>7} {'crash':>6} {'min gap':>8}")
for model in ("none", "ccdm", "fsm"):
    res = simulate(mod, model)
    m = compute_event_metrics(human, res, worst, scenario)
    fmt = lambda v, p=2: "-" if v is None else f"{v:+.{p}f}"
    print(f"{model:6} {fmt(res.brake_onset_time):>6} {fmt(m.t_diff):>7} "
          f"{fmt(m.ldbo_model):>7} {str(res.collided):>6} {res.min_gap:8.2f}")

# %% deceleration profile of the CCDM run around its onset
ccdm = simulate(mod, "ccdm")
if ccdm.brake_onset_time is not None:
    t0 = ccdm.brake_onset_time
    for s in ccdm.ego_trace:
        if t0 <= s.t <= t0 + 0.8 and round((s.t - t0) * 100) % 10 == 0:
            print(f"  t = {s.t:5.2f} s  decel = {abs(s.accel):5.3f} m/s^2  speed = {s.speed:6.3f} m/s")
