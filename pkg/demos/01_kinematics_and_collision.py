"""
Road-frame geometry: gaps, TTC, lateral intrusion and footprint overlap
======================================================================
"""

import math

from refdriver import (LaneLayout, OrientedBox, TrajectorySample, VehicleGeometry,
                       boxes_overlap, ldbo_distance, longitudinal_gap, ttc)

# %% two cars in adjacent lanes; the POV lane is on the left (y > 0)
lane = LaneLayout.from_center(3.5, "left")
car = VehicleGeometry(4.5, 1.8)
ego = TrajectorySample(t=0.0, x=0.0, y=0.0, speed=25.0)
pov = TrajectorySample(t=0.0, x=20.0, y=3.2, speed=17.0, heading=-0.05)

print("marking at y =", lane.marking_y)
print("bumper gap   =", longitudinal_gap(ego, car, pov, car), "m")
print("TTC          =", round(ttc(ego, car, pov, car), 3), "s")

# %% LDBO is negative while the POV is still fully in its own lane
for y in (3.5, 2.9, 2.65, 2.2):
    p = TrajectorySample(0.0, 20.0, y, 17.0, heading=-0.05)
    print(f"POV centre y = {y:4.2f}  ->  LDBO = {ldbo_distance(p, car, lane):+.3f} m")

# %% separating-axis overlap; touching already counts as contact
a = OrientedBox(0.0, 0.0, 2.25, 0.9)
for dy in (0.9 + math.sqrt(2) + 1e-3, 0.9 + math.sqrt(2) - 1e-3):
    b = OrientedBox(0.0, dy, 1.0, 1.0, math.pi / 4)
    print(f"diamond tip {dy - 0.9 - math.sqrt(2):+.0e} m off the roof -> overlap:",
          boxes_overlap(a, b))
