"""Road-frame geometry and kinematics shared by the driver models and the engine.

Positions are vehicle geometric centres in a straight-road frame: ``x`` along
the road (forward positive), ``y`` lateral (left positive). Headings are
relative to the road axis.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class OutOfRange(ValueError):
    """Requested time lies outside a trajectory's span."""


@dataclass(frozen=True)
class VehicleGeometry:
    length: float = 4.5
    width: float = 1.8

    def __post_init__(self):
        if not (self.length > 0 and self.width > 0):
            raise ValueError(f"vehicle length and width must be positive, got {self}")

    @property
    def half_length(self) -> float:
        return 0.5 * self.length

    @property
    def half_width(self) -> float:
        return 0.5 * self.width


@dataclass(frozen=True)
class LaneLayout:
    """Ego lane and the marking shared with the POV's original lane."""

    lane_width: float
    pov_side: str  # "left" or "right" of the ego lane
    ego_lane_center_y: float
    marking_y: float

    def __post_init__(self):
        if self.lane_width <= 0:
            raise ValueError("lane_width must be positive")
        if self.pov_side not in ("left", "right"):
            raise ValueError(f"pov_side must be 'left' or 'right', got {self.pov_side!r}")
        expected = self.ego_lane_center_y + self.toward_pov * 0.5 * self.lane_width
        if abs(self.marking_y - expected) > 1e-9:
            raise ValueError(
                f"marking_y={self.marking_y} inconsistent with lane centre "
                f"{self.ego_lane_center_y}, width {self.lane_width} and side {self.pov_side}"
            )

    @classmethod
    def from_center(cls, lane_width: float, pov_side: str = "left",
                    ego_lane_center_y: float = 0.0) -> "LaneLayout":
        sign = 1.0 if pov_side == "left" else -1.0
        return cls(lane_width, pov_side, ego_lane_center_y,
                   ego_lane_center_y + sign * 0.5 * lane_width)

    @property
    def toward_pov(self) -> float:
        """+1 if the POV lane lies at larger y than the ego lane, else -1."""
        return 1.0 if self.pov_side == "left" else -1.0

    @property
    def toward_ego(self) -> float:
        return -self.toward_pov

    @property
    def pov_lane_center_y(self) -> float:
        return self.ego_lane_center_y + self.toward_pov * self.lane_width


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    x: float
    y: float
    speed: float
    accel: float = 0.0
    heading: float = 0.0


_FIELDS = ("t", "x", "y", "speed", "accel", "heading")


class Trajectory(Sequence[TrajectorySample]):
    """Immutable, time-ordered sequence of samples with interpolation.

    Columns are kept as tuples of floats; lookups use :mod:`bisect`, which is
    much faster than numpy for the scalar queries issued inside the
    simulation loop.
    """

    __slots__ = ("t", "x", "y", "speed", "accel", "heading")

    def __init__(self, samples: Iterable[TrajectorySample]):
        samples = list(samples)
        for name in _FIELDS:
            object.__setattr__(self, name, tuple(float(getattr(s, name)) for s in samples))

    def __setattr__(self, name, value):
        raise AttributeError("Trajectory is immutable")

    def __reduce__(self):
        return (Trajectory.from_columns, tuple(getattr(self, f) for f in _FIELDS))

    @classmethod
    def from_columns(cls, t, x, y, speed, accel=None, heading=None) -> "Trajectory":
        n = len(t)
        accel = [0.0] * n if accel is None else accel
        heading = [0.0] * n if heading is None else heading
        return cls(TrajectorySample(*row) for row in zip(t, x, y, speed, accel, heading))

    def __len__(self) -> int:
        return len(self.t)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Trajectory(self[j] for j in range(*i.indices(len(self))))
        return TrajectorySample(self.t[i], self.x[i], self.y[i], self.speed[i],
                                self.accel[i], self.heading[i])

    def __iter__(self) -> Iterator[TrajectorySample]:
        return (self[i] for i in range(len(self)))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return all(getattr(self, f) == getattr(other, f) for f in _FIELDS)

    def __repr__(self) -> str:
        if not self.t:
            return "Trajectory([])"
        return f"Trajectory(n={len(self)}, t=[{self.t[0]:g}, {self.t[-1]:g}])"

    @property
    def start(self) -> float:
        return self.t[0]

    @property
    def end(self) -> float:
        return self.t[-1]

    def interpolate(self, t: float) -> TrajectorySample:
        return interpolate(self, t)


def _wrap(angle: float) -> float:
    return (angle + math.pi) % (2.0 * math.pi) - math.pi


def interpolate(traj: Trajectory, t: float) -> TrajectorySample:
    """Linear interpolation of a trajectory at time ``t``.

    Heading follows the shortest angular arc. Sample times return the stored
    sample unchanged.
    """
    ts = traj.t
    if not ts or t < ts[0] or t > ts[-1]:
        span = f"[{ts[0]}, {ts[-1]}]" if ts else "[]"
        raise OutOfRange(f"t={t} outside trajectory span {span}")
    i = bisect_left(ts, t)
    if ts[i] == t:
        return traj[i]
    t0, t1 = ts[i - 1], ts[i]
    w = (t - t0) / (t1 - t0)

    def lerp(col):
        a = col[i - 1]
        return a + w * (col[i] - a)

    h0 = traj.heading[i - 1]
    heading = h0 + w * _wrap(traj.heading[i] - h0)
    return TrajectorySample(t, lerp(traj.x), lerp(traj.y), lerp(traj.speed),
                            lerp(traj.accel), heading)


def longitudinal_gap(ego: TrajectorySample, ego_geom: VehicleGeometry,
                     pov: TrajectorySample, pov_geom: VehicleGeometry) -> float:
    """Bumper-to-bumper distance along the road; negative while overlapping."""
    return (pov.x - pov_geom.half_length) - (ego.x + ego_geom.half_length)


def ttc(ego: TrajectorySample, ego_geom: VehicleGeometry,
        pov: TrajectorySample, pov_geom: VehicleGeometry) -> float | None:
    """Longitudinal time-to-collision, or None when not closing.

    Uses the signed bumper gap, so the value is negative while the vehicles
    overlap longitudinally.
    """
    closing = ego.speed - pov.speed
    if closing <= 0.0:
        return None
    return longitudinal_gap(ego, ego_geom, pov, pov_geom) / closing


def corners(cx: float, cy: float, half_length: float, half_width: float,
            heading: float) -> list[tuple[float, float]]:
    """Rectangle corners in counter-clockwise order."""
    c, s = math.cos(heading), math.sin(heading)
    out = []
    for dl, dw in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
        lx, ly = dl * half_length, dw * half_width
        out.append((cx + lx * c - ly * s, cy + lx * s + ly * c))
    return out


def ldbo_distance(pov: TrajectorySample, pov_geom: VehicleGeometry, lane: LaneLayout) -> float:
    """Intrusion of the POV's nearest corner past the shared lane marking.

    Positive values point into the ego lane; negative while the POV is still
    entirely inside its original lane.
    """
    pts = corners(pov.x, pov.y, pov_geom.half_length, pov_geom.half_width, pov.heading)
    sign = lane.toward_ego
    return max(sign * (py - lane.marking_y) for _, py in pts)


@dataclass(frozen=True)
class OrientedBox:
    center_x: float
    center_y: float
    half_length: float
    half_width: float
    heading: float = 0.0

    def __post_init__(self):
        if not (self.half_length > 0 and self.half_width > 0):
            raise ValueError("box half extents must be positive")

    @classmethod
    def of(cls, sample: TrajectorySample, geom: VehicleGeometry) -> "OrientedBox":
        return cls(sample.x, sample.y, geom.half_length, geom.half_width, sample.heading)

    def corners(self) -> list[tuple[float, float]]:
        return corners(self.center_x, self.center_y, self.half_length, self.half_width,
                       self.heading)

    def axes(self) -> tuple[tuple[float, float], tuple[float, float]]:
        c, s = math.cos(self.heading), math.sin(self.heading)
        return (c, s), (-s, c)

    def contains(self, px: float, py: float) -> bool:
        (ux, uy), (vx, vy) = self.axes()
        dx, dy = px - self.center_x, py - self.center_y
        return (abs(dx * ux + dy * uy) <= self.half_length
                and abs(dx * vx + dy * vy) <= self.half_width)


def _project(pts, ax, ay):
    dots = [px * ax + py * ay for px, py in pts]
    return min(dots), max(dots)


def boxes_overlap(a: OrientedBox, b: OrientedBox) -> bool:
    """Separating-axis test for two oriented rectangles; touching counts."""
    pa, pb = a.corners(), b.corners()
    for ax, ay in (*a.axes(), *b.axes()):
        amin, amax = _project(pa, ax, ay)
        bmin, bmax = _project(pb, ax, ay)
        if amax < bmin or bmax < amin:
            return False
    return True


def _vertex_edge_distance_sq(pts, poly) -> float:
    """Smallest squared distance from any point of ``pts`` to an edge of ``poly``."""
    best = math.inf
    for k in range(4):
        ax, ay = poly[k]
        bx, by = poly[(k + 1) % 4]
        dx, dy = bx - ax, by - ay
        L2 = dx * dx + dy * dy
        for px, py in pts:
            rx, ry = px - ax, py - ay
            u = (rx * dx + ry * dy) / L2
            if u < 0.0:
                u = 0.0
            elif u > 1.0:
                u = 1.0
            ex, ey = rx - u * dx, ry - u * dy
            d2 = ex * ex + ey * ey
            if d2 < best:
                best = d2
    return best


def box_clearance(a: OrientedBox, b: OrientedBox) -> float:
    """Euclidean distance between two rectangles; 0 when they overlap."""
    if boxes_overlap(a, b):
        return 0.0
    pa, pb = a.corners(), b.corners()
    return math.sqrt(min(_vertex_edge_distance_sq(pa, pb), _vertex_edge_distance_sq(pb, pa)))


def lateral_half_extent(geom: VehicleGeometry, heading: float) -> float:
    """Half of the footprint's extent along the road-lateral axis."""
    return abs(geom.half_length * math.sin(heading)) + abs(geom.half_width * math.cos(heading))


def laterally_overlapping(ego: TrajectorySample, ego_geom: VehicleGeometry,
                          pov: TrajectorySample, pov_geom: VehicleGeometry) -> bool:
    reach = lateral_half_extent(ego_geom, ego.heading) + lateral_half_extent(pov_geom, pov.heading)
    return abs(pov.y - ego.y) <= reach
