import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refdriver.kinematics import (LaneLayout, OrientedBox, OutOfRange, Trajectory,
                                  TrajectorySample, VehicleGeometry, box_clearance,
                                  boxes_overlap, interpolate, ldbo_distance, longitudinal_gap,
                                  ttc)

S = TrajectorySample
G4 = VehicleGeometry(4.0, 1.8)


def two_point(h0=0.0, h1=0.0):
    return Trajectory([S(0.0, 0.0, 0.0, 10.0, 0.0, h0), S(1.0, 2.0, 1.0, 12.0, -1.0, h1)])


class TestInterpolate:
    def test_sample_time_returns_sample(self):
        tr = two_point()
        assert interpolate(tr, 1.0) == tr[1]
        assert interpolate(tr, 0.0) == tr[0]

    def test_midpoint_linear(self):
        s = interpolate(two_point(), 0.5)
        assert (s.x, s.y, s.speed, s.accel) == (1.0, 0.5, 11.0, -0.5)

    def test_heading_symmetric(self):
        assert interpolate(two_point(0.1, -0.1), 0.5).heading == pytest.approx(0.0, abs=1e-15)

    def test_heading_shortest_arc(self):
        s = interpolate(two_point(math.pi - 0.1, -math.pi + 0.1), 0.5)
        assert abs(abs(s.heading) - math.pi) < 1e-12

    @pytest.mark.parametrize("t", [-0.01, 1.0001])
    def test_out_of_range(self, t):
        with pytest.raises(OutOfRange):
            interpolate(two_point(), t)

    @given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=20))
    def test_sample_times_bit_exact(self, xs):
        tr = Trajectory(S(0.1 * i, x, -x, abs(x), x / 7, x / 1e3) for i, x in enumerate(xs))
        for s in tr:
            assert interpolate(tr, s.t) == s


class TestGapAndTtc:
    def test_gap_examples(self):
        assert longitudinal_gap(S(0, 0, 0, 0), G4, S(0, 10, 0, 0), G4) == 6.0
        assert longitudinal_gap(S(0, 0, 0, 0), G4, S(0, 3, 0, 0), G4) == -1.0
        assert longitudinal_gap(S(0, 5, 0, 0), G4, S(0, 5, 0, 0), G4) == -4.0

    def test_ttc_examples(self):
        # 20 m bumper gap
        assert ttc(S(0, 0, 0, 20), G4, S(0, 24, 0, 10), G4) == 2.0
        assert ttc(S(0, 0, 0, 10), G4, S(0, 24, 0, 12), G4) is None
        assert ttc(S(0, 0, 0, 20), G4, S(0, 2, 0, 10), G4) == pytest.approx(-0.2)

    @given(st.floats(-50, 50), st.floats(0, 40), st.floats(0, 40))
    def test_sign_matches_gap(self, pov_x, v_ego, v_pov):
        ego, pov = S(0, 0, 0, v_ego), S(0, pov_x, 3, v_pov)
        value = ttc(ego, G4, pov, G4)
        if v_ego - v_pov <= 0:
            assert value is None
        else:
            gap = longitudinal_gap(ego, G4, pov, G4)
            assert np.sign(value) == np.sign(gap)


def corner_enumeration_ldbo(x, y, heading, length, width, marking_y, toward_ego):
    """Independent oracle: rotate the four corner offsets with a matrix."""
    rot = np.array([[math.cos(heading), -math.sin(heading)],
                    [math.sin(heading), math.cos(heading)]])
    offs = np.array([[sx * length / 2, sy * width / 2] for sx in (-1, 1) for sy in (-1, 1)])
    pts = offs @ rot.T + np.array([x, y])
    return float(np.max(toward_ego * (pts[:, 1] - marking_y)))


class TestLdbo:
    lane = LaneLayout.from_center(3.5, "left")  # marking at y = 1.75, POV lane above

    def test_inside_own_lane_negative(self):
        pov = S(0, 10, 1.75 + 1.2, 15)
        assert ldbo_distance(pov, VehicleGeometry(4.5, 1.8), self.lane) == pytest.approx(-0.3)

    def test_corner_on_marking(self):
        pov = S(0, 10, 1.75 + 0.9, 15)
        assert ldbo_distance(pov, VehicleGeometry(4.5, 1.8), self.lane) == pytest.approx(0.0,
                                                                                        abs=1e-15)

    def test_rotated_matches_oracle(self):
        pov = S(0, 10, 1.75 + 1.2, 15, 0.0, -0.1)
        expected = corner_enumeration_ldbo(10, 2.95, -0.1, 4.5, 1.8, 1.75, -1.0)
        assert ldbo_distance(pov, VehicleGeometry(4.5, 1.8), self.lane) == pytest.approx(
            expected, abs=1e-12)
        # rotating toward the ego lane pushes the front corner across first
        assert expected > -0.3

    def test_right_side(self):
        lane = LaneLayout.from_center(3.5, "right")
        pov = S(0, 10, -1.75 - 1.2, 15)
        assert ldbo_distance(pov, VehicleGeometry(4.5, 1.8), lane) == pytest.approx(-0.3)

    @given(st.floats(-6, 6), st.sampled_from(["left", "right"]), st.floats(1.0, 3.0))
    def test_zero_heading_closed_form(self, y, side, width):
        lane = LaneLayout.from_center(3.5, side)
        g = VehicleGeometry(4.5, width)
        pov = S(0, 0, y, 10)
        if side == "left":
            expected = lane.marking_y - (y - width / 2)
        else:
            expected = (y + width / 2) - lane.marking_y
        assert ldbo_distance(pov, g, lane) == pytest.approx(expected, abs=1e-12)

    @given(st.floats(-4, 4), st.floats(-0.5, 0.5))
    def test_random_matches_oracle(self, y, heading):
        pov = S(0, 3.0, y, 10, 0, heading)
        expected = corner_enumeration_ldbo(3.0, y, heading, 4.5, 1.8, 1.75, -1.0)
        assert ldbo_distance(pov, VehicleGeometry(4.5, 1.8), self.lane) == pytest.approx(
            expected, abs=1e-12)


def test_lane_layout_rejects_inconsistent_marking():
    with pytest.raises(ValueError):
        LaneLayout(3.5, "left", 0.0, -1.75)
    with pytest.raises(ValueError):
        VehicleGeometry(0.0, 1.8)


# -- collision -----------------------------------------------------------------

def sample_overlap(a: OrientedBox, b: OrientedBox, n: int = 100):
    """Point-sampling oracle: a grid (boundary included) over each box,
    tested for containment in the other."""
    hits = []
    for p, q in ((a, b), (b, a)):
        u = np.linspace(-p.half_length, p.half_length, n)
        v = np.linspace(-p.half_width, p.half_width, n)
        U, V = np.meshgrid(u, v)
        c, s = math.cos(p.heading), math.sin(p.heading)
        X = p.center_x + U * c - V * s
        Y = p.center_y + U * s + V * c
        cq, sq = math.cos(q.heading), math.sin(q.heading)
        dx, dy = X - q.center_x, Y - q.center_y
        lu = np.abs(dx * cq + dy * sq) - q.half_length
        lv = np.abs(-dx * sq + dy * cq) - q.half_width
        margin = np.maximum(lu, lv)  # <= 0 inside q
        hits.append(margin.min())
    return min(hits)


def vertex_depth(a: OrientedBox, b: OrientedBox) -> float:
    """Smallest |signed containment margin| of any vertex against the other box."""
    best = math.inf
    for p, q in ((a, b), (b, a)):
        cq, sq = math.cos(q.heading), math.sin(q.heading)
        for x, y in p.corners():
            dx, dy = x - q.center_x, y - q.center_y
            m = max(abs(dx * cq + dy * sq) - q.half_length,
                    abs(-dx * sq + dy * cq) - q.half_width)
            best = min(best, abs(m))
    return best


def random_pairs(rng, n):
    pairs = []
    for _ in range(n):
        a = OrientedBox(0.0, 0.0, rng.uniform(0.5, 3.0), rng.uniform(0.3, 1.5),
                        rng.uniform(-math.pi, math.pi))
        b = OrientedBox(rng.uniform(-6, 6), rng.uniform(-4, 4), rng.uniform(0.5, 3.0),
                        rng.uniform(0.3, 1.5), rng.uniform(-math.pi, math.pi))
        pairs.append((a, b))
    return pairs


def near_touching_pairs(rng, n):
    """Pairs with a vertex of b placed just inside or outside an edge of a."""
    pairs = []
    for _ in range(n):
        a = OrientedBox(0.0, 0.0, 2.25, 0.9, rng.uniform(-0.3, 0.3))
        hb = rng.uniform(-0.6, 0.6)
        b = OrientedBox(0.0, 0.0, 2.25, 0.9, hb)
        # b's lowest corner relative to its centre
        low = min(b.corners(), key=lambda p: p[1])
        # a's top edge height at that abscissa
        ca, sa = math.cos(a.heading), math.sin(a.heading)
        x_target = rng.uniform(-1.0, 1.0)
        y_edge = (0.9 + x_target * sa) / ca
        offset = rng.choice([-1, 1]) * rng.uniform(1e-3, 2e-2)
        pairs.append((a, OrientedBox(x_target - low[0], y_edge - low[1] + offset,
                                     2.25, 0.9, hb)))
    return pairs


def disagreements(pairs):
    bad = []
    for a, b in pairs:
        sat = boxes_overlap(a, b)
        oracle = sample_overlap(a, b) <= 0.0
        if sat != oracle and vertex_depth(a, b) > 1e-6:
            bad.append((a, b, sat, oracle))
    return bad


class TestBoxesOverlap:
    def test_identical(self):
        a = OrientedBox(1, 2, 2.0, 1.0, 0.3)
        assert boxes_overlap(a, a)

    def test_far_apart(self):
        a = OrientedBox(0, 0, 2.0, 1.0, 0.3)
        b = OrientedBox(10, 0, 2.0, 1.0, 1.0)
        assert not boxes_overlap(a, b)

    def test_edge_contact_counts(self):
        a = OrientedBox(0, 0, 2.0, 1.0)
        assert boxes_overlap(a, OrientedBox(4.0, 0, 2.0, 1.0))
        assert not boxes_overlap(a, OrientedBox(4.0 + 1e-9, 0, 2.0, 1.0))

    def test_rotated_near_touching(self):
        a = OrientedBox(0, 0, 2.25, 0.9, 0.0)
        # diamond whose lowest vertex sits 1 mm above / below a's top edge
        for offset, expected in ((1e-3, False), (-1e-3, True)):
            b = OrientedBox(0.0, 0.9 + math.sqrt(2.0) + offset, 1.0, 1.0, math.pi / 4)
            assert boxes_overlap(a, b) is expected
            assert bool(sample_overlap(a, b) <= 0.0) is expected

    @given(st.floats(-8, 8), st.floats(-8, 8), st.floats(-4, 4), st.floats(-4, 4))
    @settings(max_examples=200)
    def test_symmetric(self, x, y, h1, h2):
        a = OrientedBox(0, 0, 2.25, 0.9, h1)
        b = OrientedBox(x, y, 1.5, 0.7, h2)
        assert boxes_overlap(a, b) == boxes_overlap(b, a)

    def test_sampling_oracle_random(self, rng):
        pairs = random_pairs(rng, 300) + near_touching_pairs(rng, 200)
        assert disagreements(pairs) == []

    def test_clearance(self):
        a = OrientedBox(0, 0, 2.0, 1.0)
        assert box_clearance(a, OrientedBox(7.0, 0, 2.0, 1.0)) == pytest.approx(3.0)
        assert box_clearance(a, OrientedBox(7.0, 6.0, 2.0, 1.0)) == pytest.approx(5.0)
        assert box_clearance(a, OrientedBox(1.0, 0, 2.0, 1.0)) == 0.0


def boundary_points(box: OrientedBox, n: int = 400) -> np.ndarray:
    c = np.array(box.corners() + box.corners()[:1])
    u = np.linspace(0.0, 1.0, n, endpoint=False)[:, None]
    return np.concatenate([c[k] + u * (c[k + 1] - c[k]) for k in range(4)])


def test_clearance_matches_boundary_sampling(rng):
    for a, b in random_pairs(rng, 150):
        if boxes_overlap(a, b):
            assert box_clearance(a, b) == 0.0
            continue
        pa, pb = boundary_points(a), boundary_points(b)
        sampled = np.sqrt(((pa[:, None, :] - pb[None, :, :]) ** 2).sum(axis=2)).min()
        spacing = 2 * max(a.half_length, b.half_length) / 400
        assert sampled - 2 * spacing <= box_clearance(a, b) <= sampled + 1e-12
