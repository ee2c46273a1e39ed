"""Camera geometry: targets, orbits, flights, Bezier transitions, framing."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest

from modeltour.camera import (
    CameraTarget,
    OrbitParams,
    decasteljau,
    direct_fly_keyframes,
    curved_transition_keyframes,
    bezier_control_point,
    focus_target,
    frame_times,
    in_view_cone,
    orbit_keyframes,
    overview_viewpoint,
    quadratic_bezier,
)
from modeltour.errors import ValidationError
from modeltour.model import Instance


class TestFocusTarget:
    def test_closest_instance_wins(self, hiv_model):
        rep, target = focus_target("plasma", hiv_model, (-150.0, -40.0, 0.0))
        assert rep.id == "plasma-1"
        assert target.center == rep.center
        assert target.radius == rep.radius

    def test_tie_breaks_lexicographically(self, hiv_model):
        # hiv-1 at origin, hiv-2 at (200,40,-80); pick a camera equidistant.
        mid = np.array([100.0, 20.0, -40.0])
        rep, _ = focus_target("hiv", hiv_model, mid)
        assert rep.id == "hiv-1"

    def test_composite_aggregates_descendants(self, hiv_model):
        camera = (0.0, 0.0, 500.0)
        rep, target = focus_target("root", hiv_model, camera)
        # No direct root instances: representatives of hiv and plasma aggregate.
        assert rep.type_id in {"hiv", "plasma"}
        assert target.radius > max(i.radius for i in hiv_model.instances)

    def test_no_instances_rejected(self):
        import json

        from modeltour.model import parse_model

        model = parse_model(json.dumps({
            "types": [{"id": "a", "name": "A"}, {"id": "b", "name": "B", "parent": "a"}],
            "instances": [],
        }))
        with pytest.raises(ValidationError):
            focus_target("b", model, (0, 0, 0))


class TestOrbit:
    def test_quarter_turn_ccw(self):
        target = CameraTarget(center=(0.0, 0.0, 0.0), radius=10.0 / 3.0)
        params = OrbitParams(distance_factor=3.0, angular_speed=12.0, direction="ccw")
        # 90 degrees at 12 deg/s happens at t = 7.5 s.
        frames = orbit_keyframes(target, params, duration=7.5, start_pos=(10.0, 0.0, 0.0), fps=30.0)
        last = frames[-1]
        assert last.time == 7.5
        np.testing.assert_allclose(last.position, [0.0, 0.0, -10.0], atol=1e-9)

    def test_quarter_turn_cw(self):
        target = CameraTarget(center=(0.0, 0.0, 0.0), radius=10.0 / 3.0)
        params = OrbitParams(distance_factor=3.0, angular_speed=12.0, direction="cw")
        frames = orbit_keyframes(target, params, duration=7.5, start_pos=(10.0, 0.0, 0.0), fps=30.0)
        np.testing.assert_allclose(frames[-1].position, [0.0, 0.0, 10.0], atol=1e-9)

    def test_first_frame_is_projected_start(self):
        target = CameraTarget(center=(1.0, 2.0, 3.0), radius=2.0)
        params = OrbitParams(distance_factor=3.0)
        frames = orbit_keyframes(target, params, 2.0, start_pos=(13.0, 2.0, 3.0), fps=10.0)
        np.testing.assert_allclose(frames[0].position, [7.0, 2.0, 3.0], atol=1e-12)

    def test_constant_radius_and_lookat_randomized(self):
        rng = random.Random(7)
        for _ in range(25):
            center = np.array([rng.uniform(-50, 50) for _ in range(3)])
            radius = rng.uniform(0.1, 30.0)
            factor = rng.uniform(1.5, 5.0)
            start = center + np.array([rng.uniform(-1, 1) for _ in range(3)]) * 100 + 1e-3
            params = OrbitParams(distance_factor=factor,
                                 angular_speed=rng.uniform(1, 90),
                                 direction=rng.choice(("cw", "ccw")))
            frames = orbit_keyframes(
                CameraTarget(tuple(center), radius), params, rng.uniform(0.5, 20), start, 30.0
            )
            orbit_radius = factor * radius
            for kf in frames:
                distance = np.linalg.norm(kf.position - center)
                assert abs(distance - orbit_radius) < 1e-9 * orbit_radius
                np.testing.assert_array_equal(kf.look_at, center)

    def test_start_at_center_rejected(self):
        target = CameraTarget(center=(0.0, 0.0, 0.0), radius=1.0)
        with pytest.raises(ValidationError):
            orbit_keyframes(target, OrbitParams(), 1.0, start_pos=(0.0, 0.0, 0.0))


class TestDirectFly:
    def _poses(self):
        # Stand-off poses (0,0,10) and (0,0,4): view -Z, radii 1, factor 3.
        from_target = CameraTarget(center=(0.0, 0.0, 7.0), radius=1.0)
        to_target = CameraTarget(center=(0.0, 0.0, 1.0), radius=1.0)
        return from_target, to_target

    def test_midpoint_of_lerp(self):
        from_target, to_target = self._poses()
        frames = direct_fly_keyframes(from_target, to_target, duration=2.0, fps=1.0,
                                      view_dir=(0.0, 0.0, -1.0))
        mid = [kf for kf in frames if kf.time == 1.0][0]
        np.testing.assert_allclose(mid.position, [0.0, 0.0, 7.0], atol=1e-12)

    def test_endpoints(self):
        from_target, to_target = self._poses()
        frames = direct_fly_keyframes(from_target, to_target, 2.0, 10.0,
                                      view_dir=(0.0, 0.0, -1.0))
        np.testing.assert_allclose(frames[0].position, [0.0, 0.0, 10.0], atol=1e-12)
        np.testing.assert_allclose(frames[-1].position, [0.0, 0.0, 4.0], atol=1e-12)

    def test_collinear_and_fixed_orientation(self):
        rng = random.Random(13)
        for _ in range(20):
            from_target = CameraTarget(tuple(rng.uniform(-20, 20) for _ in range(3)),
                                       rng.uniform(0.5, 5))
            to_target = CameraTarget(tuple(rng.uniform(-20, 20) for _ in range(3)),
                                     rng.uniform(0.5, 5))
            frames = direct_fly_keyframes(from_target, to_target, rng.uniform(1, 8), 30.0)
            p0 = frames[0].position
            p1 = frames[-1].position
            segment = p1 - p0
            length = np.linalg.norm(segment)
            directions = {tuple(np.round(kf.view_direction(), 12)) for kf in frames}
            assert len(directions) == 1
            if length < 1e-12:
                continue
            axis = segment / length
            for kf in frames:
                offset = kf.position - p0
                deviation = np.linalg.norm(offset - np.dot(offset, axis) * axis)
                assert deviation < 1e-9


class TestBezier:
    def test_midpoint_by_hand(self):
        value = quadratic_bezier((0, 0, 0), (2, 4, 0), (4, 0, 0), 0.5)
        np.testing.assert_array_equal(value, [2.0, 2.0, 0.0])

    def test_endpoints(self):
        p0, p1, p2 = (0, 0, 0), (2, 4, 0), (4, 0, 0)
        np.testing.assert_array_equal(quadratic_bezier(p0, p1, p2, 0.0), p0)
        np.testing.assert_array_equal(quadratic_bezier(p0, p1, p2, 1.0), p2)

    def test_decasteljau_equivalence(self):
        rng = random.Random(5)
        for _ in range(50):
            pts = [tuple(rng.uniform(-10, 10) for _ in range(3)) for _ in range(3)]
            s = rng.random()
            closed = quadratic_bezier(*pts, s)
            subdivided = decasteljau(list(pts), s)
            assert np.max(np.abs(closed - subdivided)) < 1e-12

    def test_control_point_bows_outward(self):
        p0, p2 = (0.0, 0.0, 10.0), (10.0, 0.0, 0.0)
        p1 = bezier_control_point(p0, p2, (0.0, 0.0, 7.0), (7.0, 0.0, 0.0))
        midpoint = (np.asarray(p0) + np.asarray(p2)) / 2
        assert np.linalg.norm(p1 - midpoint) > 0

    def test_curved_transition_endpoints_and_gaze(self):
        from_target = CameraTarget(center=(0.0, 0.0, 0.0), radius=2.0)
        to_target = CameraTarget(center=(30.0, 0.0, 0.0), radius=2.0)
        frames = curved_transition_keyframes(from_target, to_target, 3.0, 30.0,
                                             start_pos=(0.0, 0.0, 6.0))
        np.testing.assert_allclose(frames[0].position, [0.0, 0.0, 6.0], atol=1e-12)
        np.testing.assert_allclose(frames[0].look_at, [0.0, 0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(frames[-1].look_at, [30.0, 0.0, 0.0], atol=1e-12)
        end_distance = np.linalg.norm(frames[-1].position - np.array([30.0, 0.0, 0.0]))
        assert abs(end_distance - 6.0) < 1e-9


class TestOverviewViewpoint:
    def test_distance_formula(self):
        rep = Instance(id="a", type_id="t", center=(0.0, 0.0, 0.0), radius=2.0)
        view = overview_viewpoint([rep], fov_degrees=60.0)
        assert abs(np.linalg.norm(view.position - np.zeros(3)) - 4.4) < 1e-12
        np.testing.assert_array_equal(view.look_at, [0.0, 0.0, 0.0])

    def test_all_representatives_in_cone(self):
        rng = random.Random(21)
        for _ in range(20):
            reps = [
                Instance(id=f"r{i}", type_id="t",
                         center=tuple(rng.uniform(-30, 30) for _ in range(3)),
                         radius=rng.uniform(0.5, 6))
                for i in range(rng.randint(1, 12))
            ]
            fov = rng.uniform(30, 90)
            view = overview_viewpoint(reps, fov_degrees=fov,
                                      toward=tuple(rng.uniform(-1, 1) + 1e-3 for _ in range(3)))
            for rep in reps:
                assert in_view_cone(view, rep.center, fov)

    def test_symmetric_pair_centers_lookat(self):
        reps = [
            Instance(id="a", type_id="t", center=(-5.0, 0.0, 0.0), radius=1.0),
            Instance(id="b", type_id="t", center=(5.0, 0.0, 0.0), radius=1.0),
        ]
        view = overview_viewpoint(reps, fov_degrees=60.0)
        np.testing.assert_allclose(view.look_at, [0.0, 0.0, 0.0], atol=1e-12)

    def test_empty_list_rejected(self):
        with pytest.raises(ValidationError):
            overview_viewpoint([])


class TestFrameTimes:
    def test_sorted_start_end(self):
        rng = random.Random(3)
        for _ in range(200):
            duration = rng.uniform(0.05, 30.0)
            fps = rng.choice((10.0, 24.0, 30.0, 60.0))
            times = frame_times(duration, fps)
            assert times[0] == 0.0
            assert times[-1] == duration
            assert all(a < b for a, b in zip(times, times[1:]))

    def test_exact_frame_count(self):
        assert frame_times(1.0, 10.0) == [i / 10.0 for i in range(10)] + [1.0]

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            frame_times(0.0, 30.0)
        with pytest.raises(ValueError):
            frame_times(1.0, 0.0)
