import math

import numpy as np
import pytest

from relnav.planner import (
    FovSpec,
    InfeasiblePlanError,
    Neighborhood,
    angular_separation_series,
    schedule_velocities,
    solve_tspn,
)
from relnav.planner.schedule import Trajectory, wrap_angle_abs

FOV = FovSpec(horizontal_fov=math.pi / 2, max_range=50.0)


def tour_through(points, start, rho=1.0):
    nbhs = [Neighborhood(id=i, center=p, radius=0.4)
            for i, p in enumerate(points)]
    return solve_tspn(nbhs, start, rho)


def make_traj(mav, txyhva):
    return Trajectory(mav=mav, samples=np.asarray(txyhva, float))


class TestAngularSeparation:
    def test_direct_difference(self):
        a = make_traj(0, [[0, 5 * math.cos(math.radians(10)),
                           5 * math.sin(math.radians(10)), 0, 0, 0]])
        b = make_traj(1, [[0, 5 * math.cos(math.radians(80)),
                           5 * math.sin(math.radians(80)), 0, 0, 0]])
        _, seps = angular_separation_series([a, b], (0, 0, 0), 0.05)
        assert seps[0] == pytest.approx(math.radians(70))

    def test_wraparound(self):
        a = make_traj(0, [[0, 5 * math.cos(math.radians(350)),
                           5 * math.sin(math.radians(350)), 0, 0, 0]])
        b = make_traj(1, [[0, 5 * math.cos(math.radians(10)),
                           5 * math.sin(math.radians(10)), 0, 0, 0]])
        _, seps = angular_separation_series([a, b], (0, 0, 0), 0.05)
        assert seps[0] == pytest.approx(math.radians(20))

    def test_single_trajectory_all_zero(self):
        a = make_traj(0, [[0, 1, 1, 0, 0, 0], [1, 2, 2, 0, 0, 0]])
        _, seps = angular_separation_series([a], (0, 0, 0), 0.5)
        assert np.all(seps == 0)


class TestSingleMav:
    def test_pure_trapezoid(self):
        tour = tour_through([(10, 0)], (0, 0, 0))
        trajs = schedule_velocities({0: tour}, (0, -8, 0), FOV,
                                    v_max=2.0, a_max=1.0)
        tr = trajs[0]
        assert np.all(tr.speed <= 2.0 + 1e-9)
        assert np.all(tr.speed >= -1e-9)
        assert tr.speed.max() == pytest.approx(2.0, abs=0.05)
        # accel bounded
        dv = np.diff(tr.speed) / np.diff(tr.t)
        assert np.max(np.abs(dv)) <= 1.0 + 1e-3

    def test_short_leg_peak_speed(self):
        # too short to reach v_max: peak ~ sqrt(a * L)
        tour = tour_through([(2.0, 0)], (0, 0, 0))
        L = tour.length
        trajs = schedule_velocities({0: tour}, (0, -8, 0), FOV,
                                    v_max=2.0, a_max=1.0)
        assert trajs[0].speed.max() == pytest.approx(
            min(2.0, math.sqrt(1.0 * L)), abs=0.1)

    def test_starts_and_ends_at_rest(self):
        tour = tour_through([(6, 3)], (0, 0, 0))
        tr = schedule_velocities({0: tour}, (0, -8, 0), FOV)[0]
        assert tr.speed[0] == pytest.approx(0.0, abs=1e-9)
        assert tr.speed[-1] == pytest.approx(0.0, abs=0.05)


def polar(deg, r):
    a = math.radians(deg)
    return (r * math.cos(a), r * math.sin(a))


def start_at(deg, r):
    a = math.radians(deg)
    return (r * math.cos(a), r * math.sin(a), a + math.pi / 2)


def wide_spread_tours():
    """Two MAVs on adjacent anticlockwise arcs; the second MAV's tour is
    much shorter, so unconstrained timing lets it park far ahead of the
    first one. Constrained timing must hold it back."""
    pts_a = [polar(20, 7), polar(50, 5), polar(80, 8), polar(100, 6)]
    pts_b = [polar(170, 6)]
    return {0: tour_through(pts_a, start_at(30, 3)),
            1: tour_through(pts_b, start_at(55, 3))}


def deadlock_tours():
    """Trailing MAV parks immediately while the leader must sweep more
    than the FoV away: no slowdown can fix the end state."""
    pts_a = [polar(90, 6), polar(150, 6), polar(210, 6)]
    pts_b = [polar(-10, 5)]
    return {0: tour_through(pts_a, start_at(10, 3)),
            1: tour_through(pts_b, start_at(-5, 3))}


class TestFovEnforcement:
    def test_unconstrained_violates(self):
        tours = wide_spread_tours()
        trajs = schedule_velocities(tours, (0, 0, 0), FOV, enforce_fov=False)
        _, seps = angular_separation_series(list(trajs.values()), (0, 0, 0),
                                            0.05)
        assert seps.max() > math.pi / 2

    def test_constrained_respects_fov(self):
        tours = wide_spread_tours()
        trajs = schedule_velocities(tours, (0, 0, 0), FOV, enforce_fov=True)
        _, seps = angular_separation_series(list(trajs.values()), (0, 0, 0),
                                            0.05)
        assert seps.max() <= math.pi / 2 + 1e-9

    def test_constrained_keeps_kinematics(self):
        tours = wide_spread_tours()
        trajs = schedule_velocities(tours, (0, 0, 0), FOV, enforce_fov=True)
        for tr in trajs.values():
            assert np.all(tr.speed <= 2.0 + 1e-9)
            assert np.all(tr.speed >= -1e-9)
            dv = np.abs(np.diff(tr.speed) / np.diff(tr.t))
            assert dv.max() <= 1.0 + 1e-3

    def test_parked_trailing_mav_raises(self):
        tours = deadlock_tours()
        with pytest.raises(InfeasiblePlanError) as exc:
            schedule_velocities(tours, (0, 0, 0), FOV, enforce_fov=True)
        lo, hi = exc.value.interval
        assert hi >= lo >= 0.0

    def test_concentric_arcs_no_scaling_needed(self):
        # same bearing sweep on concentric arcs stays aligned
        a = tour_through([(0, 5), (-5, 0)], (5.0, 0.0, math.pi / 2))
        b = tour_through([(0, 5), (-5, 0)], (5.0, 0.0, math.pi / 2))
        trajs = schedule_velocities({0: a, 1: b}, (0, 0, 0), FOV)
        _, seps = angular_separation_series(list(trajs.values()), (0, 0, 0),
                                            0.05)
        assert seps.max() <= math.pi / 2 + 1e-9


class TestCoverage:
    def test_trajectory_enters_every_disk(self):
        nbhs = [Neighborhood(id=i, center=c, radius=0.6)
                for i, c in enumerate([(6, 1), (7, 5), (2, 8)])]
        tour = solve_tspn(nbhs, (0, 0, 0.5), rho=1.0)
        tr = schedule_velocities({0: tour}, (0, -8, 0), FOV)[0]
        for nbh in nbhs:
            d = np.hypot(tr.xy[:, 0] - nbh.center[0],
                         tr.xy[:, 1] - nbh.center[1])
            assert d.min() <= nbh.radius + 1e-6


class TestDeterminism:
    def test_identical_inputs_identical_outputs(self):
        tours = wide_spread_tours()
        t1 = schedule_velocities(tours, (0, 0, 0), FOV)
        t2 = schedule_velocities(wide_spread_tours(), (0, 0, 0), FOV)
        for m in t1:
            assert np.array_equal(t1[m].samples, t2[m].samples)
