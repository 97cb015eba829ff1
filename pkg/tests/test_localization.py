import math

import numpy as np
import pytest

from helpers import alignment_error, complete_edges, noiseless_ranges
from relnav.localization import (
    GateStatus,
    GaugeError,
    OrientationAmbiguousError,
    OrientationResult,
    PlanarEstimate,
    SensingGraph,
    estimate_graph_orientation,
    full_poses,
    gate_step,
    minimize_triangulation_error,
)
from relnav.pointcloud import PointCloud, build_index, sphere_cloud
from relnav.sensors import NoiseConfig, simulate_uwb


class TestGate:
    def test_connected_but_floppy(self):
        pts = [(0, 0), (0, 4), (3, 0)]
        ranges = noiseless_ranges(pts, [(0, 1), (1, 2)])
        gate = gate_step(ranges, 3)
        assert gate.status == GateStatus.WAITING_RIGIDITY

    def test_disconnected(self):
        pts = [(0, 0), (0, 4), (3, 0), (5, 5)]
        ranges = noiseless_ranges(pts, [(0, 1), (2, 3)])
        gate = gate_step(ranges, 4)
        assert gate.status == GateStatus.WAITING_CONNECTIVITY

    def test_rigid_triangle_localizes(self):
        pts = [(0, 0), (0, 4), (3, 0)]
        ranges = noiseless_ranges(pts, complete_edges(3))
        gate = gate_step(ranges, 3)
        assert gate.status == GateStatus.LOCALIZING
        assert gate.last_report.is_rigid


class TestTriangulation:
    def test_noiseless_k3(self):
        truth = np.array([(0, 0), (0, 4), (3, 0)], float)
        est = minimize_triangulation_error(
            noiseless_ranges(truth, complete_edges(3)), 3)
        assert est.residual < 1e-12
        assert est.converged
        err = alignment_error(est.positions, truth)
        assert err.max() < 1e-6

    def test_gauge_pins(self):
        truth = np.array([(1, 1), (4, 5), (7, 2), (2, 6)], float)
        est = minimize_triangulation_error(
            noiseless_ranges(truth, complete_edges(4)), 4)
        assert np.allclose(est.positions[0], (0, 0))
        assert est.positions[1][0] == pytest.approx(0.0, abs=1e-12)
        assert est.positions[1][1] == pytest.approx(5.0)

    def test_noiseless_k4_generic(self):
        truth = np.array([(0.3, -1), (4, 0.5), (3.2, 4), (-1, 2.5)], float)
        est = minimize_triangulation_error(
            noiseless_ranges(truth, complete_edges(4)), 4)
        assert est.residual < 1e-10
        assert alignment_error(est.positions, truth).max() < 1e-6

    def test_noisy_k5_monte_carlo(self):
        rng = np.random.default_rng(21)
        truth = rng.uniform(-5, 5, size=(5, 2))
        errs = []
        for seed in range(100):
            cfg = NoiseConfig(sigma_uwb=0.1, sigma_vio=0.0, seed=seed)
            ranges = [
                simulate_uwb(truth[i], truth[j], i, j, cfg, step=0)
                for i, j in complete_edges(5)
            ]
            est = minimize_triangulation_error(ranges, 5)
            rmse = float(np.sqrt(np.mean(
                alignment_error(est.positions, truth) ** 2)))
            errs.append(rmse)
        assert np.median(errs) <= 0.3

    def test_missing_gauge_edge(self):
        truth = np.array([(0, 0), (0, 4), (3, 0)], float)
        ranges = noiseless_ranges(truth, [(0, 2), (1, 2)])
        with pytest.raises(GaugeError):
            minimize_triangulation_error(ranges, 3)

    def test_deterministic(self):
        truth = np.array([(0, 0), (0, 4), (3, 0), (4, 4)], float)
        ranges = noiseless_ranges(truth, complete_edges(4))
        a = minimize_triangulation_error(ranges, 4)
        b = minimize_triangulation_error(ranges, 4)
        assert np.array_equal(a.positions, b.positions)

    def test_gauge_invariance_of_relative_geometry(self):
        # the recovered inter-agent distances depend only on the ranges,
        # not on where the planted truth sits in the world
        base = np.array([(0, 0), (0, 4), (3, 0), (4, 4)], float)
        theta = 0.8
        c, s = math.cos(theta), math.sin(theta)
        moved = base @ np.array([[c, -s], [s, c]]).T + [100.0, -30.0]
        e1 = minimize_triangulation_error(
            noiseless_ranges(base, complete_edges(4)), 4)
        e2 = minimize_triangulation_error(
            noiseless_ranges(moved, complete_edges(4)), 4)
        d1 = np.linalg.norm(e1.positions[:, None] - e1.positions[None], axis=2)
        d2 = np.linalg.norm(e2.positions[:, None] - e2.positions[None], axis=2)
        assert np.allclose(d1, d2, atol=1e-8)


def _cloud_with_spheres(centers, r_mav, seed=0):
    pts = np.vstack([sphere_cloud(c, r_mav, 80, seed=seed + k)
                     for k, c in enumerate(centers)])
    return build_index(PointCloud(points=pts))


class TestOrientation:
    def test_recovers_known_bearing(self):
        # UGV is agent 0 at the origin; MAVs 1 and 2 at different radii so
        # the sweep has a unique winner
        truth = np.array([(0, 0), (3, 3), (-1, 4)], float)
        est = minimize_triangulation_error(
            noiseless_ranges(truth, complete_edges(3)), 3)
        clouds = {0: _cloud_with_spheres([(3, 3, 1.0), (-1, 4, 1.0)], 0.2)}
        sensing = SensingGraph(edges=((0, 1), (0, 2)))
        res = estimate_graph_orientation(
            est, clouds, sensing, r_mav=0.2,
            altitudes={1: 1.0, 2: 1.0})
        base = est.positions.copy()
        if res.reflected:
            base[:, 0] = -base[:, 0]
        c, s = math.cos(res.theta), math.sin(res.theta)
        rot = np.array([[c, -s], [s, c]])
        recovered = base @ rot.T
        assert np.linalg.norm(recovered[1] - truth[1]) < 0.2
        assert np.linalg.norm(recovered[2] - truth[2]) < 0.2

    def test_empty_cloud_ambiguous(self):
        truth = np.array([(0, 0), (3, 3), (-1, 4)], float)
        est = minimize_triangulation_error(
            noiseless_ranges(truth, complete_edges(3)), 3)
        clouds = {0: build_index(PointCloud(points=np.empty((0, 3))))}
        with pytest.raises(OrientationAmbiguousError):
            estimate_graph_orientation(
                est, clouds, SensingGraph(edges=((0, 1), (0, 2))), r_mav=0.2)

    def test_empty_sensing_graph(self):
        est = PlanarEstimate(positions=np.zeros((2, 2)), residual=0.0)
        with pytest.raises(OrientationAmbiguousError):
            estimate_graph_orientation(est, {}, SensingGraph(), r_mav=0.2)

    def test_single_observer_single_mav_reflection_ambiguous(self):
        # one UGV seeing one MAV: the reflected realization matches at a
        # different sweep angle, so no unique winner exists
        truth = np.array([(0, 0), (2, 3), (4, 0)], float)
        est = minimize_triangulation_error(
            noiseless_ranges(truth, complete_edges(3)), 3)
        clouds = {0: _cloud_with_spheres([(2, 3, 1.0)], 0.2)}
        with pytest.raises(OrientationAmbiguousError):
            estimate_graph_orientation(
                est, clouds, SensingGraph(edges=((0, 1),)), r_mav=0.2,
                altitudes={1: 1.0})

    def test_two_observers_resolve_reflection(self):
        # agents 0 and 3 are UGVs, each seeing one MAV
        truth = np.array([(0, 0), (2, 3), (-3, 2), (1, -1)], float)
        est = minimize_triangulation_error(
            noiseless_ranges(truth, complete_edges(4)), 4)
        clouds = {
            0: _cloud_with_spheres([(2, 3, 1.0)], 0.2, seed=5),
            3: _cloud_with_spheres([(-3, 2, 1.0)], 0.2, seed=9),
        }
        sensing = SensingGraph(edges=((0, 1), (3, 2)))
        res = estimate_graph_orientation(
            est, clouds, sensing, r_mav=0.2, altitudes={1: 1.0, 2: 1.0})
        base = est.positions.copy()
        if res.reflected:
            base[:, 0] = -base[:, 0]
        c, s = math.cos(res.theta), math.sin(res.theta)
        recovered = base @ np.array([[c, -s], [s, c]]).T
        assert np.linalg.norm(recovered[1] - truth[1]) < 0.2


class TestFullPoses:
    def _est(self, pts):
        return PlanarEstimate(positions=np.asarray(pts, float), residual=0.0)

    def test_identity_theta(self):
        est = self._est([(0, 0), (0, 5)])
        poses = full_poses(est, OrientationResult(0.0, False, 1.0),
                           altitudes={1: 2.0}, yaws={}, mav_ids={1})
        assert poses[1].position == pytest.approx((0.0, 5.0, 2.0))

    def test_quarter_turn(self):
        est = self._est([(0, 0), (0, 5)])
        poses = full_poses(est, OrientationResult(math.pi / 2, False, 1.0),
                           altitudes={1: 1.5}, yaws={}, mav_ids={1})
        x, y, z = poses[1].position
        assert (x, y) == pytest.approx((-5.0, 0.0), abs=1e-12)
        assert z == 1.5

    def test_round_trip(self):
        est = self._est([(0, 0), (0, 5), (2, 1)])
        theta = 0.7
        poses = full_poses(est, OrientationResult(theta, False, 1.0),
                           altitudes={}, yaws={})
        c, s = math.cos(theta), math.sin(theta)
        inv = np.array([[c, s], [-s, c]])
        back = np.array([inv @ np.array(p.position[:2]) for p in poses])
        assert np.allclose(back, est.positions, atol=1e-12)

    def test_missing_altitude_flags_planar_only(self):
        est = self._est([(0, 0), (0, 5)])
        poses = full_poses(est, OrientationResult(0.0, False, 1.0),
                           altitudes={}, yaws={}, mav_ids={1})
        assert poses[1].planar_only
        assert not poses[0].planar_only
