"""Camera model and rigid transform basics."""

import numpy as np
import pytest

from depthclick.geometry import (CameraIntrinsics, Pose, axis_angle_from_rotation,
                                 camera_rays, pixel_grid, relative_pose,
                                 rotation_from_axis_angle, substitute_intrinsics)


def test_substitute_intrinsics_values():
    K = substitute_intrinsics()
    assert np.array_equal(K.K, [[1, 0, 0.5], [0, 1, 0.5], [0, 0, 1]])


def test_invalid_focal_rejected():
    with pytest.raises(ValueError):
        CameraIntrinsics(fx=0.0)


def test_rotation_orthonormal_det_one():
    rng = np.random.default_rng(0)
    for _ in range(30):
        r = rng.normal(size=3) * rng.uniform(0, 2)
        R = rotation_from_axis_angle(r)
        assert np.allclose(R @ R.T, np.eye(3), atol=1e-9)
        assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-9)


def test_axis_angle_log_exp_roundtrip():
    rng = np.random.default_rng(1)
    for _ in range(30):
        r = rng.normal(size=3)
        r = r / np.linalg.norm(r) * rng.uniform(1e-4, 3.0)
        R = rotation_from_axis_angle(r)
        r2 = axis_angle_from_rotation(R)
        assert np.allclose(rotation_from_axis_angle(r2), R, atol=1e-9)


def test_pose_compose_inverse():
    rng = np.random.default_rng(2)
    a = Pose(rng.normal(size=3) * 0.3, rng.normal(size=3))
    b = Pose(rng.normal(size=3) * 0.3, rng.normal(size=3))
    pts = rng.normal(size=(10, 3))
    assert np.allclose(a.compose(b).apply(pts), a.apply(b.apply(pts)), atol=1e-9)
    assert np.allclose(a.inverse().apply(a.apply(pts)), pts, atol=1e-9)


def test_relative_pose_maps_between_frames():
    rng = np.random.default_rng(3)
    cam_a = Pose(rng.normal(size=3) * 0.2, rng.normal(size=3))
    cam_b = Pose(rng.normal(size=3) * 0.2, rng.normal(size=3))
    world_pts = rng.normal(size=(6, 3)) + np.array([0, 0, 5.0])
    in_a = cam_a.inverse().apply(world_pts)
    in_b = cam_b.inverse().apply(world_pts)
    rel = relative_pose(cam_a, cam_b)
    assert np.allclose(rel.apply(in_a), in_b, atol=1e-9)


def test_pixel_grid_spans_unit_square():
    uu, vv = pixel_grid(5, 9)
    assert uu[0, 0] == 0 and uu[0, -1] == 1.0
    assert vv[0, 0] == 0 and vv[-1, 0] == 1.0


def test_camera_rays_unit_z():
    rays = camera_rays(4, 4, substitute_intrinsics())
    assert np.allclose(rays[..., 2], 1.0)
    # directions symmetric around the principal point
    assert np.allclose(rays[:, 0, 0], -rays[:, -1, 0])
