"""Projective warping, SSIM and the self-supervised losses."""

import numpy as np
import pytest

from depthclick import autodiff as ad
from depthclick.errors import DegenerateBatchError
from depthclick.geometry import Pose, substitute_intrinsics
from depthclick.photometric import (PhotometricConfig, photometric_loss,
                                    project_points, rotation_entries,
                                    smoothness_loss, ssim, warp)

K = substitute_intrinsics()


def test_identity_pose_projection_is_identity():
    rng = np.random.default_rng(0)
    h, w = 6, 9
    depth = rng.uniform(2.0, 10.0, size=(h, w))
    proj = project_points(ad.tensor(depth), Pose.identity(), K)
    uu = np.arange(w, dtype=float)[None, :].repeat(h, axis=0)
    vv = np.arange(h, dtype=float)[:, None].repeat(w, axis=1)
    assert proj.valid.all()
    assert np.allclose(proj.coords.data[..., 0], uu, atol=1e-12)
    assert np.allclose(proj.coords.data[..., 1], vv, atol=1e-12)


def test_hand_projective_example():
    # backproject (0.2, 0, 1), scale to (0.4, 0, 2), translate to (0.5, 0, 2),
    # reproject to (0.75, 0.5)
    h = w = 11
    depth = np.full((h, w), 2.0)
    pose = Pose(np.zeros(3), np.array([0.1, 0.0, 0.0]))
    proj = project_points(ad.tensor(depth), pose, K)
    # pixel with u = 0.7, v = 0.5 -> col = 7, row = 5 on an 11x11 grid
    u_px = proj.coords.data[5, 7, 0] / (w - 1)
    v_px = proj.coords.data[5, 7, 1] / (h - 1)
    assert u_px == pytest.approx(0.75, abs=1e-12)
    assert v_px == pytest.approx(0.5, abs=1e-12)


def test_forward_translation_moves_coords_radially_outward():
    h = w = 8
    depth = np.full((h, w), 5.0)
    pose = Pose(np.zeros(3), np.array([0.0, 0.0, -1.0]))  # camera moves forward
    proj = project_points(ad.tensor(depth), pose, K)
    # per-pixel oracle: new normalized offset is old offset * D / (D + tz)
    for i in range(h):
        for j in range(w):
            du = j / (w - 1) - 0.5
            dv = i / (h - 1) - 0.5
            expect_u = 0.5 + du * 5.0 / 4.0
            expect_v = 0.5 + dv * 5.0 / 4.0
            assert proj.coords.data[i, j, 0] == pytest.approx(expect_u * (w - 1), abs=1e-9)
            assert proj.coords.data[i, j, 1] == pytest.approx(expect_v * (h - 1), abs=1e-9)
            old = np.hypot(du, dv)
            new = np.hypot(proj.coords.data[i, j, 0] / (w - 1) - 0.5,
                           proj.coords.data[i, j, 1] / (h - 1) - 0.5)
            assert new >= old - 1e-12


def test_points_behind_camera_flagged_invalid():
    depth = np.full((4, 4), 1.0)
    pose = Pose(np.zeros(3), np.array([0.0, 0.0, -2.0]))
    proj = project_points(ad.tensor(depth), pose, K)
    assert not proj.valid.any()


def test_rotation_entries_match_numpy_rodrigues():
    from depthclick.geometry import rotation_from_axis_angle
    rng = np.random.default_rng(1)
    for _ in range(10):
        r = rng.normal(size=3) * 0.5
        entries = rotation_entries(ad.tensor(r))
        R = np.array([e.item() for e in entries]).reshape(3, 3)
        assert np.allclose(R, rotation_from_axis_angle(r), atol=1e-12)


def test_warp_identity_pose_reproduces_source():
    rng = np.random.default_rng(2)
    src = rng.random((3, 8, 8))
    depth = rng.uniform(2, 8, size=(8, 8))
    warped, valid = warp(ad.tensor(src), ad.tensor(depth), Pose.identity(), K)
    assert valid.all()
    assert np.allclose(warped.data, src, atol=1e-9)


def test_warp_round_trip_through_inverse_pose():
    # smooth image: warp by T then by T^-1 with consistent depths
    h = w = 64
    uu, vv = np.meshgrid(np.linspace(0, 1, w), np.linspace(0, 1, h))
    src = np.stack([0.5 + 0.4 * np.sin(3 * uu + 1.5 * vv),
                    0.5 + 0.3 * np.cos(2 * uu - vv),
                    0.5 + 0.2 * np.sin(5 * vv)], axis=0)
    depth = np.full((h, w), 6.0)
    pose = Pose(np.array([0.0, 0.01, 0.0]), np.array([0.08, 0.0, 0.0]))
    # depth is constant so the source-frame depth is approximately constant too
    mid, valid1 = warp(ad.tensor(src), ad.tensor(depth), pose, K)
    back, valid2 = warp(mid, ad.tensor(depth), pose.inverse(), K)
    both = valid1 & valid2
    # erode the validity mask so zero-filled border samples do not leak in
    both[:2] = both[-2:] = False
    both[:, :2] = both[:, -2:] = False
    err = np.abs(back.data - src)[:, both].mean()
    assert err < 0.03


def test_warp_pose_gradient_matches_finite_differences():
    rng = np.random.default_rng(3)
    src = rng.random((2, 8, 8))
    depth = rng.uniform(3, 6, size=(8, 8))
    r0 = np.array([0.05, -0.03, 0.04])
    t0 = np.array([0.05, 0.02, -0.1])

    def fn(r, t):
        warped, valid = warp(ad.tensor(src), ad.tensor(depth), (r, t), K)
        mask = valid.astype(float)
        return ad.reduce_sum(warped * mask) * (1.0 / max(mask.sum(), 1.0))

    assert ad.check_gradients(fn, [r0, t0], h=1e-6) < 1e-3


def test_warp_depth_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    src = rng.random((1, 6, 6))
    depth = rng.uniform(3, 6, size=(6, 6))
    pose = Pose(np.array([0.02, 0.01, -0.01]), np.array([0.1, -0.05, 0.05]))

    def fn(d):
        warped, valid = warp(ad.tensor(src), d, pose, K)
        return ad.reduce_sum(warped * valid.astype(float))

    assert ad.check_gradients(fn, [depth], h=1e-6) < 1e-3


def test_ssim_self_is_one():
    rng = np.random.default_rng(5)
    x = rng.random((2, 7, 7))
    out = ssim(ad.tensor(x), ad.tensor(x))
    assert np.allclose(out.data, 1.0, atol=1e-9)


def test_ssim_symmetric():
    rng = np.random.default_rng(6)
    x, y = rng.random((1, 6, 6)), rng.random((1, 6, 6))
    assert np.allclose(ssim(ad.tensor(x), ad.tensor(y)).data,
                       ssim(ad.tensor(y), ad.tensor(x)).data, atol=1e-12)


def test_ssim_checkerboard_inversion_negative_interior():
    board = np.indices((8, 8)).sum(axis=0) % 2
    x = board[None].astype(float)
    out = ssim(ad.tensor(x), ad.tensor(1.0 - x))

    # direct evaluation of the formula on one interior 3x3 window
    def window_stats(img, i, j):
        win = img[0, i - 1:i + 2, j - 1:j + 2]
        mu = win.mean()
        return mu, (win * win).mean() - mu * mu

    cfg = PhotometricConfig()
    mu_x, var_x = window_stats(x, 4, 4)
    mu_y, var_y = window_stats(1.0 - x, 4, 4)
    cov = (x[0, 3:6, 3:6] * (1.0 - x)[0, 3:6, 3:6]).mean() - mu_x * mu_y
    expect = ((2 * mu_x * mu_y + cfg.ssim_c1) * (2 * cov + cfg.ssim_c2)) / \
             ((mu_x ** 2 + mu_y ** 2 + cfg.ssim_c1) * (var_x + var_y + cfg.ssim_c2))
    assert out.data[0, 4, 4] == pytest.approx(expect, abs=1e-12)
    assert (out.data[0, 2:6, 2:6] < 0).all()


def test_ssim_range_bounds():
    rng = np.random.default_rng(7)
    for _ in range(10):
        x, y = rng.random((1, 8, 8)), rng.random((1, 8, 8))
        vals = ssim(ad.tensor(x), ad.tensor(y)).data
        assert vals.min() >= -1.0 - 1e-9 and vals.max() <= 1.0 + 1e-9


def test_photometric_loss_identical_images_zero():
    rng = np.random.default_rng(8)
    x = rng.random((3, 6, 6))
    valid = np.ones((6, 6), dtype=bool)
    assert photometric_loss(ad.tensor(x), ad.tensor(x), valid).item() <= 1e-9


def test_photometric_loss_alpha_zero_is_l1():
    rng = np.random.default_rng(9)
    x, y = rng.random((2, 5, 5)), rng.random((2, 5, 5))
    valid = np.ones((5, 5), dtype=bool)
    cfg = PhotometricConfig(alpha=0.0)
    loss = photometric_loss(ad.tensor(x), ad.tensor(y), valid, cfg)
    assert loss.item() == pytest.approx(np.abs(x - y).mean(axis=0).mean(), abs=1e-12)


def test_photometric_loss_alpha_one_noise_in_unit_interval():
    rng = np.random.default_rng(10)
    x, y = rng.random((1, 8, 8)), rng.random((1, 8, 8))
    valid = np.ones((8, 8), dtype=bool)
    cfg = PhotometricConfig(alpha=1.0)
    ident = photometric_loss(ad.tensor(x), ad.tensor(x), valid, cfg).item()
    noise = photometric_loss(ad.tensor(x), ad.tensor(y), valid, cfg).item()
    assert ident <= 1e-9
    assert 0.0 < noise <= 1.0


def test_photometric_loss_partial_validity_matches_direct_formula():
    rng = np.random.default_rng(11)
    x, y = rng.random((1, 6, 6)), rng.random((1, 6, 6))
    valid = rng.random((6, 6)) > 0.4
    cfg = PhotometricConfig(alpha=0.0)
    loss = photometric_loss(ad.tensor(x), ad.tensor(y), valid, cfg)
    direct = np.abs(x - y).mean(axis=0)[valid].mean()
    assert loss.item() == pytest.approx(direct, abs=1e-12)


def test_photometric_loss_no_valid_pixels_raises():
    x = np.zeros((1, 4, 4))
    with pytest.raises(DegenerateBatchError):
        photometric_loss(ad.tensor(x), ad.tensor(x), np.zeros((4, 4), dtype=bool))


def test_photometric_loss_gradient():
    rng = np.random.default_rng(12)
    x = rng.random((1, 6, 6))
    y = rng.random((1, 6, 6))
    valid = np.ones((6, 6), dtype=bool)

    def fn(a, b):
        return photometric_loss(a, b, valid)

    assert ad.check_gradients(fn, [x, y]) < 1e-3


def test_smoothness_constant_depth_zero():
    img = np.random.default_rng(13).random((3, 5, 5))
    assert smoothness_loss(ad.tensor(np.full((5, 5), 4.0)), img).item() == 0.0


def test_smoothness_ramp_closed_form():
    h, w = 6, 8
    ramp = np.tile(np.arange(w, dtype=float) * 0.5 + 2.0, (h, 1))
    img = np.full((1, h, w), 0.3)
    loss = smoothness_loss(ad.tensor(ramp), img)
    # x-gradient of ramp / mean is 0.5 / mean everywhere; constant image -> weight 1
    expect = 0.5 / ramp.mean()
    assert loss.item() == pytest.approx(expect, abs=1e-12)


def test_smoothness_scale_invariance():
    rng = np.random.default_rng(14)
    depth = rng.uniform(1, 5, size=(6, 6))
    img = rng.random((2, 6, 6))
    a = smoothness_loss(ad.tensor(depth), img).item()
    b = smoothness_loss(ad.tensor(depth * 7.3), img).item()
    assert a == pytest.approx(b, rel=1e-12)


def test_smoothness_gradient():
    rng = np.random.default_rng(15)
    depth = rng.uniform(1, 5, size=(5, 5))
    img = rng.random((1, 5, 5))
    assert ad.check_gradients(lambda d: smoothness_loss(d, img), [depth]) < 1e-3
