"""Differentiable projective warping and the self-supervised depth losses.

The pipeline: back-project each target pixel with its depth, move it by a
rigid transform, re-project, then bilinearly sample the source image at the
resulting coordinates. The photometric loss mixes (1 - SSIM)/2 and L1; an
edge-aware first-order term regularizes depth smoothness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .errors import DegenerateBatchError
from .geometry import CameraIntrinsics, Pose, pixel_grid

PoseLike = Union[Pose, tuple]


@dataclass
class PhotometricConfig:
    alpha: float = 0.85
    ssim_c1: float = 0.01 ** 2
    ssim_c2: float = 0.03 ** 2
    ssim_window: int = 3
    smooth_weight: float = 1e-3

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.ssim_c1 <= 0 or self.ssim_c2 <= 0:
            raise ValueError("SSIM constants must be positive")


def _pose_tensors(pose: PoseLike) -> tuple[Tensor, Tensor]:
    if isinstance(pose, Pose):
        return ad.as_tensor(pose.r), ad.as_tensor(pose.t)
    rot, trans = pose
    return ad.as_tensor(rot), ad.as_tensor(trans)


def rotation_entries(rot: Tensor) -> list[Tensor]:
    """The nine entries of R(rot) via Rodrigues, differentiable in rot.

    Returned row-major. The sinc-style coefficients are regularized with a
    tiny epsilon so the identity stays smooth.
    """
    r0, r1, r2 = rot[0], rot[1], rot[2]
    s = r0 * r0 + r1 * r1 + r2 * r2 + 1e-30
    theta = ad.sqrt(s)
    a = ad.sin(theta) / theta          # sin(t)/t
    b = (1.0 - ad.cos(theta)) / s      # (1-cos(t))/t^2
    # R = I + a K + b K^2 with K = skew(r), K^2 = r r^T - s I
    r00 = 1.0 + b * (r0 * r0 - s)
    r01 = -a * r2 + b * (r0 * r1)
    r02 = a * r1 + b * (r0 * r2)
    r10 = a * r2 + b * (r1 * r0)
    r11 = 1.0 + b * (r1 * r1 - s)
    r12 = -a * r0 + b * (r1 * r2)
    r20 = -a * r1 + b * (r2 * r0)
    r21 = a * r0 + b * (r2 * r1)
    r22 = 1.0 + b * (r2 * r2 - s)
    return [r00, r01, r02, r10, r11, r12, r20, r21, r22]


class Projection(NamedTuple):
    coords: Tensor        # [H, W, 2] sampler pixel coordinates (u, v)
    valid: np.ndarray     # [H, W] bool, transformed point in front of camera
    depth: Tensor         # [H, W] transformed z


def project_points(depth, pose: PoseLike, K: CameraIntrinsics,
                   eps_z: float = 1e-6) -> Projection:
    """Map every target pixel to its source-image sampling coordinate.

    ``depth`` is the target-frame z-depth map [H, W]; ``pose`` moves target
    camera coordinates into the source camera frame. Differentiable w.r.t.
    depth and the six pose parameters.
    """
    depth = ad.as_tensor(depth)
    h, w = depth.shape
    rot, trans = _pose_tensors(pose)
    uu, vv = pixel_grid(h, w)
    xdir = (uu - K.cx) / K.fx
    ydir = (vv - K.cy) / K.fy

    X = depth * xdir
    Y = depth * ydir
    Z = depth
    R = rotation_entries(rot)
    Xc = R[0] * X + R[1] * Y + R[2] * Z + trans[0]
    Yc = R[3] * X + R[4] * Y + R[5] * Z + trans[1]
    Zc = R[6] * X + R[7] * Y + R[8] * Z + trans[2]

    valid = Zc.data > eps_z
    guard = valid.astype(Zc.data.dtype)
    z_safe = Zc * guard + (1.0 - guard)
    u = (Xc / z_safe) * K.fx + K.cx
    v = (Yc / z_safe) * K.fy + K.cy
    u_px = u * float(w - 1)
    v_px = v * float(h - 1)
    coords = ad.stack([u_px, v_px], axis=2)
    return Projection(coords, valid, Zc)


def warp(src, depth_tgt, pose: PoseLike, K: CameraIntrinsics):
    """Sample ``src`` [C, H, W] at the projection of the target grid.

    Returns (warped [C, H, W], valid [H, W]). Differentiable w.r.t. src,
    depth and pose.
    """
    src = ad.as_tensor(src)
    c, h, w = src.shape
    proj = project_points(depth_tgt, pose, K)
    coords = ad.reshape(proj.coords, (1, h, w, 2))
    sampled, sample_valid = ad.grid_sample(ad.reshape(src, (1, c, h, w)), coords)
    warped = ad.reshape(sampled, (c, h, w))
    return warped, proj.valid & sample_valid[0]


def ssim(x, y, cfg: PhotometricConfig | None = None) -> Tensor:
    """Per-pixel structural similarity of two [C, H, W] maps in [0, 1]."""
    cfg = cfg or PhotometricConfig()
    x = ad.as_tensor(x)
    y = ad.as_tensor(y)
    c, h, w = x.shape
    k = cfg.ssim_window
    pad = k // 2

    def local_mean(t):
        return ad.avg_pool2d(ad.reshape(t, (1, c, h, w)), k, 1, pad=pad)

    mu_x = local_mean(x)
    mu_y = local_mean(y)
    sigma_x = local_mean(x * x) - mu_x * mu_x
    sigma_y = local_mean(y * y) - mu_y * mu_y
    sigma_xy = local_mean(x * y) - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + cfg.ssim_c1) * (2.0 * sigma_xy + cfg.ssim_c2)
    den = (mu_x * mu_x + mu_y * mu_y + cfg.ssim_c1) * (sigma_x + sigma_y + cfg.ssim_c2)
    return ad.reshape(num / den, (c, h, w))


def photometric_loss(target, warped, valid: np.ndarray,
                     cfg: PhotometricConfig | None = None) -> Tensor:
    """(alpha/2)(1 - SSIM) + (1 - alpha) L1, averaged over channels then over
    valid pixels only."""
    cfg = cfg or PhotometricConfig()
    target = ad.as_tensor(target)
    warped = ad.as_tensor(warped)
    n_valid = int(np.count_nonzero(valid))
    if n_valid == 0:
        raise DegenerateBatchError("no valid pixels to compare")
    per_pixel = (cfg.alpha / 2.0) * (1.0 - ssim(target, warped, cfg)) \
        + (1.0 - cfg.alpha) * ad.absval(target - warped)
    per_pixel = ad.reduce_mean(per_pixel, axes=0)  # over channels
    mask = valid.astype(per_pixel.data.dtype)
    return ad.reduce_sum(per_pixel * mask) * (1.0 / n_valid)


def smoothness_loss(depth, image) -> Tensor:
    """Edge-aware first-order smoothness of a mean-normalized depth map.

    ``depth`` [H, W]; ``image`` [C, H, W] guides the edge weights (its
    gradients are averaged over channels and do not receive gradients).
    """
    depth = ad.as_tensor(depth)
    img = np.asarray(image.data if isinstance(image, Tensor) else image)
    if float(np.mean(depth.data)) == 0:
        raise DegenerateBatchError("smoothness undefined for zero-mean depth")
    d = depth / ad.reduce_mean(depth)
    dx = ad.absval(d[:, 1:] - d[:, :-1])
    dy = ad.absval(d[1:, :] - d[:-1, :])
    ix = np.abs(img[:, :, 1:] - img[:, :, :-1]).mean(axis=0)
    iy = np.abs(img[:, 1:, :] - img[:, :-1, :]).mean(axis=0)
    wx = np.exp(-ix)
    wy = np.exp(-iy)
    return ad.reduce_mean(dx * wx) + ad.reduce_mean(dy * wy)
