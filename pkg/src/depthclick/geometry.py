"""Pinhole camera model and rigid transforms.

Image coordinates are normalized to [0, 1] x [0, 1]; the default intrinsics
are the unit-focal, centered-principal-point substitute used when the true
camera parameters are unknown. Pixel centers sit at integer coordinates, so
pixel (i, j) maps to (u, v) = (j / (W-1), i / (H-1)). Conversion to pixel
units happens only at the sampler boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float = 1.0
    fy: float = 1.0
    cx: float = 0.5
    cy: float = 0.5

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")

    @property
    def K(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx],
                         [0.0, self.fy, self.cy],
                         [0.0, 0.0, 1.0]])


def substitute_intrinsics() -> CameraIntrinsics:
    """Unit focal length, principal point at the image center."""
    return CameraIntrinsics(1.0, 1.0, 0.5, 0.5)


def rotation_from_axis_angle(r: np.ndarray) -> np.ndarray:
    """Rodrigues formula; safe at the identity."""
    r = np.asarray(r, dtype=np.float64)
    theta2 = float(r @ r)
    theta = np.sqrt(theta2)
    K = np.array([[0.0, -r[2], r[1]],
                  [r[2], 0.0, -r[0]],
                  [-r[1], r[0], 0.0]])
    if theta < 1e-12:
        return np.eye(3) + K
    return np.eye(3) + (np.sin(theta) / theta) * K + ((1.0 - np.cos(theta)) / theta2) * (K @ K)


def axis_angle_from_rotation(R: np.ndarray) -> np.ndarray:
    """Log map (rotation angles below pi)."""
    trace = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
    theta = np.arccos(trace)
    if theta < 1e-9:
        return np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]]) / 2.0
    axis = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])
    return axis * theta / (2.0 * np.sin(theta))


@dataclass
class Pose:
    """Rigid transform x -> R(r) x + t with axis-angle rotation."""

    r: np.ndarray = field(default_factory=lambda: np.zeros(3))
    t: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=np.float64).reshape(3)
        self.t = np.asarray(self.t, dtype=np.float64).reshape(3)

    @staticmethod
    def identity() -> "Pose":
        return Pose()

    @property
    def R(self) -> np.ndarray:
        return rotation_from_axis_angle(self.r)

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform points with trailing dimension 3."""
        return points @ self.R.T + self.t

    def compose(self, other: "Pose") -> "Pose":
        """Self after other: (self o other)(x) = self(other(x))."""
        R = self.R @ other.R
        t = self.R @ other.t + self.t
        return Pose(axis_angle_from_rotation(R), t)

    def inverse(self) -> "Pose":
        R = self.R
        return Pose(-self.r, -(R.T @ self.t))


def relative_pose(src: Pose, dst: Pose) -> Pose:
    """Transform mapping src camera coordinates into dst camera coordinates,
    given both camera-to-world poses."""
    return dst.inverse().compose(src)


def pixel_grid(h: int, w: int) -> tuple[np.ndarray, np.ndarray]:
    """Normalized (u, v) coordinates of every pixel center."""
    u = np.arange(w, dtype=np.float64) / (w - 1) if w > 1 else np.zeros(1)
    v = np.arange(h, dtype=np.float64) / (h - 1) if h > 1 else np.zeros(1)
    uu, vv = np.meshgrid(u, v)
    return uu, vv


def camera_rays(h: int, w: int, K: CameraIntrinsics) -> np.ndarray:
    """Unnormalized camera-frame ray directions [H, W, 3] with z = 1, so the
    ray parameter equals planar z-depth."""
    uu, vv = pixel_grid(h, w)
    x = (uu - K.cx) / K.fx
    y = (vv - K.cy) / K.fy
    return np.stack([x, y, np.ones_like(x)], axis=-1)
