"""Deterministic raycaster producing labelled samples and video sequences."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SceneError
from ..geometry import (CameraIntrinsics, Pose, camera_rays, relative_pose,
                        rotation_from_axis_angle)
from .primitives import intersect
from .scene import SceneSpec, SequenceSpec, texture_pattern

SKY_COLOR = np.array([0.55, 0.62, 0.75])
BACKDROP_COLOR = np.array([0.45, 0.45, 0.5])
FLOOR_COLOR = np.array([0.5, 0.42, 0.35])
TEXTURE_AMPLITUDE = 0.5


@dataclass
class Sample:
    """One labelled image: RGB in [0,1], planar z-depth, instance masks."""

    rgb: np.ndarray                  # [3, H, W]
    depth: np.ndarray                # [H, W]
    instances: list = field(default_factory=list)  # [(mask bool [H,W], class_id)]
    intrinsics: CameraIntrinsics = field(default_factory=CameraIntrinsics)


@dataclass
class SequenceRender:
    frames: list                  # list[Sample]
    kept_indices: list            # raw trajectory indices that were kept
    poses: list                   # camera-to-world pose per kept frame
    relative_poses: list          # consecutive kept-frame transforms (oracle only)


def object_hit_maps(spec: SceneSpec, h: int, w: int, K: CameraIntrinsics,
                    camera_pose: Pose):
    """Per-object hit depth and normals for every pixel (inf on miss)."""
    rays_cam = camera_rays(h, w, K)
    R_cam = camera_pose.R
    dirs = rays_cam @ R_cam.T
    origin = camera_pose.t
    hits = []
    with np.errstate(invalid="ignore"):
        for obj in spec.objects:
            z_cam = float(camera_pose.inverse().apply(obj.center[None])[0, 2])
            if z_cam <= 0:
                raise SceneError(f"object at {obj.center} lies behind the camera")
            R_obj = rotation_from_axis_angle_cached(obj.orient)
            o_loc = R_obj.T @ (origin - obj.center)
            d_loc = dirs @ R_obj
            t, n_loc = intersect(obj.family, o_loc, d_loc, obj.params)
            hits.append((t, np.nan_to_num(n_loc) @ R_obj.T))
    return dirs, origin, hits


_rot_cache: dict = {}


def rotation_from_axis_angle_cached(r: np.ndarray) -> np.ndarray:
    key = r.tobytes()
    R = _rot_cache.get(key)
    if R is None:
        R = rotation_from_axis_angle(r)
        if len(_rot_cache) > 4096:
            _rot_cache.clear()
        _rot_cache[key] = R
    return R


def _plane_hit(origin, dirs, axis: int, value: float, toward_positive: bool):
    d = dirs[..., axis]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (value - origin[axis]) / d
    ok = (d > 1e-9) if toward_positive else (d < -1e-9)
    return np.where(ok & (t > 1e-9), t, np.inf)


def render(spec: SceneSpec, h: int, w: int, K: CameraIntrinsics | None = None,
           camera_pose: Pose | None = None) -> Sample:
    """Render a scene: nearest-hit shading, z-depth and instance masks.

    Background is a textured plane at the far distance (plus the optional
    floor); pixels that hit nothing are sky at far-plane depth.
    """
    if h < 16 or w < 16:
        raise SceneError("image extent must be at least 16")
    K = K or CameraIntrinsics()
    camera_pose = camera_pose or Pose.identity()
    dirs, origin, hits = object_hit_maps(spec, h, w, K, camera_pose)

    t_all = [hit[0] for hit in hits]
    t_backdrop = _plane_hit(origin, dirs, axis=2, value=spec.far, toward_positive=True)
    t_all.append(t_backdrop)
    if spec.floor:
        t_floor = _plane_hit(origin, dirs, axis=1, value=spec.floor_y, toward_positive=True)
        t_all.append(t_floor)
    stack = np.stack(t_all, axis=0)
    winner = np.argmin(stack, axis=0)
    t_min = np.min(stack, axis=0)
    nothing = ~np.isfinite(t_min)

    depth = np.where(nothing, spec.far, t_min)
    rgb = np.empty((h, w, 3))
    rgb[...] = SKY_COLOR
    light = spec.light_dir / np.linalg.norm(spec.light_dir)
    amb = spec.ambient

    n_obj = len(spec.objects)
    backdrop_idx = n_obj
    floor_idx = n_obj + 1 if spec.floor else None

    hit_points = origin + np.where(nothing, 0.0, t_min)[..., None] * dirs

    sel = (winner == backdrop_idx) & ~nothing
    if sel.any():
        pat = texture_pattern(hit_points[sel], "checker", spec.background_seed, 2.5)
        noise = texture_pattern(hit_points[sel], "noise", spec.background_seed + 7, 4.0)
        shade = 1.0 - TEXTURE_AMPLITUDE * (0.55 * pat + 0.45 * noise)
        rgb[sel] = BACKDROP_COLOR * shade[:, None]

    if floor_idx is not None:
        sel = (winner == floor_idx) & ~nothing
        if sel.any():
            pat = texture_pattern(hit_points[sel], "checker", spec.background_seed + 3, 1.6)
            noise = texture_pattern(hit_points[sel], "noise", spec.background_seed + 9, 2.2)
            lambert = amb + (1 - amb) * max(0.0, float(-light[1]))
            shade = (1.0 - TEXTURE_AMPLITUDE * (0.5 * pat + 0.5 * noise)) * lambert
            rgb[sel] = FLOOR_COLOR * shade[:, None]

    instances = []
    for idx, obj in enumerate(spec.objects):
        mask = (winner == idx) & ~nothing
        if not mask.any():
            continue
        points = hit_points[mask]
        R_obj = rotation_from_axis_angle_cached(obj.orient)
        local = (points - obj.center) @ R_obj
        pattern = texture_pattern(local, obj.texture, obj.texture_seed, obj.texture_scale)
        normal = hits[idx][1][mask]
        lambert = amb + (1 - amb) * np.maximum(0.0, normal @ (-light))
        shade = (1.0 - TEXTURE_AMPLITUDE * pattern) * lambert
        rgb[mask] = obj.base_color * shade[:, None]
        instances.append((mask, obj.class_id))

    rgb = np.clip(rgb, 0.0, 1.0).transpose(2, 0, 1)
    return Sample(rgb=rgb, depth=depth, instances=instances, intrinsics=K)


def render_sequence(seq: SequenceSpec, h: int, w: int,
                    K: CameraIntrinsics | None = None) -> SequenceRender:
    """Render a static scene along a camera trajectory, keeping every
    ``stride``-th frame. Ground-truth relative poses between consecutive kept
    frames ride along for test oracles; training never sees them."""
    if len(seq.trajectory) < 2 * seq.stride + 1:
        raise SceneError("trajectory too short for the requested stride")
    K = K or CameraIntrinsics()
    kept = list(range(0, len(seq.trajectory), seq.stride))
    poses = [seq.trajectory[i] for i in kept]
    frames = [render(seq.scene, h, w, K, pose) for pose in poses]
    rel = [relative_pose(poses[i], poses[i + 1]) for i in range(len(poses) - 1)]
    return SequenceRender(frames=frames, kept_indices=kept, poses=poses,
                          relative_poses=rel)
