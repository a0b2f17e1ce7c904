"""Scene specifications, procedural textures and random generation.

Twelve shape classes (one per primitive family) populate each scene. Textures
are correlated with the class id by default: surface appearance is then a
class-specific nuisance cue in RGB while depth stays purely geometric, which
is exactly the asymmetry the segmentation experiments probe.
"""

from __future__ import annotations

import colorsys
from dataclasses import dataclass, field

import numpy as np

from ..geometry import Pose
from .primitives import FAMILIES, bounding_radius

TEXTURES = ("stripes", "checker", "noise", "flat")

FAR_PLANE = 20.0
DEPTH_RANGE = (3.0, 11.0)
FLOOR_Y = 1.2


@dataclass
class ObjectSpec:
    class_id: int
    params: dict
    center: np.ndarray
    orient: np.ndarray
    base_color: np.ndarray
    texture: str
    texture_seed: int
    texture_scale: float

    @property
    def family(self) -> str:
        return FAMILIES[self.class_id]


@dataclass
class SceneSpec:
    objects: list[ObjectSpec] = field(default_factory=list)
    light_dir: np.ndarray = field(default_factory=lambda: np.array([0.3, -0.5, -0.8]))
    far: float = FAR_PLANE
    floor: bool = False
    floor_y: float = FLOOR_Y
    background_seed: int = 0
    ambient: float = 0.35


@dataclass
class SequenceSpec:
    scene: SceneSpec
    trajectory: list[Pose]
    stride: int = 3


def _hash01(ix, iy, iz, seed: int) -> np.ndarray:
    """Deterministic lattice hash to [0, 1)."""
    h = (ix.astype(np.uint64) * np.uint64(73856093)
         ^ iy.astype(np.uint64) * np.uint64(19349663)
         ^ iz.astype(np.uint64) * np.uint64(83492791)
         ^ np.uint64(seed * 2654435761 % (1 << 63)))
    h = (h ^ (h >> np.uint64(13))) * np.uint64(0x9E3779B97F4A7C15)
    h = h ^ (h >> np.uint64(31))
    return (h & np.uint64(0xFFFFFF)).astype(np.float64) / float(0xFFFFFF)


def _smoothstep(t):
    return t * t * (3.0 - 2.0 * t)


def value_noise(points: np.ndarray, seed: int) -> np.ndarray:
    """Trilinear 3-D value noise in [0, 1]."""
    base = np.floor(points)
    frac = _smoothstep(points - base)
    ix, iy, iz = (base[..., 0].astype(np.int64), base[..., 1].astype(np.int64),
                  base[..., 2].astype(np.int64))
    out = np.zeros(points.shape[:-1])
    for dx in (0, 1):
        for dy in (0, 1):
            for dz in (0, 1):
                corner = _hash01(ix + dx, iy + dy, iz + dz, seed)
                wx = frac[..., 0] if dx else 1.0 - frac[..., 0]
                wy = frac[..., 1] if dy else 1.0 - frac[..., 1]
                wz = frac[..., 2] if dz else 1.0 - frac[..., 2]
                out += corner * wx * wy * wz
    return out


def texture_pattern(points: np.ndarray, kind: str, seed: int, scale: float) -> np.ndarray:
    """Pattern value in [0, 1] at 3-D points (any leading shape)."""
    p = points / scale
    if kind == "flat":
        return np.full(points.shape[:-1], 0.5)
    if kind == "stripes":
        rng = np.random.default_rng(seed)
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        phase = rng.uniform(0, 2 * np.pi)
        return 0.5 + 0.5 * np.sin(2.0 * np.pi * (p @ direction) + phase)
    if kind == "checker":
        cells = np.floor(p).astype(np.int64)
        return ((cells[..., 0] + cells[..., 1] + cells[..., 2]) % 2).astype(np.float64)
    if kind == "noise":
        return value_noise(p, seed) * 0.65 + value_noise(p * 2.3 + 11.7, seed + 1) * 0.35
    raise ValueError(f"unknown texture kind: {kind}")


def class_hue(class_id: int) -> float:
    return (class_id * 0.618033988749895) % 1.0


def _color_from_hue(hue: float, sat: float, val: float) -> np.ndarray:
    return np.array(colorsys.hsv_to_rgb(hue % 1.0, sat, val))


def sample_params(family: str, rng: np.random.Generator, rho: float) -> dict:
    """Family parameters scaled to bounding radius ``rho``."""
    if family in ("sphere", "half_sphere"):
        raw = {"radius": 1.0}
    elif family == "box":
        h = rng.uniform(0.5, 1.0, size=3)
        raw = {"half": h}
    elif family == "rounded_box":
        h = rng.uniform(0.45, 0.9, size=3)
        raw = {"half": h, "corner": rng.uniform(0.15, 0.35)}
    elif family in ("cylinder", "prism3", "prism6"):
        raw = {"radius": rng.uniform(0.35, 0.75), "half_height": rng.uniform(0.5, 0.95)}
    elif family == "cone":
        raw = {"radius": rng.uniform(0.45, 0.85), "half_height": rng.uniform(0.5, 0.95)}
    elif family == "torus":
        minor = rng.uniform(0.18, 0.38)
        raw = {"major": rng.uniform(0.55, 0.8), "minor": minor}
    elif family == "capsule":
        raw = {"radius": rng.uniform(0.3, 0.5), "half_height": rng.uniform(0.35, 0.7)}
    elif family == "ellipsoid":
        raw = {"radii": rng.uniform(0.45, 1.0, size=3)}
    elif family == "pyramid":
        raw = {"half_base": rng.uniform(0.5, 0.9), "half_height": rng.uniform(0.5, 0.95)}
    else:
        raise ValueError(f"unknown family: {family}")
    factor = rho / bounding_radius(family, raw)
    scaled = {}
    for key, val in raw.items():
        scaled[key] = np.asarray(val) * factor if isinstance(val, np.ndarray) else val * factor
    return scaled


def _projected_circle_overlap(a, b) -> float:
    """Rough image-plane overlap ratio of two (u, v, radius) discs."""
    dist = np.hypot(a[0] - b[0], a[1] - b[1])
    r_small = min(a[2], b[2])
    if dist >= a[2] + b[2]:
        return 0.0
    return float(np.clip((a[2] + b[2] - dist) / (2 * r_small), 0.0, 1.0))


def random_object(rng: np.random.Generator, class_id: int,
                  texture_bias: float = 0.75) -> tuple[ObjectSpec, tuple]:
    """One random object plus its projected (u, v, radius) disc."""
    z = rng.uniform(*DEPTH_RANGE)
    frac = rng.uniform(0.07, 0.18)
    rho = frac * z
    du = rng.uniform(-0.3, 0.3)
    dv = rng.uniform(-0.28, 0.22)
    center = np.array([du * z, dv * z, z])
    params = sample_params(FAMILIES[class_id], rng, rho)
    orient = rng.normal(size=3)
    orient = orient / np.linalg.norm(orient) * rng.uniform(0.0, np.pi)
    if rng.random() < texture_bias:
        texture = TEXTURES[class_id % len(TEXTURES)]
        hue = class_hue(class_id) + rng.uniform(-0.04, 0.04)
    else:
        texture = TEXTURES[rng.integers(0, len(TEXTURES))]
        hue = rng.random()
    color = _color_from_hue(hue, rng.uniform(0.45, 0.85), rng.uniform(0.55, 0.95))
    spec = ObjectSpec(
        class_id=class_id,
        params=params,
        center=center,
        orient=orient,
        base_color=color,
        texture=texture,
        texture_seed=int(rng.integers(0, 2 ** 31)),
        texture_scale=rho * rng.uniform(0.5, 0.9),
    )
    return spec, (0.5 + du, 0.5 + dv, frac)


def random_scene(rng: np.random.Generator, class_ids, n_objects: int,
                 max_overlap: float = 0.5, floor: bool = False,
                 texture_bias: float = 0.75) -> SceneSpec:
    """Scene with ``n_objects`` objects drawn from ``class_ids``."""
    objects = []
    discs = []
    for _ in range(n_objects):
        class_id = int(rng.choice(np.asarray(class_ids)))
        for _attempt in range(20):
            spec, disc = random_object(rng, class_id, texture_bias)
            overlap = max((_projected_circle_overlap(disc, d) for d in discs), default=0.0)
            if overlap <= max_overlap:
                break
        objects.append(spec)
        discs.append(disc)
    light = rng.normal(size=3)
    light[2] = -abs(light[2]) - 0.5
    light /= np.linalg.norm(light)
    return SceneSpec(
        objects=objects,
        light_dir=light,
        floor=floor,
        background_seed=int(rng.integers(0, 2 ** 31)),
    )


def random_trajectory(rng: np.random.Generator, n_frames: int,
                      min_step: float = 0.035, max_step: float = 0.09) -> list[Pose]:
    """Smooth random camera walk with bounded per-frame motion."""
    vel = rng.normal(size=3)
    vel[2] *= 0.4  # favour lateral parallax
    vel = vel / np.linalg.norm(vel) * rng.uniform(min_step, max_step)
    pos = np.zeros(3)
    rot = np.zeros(3)
    poses = []
    for _ in range(n_frames):
        poses.append(Pose(rot.copy(), pos.copy()))
        nudge = rng.normal(0, 0.01, size=3)
        vel = vel + nudge
        speed = np.linalg.norm(vel)
        vel = vel / speed * np.clip(speed, min_step, max_step)
        pos = pos + vel
        rot = rot + rng.normal(0, 0.003, size=3)
        mag = np.linalg.norm(rot)
        if mag > 0.05:
            rot = rot / mag * 0.05
    return poses
