"""Ray intersection for the twelve parametric shape families.

All intersectors work in the object frame on batched rays: ``o`` is the ray
origin [3], ``d`` the (unnormalized) directions [..., 3]. They return the hit
parameter t ([...], inf on miss) and the outward surface normal [..., 3].
Ten families are solved in closed form; torus and rounded-box march their
exact signed distance functions.
"""

from __future__ import annotations

import numpy as np

FAMILIES = (
    "sphere", "box", "cylinder", "cone", "torus", "capsule",
    "ellipsoid", "pyramid", "prism3", "prism6", "half_sphere", "rounded_box",
)

_EPS = 1e-9
_MISS = np.inf


def _quadratic_roots(a, b, c):
    """Stable roots of a x^2 + b x + c; nan where there is no real root."""
    disc = b * b - 4.0 * a * c
    ok = (disc >= 0) & (np.abs(a) > _EPS)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        q = -0.5 * (b + np.sign(b + (b == 0)) * sq)
        t1 = np.where(ok, q / a, np.nan)
        t2 = np.where(ok, c / np.where(np.abs(q) > _EPS, q, np.nan), np.nan)
    lo = np.fmin(t1, t2)
    hi = np.fmax(t1, t2)
    return lo, hi


def _best(candidates):
    """Select the smallest positive candidate (t, normal) per ray."""
    ts = np.stack([c[0] for c in candidates], axis=0)
    ns = np.stack([c[1] for c in candidates], axis=0)
    ts = np.where(ts > _EPS, ts, _MISS)
    idx = np.argmin(ts, axis=0)
    t = np.take_along_axis(ts, idx[None], axis=0)[0]
    n = np.take_along_axis(ns, idx[None, ..., None], axis=0)[0]
    return t, n


def _const_normal(shape, n):
    out = np.empty(shape + (3,))
    out[...] = n
    return out


def _at(o, d, t):
    """Hit points for finite t (0 elsewhere; dead lanes are never read)."""
    return o + np.where(np.isfinite(t), t, 0.0)[..., None] * d


def intersect_sphere(o, d, radius):
    a = np.sum(d * d, axis=-1)
    b = 2.0 * np.sum(o * d, axis=-1)
    c = float(o @ o) - radius * radius
    lo, hi = _quadratic_roots(a, b, c)
    t = np.where(np.isnan(lo) | (np.fmax(lo, hi) <= _EPS), _MISS,
                 np.where(lo > _EPS, lo, hi))
    n = _at(o, d, t) / radius
    return t, n


def intersect_ellipsoid(o, d, radii):
    s = np.asarray(radii, dtype=float)
    ds = d / s
    os = o / s
    a = np.sum(ds * ds, axis=-1)
    b = 2.0 * np.sum(os * ds, axis=-1)
    c = float(os @ os) - 1.0
    lo, hi = _quadratic_roots(a, b, c)
    t = np.where(np.isnan(lo) | (np.fmax(lo, hi) <= _EPS), _MISS,
                 np.where(lo > _EPS, lo, hi))
    n = _at(o, d, t) / (s * s)
    norm = np.linalg.norm(n, axis=-1, keepdims=True)
    return t, n / np.where(norm > 0, norm, 1.0)


def _convex_planes(o, d, normals, offsets):
    """Entry hit of a convex solid given bounding planes n . p <= off."""
    shape = d.shape[:-1]
    t_lo = np.full(shape, -_MISS)
    t_hi = np.full(shape, _MISS)
    lo_idx = np.zeros(shape, dtype=np.intp)
    miss = np.zeros(shape, dtype=bool)
    for i, (n, off) in enumerate(zip(normals, offsets)):
        denom = d @ n
        num = off - float(o @ n)
        parallel = np.abs(denom) <= _EPS
        miss |= parallel & (num < 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            t_plane = num / denom
        entering = denom < -_EPS
        exiting = denom > _EPS
        better = entering & (t_plane > t_lo)
        lo_idx = np.where(better, i, lo_idx)
        t_lo = np.where(better, t_plane, t_lo)
        t_hi = np.where(exiting, np.minimum(t_hi, t_plane), t_hi)
    ok = ~miss & (t_lo <= t_hi) & (t_lo > _EPS)
    t = np.where(ok, t_lo, _MISS)
    n_out = np.asarray(normals)[lo_idx]
    return t, n_out


def _box_planes(half):
    hx, hy, hz = half
    normals = [np.array([1.0, 0, 0]), np.array([-1.0, 0, 0]),
               np.array([0, 1.0, 0]), np.array([0, -1.0, 0]),
               np.array([0, 0, 1.0]), np.array([0, 0, -1.0])]
    offsets = [hx, hx, hy, hy, hz, hz]
    return normals, offsets


def intersect_box(o, d, half):
    return _convex_planes(o, d, *_box_planes(half))


def intersect_pyramid(o, d, half_base, half_height):
    apex = np.array([0.0, 0.0, half_height])
    normals = [np.array([0.0, 0.0, -1.0])]
    offsets = [half_height]
    for sx, sy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        n = np.array([2.0 * half_height * sx, 2.0 * half_height * sy, half_base])
        n = n / np.linalg.norm(n)
        normals.append(n)
        offsets.append(float(n @ apex))
    return _convex_planes(o, d, normals, offsets)


def intersect_prism(o, d, radius, half_height, sides):
    apothem = radius * np.cos(np.pi / sides)
    normals = [np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0])]
    offsets = [half_height, half_height]
    for i in range(sides):
        ang = 2.0 * np.pi * i / sides
        normals.append(np.array([np.cos(ang), np.sin(ang), 0.0]))
        offsets.append(apothem)
    return _convex_planes(o, d, normals, offsets)


def _plane_cap(o, d, z_cap, z_normal, radius):
    dz = d[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (z_cap - o[2]) / dz
    p = o + t[..., None] * d
    ok = (np.abs(dz) > _EPS) & (t > _EPS) & \
         (p[..., 0] ** 2 + p[..., 1] ** 2 <= radius * radius)
    t = np.where(ok, t, _MISS)
    return t, _const_normal(t.shape, np.array([0.0, 0.0, z_normal]))


def intersect_cylinder(o, d, radius, half_height):
    a = d[..., 0] ** 2 + d[..., 1] ** 2
    b = 2.0 * (o[0] * d[..., 0] + o[1] * d[..., 1])
    c = o[0] ** 2 + o[1] ** 2 - radius * radius
    lo, hi = _quadratic_roots(a, b, c)
    candidates = []
    for root in (lo, hi):
        p = o + np.nan_to_num(root)[..., None] * d
        ok = ~np.isnan(root) & (root > _EPS) & (np.abs(p[..., 2]) <= half_height)
        t = np.where(ok, root, _MISS)
        n = np.concatenate([p[..., :2] / radius, np.zeros_like(p[..., :1])], axis=-1)
        candidates.append((t, n))
    candidates.append(_plane_cap(o, d, half_height, 1.0, radius))
    candidates.append(_plane_cap(o, d, -half_height, -1.0, radius))
    return _best(candidates)


def intersect_cone(o, d, radius, half_height):
    # apex at +hh, base disc of the given radius at -hh
    k = radius / (2.0 * half_height)
    ax = half_height - o[2]
    a = d[..., 0] ** 2 + d[..., 1] ** 2 - (k * d[..., 2]) ** 2
    b = 2.0 * (o[0] * d[..., 0] + o[1] * d[..., 1]) + 2.0 * k * k * d[..., 2] * ax
    c = o[0] ** 2 + o[1] ** 2 - (k * ax) ** 2
    lo, hi = _quadratic_roots(a, b, c)
    candidates = []
    for root in (lo, hi):
        p = o + np.nan_to_num(root)[..., None] * d
        ok = ~np.isnan(root) & (root > _EPS) & \
             (p[..., 2] >= -half_height) & (p[..., 2] <= half_height)
        t = np.where(ok, root, _MISS)
        n = np.stack([p[..., 0], p[..., 1], k * k * (half_height - p[..., 2])], axis=-1)
        norm = np.linalg.norm(n, axis=-1, keepdims=True)
        candidates.append((t, n / np.where(norm > 0, norm, 1.0)))
    candidates.append(_plane_cap(o, d, -half_height, -1.0, radius))
    return _best(candidates)


def intersect_capsule(o, d, radius, half_height):
    a = d[..., 0] ** 2 + d[..., 1] ** 2
    b = 2.0 * (o[0] * d[..., 0] + o[1] * d[..., 1])
    c = o[0] ** 2 + o[1] ** 2 - radius * radius
    lo, hi = _quadratic_roots(a, b, c)
    candidates = []
    for root in (lo, hi):
        p = o + np.nan_to_num(root)[..., None] * d
        ok = ~np.isnan(root) & (root > _EPS) & (np.abs(p[..., 2]) <= half_height)
        t = np.where(ok, root, _MISS)
        n = np.concatenate([p[..., :2] / radius, np.zeros_like(p[..., :1])], axis=-1)
        candidates.append((t, n))
    for zc in (half_height, -half_height):
        center = np.array([0.0, 0.0, zc])
        oc = o - center
        a_s = np.sum(d * d, axis=-1)
        b_s = 2.0 * np.sum(oc * d, axis=-1)
        c_s = float(oc @ oc) - radius * radius
        lo_s, hi_s = _quadratic_roots(a_s, b_s, c_s)
        for root in (lo_s, hi_s):
            p = o + np.nan_to_num(root)[..., None] * d
            beyond = p[..., 2] >= half_height if zc > 0 else p[..., 2] <= -half_height
            ok = ~np.isnan(root) & (root > _EPS) & beyond
            t = np.where(ok, root, _MISS)
            candidates.append((t, (p - center) / radius))
    return _best(candidates)


def intersect_half_sphere(o, d, radius):
    # dome over z >= 0 plus the flat disc at z = 0
    a = np.sum(d * d, axis=-1)
    b = 2.0 * np.sum(o * d, axis=-1)
    c = float(o @ o) - radius * radius
    lo, hi = _quadratic_roots(a, b, c)
    candidates = []
    for root in (lo, hi):
        p = o + np.nan_to_num(root)[..., None] * d
        ok = ~np.isnan(root) & (root > _EPS) & (p[..., 2] >= 0.0)
        t = np.where(ok, root, _MISS)
        candidates.append((t, p / radius))
    candidates.append(_plane_cap(o, d, 0.0, -1.0, radius))
    return _best(candidates)


def sdf_torus(p, major, minor):
    ring = np.sqrt(p[..., 0] ** 2 + p[..., 1] ** 2) - major
    return np.sqrt(ring * ring + p[..., 2] ** 2) - minor


def sdf_rounded_box(p, half, corner):
    q = np.abs(p) - np.asarray(half)
    outside = np.linalg.norm(np.maximum(q, 0.0), axis=-1)
    inside = np.minimum(np.max(q, axis=-1), 0.0)
    return outside + inside - corner


def _march(o, d, sdf, t_max=60.0, iters=192, tol=1e-7):
    """Sphere-trace an exact SDF; returns (t, normal) with t = ray parameter."""
    dn = np.linalg.norm(d, axis=-1)
    u = d / dn[..., None]
    s = np.zeros(d.shape[:-1])
    alive = np.ones(d.shape[:-1], dtype=bool)
    hit = np.zeros_like(alive)
    s_max = t_max * dn
    for _ in range(iters):
        if not alive.any():
            break
        p = o + s[..., None] * u
        dist = sdf(p)
        eps = tol * (1.0 + s)
        newly = alive & (dist < eps)
        hit |= newly
        alive &= ~newly
        s = np.where(alive, s + np.maximum(dist, 0.0), s)
        alive &= s < s_max
    t = np.where(hit & (s / dn > _EPS), s / dn, _MISS)
    # normals by central differences of the SDF
    p = o + s[..., None] * u
    h = 1e-5
    n = np.stack([
        sdf(p + np.array([h, 0, 0])) - sdf(p - np.array([h, 0, 0])),
        sdf(p + np.array([0, h, 0])) - sdf(p - np.array([0, h, 0])),
        sdf(p + np.array([0, 0, h])) - sdf(p - np.array([0, 0, h])),
    ], axis=-1)
    norm = np.linalg.norm(n, axis=-1, keepdims=True)
    return t, n / np.where(norm > 0, norm, 1.0)


def intersect_torus(o, d, major, minor):
    return _march(o, d, lambda p: sdf_torus(p, major, minor))


def intersect_rounded_box(o, d, half, corner):
    return _march(o, d, lambda p: sdf_rounded_box(p, half, corner))


def intersect(family: str, o: np.ndarray, d: np.ndarray, params: dict):
    if family == "sphere":
        return intersect_sphere(o, d, params["radius"])
    if family == "box":
        return intersect_box(o, d, params["half"])
    if family == "cylinder":
        return intersect_cylinder(o, d, params["radius"], params["half_height"])
    if family == "cone":
        return intersect_cone(o, d, params["radius"], params["half_height"])
    if family == "torus":
        return intersect_torus(o, d, params["major"], params["minor"])
    if family == "capsule":
        return intersect_capsule(o, d, params["radius"], params["half_height"])
    if family == "ellipsoid":
        return intersect_ellipsoid(o, d, params["radii"])
    if family == "pyramid":
        return intersect_pyramid(o, d, params["half_base"], params["half_height"])
    if family == "prism3":
        return intersect_prism(o, d, params["radius"], params["half_height"], 3)
    if family == "prism6":
        return intersect_prism(o, d, params["radius"], params["half_height"], 6)
    if family == "half_sphere":
        return intersect_half_sphere(o, d, params["radius"])
    if family == "rounded_box":
        return intersect_rounded_box(o, d, params["half"], params["corner"])
    raise ValueError(f"unknown family: {family}")


def bounding_radius(family: str, params: dict) -> float:
    if family == "sphere" or family == "half_sphere":
        return params["radius"]
    if family == "box":
        return float(np.linalg.norm(params["half"]))
    if family == "rounded_box":
        return float(np.linalg.norm(params["half"])) + params["corner"]
    if family in ("cylinder", "prism3", "prism6"):
        return float(np.hypot(params["radius"], params["half_height"]))
    if family == "cone":
        return float(np.hypot(params["radius"], params["half_height"]))
    if family == "torus":
        return params["major"] + params["minor"]
    if family == "capsule":
        return params["radius"] + params["half_height"]
    if family == "ellipsoid":
        return float(np.max(params["radii"]))
    if family == "pyramid":
        return float(np.sqrt(2 * params["half_base"] ** 2 + params["half_height"] ** 2))
    raise ValueError(f"unknown family: {family}")
