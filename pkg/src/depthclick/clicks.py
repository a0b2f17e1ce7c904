"""Click simulation and encoding.

A click is a single pixel on the target object. It is presented to the
networks as a dense distance channel: every pixel holds its Euclidean
distance to the click, normalized by the image diagonal (raw mode available).
Deterministic click placement uses an exact Euclidean distance transform of
the object mask.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, EmptyMaskError

_INF = 1e20


@dataclass(frozen=True)
class Click:
    """0-based (row, col) pixel coordinate."""
    row: int
    col: int


def click_distance_map(click: Click, h: int, w: int, normalize: bool = True) -> np.ndarray:
    """Dense per-pixel Euclidean distance to the click.

    With ``normalize`` the map is divided by sqrt(H^2 + W^2) so it stays
    scale-comparable with [0, 1] image channels.
    """
    if not (0 <= click.row < h and 0 <= click.col < w):
        raise BoundsError(f"click ({click.row}, {click.col}) outside {h}x{w} image")
    rows = np.arange(h, dtype=np.float64)[:, None] - click.row
    cols = np.arange(w, dtype=np.float64)[None, :] - click.col
    raw = np.sqrt(rows * rows + cols * cols)
    if normalize:
        return raw / np.sqrt(h * h + w * w)
    return raw


def _dt1d(f: np.ndarray) -> np.ndarray:
    """1-D squared-distance transform by the lower envelope of parabolas."""
    n = f.shape[0]
    d = np.empty(n)
    v = np.empty(n, dtype=np.intp)
    z = np.empty(n + 1)
    k = 0
    v[0] = 0
    z[0] = -_INF
    z[1] = _INF
    for q in range(1, n):
        s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k])
        while s <= z[k]:
            k -= 1
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k])
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = _INF
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        d[q] = (q - v[k]) ** 2 + f[v[k]]
    return d


def _edt_squared(indicator: np.ndarray) -> np.ndarray:
    """Exact squared EDT of a float grid (0 at sources, INF elsewhere)."""
    work = indicator.astype(np.float64, copy=True)
    for i in range(work.shape[0]):
        work[i, :] = _dt1d(work[i, :])
    for j in range(work.shape[1]):
        work[:, j] = _dt1d(work[:, j])
    return work


def edt_binary(mask: np.ndarray) -> np.ndarray:
    """Exact Euclidean distance from each foreground pixel to the nearest
    background pixel.

    A virtual one-pixel background ring sits just outside the image border, so
    objects touching the border cannot claim unbounded interior distance.
    Background pixels map to 0.
    """
    mask = np.asarray(mask)
    fg = mask > 0.5
    if not fg.any():
        raise EmptyMaskError("mask has no foreground pixel")
    h, w = fg.shape
    padded = np.zeros((h + 2, w + 2), dtype=bool)
    padded[1:-1, 1:-1] = fg
    grid = np.where(padded, _INF, 0.0)
    dist = np.sqrt(_edt_squared(grid)[1:-1, 1:-1])
    dist[~fg] = 0.0
    return dist


def sample_click(mask: np.ndarray, mode: str = "center",
                 rng: np.random.Generator | None = None) -> Click:
    """Pick a click on the mask.

    ``uniform``: uniformly random foreground pixel from ``rng``.
    ``center``: argmax of the interior distance transform; ties broken by the
    smallest (row, col) in lexicographic order.
    """
    mask = np.asarray(mask)
    fg = mask > 0.5
    if not fg.any():
        raise EmptyMaskError("mask has no foreground pixel")
    if mode == "uniform":
        if rng is None:
            raise ValueError("uniform mode requires a random generator")
        flat = np.flatnonzero(fg)
        pick = int(flat[rng.integers(0, flat.size)])
        return Click(pick // mask.shape[1], pick % mask.shape[1])
    if mode == "center":
        dist = edt_binary(fg)
        pick = int(np.argmax(dist))  # row-major argmax = lexicographic tie-break
        return Click(pick // mask.shape[1], pick % mask.shape[1])
    raise ValueError(f"unknown click mode: {mode}")
