"""Click encoding: distance map, exact EDT, click placement."""

import numpy as np
import pytest

from depthclick.clicks import Click, click_distance_map, edt_binary, sample_click
from depthclick.errors import BoundsError, EmptyMaskError


def brute_force_distance_map(row, col, h, w):
    out = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            out[i, j] = np.hypot(i - row, j - col)
    return out


def brute_force_edt(mask):
    """O((HW)^2) scan: nearest background pixel, with the one-pixel virtual
    background ring just outside the border."""
    h, w = mask.shape
    bg = [(i, j) for i in range(-1, h + 1) for j in range(-1, w + 1)
          if i in (-1, h) or j in (-1, w) or not mask[i, j]]
    bg = np.array(bg, dtype=float)
    out = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            if mask[i, j]:
                d2 = (bg[:, 0] - i) ** 2 + (bg[:, 1] - j) ** 2
                out[i, j] = np.sqrt(d2.min())
    return out


def test_corner_click_345_triangle():
    raw = click_distance_map(Click(0, 0), 8, 8, normalize=False)
    assert raw[3, 4] == 5.0
    assert raw[0, 0] == 0.0


def test_distance_map_matches_brute_force_exactly():
    raw = click_distance_map(Click(1, 2), 4, 4, normalize=False)
    assert np.array_equal(raw, brute_force_distance_map(1, 2, 4, 4))


def test_distance_map_normalization():
    d = click_distance_map(Click(0, 0), 3, 4)
    assert d[2, 3] == pytest.approx(np.hypot(2, 3) / 5.0)
    assert d.min() == 0.0 and d[0, 0] == 0.0


def test_distance_map_depends_only_on_click_and_extent():
    a = click_distance_map(Click(2, 3), 6, 7)
    b = click_distance_map(Click(2, 3), 6, 7)
    assert np.array_equal(a, b)


def test_click_out_of_bounds():
    with pytest.raises(BoundsError):
        click_distance_map(Click(5, 0), 4, 4)


def test_edt_all_foreground_3x3_ring_convention():
    dist = edt_binary(np.ones((3, 3)))
    assert dist[1, 1] == 2.0
    assert dist[0, 0] == 1.0 and dist[2, 2] == 1.0


def test_edt_single_pixel():
    mask = np.zeros((5, 5))
    mask[2, 3] = 1
    dist = edt_binary(mask)
    assert dist[2, 3] == 1.0
    assert dist.sum() == 1.0


def test_edt_zero_exactly_off_foreground():
    rng = np.random.default_rng(2)
    mask = rng.random((12, 12)) > 0.6
    mask[4, 4] = True
    dist = edt_binary(mask)
    assert np.array_equal(dist > 0, mask)


def test_edt_matches_brute_force_on_random_masks():
    rng = np.random.default_rng(10)
    for _ in range(12):
        mask = rng.random((16, 16)) > rng.uniform(0.3, 0.7)
        if not mask.any():
            mask[3, 3] = True
        assert np.array_equal(edt_binary(mask), brute_force_edt(mask))


def test_edt_empty_mask_raises():
    with pytest.raises(EmptyMaskError):
        edt_binary(np.zeros((4, 4)))


def test_sample_click_single_pixel_both_modes():
    mask = np.zeros((6, 6))
    mask[4, 2] = 1
    assert sample_click(mask, "center") == Click(4, 2)
    assert sample_click(mask, "uniform", np.random.default_rng(0)) == Click(4, 2)


def test_sample_click_center_of_square():
    mask = np.zeros((9, 9))
    mask[2:7, 2:7] = 1  # 5x5 square centered at (4, 4)
    assert sample_click(mask, "center") == Click(4, 4)


def test_sample_click_even_square_lexicographic_tiebreak():
    mask = np.zeros((8, 8))
    mask[2:6, 2:6] = 1  # 4x4 square, four central pixels tie
    assert sample_click(mask, "center") == Click(3, 3)


def test_sample_click_uniform_deterministic_per_seed():
    rng_mask = np.random.default_rng(1)
    mask = rng_mask.random((10, 10)) > 0.5
    mask[0, 0] = True
    c1 = sample_click(mask, "uniform", np.random.default_rng(42))
    c2 = sample_click(mask, "uniform", np.random.default_rng(42))
    assert c1 == c2


def test_sample_click_always_on_foreground():
    rng = np.random.default_rng(3)
    for seed in range(20):
        mask = rng.random((14, 14)) > 0.7
        if not mask.any():
            mask[1, 1] = True
        c = sample_click(mask, "uniform", np.random.default_rng(seed))
        assert mask[c.row, c.col]
        c = sample_click(mask, "center")
        assert mask[c.row, c.col]
