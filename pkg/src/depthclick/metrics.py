"""Training loss and evaluation metrics.

``balanced_bce`` weighs foreground and background equally by normalizing each
class term with its pixel count, so small objects are not drowned out by the
background. ``delta_percent`` is the relative seen-to-unseen performance drop.
"""

from __future__ import annotations

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .errors import DegenerateMaskError, DegenerateMetricError

CLAMP_EPS = 1e-7


def balanced_bce(gt_mask: np.ndarray, pred) -> Tensor:
    """Class-balanced binary cross entropy.

    ``gt_mask`` is a binary {0,1} array; ``pred`` is a probability map (Tensor
    or array) in [0, 1]. Each class term is normalized by its own pixel count.
    Natural log; predictions are clamped to [eps, 1-eps].
    """
    gt = np.asarray(gt_mask, dtype=np.float64)
    n_fg = float(gt.sum())
    n_bg = float(gt.size - n_fg)
    if n_fg == 0 or n_bg == 0:
        raise DegenerateMaskError("balanced_bce requires foreground and background pixels")
    p = ad.clamp(ad.as_tensor(pred), CLAMP_EPS, 1.0 - CLAMP_EPS)
    gt = gt.astype(p.data.dtype)
    fg_term = ad.reduce_sum(ad.log(p) * gt) * (1.0 / n_fg)
    bg_term = ad.reduce_sum(ad.log(1.0 - p) * (1.0 - gt)) * (1.0 / n_bg)
    return -(fg_term + bg_term)


def iou(pred_binary: np.ndarray, gt_binary: np.ndarray) -> float:
    """Intersection over union of two binary masks. Ground truth must be nonempty."""
    pred = np.asarray(pred_binary) > 0.5
    gt = np.asarray(gt_binary) > 0.5
    if pred.shape != gt.shape:
        raise DegenerateMaskError(f"shape mismatch {pred.shape} vs {gt.shape}")
    if not gt.any():
        raise DegenerateMaskError("empty ground-truth mask")
    union = np.logical_or(pred, gt).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(pred, gt).sum() / union)


def delta_percent(iou_seen: float, iou_unseen: float) -> float:
    """Relative drop from seen to unseen performance, in percent."""
    if iou_seen == 0:
        raise DegenerateMetricError("delta_percent undefined for iou_seen == 0")
    return 100.0 * (iou_seen - iou_unseen) / iou_seen
