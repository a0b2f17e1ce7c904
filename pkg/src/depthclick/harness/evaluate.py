"""Per-object evaluation and report aggregation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .. import autodiff as ad
from ..clicks import Click, click_distance_map, sample_click
from ..config import ExperimentConfig, config_hash, derive_seed
from ..errors import ConfigError
from ..manifest import DatasetManifest
from ..metrics import delta_percent, iou
from ..models import load_checkpoint
from .data import build_inputs, load_split_samples
from .providers import attach_pseudo_depth
from .splits import SplitSpec
from .train_seg import _needs_depth, init_seg_model, seg_model_forward


@dataclass
class ObjectRecord:
    image_id: str
    instance_index: int
    class_id: int
    click: tuple
    iou: float            # connected-component filtered
    iou_raw: float        # unfiltered binary mask


@dataclass
class EvalReport:
    scenario: str
    provider_kind: str
    split_k: int
    seed: int
    click_mode: str
    iou_seen: float | None
    iou_unseen: float | None
    delta: float | None
    iou_seen_raw: float | None
    iou_unseen_raw: float | None
    per_class: dict
    per_object: list
    config_hash: str

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "provider": self.provider_kind,
            "split_k": self.split_k,
            "seed": self.seed,
            "click_mode": self.click_mode,
            "iou_seen": self.iou_seen,
            "iou_unseen": self.iou_unseen,
            "delta_percent": self.delta,
            "iou_seen_raw": self.iou_seen_raw,
            "iou_unseen_raw": self.iou_unseen_raw,
            "per_class": {str(k): v for k, v in sorted(self.per_class.items())},
            "per_object": [
                {
                    "image_id": r.image_id,
                    "instance_index": r.instance_index,
                    "class_id": r.class_id,
                    "click": list(r.click),
                    "iou": r.iou,
                    "iou_raw": r.iou_raw,
                }
                for r in self.per_object
            ],
            "config_hash": self.config_hash,
        }


def click_component(binary: np.ndarray, click: Click) -> np.ndarray:
    """Connected component of the prediction containing the click (4-neighbour);
    empty when the click pixel itself is background."""
    if not binary[click.row, click.col]:
        return np.zeros_like(binary)
    labels, _n = ndimage.label(binary)
    return labels == labels[click.row, click.col]


def predictor_from_params(cfg: ExperimentConfig, net_cfg, params):
    """Per-item probability map callable used by ``evaluate``."""

    def predict(inputs, _sample, _mask):
        if cfg.dual_stream:
            batch = (inputs[0][None], inputs[1][None])
        else:
            batch = inputs[None]
        logits = seg_model_forward(cfg, net_cfg, params, batch)
        return ad.sigmoid(logits).data[0, 0]

    return predict


def predictor_from_checkpoint(cfg: ExperimentConfig, path: str):
    params, meta = load_checkpoint(path)
    net_cfg, _fresh = init_seg_model(cfg, 0)
    expected = sorted(_fresh)
    if sorted(params) != expected:
        raise ConfigError("checkpoint parameters do not match the configured model")
    return predictor_from_params(cfg, net_cfg, params)


def evaluate(predict, cfg: ExperimentConfig, manifest: DatasetManifest, root: str,
             split: SplitSpec, click_mode: str | None = None) -> EvalReport:
    """Run ``predict(inputs, sample, mask) -> prob [H, W]`` over every val
    object; binarize at 0.5, keep the clicked component, aggregate IoUs."""
    click_mode = click_mode or cfg.click_mode
    samples = load_split_samples(manifest, root, "val")
    if _needs_depth(cfg.scenario):
        attach_pseudo_depth(samples, cfg.provider, manifest.master_seed)
    h, w = manifest.image_size
    records = []
    for sample in samples:
        for ii, (mask, cid) in enumerate(sample.instances):
            if click_mode == "center":
                clicks = [sample_click(mask, "center")]
            else:
                clicks = [
                    sample_click(mask, "uniform",
                                 np.random.default_rng(
                                     derive_seed(cfg.seed, "eval-click", sample.id, ii, s)))
                    for s in range(cfg.click_seeds)
                ]
            ious, ious_raw = [], []
            for click in clicks:
                cmap = click_distance_map(click, h, w)
                inputs = build_inputs(cfg.scenario, sample.rgb, sample.pseudo_depth, cmap)
                prob = predict(inputs, sample, mask)
                binary = prob > 0.5
                component = click_component(binary, click)
                ious.append(iou(component, mask))
                ious_raw.append(iou(binary, mask))
            records.append(ObjectRecord(
                image_id=sample.id, instance_index=ii, class_id=cid,
                click=(clicks[0].row, clicks[0].col),
                iou=float(np.mean(ious)), iou_raw=float(np.mean(ious_raw))))

    seen = set(split.seen)
    seen_recs = [r for r in records if r.class_id in seen]
    unseen_recs = [r for r in records if r.class_id not in seen]

    def group_mean(recs, attr):
        return float(np.mean([getattr(r, attr) for r in recs])) if recs else None

    iou_seen = group_mean(seen_recs, "iou")
    iou_unseen = group_mean(unseen_recs, "iou")
    delta = None
    if iou_seen is not None and iou_unseen is not None and iou_seen > 0:
        delta = delta_percent(iou_seen, iou_unseen)
    per_class = {}
    for cid in sorted({r.class_id for r in records}):
        per_class[cid] = group_mean([r for r in records if r.class_id == cid], "iou")
    return EvalReport(
        scenario=cfg.scenario,
        provider_kind=cfg.provider.kind,
        split_k=split.k,
        seed=cfg.seed,
        click_mode=click_mode,
        iou_seen=iou_seen,
        iou_unseen=iou_unseen,
        delta=delta,
        iou_seen_raw=group_mean(seen_recs, "iou_raw"),
        iou_unseen_raw=group_mean(unseen_recs, "iou_raw"),
        per_class=per_class,
        per_object=records,
        config_hash=config_hash(cfg.to_dict()),
    )
