"""Click-guided segmentor training."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field

import numpy as np

from .. import autodiff as ad
from ..clicks import click_distance_map, sample_click
from ..config import ExperimentConfig, derive_seed
from ..errors import ConfigError
from ..manifest import DatasetManifest, write_json
from ..metrics import balanced_bce
from ..models import (FusedNetConfig, SegNetConfig, fused_forward, fused_init,
                      parameters, save_checkpoint, seg_forward, seg_init)
from .data import LoadedSample, build_inputs, load_split_samples, stream_channels
from .providers import attach_pseudo_depth
from .splits import SplitSpec

log = logging.getLogger(__name__)


@dataclass
class SegTrainResult:
    params: dict
    net_cfg: object
    model_meta: dict
    loss_history: list
    classes_trained_on: set
    config: ExperimentConfig
    split: SplitSpec


def _needs_depth(scenario: str) -> bool:
    return scenario in ("depth_only", "rgb_d")


def init_seg_model(cfg: ExperimentConfig, seed: int):
    rgb_ch, depth_ch = stream_channels(cfg.scenario)
    widths = tuple(cfg.model.widths)
    if cfg.dual_stream:
        net_cfg = FusedNetConfig(rgb_channels=rgb_ch, depth_channels=depth_ch,
                                 widths=widths)
        return net_cfg, fused_init(net_cfg, seed)
    net_cfg = SegNetConfig(in_channels=rgb_ch, widths=widths)
    return net_cfg, seg_init(net_cfg, seed)


def seg_model_forward(cfg: ExperimentConfig, net_cfg, params, inputs):
    if cfg.dual_stream:
        rgb_in, depth_in = inputs
        return fused_forward(net_cfg, params, rgb_in, depth_in)
    return seg_forward(net_cfg, params, inputs)


def _stack_inputs(cfg: ExperimentConfig, items: list):
    if cfg.dual_stream:
        rgb = np.stack([it[0] for it in items])
        dep = np.stack([it[1] for it in items])
        return rgb, dep
    return np.stack(items)


def train_segmentor(cfg: ExperimentConfig, manifest: DatasetManifest, root: str,
                    split: SplitSpec, out_dir: str | None = None) -> SegTrainResult:
    """Train on seen-class objects only, uniform-mode clicks, balanced BCE."""
    samples = load_split_samples(manifest, root, "train")
    if _needs_depth(cfg.scenario):
        attach_pseudo_depth(samples, cfg.provider, manifest.master_seed)
    seen = set(split.seen)
    records = [(si, ii) for si, s in enumerate(samples)
               for ii, (_m, cid) in enumerate(s.instances) if cid in seen]
    if not records:
        raise ConfigError("no seen-class objects available for training")

    net_cfg, params = init_seg_model(cfg, derive_seed(cfg.seed, "init"))
    plist = parameters(params)
    opt = ad.Adam(plist, lr=cfg.optim.lr, beta1=cfg.optim.beta1, beta2=cfg.optim.beta2)
    rng = np.random.default_rng(derive_seed(cfg.seed, "batches"))
    h, w = manifest.image_size
    loss_history = []
    classes_trained_on: set = set()

    for step in range(1, cfg.optim.iterations + 1):
        picks = rng.integers(0, len(records), size=cfg.optim.batch)
        inputs, masks = [], []
        for pick in picks:
            si, ii = records[int(pick)]
            sample = samples[si]
            mask, cid = sample.instances[ii]
            classes_trained_on.add(cid)
            click = sample_click(mask, "uniform", rng)
            cmap = click_distance_map(click, h, w)
            inputs.append(build_inputs(cfg.scenario, sample.rgb,
                                       sample.pseudo_depth, cmap))
            masks.append(mask)
        batch = _stack_inputs(cfg, inputs)
        with ad.Graph():
            logits = seg_model_forward(cfg, net_cfg, params, batch)
            prob = ad.sigmoid(logits)
            total = None
            for i, mask in enumerate(masks):
                item = balanced_bce(mask, ad.reshape(prob[i, 0], (h, w)))
                total = item if total is None else total + item
            loss = total * (1.0 / len(masks))
            ad.backward(loss)
        opt.step()
        opt.zero_grad()
        loss_history.append(float(loss.item()))
        if step % 200 == 0 or step == 1:
            log.info("seg step %d/%d loss %.4f", step, cfg.optim.iterations,
                     loss_history[-1])

    unseen_used = classes_trained_on - seen
    if unseen_used:
        raise ConfigError(f"training touched unseen classes: {sorted(unseen_used)}")

    model_meta = {
        "kind": "fused" if cfg.dual_stream else "seg",
        "scenario": cfg.scenario,
        "widths": list(cfg.model.widths),
        "stream_channels": list(stream_channels(cfg.scenario)),
        "split_seen": list(split.seen),
        "split_unseen": list(split.unseen),
        "seed": cfg.seed,
    }
    result = SegTrainResult(params=params, net_cfg=net_cfg, model_meta=model_meta,
                            loss_history=loss_history,
                            classes_trained_on=classes_trained_on,
                            config=cfg, split=split)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        save_checkpoint(os.path.join(out_dir, "segmentor.ckpt"), params, model_meta)
        write_json(os.path.join(out_dir, "loss_history.json"),
                   {"loss": loss_history})
    return result
