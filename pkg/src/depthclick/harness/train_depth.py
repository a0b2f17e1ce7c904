"""Joint depth + pose training on synthetic static-scene video."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np

from .. import autodiff as ad
from ..config import DepthTrainConfig, derive_seed
from ..errors import DegenerateBatchError
from ..geometry import CameraIntrinsics, substitute_intrinsics
from ..manifest import write_json
from ..models import (DepthNetConfig, PoseNetConfig, depth_forward, parameters,
                      pose_forward_batch, save_checkpoint)
from ..models import depth_init, pose_init
from ..photometric import PhotometricConfig, photometric_loss, smoothness_loss, warp
from ..synth import SequenceSpec, random_scene, random_trajectory, render_sequence

log = logging.getLogger(__name__)


@dataclass
class DepthTrainResult:
    depth_params: dict
    pose_params: dict
    depth_cfg: DepthNetConfig
    pose_cfg: PoseNetConfig
    loss_history: list            # dicts: total / photometric / smooth
    intrinsics: CameraIntrinsics


def generate_sequences(cfg: DepthTrainConfig, seed_tag: str = "sequences"):
    """Render the synthetic video corpus for this config."""
    sequences = []
    res = cfg.resolution
    for s in range(cfg.n_sequences):
        rng = np.random.default_rng(derive_seed(cfg.master_seed, seed_tag, s))
        scene = random_scene(rng, list(range(12)), int(rng.integers(2, 5)),
                             floor=True)
        trajectory = random_trajectory(rng, cfg.frames_per_sequence)
        spec = SequenceSpec(scene=scene, trajectory=trajectory, stride=cfg.stride)
        sequences.append(render_sequence(spec, res, res))
    return sequences


def _frame_pairs(sequences) -> list:
    """(sequence, target-frame, source-frame) indices; both temporal
    directions so motion statistics stay symmetric."""
    pairs = []
    for qi, seq in enumerate(sequences):
        for i in range(len(seq.frames) - 1):
            pairs.append((qi, i, i + 1))
            pairs.append((qi, i + 1, i))
    return pairs


def train_monodepth(cfg: DepthTrainConfig, sequences=None,
                    out_dir: str | None = None) -> DepthTrainResult:
    """Optimize the depth and pose networks with the photometric +
    edge-aware smoothness objective on consecutive kept frames."""
    if sequences is None:
        sequences = generate_sequences(cfg)
    pairs = _frame_pairs(sequences)
    if not pairs:
        raise DegenerateBatchError("no trainable frame pairs")

    dnet_cfg = DepthNetConfig(widths=tuple(cfg.depth_widths))
    pnet_cfg = PoseNetConfig(widths=tuple(cfg.pose_widths))
    dparams = depth_init(dnet_cfg, derive_seed(cfg.master_seed, "depth-init"))
    pparams = pose_init(pnet_cfg, derive_seed(cfg.master_seed, "pose-init"))
    plist = parameters(dparams) + parameters(pparams)
    opt = ad.Adam(plist, lr=cfg.optim.lr, beta1=cfg.optim.beta1, beta2=cfg.optim.beta2)

    K = substitute_intrinsics() if not cfg.intrinsics_known else CameraIntrinsics()
    pcfg = PhotometricConfig(alpha=cfg.alpha, smooth_weight=cfg.smooth_weight)
    rng = np.random.default_rng(derive_seed(cfg.master_seed, "depth-batches"))
    res = cfg.resolution
    history = []

    for step in range(1, cfg.optim.iterations + 1):
        picks = rng.integers(0, len(pairs), size=cfg.optim.batch)
        targets, sources = [], []
        for pick in picks:
            qi, ti, si = pairs[int(pick)]
            targets.append(sequences[qi].frames[ti].rgb.astype(np.float32))
            sources.append(sequences[qi].frames[si].rgb.astype(np.float32))
        t_batch = np.stack(targets)
        pair_batch = np.concatenate([t_batch, np.stack(sources)], axis=1)

        with ad.Graph():
            depth_maps = depth_forward(dnet_cfg, dparams, t_batch)
            poses = pose_forward_batch(pnet_cfg, pparams, pair_batch)
            photo_total = None
            smooth_total = None
            for i in range(len(picks)):
                depth_i = depth_maps[i, 0]
                target_i = ad.as_tensor(targets[i])
                warped, valid = warp(ad.as_tensor(sources[i]), depth_i,
                                     (poses[i, 0:3], poses[i, 3:6]), K)
                photo = photometric_loss(target_i, warped, valid, pcfg)
                smooth = smoothness_loss(depth_i, targets[i])
                photo_total = photo if photo_total is None else photo_total + photo
                smooth_total = smooth if smooth_total is None else smooth_total + smooth
            inv = 1.0 / len(picks)
            photo_mean = photo_total * inv
            smooth_mean = smooth_total * inv
            loss = photo_mean + pcfg.smooth_weight * smooth_mean
            ad.backward(loss)
        opt.step()
        opt.zero_grad()
        history.append({
            "total": float(loss.item()),
            "photometric": float(photo_mean.item()),
            "smooth": float(smooth_mean.item()),
        })
        if step % 100 == 0 or step == 1:
            log.info("depth step %d/%d photometric %.4f", step,
                     cfg.optim.iterations, history[-1]["photometric"])

    result = DepthTrainResult(depth_params=dparams, pose_params=pparams,
                              depth_cfg=dnet_cfg, pose_cfg=pnet_cfg,
                              loss_history=history, intrinsics=K)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        save_monodepth_checkpoint(os.path.join(out_dir, "monodepth.ckpt"), result, cfg)
        write_json(os.path.join(out_dir, "loss_history.json"), {"loss": history})
    return result


def save_monodepth_checkpoint(path: str, result: DepthTrainResult,
                              cfg: DepthTrainConfig) -> None:
    params = {}
    for name, tensor in result.depth_params.items():
        params[f"depth.{name}"] = tensor
    for name, tensor in result.pose_params.items():
        params[f"pose.{name}"] = tensor
    meta = {
        "kind": "monodepth",
        "depth_widths": list(cfg.depth_widths),
        "pose_widths": list(cfg.pose_widths),
        "resolution": cfg.resolution,
        "seed": cfg.master_seed,
    }
    save_checkpoint(path, params, meta)
