"""Dataset builds: render labelled samples to disk and emit the manifest."""

from __future__ import annotations

import os

import numpy as np

from ..config import SynthConfig, derive_seed
from ..errors import SceneError
from ..formats import write_pfm, write_pgm_mask, write_ppm
from ..geometry import CameraIntrinsics
from ..manifest import DatasetManifest, InstanceEntry, SampleEntry
from .render import Sample, render
from .scene import random_scene

MAX_SCENE_RETRIES = 50


def generate_sample(cfg: SynthConfig, split: str, index: int) -> Sample:
    """Deterministically generate one valid sample for (split, index)."""
    h, w = cfg.image_size
    min_pixels = cfg.min_object_fraction * h * w
    for attempt in range(MAX_SCENE_RETRIES):
        rng = np.random.default_rng(derive_seed(cfg.master_seed, split, index, attempt))
        n_objects = int(rng.integers(cfg.objects_min, cfg.objects_max + 1))
        scene = random_scene(rng, list(range(cfg.n_classes)), n_objects,
                             max_overlap=cfg.max_overlap, floor=cfg.floor,
                             texture_bias=cfg.texture_bias)
        sample = render(scene, h, w, CameraIntrinsics())
        if not sample.instances:
            continue
        if max(mask.sum() for mask, _ in sample.instances) >= min_pixels:
            return sample
    raise SceneError(f"could not generate a valid scene for {split}/{index}")


def build_dataset(cfg: SynthConfig, out_dir: str) -> DatasetManifest:
    """Render train/val samples to ``out_dir`` and write manifest.json.

    Fully reproducible: the same config and master seed produce byte-identical
    files and manifest.
    """
    splits = {}
    pixel_counts = {}
    for split, count in (("train", cfg.train_count), ("val", cfg.val_count)):
        entries = []
        counts = {cid: 0 for cid in range(cfg.n_classes)}
        os.makedirs(os.path.join(out_dir, split), exist_ok=True)
        for index in range(count):
            sample = generate_sample(cfg, split, index)
            stem = f"{split}/{index:06d}"
            rgb_rel = f"{stem}.rgb.ppm"
            depth_rel = f"{stem}.depth.pfm"
            write_ppm(os.path.join(out_dir, rgb_rel), sample.rgb)
            write_pfm(os.path.join(out_dir, depth_rel), sample.depth)
            instances = []
            for i, (mask, class_id) in enumerate(sample.instances):
                mask_rel = f"{stem}.mask{i:02d}.pgm"
                write_pgm_mask(os.path.join(out_dir, mask_rel), mask)
                instances.append(InstanceEntry(mask=mask_rel, class_id=class_id))
                counts[class_id] += int(mask.sum())
            entries.append(SampleEntry(id=stem, rgb=rgb_rel, depth=depth_rel,
                                       instances=instances))
        splits[split] = entries
        pixel_counts[split] = counts
    manifest = DatasetManifest(
        image_size=tuple(cfg.image_size),
        master_seed=cfg.master_seed,
        class_inventory=list(range(cfg.n_classes)),
        splits=splits,
        pixel_counts=pixel_counts,
    )
    manifest.save(os.path.join(out_dir, "manifest.json"))
    return manifest
