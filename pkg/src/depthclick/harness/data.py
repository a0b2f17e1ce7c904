"""Manifest-backed sample loading and network input assembly."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from ..config import ExperimentConfig
from ..formats import read_pfm, read_pgm_mask, read_ppm
from ..manifest import DatasetManifest, SampleEntry


@dataclass
class LoadedSample:
    id: str
    rgb: np.ndarray                  # [3, H, W]
    depth_gt: np.ndarray             # [H, W]
    instances: list                  # [(mask bool [H,W], class_id)]
    pseudo_depth: np.ndarray | None = None


def load_sample(root: str, entry: SampleEntry) -> LoadedSample:
    rgb = read_ppm(os.path.join(root, entry.rgb))
    depth = read_pfm(os.path.join(root, entry.depth))
    instances = [(read_pgm_mask(os.path.join(root, inst.mask)) > 0.5, inst.class_id)
                 for inst in entry.instances]
    return LoadedSample(id=entry.id, rgb=rgb, depth_gt=depth, instances=instances)


def load_split_samples(manifest: DatasetManifest, root: str, split: str) -> list:
    return [load_sample(root, entry) for entry in manifest.splits[split]]


def build_inputs(scenario: str, rgb: np.ndarray, pseudo_depth: np.ndarray | None,
                 click_map: np.ndarray, dtype=np.float32):
    """Network input(s) for one item.

    Single-stream scenarios return one [Cin, H, W] array; dual-stream ones a
    (rgb_stream, depth_stream) pair. The click channel is concatenated to each
    stream.
    """
    click = click_map[None].astype(dtype)
    if scenario == "rgb_only":
        return np.concatenate([rgb.astype(dtype), click], axis=0)
    if scenario == "depth_only":
        return np.concatenate([pseudo_depth[None].astype(dtype), click], axis=0)
    if scenario == "rgb_d":
        return (np.concatenate([rgb.astype(dtype), click], axis=0),
                np.concatenate([pseudo_depth[None].astype(dtype), click], axis=0))
    if scenario == "rgb_rgb_control":
        stream = np.concatenate([rgb.astype(dtype), click], axis=0)
        return (stream, stream.copy())
    raise ValueError(f"unknown scenario: {scenario}")


def stream_channels(scenario: str) -> tuple:
    """(rgb_stream, depth_stream) channel counts; depth stream 0 if unused."""
    return {
        "rgb_only": (4, 0),
        "depth_only": (2, 0),
        "rgb_d": (4, 2),
        "rgb_rgb_control": (4, 4),
    }[scenario]
