"""Dataset manifest: on-disk layout, strict parsing, recount validation."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, FormatError, IoError
from .formats import atomic_write_bytes, read_pgm_mask

MANIFEST_VERSION = 1


def canonical_json(obj) -> str:
    """Deterministic serialization used for every JSON artifact."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def write_json(path: str, obj) -> None:
    atomic_write_bytes(path, canonical_json(obj).encode())


def read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise IoError(str(exc), path=path) from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON in {path}: {exc}", offset=exc.pos) from exc


def require_keys(d: dict, allowed: set, context: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {context}: {sorted(unknown)}")


@dataclass
class InstanceEntry:
    mask: str
    class_id: int


@dataclass
class SampleEntry:
    id: str
    rgb: str
    depth: str
    instances: list[InstanceEntry]


@dataclass
class DatasetManifest:
    image_size: tuple[int, int]
    master_seed: int
    class_inventory: list[int]
    splits: dict[str, list[SampleEntry]]
    pixel_counts: dict[str, dict[int, int]]
    format_version: int = MANIFEST_VERSION

    def to_dict(self) -> dict:
        return {
            "format_version": self.format_version,
            "image_size": list(self.image_size),
            "master_seed": self.master_seed,
            "class_inventory": list(self.class_inventory),
            "splits": {
                split: [
                    {
                        "id": s.id,
                        "rgb": s.rgb,
                        "depth": s.depth,
                        "instances": [{"mask": i.mask, "class_id": i.class_id}
                                      for i in s.instances],
                    }
                    for s in entries
                ]
                for split, entries in self.splits.items()
            },
            "pixel_counts": {
                split: {str(cid): int(count) for cid, count in counts.items()}
                for split, counts in self.pixel_counts.items()
            },
        }

    @staticmethod
    def from_dict(data: dict) -> "DatasetManifest":
        require_keys(data, {"format_version", "image_size", "master_seed",
                            "class_inventory", "splits", "pixel_counts"}, "manifest")
        version = data.get("format_version")
        if version != MANIFEST_VERSION:
            raise ConfigError(f"unrecognized manifest version: {version}")
        splits = {}
        for split, entries in data["splits"].items():
            parsed = []
            for entry in entries:
                require_keys(entry, {"id", "rgb", "depth", "instances"},
                             f"manifest sample in {split}")
                instances = []
                for inst in entry["instances"]:
                    require_keys(inst, {"mask", "class_id"}, "manifest instance")
                    instances.append(InstanceEntry(inst["mask"], int(inst["class_id"])))
                parsed.append(SampleEntry(entry["id"], entry["rgb"], entry["depth"],
                                          instances))
            splits[split] = parsed
        counts = {
            split: {int(cid): int(n) for cid, n in c.items()}
            for split, c in data["pixel_counts"].items()
        }
        return DatasetManifest(
            image_size=tuple(data["image_size"]),
            master_seed=int(data["master_seed"]),
            class_inventory=[int(c) for c in data["class_inventory"]],
            splits=splits,
            pixel_counts=counts,
        )

    def save(self, path: str) -> None:
        write_json(path, self.to_dict())

    @staticmethod
    def load(path: str) -> "DatasetManifest":
        return DatasetManifest.from_dict(read_json(path))


def recount_pixels(manifest: DatasetManifest, root: str) -> dict[str, dict[int, int]]:
    """Recompute per-class pixel totals from the mask files on disk."""
    out = {}
    for split, entries in manifest.splits.items():
        counts: dict[int, int] = {cid: 0 for cid in manifest.class_inventory}
        for entry in entries:
            for inst in entry.instances:
                mask = read_pgm_mask(os.path.join(root, inst.mask))
                counts[inst.class_id] = counts.get(inst.class_id, 0) + int(mask.sum())
        out[split] = counts
    return out


def validate_manifest(manifest: DatasetManifest, root: str, recount: bool = True) -> None:
    """Every referenced file must exist; pixel totals must match a recount."""
    for split, entries in manifest.splits.items():
        for entry in entries:
            for rel in [entry.rgb, entry.depth] + [i.mask for i in entry.instances]:
                path = os.path.join(root, rel)
                if not os.path.isfile(path):
                    raise IoError("manifest references missing file", path=path)
    if recount:
        actual = recount_pixels(manifest, root)
        for split, counts in actual.items():
            declared = manifest.pixel_counts.get(split, {})
            for cid, n in counts.items():
                if declared.get(cid, 0) != n:
                    raise ConfigError(
                        f"pixel count mismatch for class {cid} in {split}: "
                        f"manifest says {declared.get(cid, 0)}, recount gives {n}")
