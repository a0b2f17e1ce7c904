"""Run configuration schemas. JSON documents with explicit defaults; unknown
keys are rejected so typos fail loudly. Every config round-trips losslessly
through to_dict / from_dict."""

from __future__ import annotations

import hashlib
from dataclasses import asdict, dataclass, field

from .errors import ConfigError
from .manifest import canonical_json, require_keys

SCENARIOS = ("rgb_only", "depth_only", "rgb_d", "rgb_rgb_control")
PROVIDERS = ("oracle_noisy", "trained_mono", "external")
CLICK_MODES = ("center", "uniform")


@dataclass
class OptimConfig:
    lr: float = 2e-4
    beta1: float = 0.9
    beta2: float = 0.999
    batch: int = 8
    iterations: int = 1000

    @staticmethod
    def from_dict(d: dict) -> "OptimConfig":
        require_keys(d, {"lr", "beta1", "beta2", "batch", "iterations"}, "optim")
        return OptimConfig(**{**asdict(OptimConfig()), **d})


@dataclass
class ProviderConfig:
    kind: str = "oracle_noisy"
    sigma: float = 0.1
    affine_jitter: float = 0.5
    checkpoint: str | None = None
    pattern: str | None = None

    def __post_init__(self):
        if self.kind not in PROVIDERS:
            raise ConfigError(f"unknown provider kind: {self.kind}")

    @staticmethod
    def from_dict(d: dict) -> "ProviderConfig":
        require_keys(d, {"kind", "sigma", "affine_jitter", "checkpoint", "pattern"},
                     "provider")
        return ProviderConfig(**{**asdict(ProviderConfig()), **d})


@dataclass
class SegModelConfig:
    widths: list[int] = field(default_factory=lambda: [16, 32, 64, 128])

    @staticmethod
    def from_dict(d: dict) -> "SegModelConfig":
        require_keys(d, {"widths"}, "model")
        return SegModelConfig(widths=[int(w) for w in d.get("widths", [16, 32, 64, 128])])


@dataclass
class ExperimentConfig:
    scenario: str = "rgb_only"
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    split_k: int = 4
    optim: OptimConfig = field(default_factory=OptimConfig)
    model: SegModelConfig = field(default_factory=SegModelConfig)
    seed: int = 0
    resolution: int = 64
    click_mode: str = "center"
    click_seeds: int = 3

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario: {self.scenario}")
        if self.click_mode not in CLICK_MODES:
            raise ConfigError(f"unknown click mode: {self.click_mode}")

    @property
    def dual_stream(self) -> bool:
        return self.scenario in ("rgb_d", "rgb_rgb_control")

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "provider": asdict(self.provider),
            "split_k": self.split_k,
            "optim": asdict(self.optim),
            "model": asdict(self.model),
            "seed": self.seed,
            "resolution": self.resolution,
            "click_mode": self.click_mode,
            "click_seeds": self.click_seeds,
        }

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        require_keys(d, {"scenario", "provider", "split_k", "optim", "model",
                         "seed", "resolution", "click_mode", "click_seeds"},
                     "experiment config")
        cfg = ExperimentConfig(
            scenario=d.get("scenario", "rgb_only"),
            provider=ProviderConfig.from_dict(d.get("provider", {})),
            split_k=int(d.get("split_k", 4)),
            optim=OptimConfig.from_dict(d.get("optim", {})),
            model=SegModelConfig.from_dict(d.get("model", {})),
            seed=int(d.get("seed", 0)),
            resolution=int(d.get("resolution", 64)),
            click_mode=d.get("click_mode", "center"),
            click_seeds=int(d.get("click_seeds", 3)),
        )
        return cfg


@dataclass
class SynthConfig:
    train_count: int = 64
    val_count: int = 32
    n_classes: int = 12
    image_size: list[int] = field(default_factory=lambda: [64, 64])
    master_seed: int = 0
    objects_min: int = 1
    objects_max: int = 4
    max_overlap: float = 0.5
    floor: bool = True
    texture_bias: float = 0.75
    min_object_fraction: float = 0.005

    @staticmethod
    def from_dict(d: dict) -> "SynthConfig":
        require_keys(d, set(asdict(SynthConfig())), "synth config")
        return SynthConfig(**{**asdict(SynthConfig()), **d})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class DepthTrainConfig:
    n_sequences: int = 8
    frames_per_sequence: int = 36
    stride: int = 3
    resolution: int = 64
    master_seed: int = 0
    optim: OptimConfig = field(default_factory=lambda: OptimConfig(batch=4, iterations=2000))
    depth_widths: list[int] = field(default_factory=lambda: [12, 24, 48, 96])
    pose_widths: list[int] = field(default_factory=lambda: [12, 24, 48, 96])
    alpha: float = 0.85
    smooth_weight: float = 1e-3
    intrinsics_known: bool = False

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(d: dict) -> "DepthTrainConfig":
        require_keys(d, set(asdict(DepthTrainConfig())), "depth train config")
        merged = {**asdict(DepthTrainConfig()), **d}
        merged["optim"] = OptimConfig.from_dict(d.get("optim", {}))
        return DepthTrainConfig(**merged)


@dataclass
class MatrixConfig:
    experiments: list[ExperimentConfig] = field(default_factory=list)
    seeds: list[int] = field(default_factory=lambda: [0])

    def to_dict(self) -> dict:
        return {"experiments": [e.to_dict() for e in self.experiments],
                "seeds": list(self.seeds)}

    @staticmethod
    def from_dict(d: dict) -> "MatrixConfig":
        require_keys(d, {"experiments", "seeds"}, "matrix config")
        return MatrixConfig(
            experiments=[ExperimentConfig.from_dict(e) for e in d.get("experiments", [])],
            seeds=[int(s) for s in d.get("seeds", [0])],
        )


def config_hash(obj_dict: dict) -> str:
    return hashlib.sha256(canonical_json(obj_dict).encode()).hexdigest()[:16]


def derive_seed(master: int, *parts) -> int:
    """Stable per-item seed derived from a master seed and context labels."""
    h = hashlib.sha256(repr((int(master),) + tuple(parts)).encode()).digest()
    return int.from_bytes(h[:8], "little") % (2 ** 63)
