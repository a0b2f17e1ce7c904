"""Pseudo-depth providers.

``oracle_noisy`` stands in for zero-shot relative-depth networks: it keeps
object boundaries (smooth multiplicative noise) while destroying metric scale
(random monotone affine jitter). ``trained_mono`` runs a self-supervised depth
checkpoint; ``external`` reads precomputed PFM maps. Every provider output is
affine-normalized per image to [0, 1].
"""

from __future__ import annotations

import warnings

import numpy as np

from ..config import ProviderConfig, derive_seed
from ..errors import ConfigError, NumericWarning
from ..models import DepthNetConfig, depth_forward_single, load_checkpoint
from .data import LoadedSample


def normalize_depth(raw: np.ndarray) -> np.ndarray:
    lo = float(raw.min())
    hi = float(raw.max())
    if hi - lo <= 0:
        warnings.warn("constant depth map; returning flat 0.5", NumericWarning,
                      stacklevel=2)
        return np.full_like(raw, 0.5)
    return (raw - lo) / (hi - lo)


def resize_bilinear(arr: np.ndarray, h: int, w: int) -> np.ndarray:
    """Plain numpy bilinear resize with corner alignment."""
    hs, ws = arr.shape
    rows = np.linspace(0, hs - 1, h)
    cols = np.linspace(0, ws - 1, w)
    r0 = np.floor(rows).astype(int)
    c0 = np.floor(cols).astype(int)
    r1 = np.minimum(r0 + 1, hs - 1)
    c1 = np.minimum(c0 + 1, ws - 1)
    fr = (rows - r0)[:, None]
    fc = (cols - c0)[None, :]
    top = arr[np.ix_(r0, c0)] * (1 - fc) + arr[np.ix_(r0, c1)] * fc
    bot = arr[np.ix_(r1, c0)] * (1 - fc) + arr[np.ix_(r1, c1)] * fc
    return top * (1 - fr) + bot * fr


def oracle_noisy_depth(gt_depth: np.ndarray, sigma: float, affine_jitter: float,
                       rng: np.random.Generator) -> np.ndarray:
    """GT depth degraded by a band-limited multiplicative field and a random
    monotone affine map, then normalized."""
    h, w = gt_depth.shape
    coarse = rng.normal(size=(5, 5))
    field = resize_bilinear(coarse, h, w)
    std = field.std()
    if std > 0 and sigma > 0:
        field = field / std * sigma
    else:
        field = np.zeros_like(field)
    raw = gt_depth * np.exp(field)
    scale = float(np.exp(rng.uniform(-affine_jitter, affine_jitter)))
    offset = float(rng.uniform(-affine_jitter, affine_jitter))
    return normalize_depth(scale * raw + offset)


class _MonoModel:
    def __init__(self, checkpoint: str):
        params, meta = load_checkpoint(checkpoint)
        widths = tuple(meta.get("depth_widths", (12, 24, 48, 96)))
        self.cfg = DepthNetConfig(widths=widths)
        self.params = {name[len("depth."):]: t for name, t in params.items()
                       if name.startswith("depth.")}
        if not self.params:
            raise ConfigError(f"checkpoint {checkpoint} carries no depth network")


_mono_cache: dict = {}


def provide_depth(provider: ProviderConfig, sample: LoadedSample,
                  master_seed: int = 0) -> np.ndarray:
    """Pseudo-depth map in [0, 1] for one sample."""
    if provider.kind == "oracle_noisy":
        rng = np.random.default_rng(derive_seed(master_seed, "oracle", sample.id))
        return oracle_noisy_depth(sample.depth_gt, provider.sigma,
                                  provider.affine_jitter, rng)
    if provider.kind == "trained_mono":
        if not provider.checkpoint:
            raise ConfigError("trained_mono provider requires a checkpoint path")
        model = _mono_cache.get(provider.checkpoint)
        if model is None:
            model = _MonoModel(provider.checkpoint)
            _mono_cache[provider.checkpoint] = model
        pred = depth_forward_single(model.cfg, model.params,
                                    sample.rgb.astype(np.float32))
        return normalize_depth(pred.data.astype(np.float64))
    if provider.kind == "external":
        if not provider.pattern:
            raise ConfigError("external provider requires a file pattern")
        from ..formats import read_pfm
        path = provider.pattern.format(id=sample.id.replace("/", "_"))
        return normalize_depth(read_pfm(path))
    raise ConfigError(f"unknown provider kind: {provider.kind}")


def attach_pseudo_depth(samples: list, provider: ProviderConfig,
                        master_seed: int = 0) -> None:
    for sample in samples:
        sample.pseudo_depth = provide_depth(provider, sample, master_seed)
