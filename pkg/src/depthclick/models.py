"""From-scratch networks: single-stream segmentor, dual-stream fused segmentor
with channel+spatial squeeze-excitation, and the depth / pose pair for
self-supervised depth training.

All nets share the same body: four stages, each a 3x3 conv + relu followed by
2x2 average-pool downsampling and a second 3x3 conv + relu. No normalization
layers, so forward passes are bitwise deterministic. Parameters live in flat
name->Tensor dicts initialized Kaiming-uniform (fan-in) from a seeded
generator.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .errors import FormatError, ShapeError
from .formats import atomic_write_bytes, _read_file

CHECKPOINT_MAGIC = b"DCP1"
CHECKPOINT_VERSION = 1


@dataclass
class SegNetConfig:
    in_channels: int = 4
    widths: tuple = (16, 32, 64, 128)


@dataclass
class FusedNetConfig:
    rgb_channels: int = 4
    depth_channels: int = 2
    widths: tuple = (16, 32, 64, 128)


@dataclass
class DepthNetConfig:
    in_channels: int = 3
    widths: tuple = (12, 24, 48, 96)
    disp_min: float = 0.01
    disp_max: float = 10.0


@dataclass
class PoseNetConfig:
    widths: tuple = (12, 24, 48, 96)
    output_scale: float = 0.01


def _kaiming_conv(rng: np.random.Generator, f: int, c: int, k: int, dtype) -> Tensor:
    fan_in = c * k * k
    bound = np.sqrt(6.0 / fan_in)
    w = rng.uniform(-bound, bound, size=(f, c, k, k)).astype(dtype)
    return Tensor(w, requires_grad=True)


def _zero_bias(f: int, dtype) -> Tensor:
    return Tensor(np.zeros(f, dtype=dtype), requires_grad=True)


def _add_conv(params: dict, rng, name: str, f: int, c: int, k: int, dtype) -> None:
    params[f"{name}.w"] = _kaiming_conv(rng, f, c, k, dtype)
    params[f"{name}.b"] = _zero_bias(f, dtype)


def _conv(params: dict, name: str, x: Tensor, pad: int) -> Tensor:
    return ad.conv2d(x, params[f"{name}.w"], params[f"{name}.b"], stride=1, pad=pad)


def _stage(params: dict, prefix: str, x: Tensor) -> Tensor:
    """conv3x3 + relu, 2x2 avg-pool, conv3x3 + relu: halves the extent."""
    x = ad.relu(_conv(params, f"{prefix}.a", x, pad=1))
    x = ad.avg_pool2d(x, 2, 2)
    return ad.relu(_conv(params, f"{prefix}.b", x, pad=1))


def _init_encoder(params: dict, rng, prefix: str, in_channels: int, widths, dtype):
    c = in_channels
    for i, w in enumerate(widths, start=1):
        _add_conv(params, rng, f"{prefix}enc{i}.a", w, c, 3, dtype)
        _add_conv(params, rng, f"{prefix}enc{i}.b", w, w, 3, dtype)
        c = w


def _init_decoder(params: dict, rng, widths, dtype):
    for i in (3, 2, 1):
        _add_conv(params, rng, f"dec{i}", widths[i - 1], widths[i] + widths[i - 1], 3, dtype)
    _add_conv(params, rng, "head.pre", widths[0], widths[0], 3, dtype)
    _add_conv(params, rng, "head.out", 1, widths[0], 1, dtype)


def _run_decoder(params: dict, skips: list) -> Tensor:
    x = skips[3]
    for i in (3, 2, 1):
        x = ad.upsample_bilinear(x, 2)
        x = ad.concat([x, skips[i - 1]], axis=1)
        x = ad.relu(_conv(params, f"dec{i}", x, pad=1))
    x = ad.upsample_bilinear(x, 2)
    x = ad.relu(_conv(params, "head.pre", x, pad=1))
    return _conv(params, "head.out", x, pad=0)


# single-stream segmentor

def seg_init(cfg: SegNetConfig, seed: int, dtype=np.float32) -> dict:
    rng = np.random.default_rng(seed)
    params: dict = {}
    _init_encoder(params, rng, "", cfg.in_channels, cfg.widths, dtype)
    _init_decoder(params, rng, cfg.widths, dtype)
    return params


def seg_encoder_features(cfg: SegNetConfig, params: dict, x: Tensor) -> list:
    if x.shape[1] != cfg.in_channels:
        raise ShapeError(f"expected {cfg.in_channels} input channels, got {x.shape[1]}")
    feats = []
    cur = x
    for i in range(1, 5):
        cur = _stage(params, f"enc{i}", cur)
        feats.append(cur)
    return feats


def seg_forward(cfg: SegNetConfig, params: dict, x) -> Tensor:
    """Logit map [N, 1, H, W] for input [N, Cin, H, W]."""
    x = ad.as_tensor(x)
    return _run_decoder(params, seg_encoder_features(cfg, params, x))


# dual-stream segmentor with cross-exchange and SE rectification

def fused_init(cfg: FusedNetConfig, seed: int, dtype=np.float32) -> dict:
    rng = np.random.default_rng(seed)
    params: dict = {}
    _init_encoder(params, rng, "rgb.", cfg.rgb_channels, cfg.widths, dtype)
    _init_encoder(params, rng, "depth.", cfg.depth_channels, cfg.widths, dtype)
    for i, w in enumerate(cfg.widths, start=1):
        _add_conv(params, rng, f"xchg{i}.d2r", w, w, 1, dtype)
        _add_conv(params, rng, f"xchg{i}.r2d", w, w, 1, dtype)
        _add_conv(params, rng, f"fuse{i}.merge", w, 2 * w, 1, dtype)
        hidden = max(w // 4, 4)
        _add_conv(params, rng, f"fuse{i}.se_reduce", hidden, w, 1, dtype)
        _add_conv(params, rng, f"fuse{i}.se_expand", w, hidden, 1, dtype)
        _add_conv(params, rng, f"fuse{i}.spatial", 1, w, 1, dtype)
    _init_decoder(params, rng, cfg.widths, dtype)
    return params


def _se_rectify(params: dict, prefix: str, fused: Tensor) -> Tensor:
    # channel-wise squeeze-excitation, then spatial
    pooled = ad.reduce_mean(fused, axes=(2, 3), keepdims=True)
    gate = ad.relu(_conv(params, f"{prefix}.se_reduce", pooled, pad=0))
    gate = ad.sigmoid(_conv(params, f"{prefix}.se_expand", gate, pad=0))
    fused = fused * gate
    spatial = ad.sigmoid(_conv(params, f"{prefix}.spatial", fused, pad=0))
    return fused * spatial


def fused_encoder_features(cfg: FusedNetConfig, params: dict, rgb_in: Tensor,
                           depth_in: Tensor):
    """Per-stage (rgb, depth, fused) features after exchange and SE fusion."""
    if rgb_in.shape[1] != cfg.rgb_channels or depth_in.shape[1] != cfg.depth_channels:
        raise ShapeError("stream channel counts do not match the fused config")
    if rgb_in.shape[2:] != depth_in.shape[2:]:
        raise ShapeError("stream spatial extents differ")
    rgb_feats, depth_feats, fused_feats = [], [], []
    r, d = rgb_in, depth_in
    for i in range(1, 5):
        r = _stage(params, f"rgb.enc{i}", r)
        d = _stage(params, f"depth.enc{i}", d)
        # each stream receives a gated view of the other before the next stage
        r_x = r + _conv(params, f"xchg{i}.d2r", d, pad=0)
        d_x = d + _conv(params, f"xchg{i}.r2d", r, pad=0)
        fused = ad.relu(_conv(params, f"fuse{i}.merge",
                              ad.concat([r_x, d_x], axis=1), pad=0))
        fused = _se_rectify(params, f"fuse{i}", fused)
        rgb_feats.append(r_x)
        depth_feats.append(d_x)
        fused_feats.append(fused)
        r, d = r_x, d_x
    return rgb_feats, depth_feats, fused_feats


def fused_forward(cfg: FusedNetConfig, params: dict, rgb_in, depth_in) -> Tensor:
    rgb_in = ad.as_tensor(rgb_in)
    depth_in = ad.as_tensor(depth_in)
    _r, _d, fused = fused_encoder_features(cfg, params, rgb_in, depth_in)
    return _run_decoder(params, fused)


# depth network

def depth_init(cfg: DepthNetConfig, seed: int, dtype=np.float32) -> dict:
    rng = np.random.default_rng(seed)
    params: dict = {}
    _init_encoder(params, rng, "", cfg.in_channels, cfg.widths, dtype)
    _init_decoder(params, rng, cfg.widths, dtype)
    return params


def depth_forward(cfg: DepthNetConfig, params: dict, images) -> Tensor:
    """Depth map [N, 1, H, W] = 1 / disparity, disparity in (disp_min, disp_max)."""
    images = ad.as_tensor(images)
    seg_cfg = SegNetConfig(in_channels=cfg.in_channels, widths=cfg.widths)
    logits = seg_forward(seg_cfg, params, images)
    disp = cfg.disp_min + (cfg.disp_max - cfg.disp_min) * ad.sigmoid(logits)
    return 1.0 / disp


def depth_forward_single(cfg: DepthNetConfig, params: dict, image) -> Tensor:
    """Convenience [3, H, W] -> [H, W]."""
    image = ad.as_tensor(image)
    c, h, w = image.shape
    out = depth_forward(cfg, params, ad.reshape(image, (1, c, h, w)))
    return ad.reshape(out, (h, w))


# pose network

def pose_init(cfg: PoseNetConfig, seed: int, dtype=np.float32) -> dict:
    rng = np.random.default_rng(seed)
    params: dict = {}
    _init_encoder(params, rng, "", 6, cfg.widths, dtype)
    _add_conv(params, rng, "head", 6, cfg.widths[-1], 1, dtype)
    return params


def pose_forward_batch(cfg: PoseNetConfig, params: dict, pairs) -> Tensor:
    """Six pose parameters [N, 6] = (axis-angle r, translation t) for
    concatenated frame pairs [N, 6, H, W]. Output is scaled small so training
    starts near the identity transform."""
    x = ad.as_tensor(pairs)
    if x.shape[1] != 6:
        raise ShapeError("pose net expects two stacked 3-channel frames")
    for i in range(1, 5):
        x = _stage(params, f"enc{i}", x)
    x = _conv(params, "head", x, pad=0)
    pooled = ad.reduce_mean(x, axes=(2, 3))
    return pooled * cfg.output_scale


def pose_forward(cfg: PoseNetConfig, params: dict, frame_t, frame_s):
    """(rotation [3], translation [3]) for one frame pair [3, H, W] each."""
    frame_t = ad.as_tensor(frame_t)
    frame_s = ad.as_tensor(frame_s)
    c, h, w = frame_t.shape
    pair = ad.concat([ad.reshape(frame_t, (1, c, h, w)),
                      ad.reshape(frame_s, (1, c, h, w))], axis=1)
    out = pose_forward_batch(cfg, params, pair)
    return out[0, 0:3], out[0, 3:6]


def param_count(params: dict) -> int:
    return sum(int(np.prod(p.shape)) for p in params.values())


def parameters(params: dict) -> list:
    """Deterministic (name-sorted) parameter list for the optimizer."""
    return [params[name] for name in sorted(params)]


# checkpoint serialization

def save_checkpoint(path: str, params: dict, meta: dict | None = None) -> None:
    """Binary layout: magic, version, meta JSON, then name-sorted shape-tagged
    float32 tensors, all little-endian."""
    meta_blob = json.dumps(meta or {}, sort_keys=True).encode()
    out = [CHECKPOINT_MAGIC, struct.pack("<II", CHECKPOINT_VERSION, len(meta_blob)),
           meta_blob, struct.pack("<I", len(params))]
    for name in sorted(params):
        tensor = params[name]
        data = np.ascontiguousarray(tensor.data, dtype="<f4")
        name_b = name.encode()
        out.append(struct.pack("<H", len(name_b)))
        out.append(name_b)
        out.append(struct.pack("<B", data.ndim))
        out.append(struct.pack(f"<{data.ndim}I", *data.shape))
        out.append(data.tobytes())
    atomic_write_bytes(path, b"".join(out))


def load_checkpoint(path: str, requires_grad: bool = False) -> tuple[dict, dict]:
    """Returns (params dict of float32 Tensors, meta dict)."""
    blob = _read_file(path)
    if blob[:4] != CHECKPOINT_MAGIC:
        raise FormatError("bad checkpoint magic", offset=0)
    pos = 4
    version, meta_len = struct.unpack_from("<II", blob, pos)
    pos += 8
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"unsupported checkpoint version {version}", offset=4)
    try:
        meta = json.loads(blob[pos:pos + meta_len].decode())
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise FormatError("corrupt checkpoint metadata", offset=pos) from None
    pos += meta_len
    (count,) = struct.unpack_from("<I", blob, pos)
    pos += 4
    params = {}
    for _ in range(count):
        if pos + 2 > len(blob):
            raise FormatError("truncated checkpoint", offset=pos)
        (name_len,) = struct.unpack_from("<H", blob, pos)
        pos += 2
        name = blob[pos:pos + name_len].decode()
        pos += name_len
        (ndim,) = struct.unpack_from("<B", blob, pos)
        pos += 1
        shape = struct.unpack_from(f"<{ndim}I", blob, pos)
        pos += 4 * ndim
        size = int(np.prod(shape)) if ndim else 1
        end = pos + 4 * size
        if end > len(blob):
            raise FormatError("truncated checkpoint payload", offset=pos)
        data = np.frombuffer(blob[pos:end], dtype="<f4").reshape(shape).copy()
        pos = end
        params[name] = Tensor(data, requires_grad=requires_grad)
    if pos != len(blob):
        raise FormatError("trailing bytes after checkpoint payload", offset=pos)
    return params, meta
