"""Spatial operations: convolution, pooling, resizing and bilinear sampling.

Layout convention is NCHW. Convolution is cross-correlation with symmetric
zero padding; the im2col view is materialized lazily so forward passes stay
BLAS-bound.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ShapeError
from .core import Tensor, as_tensor, record


def _conv_out_extent(extent: int, k: int, stride: int, pad: int) -> int:
    span = extent + 2 * pad - k
    if span < 0 or span % stride != 0:
        raise ShapeError(
            f"conv output extent not integral: (({extent} + 2*{pad} - {k}) / {stride}) + 1")
    return span // stride + 1


def conv2d(x, weight, bias=None, stride: int = 1, pad: int = 0) -> Tensor:
    """Cross-correlate ``x`` [N,C,H,W] with ``weight`` [F,C,k,k]."""
    x = as_tensor(x)
    weight = as_tensor(weight)
    if x.ndim != 4 or weight.ndim != 4:
        raise ShapeError("conv2d expects NCHW input and FCkk weight")
    n, c, h, w = x.shape
    f, cw, kh, kw = weight.shape
    if kh != kw:
        raise ShapeError("conv2d kernels must be square")
    k = kh
    if k % 2 != 1:
        raise ShapeError("conv2d kernel size must be odd")
    if cw != c:
        raise ShapeError(f"weight expects {cw} input channels, got {c}")
    ho = _conv_out_extent(h, k, stride, pad)
    wo = _conv_out_extent(w, k, stride, pad)

    if pad:
        xp = np.pad(x.data, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    else:
        xp = x.data
    windows = sliding_window_view(xp, (k, k), axis=(2, 3))[:, :, ::stride, ::stride]
    # materialize im2col once; forward and both backward matmuls reuse it
    cols = np.ascontiguousarray(windows.transpose(0, 2, 3, 1, 4, 5))
    cols = cols.reshape(n * ho * wo, c * k * k)
    wmat = weight.data.reshape(f, c * k * k)
    out = (cols @ wmat.T).reshape(n, ho, wo, f)
    out = np.ascontiguousarray(out.transpose(0, 3, 1, 2))
    parents = [x, weight]
    if bias is not None:
        bias = as_tensor(bias)
        if bias.shape != (f,):
            raise ShapeError(f"bias must have shape ({f},)")
        out += bias.data[None, :, None, None]
        parents.append(bias)
    out_t = Tensor(out)

    def backward_fn(g):
        # g: [N,F,Ho,Wo]
        g2 = np.ascontiguousarray(g.transpose(0, 2, 3, 1)).reshape(n * ho * wo, f)
        gw = (g2.T @ cols).reshape(f, c, k, k)
        if stride == 1:
            # input gradient as a full correlation with the rotated kernel
            gp = np.pad(g, ((0, 0), (0, 0), (k - 1, k - 1), (k - 1, k - 1)))
            gwin = sliding_window_view(gp, (k, k), axis=(2, 3))
            gcols = np.ascontiguousarray(gwin.transpose(0, 2, 3, 1, 4, 5))
            hp, wp = xp.shape[2], xp.shape[3]
            gcols = gcols.reshape(n * hp * wp, f * k * k)
            wrot = np.ascontiguousarray(
                weight.data[:, :, ::-1, ::-1].transpose(1, 0, 2, 3)).reshape(c, f * k * k)
            gxp = (gcols @ wrot.T).reshape(n, hp, wp, c)
            gxp = np.ascontiguousarray(gxp.transpose(0, 3, 1, 2))
        else:
            gcols = (g2 @ wmat).reshape(n, ho, wo, c, k, k)
            gxp = np.zeros_like(xp)
            for di in range(k):
                for dj in range(k):
                    gxp[:, :, di:di + stride * ho:stride, dj:dj + stride * wo:stride] += \
                        gcols[:, :, :, :, di, dj].transpose(0, 3, 1, 2)
        gx = gxp[:, :, pad:pad + h, pad:pad + w] if pad else gxp
        grads = [gx, gw]
        if bias is not None:
            grads.append(g.sum(axis=(0, 2, 3)))
        return grads

    return record("conv2d", out_t, parents, backward_fn)


def avg_pool2d(x, k: int, stride: int, pad: int = 0) -> Tensor:
    """Average pooling over k x k windows; zero padding counts toward the mean."""
    x = as_tensor(x)
    if x.ndim != 4:
        raise ShapeError("avg_pool2d expects NCHW input")
    n, c, h, w = x.shape
    ho = _conv_out_extent(h, k, stride, pad)
    wo = _conv_out_extent(w, k, stride, pad)
    xp = np.pad(x.data, ((0, 0), (0, 0), (pad, pad), (pad, pad))) if pad else x.data
    windows = sliding_window_view(xp, (k, k), axis=(2, 3))[:, :, ::stride, ::stride]
    inv = 1.0 / (k * k)
    out = Tensor(windows.sum(axis=(4, 5)) * inv)

    def backward_fn(g):
        gxp = np.zeros_like(xp)
        gs = g * inv
        for di in range(k):
            for dj in range(k):
                gxp[:, :, di:di + stride * ho:stride, dj:dj + stride * wo:stride] += gs
        return (gxp[:, :, pad:pad + h, pad:pad + w] if pad else gxp,)

    return record("avg_pool2d", out, (x,), backward_fn)


def _linear_interp_index(n_out: int, n_in: int):
    """align-corners mapping: output index i samples input coordinate i*(n_in-1)/(n_out-1)."""
    if n_out == 1 or n_in == 1:
        src = np.zeros(n_out)
    else:
        src = np.arange(n_out) * (n_in - 1) / (n_out - 1)
    lo = np.floor(src).astype(np.intp)
    lo = np.minimum(lo, n_in - 1)
    hi = np.minimum(lo + 1, n_in - 1)
    frac = src - lo
    return lo, hi, frac


def upsample_bilinear(x, factor: int) -> Tensor:
    """Bilinear resize of NCHW input by an integer factor (pixel centers on corners)."""
    x = as_tensor(x)
    if x.ndim != 4:
        raise ShapeError("upsample_bilinear expects NCHW input")
    if factor < 1:
        raise ShapeError("factor must be >= 1")
    n, c, h, w = x.shape
    h2, w2 = h * factor, w * factor
    rlo, rhi, rfrac = _linear_interp_index(h2, h)
    clo, chi, cfrac = _linear_interp_index(w2, w)
    rfrac = rfrac[:, None]
    cfrac = cfrac[None, :]

    rows = x.data[:, :, rlo, :] * (1 - rfrac)[None, None] + x.data[:, :, rhi, :] * rfrac[None, None]
    out = rows[:, :, :, clo] * (1 - cfrac)[None, None] + rows[:, :, :, chi] * cfrac[None, None]
    out_t = Tensor(out)

    def backward_fn(g):
        grows = np.zeros((n, c, h2, w), dtype=g.dtype)
        np.add.at(grows, (slice(None), slice(None), slice(None), clo), g * (1 - cfrac)[None, None])
        np.add.at(grows, (slice(None), slice(None), slice(None), chi), g * cfrac[None, None])
        gx = np.zeros((n, c, h, w), dtype=g.dtype)
        np.add.at(gx, (slice(None), slice(None), rlo, slice(None)), grows * (1 - rfrac)[None, None])
        np.add.at(gx, (slice(None), slice(None), rhi, slice(None)), grows * rfrac[None, None])
        return (gx,)

    return record("upsample_bilinear", out_t, (x,), backward_fn)


def grid_sample(src, coords):
    """Bilinear sampling of ``src`` [N,C,H,W] at ``coords`` [N,Ho,Wo,2].

    Coordinates are in pixel units of ``src`` with (u horizontal, v vertical)
    and pixel centers at integer positions. Samples outside
    [0, W-1] x [0, H-1] produce 0; the boolean validity mask [N,Ho,Wo] is
    returned alongside. Gradients flow to both ``src`` and ``coords``.
    """
    src = as_tensor(src)
    coords = as_tensor(coords)
    if src.ndim != 4 or coords.ndim != 4 or coords.shape[-1] != 2:
        raise ShapeError("grid_sample expects src [N,C,H,W] and coords [N,Ho,Wo,2]")
    n, c, h, w = src.shape
    if coords.shape[0] != n:
        raise ShapeError("batch extents of src and coords differ")

    u = coords.data[..., 0]
    v = coords.data[..., 1]
    valid = (u >= 0) & (u <= w - 1) & (v >= 0) & (v <= h - 1)
    vf = valid.astype(src.data.dtype)

    x0 = np.floor(u).astype(np.intp)
    y0 = np.floor(v).astype(np.intp)
    wx = (u - x0).astype(src.data.dtype)
    wy = (v - y0).astype(src.data.dtype)
    x0c = np.clip(x0, 0, w - 1)
    x1c = np.clip(x0 + 1, 0, w - 1)
    y0c = np.clip(y0, 0, h - 1)
    y1c = np.clip(y0 + 1, 0, h - 1)

    chan_last = src.data.transpose(0, 2, 3, 1)  # [N,H,W,C]
    bidx = np.arange(n)[:, None, None]
    ia = chan_last[bidx, y0c, x0c]
    ib = chan_last[bidx, y0c, x1c]
    ic = chan_last[bidx, y1c, x0c]
    id_ = chan_last[bidx, y1c, x1c]

    w_a = ((1 - wx) * (1 - wy) * vf)[..., None]
    w_b = (wx * (1 - wy) * vf)[..., None]
    w_c = ((1 - wx) * wy * vf)[..., None]
    w_d = (wx * wy * vf)[..., None]
    out = w_a * ia + w_b * ib + w_c * ic + w_d * id_  # [N,Ho,Wo,C]
    out_t = Tensor(np.ascontiguousarray(out.transpose(0, 3, 1, 2)))

    def backward_fn(g):
        gl = g.transpose(0, 2, 3, 1)  # [N,Ho,Wo,C]
        gsrc = np.zeros_like(chan_last)
        np.add.at(gsrc, (bidx, y0c, x0c), gl * w_a)
        np.add.at(gsrc, (bidx, y0c, x1c), gl * w_b)
        np.add.at(gsrc, (bidx, y1c, x0c), gl * w_c)
        np.add.at(gsrc, (bidx, y1c, x1c), gl * w_d)
        gsrc = np.ascontiguousarray(gsrc.transpose(0, 3, 1, 2))

        # d(out)/du: horizontal difference interpolated vertically, and vice versa
        du = (((ib - ia) * (1 - wy)[..., None] + (id_ - ic) * wy[..., None]) * gl).sum(axis=-1) * vf
        dv = (((ic - ia) * (1 - wx)[..., None] + (id_ - ib) * wx[..., None]) * gl).sum(axis=-1) * vf
        gcoords = np.stack([du, dv], axis=-1)
        return gsrc, gcoords

    out_final = record("grid_sample", out_t, (src, coords), backward_fn)
    return out_final, valid
