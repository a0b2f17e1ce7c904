"""Elementwise, reduction and shape operations with gradient rules."""

from __future__ import annotations

import warnings

import numpy as np

from ..errors import BroadcastError, NumericWarning, ShapeError
from .core import Tensor, as_tensor, record


def _check_broadcast(a: Tensor, b: Tensor) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise BroadcastError(f"shapes {tuple(a.shape)} and {tuple(b.shape)} do not broadcast") from None


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Reduce a broadcast gradient back to the operand's shape."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _binary(op: str, a, b, fwd, bwd) -> Tensor:
    a = as_tensor(a)
    b = as_tensor(b)
    _check_broadcast(a, b)
    out = Tensor(fwd(a.data, b.data))

    def backward_fn(g):
        ga, gb = bwd(g, a.data, b.data)
        return (_unbroadcast(ga, a.shape) if ga is not None else None,
                _unbroadcast(gb, b.shape) if gb is not None else None)

    return record(op, out, (a, b), backward_fn)


def add(a, b) -> Tensor:
    return _binary("add", a, b, lambda x, y: x + y, lambda g, x, y: (g, g))


def sub(a, b) -> Tensor:
    return _binary("sub", a, b, lambda x, y: x - y, lambda g, x, y: (g, -g))


def mul(a, b) -> Tensor:
    return _binary("mul", a, b, lambda x, y: x * y, lambda g, x, y: (g * y, g * x))


def div(a, b) -> Tensor:
    a = as_tensor(a)
    b = as_tensor(b)
    _check_broadcast(a, b)
    if (a.requires_grad or b.requires_grad) and np.any(b.data == 0):
        warnings.warn("division by zero under gradient tracking", NumericWarning, stacklevel=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = Tensor(a.data / b.data)

    def backward_fn(g):
        with np.errstate(divide="ignore", invalid="ignore"):
            ga = g / b.data
            gb = -g * a.data / (b.data * b.data)
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return record("div", out, (a, b), backward_fn)


def neg(a) -> Tensor:
    a = as_tensor(a)
    out = Tensor(-a.data)
    return record("neg", out, (a,), lambda g: (-g,))


def _unary(op: str, a, fwd, bwd) -> Tensor:
    a = as_tensor(a)
    out = Tensor(fwd(a.data))
    return record(op, out, (a,), lambda g: (bwd(g, a.data, out.data),))


def log(a) -> Tensor:
    return _unary("log", a, np.log, lambda g, x, y: g / x)


def exp(a) -> Tensor:
    return _unary("exp", a, np.exp, lambda g, x, y: g * y)


def absval(a) -> Tensor:
    # subgradient at 0 is 0 (sign(0) == 0)
    return _unary("abs", a, np.abs, lambda g, x, y: g * np.sign(x))


def pow_const(a, p: float) -> Tensor:
    p = float(p)
    return _unary("pow_const", a, lambda x: x ** p, lambda g, x, y: g * p * x ** (p - 1.0))


def sqrt(a) -> Tensor:
    return _unary("sqrt", a, np.sqrt, lambda g, x, y: g * 0.5 / y)


def sin(a) -> Tensor:
    return _unary("sin", a, np.sin, lambda g, x, y: g * np.cos(x))


def cos(a) -> Tensor:
    return _unary("cos", a, np.cos, lambda g, x, y: -g * np.sin(x))


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(a) -> Tensor:
    return _unary("sigmoid", a, _sigmoid, lambda g, x, y: g * y * (1.0 - y))


def relu(a) -> Tensor:
    # subgradient at 0 is 0
    return _unary("relu", a, lambda x: np.maximum(x, 0.0), lambda g, x, y: g * (x > 0))


def clamp(a, lo: float, hi: float) -> Tensor:
    lo = float(lo)
    hi = float(hi)
    # gradient 1 inside [lo, hi] (inclusive), 0 outside
    return _unary("clamp", a, lambda x: np.clip(x, lo, hi),
                  lambda g, x, y: g * ((x >= lo) & (x <= hi)))


def _norm_axes(axes, ndim: int):
    if axes is None:
        return tuple(range(ndim))
    if isinstance(axes, int):
        axes = (axes,)
    axes = tuple(int(ax) for ax in axes)
    for ax in axes:
        if not -ndim <= ax < ndim:
            raise ShapeError(f"axis {ax} out of range for ndim {ndim}")
    return tuple(ax % ndim for ax in axes)


def reduce_sum(a, axes=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    axes = _norm_axes(axes, a.ndim)
    out = Tensor(a.data.sum(axis=axes, keepdims=keepdims))

    def backward_fn(g):
        gk = g
        if not keepdims:
            shape = list(a.shape)
            for ax in axes:
                shape[ax] = 1
            gk = g.reshape(shape)
        return (np.broadcast_to(gk, a.shape),)

    return record("sum", out, (a,), backward_fn)


def reduce_mean(a, axes=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    axes = _norm_axes(axes, a.ndim)
    count = 1
    for ax in axes:
        count *= a.shape[ax]
    return mul(reduce_sum(a, axes, keepdims), 1.0 / count)


def concat(tensors, axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    ndim = tensors[0].ndim
    if not -ndim <= axis < ndim:
        raise ShapeError(f"axis {axis} out of range for ndim {ndim}")
    axis = axis % ndim
    out = Tensor(np.concatenate([t.data for t in tensors], axis=axis))
    offsets = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def backward_fn(g):
        return tuple(piece for piece in np.split(g, offsets, axis=axis))

    return record("concat", out, tensors, backward_fn)


def stack(tensors, axis: int = 0) -> Tensor:
    expanded = []
    for t in tensors:
        t = as_tensor(t)
        expanded.append(reshape(t, t.shape[:axis] + (1,) + t.shape[axis:]))
    return concat(expanded, axis=axis)


def reshape(a, shape) -> Tensor:
    a = as_tensor(a)
    shape = tuple(int(s) for s in shape)
    out = Tensor(a.data.reshape(shape).copy())

    def backward_fn(g):
        return (g.reshape(a.shape),)

    return record("reshape", out, (a,), backward_fn)


def _getitem(a: Tensor, key) -> Tensor:
    out = Tensor(np.array(a.data[key], copy=True))

    def backward_fn(g):
        buf = np.zeros_like(a.data)
        buf[key] = g
        return (buf,)

    return record("getitem", out, (a,), backward_fn)


def _coerce(other, like: Tensor) -> Tensor:
    if isinstance(other, Tensor):
        return other
    return Tensor(np.asarray(other, dtype=like.data.dtype))


def _install_dunders():
    Tensor.__add__ = lambda self, o: add(self, _coerce(o, self))
    Tensor.__radd__ = lambda self, o: add(_coerce(o, self), self)
    Tensor.__sub__ = lambda self, o: sub(self, _coerce(o, self))
    Tensor.__rsub__ = lambda self, o: sub(_coerce(o, self), self)
    Tensor.__mul__ = lambda self, o: mul(self, _coerce(o, self))
    Tensor.__rmul__ = lambda self, o: mul(_coerce(o, self), self)
    Tensor.__truediv__ = lambda self, o: div(self, _coerce(o, self))
    Tensor.__rtruediv__ = lambda self, o: div(_coerce(o, self), self)
    Tensor.__neg__ = neg
    Tensor.__pow__ = lambda self, p: pow_const(self, p)
    Tensor.__getitem__ = _getitem


_install_dunders()
