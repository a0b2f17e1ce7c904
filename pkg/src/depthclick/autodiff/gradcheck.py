"""Central finite-difference verification of analytic gradients."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .core import Graph, Tensor, backward


def numeric_gradient(fn: Callable[..., float], arrays: Sequence[np.ndarray],
                     index: int, h: float = 1e-5) -> np.ndarray:
    """Central differences of ``fn`` w.r.t. ``arrays[index]``, elementwise."""
    base = [a.copy() for a in arrays]
    target = base[index]
    grad = np.zeros_like(target, dtype=np.float64)
    flat = target.reshape(-1)
    gflat = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        fp = fn(*base)
        flat[i] = orig - h
        fm = fn(*base)
        flat[i] = orig
        gflat[i] = (fp - fm) / (2.0 * h)
    return grad


def max_rel_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-6) -> float:
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))


def check_gradients(fn: Callable[..., Tensor], arrays: Sequence[np.ndarray],
                    h: float = 1e-5, sample: int | None = None,
                    rng: np.random.Generator | None = None) -> float:
    """Compare analytic grads of scalar ``fn(*tensors)`` against finite differences.

    ``fn`` receives one Tensor per input array and must return a scalar Tensor.
    Returns the max relative error across all inputs. When ``sample`` is given,
    only that many randomly chosen elements per input are probed (for large
    parameter blocks).
    """
    arrays = [np.asarray(a, dtype=np.float64) for a in arrays]
    tensors = [Tensor(a.copy(), requires_grad=True) for a in arrays]
    with Graph():
        loss = fn(*tensors)
        backward(loss)
    analytic = [t.grad if t.grad is not None else np.zeros_like(t.data) for t in tensors]

    def scalar_fn(*arrs):
        with Graph():
            return fn(*[Tensor(a) for a in arrs]).item()

    worst = 0.0
    for idx, arr in enumerate(arrays):
        if sample is not None and arr.size > sample:
            gen = rng if rng is not None else np.random.default_rng(0)
            picks = gen.choice(arr.size, size=sample, replace=False)
            num = np.zeros(arr.size)
            ana = analytic[idx].reshape(-1)
            base = [a.copy() for a in arrays]
            flat = base[idx].reshape(-1)
            for i in picks:
                orig = flat[i]
                flat[i] = orig + h
                fp = scalar_fn(*base)
                flat[i] = orig - h
                fm = scalar_fn(*base)
                flat[i] = orig
                num_i = (fp - fm) / (2.0 * h)
                worst = max(worst, max_rel_error(np.array([ana[i]]), np.array([num_i])))
        else:
            num = numeric_gradient(scalar_fn, arrays, idx, h=h)
            worst = max(worst, max_rel_error(analytic[idx], num))
    return worst
