"""Dense tensors with tape-based reverse-mode automatic differentiation.

A :class:`Tensor` wraps a numpy array. Operations on tensors record nodes onto
the active :class:`Graph` (one per thread); :func:`backward` replays the tape
in exact reverse recording order, which makes gradient accumulation
deterministic. Tracked tensors are never mutated in place; optimizer updates
swap the ``data`` array of leaf tensors between steps.
"""

from __future__ import annotations

import threading
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import ShapeError

DEFAULT_DTYPE = np.float64


class Node:
    """One recorded operation: output, parents and the local backward rule."""

    __slots__ = ("op", "out", "parents", "backward_fn")

    def __init__(self, op: str, out: "Tensor", parents: Sequence["Tensor"],
                 backward_fn: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]):
        self.op = op
        self.out = out
        self.parents = tuple(parents)
        self.backward_fn = backward_fn


class Graph:
    """Recording tape. Nodes are replayed in reverse order by ``backward``.

    Usable as a context manager to scope recording (one graph per thread at a
    time). A graph is single shot: ``backward`` consumes and clears it.
    """

    def __init__(self):
        self.nodes: list[Node] = []
        self._prev = None

    def record(self, node: Node) -> None:
        self.nodes.append(node)

    def __enter__(self) -> "Graph":
        self._prev = getattr(_tls, "graph", None)
        _tls.graph = self
        return self

    def __exit__(self, *exc) -> None:
        _tls.graph = self._prev
        self._prev = None


_tls = threading.local()


def active_graph() -> Graph:
    g = getattr(_tls, "graph", None)
    if g is None:
        g = Graph()
        _tls.graph = g
    return g


class Tensor:
    """N-dimensional float array with optional gradient tracking."""

    __slots__ = ("data", "requires_grad", "grad")

    def __init__(self, data, requires_grad: bool = False, dtype=None):
        arr = np.asarray(data, dtype=dtype if dtype is not None else None)
        if arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(DEFAULT_DTYPE)
        self.data = arr
        self.requires_grad = bool(requires_grad)
        self.grad: Optional[np.ndarray] = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self) -> float:
        return float(self.data.reshape(()))

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy(), requires_grad=False)

    def backward(self) -> None:
        backward(self)

    def __repr__(self):
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={tuple(self.shape)}, dtype={self.data.dtype.name}{flag})"

    # Arithmetic dunders are attached by depthclick.autodiff.ops at import
    # time to avoid a circular module dependency.


def tensor(data, requires_grad: bool = False, dtype=None) -> Tensor:
    return Tensor(data, requires_grad=requires_grad, dtype=dtype)


def as_tensor(value, dtype=None) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(value, dtype=dtype)


def record(op: str, out: Tensor, parents: Sequence[Tensor], backward_fn) -> Tensor:
    """Attach a backward rule to ``out`` if any parent is tracked."""
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        active_graph().record(Node(op, out, parents, backward_fn))
    return out


def backward(loss: Tensor) -> None:
    """Populate ``grad`` on every reachable tracked tensor.

    ``loss`` must be scalar. The active graph is consumed: its node list is
    cleared afterwards, so each recorded graph supports exactly one backward
    pass.
    """
    if loss.data.size != 1:
        raise ShapeError(f"backward requires a scalar loss, got shape {tuple(loss.shape)}")
    graph = active_graph()
    seed = np.ones_like(loss.data)
    pending: dict[int, np.ndarray] = {id(loss): seed}
    holders: dict[int, Tensor] = {id(loss): loss}
    for node in reversed(graph.nodes):
        g = pending.pop(id(node.out), None)
        if g is None:
            continue
        holders.pop(id(node.out), None)
        if node.out.requires_grad:
            node.out.grad = g
        for parent, pg in zip(node.parents, node.backward_fn(g)):
            if pg is None or not parent.requires_grad:
                continue
            key = id(parent)
            if key in pending:
                pending[key] = pending[key] + pg
            else:
                pending[key] = pg
                holders[key] = parent
    # Whatever is left pending belongs to leaves (no producing node).
    for key, g in pending.items():
        holder = holders[key]
        if holder.requires_grad:
            holder.grad = np.broadcast_to(g, holder.data.shape).copy() if g.shape != holder.data.shape else g
    graph.nodes.clear()
