"""Minimal dense tensors with reverse-mode automatic differentiation."""

from .core import Graph, Tensor, as_tensor, backward, tensor
from .gradcheck import check_gradients, max_rel_error, numeric_gradient
from .nnops import avg_pool2d, conv2d, grid_sample, upsample_bilinear
from .ops import (absval, add, clamp, concat, cos, div, exp, log, mul, neg,
                  pow_const, reduce_mean, reduce_sum, relu, reshape, sigmoid,
                  sin, sqrt, stack, sub)
from .optim import Adam, adam_init, adam_step

__all__ = [
    "Tensor", "Graph", "tensor", "as_tensor", "backward",
    "add", "sub", "mul", "div", "neg", "log", "exp", "absval", "pow_const",
    "sqrt", "sin", "cos", "sigmoid", "relu", "clamp",
    "reduce_sum", "reduce_mean", "concat", "stack", "reshape",
    "conv2d", "avg_pool2d", "upsample_bilinear", "grid_sample",
    "Adam", "adam_init", "adam_step",
    "check_gradients", "numeric_gradient", "max_rel_error",
]
