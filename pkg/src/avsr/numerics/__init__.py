"""Minimal dense-tensor engine with reverse-mode differentiation."""

from . import tensor as ops
from .gradcheck import grad_check, numerical_gradient
from .io import load_checkpoint, load_tensor, save_checkpoint, save_tensor
from .nn import FeedForward, Init, LayerNorm, LayerNormParams, Linear, Module, layer_norm
from .tensor import (
    Tensor,
    depthwise_conv1d,
    matmul,
    no_grad,
    softmax,
)

__all__ = [
    "FeedForward", "Init", "LayerNorm", "LayerNormParams", "Linear", "Module", "Tensor",
    "depthwise_conv1d", "grad_check", "layer_norm", "load_checkpoint", "load_tensor",
    "matmul", "no_grad", "numerical_gradient", "ops", "save_checkpoint", "save_tensor",
    "softmax",
]
