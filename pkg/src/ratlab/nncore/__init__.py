"""Dense float64 tensor math with reverse-mode autodiff and AdamW."""

from .kernels import BACKEND, available_backends
from .optim import AdamWParams, OptimizerState, adamw_step, cosine_lr
from .tensor import ParamStore, Tensor, backward, forward_backward
from .gradcheck import finite_difference_gradient, relative_error
from . import checkpoint

__all__ = [
    "BACKEND",
    "available_backends",
    "AdamWParams",
    "OptimizerState",
    "adamw_step",
    "cosine_lr",
    "ParamStore",
    "Tensor",
    "backward",
    "forward_backward",
    "finite_difference_gradient",
    "relative_error",
    "checkpoint",
]
