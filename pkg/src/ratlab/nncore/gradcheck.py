"""Central-difference gradient oracle, independent of the autodiff path."""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..errors import ContractViolation, OracleError
from .tensor import ParamStore, Tensor


def _scalar(value) -> float:
    if isinstance(value, Tensor):
        if value.data.size != 1:
            raise ContractViolation("loss function must return a scalar")
        return float(value.data)
    return float(value)


def finite_difference_gradient(loss_fn: Callable[[ParamStore], object],
                               params: ParamStore,
                               eps: float = 1e-5) -> dict[str, np.ndarray]:
    """(f(x+eps) - f(x-eps)) / (2 eps) per coordinate of every unfrozen param.

    Evaluates the loss twice at the unperturbed point first; a mismatch
    means loss_fn is not deterministic and the oracle refuses to run.
    """
    if eps <= 0:
        raise ContractViolation(f"eps must be positive, got {eps}")
    base1 = _scalar(loss_fn(params))
    base2 = _scalar(loss_fn(params))
    if base1 != base2:
        raise OracleError(f"loss function is not deterministic: {base1!r} != {base2!r}")

    grads: dict[str, np.ndarray] = {}
    for name in params.trainable_names():
        data = params[name].data
        flat = data.reshape(-1)
        g = np.empty_like(flat)
        for i in range(flat.size):
            saved = flat[i]
            flat[i] = saved + eps
            f_plus = _scalar(loss_fn(params))
            flat[i] = saved - eps
            f_minus = _scalar(loss_fn(params))
            flat[i] = saved
            g[i] = (f_plus - f_minus) / (2.0 * eps)
        grads[name] = g.reshape(data.shape)
    return grads


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Vector-norm relative error, robust to near-zero components."""
    num = float(np.linalg.norm(analytic - numeric))
    den = max(float(np.linalg.norm(analytic)), float(np.linalg.norm(numeric)), 1e-12)
    return num / den
