"""AdamW with decoupled weight decay, freeze-aware, plus the cosine schedule.

Moments exist only for unfrozen parameters, so the freeze contract (frozen
parameters bit-identical across any number of steps) holds structurally.
With weight_decay=0 the update reduces to plain Adam.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractViolation, SequenceRangeError
from .kernels import impl as K
from .tensor import ParamStore


@dataclass
class AdamWParams:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    weight_decay: float = 0.0
    eps: float = 1e-8


@dataclass
class OptimizerState:
    """First/second moments per unfrozen parameter and the step counter."""

    hyper: AdamWParams = field(default_factory=AdamWParams)
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    def reset(self) -> None:
        self.step = 0
        self.m.clear()
        self.v.clear()


def adamw_step(params: ParamStore, grads: dict[str, np.ndarray],
               state: OptimizerState, lr: float | None = None) -> None:
    """Apply one AdamW step in place to the unfrozen parameters.

    `grads` must cover every unfrozen parameter; frozen parameters and
    their (absent) moments are untouched.
    """
    unfrozen = params.trainable_names()
    missing = [n for n in unfrozen if n not in grads]
    if missing:
        raise ContractViolation(f"gradients missing for unfrozen params: {missing}")
    h = state.hyper
    step_lr = h.lr if lr is None else lr
    state.step += 1
    for name in unfrozen:
        p = params[name]
        g = np.ascontiguousarray(grads[name], dtype=np.float64)
        if g.shape != p.data.shape:
            raise ContractViolation(
                f"gradient shape {g.shape} != param shape {p.data.shape} for {name!r}")
        if name not in state.m:
            state.m[name] = np.zeros_like(p.data)
            state.v[name] = np.zeros_like(p.data)
        K.adamw_update(p.data.reshape(-1), g.reshape(-1),
                       state.m[name].reshape(-1), state.v[name].reshape(-1),
                       state.step, step_lr, h.beta1, h.beta2, h.eps, h.weight_decay)


def cosine_lr(step: int, total_steps: int, base_lr: float) -> float:
    """base_lr * 0.5 * (1 + cos(pi * step / total_steps))."""
    if total_steps <= 0:
        raise SequenceRangeError(f"total_steps must be positive, got {total_steps}")
    if step < 0 or step > total_steps:
        raise SequenceRangeError(f"step {step} outside [0, {total_steps}]")
    return base_lr * 0.5 * (1.0 + float(np.cos(np.pi * step / total_steps)))
