"""NumPy reference kernels.

These definitions are the semantic ground truth for the hot-path kernels.
The compiled extension (`_ckernels`) implements the same signatures; the
active backend is chosen in `ratlab.nncore.kernels` at import time.

All arrays are float64 and C-contiguous. Matrix products are deliberately
left to BLAS in both backends; the kernels here cover the memory-bound
fused operations where per-call numpy overhead dominates at small sizes.
"""

from __future__ import annotations

import numpy as np

NAME = "reference"

_GELU_C = np.sqrt(2.0 / np.pi)
_GELU_A = 0.044715


def layernorm_fwd(x, gamma, beta, eps):
    """Row-wise layer norm. Returns (y, mean, rstd) with mean/rstd per row."""
    mean = x.mean(axis=1)
    var = x.var(axis=1)
    rstd = 1.0 / np.sqrt(var + eps)
    xhat = (x - mean[:, None]) * rstd[:, None]
    y = xhat * gamma + beta
    return y, mean, rstd


def layernorm_bwd(dy, x, gamma, mean, rstd):
    """Backward of layernorm_fwd. Returns (dx, dgamma, dbeta)."""
    xhat = (x - mean[:, None]) * rstd[:, None]
    dbeta = dy.sum(axis=0)
    dgamma = (dy * xhat).sum(axis=0)
    dyh = dy * gamma
    m1 = dyh.mean(axis=1)
    m2 = (dyh * xhat).mean(axis=1)
    dx = rstd[:, None] * (dyh - m1[:, None] - xhat * m2[:, None])
    return dx, dgamma, dbeta


def causal_softmax_fwd(scores):
    """Row-wise softmax where row t only sees columns 0..t; rest is 0."""
    n = scores.shape[0]
    mask = np.tril(np.ones((n, n), dtype=bool))
    shifted = np.where(mask, scores, -np.inf)
    shifted = shifted - shifted.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    p = e / e.sum(axis=1, keepdims=True)
    return p


def causal_softmax_bwd(dprobs, probs):
    """Backward of causal_softmax_fwd (probs are 0 outside the causal region)."""
    dot = (dprobs * probs).sum(axis=1, keepdims=True)
    return probs * (dprobs - dot)


def softmax_xent_fwd(logits, targets, valid):
    """Summed NLL of targets under softmax(logits) over rows with valid != 0.

    Returns (nll_sum, probs); probs holds the full softmax for backward.
    """
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    probs = e / e.sum(axis=1, keepdims=True)
    rows = np.arange(logits.shape[0])
    logp = shifted - np.log(e.sum(axis=1, keepdims=True))
    nll = -logp[rows, targets]
    nll_sum = float(nll[valid != 0].sum())
    return nll_sum, probs


def softmax_xent_bwd(probs, targets, valid, scale):
    """dlogits for softmax_xent_fwd; each valid row's (p - onehot) times scale."""
    dlogits = probs.copy()
    rows = np.arange(probs.shape[0])
    dlogits[rows, targets] -= 1.0
    dlogits[valid == 0] = 0.0
    dlogits *= scale
    return dlogits


def gelu_fwd(x):
    """GELU, tanh approximation."""
    u = _GELU_C * (x + _GELU_A * x**3)
    return 0.5 * x * (1.0 + np.tanh(u))


def gelu_bwd(dy, x):
    u = _GELU_C * (x + _GELU_A * x**3)
    t = np.tanh(u)
    du = _GELU_C * (1.0 + 3.0 * _GELU_A * x**2)
    return dy * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du)


def adamw_update(param, grad, m, v, t, lr, beta1, beta2, eps, weight_decay):
    """One decoupled-weight-decay Adam step, in place on 1-D views."""
    m *= beta1
    m += (1.0 - beta1) * grad
    v *= beta2
    v += (1.0 - beta2) * grad * grad
    mhat = m / (1.0 - beta1**t)
    vhat = v / (1.0 - beta2**t)
    param -= lr * (mhat / (np.sqrt(vhat) + eps) + weight_decay * param)
