"""Reverse-mode autodiff over dense float64 arrays.

A `Tensor` wraps a C-contiguous float64 ndarray and records, for op
outputs, the parents and a backward closure. Calling `forward_backward`
on a scalar loss walks the graph once and accumulates exact gradients
into the unfrozen parameters of a `ParamStore`.

The primitive set is intentionally small: elementwise add/sub/mul, scalar
scale, matmul (optionally transposing the right operand), bias add, row
gather (embeddings), layer norm, GELU/ReLU, causally masked softmax,
column slice/concat, softmax cross-entropy, and whole-tensor sum/mean.
There is no broadcasting beyond matmul, bias and elementwise forms.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Iterable, Sequence

import numpy as np

from ..errors import ContractViolation, NumericError
from .kernels import impl as K

LN_EPS = 1e-5

_grad_enabled = True


@contextmanager
def no_grad():
    """Disable graph recording (calibration / inference passes)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def _as_array(values) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float64)
    return arr


class Tensor:
    """A node in the autodiff graph; leaves hold parameters or inputs."""

    __slots__ = ("data", "grad", "requires_grad", "op", "parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, *, op: str = "leaf",
                 parents: tuple = (), backward=None):
        self.data = _as_array(data)
        if op == "leaf" and not np.isfinite(self.data).all():
            raise NumericError("non-finite values in leaf tensor")
        self.grad = None
        self.requires_grad = requires_grad
        self.op = op
        self.parents = parents
        self._backward = backward

    @property
    def shape(self) -> tuple:
        return self.data.shape

    def __repr__(self) -> str:
        return f"Tensor(op={self.op!r}, shape={self.data.shape})"


def _node(data, op: str, parents: Sequence[Tensor], backward) -> Tensor:
    requires = any(p.requires_grad for p in parents)
    return Tensor(np.ascontiguousarray(data), requires,
                  op=op, parents=tuple(parents), backward=backward if requires else None)


def _accum(parent: Tensor, grad: np.ndarray) -> None:
    # grad buffers are zero-initialized in backward(), so += is always safe
    # and no backward closure ever shares an array between two parents.
    if parent.requires_grad:
        parent.grad += grad


# ---------------------------------------------------------------------------
# primitives
# ---------------------------------------------------------------------------

def add(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape != b.data.shape:
        raise ContractViolation(f"add: shape mismatch {a.data.shape} vs {b.data.shape}")
    out_data = a.data + b.data

    def backward(out):
        _accum(a, out.grad)
        _accum(b, out.grad)

    return _node(out_data, "add", (a, b), backward)


def sub(a: Tensor, b: Tensor) -> Tensor:
    if a.data.shape != b.data.shape:
        raise ContractViolation(f"sub: shape mismatch {a.data.shape} vs {b.data.shape}")
    out_data = a.data - b.data

    def backward(out):
        _accum(a, out.grad)
        _accum(b, -out.grad)

    return _node(out_data, "sub", (a, b), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise (Hadamard) product of same-shape tensors."""
    if a.data.shape != b.data.shape:
        raise ContractViolation(f"mul: shape mismatch {a.data.shape} vs {b.data.shape}")
    out_data = a.data * b.data

    def backward(out):
        _accum(a, out.grad * b.data)
        _accum(b, out.grad * a.data)

    return _node(out_data, "mul", (a, b), backward)


def scale(a: Tensor, s: float) -> Tensor:
    out_data = a.data * s

    def backward(out):
        _accum(a, out.grad * s)

    return _node(out_data, "scale", (a,), backward)


def matmul(a: Tensor, b: Tensor, transpose_b: bool = False) -> Tensor:
    """2-D matrix product a @ b (or a @ b.T); BLAS in both backends."""
    bd = b.data.T if transpose_b else b.data
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != bd.shape[0]:
        raise ContractViolation(
            f"matmul: incompatible shapes {a.data.shape} x {b.data.shape}"
            f" (transpose_b={transpose_b})")
    out_data = a.data @ bd

    def backward(out):
        if transpose_b:
            _accum(a, out.grad @ b.data)
            _accum(b, out.grad.T @ a.data)
        else:
            _accum(a, out.grad @ b.data.T)
            _accum(b, a.data.T @ out.grad)

    return _node(out_data, "matmul", (a, b), backward)


def add_bias(x: Tensor, b: Tensor) -> Tensor:
    """Add a length-d bias row vector to every row of an (n, d) tensor."""
    if x.data.ndim != 2 or b.data.ndim != 1 or x.data.shape[1] != b.data.shape[0]:
        raise ContractViolation(f"add_bias: shapes {x.data.shape} + {b.data.shape}")
    out_data = x.data + b.data

    def backward(out):
        _accum(x, out.grad)
        _accum(b, out.grad.sum(axis=0))

    return _node(out_data, "add_bias", (x, b), backward)


def embedding(weight: Tensor, ids: np.ndarray) -> Tensor:
    """Gather rows of weight; backward scatter-adds into the gathered rows."""
    ids = np.asarray(ids, dtype=np.int64)
    if ids.ndim != 1 or weight.data.ndim != 2:
        raise ContractViolation("embedding: ids must be 1-D, weight 2-D")
    if ids.size and (ids.min() < 0 or ids.max() >= weight.data.shape[0]):
        raise ContractViolation("embedding: id out of range")
    out_data = weight.data[ids]

    def backward(out):
        if weight.requires_grad:
            g = np.zeros_like(weight.data)
            np.add.at(g, ids, out.grad)
            _accum(weight, g)

    return _node(out_data, "embedding", (weight,), backward)


def layernorm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float = LN_EPS) -> Tensor:
    y, mean, rstd = K.layernorm_fwd(x.data, gamma.data, beta.data, eps)

    def backward(out):
        dx, dgamma, dbeta = K.layernorm_bwd(out.grad, x.data, gamma.data, mean, rstd)
        _accum(x, dx)
        _accum(gamma, dgamma)
        _accum(beta, dbeta)

    return _node(y, "layernorm", (x, gamma, beta), backward)


def gelu(x: Tensor) -> Tensor:
    y = K.gelu_fwd(x.data)

    def backward(out):
        _accum(x, K.gelu_bwd(out.grad, x.data))

    return _node(y, "gelu", (x,), backward)


def relu(x: Tensor) -> Tensor:
    y = np.maximum(x.data, 0.0)

    def backward(out):
        _accum(x, out.grad * (x.data > 0.0))

    return _node(y, "relu", (x,), backward)


def causal_softmax(scores: Tensor) -> Tensor:
    """Row-wise softmax over an (L, L) score matrix; row t sees columns <= t."""
    if scores.data.ndim != 2 or scores.data.shape[0] != scores.data.shape[1]:
        raise ContractViolation("causal_softmax: scores must be square")
    p = K.causal_softmax_fwd(scores.data)

    def backward(out):
        _accum(scores, K.causal_softmax_bwd(out.grad, p))

    return _node(p, "causal_softmax", (scores,), backward)


def slice_cols(x: Tensor, start: int, stop: int) -> Tensor:
    if x.data.ndim != 2 or not (0 <= start < stop <= x.data.shape[1]):
        raise ContractViolation(f"slice_cols: [{start}:{stop}] of {x.data.shape}")
    out_data = x.data[:, start:stop].copy()

    def backward(out):
        if x.requires_grad:
            g = np.zeros_like(x.data)
            g[:, start:stop] = out.grad
            _accum(x, g)

    return _node(out_data, "slice_cols", (x,), backward)


def concat_cols(parts: Sequence[Tensor]) -> Tensor:
    if not parts:
        raise ContractViolation("concat_cols: empty input")
    rows = parts[0].data.shape[0]
    if any(p.data.ndim != 2 or p.data.shape[0] != rows for p in parts):
        raise ContractViolation("concat_cols: row counts differ")
    out_data = np.concatenate([p.data for p in parts], axis=1)
    widths = [p.data.shape[1] for p in parts]

    def backward(out):
        off = 0
        for p, w in zip(parts, widths):
            _accum(p, out.grad[:, off:off + w])
            off += w

    return _node(out_data, "concat_cols", tuple(parts), backward)


def cross_entropy(logits: Tensor, targets: np.ndarray, valid: np.ndarray) -> Tensor:
    """Mean NLL of targets under softmax(logits), over rows where valid != 0."""
    targets = np.ascontiguousarray(targets, dtype=np.int64)
    valid = np.ascontiguousarray(valid, dtype=np.uint8)
    if logits.data.ndim != 2 or targets.shape != (logits.data.shape[0],):
        raise ContractViolation("cross_entropy: logits (n, v) and targets (n,) required")
    if valid.shape != targets.shape:
        raise ContractViolation("cross_entropy: valid mask shape mismatch")
    n_valid = int(valid.sum())
    if n_valid == 0:
        raise ContractViolation("cross_entropy: no valid positions")
    nll_sum, probs = K.softmax_xent_fwd(logits.data, targets, valid)
    loss = nll_sum / n_valid
    if not np.isfinite(loss):
        raise NumericError("non-finite values produced by op 'cross_entropy'")

    def backward(out):
        s = float(out.grad) / n_valid
        _accum(logits, K.softmax_xent_bwd(probs, targets, valid, s))

    return _node(np.float64(loss), "cross_entropy", (logits,), backward)


def sum_all(x: Tensor) -> Tensor:
    out_data = np.float64(x.data.sum())

    def backward(out):
        _accum(x, np.full_like(x.data, float(out.grad)))

    return _node(out_data, "sum_all", (x,), backward)


def mean_all(x: Tensor) -> Tensor:
    n = x.data.size
    out_data = np.float64(x.data.mean())

    def backward(out):
        _accum(x, np.full_like(x.data, float(out.grad) / n))

    return _node(out_data, "mean_all", (x,), backward)


# ---------------------------------------------------------------------------
# graph walking
# ---------------------------------------------------------------------------

def topo_order(root: Tensor) -> list[Tensor]:
    """Parents-before-children order, iterative to cope with deep graphs."""
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if id(p) not in seen:
                stack.append((p, False))
    return order


def backward(loss: Tensor) -> None:
    """Populate .grad over the graph below a scalar loss."""
    if loss.data.size != 1:
        raise ContractViolation(
            f"backward: loss must be scalar, got shape {loss.data.shape}")
    if not np.isfinite(loss.data):
        raise _locate_nonfinite(loss)
    order = topo_order(loss)
    for node in order:
        node.grad = np.zeros_like(node.data) if node.requires_grad else None
    loss.grad = np.ones_like(loss.data)
    for node in reversed(order):
        if node._backward is not None:
            node._backward(node)


def _locate_nonfinite(loss: Tensor) -> NumericError:
    for node in topo_order(loss):
        if not np.isfinite(node.data).all():
            return NumericError(f"non-finite values produced by op '{node.op}'")
    return NumericError("non-finite loss of unknown origin")


def forward_backward(loss: Tensor, params: "ParamStore") -> dict[str, np.ndarray]:
    """Gradients of a scalar loss for every unfrozen parameter.

    Parameters the loss does not depend on get zero gradients; frozen
    parameters are skipped entirely.
    """
    backward(loss)
    grads: dict[str, np.ndarray] = {}
    for name in params.names():
        if params.is_frozen(name):
            continue
        t = params[name]
        grads[name] = t.grad if t.grad is not None else np.zeros_like(t.data)
    return grads


# ---------------------------------------------------------------------------
# parameter store
# ---------------------------------------------------------------------------

class ParamStore:
    """Named parameter tensors plus a freeze mask.

    Frozen parameters have requires_grad False, so graphs skip them, the
    optimizer never touches them, and they carry no optimizer moments.
    """

    def __init__(self):
        self._params: dict[str, Tensor] = {}
        self._frozen: dict[str, bool] = {}

    def add(self, name: str, values, frozen: bool = False) -> Tensor:
        if name in self._params:
            raise ContractViolation(f"parameter {name!r} already exists")
        t = Tensor(values, requires_grad=not frozen)
        self._params[name] = t
        self._frozen[name] = frozen
        return t

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def names(self) -> list[str]:
        return list(self._params)

    def is_frozen(self, name: str) -> bool:
        return self._frozen[name]

    def trainable_names(self) -> list[str]:
        return [n for n in self._params if not self._frozen[n]]

    @property
    def freeze_mask(self) -> dict[str, bool]:
        return dict(self._frozen)

    def set_freeze_mask(self, mask: dict[str, bool]) -> None:
        """Install a freeze mask; keys must exactly match the parameter names."""
        if set(mask) != set(self._params):
            missing = set(self._params) ^ set(mask)
            raise ContractViolation(f"freeze mask keys do not match parameters: {sorted(missing)}")
        for name, frozen in mask.items():
            self._frozen[name] = bool(frozen)
            self._params[name].requires_grad = not frozen

    def n_params(self, only_trainable: bool = False) -> int:
        names: Iterable[str] = self.trainable_names() if only_trainable else self._params
        return sum(self._params[n].data.size for n in names)

    def copy_data(self) -> dict[str, np.ndarray]:
        """Snapshot of raw parameter arrays (for bit-identity checks)."""
        return {n: t.data.copy() for n, t in self._params.items()}
