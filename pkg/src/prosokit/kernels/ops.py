"""Normalization, convolution, and attention primitives on (T, C, B) tensors.

Everything here is a pure float64 function of explicit inputs; tensors are
frames x channels x batch.
"""
from __future__ import annotations

import numpy as np

from .weights import AffinePair, ConvWeights

# Small enough that post-normalization variance stays within 1e-6 of 1 even
# for low-variance inputs, while still guarding exactly-constant slices.
DEFAULT_EPS = 1e-12


def _check_tensor3(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise ValueError(f"expected a (T, C, B) tensor, got shape {x.shape}")
    return x


def _normalize(x: np.ndarray, axis: int, eps: float):
    """Zero-mean unit-variance along one axis; returns (xhat, scale) with
    scale = sqrt(var + eps) for reuse in backward passes."""
    mean = x.mean(axis=axis, keepdims=True)
    centered = x - mean
    var = (centered**2).mean(axis=axis, keepdims=True)
    scale = np.sqrt(var + eps)
    return centered / scale, scale


def layer_norm(x: np.ndarray, affine: AffinePair | None = None, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Normalize each (frame, batch) slice over channels, then apply the affine."""
    x = _check_tensor3(x)
    xhat, _ = _normalize(x, axis=1, eps=eps)
    if affine is None:
        return xhat
    if affine.gamma.shape != (x.shape[1],):
        raise ValueError("affine length must match the channel count")
    return affine.gamma[None, :, None] * xhat + affine.beta[None, :, None]


def instance_norm(x: np.ndarray, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Normalize each (channel, batch) slice over frames."""
    x = _check_tensor3(x)
    xhat, _ = _normalize(x, axis=0, eps=eps)
    return xhat


def conv1d(x: np.ndarray, weights: ConvWeights) -> np.ndarray:
    """Same-length cross-correlation along the frame axis, per batch element."""
    x = _check_tensor3(x)
    out_c, in_c, width = weights.kernel.shape
    if in_c != x.shape[1]:
        raise ValueError(f"kernel expects {in_c} input channels, tensor has {x.shape[1]}")
    if width % 2 != 1:
        raise ValueError("same-length padding requires an odd kernel width")
    pad = width // 2
    padded = np.zeros((x.shape[0] + 2 * pad, x.shape[1], x.shape[2]))
    padded[pad : pad + x.shape[0]] = x
    windows = np.lib.stride_tricks.sliding_window_view(padded, width, axis=0)
    out = np.einsum("tcbk,ock->tob", windows, weights.kernel, optimize=True)
    return out + weights.bias[None, :, None]


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max subtraction for stability."""
    shifted = logits - logits.max(axis=-1, keepdims=True)
    weights = np.exp(shifted)
    return weights / weights.sum(axis=-1, keepdims=True)


def scaled_attention(q: np.ndarray, k: np.ndarray, v: np.ndarray, divisor: float) -> np.ndarray:
    """softmax(q k^T / divisor) v for 2-D q (n_q, d), k (n_k, d), v (n_k, d_v)."""
    q = np.asarray(q, dtype=np.float64)
    k = np.asarray(k, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if q.ndim != 2 or k.ndim != 2 or v.ndim != 2:
        raise ValueError("q, k, v must be 2-D matrices")
    if q.shape[1] != k.shape[1]:
        raise ValueError("q and k must share the inner dimension")
    if k.shape[0] != v.shape[0]:
        raise ValueError("k and v must have the same number of rows")
    if divisor <= 0:
        raise ValueError("divisor must be positive")
    return softmax_rows((q @ k.T) / divisor) @ v


def attention_divisor(d_head: int, mode: str) -> float:
    """Logit divisor: the standard sqrt(d_k), or plain d_k when selected."""
    if mode == "sqrt_dk":
        return float(np.sqrt(d_head))
    if mode == "dk":
        return float(d_head)
    raise ValueError("divisor mode must be 'sqrt_dk' or 'dk'")
