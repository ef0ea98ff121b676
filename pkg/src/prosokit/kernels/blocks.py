"""Feed-forward transformer block and variance-predictor forward passes.

Both run deterministically: dropout stages are recorded in the configs but
disabled, since these forwards exist for numerical verification.
"""
from __future__ import annotations

import numpy as np

from .adaptive import affine_from_speaker, attention_adaptive_norm, conv_adaptive_norm
from .ops import DEFAULT_EPS, _check_tensor3, attention_divisor, conv1d, layer_norm, relu, scaled_attention
from .weights import (
    AttentionNormWeights,
    ConvNormWeights,
    FftBlockWeights,
    SelfAttentionWeights,
    VariancePredictorWeights,
)


def self_attention(
    x: np.ndarray, weights: SelfAttentionWeights, heads: int = 2, divisor: str = "sqrt_dk"
) -> np.ndarray:
    """Multi-head self-attention over frames, applied per batch element."""
    x = _check_tensor3(x)
    n_frames, d_model, n_batch = x.shape
    if d_model % heads != 0:
        raise ValueError("model width must be divisible by the head count")
    d_head = d_model // heads
    div = attention_divisor(d_head, divisor)

    out = np.empty_like(x)
    for b in range(n_batch):
        tokens = x[:, :, b]
        q = tokens @ weights.wq.T + weights.bq
        k = tokens @ weights.wk.T + weights.bk
        v = tokens @ weights.wv.T + weights.bv
        merged = np.concatenate(
            [
                scaled_attention(
                    q[:, h * d_head : (h + 1) * d_head],
                    k[:, h * d_head : (h + 1) * d_head],
                    v[:, h * d_head : (h + 1) * d_head],
                    div,
                )
                for h in range(heads)
            ],
            axis=1,
        )
        out[:, :, b] = merged @ weights.wo.T + weights.bo
    return out


def _norm_stage(z, se, pitch, energy, weights, divisor, eps):
    if isinstance(weights, ConvNormWeights):
        se_affine = affine_from_speaker(se, weights.speaker)
        return conv_adaptive_norm(z, weights.ln, se_affine, weights.rho, eps=eps)
    if isinstance(weights, AttentionNormWeights):
        return attention_adaptive_norm(
            z, se, pitch, energy, weights, divisor=divisor, eps=eps
        )
    raise TypeError(f"unsupported norm weights: {type(weights).__name__}")


def fft_block_forward(
    x: np.ndarray,
    se: np.ndarray,
    pitch: np.ndarray,
    energy: np.ndarray,
    weights: FftBlockWeights,
    heads: int = 2,
    divisor: str = "sqrt_dk",
    eps: float = DEFAULT_EPS,
) -> np.ndarray:
    """Self-attention and conv feed-forward sublayers, each wrapped as
    adaptive_norm(residual + sublayer(residual))."""
    x = _check_tensor3(x)
    h = x + self_attention(x, weights.attn, heads=heads, divisor=divisor)
    h = _norm_stage(h, se, pitch, energy, weights.norm1, divisor, eps)
    ff = conv1d(relu(conv1d(h, weights.conv1)), weights.conv2)
    h2 = h + ff
    return _norm_stage(h2, se, pitch, energy, weights.norm2, divisor, eps)


def variance_predictor_forward(
    h: np.ndarray, weights: VariancePredictorWeights, eps: float = DEFAULT_EPS
) -> np.ndarray:
    """Two conv/ReLU/layer-norm stages then a per-frame scalar projection.

    Returns a (T, B) array of per-frame predictions.
    """
    h = _check_tensor3(h)
    channels = weights.conv1.kernel.shape[1]
    if h.shape[1] != channels:
        raise ValueError(f"expected {channels}-channel input, got {h.shape[1]}")
    a = layer_norm(relu(conv1d(h, weights.conv1)), affine=weights.ln1, eps=eps)
    a = layer_norm(relu(conv1d(a, weights.conv2)), affine=weights.ln2, eps=eps)
    return np.einsum("tcb,c->tb", a, weights.proj_weight) + weights.proj_bias
