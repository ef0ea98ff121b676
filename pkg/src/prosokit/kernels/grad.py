"""Analytic backward pass for the modulated adaptive normalization.

Covers the composition pitch_energy_modulate(conv_adaptive_norm(x, ...)),
differentiating through both normalizations' mean and variance. The forward
here reproduces the two ops bit for bit and returns the cache the backward
needs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ops import DEFAULT_EPS, _check_tensor3, _normalize
from .weights import AffinePair


@dataclass(frozen=True)
class AdaptiveNormCache:
    x_ln: np.ndarray
    x_in: np.ndarray
    scale_ln: np.ndarray  # sqrt(var + eps) over channels, (T, 1, B)
    scale_in: np.ndarray  # sqrt(var + eps) over frames, (1, C, B)
    branch_ln: np.ndarray
    branch_in: np.ndarray
    y: np.ndarray
    inner: np.ndarray  # pitch_gamma * y + pitch_beta
    ln: AffinePair
    se: AffinePair
    pitch: AffinePair
    energy: AffinePair
    rho: float


@dataclass(frozen=True)
class AdaptiveNormGrads:
    x: np.ndarray
    ln_gamma: np.ndarray
    ln_beta: np.ndarray
    se_gamma: np.ndarray
    se_beta: np.ndarray
    pitch_gamma: np.ndarray
    pitch_beta: np.ndarray
    energy_gamma: np.ndarray
    energy_beta: np.ndarray
    rho: float


def adaptive_norm_forward(
    x: np.ndarray,
    ln_affine: AffinePair,
    se_affine: AffinePair,
    pitch_affine: AffinePair,
    energy_affine: AffinePair,
    rho: float,
    eps: float = DEFAULT_EPS,
) -> tuple[np.ndarray, AdaptiveNormCache]:
    """Forward pass of the blended norm plus nested per-frame affine, with cache."""
    x = _check_tensor3(x)
    x_ln, scale_ln = _normalize(x, axis=1, eps=eps)
    x_in, scale_in = _normalize(x, axis=0, eps=eps)
    branch_ln = ln_affine.gamma[None, :, None] * x_ln + ln_affine.beta[None, :, None]
    branch_in = se_affine.gamma[None, :, None] * x_in + se_affine.beta[None, :, None]
    y = rho * branch_ln + (1.0 - rho) * branch_in
    gp = pitch_affine.gamma[:, :, None]
    bp = pitch_affine.beta[:, :, None]
    ge = energy_affine.gamma[:, :, None]
    be = energy_affine.beta[:, :, None]
    inner = gp * y + bp
    out = ge * inner + be
    cache = AdaptiveNormCache(
        x_ln=x_ln,
        x_in=x_in,
        scale_ln=scale_ln,
        scale_in=scale_in,
        branch_ln=branch_ln,
        branch_in=branch_in,
        y=y,
        inner=inner,
        ln=ln_affine,
        se=se_affine,
        pitch=pitch_affine,
        energy=energy_affine,
        rho=float(rho),
    )
    return out, cache


def _norm_backward(d_xhat: np.ndarray, xhat: np.ndarray, scale: np.ndarray, axis: int) -> np.ndarray:
    """Backward through (x - mean) / sqrt(var + eps) along one axis."""
    mean_d = d_xhat.mean(axis=axis, keepdims=True)
    mean_dx = (d_xhat * xhat).mean(axis=axis, keepdims=True)
    return (d_xhat - mean_d - xhat * mean_dx) / scale


def backward_adaptive_norm(upstream: np.ndarray, cache: AdaptiveNormCache) -> AdaptiveNormGrads:
    """Exact gradients of the cached forward with respect to every input."""
    if not isinstance(cache, AdaptiveNormCache):
        raise TypeError("backward_adaptive_norm needs the cache from adaptive_norm_forward")
    g = np.asarray(upstream, dtype=np.float64)
    if g.shape != cache.y.shape:
        raise ValueError("upstream gradient must match the forward output shape")

    gp = cache.pitch.gamma[:, :, None]
    ge = cache.energy.gamma[:, :, None]

    d_energy_beta = g.sum(axis=2)
    d_energy_gamma = (g * cache.inner).sum(axis=2)
    g_inner = g * ge
    d_pitch_beta = g_inner.sum(axis=2)
    d_pitch_gamma = (g_inner * cache.y).sum(axis=2)
    d_y = g_inner * gp

    d_rho = float((d_y * (cache.branch_ln - cache.branch_in)).sum())
    d_branch_ln = cache.rho * d_y
    d_branch_in = (1.0 - cache.rho) * d_y

    d_ln_gamma = (d_branch_ln * cache.x_ln).sum(axis=(0, 2))
    d_ln_beta = d_branch_ln.sum(axis=(0, 2))
    d_se_gamma = (d_branch_in * cache.x_in).sum(axis=(0, 2))
    d_se_beta = d_branch_in.sum(axis=(0, 2))

    d_x_ln = d_branch_ln * cache.ln.gamma[None, :, None]
    d_x_in = d_branch_in * cache.se.gamma[None, :, None]
    d_x = _norm_backward(d_x_ln, cache.x_ln, cache.scale_ln, axis=1)
    d_x += _norm_backward(d_x_in, cache.x_in, cache.scale_in, axis=0)

    return AdaptiveNormGrads(
        x=d_x,
        ln_gamma=d_ln_gamma,
        ln_beta=d_ln_beta,
        se_gamma=d_se_gamma,
        se_beta=d_se_beta,
        pitch_gamma=d_pitch_gamma,
        pitch_beta=d_pitch_beta,
        energy_gamma=d_energy_gamma,
        energy_beta=d_energy_beta,
        rho=d_rho,
    )
