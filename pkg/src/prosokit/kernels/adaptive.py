"""Adaptive normalization: rho-blended layer/instance norm with conditioned affines.

The blend is y = rho * (gamma_ln * LN(x) + beta_ln)
             + (1 - rho) * (gamma_cond * IN(x) + beta_cond),
where the conditioned affine comes either from a speaker embedding (one
scale/bias per channel) or, per frame, from pitch/energy tracks or an
attention pass over [embedding | pitch | energy].
"""
from __future__ import annotations

import numpy as np

from .ops import (
    DEFAULT_EPS,
    _check_tensor3,
    attention_divisor,
    conv1d,
    instance_norm,
    layer_norm,
    scaled_attention,
)
from .weights import AffinePair, AttentionNormWeights, SpeakerAffineWeights, TrackAffineWeights


def clamp_rho(rho_raw: float) -> float:
    """Clamp a raw mixing weight into [0, 1] (applied at parameter updates)."""
    return min(1.0, max(0.0, float(rho_raw)))


def conv_adaptive_norm(
    x: np.ndarray,
    ln_affine: AffinePair,
    se_affine: AffinePair,
    rho: float,
    eps: float = DEFAULT_EPS,
) -> np.ndarray:
    """Blend the affined layer-norm and instance-norm branches with weight rho."""
    x = _check_tensor3(x)
    channels = x.shape[1]
    for name, aff in (("ln_affine", ln_affine), ("se_affine", se_affine)):
        if aff.gamma.shape != (channels,):
            raise ValueError(f"{name} must be per-channel vectors of length {channels}")
    x_ln = layer_norm(x, eps=eps)
    x_in = instance_norm(x, eps=eps)
    branch_ln = ln_affine.gamma[None, :, None] * x_ln + ln_affine.beta[None, :, None]
    branch_in = se_affine.gamma[None, :, None] * x_in + se_affine.beta[None, :, None]
    return rho * branch_ln + (1.0 - rho) * branch_in


def pitch_energy_modulate(
    y: np.ndarray, pitch_affine: AffinePair, energy_affine: AffinePair
) -> np.ndarray:
    """Nested per-frame affine: energy_gamma * (pitch_gamma * y + pitch_beta) + energy_beta."""
    y = _check_tensor3(y)
    expected = y.shape[:2]
    for name, aff in (("pitch_affine", pitch_affine), ("energy_affine", energy_affine)):
        if aff.gamma.shape != expected:
            raise ValueError(f"{name} must be (T, C) = {expected}, got {aff.gamma.shape}")
    gp = pitch_affine.gamma[:, :, None]
    bp = pitch_affine.beta[:, :, None]
    ge = energy_affine.gamma[:, :, None]
    be = energy_affine.beta[:, :, None]
    return ge * (gp * y + bp) + be


def affine_from_speaker(se: np.ndarray, weights: SpeakerAffineWeights) -> AffinePair:
    """Generate the per-channel (gamma, beta) pair from a speaker embedding.

    The embedding enters as channels at a single frame, so the width-9
    convolutions act through their center taps.
    """
    se = np.asarray(se, dtype=np.float64)
    expected = weights.initial.kernel.shape[1]
    if se.shape != (expected,):
        raise ValueError(f"expected an embedding of length {expected}, got {se.shape}")
    hidden = conv1d(se[None, :, None], weights.initial)
    gamma = conv1d(hidden, weights.gamma_head)[0, :, 0]
    beta = conv1d(hidden, weights.beta_head)[0, :, 0]
    return AffinePair(gamma=gamma, beta=beta)


def affine_from_track(track: np.ndarray, weights: TrackAffineWeights) -> AffinePair:
    """Generate per-frame (gamma, beta) of full channel width from a scalar track."""
    track = np.asarray(track, dtype=np.float64)
    if track.ndim != 1 or len(track) == 0:
        raise ValueError("track must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(track)):
        raise ValueError("track must be finite")
    hidden = conv1d(track[:, None, None], weights.initial)
    gamma = conv1d(hidden, weights.gamma_head)[:, :, 0]
    beta = conv1d(hidden, weights.beta_head)[:, :, 0]
    return AffinePair(gamma=gamma, beta=beta)


def attention_affines(
    se: np.ndarray,
    pitch: np.ndarray,
    energy: np.ndarray,
    weights: AttentionNormWeights,
    divisor: str = "sqrt_dk",
) -> AffinePair:
    """Per-frame (gamma, beta) from multi-head attention over [se | pitch | energy]."""
    se = np.asarray(se, dtype=np.float64)
    pitch = np.asarray(pitch, dtype=np.float64)
    energy = np.asarray(energy, dtype=np.float64)
    n_frames = len(pitch)
    if len(energy) != n_frames:
        raise ValueError("pitch and energy tracks must share a length")
    heads, d_head, concat_dim = weights.q_proj.shape
    if se.shape != (concat_dim - 2,):
        raise ValueError(f"expected an embedding of length {concat_dim - 2}, got {se.shape}")

    cond = np.concatenate(
        [np.broadcast_to(se, (n_frames, len(se))), pitch[:, None], energy[:, None]],
        axis=1,
    )
    div = attention_divisor(d_head, divisor)
    attended = np.concatenate(
        [
            scaled_attention(
                cond @ weights.q_proj[h].T,
                cond @ weights.k_proj[h].T,
                cond @ weights.v_proj[h].T,
                div,
            )
            for h in range(heads)
        ],
        axis=1,
    )
    feat = attended[:, :, None]
    gamma = conv1d(feat, weights.gamma_head)[:, :, 0]
    beta = conv1d(feat, weights.beta_head)[:, :, 0]
    return AffinePair(gamma=gamma, beta=beta)


def attention_adaptive_norm(
    x: np.ndarray,
    se: np.ndarray,
    pitch: np.ndarray,
    energy: np.ndarray,
    weights: AttentionNormWeights,
    rho: float | None = None,
    divisor: str = "sqrt_dk",
    eps: float = DEFAULT_EPS,
) -> np.ndarray:
    """Blend the layer-norm branch with an attention-conditioned instance-norm branch."""
    x = _check_tensor3(x)
    if len(pitch) != x.shape[0]:
        raise ValueError("track length must match the tensor's frame count")
    if weights.ln.gamma.shape != (x.shape[1],):
        raise ValueError("layer-norm affine must match the channel count")
    affines = attention_affines(se, pitch, energy, weights, divisor)
    if affines.gamma.shape[1] != x.shape[1]:
        raise ValueError("generated affine width must match the channel count")
    r = weights.rho if rho is None else rho
    x_ln = layer_norm(x, eps=eps)
    x_in = instance_norm(x, eps=eps)
    branch_ln = weights.ln.gamma[None, :, None] * x_ln + weights.ln.beta[None, :, None]
    branch_in = affines.gamma[:, :, None] * x_in + affines.beta[:, :, None]
    return r * branch_ln + (1.0 - r) * branch_in


def scale_tracks(
    pitch: np.ndarray, energy: np.ndarray, alpha_f0: float, alpha_e: float
) -> tuple[np.ndarray, np.ndarray]:
    """Elementwise scaling of pitch/energy tracks, e.g. 1.25x F0 with 0.5x energy."""
    if alpha_f0 <= 0 or alpha_e <= 0:
        raise ValueError("scaling factors must be positive")
    pitch = np.asarray(pitch, dtype=np.float64)
    energy = np.asarray(energy, dtype=np.float64)
    return pitch * alpha_f0, energy * alpha_e
