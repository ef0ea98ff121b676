"""Weight containers, kernel configurations, and seeded initializers.

Weights are plain float64 arrays initialized uniformly in [-0.1, 0.1] from a
seeded generator: the kernels here exist for numerical verification, so
reproducibility matters and training quality does not.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np


@dataclass(frozen=True)
class AffinePair:
    """Scale/bias pair: per-channel vectors (C,) or per-frame arrays (T, C)."""

    gamma: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        if self.gamma.shape != self.beta.shape:
            raise ValueError("gamma and beta must share a shape")


@dataclass(frozen=True)
class ConvWeights:
    kernel: np.ndarray  # (out_channels, in_channels, width)
    bias: np.ndarray  # (out_channels,)

    def __post_init__(self):
        if self.kernel.ndim != 3 or self.bias.shape != (self.kernel.shape[0],):
            raise ValueError("expected kernel (out, in, width) and bias (out,)")


@dataclass(frozen=True)
class NormKernelConfig:
    """Shapes for the conditioned-normalization kernels."""

    channels: int = 256
    kernel_size: int = 9
    initial_filter: int = 512
    affine_filter: int = 256
    attn_heads: int = 6
    speaker_dim: int = 256
    concat_dim: int = 258

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) <= 0:
                raise ValueError(f"{f.name} must be positive")
        if self.concat_dim != self.speaker_dim + 2:
            raise ValueError("concat_dim must equal speaker_dim + 2")
        if self.affine_filter != self.channels:
            raise ValueError("affine_filter must match the modulated channel width")
        if self.concat_dim % self.attn_heads != 0:
            raise ValueError("concat_dim must divide evenly across attention heads")


@dataclass(frozen=True)
class FftBlockConfig:
    hidden: int = 256
    heads: int = 2
    conv_filter: int = 1024
    conv_kernel: int = 9
    dropout: float = 0.2  # recorded only; forward passes run with dropout off

    def __post_init__(self):
        if self.hidden % self.heads != 0:
            raise ValueError("hidden must be divisible by heads")


@dataclass(frozen=True)
class SpeakerAffineWeights:
    """Embedding -> per-channel (gamma, beta): initial conv then two heads."""

    initial: ConvWeights  # speaker_dim -> initial_filter
    gamma_head: ConvWeights  # initial_filter -> affine_filter
    beta_head: ConvWeights


@dataclass(frozen=True)
class TrackAffineWeights:
    """Scalar track -> per-frame (gamma, beta): initial conv then two heads."""

    initial: ConvWeights  # 1 -> initial_filter
    gamma_head: ConvWeights
    beta_head: ConvWeights


@dataclass(frozen=True)
class AttentionNormWeights:
    """Multi-head attention over [embedding | pitch | energy] -> per-frame affines."""

    q_proj: np.ndarray  # (heads, d_head, concat_dim)
    k_proj: np.ndarray
    v_proj: np.ndarray
    gamma_head: ConvWeights  # concat_dim -> channels
    beta_head: ConvWeights
    ln: AffinePair  # layer-norm branch affine
    rho: float = 0.7


@dataclass(frozen=True)
class ConvNormWeights:
    """Layer-norm affine plus the speaker-conditioned instance-norm branch."""

    ln: AffinePair
    speaker: SpeakerAffineWeights
    rho: float = 0.7


@dataclass(frozen=True)
class SelfAttentionWeights:
    wq: np.ndarray  # (d_model, d_model)
    wk: np.ndarray
    wv: np.ndarray
    wo: np.ndarray
    bq: np.ndarray  # (d_model,)
    bk: np.ndarray
    bv: np.ndarray
    bo: np.ndarray


@dataclass(frozen=True)
class FftBlockWeights:
    attn: SelfAttentionWeights
    norm1: "ConvNormWeights | AttentionNormWeights"
    conv1: ConvWeights  # hidden -> conv_filter
    conv2: ConvWeights  # conv_filter -> hidden
    norm2: "ConvNormWeights | AttentionNormWeights"


@dataclass(frozen=True)
class VariancePredictorWeights:
    conv1: ConvWeights  # channels -> channels, width 3
    ln1: AffinePair
    conv2: ConvWeights
    ln2: AffinePair
    proj_weight: np.ndarray  # (channels,)
    proj_bias: float


def _uniform(rng: np.random.Generator, *shape: int) -> np.ndarray:
    return rng.uniform(-0.1, 0.1, size=shape)


def init_conv_weights(rng, out_channels: int, in_channels: int, width: int) -> ConvWeights:
    return ConvWeights(
        kernel=_uniform(rng, out_channels, in_channels, width),
        bias=_uniform(rng, out_channels),
    )


def init_speaker_affine_weights(rng, cfg: NormKernelConfig = NormKernelConfig()) -> SpeakerAffineWeights:
    return SpeakerAffineWeights(
        initial=init_conv_weights(rng, cfg.initial_filter, cfg.speaker_dim, cfg.kernel_size),
        gamma_head=init_conv_weights(rng, cfg.affine_filter, cfg.initial_filter, cfg.kernel_size),
        beta_head=init_conv_weights(rng, cfg.affine_filter, cfg.initial_filter, cfg.kernel_size),
    )


def init_track_affine_weights(rng, cfg: NormKernelConfig = NormKernelConfig()) -> TrackAffineWeights:
    return TrackAffineWeights(
        initial=init_conv_weights(rng, cfg.initial_filter, 1, cfg.kernel_size),
        gamma_head=init_conv_weights(rng, cfg.affine_filter, cfg.initial_filter, cfg.kernel_size),
        beta_head=init_conv_weights(rng, cfg.affine_filter, cfg.initial_filter, cfg.kernel_size),
    )


def init_attention_norm_weights(
    rng, cfg: NormKernelConfig = NormKernelConfig(), rho: float = 0.7
) -> AttentionNormWeights:
    d_head = cfg.concat_dim // cfg.attn_heads
    return AttentionNormWeights(
        q_proj=_uniform(rng, cfg.attn_heads, d_head, cfg.concat_dim),
        k_proj=_uniform(rng, cfg.attn_heads, d_head, cfg.concat_dim),
        v_proj=_uniform(rng, cfg.attn_heads, d_head, cfg.concat_dim),
        gamma_head=init_conv_weights(rng, cfg.channels, cfg.concat_dim, cfg.kernel_size),
        beta_head=init_conv_weights(rng, cfg.channels, cfg.concat_dim, cfg.kernel_size),
        ln=AffinePair(gamma=_uniform(rng, cfg.channels), beta=_uniform(rng, cfg.channels)),
        rho=rho,
    )


def init_conv_norm_weights(
    rng, cfg: NormKernelConfig = NormKernelConfig(), rho: float = 0.7
) -> ConvNormWeights:
    return ConvNormWeights(
        ln=AffinePair(gamma=_uniform(rng, cfg.channels), beta=_uniform(rng, cfg.channels)),
        speaker=init_speaker_affine_weights(rng, cfg),
        rho=rho,
    )


def init_self_attention_weights(rng, d_model: int) -> SelfAttentionWeights:
    return SelfAttentionWeights(
        wq=_uniform(rng, d_model, d_model),
        wk=_uniform(rng, d_model, d_model),
        wv=_uniform(rng, d_model, d_model),
        wo=_uniform(rng, d_model, d_model),
        bq=_uniform(rng, d_model),
        bk=_uniform(rng, d_model),
        bv=_uniform(rng, d_model),
        bo=_uniform(rng, d_model),
    )


def init_fft_block_weights(
    rng,
    block_cfg: FftBlockConfig = FftBlockConfig(),
    norm_cfg: NormKernelConfig = NormKernelConfig(),
    norm: str = "conv",
    rho: float = 0.7,
) -> FftBlockWeights:
    if norm == "conv":
        make_norm = lambda: init_conv_norm_weights(rng, norm_cfg, rho)  # noqa: E731
    elif norm == "attention":
        make_norm = lambda: init_attention_norm_weights(rng, norm_cfg, rho)  # noqa: E731
    else:
        raise ValueError("norm must be 'conv' or 'attention'")
    return FftBlockWeights(
        attn=init_self_attention_weights(rng, block_cfg.hidden),
        norm1=make_norm(),
        conv1=init_conv_weights(rng, block_cfg.conv_filter, block_cfg.hidden, block_cfg.conv_kernel),
        conv2=init_conv_weights(rng, block_cfg.hidden, block_cfg.conv_filter, block_cfg.conv_kernel),
        norm2=make_norm(),
    )


def init_variance_predictor_weights(
    rng, channels: int = 256, width: int = 3
) -> VariancePredictorWeights:
    return VariancePredictorWeights(
        conv1=init_conv_weights(rng, channels, channels, width),
        ln1=AffinePair(gamma=_uniform(rng, channels), beta=_uniform(rng, channels)),
        conv2=init_conv_weights(rng, channels, channels, width),
        ln2=AffinePair(gamma=_uniform(rng, channels), beta=_uniform(rng, channels)),
        proj_weight=_uniform(rng, channels),
        proj_bias=float(_uniform(rng, 1)[0]),
    )
