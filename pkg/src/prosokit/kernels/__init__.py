"""Numerical kernels: normalization blends, attention, blocks, and gradients."""
from .adaptive import (
    affine_from_speaker,
    affine_from_track,
    attention_adaptive_norm,
    clamp_rho,
    conv_adaptive_norm,
    pitch_energy_modulate,
    scale_tracks,
)
from .blocks import fft_block_forward, self_attention, variance_predictor_forward
from .bundle import flatten_weights, load_weight_bundle, save_weight_bundle
from .checks import CheckResult, run_kernel_checks
from .grad import adaptive_norm_forward, backward_adaptive_norm
from .ops import conv1d, instance_norm, layer_norm, relu, scaled_attention, softmax_rows
from .weights import (
    AffinePair,
    AttentionNormWeights,
    ConvNormWeights,
    ConvWeights,
    FftBlockConfig,
    FftBlockWeights,
    NormKernelConfig,
    SelfAttentionWeights,
    SpeakerAffineWeights,
    TrackAffineWeights,
    VariancePredictorWeights,
    init_attention_norm_weights,
    init_conv_norm_weights,
    init_conv_weights,
    init_fft_block_weights,
    init_self_attention_weights,
    init_speaker_affine_weights,
    init_track_affine_weights,
    init_variance_predictor_weights,
)

__all__ = [
    "AffinePair",
    "AttentionNormWeights",
    "CheckResult",
    "ConvNormWeights",
    "ConvWeights",
    "FftBlockConfig",
    "FftBlockWeights",
    "NormKernelConfig",
    "SelfAttentionWeights",
    "SpeakerAffineWeights",
    "TrackAffineWeights",
    "VariancePredictorWeights",
    "adaptive_norm_forward",
    "affine_from_speaker",
    "affine_from_track",
    "attention_adaptive_norm",
    "backward_adaptive_norm",
    "clamp_rho",
    "conv1d",
    "conv_adaptive_norm",
    "fft_block_forward",
    "flatten_weights",
    "init_attention_norm_weights",
    "init_conv_norm_weights",
    "init_conv_weights",
    "init_fft_block_weights",
    "init_self_attention_weights",
    "init_speaker_affine_weights",
    "init_track_affine_weights",
    "init_variance_predictor_weights",
    "instance_norm",
    "layer_norm",
    "load_weight_bundle",
    "pitch_energy_modulate",
    "relu",
    "run_kernel_checks",
    "save_weight_bundle",
    "scale_tracks",
    "scaled_attention",
    "self_attention",
    "softmax_rows",
    "variance_predictor_forward",
]
