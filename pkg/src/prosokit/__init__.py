"""prosokit: speech prosody evaluation metrics and numerical kernels.

Library surface in one import:

    from prosokit import load_wav, yin_track, evaluate_pair, EvalConfig
"""
from .audio import AudioReadError, EmptyAudioError, UnsupportedCodecError, Waveform, load_wav
from .config import EvalConfig, read_config, write_config
from .dsp import (
    CepstraSequence,
    EnergyTrack,
    MelSpectrogram,
    QuantizedTrack,
    Spectrogram,
    frame_energy,
    frame_signal,
    mel_log_spectrogram,
    mfcc,
    pad_to_match,
    quantize_track,
    stft_magnitude,
)
from .metrics import MetricsReport, TrackPair, evaluate_pair, ffe, gpe, mcd, vde
from .yin import PitchTrack, YinConfig, yin_track

__version__ = "0.1.0"

__all__ = [
    "AudioReadError",
    "CepstraSequence",
    "EmptyAudioError",
    "EnergyTrack",
    "EvalConfig",
    "MelSpectrogram",
    "MetricsReport",
    "PitchTrack",
    "QuantizedTrack",
    "Spectrogram",
    "TrackPair",
    "UnsupportedCodecError",
    "Waveform",
    "YinConfig",
    "evaluate_pair",
    "ffe",
    "frame_energy",
    "frame_signal",
    "gpe",
    "load_wav",
    "mcd",
    "mel_log_spectrogram",
    "mfcc",
    "pad_to_match",
    "quantize_track",
    "read_config",
    "stft_magnitude",
    "vde",
    "write_config",
    "yin_track",
]
