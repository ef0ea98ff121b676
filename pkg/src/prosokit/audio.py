"""WAV ingestion and the mono float waveform type."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile


class AudioReadError(Exception):
    """File is missing, unreadable, or not a parseable RIFF/WAVE container."""


class UnsupportedCodecError(AudioReadError):
    """WAV payload is not 16-bit PCM or 32-bit float."""


class EmptyAudioError(AudioReadError):
    """WAV data chunk holds zero samples."""


@dataclass(frozen=True)
class Waveform:
    """Mono audio samples (float64, nominally in [-1, 1]) at a known rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if self.samples.ndim != 1:
            raise ValueError("waveform samples must be 1-D")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("waveform contains non-finite samples")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


def load_wav(path: str | Path) -> Waveform:
    """Read a RIFF/WAVE file as a mono Waveform.

    Accepts 16-bit PCM or 32-bit float payloads, mono or stereo. Integer
    samples are scaled to [-1, 1) and stereo channels are mean-downmixed.

    Raises:
        AudioReadError: file missing or not parseable as WAV.
        UnsupportedCodecError: sample format other than int16 / float32.
        EmptyAudioError: the data chunk holds no samples.
    """
    path = Path(path)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", wavfile.WavFileWarning)
            rate, data = wavfile.read(path)
    except (OSError, EOFError) as exc:
        raise AudioReadError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise AudioReadError(f"{path} is not a readable WAV file: {exc}") from exc

    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise UnsupportedCodecError(
            f"{path}: unsupported sample format {data.dtype} (expected int16 or float32)"
        )

    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    if samples.size == 0:
        raise EmptyAudioError(f"{path}: zero-length audio")
    return Waveform(samples=samples, sample_rate=int(rate))
