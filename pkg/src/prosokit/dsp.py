"""Framing, spectral features, quantization, and the end-padding policy.

All features share one framing rule: frame t covers samples
[t*hop, t*hop + frame_size), the tail frame is zero-padded, and the frame
count is ceil(len/hop). Pitch, energy, and spectral tracks computed with the
same hop therefore index the same frames.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dct
from scipy.signal import get_window

from .audio import Waveform

# Stabilizer added to mel energies before the (natural) log. Silence maps to
# log(LOG_OFFSET), which is also the pad value for log-spectrogram frames.
LOG_OFFSET = 1e-6


@dataclass(frozen=True)
class Spectrogram:
    """Per-frame linear magnitude spectrum, bins 0..frame_size/2."""

    frames: np.ndarray  # (T, F)
    frame_size: int
    hop: int
    sample_rate: int

    def __post_init__(self):
        if self.frames.ndim != 2 or self.frames.shape[1] != self.frame_size // 2 + 1:
            raise ValueError("spectrogram must be (T, frame_size/2 + 1)")

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class MelSpectrogram:
    """Log mel energies: entry (t, m) = ln(offset + mel-weighted magnitude)."""

    frames: np.ndarray  # (T, n_mels)
    n_mels: int
    offset: float = LOG_OFFSET

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class CepstraSequence:
    """MFCC vectors with the DC coefficient dropped.

    Column k-1 holds cepstral coefficient k, so a sequence built with
    n_coeffs=K carries coefficients 1..K.
    """

    frames: np.ndarray  # (T, n_coeffs)
    n_coeffs: int

    def __post_init__(self):
        if self.n_coeffs < 1 or self.frames.shape[1] != self.n_coeffs:
            raise ValueError("cepstra must be (T, n_coeffs) with n_coeffs >= 1")

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class EnergyTrack:
    """Per-frame L2 norm of the magnitude spectrum."""

    values: np.ndarray  # (T,)


@dataclass(frozen=True)
class QuantizedTrack:
    """Uniform-bin quantization of a real track plus its one-hot encoding."""

    indices: np.ndarray  # (T,) ints in [0, n_bins)
    bin_edges: np.ndarray  # (n_bins + 1,)
    one_hot: np.ndarray  # (T, n_bins) 0/1

    @property
    def n_bins(self) -> int:
        return len(self.bin_edges) - 1


def frame_signal(w: Waveform, frame_size: int = 1024, hop: int = 256) -> np.ndarray:
    """Slice a waveform into overlapping frames, zero-padding the tail.

    Returns an array of shape (ceil(len/hop), frame_size); empty input
    yields zero frames.
    """
    if frame_size < 1 or hop < 1:
        raise ValueError("frame_size and hop must be >= 1")
    samples = np.asarray(w.samples, dtype=np.float64)
    n = len(samples)
    if n == 0:
        return np.zeros((0, frame_size))
    n_frames = -(-n // hop)  # ceil
    padded = np.zeros((n_frames - 1) * hop + frame_size)
    padded[:n] = samples
    frames = np.lib.stride_tricks.sliding_window_view(padded, frame_size)[::hop]
    return frames.copy()


def stft_magnitude(
    w: Waveform, frame_size: int = 1024, hop: int = 256, window: str = "hann"
) -> Spectrogram:
    """Magnitude STFT of Hann-windowed frames (window choice configurable)."""
    frames = frame_signal(w, frame_size, hop)
    win = get_window(window, frame_size, fftbins=True)
    mags = np.abs(np.fft.rfft(frames * win, axis=1))
    return Spectrogram(
        frames=mags, frame_size=frame_size, hop=hop, sample_rate=w.sample_rate
    )


def hz_to_mel(f):
    """HTK mel scale."""
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(n_mels: int, frame_size: int, sample_rate: int) -> np.ndarray:
    """Triangular mel filters spanning [0, sr/2], shape (n_mels, frame_size/2+1)."""
    if n_mels < 1:
        raise ValueError("n_mels must be >= 1")
    n_bins = frame_size // 2 + 1
    bin_hz = np.arange(n_bins) * (sample_rate / frame_size)
    mel_pts = np.linspace(0.0, hz_to_mel(sample_rate / 2.0), n_mels + 2)
    hz_pts = mel_to_hz(mel_pts)

    lower = hz_pts[:-2][:, None]
    center = hz_pts[1:-1][:, None]
    upper = hz_pts[2:][:, None]
    rising = (bin_hz[None, :] - lower) / np.maximum(center - lower, 1e-12)
    falling = (upper - bin_hz[None, :]) / np.maximum(upper - center, 1e-12)
    return np.maximum(0.0, np.minimum(rising, falling))


def mel_log_spectrogram(
    s: Spectrogram, n_mels: int = 80, offset: float = LOG_OFFSET
) -> MelSpectrogram:
    """Natural-log mel spectrogram; every entry is >= ln(offset)."""
    if offset <= 0:
        raise ValueError("offset must be positive")
    fb = mel_filterbank(n_mels, s.frame_size, s.sample_rate)
    frames = np.log(offset + s.frames @ fb.T)
    return MelSpectrogram(frames=frames, n_mels=n_mels, offset=offset)


def mfcc(m: MelSpectrogram, n_coeffs: int = 13) -> CepstraSequence:
    """Orthonormal DCT-II of each log-mel vector, keeping coefficients 1..K.

    The DC coefficient is dropped, so only n_mels - 1 coefficients exist and
    n_coeffs must satisfy 1 <= n_coeffs <= n_mels - 1.
    """
    if not 1 <= n_coeffs <= m.n_mels - 1:
        raise ValueError(
            f"n_coeffs must be in [1, {m.n_mels - 1}] (coefficient 0 is excluded)"
        )
    full = dct(m.frames, type=2, norm="ortho", axis=1)
    return CepstraSequence(frames=full[:, 1 : n_coeffs + 1].copy(), n_coeffs=n_coeffs)


def frame_energy(s: Spectrogram) -> EnergyTrack:
    """L2 norm of each frame's magnitude spectrum."""
    return EnergyTrack(values=np.sqrt(np.sum(s.frames**2, axis=1)))


def quantize_track(
    values, n_bins: int = 256, lo: float = 0.0, hi: float = 1.0
) -> QuantizedTrack:
    """Quantize a real track into uniform bins over [lo, hi] with clipping."""
    if lo >= hi:
        raise ValueError("lo must be < hi")
    if n_bins < 1:
        raise ValueError("n_bins must be >= 1")
    values = np.asarray(values, dtype=np.float64)
    width = (hi - lo) / n_bins
    clipped = np.clip(values, lo, hi)
    indices = np.minimum(
        np.floor((clipped - lo) / width).astype(np.int64), n_bins - 1
    )
    indices = np.maximum(indices, 0)
    edges = lo + width * np.arange(n_bins + 1)
    one_hot = np.zeros((len(values), n_bins))
    one_hot[np.arange(len(values)), indices] = 1.0
    return QuantizedTrack(indices=indices, bin_edges=edges, one_hot=one_hot)


def dequantize(q: QuantizedTrack) -> np.ndarray:
    """Bin-center values for a quantized track."""
    return (q.bin_edges[q.indices] + q.bin_edges[q.indices + 1]) / 2.0


def pad_to_match(a: np.ndarray, b: np.ndarray, domain: str):
    """Extend the shorter of two sequences at the end to the longer's length.

    domain "time" pads 1-D sample arrays with 0; domain "log_spectrogram"
    pads (T, M) frame arrays with whole frames of ln(LOG_OFFSET), the value a
    silent frame takes after the stabilizing offset. Equal-length inputs are
    returned unchanged.
    """
    if domain not in ("time", "log_spectrogram"):
        raise ValueError(f"unknown padding domain: {domain!r}")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if len(a) == len(b):
        return a, b

    def _extend(x, target):
        if domain == "time":
            out = np.zeros(target)
        else:
            out = np.full((target,) + x.shape[1:], np.log(LOG_OFFSET))
        out[: len(x)] = x
        return out

    target = max(len(a), len(b))
    return _extend(a, target), _extend(b, target)
