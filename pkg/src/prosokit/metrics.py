"""Prosody evaluation metrics: GPE, VDE, FFE, MCD, and pairwise orchestration.

Conventions, recorded in every report:
  - natural log throughout the feature chain;
  - GPE counts frames voiced in both tracks whose pitch error exceeds
    threshold * reference pitch (strict comparison, reference-relative);
  - MCD is the plain mean frame distance over cepstral coefficients 1..K;
    the conventional 10/ln(10)*sqrt(2) dB factor is opt-in.

Metric sums run left to right (cumulative reduction) so values are
bit-identical to a per-frame enumeration regardless of platform.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .audio import Waveform
from .config import EvalConfig
from .dsp import CepstraSequence, mel_log_spectrogram, mfcc, pad_to_match, stft_magnitude
from .yin import PitchTrack, yin_track

MCD_DB_FACTOR = 10.0 / np.log(10.0) * np.sqrt(2.0)


class SampleRateMismatchError(ValueError):
    """Audio sample rate differs from the configured rate."""


@dataclass(frozen=True)
class TrackPair:
    """Aligned reference/predicted pitch tracks of equal length."""

    ref: PitchTrack
    pred: PitchTrack

    def __post_init__(self):
        if len(self.ref) != len(self.pred):
            raise ValueError(
                f"tracks must be aligned: {len(self.ref)} vs {len(self.pred)} frames"
            )

    def __len__(self) -> int:
        return len(self.ref)


@dataclass(frozen=True)
class MetricsReport:
    """All four metrics for one reference/predicted pair.

    gpe is None when no frame is voiced in both tracks (serialized as null).
    """

    gpe: Optional[float]
    vde: float
    ffe: float
    mcd: float
    frames_total: int
    frames_both_voiced: int
    gpe_threshold: float = 0.2
    n_coeffs: int = 13
    log_base: str = "e"
    mcd_scaling: str = "none"

    def to_json_dict(self) -> dict:
        return {
            "gpe": self.gpe,
            "vde": self.vde,
            "ffe": self.ffe,
            "mcd": self.mcd,
            "frames_total": self.frames_total,
            "frames_both_voiced": self.frames_both_voiced,
            "conventions": {
                "log_base": self.log_base,
                "mcd_scaling": self.mcd_scaling,
                "gpe_threshold": self.gpe_threshold,
                "K": self.n_coeffs,
            },
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "MetricsReport":
        conv = d.get("conventions", {})
        return cls(
            gpe=d["gpe"],
            vde=d["vde"],
            ffe=d["ffe"],
            mcd=d["mcd"],
            frames_total=d["frames_total"],
            frames_both_voiced=d["frames_both_voiced"],
            gpe_threshold=conv.get("gpe_threshold", 0.2),
            n_coeffs=conv.get("K", 13),
            log_base=conv.get("log_base", "e"),
            mcd_scaling=conv.get("mcd_scaling", "none"),
        )


def _gross_error_mask(pair: TrackPair, threshold: float) -> np.ndarray:
    return np.abs(pair.ref.f0 - pair.pred.f0) > threshold * pair.ref.f0


def gpe(pair: TrackPair, threshold: float = 0.2) -> Optional[float]:
    """Gross pitch error over frames voiced in both tracks; None if there are none."""
    both = pair.ref.voiced & pair.pred.voiced
    denom = int(np.count_nonzero(both))
    if denom == 0:
        return None
    num = int(np.count_nonzero(_gross_error_mask(pair, threshold) & both))
    return num / denom


def vde(pair: TrackPair) -> float:
    """Fraction of frames whose voicing decisions disagree."""
    total = len(pair)
    if total == 0:
        raise ValueError("cannot compute VDE on empty tracks")
    num = int(np.count_nonzero(pair.ref.voiced != pair.pred.voiced))
    return num / total


def ffe(pair: TrackPair, threshold: float = 0.2) -> float:
    """Fraction of frames showing either a gross pitch error or a voicing error."""
    total = len(pair)
    if total == 0:
        raise ValueError("cannot compute FFE on empty tracks")
    both = pair.ref.voiced & pair.pred.voiced
    gross = int(np.count_nonzero(_gross_error_mask(pair, threshold) & both))
    mismatch = int(np.count_nonzero(pair.ref.voiced != pair.pred.voiced))
    return (gross + mismatch) / total


def mcd(
    ref: CepstraSequence,
    pred: CepstraSequence,
    n_coeffs: int = 13,
    db_scaling: bool = False,
) -> float:
    """Mean per-frame Euclidean distance over cepstral coefficients 1..n_coeffs."""
    if ref.n_coeffs < n_coeffs or pred.n_coeffs < n_coeffs:
        raise ValueError(f"both sequences need >= {n_coeffs} coefficients")
    if ref.n_frames != pred.n_frames:
        raise ValueError("cepstra must be aligned to a common frame count")
    total = ref.n_frames
    if total == 0:
        raise ValueError("cannot compute MCD on zero frames")
    diff = pred.frames[:, :n_coeffs] - ref.frames[:, :n_coeffs]
    # cumulative reductions fix the accumulation order (see module docstring)
    frame_dist = np.sqrt(np.cumsum(diff * diff, axis=1)[:, -1])
    value = np.cumsum(frame_dist)[-1] / total
    if db_scaling:
        value = value * MCD_DB_FACTOR
    return float(value)


def evaluate_pair(ref: Waveform, pred: Waveform, cfg: EvalConfig = EvalConfig()) -> MetricsReport:
    """Compute all four metrics for a reference/predicted waveform pair.

    The shorter signal is zero-extended in the time domain before any
    feature extraction, so pitch tracks and cepstra share one frame count.
    """
    for name, w in (("reference", ref), ("predicted", pred)):
        if w.sample_rate != cfg.sample_rate:
            raise SampleRateMismatchError(
                f"{name} audio is {w.sample_rate} Hz, config expects {cfg.sample_rate} Hz"
            )
    a, b = pad_to_match(ref.samples, pred.samples, "time")
    ref_p = Waveform(samples=a, sample_rate=cfg.sample_rate)
    pred_p = Waveform(samples=b, sample_rate=cfg.sample_rate)

    pair = TrackPair(ref=yin_track(ref_p, cfg.yin), pred=yin_track(pred_p, cfg.yin))

    ceps = []
    for w in (ref_p, pred_p):
        spec = stft_magnitude(w, cfg.frame_size, cfg.hop)
        ceps.append(mfcc(mel_log_spectrogram(spec, cfg.n_mels), cfg.mfcc_coeffs))

    both_voiced = int(np.count_nonzero(pair.ref.voiced & pair.pred.voiced))
    return MetricsReport(
        gpe=gpe(pair, cfg.gpe_threshold),
        vde=vde(pair),
        ffe=ffe(pair, cfg.gpe_threshold),
        mcd=mcd(ceps[0], ceps[1], cfg.mfcc_coeffs, db_scaling=cfg.mcd_scaling == "db"),
        frames_total=len(pair),
        frames_both_voiced=both_voiced,
        gpe_threshold=cfg.gpe_threshold,
        n_coeffs=cfg.mfcc_coeffs,
        mcd_scaling=cfg.mcd_scaling,
    )
