"""YIN pitch tracking and the voiced/unvoiced decision.

Per frame: squared-difference function over lag, cumulative mean
normalization (CMND), then the first lag dipping below an absolute
threshold, refined by local-minimum descent and parabolic interpolation.
A frame with no dip below the threshold is unvoiced; its CMND minimum is
still reported as the aperiodicity measure.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.fft import next_fast_len

from .audio import Waveform
from .dsp import frame_signal


@dataclass(frozen=True)
class YinConfig:
    frame_size: int = 1024
    hop: int = 256
    f_min: float = 50.0
    f_max: float = 600.0
    threshold: float = 0.15

    def validate(self, sample_rate: int) -> None:
        if not 0 < self.f_min < self.f_max <= sample_rate / 2:
            raise ValueError(
                f"need 0 < f_min < f_max <= sample_rate/2, got "
                f"({self.f_min}, {self.f_max}) at {sample_rate} Hz"
            )
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must be in (0, 1)")
        if self.frame_size < 2 or self.hop < 1:
            raise ValueError("frame_size must be >= 2 and hop >= 1")


@dataclass(frozen=True)
class PitchTrack:
    """Per-frame F0 in Hz (0 where unvoiced) plus the voicing decision."""

    f0: np.ndarray  # (T,)
    voiced: np.ndarray  # (T,) bool
    hop: int
    sample_rate: int
    aperiodicity: np.ndarray  # (T,) CMND value at the chosen lag

    def __len__(self) -> int:
        return len(self.f0)

    @property
    def times(self) -> np.ndarray:
        """Frame start times in seconds."""
        return np.arange(len(self.f0)) * self.hop / self.sample_rate


class PeriodEstimate(NamedTuple):
    tau: float  # lag in samples (fractional after refinement)
    voiced: bool
    aperiodicity: float


def difference_function(frame: np.ndarray, tau_max: int) -> np.ndarray:
    """Squared difference d(tau) = sum_j (x_j - x_{j+tau})^2 for tau=0..tau_max.

    Computed via FFT autocorrelation; d(0) is 0 by definition and rounding
    negatives are clipped to 0.
    """
    frame = np.asarray(frame, dtype=np.float64)
    w = len(frame)
    if tau_max >= w:
        raise ValueError("tau_max must be < frame length")
    n = next_fast_len(w + tau_max + 1)
    spec = np.fft.rfft(frame, n)
    acf = np.fft.irfft(spec * np.conj(spec), n)[: tau_max + 1]
    cumsq = np.concatenate(([0.0], np.cumsum(frame * frame)))
    taus = np.arange(tau_max + 1)
    head = cumsq[w - taus]  # sum of x_j^2, j = 0..w-1-tau
    tail = cumsq[w] - cumsq[taus]  # sum of x_{j+tau}^2
    d = np.maximum(head + tail - 2.0 * acf, 0.0)
    d[0] = 0.0
    return d


def cmnd(d: np.ndarray) -> np.ndarray:
    """Cumulative mean normalized difference: d'(0)=1, d'(tau)=d(tau)*tau/sum(d[1:tau]).

    Lags whose running sum is 0 (e.g. silence) normalize to 1.
    """
    d = np.asarray(d, dtype=np.float64)
    if d[0] != 0.0:
        raise ValueError("difference function must have d(0) = 0")
    out = np.ones_like(d)
    if len(d) > 1:
        running = np.cumsum(d[1:])
        nz = running > 0
        taus = np.arange(1, len(d))
        out[1:][nz] = d[1:][nz] * taus[nz] / running[nz]
    return out


def _parabolic_min(dp: np.ndarray, tau: int) -> tuple[float, float]:
    """Vertex of the parabola through (tau-1, tau, tau+1); assumes both neighbors exist."""
    y0, y1, y2 = dp[tau - 1], dp[tau], dp[tau + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom <= 0:
        return float(tau), float(y1)
    delta = 0.5 * (y0 - y2) / denom
    return tau + delta, max(float(y1 - 0.25 * (y0 - y2) * delta), 0.0)


def pick_period(dp: np.ndarray, cfg: YinConfig, sample_rate: int) -> PeriodEstimate:
    """Choose the period lag from a CMND curve.

    Searches tau in [sr/f_max, sr/f_min]; the first lag below the threshold
    (descended to its local minimum) wins, otherwise the global minimum is
    reported with voiced=False. Interpolation falls back to the integer lag
    at the search-range boundaries.
    """
    dp = np.asarray(dp, dtype=np.float64)
    tau_lo = max(1, int(np.ceil(sample_rate / cfg.f_max)))
    tau_hi = min(int(np.floor(sample_rate / cfg.f_min)), len(dp) - 1)
    if tau_lo > tau_hi:
        raise ValueError(
            f"empty lag range [{tau_lo}, {tau_hi}] for f in "
            f"[{cfg.f_min}, {cfg.f_max}] Hz with {len(dp)} lags"
        )

    below = np.nonzero(dp[tau_lo : tau_hi + 1] < cfg.threshold)[0]
    if below.size:
        tau = tau_lo + int(below[0])
        while tau + 1 <= tau_hi and dp[tau + 1] < dp[tau]:
            tau += 1
        voiced = True
    else:
        tau = tau_lo + int(np.argmin(dp[tau_lo : tau_hi + 1]))
        voiced = False

    if tau_lo < tau < tau_hi:
        tau_ref, value = _parabolic_min(dp, tau)
    else:
        tau_ref, value = float(tau), float(dp[tau])
    return PeriodEstimate(tau=tau_ref, voiced=voiced, aperiodicity=value)


def yin_track(w: Waveform, cfg: YinConfig = YinConfig()) -> PitchTrack:
    """Track pitch and voicing over a waveform with the configured hop."""
    cfg.validate(w.sample_rate)
    frames = frame_signal(w, cfg.frame_size, cfg.hop)
    tau_max = min(int(np.floor(w.sample_rate / cfg.f_min)), cfg.frame_size - 1)

    n = len(frames)
    f0 = np.zeros(n)
    voiced = np.zeros(n, dtype=bool)
    aperiodicity = np.ones(n)
    for t, frame in enumerate(frames):
        dp = cmnd(difference_function(frame, tau_max))
        est = pick_period(dp, cfg, w.sample_rate)
        voiced[t] = est.voiced
        aperiodicity[t] = est.aperiodicity
        if est.voiced:
            f0[t] = w.sample_rate / est.tau
    return PitchTrack(
        f0=f0,
        voiced=voiced,
        hop=cfg.hop,
        sample_rate=w.sample_rate,
        aperiodicity=aperiodicity,
    )
