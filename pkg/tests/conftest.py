import numpy as np
import pytest
from scipy.io import wavfile

from prosokit.audio import Waveform

SR = 22050


def make_tone(freq, duration=1.0, sr=SR, amp=0.5, phase=0.0):
    t = np.arange(int(round(duration * sr))) / sr
    return amp * np.sin(2.0 * np.pi * freq * t + phase)


def write_wav_f32(path, samples, sr=SR):
    wavfile.write(path, sr, np.asarray(samples, dtype=np.float32))
    return path


def write_wav_i16(path, samples, sr=SR):
    wavfile.write(path, sr, np.asarray(samples, dtype=np.int16))
    return path


@pytest.fixture
def tone_wave():
    def build(freq, duration=1.0, sr=SR, amp=0.5):
        return Waveform(samples=make_tone(freq, duration, sr, amp), sample_rate=sr)

    return build


@pytest.fixture
def tone_file(tmp_path):
    def build(freq, duration=1.0, sr=SR, amp=0.5, name=None):
        name = name or f"tone_{freq}.wav"
        return write_wav_f32(tmp_path / name, make_tone(freq, duration, sr, amp), sr)

    return build
