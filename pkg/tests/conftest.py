import numpy as np
import pytest
from scipy.io import wavfile

from synviz.audio import HOP_SIZE, SAMPLE_RATE, AudioSource
from synviz.audio import _hops_from_array


def tone(freq_hz: float, n_samples: int, amplitude: float = 1.0,
         sample_rate: int = SAMPLE_RATE) -> np.ndarray:
    t = np.arange(n_samples) / sample_rate
    return amplitude * np.cos(2.0 * np.pi * freq_hz * t)


def center_freq(bin_index: int) -> float:
    """Frequency sitting exactly on a group's center FFT index, giving an
    integer number of cycles per hop (leak-free under a rect window)."""
    from synviz.analysis import BIN_CENTER_INDICES
    return BIN_CENTER_INDICES[bin_index] * SAMPLE_RATE / HOP_SIZE


def mem_source(samples: np.ndarray) -> AudioSource:
    """In-memory mono hop source, bypassing file IO."""
    mono = np.asarray(samples, dtype=np.float64)
    return AudioSource(origin="<mem>", channels=1,
                       total_hops=len(mono) // HOP_SIZE,
                       _reader=_hops_from_array(mono))


@pytest.fixture
def make_wav(tmp_path):
    """Factory writing a WAV file and returning its path.

    data may be float in [-1, 1] (written as int16 unless dtype says
    otherwise) with shape (n,) or (n, channels).
    """
    counter = [0]

    def write(data, rate=SAMPLE_RATE, dtype=np.int16, name=None):
        counter[0] += 1
        path = tmp_path / (name or f"clip{counter[0]}.wav")
        arr = np.asarray(data)
        if dtype == np.int16:
            arr = np.round(np.clip(arr, -1, 1) * 32767.0).astype(np.int16)
        elif dtype == np.int32:
            arr = np.round(np.clip(arr, -1, 1) * (2**31 - 1)).astype(np.int32)
        elif dtype == np.float32:
            arr = arr.astype(np.float32)
        else:
            raise ValueError(f"unsupported fixture dtype {dtype}")
        wavfile.write(str(path), rate, arr)
        return path

    return write


@pytest.fixture
def quiet_noise_wav(make_wav):
    """~2 s of low-level seeded noise; int16, 44100 Hz, exactly 86 hops."""
    rng = np.random.default_rng(1234)
    n = 86 * HOP_SIZE
    return make_wav(0.05 * rng.standard_normal(n), name="noise.wav")
