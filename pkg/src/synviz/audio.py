"""Audio ingest: decode WAV files or raw PCM streams into fixed-size mono hops.

The pipeline's unit of work is a hop: 1024 consecutive mono samples at
44100 Hz. Sources with other sample rates are rejected unless linear
resampling is explicitly enabled. Stereo (or N-channel) material is mixed
down to mono by averaging channels. The trailing partial hop of a finite
source is zero-padded to 1024 samples and flagged as last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterator

import numpy as np
from scipy.io import wavfile

HOP_SIZE = 1024
SAMPLE_RATE = 44100
SILENCE_FLOOR_DB = -120.0


class AudioError(Exception):
    """Base class for source decode problems."""


class UnsupportedFormatError(AudioError):
    """File exists but is not a PCM format this reader understands."""


class UnsupportedSampleRateError(AudioError):
    """Source is not 44100 Hz and resampling is disabled."""


@dataclass(frozen=True)
class SampleHop:
    """One 1024-sample mono frame.

    samples: float64 in [-1, 1], always length 1024 (zero-padded if partial).
    valid:   number of real (non-padding) samples, 1..1024.
    is_last: True for the final hop of a finite source.
    """

    samples: np.ndarray
    index: int
    sample_rate: int = SAMPLE_RATE
    valid: int = HOP_SIZE
    is_last: bool = False

    def __post_init__(self):
        if self.samples.shape != (HOP_SIZE,):
            raise ValueError(f"hop must be exactly {HOP_SIZE} samples")
        self.samples.setflags(write=False)


@dataclass
class AudioSource:
    """A mono 44100 Hz sample stream sliced into hops.

    total_hops counts the *full* hops in the source (floor(n/1024)); when a
    partial tail exists one extra zero-padded hop is still emitted, flagged
    last. total_hops is None for unbounded streams (raw PCM on stdin).
    """

    origin: str
    channels: int
    total_hops: int | None
    sample_rate: int = SAMPLE_RATE
    _reader: Iterator[SampleHop] = field(default=None, repr=False)

    def next_hop(self) -> SampleHop | None:
        """Return the next hop, or None once the source is exhausted."""
        try:
            return next(self._reader)
        except StopIteration:
            return None

    def hops(self) -> Iterator[SampleHop]:
        while (hop := self.next_hop()) is not None:
            yield hop


def _normalize(data: np.ndarray) -> np.ndarray:
    """PCM integers -> float64 in [-1, 1]. scipy returns 24-bit PCM
    left-justified in int32, so /2**31 is correct for both widths."""
    if data.dtype == np.int16:
        out = data.astype(np.float64) / 2**15
    elif data.dtype == np.int32:
        out = data.astype(np.float64) / 2**31
    elif data.dtype in (np.float32, np.float64):
        out = data.astype(np.float64)
    elif data.dtype == np.uint8:
        out = (data.astype(np.float64) - 128.0) / 128.0
    else:
        raise UnsupportedFormatError(f"unsupported WAV sample type {data.dtype}")
    return np.clip(out, -1.0, 1.0)


def _mixdown(data: np.ndarray) -> np.ndarray:
    if data.ndim == 1:
        return data
    return data.mean(axis=1)


def _resample_linear(mono: np.ndarray, rate_in: int, rate_out: int) -> np.ndarray:
    n_out = int(round(len(mono) * rate_out / rate_in))
    t_out = np.arange(n_out) * (rate_in / rate_out)
    return np.interp(t_out, np.arange(len(mono)), mono)


def _hops_from_array(mono: np.ndarray) -> Iterator[SampleHop]:
    n = len(mono)
    n_full = n // HOP_SIZE
    remainder = n - n_full * HOP_SIZE
    for i in range(n_full):
        chunk = mono[i * HOP_SIZE:(i + 1) * HOP_SIZE].copy()
        last = i == n_full - 1 and remainder == 0
        yield SampleHop(samples=chunk, index=i, valid=HOP_SIZE, is_last=last)
    if remainder:
        tail = np.zeros(HOP_SIZE, dtype=np.float64)
        tail[:remainder] = mono[n_full * HOP_SIZE:]
        yield SampleHop(samples=tail, index=n_full, valid=remainder, is_last=True)


def open_source(path: str | Path, resample: bool = False) -> AudioSource:
    """Open a PCM WAV file as a hop source positioned at hop 0.

    Raises AudioError subclasses for unreadable files, non-PCM codecs, or
    (with resample=False) sample rates other than 44100 Hz.
    """
    path = Path(path)
    if not path.exists():
        raise AudioError(f"no such file: {path}")
    try:
        rate, data = wavfile.read(str(path))
    except ValueError as exc:
        raise UnsupportedFormatError(f"{path}: {exc}") from exc
    except Exception as exc:  # wavfile raises bare Exception for bad RIFF
        raise AudioError(f"{path}: {exc}") from exc

    channels = 1 if data.ndim == 1 else data.shape[1]
    mono = _mixdown(_normalize(data))
    if rate != SAMPLE_RATE:
        if not resample:
            raise UnsupportedSampleRateError(
                f"{path}: sample rate {rate} Hz (need {SAMPLE_RATE}; "
                f"enable resampling to convert)")
        mono = _resample_linear(mono, rate, SAMPLE_RATE)

    return AudioSource(
        origin=str(path),
        channels=channels,
        total_hops=len(mono) // HOP_SIZE,
        _reader=_hops_from_array(mono),
    )


def _hops_from_stream(stream: BinaryIO, channels: int) -> Iterator[SampleHop]:
    frame_bytes = 4 * channels
    want = HOP_SIZE * frame_bytes
    index = 0
    pending: SampleHop | None = None
    while True:
        buf = stream.read(want)
        if buf is None:
            buf = b""
        # short reads near EOF: keep pulling until the hop fills or EOF
        while 0 < len(buf) < want:
            more = stream.read(want - len(buf))
            if not more:
                break
            buf += more
        if not buf:
            if pending is not None:
                yield SampleHop(samples=pending.samples, index=pending.index,
                                valid=pending.valid, is_last=True)
            return
        n_frames = len(buf) // frame_bytes
        raw = np.frombuffer(buf[:n_frames * frame_bytes], dtype="<f4")
        mono = _mixdown(raw.reshape(n_frames, channels).astype(np.float64))
        mono = np.clip(mono, -1.0, 1.0)
        if pending is not None:
            yield pending
            pending = None
        if n_frames == HOP_SIZE:
            # full hop; may or may not be last, so hold it one iteration
            pending = SampleHop(samples=mono, index=index)
        else:
            tail = np.zeros(HOP_SIZE, dtype=np.float64)
            tail[:n_frames] = mono
            yield SampleHop(samples=tail, index=index, valid=n_frames, is_last=True)
            return
        index += 1


def open_pcm_stream(stream: BinaryIO, channels: int) -> AudioSource:
    """Wrap a raw PCM stream (interleaved little-endian float32 at 44100 Hz)
    as an unbounded hop source. Used for piping live capture on stdin."""
    if channels < 1:
        raise AudioError(f"channel count must be >= 1, got {channels}")
    return AudioSource(
        origin="<stream>",
        channels=channels,
        total_hops=None,
        _reader=_hops_from_stream(stream, channels),
    )


def rms_db(hop: SampleHop, floor_db: float = SILENCE_FLOOR_DB) -> float:
    """Level of one hop in dBFS: 20*log10(rms). Silence maps to floor_db."""
    rms = math.sqrt(float(np.mean(np.square(hop.samples))))
    if rms <= 0.0:
        return floor_db
    return max(20.0 * math.log10(rms), floor_db)
