"""Per-hop DSP: folded FFT magnitudes, 12 frequency bins, volatility, triggers.

Each 1024-sample hop is transformed as follows:

  1. 1024-point FFT (rectangular window by default, Hann optional), keep the
     magnitudes of the first 512 points and double them ("folding" — real
     input spectra are conjugate-symmetric, so the upper half carries no new
     information).
  2. The 512 points are summed into 12 contiguous bins (4 low, 4 middle,
     4 high) using a fixed near-geometric partition whose first bin is the
     two points covering 0-86 Hz. raw bin value = sum(group)/1024, so a
     full-scale single tone reads 1.0 in whichever bin it lands — every
     bin's "100%" has the same amplitude. Values are then scaled by
     1/range_max and clamped to [0, 1].
  3. A running average over the last n_avg bin frames (including the current
     one) gives the averaged bins; volatility is |bins - avg_bins| per bin,
     itself averaged over the last n_vol frames. With n_vol = 8 the
     volatility window spans 8*1024/44100 ~ 0.186 s.
  4. A bin triggers when its current volatility strictly exceeds
     (trigger_val/100) * max_trigger.
  5. The hop's level in dBFS maps linearly to a 0-100 dynamics percentage
     between min_db and max_db.

Everything here is pure and deterministic: replaying a hop stream through a
fresh Analyzer reproduces identical frames bit for bit.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .audio import HOP_SIZE, SAMPLE_RATE, SampleHop, rms_db

N_BINS = 12
N_SPECTRUM = HOP_SIZE // 2  # 512 folded magnitude points
BIN_WIDTH_HZ = SAMPLE_RATE / HOP_SIZE  # 43.066 Hz per FFT point

# Fixed partition of the 512 folded points into 12 groups, low to high.
# Near-geometric (ratio ~1.5) with the first group pinned to {0, 1}
# (0-86.13 Hz); sizes sum to exactly 512.
BIN_SIZES = (2, 3, 5, 7, 10, 15, 23, 34, 51, 77, 115, 170)
_EDGES = np.concatenate(([0], np.cumsum(BIN_SIZES)))
BIN_RANGES = tuple((int(_EDGES[i]), int(_EDGES[i + 1] - 1)) for i in range(N_BINS))

# Upper-middle index of each group; the first group's midpoint rounds up to
# index 1 so "bin-centered" test tones never sit on DC.
BIN_CENTER_INDICES = tuple((lo + hi + 1) // 2 for lo, hi in BIN_RANGES)

WINDOWS = ("rect", "hann")


@dataclass(frozen=True)
class AnalysisConfig:
    """Tunable DSP parameters. Defaults are the engine's canonical settings."""

    n_avg: int = 4            # bin-average window (num-points-to-average)
    n_vol: int = 8            # volatility-average window (num-points-to-average-vol)
    trigger_val: float = 70.0  # percent of max_trigger that fires a trigger
    max_trigger: float = 0.15
    max_average: float = 0.3   # full-scale reference for color/force mapping
    range_max: float = 0.3     # raw bin value that maps to 1.0
    min_db: float = -60.0
    max_db: float = 0.0
    window: str = "rect"

    def __post_init__(self):
        if self.n_avg < 1 or self.n_vol < 1:
            raise ValueError("window lengths must be >= 1")
        if not 0.0 <= self.trigger_val <= 100.0:
            raise ValueError("trigger_val must be in [0, 100]")
        if not 0.0 < self.range_max <= 1.0:
            raise ValueError("range_max must be in (0, 1]")
        if self.max_trigger <= 0.0 or self.max_average <= 0.0:
            raise ValueError("max_trigger and max_average must be positive")
        if self.max_db <= self.min_db:
            raise ValueError("max_db must exceed min_db")
        if self.window not in WINDOWS:
            raise ValueError(f"window must be one of {WINDOWS}")

    @property
    def trigger_threshold(self) -> float:
        return (self.trigger_val / 100.0) * self.max_trigger


@dataclass(frozen=True)
class MagnitudeSpectrum:
    """512 folded (doubled) FFT magnitudes, 43.066 Hz apart."""

    magnitudes: np.ndarray
    bin_width_hz: float = BIN_WIDTH_HZ

    def __post_init__(self):
        if self.magnitudes.shape != (N_SPECTRUM,):
            raise ValueError(f"spectrum must have {N_SPECTRUM} points")
        self.magnitudes.setflags(write=False)


@dataclass(frozen=True)
class AnalysisFrame:
    """Everything the particle engine needs from one hop."""

    hop_index: int
    bins: np.ndarray
    avg_bins: np.ndarray
    volatility: np.ndarray
    avg_volatility: np.ndarray
    triggers: np.ndarray          # 12 bools
    dynamics_percent: float

    def __post_init__(self):
        for arr in (self.bins, self.avg_bins, self.volatility,
                    self.avg_volatility, self.triggers):
            if arr.shape != (N_BINS,):
                raise ValueError("analysis vectors must have 12 entries")
            arr.setflags(write=False)


_HANN = np.hanning(HOP_SIZE)


def fft_magnitude(hop: SampleHop, window: str = "rect") -> MagnitudeSpectrum:
    """Folded magnitude spectrum of one hop: |FFT|[0:512] * 2.

    All 512 kept points are doubled, DC included; bin values are relative so
    the 2x overcount on the (inaudible) DC point is harmless.
    """
    x = hop.samples
    if window == "hann":
        x = x * _HANN
    elif window != "rect":
        raise ValueError(f"window must be one of {WINDOWS}")
    mags = 2.0 * np.abs(np.fft.rfft(x)[:N_SPECTRUM])
    return MagnitudeSpectrum(magnitudes=mags)


def raw_bins(spectrum: MagnitudeSpectrum) -> np.ndarray:
    """Sum each partition group and scale by 1/1024, so a full-scale
    integer-cycle tone reads 1.0 in its bin regardless of group width."""
    sums = np.add.reduceat(spectrum.magnitudes, _EDGES[:-1])
    return sums / HOP_SIZE


def make_bins(spectrum: MagnitudeSpectrum, cfg: AnalysisConfig) -> np.ndarray:
    """12 normalized bin values in [0, 1]: raw / range_max, clamped."""
    return np.minimum(raw_bins(spectrum) / cfg.range_max, 1.0)


def dynamics_percent(db: float, cfg: AnalysisConfig) -> float:
    """Linear map of a dBFS level onto [0, 100] between min_db and max_db."""
    pct = 100.0 * (db - cfg.min_db) / (cfg.max_db - cfg.min_db)
    return min(max(pct, 0.0), 100.0)


def update_running_avg(history: list[np.ndarray], current: np.ndarray,
                       n: int) -> np.ndarray:
    """Per-bin mean of the most recent min(n, available) frames, current
    included. During warm-up the mean runs over what exists."""
    if n < 1:
        raise ValueError("window length must be >= 1")
    recent = list(history[-(n - 1):] if n > 1 else []) + [current]
    return np.mean(recent, axis=0)


def volatility(current: np.ndarray, avg: np.ndarray) -> np.ndarray:
    """Per-bin absolute deviation of the current bins from their average."""
    return np.abs(current - avg)


def avg_volatility(history: list[np.ndarray], n: int) -> np.ndarray:
    """Running mean of the last <= n volatility frames (warm-up as above)."""
    if n < 1:
        raise ValueError("window length must be >= 1")
    if not history:
        raise ValueError("need at least one volatility frame")
    recent = history[-n:]
    return np.mean(recent, axis=0)


def window_duration_s(n: int) -> float:
    """Wall-clock span of an n-hop averaging window."""
    return n * HOP_SIZE / SAMPLE_RATE


def compute_triggers(vol: np.ndarray, cfg: AnalysisConfig) -> np.ndarray:
    """Trigger bin i when volatility strictly exceeds the threshold.
    Boundary equality deliberately does not fire."""
    return vol > cfg.trigger_threshold


class Analyzer:
    """Rolling-window state for one hop stream.

    Owns the bin and volatility histories; analyze() is deterministic given
    (hop sequence, config sequence). The config may be swapped between hops
    (set_config) — window-length changes take effect by trimming or growing
    the retained history, never mid-hop.
    """

    def __init__(self, cfg: AnalysisConfig | None = None):
        self.cfg = cfg or AnalysisConfig()
        self._bin_history: deque[np.ndarray] = deque()
        self._vol_history: deque[np.ndarray] = deque()

    def set_config(self, cfg: AnalysisConfig) -> None:
        self.cfg = cfg

    def reset(self) -> None:
        self._bin_history.clear()
        self._vol_history.clear()

    def analyze(self, hop: SampleHop) -> AnalysisFrame:
        cfg = self.cfg
        spectrum = fft_magnitude(hop, cfg.window)
        bins = make_bins(spectrum, cfg)

        avg = update_running_avg(list(self._bin_history), bins, cfg.n_avg)
        vol = volatility(bins, avg)

        self._vol_history.append(vol)
        while len(self._vol_history) > cfg.n_vol:
            self._vol_history.popleft()
        avg_vol = avg_volatility(list(self._vol_history), cfg.n_vol)

        self._bin_history.append(bins)
        while len(self._bin_history) > max(cfg.n_avg - 1, 0):
            self._bin_history.popleft()

        trig = compute_triggers(vol, cfg)
        dyn = dynamics_percent(rms_db(hop), cfg)

        return AnalysisFrame(
            hop_index=hop.index,
            bins=bins,
            avg_bins=avg,
            volatility=vol,
            avg_volatility=avg_vol,
            triggers=trig,
            dynamics_percent=dyn,
        )


def analyze_hop(hop: SampleHop, state: Analyzer,
                cfg: AnalysisConfig | None = None) -> AnalysisFrame:
    """One-shot form of Analyzer.analyze, optionally swapping config first."""
    if cfg is not None:
        state.set_config(cfg)
    return state.analyze(hop)
