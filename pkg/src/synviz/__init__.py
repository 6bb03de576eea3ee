"""synviz: audio-reactive synesthetic particle visualization engine.

Turns a stream of 1024-sample audio hops into a 12-band spectral analysis,
drives a deterministic 100k-particle simulation from it, and streams the
result as compact binary frames over a websocket (or to disk, headless).
"""

from .analysis import (
    AnalysisConfig,
    AnalysisFrame,
    Analyzer,
    BIN_CENTER_INDICES,
    BIN_RANGES,
    BIN_SIZES,
    window_duration_s,
)
from .audio import (
    HOP_SIZE,
    SAMPLE_RATE,
    AudioError,
    AudioSource,
    SampleHop,
    UnsupportedFormatError,
    UnsupportedSampleRateError,
    open_pcm_stream,
    open_source,
    rms_db,
)
from .engine import (
    Engine,
    EngineParams,
    GroupParams,
    HOP_DT,
    N_GROUPS,
    SimConfig,
    parameter_inventory,
    y_center,
)
from .palette import (
    DEFAULT_BIN_HEX,
    EMOTION_COLORS,
    KEY_EMOTIONS,
    Preset,
    Rgb,
    SCRIABIN_COLORS,
    load_preset,
    serialize_preset,
)
from .pipeline import Pipeline
from .session import ControlError, ControlMessage, ControlState, parse_control
from .wire import FramePacket, decode, encode, iter_frames, read_frames, write_frames

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig", "AnalysisFrame", "Analyzer",
    "BIN_CENTER_INDICES", "BIN_RANGES", "BIN_SIZES", "window_duration_s",
    "HOP_SIZE", "SAMPLE_RATE", "AudioError", "AudioSource", "SampleHop",
    "UnsupportedFormatError", "UnsupportedSampleRateError",
    "open_pcm_stream", "open_source", "rms_db",
    "Engine", "EngineParams", "GroupParams", "HOP_DT", "N_GROUPS",
    "SimConfig", "parameter_inventory", "y_center",
    "DEFAULT_BIN_HEX", "EMOTION_COLORS", "KEY_EMOTIONS", "Preset", "Rgb",
    "SCRIABIN_COLORS", "load_preset", "serialize_preset",
    "Pipeline",
    "ControlError", "ControlMessage", "ControlState", "parse_control",
    "FramePacket", "decode", "encode", "iter_frames", "read_frames",
    "write_frames",
    "__version__",
]
