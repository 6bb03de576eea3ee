"""Command-line driver.

Headless mode decodes an input file, runs the full analysis + simulation
pipeline deterministically, and writes a .synframes file (and optionally a
CSV dump of the analysis series). Serve mode runs the websocket server for
the operator console. Flags use the same vocabulary as the live control
messages, and a config file (UTF-8 `key = value` lines, `#` comments on
their own lines) can set anything a flag can; flags win over the file.
"""

from __future__ import annotations

import argparse
import csv
import sys
from contextlib import ExitStack
from dataclasses import dataclass, field, replace
from pathlib import Path

from .analysis import AnalysisConfig
from .audio import AudioError, open_pcm_stream, open_source
from .engine import SimConfig
from .palette import Preset, Rgb, load_preset
from .pipeline import Pipeline
from .server import DEFAULT_PORT
from .session import ControlState
from .wire import encode

# The canonical default settings, printed by --defaults-dump.
DEFAULTS_BLOCK = """\
num-points-to-average = 4
num-points-to-average-vol = 8
trigger-val = 70
max-average = 0.3
max-trigger = 0.15
color-sensitivity = 2
range_max = 0.3"""

MODES = ("headless", "serve")


class ConfigError(Exception):
    """Bad config file contents; message names the key and/or line."""


@dataclass(frozen=True)
class EngineConfig:
    """Everything a run needs: DSP tuning, sim tuning, IO, and mode."""

    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    preset: str = "default"
    color_sensitivity: float | None = None   # None: take the preset's value
    bin_colors: tuple[tuple[int, str], ...] = ()
    input: str | None = None
    stdin_channels: int | None = None
    mode: str = "headless"
    port: int = DEFAULT_PORT
    frames_out: str | None = None
    csv_out: str | None = None
    resample: bool = False

    def build_preset(self) -> Preset:
        preset = load_preset(self.preset)
        if self.color_sensitivity is not None:
            preset = replace(preset, color_sensitivity=self.color_sensitivity)
        for index, hexcolor in self.bin_colors:
            preset = preset.with_color(index, Rgb.from_hex(hexcolor))
        return preset


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _int_at_least(minimum):
    def parse(text):
        v = int(text)
        if v < minimum:
            raise ValueError(f"must be >= {minimum}, got {v}")
        return v
    return parse


def _float_in(lo=None, hi=None, lo_open=False):
    def parse(text):
        v = float(text)
        if lo is not None and (v <= lo if lo_open else v < lo):
            raise ValueError(f"must be {'>' if lo_open else '>='} {lo}, got {v}")
        if hi is not None and v > hi:
            raise ValueError(f"must be <= {hi}, got {v}")
        return v
    return parse


def _enum(*choices):
    def parse(text):
        if text not in choices:
            raise ValueError(f"must be one of {choices}, got {text!r}")
        return text
    return parse


def _hex_color(text: str) -> str:
    Rgb.from_hex(text)  # validation only; keep the original string
    return text.lower()


# key -> (parser, config path). Paths address EngineConfig fields,
# "analysis.x" / "sim.x" for the nested configs.
_KEYS = {
    "num-points-to-average":     (_int_at_least(1), "analysis.n_avg"),
    "num-points-to-average-vol": (_int_at_least(1), "analysis.n_vol"),
    "trigger-val":               (_float_in(0.0, 100.0), "analysis.trigger_val"),
    "max-average":               (_float_in(0.0, None, lo_open=True), "analysis.max_average"),
    "max-trigger":               (_float_in(0.0, None, lo_open=True), "analysis.max_trigger"),
    "range_max":                 (_float_in(0.0, 1.0, lo_open=True), "analysis.range_max"),
    "min-db":                    (float, "analysis.min_db"),
    "max-db":                    (float, "analysis.max_db"),
    "window":                    (_enum("rect", "hann"), "analysis.window"),
    "color-sensitivity":         (_float_in(0.0, None, lo_open=True), "color_sensitivity"),
    "seed":                      (int, "sim.seed"),
    "particles":                 (_int_at_least(12), "sim.n_particles"),
    "drag":                      (_float_in(0.0, 1.0, lo_open=True), "sim.drag"),
    "base-force":                (_float_in(0.0, None), "sim.base_force"),
    "target-walk-scale":         (_float_in(0.0, None), "sim.target_walk_scale"),
    "preset":                    (str, "preset"),
    "input":                     (str, "input"),
    "mode":                      (_enum(*MODES), "mode"),
    "port":                      (_int_at_least(1), "port"),
    "frames-out":                (str, "frames_out"),
    "csv-out":                   (str, "csv_out"),
    "resample":                  (_parse_bool, "resample"),
}
_KEYS.update({f"bin-color-{i}": (_hex_color, f"bin_colors.{i}")
              for i in range(12)})


def _apply_key(cfg: EngineConfig, key: str, value) -> EngineConfig:
    _, path = _KEYS[key]
    if path.startswith("analysis."):
        return replace(cfg, analysis=replace(cfg.analysis,
                                             **{path.split(".", 1)[1]: value}))
    if path.startswith("sim."):
        return replace(cfg, sim=replace(cfg.sim,
                                        **{path.split(".", 1)[1]: value}))
    if path.startswith("bin_colors."):
        index = int(path.split(".", 1)[1])
        colors = dict(cfg.bin_colors)
        colors[index] = value
        return replace(cfg, bin_colors=tuple(sorted(colors.items())))
    return replace(cfg, **{path: value})


def load_config(path: str | Path) -> EngineConfig:
    """Parse a config file; unspecified keys keep their defaults, unknown
    keys are errors."""
    cfg = EngineConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        parser, _ = _KEYS[key]
        try:
            parsed = parser(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {key}: {exc}") from exc
        try:
            cfg = _apply_key(cfg, key, parsed)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {key}: {exc}") from exc
    return cfg


def serialize_config(cfg: EngineConfig) -> str:
    """Config-file text that loads back to an equal EngineConfig."""
    a, s = cfg.analysis, cfg.sim
    pairs = [
        ("num-points-to-average", a.n_avg),
        ("num-points-to-average-vol", a.n_vol),
        ("trigger-val", a.trigger_val),
        ("max-average", a.max_average),
        ("max-trigger", a.max_trigger),
        ("range_max", a.range_max),
        ("min-db", a.min_db),
        ("max-db", a.max_db),
        ("window", a.window),
        ("seed", s.seed),
        ("particles", s.n_particles),
        ("drag", s.drag),
        ("base-force", s.base_force),
        ("target-walk-scale", s.target_walk_scale),
        ("preset", cfg.preset),
        ("mode", cfg.mode),
        ("port", cfg.port),
        ("resample", "true" if cfg.resample else "false"),
    ]
    if cfg.color_sensitivity is not None:
        pairs.append(("color-sensitivity", cfg.color_sensitivity))
    for name, value in (("input", cfg.input), ("frames-out", cfg.frames_out),
                        ("csv-out", cfg.csv_out)):
        if value is not None:
            pairs.append((name, value))
    pairs += [(f"bin-color-{i}", hexcolor) for i, hexcolor in cfg.bin_colors]
    return "\n".join(f"{k} = {v!r}" if isinstance(v, float)
                     else f"{k} = {v}" for k, v in pairs) + "\n"


def _build_arg_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="synviz",
        description="audio-reactive particle visualization engine")
    p.add_argument("--input", help="WAV file to analyze")
    p.add_argument("--stdin-pcm", type=int, metavar="CHANNELS",
                   help="read interleaved float32 PCM at 44100 Hz from stdin")
    p.add_argument("--headless", action="store_true",
                   help="process the whole input and exit")
    p.add_argument("--serve", action="store_true",
                   help="run the live websocket server")
    p.add_argument("--frames-out", help="write frames to this .synframes file")
    p.add_argument("--csv-out", help="write the analysis series as CSV")
    p.add_argument("--config", help="config file (key = value lines)")
    p.add_argument("--preset", help="preset name or .preset file")
    p.add_argument("--port", type=int, help=f"serve port (default {DEFAULT_PORT})")
    p.add_argument("--seed", type=int, help="simulation seed (default 0)")
    p.add_argument("--particles", type=int, help="particle count (default 100000)")
    p.add_argument("--window", choices=("rect", "hann"), help="FFT window")
    p.add_argument("--resample", action="store_true",
                   help="linearly resample non-44100 Hz inputs instead of rejecting")
    p.add_argument("--frontend-dir", help="static operator console to serve at /")
    p.add_argument("--defaults-dump", action="store_true",
                   help="print the default settings and exit")
    # live-tunable parameters, same names as the control vocabulary
    p.add_argument("--num-points-to-average", type=int, dest="n_avg")
    p.add_argument("--num-points-to-average-vol", type=int, dest="n_vol")
    p.add_argument("--trigger-val", type=float)
    p.add_argument("--max-average", type=float)
    p.add_argument("--max-trigger", type=float)
    p.add_argument("--color-sensitivity", type=float)
    p.add_argument("--range_max", type=float)
    return p


def _merge_flags(cfg: EngineConfig, args: argparse.Namespace) -> EngineConfig:
    flag_keys = [
        ("num-points-to-average", args.n_avg),
        ("num-points-to-average-vol", args.n_vol),
        ("trigger-val", args.trigger_val),
        ("max-average", args.max_average),
        ("max-trigger", args.max_trigger),
        ("color-sensitivity", args.color_sensitivity),
        ("range_max", args.range_max),
        ("window", args.window),
        ("seed", args.seed),
        ("particles", args.particles),
        ("preset", args.preset),
        ("input", args.input),
        ("port", args.port),
        ("frames-out", args.frames_out),
        ("csv-out", args.csv_out),
    ]
    for key, value in flag_keys:
        if value is None:
            continue
        parser, _ = _KEYS[key]
        try:
            cfg = _apply_key(cfg, key, parser(str(value)))
        except ValueError as exc:
            raise ConfigError(f"--{key}: {exc}") from exc
    if args.stdin_pcm is not None:
        cfg = replace(cfg, stdin_channels=args.stdin_pcm)
    if args.resample:
        cfg = replace(cfg, resample=True)
    if args.serve:
        cfg = replace(cfg, mode="serve")
    elif args.headless:
        cfg = replace(cfg, mode="headless")
    return cfg


def _csv_header() -> list[str]:
    cols = ["hop_index"]
    for prefix in ("bin", "avg_bin", "vol", "avg_vol", "trig"):
        cols += [f"{prefix}_{i}" for i in range(12)]
    return cols + ["dynamics"]


def _run_headless(cfg: EngineConfig) -> int:
    if cfg.input is not None:
        try:
            source = open_source(cfg.input, resample=cfg.resample)
        except AudioError as exc:
            print(f"synviz: {exc}", file=sys.stderr)
            return 1
    elif cfg.stdin_channels is not None:
        source = open_pcm_stream(sys.stdin.buffer, cfg.stdin_channels)
    else:
        print("synviz: headless mode needs --input or --stdin-pcm",
              file=sys.stderr)
        return 1

    state = ControlState(analysis=cfg.analysis, sim=cfg.sim,
                         preset=cfg.build_preset())
    pipeline = Pipeline(state, source)

    n = 0
    with ExitStack() as stack:
        frames_fh = (stack.enter_context(open(cfg.frames_out, "wb"))
                     if cfg.frames_out else None)
        csv_writer = None
        if cfg.csv_out:
            csv_fh = stack.enter_context(
                open(cfg.csv_out, "w", newline="", encoding="utf-8"))
            csv_writer = csv.writer(csv_fh)
            csv_writer.writerow(_csv_header())
        for packet in pipeline.frames():
            if frames_fh is not None:
                frames_fh.write(encode(packet))
            if csv_writer is not None:
                row = [packet.frame_index]
                for arr in (packet.bins, packet.avg_bins, packet.volatility,
                            packet.avg_volatility):
                    row += [f"{v:g}" for v in arr]
                row += [int(t) for t in packet.triggers]
                row.append(f"{packet.dynamics_percent:g}")
                csv_writer.writerow(row)
            n += 1
    print(f"{n} frames written")
    return 0


def _run_serve(cfg: EngineConfig, frontend_dir: str | None) -> int:
    from .server import serve

    source = None
    if cfg.input is not None:
        try:
            source = open_source(cfg.input, resample=cfg.resample)
        except AudioError as exc:
            print(f"synviz: {exc}", file=sys.stderr)
            return 1
    state = ControlState(analysis=cfg.analysis, sim=cfg.sim,
                         preset=cfg.build_preset(), song_path=cfg.input)
    pipeline = Pipeline(state, source, pace=True, resample=cfg.resample)
    candidate = Path(frontend_dir) if frontend_dir else Path("frontend/dist")
    frontend = candidate if candidate.is_dir() else None
    serve(pipeline, port=cfg.port, frontend_dir=frontend)
    return 0


def run(argv: list[str]) -> int:
    parser = _build_arg_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.defaults_dump:
        print(DEFAULTS_BLOCK)
        return 0

    try:
        cfg = load_config(args.config) if args.config else EngineConfig()
        cfg = _merge_flags(cfg, args)
    except ConfigError as exc:
        print(f"synviz: {exc}", file=sys.stderr)
        return 1

    if cfg.mode == "serve":
        return _run_serve(cfg, args.frontend_dir)
    return _run_headless(cfg)


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
