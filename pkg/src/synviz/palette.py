"""Color tables and per-bin base palettes.

Three fixed lookup tables live here: the Scriabin pitch-class-to-color
correspondence, a color-emotion survey table, and a musical-key-to-emotion
table. Named colors are bound to frozen hex values (conventional CSS/X11
coordinates where a name exists) so lookups are stable across releases.

Per-bin base colors ship as preset data files, not code. The built-in
presets are:

  default  — dark oceanic lows rising to bright metallic highs, with
             Rec. 709 luma strictly increasing from bin 0 to bin 11.
  oceanic  — a darker, bluer variant of the same trend.
  scriabin — each bin takes the Scriabin color of the pitch class nearest
             that bin's center frequency.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

N_BINS = 12


@dataclass(frozen=True)
class Rgb:
    r: float
    g: float
    b: float

    def __post_init__(self):
        for ch in (self.r, self.g, self.b):
            if not 0.0 <= ch <= 1.0:
                raise ValueError(f"channel {ch} outside [0, 1]")

    @classmethod
    def from_hex(cls, text: str) -> "Rgb":
        s = text.strip().lstrip("#")
        if len(s) != 6:
            raise ValueError(f"expected #rrggbb, got {text!r}")
        return cls(*(int(s[i:i + 2], 16) / 255.0 for i in (0, 2, 4)))

    def to_hex(self) -> str:
        return "#" + "".join(f"{round(ch * 255):02x}" for ch in (self.r, self.g, self.b))

    def luma(self) -> float:
        """Rec. 709 luma — the lightness metric used by palette tests."""
        return 0.2126 * self.r + 0.7152 * self.g + 0.0722 * self.b


# Scriabin correspondence: pitch class -> named color -> frozen hex.
SCRIABIN_COLORS: dict[str, str] = {
    "F":  "#8b0000",  # dark red
    "C":  "#ff4500",  # orange red
    "G":  "#ffa500",  # orange
    "D":  "#ffff00",  # yellow
    "A":  "#008000",  # green
    "E":  "#add8e6",  # light blue
    "B":  "#0000cd",  # medium blue
    "F#": "#4169e1",  # royal blue
    "Db": "#301934",  # dark purple
    "Ab": "#b19cd9",  # light purple
    "Eb": "#c71585",  # red violet
    "Bb": "#bc8f8f",  # rosy brown
}

# Dominant color per emotion from the color-emotion survey table.
EMOTION_COLORS: dict[str, str] = {
    "Anger":     "#ff0000",
    "Calmness":  "#add8e6",
    "Disgust":   "#6b8e23",  # brownish green
    "Fear":      "#000000",
    "Envy":      "#008000",
    "Happiness": "#ffff00",
    "Jealousy":  "#008000",
    "Sadness":   "#00008b",
}

# Musical key -> emotion character.
KEY_EMOTIONS: dict[str, str] = {
    "C Major":  "Innocently Happy",
    "C Minor":  "Innocently Sad",
    "C# Minor": "Despair",
    "D Major":  "Triumphant",
    "D Minor":  "Serious",
    "D# Minor": "Deep Distress",
    "F Major":  "Furious",
    "A Major":  "Joyful",
}

# Pitch-class order used when mapping frequencies to the Scriabin table.
PITCH_CLASS_NAMES = ("C", "Db", "D", "Eb", "E", "F", "F#", "G", "Ab", "A", "Bb", "B")

# default preset colors: dark blue/green/purple lows -> bright pink/yellow/
# silver highs, luma strictly increasing (verified by tests).
DEFAULT_BIN_HEX = (
    "#101b3c", "#2a1a5e", "#173f5f", "#1f5e49", "#2e6b52", "#3f7a66",
    "#4f7fa3", "#8f7cc9", "#d96fae", "#ff6fd8", "#ffd94a", "#f2f4f8",
)


def scriabin_color(pitch_class: str) -> Rgb:
    """Scriabin table lookup for one of the 12 pitch-class names."""
    try:
        return Rgb.from_hex(SCRIABIN_COLORS[pitch_class])
    except KeyError:
        raise KeyError(f"unknown pitch class {pitch_class!r}; "
                       f"expected one of {sorted(SCRIABIN_COLORS)}") from None


def emotion_color(emotion: str) -> Rgb:
    try:
        return Rgb.from_hex(EMOTION_COLORS[emotion])
    except KeyError:
        raise KeyError(f"unknown emotion {emotion!r}; "
                       f"expected one of {sorted(EMOTION_COLORS)}") from None


def key_emotion(key: str) -> str:
    try:
        return KEY_EMOTIONS[key]
    except KeyError:
        raise KeyError(f"unknown key {key!r}; "
                       f"expected one of {sorted(KEY_EMOTIONS)}") from None


def default_bin_palette() -> list[Rgb]:
    """12 base colors, dark-and-oceanic to bright-and-metallic."""
    return [Rgb.from_hex(h) for h in DEFAULT_BIN_HEX]


@dataclass(frozen=True)
class Preset:
    """Named set of 12 per-bin base colors plus the global color gain."""

    name: str
    base_colors: tuple[Rgb, ...]
    color_sensitivity: float = 2.0
    emotion: str | None = None

    def __post_init__(self):
        if len(self.base_colors) != N_BINS:
            raise ValueError("preset needs exactly 12 base colors")
        if self.color_sensitivity <= 0.0:
            raise ValueError("color_sensitivity must be positive")

    def with_color(self, index: int, color: Rgb) -> "Preset":
        if not 0 <= index < N_BINS:
            raise ValueError(f"bin index {index} out of range")
        colors = list(self.base_colors)
        colors[index] = color
        return replace(self, base_colors=tuple(colors))


BUILTIN_PRESETS = ("default", "oceanic", "scriabin")


def _parse_preset(text: str, fallback_name: str) -> Preset:
    name = fallback_name
    sensitivity = 2.0
    emotion = None
    colors: dict[int, Rgb] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"preset line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key == "name":
            name = value
        elif key == "color-sensitivity":
            sensitivity = float(value)
        elif key == "emotion":
            emotion = value
        elif key.startswith("bin-color-"):
            colors[int(key.removeprefix("bin-color-"))] = Rgb.from_hex(value)
        else:
            raise ValueError(f"preset line {lineno}: unknown key {key!r}")
    missing = sorted(set(range(N_BINS)) - set(colors))
    if missing:
        raise ValueError(f"preset {name!r} missing bin colors {missing}")
    return Preset(
        name=name,
        base_colors=tuple(colors[i] for i in range(N_BINS)),
        color_sensitivity=sensitivity,
        emotion=emotion,
    )


def serialize_preset(preset: Preset) -> str:
    lines = [f"name = {preset.name}",
             f"color-sensitivity = {preset.color_sensitivity:g}"]
    if preset.emotion:
        lines.append(f"emotion = {preset.emotion}")
    lines += [f"bin-color-{i} = {c.to_hex()}"
              for i, c in enumerate(preset.base_colors)]
    return "\n".join(lines) + "\n"


def load_preset(name_or_path: str | Path) -> Preset:
    """Load a preset by built-in name or from a .preset file path."""
    name = str(name_or_path)
    if name in BUILTIN_PRESETS:
        text = (resources.files("synviz") / "presets" / f"{name}.preset").read_text()
        return _parse_preset(text, name)
    path = Path(name_or_path)
    if not path.exists():
        raise FileNotFoundError(
            f"no preset named {name!r} (built-ins: {', '.join(BUILTIN_PRESETS)}) "
            f"and no such file")
    return _parse_preset(path.read_text(), path.stem)
