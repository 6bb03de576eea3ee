"""Control messages and the live configuration bundle.

Clients steer the running engine with small JSON messages; the pipeline
applies them between hops so every frame is computed under exactly one
config snapshot. Message shapes:

  {"type": "set_param", "name": "<param>", "value": <number | "#rrggbb">}
  {"type": "load_song", "path": "<file>"}
  {"type": "play"} | {"type": "pause"} | {"type": "reset_sim"}
  {"type": "set_preset", "name": "<preset>"}

Tunable parameter names (value ranges enforced here):

  num-points-to-average      int >= 1
  num-points-to-average-vol  int >= 1
  trigger-val                0..100
  max-average                > 0
  max-trigger                > 0
  color-sensitivity          > 0
  range_max                  (0, 1]
  bin-color-<i>              hex string "#rrggbb", i in 0..11

Replies are {"type": "ack", ...} echoing the applied value, or
{"type": "error", "message": ...} with the config left untouched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Any

from .analysis import AnalysisConfig
from .engine import SimConfig
from .palette import N_BINS, Preset, Rgb, load_preset

PARAM_NAMES = (
    "num-points-to-average",
    "num-points-to-average-vol",
    "trigger-val",
    "max-average",
    "max-trigger",
    "color-sensitivity",
    "range_max",
) + tuple(f"bin-color-{i}" for i in range(N_BINS))

_INT_PARAMS = {"num-points-to-average", "num-points-to-average-vol"}


class ControlError(Exception):
    """Malformed or out-of-range control message."""


@dataclass(frozen=True)
class ControlMessage:
    kind: str                      # set_param | load_song | play | pause
    #                              # | reset_sim | set_preset
    name: str | None = None
    value: Any = None
    path: str | None = None


@dataclass(frozen=True)
class ControlState:
    """Everything a control message may retune, applied at hop boundaries."""

    analysis: AnalysisConfig
    sim: SimConfig
    preset: Preset
    playing: bool = True
    song_path: str | None = None


def parse_control(raw: str | bytes | dict) -> ControlMessage:
    """Validate shape (not ranges) of an incoming control message."""
    if isinstance(raw, (str, bytes)):
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ControlError(f"not valid JSON: {exc}") from exc
    else:
        obj = raw
    if not isinstance(obj, dict):
        raise ControlError("control message must be a JSON object")

    kind = obj.get("type")
    if kind == "set_param":
        name = obj.get("name")
        if name not in PARAM_NAMES:
            raise ControlError(f"unknown parameter {name!r}")
        if "value" not in obj:
            raise ControlError("set_param requires a value")
        return ControlMessage(kind="set_param", name=name, value=obj["value"])
    if kind == "load_song":
        path = obj.get("path")
        if not isinstance(path, str) or not path:
            raise ControlError("load_song requires a path")
        return ControlMessage(kind="load_song", path=path)
    if kind == "set_preset":
        name = obj.get("name")
        if not isinstance(name, str) or not name:
            raise ControlError("set_preset requires a name")
        return ControlMessage(kind="set_preset", name=name)
    if kind in ("play", "pause", "reset_sim"):
        return ControlMessage(kind=kind)
    raise ControlError(f"unknown control type {kind!r}")


def _numeric(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ControlError(f"{name} needs a numeric value, got {value!r}")
    return float(value)


def _set_param(state: ControlState, name: str, value: Any) -> ControlState:
    if name.startswith("bin-color-"):
        if not isinstance(value, str):
            raise ControlError(f"{name} needs a hex string value")
        index = int(name.removeprefix("bin-color-"))
        try:
            color = Rgb.from_hex(value)
        except ValueError as exc:
            raise ControlError(f"{name}: {exc}") from exc
        return replace(state, preset=state.preset.with_color(index, color))

    num = _numeric(name, value)
    if name in _INT_PARAMS:
        if num != int(num):
            raise ControlError(f"{name} must be an integer, got {value!r}")
        num = int(num)
    try:
        if name == "num-points-to-average":
            return replace(state, analysis=replace(state.analysis, n_avg=num))
        if name == "num-points-to-average-vol":
            return replace(state, analysis=replace(state.analysis, n_vol=num))
        if name == "trigger-val":
            return replace(state, analysis=replace(state.analysis, trigger_val=num))
        if name == "max-average":
            return replace(state, analysis=replace(state.analysis, max_average=num))
        if name == "max-trigger":
            return replace(state, analysis=replace(state.analysis, max_trigger=num))
        if name == "range_max":
            return replace(state, analysis=replace(state.analysis, range_max=num))
        if name == "color-sensitivity":
            return replace(state, preset=replace(state.preset,
                                                 color_sensitivity=num))
    except ValueError as exc:
        raise ControlError(f"{name}: {exc}") from exc
    raise ControlError(f"unknown parameter {name!r}")


def apply_control(state: ControlState, msg: ControlMessage) -> ControlState:
    """Pure config transition; raises ControlError and leaves state intact
    on invalid input. reset_sim passes through unchanged (the engine action
    happens in the pipeline, not the config)."""
    if msg.kind == "set_param":
        return _set_param(state, msg.name, msg.value)
    if msg.kind == "set_preset":
        try:
            preset = load_preset(msg.name)
        except (FileNotFoundError, ValueError) as exc:
            raise ControlError(f"set_preset: {exc}") from exc
        return replace(state, preset=preset)
    if msg.kind == "play":
        return replace(state, playing=True)
    if msg.kind == "pause":
        return replace(state, playing=False)
    if msg.kind == "load_song":
        return replace(state, song_path=msg.path)
    if msg.kind == "reset_sim":
        return state
    raise ControlError(f"unknown control type {msg.kind!r}")


def ack_payload(msg: ControlMessage, state: ControlState) -> dict:
    """The acknowledgment body for an applied message, echoing the value
    actually in effect."""
    if msg.kind == "set_param":
        if msg.name.startswith("bin-color-"):
            index = int(msg.name.removeprefix("bin-color-"))
            value: Any = state.preset.base_colors[index].to_hex()
        elif msg.name == "num-points-to-average":
            value = state.analysis.n_avg
        elif msg.name == "num-points-to-average-vol":
            value = state.analysis.n_vol
        elif msg.name == "trigger-val":
            value = state.analysis.trigger_val
        elif msg.name == "max-average":
            value = state.analysis.max_average
        elif msg.name == "max-trigger":
            value = state.analysis.max_trigger
        elif msg.name == "range_max":
            value = state.analysis.range_max
        else:  # color-sensitivity
            value = state.preset.color_sensitivity
        return {"type": "ack", "action": "set_param",
                "name": msg.name, "value": value}
    if msg.kind == "set_preset":
        return {"type": "ack", "action": "set_preset",
                "name": state.preset.name,
                "colors": [c.to_hex() for c in state.preset.base_colors],
                "color_sensitivity": state.preset.color_sensitivity}
    if msg.kind == "load_song":
        return {"type": "ack", "action": "load_song", "path": msg.path}
    return {"type": "ack", "action": msg.kind}
