"""Binary frame format and .synframes file IO.

One FramePacket carries everything a client needs to draw one hop. All
multi-byte values are little-endian; floats are IEEE-754 binary32 except the
header timestamp (binary64). Layout, in order:

  header     "SYN1" magic (4s) | frame_index (u64) | timestamp_s (f64)
  analysis   bins, avg_bins, volatility, avg_volatility (4 x 12 x f32)
             trigger bitmask (u16, bit i = bin i) | dynamics_percent (f32)
  params     12 groups x 10 f32:
             r, g, b, tx, ty, tz, force_amt, color_mag, emphasis, y_center
             then color_sensitivity (f32)
  particles  count (u32) | count x 10 f32: px py pz vx vy vz r g b a

A .synframes file is nothing but FramePackets back to back.

FramePacket quantizes its fields to the wire precision on construction, so
decode(encode(p)) == p holds exactly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, fields
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

import numpy as np

MAGIC = b"SYN1"
N_BINS = 12

_HEADER = struct.Struct("<4sQd")
_ANALYSIS_TAIL = struct.Struct("<Hf")     # trigger mask, dynamics
_SENS = struct.Struct("<f")
_COUNT = struct.Struct("<I")

_ANALYSIS_FLOATS = 4 * N_BINS
_PARAMS_FLOATS = N_BINS * 10
# Fixed-size prefix before the particle payload.
FIXED_SIZE = (_HEADER.size + 4 * _ANALYSIS_FLOATS + _ANALYSIS_TAIL.size
              + 4 * _PARAMS_FLOATS + _SENS.size + _COUNT.size)
PARTICLE_STRIDE = 10 * 4


class PacketError(Exception):
    """Malformed or corrupt frame data."""


class TruncatedFrameError(PacketError):
    """A frame stream ended mid-packet.

    Carries the packets that decoded cleanly before the cut (`packets`) and
    the index of the incomplete frame (`frame_index`).
    """

    def __init__(self, message: str, packets: list["FramePacket"],
                 frame_index: int):
        super().__init__(message)
        self.packets = packets
        self.frame_index = frame_index


def _f32(values, shape) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float32).reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FramePacket:
    frame_index: int
    timestamp_s: float
    bins: np.ndarray
    avg_bins: np.ndarray
    volatility: np.ndarray
    avg_volatility: np.ndarray
    triggers: np.ndarray           # (12,) bool
    dynamics_percent: float
    group_params: np.ndarray       # (12, 10) float32, see module docstring
    color_sensitivity: float
    positions: np.ndarray          # (N, 3) float32
    velocities: np.ndarray         # (N, 3) float32
    colors: np.ndarray             # (N, 4) float32

    def __post_init__(self):
        n = len(self.positions)
        object.__setattr__(self, "bins", _f32(self.bins, (N_BINS,)))
        object.__setattr__(self, "avg_bins", _f32(self.avg_bins, (N_BINS,)))
        object.__setattr__(self, "volatility", _f32(self.volatility, (N_BINS,)))
        object.__setattr__(self, "avg_volatility",
                           _f32(self.avg_volatility, (N_BINS,)))
        trig = np.ascontiguousarray(self.triggers, dtype=bool).reshape((N_BINS,))
        trig.setflags(write=False)
        object.__setattr__(self, "triggers", trig)
        object.__setattr__(self, "dynamics_percent",
                           float(np.float32(self.dynamics_percent)))
        object.__setattr__(self, "group_params",
                           _f32(self.group_params, (N_BINS, 10)))
        object.__setattr__(self, "color_sensitivity",
                           float(np.float32(self.color_sensitivity)))
        object.__setattr__(self, "positions", _f32(self.positions, (n, 3)))
        object.__setattr__(self, "velocities", _f32(self.velocities, (n, 3)))
        object.__setattr__(self, "colors", _f32(self.colors, (n, 4)))

    @property
    def n_particles(self) -> int:
        return len(self.positions)

    @property
    def trigger_mask(self) -> int:
        return sum(1 << i for i, t in enumerate(self.triggers) if t)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FramePacket):
            return NotImplemented
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, np.ndarray):
                if not (a.shape == b.shape and np.array_equal(a, b)):
                    return False
            elif a != b:
                return False
        return True


def encode(packet: FramePacket) -> bytes:
    """Serialize one packet to the wire layout."""
    parts = [
        _HEADER.pack(MAGIC, packet.frame_index, packet.timestamp_s),
        packet.bins.astype("<f4", copy=False).tobytes(),
        packet.avg_bins.astype("<f4", copy=False).tobytes(),
        packet.volatility.astype("<f4", copy=False).tobytes(),
        packet.avg_volatility.astype("<f4", copy=False).tobytes(),
        _ANALYSIS_TAIL.pack(packet.trigger_mask, packet.dynamics_percent),
        packet.group_params.astype("<f4", copy=False).tobytes(),
        _SENS.pack(packet.color_sensitivity),
        _COUNT.pack(packet.n_particles),
    ]
    particle_block = np.hstack(
        (packet.positions, packet.velocities, packet.colors)
    ).astype("<f4", copy=False)
    parts.append(particle_block.tobytes())
    return b"".join(parts)


def packet_size(n_particles: int) -> int:
    return FIXED_SIZE + n_particles * PARTICLE_STRIDE


def _decode_at(buf: bytes | memoryview, offset: int) -> tuple[FramePacket, int]:
    """Decode one packet starting at offset; returns (packet, next_offset).
    Raises PacketError on bad magic, TruncatedFrameError-shaped ValueError
    (via PacketError) if the buffer ends early."""
    view = memoryview(buf)
    if len(view) - offset < FIXED_SIZE:
        raise PacketError("incomplete header")
    magic, frame_index, timestamp = _HEADER.unpack_from(view, offset)
    if magic != MAGIC:
        raise PacketError(f"bad magic {bytes(magic)!r} at offset {offset}")
    pos = offset + _HEADER.size

    def take_f32(count) -> np.ndarray:
        nonlocal pos
        arr = np.frombuffer(view, dtype="<f4", count=count, offset=pos)
        pos += 4 * count
        return arr

    bins = take_f32(N_BINS)
    avg_bins = take_f32(N_BINS)
    vol = take_f32(N_BINS)
    avg_vol = take_f32(N_BINS)
    mask, dynamics = _ANALYSIS_TAIL.unpack_from(view, pos)
    pos += _ANALYSIS_TAIL.size
    group_params = take_f32(_PARAMS_FLOATS).reshape(N_BINS, 10)
    (sens,) = _SENS.unpack_from(view, pos)
    pos += _SENS.size
    (count,) = _COUNT.unpack_from(view, pos)
    pos += _COUNT.size

    need = count * PARTICLE_STRIDE
    if len(view) - pos < need:
        raise PacketError(f"particle payload truncated (frame {frame_index})")
    block = np.frombuffer(view, dtype="<f4", count=count * 10,
                          offset=pos).reshape(count, 10)
    pos += need

    triggers = np.array([(mask >> i) & 1 for i in range(N_BINS)], dtype=bool)
    packet = FramePacket(
        frame_index=frame_index,
        timestamp_s=timestamp,
        bins=bins, avg_bins=avg_bins, volatility=vol, avg_volatility=avg_vol,
        triggers=triggers, dynamics_percent=dynamics,
        group_params=group_params, color_sensitivity=sens,
        positions=block[:, 0:3], velocities=block[:, 3:6], colors=block[:, 6:10],
    )
    return packet, pos


def decode(data: bytes) -> FramePacket:
    """Decode exactly one packet; trailing bytes are an error."""
    packet, end = _decode_at(data, 0)
    if end != len(data):
        raise PacketError(f"{len(data) - end} trailing bytes after packet")
    return packet


def write_frames(packets: Iterable[FramePacket], path: str | Path) -> int:
    """Append-encode packets to a .synframes file; returns the count."""
    n = 0
    with open(path, "wb") as fh:
        for packet in packets:
            fh.write(encode(packet))
            n += 1
    return n


def read_frames(path: str | Path) -> list[FramePacket]:
    """Read a whole .synframes file.

    Raises TruncatedFrameError if the file ends mid-packet; the exception
    carries every packet that decoded cleanly.
    """
    data = Path(path).read_bytes()
    packets: list[FramePacket] = []
    offset = 0
    while offset < len(data):
        try:
            packet, offset = _decode_at(data, offset)
        except PacketError as exc:
            raise TruncatedFrameError(
                f"{path}: file truncated mid-packet after {len(packets)} "
                f"complete frames: {exc}",
                packets=packets, frame_index=len(packets)) from exc
        packets.append(packet)
    return packets


def iter_frames(stream: BinaryIO) -> Iterator[FramePacket]:
    """Incrementally decode packets from a binary stream."""
    while True:
        head = stream.read(FIXED_SIZE)
        if not head:
            return
        if len(head) < FIXED_SIZE:
            raise PacketError("stream truncated mid-header")
        (count,) = _COUNT.unpack_from(head, FIXED_SIZE - _COUNT.size)
        body = stream.read(count * PARTICLE_STRIDE)
        if len(body) < count * PARTICLE_STRIDE:
            raise PacketError("stream truncated mid-particles")
        packet, _ = _decode_at(head + body, 0)
        yield packet
