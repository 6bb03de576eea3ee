import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synviz.wire import (
    FIXED_SIZE,
    MAGIC,
    PARTICLE_STRIDE,
    FramePacket,
    PacketError,
    TruncatedFrameError,
    decode,
    encode,
    iter_frames,
    packet_size,
    read_frames,
    write_frames,
)


def random_packet(rng: np.random.Generator, n_particles=40,
                  frame_index=0) -> FramePacket:
    return FramePacket(
        frame_index=frame_index,
        timestamp_s=frame_index * 1024 / 44100,
        bins=rng.uniform(0, 1, 12),
        avg_bins=rng.uniform(0, 1, 12),
        volatility=rng.uniform(0, 0.5, 12),
        avg_volatility=rng.uniform(0, 0.5, 12),
        triggers=rng.uniform(0, 1, 12) > 0.5,
        dynamics_percent=float(rng.uniform(0, 100)),
        group_params=rng.uniform(-2, 2, (12, 10)),
        color_sensitivity=float(rng.uniform(0.5, 4)),
        positions=rng.uniform(-15, 15, (n_particles, 3)),
        velocities=rng.uniform(-1, 1, (n_particles, 3)),
        colors=rng.uniform(0, 1, (n_particles, 4)),
    )


def test_fixed_prefix_is_706_bytes():
    # 20 header + 192 analysis floats + 6 mask/dynamics + 480 params
    # + 4 sensitivity + 4 count
    assert FIXED_SIZE == 706
    assert PARTICLE_STRIDE == 40


def test_encode_length_matches_packet_size():
    packet = random_packet(np.random.default_rng(0), n_particles=11)
    assert len(encode(packet)) == packet_size(11) == 706 + 11 * 40


def test_round_trip_exact():
    packet = random_packet(np.random.default_rng(1))
    assert decode(encode(packet)) == packet


def test_round_trip_zero_particles():
    packet = random_packet(np.random.default_rng(2), n_particles=0)
    data = encode(packet)
    assert len(data) == FIXED_SIZE
    assert decode(data) == packet


def test_construction_quantizes_to_wire_precision():
    packet = random_packet(np.random.default_rng(3))
    assert packet.bins.dtype == np.float32
    assert packet.dynamics_percent == float(np.float32(packet.dynamics_percent))
    # so encode/decode cannot change any value
    assert decode(encode(packet)) == packet


def test_header_layout():
    packet = random_packet(np.random.default_rng(4), frame_index=7)
    data = encode(packet)
    assert data[:4] == MAGIC
    assert int.from_bytes(data[4:12], "little") == 7
    ts = np.frombuffer(data[12:20], dtype="<f8")[0]
    assert ts == packet.timestamp_s


def test_trigger_mask_bit_order():
    rng = np.random.default_rng(5)
    triggers = np.zeros(12, bool)
    triggers[0] = triggers[3] = triggers[11] = True
    packet = FramePacket(
        frame_index=0, timestamp_s=0.0,
        bins=np.zeros(12), avg_bins=np.zeros(12),
        volatility=np.zeros(12), avg_volatility=np.zeros(12),
        triggers=triggers, dynamics_percent=0.0,
        group_params=rng.uniform(size=(12, 10)), color_sensitivity=2.0,
        positions=np.zeros((1, 3)), velocities=np.zeros((1, 3)),
        colors=np.zeros((1, 4)))
    assert packet.trigger_mask == (1 << 0) | (1 << 3) | (1 << 11)
    np.testing.assert_array_equal(decode(encode(packet)).triggers, triggers)


def test_decode_rejects_bad_magic():
    data = bytearray(encode(random_packet(np.random.default_rng(6))))
    data[:4] = b"NOPE"
    with pytest.raises(PacketError, match="magic"):
        decode(bytes(data))


def test_decode_rejects_trailing_bytes():
    data = encode(random_packet(np.random.default_rng(7))) + b"xx"
    with pytest.raises(PacketError, match="trailing"):
        decode(data)


def test_decode_rejects_truncation():
    data = encode(random_packet(np.random.default_rng(8)))
    with pytest.raises(PacketError):
        decode(data[:100])
    with pytest.raises(PacketError):
        decode(data[:-40])


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(0, 64),
       index=st.integers(0, 2**40))
def test_round_trip_property(seed, n, index):
    packet = random_packet(np.random.default_rng(seed), n_particles=n,
                           frame_index=index)
    again = decode(encode(packet))
    assert again == packet
    assert again.frame_index == index


# -- files and streams -----------------------------------------------------------

def test_write_then_read_frames(tmp_path):
    rng = np.random.default_rng(9)
    packets = [random_packet(rng, frame_index=i) for i in range(5)]
    path = tmp_path / "clip.synframes"
    assert write_frames(packets, path) == 5
    again = read_frames(path)
    assert again == packets


def test_read_frames_truncated_file_reports_clean_prefix(tmp_path):
    rng = np.random.default_rng(10)
    packets = [random_packet(rng, frame_index=i) for i in range(3)]
    path = tmp_path / "cut.synframes"
    data = b"".join(encode(p) for p in packets)
    path.write_bytes(data[:-50])   # cut inside the last packet
    with pytest.raises(TruncatedFrameError) as info:
        read_frames(path)
    assert info.value.packets == packets[:2]
    assert info.value.frame_index == 2


def test_iter_frames_incremental(tmp_path):
    rng = np.random.default_rng(11)
    packets = [random_packet(rng, n_particles=i * 3, frame_index=i)
               for i in range(4)]
    stream = io.BytesIO(b"".join(encode(p) for p in packets))
    assert list(iter_frames(stream)) == packets


def test_iter_frames_truncated_stream():
    data = encode(random_packet(np.random.default_rng(12)))
    with pytest.raises(PacketError):
        list(iter_frames(io.BytesIO(data[: FIXED_SIZE - 10])))
    with pytest.raises(PacketError):
        list(iter_frames(io.BytesIO(data[:-20])))


def test_packets_compare_by_value():
    a = random_packet(np.random.default_rng(13))
    b = random_packet(np.random.default_rng(13))
    c = random_packet(np.random.default_rng(14))
    assert a == b
    assert a != c
    assert a != "not a packet"
