import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from conftest import center_freq, mem_source, tone
from synviz.analysis import AnalysisConfig
from synviz.audio import HOP_SIZE
from synviz.engine import SimConfig
from synviz.palette import load_preset
from synviz.pipeline import Pipeline
from synviz.server import create_app
from synviz.session import ControlState
from synviz.wire import decode


def make_pipeline(n_hops=4000, n_particles=48, pace=True, with_source=True):
    state = ControlState(analysis=AnalysisConfig(),
                         sim=SimConfig(n_particles=n_particles),
                         preset=load_preset("default"))
    source = None
    if with_source:
        source = mem_source(tone(center_freq(4), n_hops * HOP_SIZE, 0.2))
    return Pipeline(state, source, pace=pace)


def next_message(ws):
    """Return ('bytes', payload) or ('text', payload) for one ws message."""
    msg = ws.receive()
    if msg.get("bytes") is not None:
        return "bytes", msg["bytes"]
    return "text", msg["text"]


def recv_until_text(ws, limit=200):
    """Collect frames until a text (ack/error) message arrives."""
    frames = []
    for _ in range(limit):
        kind, payload = next_message(ws)
        if kind == "text":
            return frames, json.loads(payload)
        frames.append(payload)
    raise AssertionError("no text reply within message budget")


def test_frames_stream_and_decode():
    app = create_app(make_pipeline())
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            kind, payload = next_message(ws)
            assert kind == "bytes"
            packet = decode(payload)
            assert packet.n_particles == 48
            assert packet.bins[4] == pytest.approx(2 / 3, abs=1e-3)


def test_frame_indices_increase_latest_wins():
    app = create_app(make_pipeline())
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            indices = []
            for _ in range(5):
                kind, payload = next_message(ws)
                assert kind == "bytes"
                indices.append(decode(payload).frame_index)
            assert indices == sorted(indices)
            assert len(set(indices)) == len(indices)


def test_ack_arrives_before_first_frame_with_new_value():
    app = create_app(make_pipeline())
    old = load_preset("default").base_colors[0]
    old_rgb = np.array([old.r, old.g, old.b], dtype=np.float32)
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            next_message(ws)   # stream is alive
            ws.send_text(json.dumps({"type": "set_param",
                                     "name": "bin-color-0",
                                     "value": "#ffffff"}))
            before, ack = recv_until_text(ws)
            assert ack == {"type": "ack", "action": "set_param",
                           "name": "bin-color-0", "value": "#ffffff"}
            # every frame that arrived before the ack used the old color
            for payload in before:
                np.testing.assert_allclose(decode(payload).group_params[0, :3],
                                           old_rgb, atol=1e-6)
            # every frame after the ack carries the new color
            for _ in range(3):
                kind, payload = next_message(ws)
                assert kind == "bytes"
                np.testing.assert_allclose(decode(payload).group_params[0, :3],
                                           [1.0, 1.0, 1.0], atol=1e-6)


def test_ack_without_source_is_immediate():
    app = create_app(make_pipeline(with_source=False))
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text(json.dumps({"type": "set_param",
                                     "name": "trigger-val", "value": 31}))
            frames, reply = recv_until_text(ws)
            assert frames == []
            assert reply["value"] == 31.0


def test_malformed_json_yields_error_reply():
    app = create_app(make_pipeline(with_source=False))
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text("{broken")
            _, reply = recv_until_text(ws)
            assert reply["type"] == "error"
            assert "JSON" in reply["message"]


def test_unknown_param_yields_error_reply():
    app = create_app(make_pipeline(with_source=False))
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text(json.dumps({"type": "set_param",
                                     "name": "warp-speed", "value": 9}))
            _, reply = recv_until_text(ws)
            assert reply["type"] == "error"
            assert "warp-speed" in reply["message"]


def test_out_of_range_value_yields_error_and_state_survives():
    app = create_app(make_pipeline(with_source=False))
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text(json.dumps({"type": "set_param",
                                     "name": "range_max", "value": 7}))
            _, reply = recv_until_text(ws)
            assert reply["type"] == "error"
            ws.send_text(json.dumps({"type": "set_param",
                                     "name": "range_max", "value": 0.5}))
            _, reply = recv_until_text(ws)
            assert reply == {"type": "ack", "action": "set_param",
                             "name": "range_max", "value": 0.5}


def test_preset_ack_carries_palette():
    app = create_app(make_pipeline(with_source=False))
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            ws.send_text(json.dumps({"type": "set_preset", "name": "scriabin"}))
            _, reply = recv_until_text(ws)
            assert reply["action"] == "set_preset"
            assert reply["colors"][0] == "#8b0000"
            assert len(reply["colors"]) == 12


def test_acks_go_only_to_their_sender():
    app = create_app(make_pipeline())
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as wa, \
             client.websocket_connect("/ws") as wb:
            next_message(wa)
            next_message(wb)
            wa.send_text(json.dumps({"type": "set_param",
                                     "name": "trigger-val", "value": 12}))
            _, ack = recv_until_text(wa)
            assert ack["value"] == 12.0
            # B sees frames only; drain a handful to look for stray text
            for _ in range(6):
                kind, _payload = next_message(wb)
                assert kind == "bytes"


def test_pause_and_play_over_websocket():
    app = create_app(make_pipeline())
    with TestClient(app) as client:
        with client.websocket_connect("/ws") as ws:
            next_message(ws)
            ws.send_text(json.dumps({"type": "pause"}))
            _, ack = recv_until_text(ws)
            assert ack["action"] == "pause"
            ws.send_text(json.dumps({"type": "play"}))
            frames, ack = recv_until_text(ws)
            assert ack["action"] == "play"
            # paused stream delivers at most the one in-flight frame
            assert len(frames) <= 1
            kind, _ = next_message(ws)
            assert kind == "bytes"


def test_static_console_mount(tmp_path):
    (tmp_path / "index.html").write_text("<html><body>console</body></html>")
    app = create_app(make_pipeline(with_source=False), frontend_dir=tmp_path)
    with TestClient(app) as client:
        page = client.get("/")
        assert page.status_code == 200
        assert "console" in page.text


def test_no_static_mount_without_directory():
    app = create_app(make_pipeline(with_source=False), frontend_dir=None)
    with TestClient(app) as client:
        assert client.get("/").status_code == 404
