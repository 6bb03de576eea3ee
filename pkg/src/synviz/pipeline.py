"""Frame production: hops in, packets out, controls applied between hops.

One Pipeline owns the analyzer windows, the particle engine, and the current
ControlState. produce() turns one hop into one FramePacket; apply() performs
a control transition (and its engine side effects) strictly between hops.
run() is the live loop used by the server: it drains queued controls at
every hop boundary, paces output to real time when asked, and idles —
still serving controls — once the source is exhausted or paused.

Frame indices and timestamps are pipeline-level: they keep increasing across
reset_sim and load_song, so clients always see a strictly increasing
sequence.
"""

from __future__ import annotations

import queue
import threading
import time
from typing import Callable, Iterator

from .analysis import Analyzer
from .audio import AudioError, AudioSource, open_source
from .engine import Engine, snapshot
from .session import (ControlError, ControlMessage, ControlState,
                      ack_payload, apply_control)
from .wire import FramePacket, encode

Reply = Callable[[dict], None]


class Pipeline:
    def __init__(self, state: ControlState, source: AudioSource | None = None,
                 pace: bool = False, resample: bool = False):
        self.state = state
        self.source = source
        self.pace = pace
        self.resample = resample
        self.analyzer = Analyzer(state.analysis)
        self.engine = Engine(state.sim, state.preset)
        self.frame_index = 0
        self.inbox: queue.Queue[tuple[ControlMessage, Reply]] = queue.Queue()
        self.stop_event = threading.Event()

    # -- core transitions -------------------------------------------------

    def produce(self, hop) -> FramePacket:
        frame = self.analyzer.analyze(hop)
        params = self.engine.advance(frame, self.state.preset,
                                     self.state.analysis)
        packet = snapshot(self.engine.state, frame, params,
                          frame_index=self.frame_index,
                          timestamp_s=self.frame_index * self.engine.cfg.dt)
        self.frame_index += 1
        return packet

    def apply(self, msg: ControlMessage) -> dict:
        """Apply one control message; returns the ack payload.
        Raises ControlError with all state untouched on invalid input."""
        if msg.kind == "load_song":
            # open first so a bad path leaves the current song playing
            try:
                new_source = open_source(msg.path, resample=self.resample)
            except AudioError as exc:
                raise ControlError(str(exc)) from exc
            self.state = apply_control(self.state, msg)
            self.source = new_source
            self.analyzer.reset()
            return ack_payload(msg, self.state)

        self.state = apply_control(self.state, msg)
        if msg.kind == "reset_sim":
            self.engine.reset(self.state.preset)
        self.analyzer.set_config(self.state.analysis)
        return ack_payload(msg, self.state)

    def submit(self, msg: ControlMessage, reply: Reply) -> None:
        """Queue a control for the next hop boundary (thread-safe)."""
        self.inbox.put((msg, reply))

    # -- headless ----------------------------------------------------------

    def frames(self) -> Iterator[FramePacket]:
        """Drain the whole source as fast as possible (no controls)."""
        if self.source is None:
            raise ValueError("pipeline has no source")
        for hop in self.source.hops():
            yield self.produce(hop)

    # -- live loop ----------------------------------------------------------

    def _drain_inbox(self) -> None:
        while True:
            try:
                msg, reply = self.inbox.get_nowait()
            except queue.Empty:
                return
            try:
                reply(self.apply(msg))
            except ControlError as exc:
                reply({"type": "error", "message": str(exc)})

    def run(self, emit: Callable[[bytes], None]) -> None:
        """Serve loop: emit encoded packets until stop_event is set."""
        hop_dt = self.engine.cfg.dt
        t0 = time.monotonic()
        emitted_since_t0 = 0
        while not self.stop_event.is_set():
            self._drain_inbox()
            hop = None
            if self.state.playing and self.source is not None:
                hop = self.source.next_hop()
            if hop is None:
                # paused or exhausted: stay responsive to controls
                try:
                    msg, reply = self.inbox.get(timeout=0.05)
                except queue.Empty:
                    t0, emitted_since_t0 = time.monotonic(), 0
                    continue
                try:
                    reply(self.apply(msg))
                except ControlError as exc:
                    reply({"type": "error", "message": str(exc)})
                t0, emitted_since_t0 = time.monotonic(), 0
                continue
            emit(encode(self.produce(hop)))
            emitted_since_t0 += 1
            if self.pace:
                target = t0 + emitted_since_t0 * hop_dt
                delay = target - time.monotonic()
                if delay > 0:
                    time.sleep(delay)

    def stop(self) -> None:
        self.stop_event.set()
