"""Websocket fan-out for the live engine.

One pipeline thread produces encoded frames; the server broadcasts each to
every connected client over a single-port websocket endpoint (/ws), with a
per-client latest-wins buffer so a slow viewer drops frames instead of
stalling the performance. Control messages arrive as JSON text on the same
socket, are queued to the pipeline, and are answered with an ack before the
first frame computed under the new value (replies and frames both funnel
through the pipeline thread in order).

If a built operator console exists (frontend/dist), it is served at /.
"""

from __future__ import annotations

import asyncio
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .pipeline import Pipeline
from .session import ControlError, parse_control

DEFAULT_PORT = 7878


@dataclass
class _Client:
    """Outbound state for one connection. Acks queue up (they are tiny and
    must all arrive, in order); frames overwrite each other (latest wins)."""

    replies: list[dict] = field(default_factory=list)
    latest_frame: bytes | None = None
    wake: asyncio.Event = field(default_factory=asyncio.Event)


class Hub:
    """Fan-out point between the pipeline thread and client tasks."""

    def __init__(self):
        self.loop: asyncio.AbstractEventLoop | None = None
        self._clients: dict[int, _Client] = {}
        self._next_id = 0

    def bind(self, loop: asyncio.AbstractEventLoop) -> None:
        self.loop = loop

    def attach(self) -> tuple[int, _Client]:
        cid = self._next_id
        self._next_id += 1
        client = _Client()
        self._clients[cid] = client
        return cid, client

    def detach(self, cid: int) -> None:
        self._clients.pop(cid, None)

    # called on the event loop
    def _publish(self, data: bytes) -> None:
        for client in self._clients.values():
            client.latest_frame = data
            client.wake.set()

    def _reply(self, cid: int, payload: dict) -> None:
        client = self._clients.get(cid)
        if client is not None:
            client.replies.append(payload)
            client.wake.set()

    # called from the pipeline thread
    def publish_threadsafe(self, data: bytes) -> None:
        if self.loop is not None:
            self.loop.call_soon_threadsafe(self._publish, data)

    def reply_threadsafe(self, cid: int, payload: dict) -> None:
        if self.loop is not None:
            self.loop.call_soon_threadsafe(self._reply, cid, payload)


async def _sender(ws: WebSocket, client: _Client) -> None:
    while True:
        await client.wake.wait()
        client.wake.clear()
        while client.replies:
            await ws.send_json(client.replies.pop(0))
        if client.latest_frame is not None:
            frame, client.latest_frame = client.latest_frame, None
            await ws.send_bytes(frame)


def create_app(pipeline: Pipeline, frontend_dir: str | Path | None = None
               ) -> FastAPI:
    hub = Hub()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        hub.bind(asyncio.get_running_loop())
        thread = threading.Thread(
            target=pipeline.run, args=(hub.publish_threadsafe,),
            name="synviz-pipeline", daemon=True)
        thread.start()
        try:
            yield
        finally:
            pipeline.stop()
            thread.join(timeout=5)

    app = FastAPI(title="synviz", lifespan=lifespan)
    app.state.pipeline = pipeline
    app.state.hub = hub

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        cid, client = hub.attach()
        sender = asyncio.create_task(_sender(ws, client))
        try:
            while True:
                text = await ws.receive_text()
                try:
                    msg = parse_control(text)
                except ControlError as exc:
                    hub._reply(cid, {"type": "error", "message": str(exc)})
                    continue
                pipeline.submit(msg, lambda payload, c=cid:
                                hub.reply_threadsafe(c, payload))
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            hub.detach(cid)

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True),
                  name="console")
    return app


def serve(pipeline: Pipeline, port: int = DEFAULT_PORT,
          frontend_dir: str | Path | None = None) -> None:
    """Run the server until interrupted (blocking)."""
    import uvicorn

    app = create_app(pipeline, frontend_dir=frontend_dir)
    uvicorn.run(app, host="0.0.0.0", port=port, log_level="warning")
