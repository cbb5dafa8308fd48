"""TCP service: one independent session per connection, shared frozen model."""

from __future__ import annotations

import asyncio
import logging

from .engine import EngineConfig, Session
from .musicspace import MusicSpace
from .nets import Checkpoint
from .protocol import (VersionMismatch, error_message, event_message,
                       frame_from_message, parse_client_message, serialize,
                       snapshot_message)

log = logging.getLogger("posespace.server")


class PoseSpaceServer:
    def __init__(self, checkpoint: Checkpoint, space: MusicSpace,
                 config: EngineConfig | None = None) -> None:
        self.checkpoint = checkpoint
        self.space = space
        self.config = config or EngineConfig()
        self._server: asyncio.AbstractServer | None = None

    async def start(self, host: str, port: int) -> asyncio.AbstractServer:
        self._server = await asyncio.start_server(self._handle, host, port)
        addrs = ", ".join(str(s.getsockname()) for s in self._server.sockets)
        log.info("listening on %s", addrs)
        return self._server

    async def serve_forever(self, host: str, port: int) -> None:
        server = await self.start(host, port)
        async with server:
            await server.serve_forever()

    @property
    def port(self) -> int:
        assert self._server is not None
        return self._server.sockets[0].getsockname()[1]

    async def _handle(self, reader: asyncio.StreamReader,
                      writer: asyncio.StreamWriter) -> None:
        peer = writer.get_extra_info("peername")
        log.info("client connected: %s", peer)
        session = Session(self.checkpoint, self.space, self.config)
        writer.write(serialize(snapshot_message(
            self.space, session.calibration, session.mode, session.n_frames)).encode())
        await writer.drain()
        try:
            while True:
                line = await reader.readline()
                if not line:
                    break
                line = line.decode().strip()
                if not line:
                    continue
                try:
                    msg = parse_client_message(line)
                except VersionMismatch as exc:
                    writer.write(serialize(error_message("version-mismatch", str(exc))).encode())
                    await writer.drain()
                    break
                except Exception as exc:
                    writer.write(serialize(error_message("bad-message", str(exc))).encode())
                    await writer.drain()
                    continue
                try:
                    for out in self._dispatch(session, msg):
                        writer.write(serialize(out).encode())
                    await writer.drain()
                except Exception as exc:  # keep the connection alive on bad input
                    writer.write(serialize(error_message("bad-message", str(exc))).encode())
                    await writer.drain()
        except (ConnectionResetError, asyncio.IncompleteReadError):
            pass
        finally:
            log.info("client disconnected: %s", peer)
            writer.close()
            try:
                await writer.wait_closed()
            except (ConnectionResetError, BrokenPipeError):
                pass

    def _dispatch(self, session: Session, msg: dict) -> list[dict]:
        if msg["type"] == "frame":
            frame = frame_from_message(msg)
            return [event_message(e) for e in session.push_frame(frame)]
        name = msg["name"]
        if name == "reset":
            session.reset()
            return []
        if name == "calibrate":
            session.calibrate(msg.get("latents", []))
            return []
        # set-config: replace debounce parameters for this session only.
        current = session.config
        session.config = EngineConfig(
            confidence_threshold=msg.get("confidence_threshold",
                                         current.confidence_threshold),
            consecutive_windows=msg.get("consecutive_windows",
                                        current.consecutive_windows),
            cooldown_s=msg.get("cooldown_s", current.cooldown_s))
        return []
