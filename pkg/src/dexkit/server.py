"""Teleop protocol server: ndjson over TCP plus an HTTP/WebSocket bridge.

One simulation loop owns the robot state.  Connection handlers feed it
inbound hand frames through ordered queues and every tick it broadcasts
``joint_state``, ``joint_command``, and ``record_status`` to all clients.
Browsers cannot open raw TCP sockets, so the same message stream is mirrored
over a WebSocket at ``/ws`` on the HTTP port (TCP port + 1), which also
serves the operator UI bundle and dataset files statically.
"""

from __future__ import annotations

import asyncio
import errno
from collections import deque
from pathlib import Path

from aiohttp import WSMsgType, web

from . import skeleton
from .errors import DexkitError, MalformedMessage, UnknownTag
from .model import EpisodeFrame, JointCommand
from .protocol import (
    ErrorMsg,
    GestureEventMsg,
    HandFrameMsg,
    JointCommandMsg,
    JointStateMsg,
    PromptMsg,
    RecordStatusMsg,
    decode_message,
    encode_message,
)
from .recorder import PromptGenerator, SessionRecorder
from .retargeting import retarget_frame
from .rig import RigConfig, default_rig
from .sim import SimParams, initial_state, render_frame, step_sim

DEFAULT_PORT = 7447
BACKPRESSURE_LIMIT = 64

ZERO_DQ = (0.0,) * skeleton.NUM_JOINTS


class _ClientQueue:
    """Outbound per-client buffer with state-message backpressure.

    When a client lags more than BACKPRESSURE_LIMIT messages, the oldest
    droppable (non-command) message is discarded; commands are never lost.
    """

    def __init__(self):
        self._items: deque[tuple[str, bool]] = deque()
        self._ready = asyncio.Event()
        self.closed = False

    def put(self, line: str, droppable: bool) -> None:
        self._items.append((line, droppable))
        if len(self._items) > BACKPRESSURE_LIMIT:
            for i, (_, can_drop) in enumerate(self._items):
                if can_drop:
                    del self._items[i]
                    break
        self._ready.set()

    async def get(self) -> str:
        while not self._items:
            self._ready.clear()
            if self.closed:
                raise asyncio.CancelledError
            await self._ready.wait()
        line, _ = self._items.popleft()
        return line

    def close(self) -> None:
        self.closed = True
        self._ready.set()


class TeleopServer:
    """Single-loop teleop service; see module docstring for the layout."""

    def __init__(self, rig: RigConfig | None = None, port: int = DEFAULT_PORT,
                 host: str = "127.0.0.1", tick_hz: float = 30.0,
                 record_root=None, seed: int = 0,
                 ui_dir=None, dataset_dir=None):
        self.rig = default_rig() if rig is None else rig
        self.host = host
        self.port = port
        self.http_port: int | None = None
        self.tick_hz = tick_hz
        self.params = SimParams(tick=1.0 / tick_hz)
        self.state = initial_state(self.params)
        self.ui_dir = Path(ui_dir) if ui_dir else None
        self.dataset_dir = Path(dataset_dir) if dataset_dir else None
        self.recorder = None
        if record_root is not None:
            self.recorder = SessionRecorder(
                record_root, self.rig.config_hash(), PromptGenerator(seed)
            )
        self._clients: set[_ClientQueue] = set()
        self._control_frame = None      # latest right-hand frame
        self._gesture_frames = deque()  # left-hand frames, processed in order
        self._warm: dict = {}
        self._last_command = JointCommand(t=0.0, dq=ZERO_DQ)
        self._tcp_server = None
        self._http_runner = None
        self._tick_task = None

    # -- lifecycle -------------------------------------------------------

    async def start(self) -> None:
        from .errors import PortInUse

        try:
            self._tcp_server = await asyncio.start_server(
                self._handle_tcp, self.host, self.port
            )
        except OSError as exc:
            if exc.errno == errno.EADDRINUSE:
                raise PortInUse(f"port {self.port} on {self.host}") from exc
            raise
        self.port = self._tcp_server.sockets[0].getsockname()[1]
        await self._start_http(self.port + 1)
        self._tick_task = asyncio.create_task(self._tick_loop())

    async def stop(self) -> None:
        if self._tick_task is not None:
            self._tick_task.cancel()
            try:
                await self._tick_task
            except asyncio.CancelledError:
                pass
        if self._tcp_server is not None:
            self._tcp_server.close()
            await self._tcp_server.wait_closed()
        if self._http_runner is not None:
            await self._http_runner.cleanup()
        for client in list(self._clients):
            client.close()
        if self.recorder is not None:
            self.recorder.finish()

    async def _start_http(self, port: int) -> None:
        from .errors import PortInUse

        app = web.Application()
        app.router.add_get("/ws", self._handle_ws)
        if self.dataset_dir is not None:
            app.router.add_static("/data/", self.dataset_dir)
        if self.ui_dir is not None:
            app.router.add_get("/", self._index)
            app.router.add_static("/", self.ui_dir)
        self._http_runner = web.AppRunner(app)
        await self._http_runner.setup()
        site = web.TCPSite(self._http_runner, self.host, port)
        try:
            await site.start()
        except OSError as exc:
            if exc.errno == errno.EADDRINUSE:
                raise PortInUse(f"port {port} on {self.host}") from exc
            raise
        self.http_port = port

    async def _index(self, request):
        return web.FileResponse(self.ui_dir / "index.html")

    # -- broadcast hub ---------------------------------------------------

    def _broadcast(self, msg, droppable: bool = True) -> None:
        line = encode_message(msg)
        for client in self._clients:
            client.put(line, droppable)

    # -- inbound dispatch --------------------------------------------------

    def _dispatch_line(self, line: str, reply) -> None:
        try:
            msg = decode_message(line)
        except UnknownTag as exc:
            reply(encode_message(ErrorMsg("unknown_tag", str(exc))))
            return
        except MalformedMessage as exc:
            reply(encode_message(ErrorMsg("malformed", str(exc))))
            return
        if isinstance(msg, HandFrameMsg):
            if msg.hand == "left":
                self._gesture_frames.append(msg.frame)
            else:
                self._control_frame = msg.frame
        # other valid tags are accepted but are not inputs to the loop

    # -- TCP -----------------------------------------------------------------

    async def _handle_tcp(self, reader: asyncio.StreamReader,
                          writer: asyncio.StreamWriter) -> None:
        queue = _ClientQueue()
        self._clients.add(queue)

        async def pump():
            try:
                while True:
                    line = await queue.get()
                    writer.write(line.encode() + b"\n")
                    await writer.drain()
            except (asyncio.CancelledError, ConnectionError):
                pass

        pump_task = asyncio.create_task(pump())
        try:
            while True:
                raw = await reader.readline()
                if not raw:
                    break
                line = raw.decode(errors="replace").strip()
                if line:
                    self._dispatch_line(line, lambda reply: queue.put(reply, False))
        except ConnectionError:
            pass
        finally:
            self._clients.discard(queue)
            queue.close()
            pump_task.cancel()
            writer.close()

    # -- WebSocket bridge ------------------------------------------------

    async def _handle_ws(self, request):
        ws = web.WebSocketResponse()
        await ws.prepare(request)
        queue = _ClientQueue()
        self._clients.add(queue)

        async def pump():
            try:
                while True:
                    await ws.send_str(await queue.get())
            except (asyncio.CancelledError, ConnectionError):
                pass

        pump_task = asyncio.create_task(pump())
        try:
            async for msg in ws:
                if msg.type == WSMsgType.TEXT:
                    self._dispatch_line(msg.data, lambda reply: queue.put(reply, False))
                elif msg.type == WSMsgType.ERROR:
                    break
        finally:
            self._clients.discard(queue)
            queue.close()
            pump_task.cancel()
        return ws

    # -- simulation loop ---------------------------------------------------

    async def _tick_loop(self) -> None:
        loop = asyncio.get_running_loop()
        next_tick = loop.time()
        while True:
            next_tick += self.params.tick
            delay = next_tick - loop.time()
            if delay > 0:
                await asyncio.sleep(delay)
            else:
                # fell behind real time: reschedule from now, but always
                # yield so connection handlers keep running
                next_tick = loop.time()
                await asyncio.sleep(0)
            self._tick()

    def _tick(self) -> None:
        t = self.state.t

        while self._gesture_frames:
            frame = self._gesture_frames.popleft()
            event = self._process_gesture(frame)
            if event is not None:
                self._broadcast(GestureEventMsg(t=frame.t, kind=event), droppable=False)
                if event == "start" and self.recorder is not None:
                    self._broadcast(PromptMsg(self.recorder.current_prompt), droppable=False)

        if self._control_frame is not None:
            try:
                _, cmd = retarget_frame(
                    self._control_frame, self.state.q, self.rig, warm_starts=self._warm
                )
            except DexkitError:
                cmd = JointCommand(t=t, dq=ZERO_DQ)
        else:
            cmd = JointCommand(t=t, dq=ZERO_DQ)
        cmd = JointCommand(t=t, dq=cmd.dq)  # re-stamp on the sim clock
        self.state = step_sim(self.state, cmd, self.rig.joint_limits, self.params)
        self._last_command = cmd

        if self.recorder is not None and self.recorder.recording:
            self._record_tick(t, cmd)

        self._broadcast(JointStateMsg(self.state.as_allegro()), droppable=True)
        self._broadcast(JointCommandMsg(cmd), droppable=False)
        self._broadcast(self._record_status(), droppable=True)

    def _process_gesture(self, frame) -> str | None:
        if self.recorder is not None:
            return self.recorder.process_gesture_frame(frame)
        # without a recorder the gesture machine still runs so UI clients
        # see their events acknowledged
        from .recorder import detect_fist, step_gesture

        if not hasattr(self, "_gesture_state"):
            from .recorder import GestureState

            self._gesture_state = GestureState()
        self._gesture_state, event = step_gesture(
            self._gesture_state, detect_fist(frame), frame.t
        )
        return event

    def _record_status(self) -> RecordStatusMsg:
        if self.recorder is not None and self.recorder.recording:
            return RecordStatusMsg(recording=True, episode_id=self.recorder.episode_dirs[-1])
        if self.recorder is None and getattr(self, "_gesture_state", None) is not None:
            return RecordStatusMsg(recording=self._gesture_state.recording, episode_id=None)
        return RecordStatusMsg(recording=False, episode_id=None)

    def _record_tick(self, t: float, cmd: JointCommand) -> None:
        episode_dir = self.recorder.episode_dir()
        refs = {}
        for camera in ("top", "wrist"):
            ref = self.recorder.image_name(camera)
            render_frame(self.recorder.current_prompt, self.state.q, camera).save(
                episode_dir / ref, format="PNG"
            )
            refs[camera] = ref
        self.recorder.append(EpisodeFrame(
            t=t, q=self.state.q, tau=self.state.tau, dq=cmd.dq,
            image_top=refs["top"], image_wrist=refs["wrist"],
        ))


async def serve_stream(rig: RigConfig | None = None, port: int = DEFAULT_PORT,
                       **kwargs) -> TeleopServer:
    """Start a TeleopServer and return the running handle."""
    server = TeleopServer(rig=rig, port=port, **kwargs)
    await server.start()
    return server
