"""Teleop server: broadcast hub, backpressure, TCP and WebSocket access.

pytest runs these as plain sync tests; each one drives its own event loop
with asyncio.run so no async plugin is required.
"""

import asyncio

import aiohttp
import pytest

from dexkit.errors import PortInUse
from dexkit.handmodel import HandParams, make_frame
from dexkit.protocol import (
    ErrorMsg,
    GestureEventMsg,
    HandFrameMsg,
    JointCommandMsg,
    JointStateMsg,
    decode_message,
    encode_message,
)
from dexkit.server import BACKPRESSURE_LIMIT, TeleopServer, _ClientQueue, serve_stream
from dexkit.sim import FIST_PARAMS

CURLED = HandParams(
    curl={"index": 0.3, "middle": 0.3, "ring": 0.3, "little": 0.3},
    thumb_curl=0.2,
    thumb_sweep=0.3,
)


# -- client queue ----------------------------------------------------------


def test_queue_drops_stale_state_messages():
    queue = _ClientQueue()
    for i in range(3 * BACKPRESSURE_LIMIT):
        queue.put(f"state{i}", droppable=True)
    assert len(queue._items) == BACKPRESSURE_LIMIT


def test_queue_never_drops_commands():
    queue = _ClientQueue()
    for i in range(10):
        queue.put(f"cmd{i}", droppable=False)
    for i in range(5 * BACKPRESSURE_LIMIT):
        queue.put(f"state{i}", droppable=True)

    async def drain():
        out = []
        while queue._items:
            out.append(await queue.get())
        return out

    lines = asyncio.run(drain())
    commands = [line for line in lines if line.startswith("cmd")]
    assert commands == [f"cmd{i}" for i in range(10)]


def test_queue_close_wakes_reader():
    async def scenario():
        queue = _ClientQueue()

        async def reader():
            await queue.get()

        task = asyncio.create_task(reader())
        await asyncio.sleep(0.01)
        queue.close()
        with pytest.raises(asyncio.CancelledError):
            await task

    asyncio.run(scenario())


# -- integration helpers -----------------------------------------------------


def run_with_server(body, **kwargs):
    """Start a server on ephemeral ports, run the coroutine, tear down."""

    async def scenario():
        server = await serve_stream(port=0, tick_hz=60.0, **kwargs)
        try:
            await asyncio.wait_for(body(server), timeout=20.0)
        finally:
            await server.stop()

    asyncio.run(scenario())


async def read_until(reader, predicate, count=1):
    hits = []
    while len(hits) < count:
        raw = await reader.readline()
        assert raw, "server closed the connection"
        msg = decode_message(raw.decode().strip())
        if predicate(msg):
            hits.append(msg)
    return hits


def send_line(writer, text):
    writer.write(text.encode() + b"\n")


# -- TCP ---------------------------------------------------------------------


def test_ephemeral_ports_are_resolved():
    async def body(server):
        assert server.port != 0
        assert server.http_port == server.port + 1

    run_with_server(body)


def test_bad_lines_get_error_replies_and_connection_survives():
    async def body(server):
        reader, writer = await asyncio.open_connection(server.host, server.port)
        send_line(writer, "")  # blank lines are ignored
        send_line(writer, '{"tag":"telemetry"}')
        await writer.drain()
        (err,) = await read_until(reader, lambda m: isinstance(m, ErrorMsg))
        assert err.error == "unknown_tag"

        send_line(writer, "{not json")
        await writer.drain()
        (err,) = await read_until(reader, lambda m: isinstance(m, ErrorMsg))
        assert err.error == "malformed"

        # still streaming state after both errors
        await read_until(reader, lambda m: isinstance(m, JointStateMsg), count=3)
        writer.close()

    run_with_server(body)


def test_joint_state_clock_is_monotonic():
    async def body(server):
        reader, writer = await asyncio.open_connection(server.host, server.port)
        states = await read_until(
            reader, lambda m: isinstance(m, JointStateMsg), count=10
        )
        times = [m.state.t for m in states]
        assert all(b > a for a, b in zip(times, times[1:]))
        writer.close()

    run_with_server(body)


def test_control_frames_drive_the_simulated_hand():
    async def body(server):
        reader, writer = await asyncio.open_connection(server.host, server.port)
        frame = make_frame(0.0, CURLED)
        send_line(writer, encode_message(HandFrameMsg(frame=frame, hand="right")))
        await writer.drain()

        def moved(msg):
            return isinstance(msg, JointStateMsg) and any(
                abs(v) > 1e-4 for v in msg.state.q
            )

        await read_until(reader, moved)
        writer.close()

    run_with_server(body)


def test_clients_receive_identical_command_streams():
    async def body(server):
        r1, w1 = await asyncio.open_connection(server.host, server.port)
        r2, w2 = await asyncio.open_connection(server.host, server.port)
        frame = make_frame(0.0, CURLED)
        send_line(w1, encode_message(HandFrameMsg(frame=frame, hand="right")))
        await w1.drain()

        async def commands(reader, n=12):
            msgs = await read_until(
                reader, lambda m: isinstance(m, JointCommandMsg), count=n
            )
            return {m.command.t: m.command.dq for m in msgs}

        by_t1, by_t2 = await asyncio.gather(commands(r1), commands(r2))
        shared = sorted(set(by_t1) & set(by_t2))
        assert len(shared) >= 6
        for t in shared:
            assert by_t1[t] == by_t2[t]
        w1.close()
        w2.close()

    run_with_server(body)


def test_left_hand_fist_hold_emits_start_event():
    async def body(server):
        reader, writer = await asyncio.open_connection(server.host, server.port)
        for i in range(12):
            frame = make_frame(i * 0.1, FIST_PARAMS)
            send_line(writer, encode_message(HandFrameMsg(frame=frame, hand="left")))
        await writer.drain()
        (event,) = await read_until(reader, lambda m: isinstance(m, GestureEventMsg))
        assert event.kind == "start"
        writer.close()

    run_with_server(body)


def test_port_in_use_is_reported():
    async def body(server):
        other = TeleopServer(port=server.port)
        with pytest.raises(PortInUse):
            await other.start()

    run_with_server(body)


# -- HTTP side ---------------------------------------------------------------


def test_websocket_mirrors_the_tcp_stream():
    async def body(server):
        url = f"http://{server.host}:{server.http_port}/ws"
        async with aiohttp.ClientSession() as session:
            async with session.ws_connect(url) as ws:
                await ws.send_str('{"tag":"telemetry"}')
                saw_error = saw_state = False
                while not (saw_error and saw_state):
                    ws_msg = await ws.receive(timeout=10.0)
                    msg = decode_message(ws_msg.data)
                    if isinstance(msg, ErrorMsg):
                        assert msg.error == "unknown_tag"
                        saw_error = True
                    elif isinstance(msg, JointStateMsg):
                        saw_state = True

    run_with_server(body)


def test_dataset_directory_is_served(tmp_path):
    (tmp_path / "manifest.json").write_text('{"episodes":[]}')

    async def body(server):
        url = f"http://{server.host}:{server.http_port}/data/manifest.json"
        async with aiohttp.ClientSession() as session:
            async with session.get(url) as resp:
                assert resp.status == 200
                assert await resp.json() == {"episodes": []}

    run_with_server(body, dataset_dir=tmp_path)
