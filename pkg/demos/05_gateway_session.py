"""
Talking to the hub
==================

Start the telemetry gateway on a free port, connect as a wearable, send a
few newline-delimited JSON frames (one of them broken) and read the replies.
"""

import asyncio
import json

from comfortloop.gateway import Gateway, GatewayServer

TOKEN = "demo-token"


async def main():
    hub = Gateway(TOKEN, dropout_timeout=10)
    server = await GatewayServer(hub, port=0, clock=lambda: 0.0).start()
    reader, writer = await asyncio.open_connection("127.0.0.1", server.port)

    frames = [{"v": 1, "op": "register", "node": "w-01", "kind": "wearable", "token": TOKEN}]
    frames += [{"v": 1, "op": "data", "node": "w-01", "t": t, "hr": 70 + t, "gsr": 2.0,
                "clo": 0.5, "met": 1.2, "token": TOKEN} for t in (1, 2, 3)]
    lines = [json.dumps(f) for f in frames]
    lines.insert(2, lines[2][:20])   # truncated in transit
    lines.append(lines[-1])          # replayed frame, stale timestamp

    for line in lines:
        writer.write(line.encode() + b"\n")
        await writer.drain()
        reply = await reader.readline()
        print(f"{line[:48]:<50s} -> {reply.decode().strip()}")

    writer.close()
    await writer.wait_closed()
    await server.stop()

    print("\nstored", hub.stored_count("w-01"), "samples")
    for s in hub.query_window("w-01", 0, 10):
        print(f"  t={s.timestamp:g} hr={s.heart_rate:g}")
    print("dropped at t=20:", hub.sweep_dropouts(20.0))


asyncio.run(main())
