"""Telemetry hub: node registry, append-only sample store, wire protocol.

Nodes speak newline-delimited JSON over a stream socket::

    {"v":1,"op":"register","node":"w-01","kind":"wearable","token":"..."}
    {"v":1,"op":"data","node":"w-01","t":100,"hr":72.0,"gsr":2.1,"clo":0.5,"met":1.2,"token":"..."}
    {"v":1,"op":"data","node":"env-01","t":100,"ta":23.0,"mrt":23.0,"rh":50,"vel":0.1,"token":"..."}

Every line gets exactly one reply line, ``{"status":"ok","seq":N}`` or
``{"status":"err","code":"..."}``. Errors never close the connection.
"""

import asyncio
import bisect
import enum
import hashlib
import json
import logging
import math
import os
import threading
import time
from dataclasses import dataclass

from .errors import (
    ComfortLoopError,
    CorruptSnapshot,
    DuplicateKindMismatch,
    MalformedFrame,
    OutOfRange,
    StaleTimestamp,
    Unauthorized,
    UnknownNode,
)
from .predictor import EnvSample, PhysioSample

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_DROPOUT_TIMEOUT = 10.0
DEFAULT_PORT = 7878
SNAPSHOT_FORMAT = "comfortloop-snapshot"

WEARABLE_FIELDS = ("hr", "gsr", "clo", "met")
ENV_FIELDS = ("ta", "mrt", "rh", "vel")


class NodeKind(str, enum.Enum):
    WEARABLE = "wearable"
    ENVIRONMENT = "environment"


class NodeStatus(str, enum.Enum):
    ACTIVE = "Active"
    DROPPED = "Dropped"


@dataclass
class NodeRecord:
    node_id: str
    kind: NodeKind
    registered_at: float
    last_seen: float
    status: NodeStatus = NodeStatus.ACTIVE


class _Series:
    __slots__ = ("times", "samples", "accepted")

    def __init__(self):
        self.times = []
        self.samples = []
        self.accepted = 0


def _check_node_id(node_id):
    if not isinstance(node_id, str) or not 1 <= len(node_id) <= 64:
        raise MalformedFrame(f"node id must be a 1-64 character string, got {node_id!r}")
    return node_id


def _number(msg, key):
    value = msg.get(key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedFrame(f"field {key!r} missing or not a number")
    value = float(value)
    if not math.isfinite(value):
        raise MalformedFrame(f"field {key!r} is not finite")
    return value


def _decode(raw):
    if isinstance(raw, str):
        raw = raw.encode()
    try:
        msg = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as exc:
        raise MalformedFrame(f"unparseable frame: {exc}") from None
    if not isinstance(msg, dict):
        raise MalformedFrame("frame is not a JSON object")
    if msg.get("v") != SCHEMA_VERSION:
        raise MalformedFrame(f"unsupported schema version {msg.get('v')!r}")
    return msg


class Gateway:
    """In-memory hub. All mutations go through one lock (single writer)."""

    def __init__(self, token, dropout_timeout=DEFAULT_DROPOUT_TIMEOUT):
        self.token = token
        self.dropout_timeout = float(dropout_timeout)
        self._nodes = {}
        self._series = {}
        self._lock = threading.RLock()

    # -- registry ----------------------------------------------------------

    def _authorize(self, token):
        if token != self.token:
            raise Unauthorized("bad or missing token")

    def register_node(self, node_id, kind, auth_token, now=0.0) -> NodeRecord:
        self._authorize(auth_token)
        _check_node_id(node_id)
        kind = NodeKind(kind)
        with self._lock:
            rec = self._nodes.get(node_id)
            if rec is not None:
                if rec.kind is not kind:
                    raise DuplicateKindMismatch(
                        f"node {node_id!r} already registered as {rec.kind.value}"
                    )
                return rec
            rec = NodeRecord(node_id, kind, registered_at=now, last_seen=now)
            self._nodes[node_id] = rec
            self._series[node_id] = _Series()
            logger.debug("registered %s node %s", kind.value, node_id)
            return rec

    def node(self, node_id) -> NodeRecord:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNode(f"unknown node {node_id!r}") from None

    def nodes(self, kind=None, status=None):
        with self._lock:
            return [
                r for r in self._nodes.values()
                if (kind is None or r.kind is NodeKind(kind))
                and (status is None or r.status is NodeStatus(status))
            ]

    # -- ingestion ---------------------------------------------------------

    def _parse_sample(self, rec, msg):
        t = _number(msg, "t")
        try:
            if rec.kind is NodeKind.WEARABLE:
                hr, gsr, clo, met = (_number(msg, k) for k in WEARABLE_FIELDS)
                return PhysioSample(rec.node_id, t, hr, gsr, clo, met).validate()
            ta, mrt, rh, vel = (_number(msg, k) for k in ENV_FIELDS)
            return EnvSample(t, ta, mrt, rh, vel).validate()
        except OutOfRange as exc:
            raise MalformedFrame(f"out-of-range value: {exc}") from None

    def ingest_frame(self, raw):
        """Validate and store one data frame. Returns ``(seq, sample)``."""
        msg = _decode(raw)
        if msg.get("op") != "data":
            raise MalformedFrame(f"expected a data frame, got op={msg.get('op')!r}")
        return self._ingest(msg)

    def _ingest(self, msg):
        self._authorize(msg.get("token"))
        node_id = _check_node_id(msg.get("node"))
        with self._lock:
            rec = self.node(node_id)
            sample = self._parse_sample(rec, msg)
            series = self._series[node_id]
            if series.times and sample.timestamp <= series.times[-1]:
                raise StaleTimestamp(
                    f"node {node_id!r}: t={sample.timestamp:g} not after "
                    f"{series.times[-1]:g}"
                )
            series.times.append(sample.timestamp)
            series.samples.append(sample)
            series.accepted += 1
            rec.last_seen = max(rec.last_seen, sample.timestamp)
            if rec.status is NodeStatus.DROPPED:
                logger.info("node %s resumed at t=%g", node_id, sample.timestamp)
                rec.status = NodeStatus.ACTIVE
            return series.accepted, sample

    def handle_line(self, raw, now=0.0) -> dict:
        """Process one protocol line and build its reply. Never raises on bad input."""
        try:
            msg = _decode(raw)
            op = msg.get("op")
            if op == "register":
                self.register_node(msg.get("node"), msg.get("kind"), msg.get("token"), now)
                return {"status": "ok", "seq": self.accepted_count(msg["node"])}
            if op == "data":
                seq, _ = self._ingest(msg)
                return {"status": "ok", "seq": seq}
            raise MalformedFrame(f"unknown op {op!r}")
        except ValueError as exc:
            if isinstance(exc, ComfortLoopError):
                return {"status": "err", "code": exc.code}
            # bad enum value for kind
            return {"status": "err", "code": MalformedFrame.code}
        except ComfortLoopError as exc:
            return {"status": "err", "code": exc.code}

    # -- queries -----------------------------------------------------------

    def accepted_count(self, node_id):
        self.node(node_id)
        return self._series[node_id].accepted

    def stored_count(self, node_id=None):
        with self._lock:
            if node_id is None:
                return sum(len(s.samples) for s in self._series.values())
            self.node(node_id)
            return len(self._series[node_id].samples)

    def query_window(self, nodes, t_from, t_to):
        """Samples with ``t_from <= timestamp <= t_to`` in timestamp order.

        ``nodes`` is a single node id or an iterable of ids; samples from
        several nodes are merged by ``(timestamp, node_id)``.
        """
        if t_from > t_to:
            raise ValueError("t_from must not exceed t_to")
        ids = [nodes] if isinstance(nodes, str) else sorted(nodes)
        out = []
        with self._lock:
            for node_id in ids:
                self.node(node_id)
                s = self._series[node_id]
                i = bisect.bisect_left(s.times, t_from)
                j = bisect.bisect_right(s.times, t_to)
                out.extend((t, node_id, smp) for t, smp in zip(s.times[i:j], s.samples[i:j]))
        out.sort(key=lambda item: (item[0], item[1]))
        return [smp for _, _, smp in out]

    def sweep_dropouts(self, now):
        """Mark silent nodes as Dropped; return the ids dropped by this sweep."""
        dropped = []
        with self._lock:
            for rec in self._nodes.values():
                if rec.status is NodeStatus.ACTIVE and now - rec.last_seen > self.dropout_timeout:
                    rec.status = NodeStatus.DROPPED
                    dropped.append(rec.node_id)
        if dropped:
            logger.info("t=%g dropped nodes: %s", now, ", ".join(dropped))
        return sorted(dropped)

    # -- persistence -------------------------------------------------------

    def _payload(self):
        nodes = []
        for node_id in sorted(self._nodes):
            rec = self._nodes[node_id]
            s = self._series[node_id]
            if rec.kind is NodeKind.WEARABLE:
                rows = [[x.timestamp, x.heart_rate, x.gsr, x.clothing_insulation,
                         x.metabolic_rate] for x in s.samples]
            else:
                rows = [[x.timestamp, x.air_temp, x.mean_radiant_temp, x.rel_humidity,
                         x.air_velocity] for x in s.samples]
            nodes.append({
                "node_id": node_id,
                "kind": rec.kind.value,
                "registered_at": rec.registered_at,
                "last_seen": rec.last_seen,
                "status": rec.status.value,
                "accepted": s.accepted,
                "samples": rows,
            })
        return {"dropout_timeout": self.dropout_timeout, "nodes": nodes}

    def snapshot(self, path):
        """Write registry and samples to ``path`` atomically, with a checksum."""
        with self._lock:
            body = json.dumps(self._payload(), sort_keys=True, separators=(",", ":"))
        doc = {
            "format": SNAPSHOT_FORMAT,
            "version": SCHEMA_VERSION,
            "sha256": hashlib.sha256(body.encode()).hexdigest(),
            "payload": body,
        }
        tmp = f"{path}.tmp"
        with open(tmp, "w") as fh:
            json.dump(doc, fh)
        os.replace(tmp, path)

    @classmethod
    def restore(cls, path, token):
        try:
            with open(path) as fh:
                doc = json.load(fh)
            body = doc["payload"]
            if doc.get("format") != SNAPSHOT_FORMAT:
                raise CorruptSnapshot(f"{path}: not a gateway snapshot")
            if hashlib.sha256(body.encode()).hexdigest() != doc["sha256"]:
                raise CorruptSnapshot(f"{path}: checksum mismatch")
            payload = json.loads(body)
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise CorruptSnapshot(f"{path}: {exc}") from None

        gw = cls(token, payload["dropout_timeout"])
        for n in payload["nodes"]:
            kind = NodeKind(n["kind"])
            rec = NodeRecord(n["node_id"], kind, n["registered_at"], n["last_seen"],
                             NodeStatus(n["status"]))
            series = _Series()
            for row in n["samples"]:
                if kind is NodeKind.WEARABLE:
                    smp = PhysioSample(rec.node_id, *row)
                else:
                    smp = EnvSample(*row)
                series.times.append(smp.timestamp)
                series.samples.append(smp)
            series.accepted = n["accepted"]
            gw._nodes[rec.node_id] = rec
            gw._series[rec.node_id] = series
        return gw


# -- configuration -----------------------------------------------------------

@dataclass
class GatewayConfig:
    host: str = "127.0.0.1"
    port: int = DEFAULT_PORT
    token: str = ""
    dropout_timeout: float = DEFAULT_DROPOUT_TIMEOUT
    snapshot_path: str = ""
    snapshot_interval: float = 60.0

    ENV_PREFIX = "COMFORTLOOP_"

    @classmethod
    def load(cls, path=None, environ=None, **overrides):
        """File values, then environment variables, then explicit overrides."""
        values = {}
        if path:
            with open(path) as fh:
                values.update(json.load(fh))
        environ = os.environ if environ is None else environ
        for name, default in cls.__dataclass_fields__.items():
            key = cls.ENV_PREFIX + name.upper()
            if key in environ:
                values[name] = type(default.default)(environ[key])
        values.update({k: v for k, v in overrides.items() if v is not None})
        unknown = set(values) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown gateway config keys: {sorted(unknown)}")
        return cls(**values)


# -- socket server -----------------------------------------------------------

class GatewayServer:
    """asyncio TCP front end for a :class:`Gateway`."""

    def __init__(self, gateway, host="127.0.0.1", port=DEFAULT_PORT, clock=time.time,
                 snapshot_path="", snapshot_interval=60.0):
        self.gateway = gateway
        self.host = host
        self.port = port
        self.clock = clock
        self.snapshot_path = snapshot_path
        self.snapshot_interval = snapshot_interval
        self._server = None

    async def _session(self, reader, writer):
        peer = writer.get_extra_info("peername")
        logger.debug("session opened from %s", peer)
        try:
            while True:
                line = await reader.readline()
                if not line:
                    break
                if not line.strip():
                    continue
                reply = self.gateway.handle_line(line.rstrip(b"\r\n"), now=self.clock())
                writer.write(json.dumps(reply).encode() + b"\n")
                await writer.drain()
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            writer.close()
            logger.debug("session closed from %s", peer)

    async def _housekeeping(self):
        last_snapshot = self.clock()
        while True:
            await asyncio.sleep(1.0)
            now = self.clock()
            self.gateway.sweep_dropouts(now)
            if self.snapshot_path and now - last_snapshot >= self.snapshot_interval:
                self.gateway.snapshot(self.snapshot_path)
                last_snapshot = now

    async def start(self):
        self._server = await asyncio.start_server(self._session, self.host, self.port)
        self.port = self._server.sockets[0].getsockname()[1]
        self._tasks = [asyncio.create_task(self._housekeeping())]
        logger.info("gateway listening on %s:%d", self.host, self.port)
        return self

    async def stop(self):
        for task in self._tasks:
            task.cancel()
        self._server.close()
        await self._server.wait_closed()
        if self.snapshot_path:
            self.gateway.snapshot(self.snapshot_path)

    async def serve_forever(self):
        await self.start()
        try:
            await self._server.serve_forever()
        finally:
            await self.stop()
