import asyncio
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from comfortloop.errors import (
    CorruptSnapshot,
    DuplicateKindMismatch,
    MalformedFrame,
    StaleTimestamp,
    Unauthorized,
    UnknownNode,
)
from comfortloop.gateway import Gateway, GatewayConfig, GatewayServer, NodeStatus

TOKEN = "s3cret"


def wearable(node, t, hr=72.0, gsr=2.1, token=TOKEN):
    return json.dumps({"v": 1, "op": "data", "node": node, "t": t, "hr": hr, "gsr": gsr,
                       "clo": 0.5, "met": 1.2, "token": token})


def environment(node, t, ta=23.0, token=TOKEN):
    return json.dumps({"v": 1, "op": "data", "node": node, "t": t, "ta": ta, "mrt": ta,
                       "rh": 50, "vel": 0.1, "token": token})


@pytest.fixture
def gw():
    g = Gateway(TOKEN)
    g.register_node("w-01", "wearable", TOKEN)
    g.register_node("env-01", "environment", TOKEN)
    return g


class TestRegistry:
    def test_fresh_node_active(self):
        rec = Gateway(TOKEN).register_node("w-01", "wearable", TOKEN, now=5.0)
        assert rec.status is NodeStatus.ACTIVE and rec.registered_at == 5.0

    def test_idempotent(self, gw):
        rec = gw.register_node("w-01", "wearable", TOKEN)
        assert rec is gw.node("w-01")
        assert len(gw.nodes()) == 2

    def test_kind_mismatch(self, gw):
        with pytest.raises(DuplicateKindMismatch):
            gw.register_node("w-01", "environment", TOKEN)

    def test_bad_token(self):
        with pytest.raises(Unauthorized):
            Gateway(TOKEN).register_node("w-01", "wearable", "nope")

    @pytest.mark.parametrize("node_id", ["", "x" * 65, 7])
    def test_bad_node_id(self, node_id):
        with pytest.raises(MalformedFrame):
            Gateway(TOKEN).register_node(node_id, "wearable", TOKEN)


class TestIngest:
    def test_valid_frame_increments_seq(self, gw):
        assert gw.ingest_frame(wearable("w-01", 99))[0] == 1
        seq, sample = gw.ingest_frame(wearable("w-01", 100, hr=72, gsr=2.1))
        assert seq == 2
        assert (sample.heart_rate, sample.gsr, sample.timestamp) == (72.0, 2.1, 100.0)

    def test_repeated_timestamp_is_stale(self, gw):
        gw.ingest_frame(wearable("w-01", 100))
        with pytest.raises(StaleTimestamp):
            gw.ingest_frame(wearable("w-01", 100))
        assert gw.stored_count("w-01") == 1

    def test_truncated_frame_then_recovery(self, gw):
        raw = wearable("w-01", 1).encode()
        with pytest.raises(MalformedFrame):
            gw.ingest_frame(raw[: len(raw) // 2])
        assert gw.ingest_frame(wearable("w-01", 2))[0] == 1

    def test_unknown_node(self, gw):
        with pytest.raises(UnknownNode):
            gw.ingest_frame(wearable("w-99", 1))

    def test_wrong_token(self, gw):
        with pytest.raises(Unauthorized):
            gw.ingest_frame(wearable("w-01", 1, token="bad"))

    def test_schema_version(self, gw):
        msg = json.loads(wearable("w-01", 1))
        msg["v"] = 2
        with pytest.raises(MalformedFrame):
            gw.ingest_frame(json.dumps(msg))

    def test_env_frame_needs_env_fields(self, gw):
        with pytest.raises(MalformedFrame):
            gw.ingest_frame(wearable("env-01", 1))

    @pytest.mark.parametrize("line, code", [
        (b"{not json", "malformed"),
        (b'{"v":1,"op":"data","node":"w-01","t":1,"hr":500,"gsr":2,"clo":0.5,"met":1.2,'
         b'"token":"s3cret"}', "malformed"),
        (wearable("w-01", 1, token="x").encode(), "unauthorized"),
        (wearable("zz", 1).encode(), "unknown_node"),
        (b'{"v":1,"op":"register","node":"w-01","kind":"environment","token":"s3cret"}',
         "kind_mismatch"),
        (b'{"v":1,"op":"register","node":"w-02","kind":"toaster","token":"s3cret"}',
         "malformed"),
        (b'{"v":1,"op":"dance"}', "malformed"),
    ])
    def test_handle_line_error_codes(self, gw, line, code):
        assert gw.handle_line(line) == {"status": "err", "code": code}

    def test_handle_line_stale(self, gw):
        assert gw.handle_line(wearable("w-01", 5)) == {"status": "ok", "seq": 1}
        assert gw.handle_line(wearable("w-01", 5))["code"] == "stale_timestamp"

    def test_malformed_does_not_touch_other_node(self, gw):
        gw.handle_line(wearable("w-01", 1))
        gw.handle_line(b"garbage")
        gw.handle_line(environment("env-01", 1))
        assert gw.stored_count("w-01") == 1 and gw.stored_count("env-01") == 1


class TestQuery:
    def test_exact_single(self, gw):
        for t in (1, 2, 3):
            gw.ingest_frame(wearable("w-01", t))
        out = gw.query_window("w-01", 2, 2)
        assert [s.timestamp for s in out] == [2.0]

    def test_empty(self, gw):
        assert gw.query_window("w-01", 0, 10) == []

    def test_sixty_at_one_hz(self, gw):
        for t in range(1, 121):
            gw.ingest_frame(wearable("w-01", t))
        assert len(gw.query_window("w-01", 61, 120)) == 60

    def test_merged_order(self, gw):
        gw.ingest_frame(wearable("w-01", 2))
        gw.ingest_frame(environment("env-01", 1))
        gw.ingest_frame(environment("env-01", 2))
        out = gw.query_window(["w-01", "env-01"], 0, 5)
        assert [s.timestamp for s in out] == [1.0, 2.0, 2.0]

    def test_unknown(self, gw):
        with pytest.raises(UnknownNode):
            gw.query_window("nope", 0, 1)

    def test_reversed_range(self, gw):
        with pytest.raises(ValueError):
            gw.query_window("w-01", 5, 1)


class TestDropout:
    def test_silent_node_dropped(self, gw):
        gw.ingest_frame(wearable("w-01", 100))
        gw.ingest_frame(environment("env-01", 110))
        assert gw.sweep_dropouts(111) == ["w-01"]
        assert gw.node("w-01").status is NodeStatus.DROPPED
        assert gw.sweep_dropouts(111) == []

    def test_active_node_kept(self, gw):
        gw.ingest_frame(wearable("w-01", 100))
        assert "w-01" not in gw.sweep_dropouts(110)

    def test_resume(self, gw):
        gw.ingest_frame(wearable("w-01", 100))
        gw.sweep_dropouts(200)
        gw.ingest_frame(wearable("w-01", 201))
        assert gw.node("w-01").status is NodeStatus.ACTIVE

    @settings(max_examples=50, deadline=None)
    @given(last=st.floats(0, 100), gap=st.floats(0, 30))
    def test_dropped_iff_silence_exceeds_timeout(self, last, gap):
        g = Gateway(TOKEN, dropout_timeout=10)
        g.register_node("w-01", "wearable", TOKEN)
        g.ingest_frame(wearable("w-01", last))
        dropped = g.sweep_dropouts(last + gap)
        assert (dropped == ["w-01"]) == (gap > 10)


def fill(gw, rng, n_frames=200):
    for node in ("w-01", "w-02", "env-01"):
        gw.register_node(node, "environment" if node.startswith("env") else "wearable", TOKEN)
    clocks = {"w-01": 0.0, "w-02": 0.0, "env-01": 0.0}
    for _ in range(n_frames):
        node = rng.choice(sorted(clocks))
        clocks[node] += rng.uniform(0.1, 3.0)
        if node.startswith("env"):
            gw.ingest_frame(environment(node, clocks[node], ta=rng.uniform(18, 30)))
        else:
            gw.ingest_frame(wearable(node, clocks[node], hr=rng.uniform(50, 120)))


class TestSnapshot:
    def test_round_trip_random_windows(self, tmp_path):
        rng = random.Random(4)
        gw = Gateway(TOKEN)
        fill(gw, rng)
        gw.sweep_dropouts(150)
        path = tmp_path / "snap.json"
        gw.snapshot(path)
        back = Gateway.restore(path, TOKEN)
        ids = ["w-01", "w-02", "env-01"]
        for _ in range(100):
            a, b = sorted(rng.uniform(-5, 250) for _ in range(2))
            sel = rng.sample(ids, rng.randint(1, 3))
            assert back.query_window(sel, a, b) == gw.query_window(sel, a, b)
        for node in ids:
            assert back.node(node) == gw.node(node)
            assert back.accepted_count(node) == gw.accepted_count(node)

    def test_truncated_file(self, tmp_path):
        gw = Gateway(TOKEN)
        fill(gw, random.Random(1), 20)
        path = tmp_path / "snap.json"
        gw.snapshot(path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) // 2])
        with pytest.raises(CorruptSnapshot):
            Gateway.restore(path, TOKEN)

    def test_tampered_payload(self, tmp_path):
        gw = Gateway(TOKEN)
        fill(gw, random.Random(1), 20)
        path = tmp_path / "snap.json"
        gw.snapshot(path)
        doc = json.loads(path.read_text())
        doc["payload"] = doc["payload"].replace("w-02", "w-03")
        path.write_text(json.dumps(doc))
        with pytest.raises(CorruptSnapshot):
            Gateway.restore(path, TOKEN)

    def test_empty_store(self, tmp_path):
        path = tmp_path / "snap.json"
        Gateway(TOKEN).snapshot(path)
        back = Gateway.restore(path, TOKEN)
        assert back.nodes() == [] and back.stored_count() == 0


def test_config_layering(tmp_path):
    path = tmp_path / "gw.json"
    path.write_text(json.dumps({"port": 9000, "token": "file"}))
    env = {"COMFORTLOOP_TOKEN": "env", "COMFORTLOOP_DROPOUT_TIMEOUT": "20"}
    cfg = GatewayConfig.load(path, environ=env, port=9100)
    assert (cfg.port, cfg.token, cfg.dropout_timeout) == (9100, "env", 20.0)
    with pytest.raises(ValueError):
        GatewayConfig.load(environ={}, colour="red")


def test_tcp_session():
    async def scenario():
        gw = Gateway(TOKEN)
        server = await GatewayServer(gw, port=0, clock=lambda: 0.0).start()
        try:
            reader, writer = await asyncio.open_connection("127.0.0.1", server.port)
            lines = [
                json.dumps({"v": 1, "op": "register", "node": "w-01", "kind": "wearable",
                            "token": TOKEN}),
                wearable("w-01", 1), "{broken", wearable("w-01", 2), wearable("w-01", 2),
            ]
            writer.write("".join(x + "\n" for x in lines).encode())
            await writer.drain()
            replies = [json.loads(await reader.readline()) for _ in lines]
            writer.close()
            await writer.wait_closed()
        finally:
            await server.stop()
        return gw, replies

    gw, replies = asyncio.run(scenario())
    assert replies == [
        {"status": "ok", "seq": 0},
        {"status": "ok", "seq": 1},
        {"status": "err", "code": "malformed"},
        {"status": "ok", "seq": 2},
        {"status": "err", "code": "stale_timestamp"},
    ]
    assert gw.stored_count("w-01") == gw.accepted_count("w-01") == 2
