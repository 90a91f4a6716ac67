"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line with the measured numbers; the lines are
printed in the terminal summary (see conftest.py). Run just this module with
``pytest tests/test_acceptance.py``.
"""

import asyncio
import contextlib
import json
import math
import random
import time
from dataclasses import replace

import numpy as np
import pytest
from conftest import linear_labels, normal_equations_oracle, random_features

from comfortloop.comfort import pmv
from comfortloop.gateway import Gateway, GatewayServer
from comfortloop.predictor import predict_tci, train_tci_model
from comfortloop.profile import OccupantProfile, build_group_profile
from comfortloop.simkit import (
    Dropout,
    calibrate,
    five_occupant_scenario,
    run_scenario,
    seeded_occupants,
    true_tci,
)

RESULTS = []


@contextlib.contextmanager
def criterion(number, title):
    """Record PASS/FAIL for one criterion; ``notes`` collects measured values."""
    notes = []
    try:
        yield notes
    except BaseException:
        RESULTS.append((number, "FAIL", title, "; ".join(notes)))
        raise
    RESULTS.append((number, "PASS", title, "; ".join(notes)))


def fine_oracle(group, model, fns, step=0.001):
    """Least summed squared predicted TCI over the band, scanned at ``step``."""
    lo, hi = group.band
    temps = np.arange(lo, hi + step / 2, step)
    temps = temps[temps <= hi + 1e-12]
    costs = [math.fsum(predict_tci(model, fns[m](t)) ** 2 for m in group.member_ids)
             for t in temps]
    return float(temps[int(np.argmin(costs))])


def truth_oracle(occupants, lo, hi, step=0.001):
    """Setpoint minimising summed squared ground-truth TCI."""
    temps = np.arange(lo, hi + step / 2, step)
    costs = [math.fsum(true_tci(o, t) ** 2 for o in occupants) for t in temps]
    return float(temps[int(np.argmin(costs))])


@pytest.fixture(scope="module")
def five_run():
    cfg = five_occupant_scenario()
    start = time.perf_counter()
    trace = run_scenario(cfg)
    return cfg, trace, time.perf_counter() - start


# ISO 7730 Annex D rows (one pinned from the reference, see test_comfort.py)
# and wide-range rows from an independent reference implementation.
PMV_GOLDEN = [
    ((22.0, 22.0, 0.10, 60, 1.2, 0.5), -0.75),
    ((27.0, 27.0, 0.10, 60, 1.2, 0.5), 0.77),
    ((27.0, 27.0, 0.30, 60, 1.2, 0.5), 0.44),
    ((23.5, 25.5, 0.10, 60, 1.2, 0.5), -0.01),
    ((23.5, 25.5, 0.30, 60, 1.2, 0.5), -0.55),
    ((19.0, 19.0, 0.10, 40, 1.2, 1.0), -0.60),
    ((23.5, 23.5, 0.30, 40, 1.2, 1.0), 0.12),
    ((23.0, 21.0, 0.10, 40, 1.2, 1.0), 0.05),
    ((22.0, 22.0, 0.10, 60, 1.6, 0.5), 0.05),
    ((27.0, 27.0, 0.30, 60, 1.6, 0.5), 0.95),
    ((10, 10, 0.5, 30, 1.0, 1.5), -2.908),
    ((30, 30, 0.2, 70, 1.0, 0.4), 1.413),
    ((25, 25, 2.0, 50, 2.0, 0.6), 0.544),
    ((-5, 0, 0.3, 50, 2.5, 2.0), -0.488),
    ((18, 22, 0.15, 55, 1.1, 0.9), -0.962),
]


def test_criterion_1_group_arithmetic():
    with criterion(1, "group statistics for neutral temps 21..25") as notes:
        g = build_group_profile([OccupantProfile(f"o{t}", t, 0.5) for t in (21, 22, 23, 24, 25)])
        notes.append(f"t_bar={g.t_bar!r} sigma={g.sigma:.6f} band=[{g.band[0]:.5f}, "
                     f"{g.band[1]:.5f}]")
        assert g.t_bar == 23.0
        assert abs(g.sigma - 1.41421) <= 1e-5
        assert abs(g.band[0] - 21.58579) <= 1e-5
        assert abs(g.band[1] - 24.41421) <= 1e-5


def test_criterion_2_pmv_reference():
    with criterion(2, "PMV against pinned reference rows") as notes:
        errs = [abs(pmv(*args) - want) for args, want in PMV_GOLDEN]
        canonical = pmv(22, 22, 0.10, 60, 1.2, 0.5)
        notes.append(f"rows={len(PMV_GOLDEN)} max_err={max(errs):.3f} canonical={canonical:.3f}")
        assert len(PMV_GOLDEN) >= 10
        assert max(errs) <= 0.1
        assert abs(canonical - (-0.75)) <= 0.05


def test_criterion_3_closed_loop(five_run):
    cfg, trace, wall = five_run
    with criterion(3, "five-occupant closed loop") as notes:
        s = trace.summary
        cal = calibrate(replace(cfg, occupants=seeded_occupants(cfg)))
        oracle = fine_oracle(cal.group, cal.model, cal.feature_fns)
        reached = trace.time_to_band(s["t0"], 0.2)
        notes.append(f"t0={s['t0']:.4f} oracle={oracle:.3f} in_band_from={reached}s "
                     f"tci2 {s['start_mean_tci_sq']:.3f}->{s['end_mean_tci_sq']:.4f} "
                     f"wall={wall:.2f}s")
        assert abs(s["t0"] - 23.0) <= 0.1
        assert abs(s["t0"] - oracle) <= cfg.grid_step
        assert reached is not None and reached <= 7200
        assert s["end_mean_tci_sq"] <= s["start_mean_tci_sq"]
        assert wall < 5.0


@pytest.mark.parametrize("noise, tol", [(0.0, 0.1), (0.1, 0.5)])
def test_criterion_4_profile_recovery(noise, tol):
    with criterion(4, f"profile recovery at noise {noise:.0%}") as notes:
        start = time.perf_counter()
        trace = run_scenario(five_occupant_scenario(noise_fraction=noise))
        wall = time.perf_counter() - start
        errs = [abs(p["neutral_temp"] - truth)
                for p, truth in zip(trace.summary["profiles"], (21, 22, 23, 24, 25))]
        notes.append(f"max_err={max(errs):.4f}degC tol={tol} wall={wall:.2f}s")
        assert max(errs) <= tol
        assert wall < 5.0


def test_criterion_5_predictor_oracle():
    with criterion(5, "predictor against normal equations") as notes:
        rng = np.random.default_rng(20240611)
        X = random_features(rng, 200)
        y = linear_labels(X)
        X_test = random_features(rng, 100)
        model = train_tci_model(list(zip(X, y)), ridge_strength=0.0)
        preds = np.array([predict_tci(model, x) for x in X_test])
        rmse = float(np.sqrt(np.mean((preds - linear_labels(X_test)) ** 2)))
        w, b = model.raw_coefficients()
        w_ref, b_ref = normal_equations_oracle(X, y)
        coef_err = max(float(np.max(np.abs(w - w_ref))), abs(b - b_ref))
        notes.append(f"held_out_rmse={rmse:.2e} max_coef_err={coef_err:.2e}")
        assert rmse < 0.05
        assert coef_err <= 1e-6


async def _soak(n_nodes=50, seconds=60, malformed_rate=0.01, seed=6):
    token = "soak"
    gw = Gateway(token)
    server = await GatewayServer(gw, port=0, clock=lambda: 0.0).start()
    rng = random.Random(seed)
    total = n_nodes * seconds
    bad_slots = set(rng.sample(range(total), int(round(total * malformed_rate))))

    async def node(i):
        node_id = f"w-{i:02d}"
        reader, writer = await asyncio.open_connection("127.0.0.1", server.port)
        lines = [json.dumps({"v": 1, "op": "register", "node": node_id, "kind": "wearable",
                             "token": token})]
        n_bad = 0
        for t in range(1, seconds + 1):
            frame = json.dumps({"v": 1, "op": "data", "node": node_id, "t": t,
                                "hr": 60 + i % 30 + t % 7, "gsr": 2.0, "clo": 0.5,
                                "met": 1.2, "token": token})
            if i * seconds + t - 1 in bad_slots:
                lines.append(frame[: len(frame) // 2])  # truncated frame
                n_bad += 1
            lines.append(frame)
        writer.write("".join(x + "\n" for x in lines).encode())
        await writer.drain()
        replies = [json.loads(await reader.readline()) for _ in lines]
        writer.close()
        await writer.wait_closed()
        return node_id, n_bad, replies

    try:
        results = await asyncio.gather(*(node(i) for i in range(n_nodes)))
    finally:
        await server.stop()
    return gw, results


def test_criterion_6_gateway_soak():
    with criterion(6, "gateway soak, 50 nodes x 60 s over TCP") as notes:
        start = time.perf_counter()
        gw, results = asyncio.run(_soak())
        wall = time.perf_counter() - start
        stored = gw.stored_count()
        injected = sum(n_bad for _, n_bad, _ in results)
        rejected = sum(r.get("code") == "malformed" for _, _, rs in results for r in rs)
        mismatched = [nid for nid, _, _ in results
                      if gw.accepted_count(nid) != gw.stored_count(nid)]
        monotone = all(
            all(a.timestamp < b.timestamp for a, b in zip(s, s[1:]))
            for s in (gw.query_window(nid, 0, 1e9) for nid, _, _ in results)
        )
        final_seqs = [[r["seq"] for r in rs if r["status"] == "ok"][-1] for _, _, rs in results]
        notes.append(f"stored={stored} injected_malformed={injected} rejected={rejected} "
                     f"ack_mismatch={len(mismatched)} wall={wall:.2f}s")
        assert stored == 3000
        assert injected == 30 and rejected == injected
        assert not mismatched and monotone
        assert final_seqs == [60] * 50
        assert wall < 10.0


def test_criterion_7_dropout():
    with criterion(7, "dropout exclusion and reinstatement") as notes:
        cfg = five_occupant_scenario(dropouts=[Dropout("w-05", 1800.0, 2400.0)])
        start = time.perf_counter()
        trace = run_scenario(cfg)
        wall = time.perf_counter() - start
        events = trace.summary["occupancy_events"]
        reduced = [e for e in events if "w-05" not in e["members"]]
        rejoined = [e for e in events if e["time"] > 1800 and "w-05" in e["members"]]

        cal = calibrate(replace(cfg, occupants=seeded_occupants(cfg)))
        four = build_group_profile([cal.profiles[f"w-0{i}"] for i in range(1, 5)])
        model_oracle = fine_oracle(four, cal.model, cal.feature_fns)
        truth = truth_oracle(cfg.occupants[:4], *four.band)
        got = reduced[0]["t0"] if reduced else float("nan")
        # TCI rows of the silent occupant stay blank while it is dropped
        blank = {r["time"] for r in trace.rows if r["occupant_id"] == "w-05"
                 and r["tci_pred"] is None}
        notes.append(f"excluded_at={reduced[0]['time'] if reduced else None}s "
                     f"t0_reduced={got:.4f} model_oracle={model_oracle:.3f} "
                     f"truth_oracle={truth:.3f} "
                     f"rejoined_at={rejoined[0]['time'] if rejoined else None}s "
                     f"wall={wall:.2f}s")
        assert reduced and 1800 < reduced[0]["time"] <= 1800 + cfg.dropout_timeout + 60
        assert abs(got - model_oracle) <= cfg.grid_step
        assert abs(got - truth) <= 0.1
        assert rejoined and rejoined[0]["t0"] == events[0]["t0"]
        assert blank and min(blank) > 1800 and max(blank) < 2400 + cfg.eval_period
        assert wall < 5.0


def test_criterion_8_determinism(tmp_path):
    with criterion(8, "byte-identical reruns") as notes:
        cfg = five_occupant_scenario(noise_fraction=0.1, master_seed=42,
                                     dropouts=[Dropout("w-02", 600.0, 900.0)], duration=3600)
        for name in ("a", "b"):
            run_scenario(cfg).write(tmp_path / name)
        same = {f: (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
                for f in ("trace.csv", "summary.json")}
        notes.append(" ".join(f"{f}={'identical' if ok else 'DIFFERENT'}"
                              for f, ok in same.items()))
        assert all(same.values())


def test_criterion_9_quiescence(five_run):
    cfg, trace, _ = five_run
    with criterion(9, "no commands in the hour after convergence") as notes:
        s = trace.summary
        conv = s["convergence_time"]
        late = [c for c in s["commands"] if conv is not None and c["issued_at"] > conv]
        notes.append(f"converged_at={conv}s observed_until={cfg.duration:g}s "
                     f"later_commands={len(late)}")
        assert s["converged"] and conv is not None
        assert cfg.duration - conv >= 3600
        assert late == []
