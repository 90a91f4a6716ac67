"""``comfortloop`` command line entry point.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

import argparse
import asyncio
import csv
import json
import logging
import os
import sys
from collections import OrderedDict
from dataclasses import replace

import numpy as np

from . import __version__
from .comfort import PmvInputs, compute_pmv, pmv_to_ppd
from .control import Controller
from .errors import ComfortLoopError, NoGroupProfile, OutOfRange, ScenarioError
from .gateway import Gateway, GatewayConfig, GatewayServer
from .predictor import AIR_TEMP_INDEX, DEFAULT_RIDGE, DEFAULT_WINDOW, TciModel, \
    read_dataset_csv, train_tci_model
from .profile import (
    OccupantProfile,
    build_group_profile,
    estimate_neutral_temp,
    profile_group,
    select_setpoint,
)
from .simkit import ScenarioConfig, occupant_feature_fn, run_scenario

logger = logging.getLogger("comfortloop")

PMV_FLAGS = {
    "air_temp": "--ta",
    "mean_radiant_temp": "--tr",
    "air_velocity": "--vel",
    "rel_humidity": "--rh",
    "metabolic_rate": "--met",
    "clothing_insulation": "--clo",
}


class CommandFailed(Exception):
    """Raised by a subcommand to exit 1 with a message."""


ORIGINS = {
    "NoNeutralPoint": "profile.estimate_neutral_temp",
    "NonMonotone": "profile.estimate_neutral_temp",
    "EmptyGroup": "profile.build_group_profile",
    "ConfigError": "simkit.ScenarioConfig.validate",
    "DegenerateDesign": "predictor.train_tci_model",
    "TooFewSamples": "predictor.train_tci_model",
    "EmptyWindow": "predictor.extract_features",
    "NotFinite": "predictor.predict_tci",
    "OutOfRange": "input validation",
    "NonConvergence": "comfort.compute_pmv",
    "NoOccupants": "control.evaluate",
    "NoGroupProfile": "control.evaluate",
    "CorruptSnapshot": "gateway.restore",
}


def _origin(exc):
    """``module.op [ExceptionName]`` for a domain error."""
    if isinstance(exc, ScenarioError):
        return f"simkit.run_scenario at t={exc.time:g}s <- {_origin(exc.cause)}"
    name = type(exc).__name__
    return f"{ORIGINS.get(name, 'gateway.ingest_frame')} [{name}]"


def _emit(args, payload, text):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


# -- simulate ------------------------------------------------------------------

def cmd_simulate(args):
    config = ScenarioConfig.load(args.config)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    if args.duration is not None:
        config = replace(config, duration=args.duration)
    trace = run_scenario(config)
    trace.write(args.out)
    s = trace.summary
    conv = "n/a" if s["convergence_time"] is None else f"{s['convergence_time']:g}s"
    _emit(args, s,
          f"t0={s['t0']:.3f} degC  converged={str(s['converged']).lower()}  "
          f"convergence_time={conv}  discomfort_integral={s['discomfort_integral']:.3f}")


# -- train ---------------------------------------------------------------------

def cmd_train(args):
    dataset = read_dataset_csv(args.data, window=args.window)
    model = train_tci_model(dataset, ridge_strength=args.ridge, seed=args.seed)
    model.save(args.out)
    preds = np.array([model.raw_output(f) for f, _ in dataset])
    labels = np.array([y for _, y in dataset])
    rmse = float(np.sqrt(np.mean((preds - labels) ** 2)))
    _emit(args, {"model": args.out, "n_samples": model.n_samples, "train_rmse": rmse},
          f"trained on {model.n_samples} windows, train RMSE {rmse:.4f} -> {args.out}")


# -- pmv -----------------------------------------------------------------------

def cmd_pmv(args):
    inputs = PmvInputs(args.ta, args.ta if args.tr is None else args.tr,
                       args.vel, args.rh, args.met, args.clo)
    try:
        value = compute_pmv(inputs)
    except OutOfRange as exc:
        raise CommandFailed(f"{PMV_FLAGS[exc.field]} out of range: {exc}") from None
    ppd = pmv_to_ppd(value)
    _emit(args, {"pmv": round(value, 3), "ppd": round(ppd, 3)},
          f"PMV {value:.3f}\nPPD {ppd:.3f}")


# -- profile -------------------------------------------------------------------

def _parse_sweep(text):
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("sweep must look like lo:hi:step") from None
    if not (lo < hi and step > 0):
        raise argparse.ArgumentTypeError("sweep needs lo < hi and step > 0")
    return lo, hi, step


def _template_feature_fn(model):
    base = np.array(model.feature_mean, dtype=float)

    def features_at(temp):
        x = base.copy()
        x[AIR_TEMP_INDEX] = temp
        return x

    return features_at


def cmd_profile(args):
    model = TciModel.load(args.model)
    lo, hi, step = args.sweep
    if args.config:
        config = ScenarioConfig.load(args.config)
        fns = {
            o.occupant_id: occupant_feature_fn(
                o, config.environment, config.calibration.samples_per_step,
                config.node_rate, config.window)
            for o in config.occupants
        }
        group = profile_group(model, fns, sweep=(lo, hi), step=step, grid_step=args.grid_step)
    else:
        fn = _template_feature_fn(model)
        neutral, sens = estimate_neutral_temp(model, fn, (lo, hi), step)
        group = select_setpoint(build_group_profile([OccupantProfile("template", neutral, sens)]),
                                model, {"template": fn}, args.grid_step)
    if args.out:
        group.to_json(args.out)
    lines = [f"{m.occupant_id}: neutral {m.neutral_temp:.3f} degC, "
             f"sensitivity {m.sensitivity:.3f} TCI/degC"
             for m in sorted(group.members, key=lambda m: m.occupant_id)]
    lo_b, hi_b = group.band
    lines.append(f"t_bar {group.t_bar:.3f}  sigma {group.sigma:.3f}  "
                 f"band [{lo_b:.3f}, {hi_b:.3f}]  t0 {group.t0:.3f}")
    payload = group.to_dict()
    payload.pop("objective_trace")
    _emit(args, payload, "\n".join(lines))


# -- serve ---------------------------------------------------------------------

def cmd_serve(args):
    cfg = GatewayConfig.load(args.config, port=args.port, host=args.host, token=args.token,
                             dropout_timeout=args.dropout_timeout,
                             snapshot_path=args.snapshot)
    if not cfg.token:
        raise CommandFailed("a shared token is required (--token or COMFORTLOOP_TOKEN)")
    if cfg.snapshot_path and os.path.exists(cfg.snapshot_path):
        gateway = Gateway.restore(cfg.snapshot_path, cfg.token)
        logger.info("restored %d samples from %s", gateway.stored_count(), cfg.snapshot_path)
    else:
        gateway = Gateway(cfg.token, cfg.dropout_timeout)
    server = GatewayServer(gateway, cfg.host, cfg.port, snapshot_path=cfg.snapshot_path,
                           snapshot_interval=cfg.snapshot_interval)
    print(f"gateway listening on {cfg.host}:{cfg.port}", flush=True)
    try:
        asyncio.run(server.serve_forever())
    except KeyboardInterrupt:
        pass


# -- replay --------------------------------------------------------------------

def replay_trace(trace_path, summary_path):
    """Re-run the controller over a recorded trace.

    Returns ``(replayed, recorded)`` command lists of
    ``(time, target, reason)`` tuples.
    """
    with open(summary_path) as fh:
        summary = json.load(fh)
    profiles = {p["occupant_id"]: OccupantProfile(**p) for p in summary["profiles"]}

    def group_for(event):
        group = build_group_profile([profiles[oid] for oid in event["members"]])
        return replace(group, t0=event["t0"])

    events = summary["occupancy_events"]
    if not events:
        raise NoGroupProfile("summary has no occupancy events")
    pending = {e["time"]: e for e in events[1:]}

    steps = OrderedDict()
    with open(trace_path, newline="") as fh:
        for row in csv.DictReader(fh):
            steps.setdefault(float(row["time"]), []).append(row)

    ctl = Controller(group=group_for(events[0]), eps_tci=summary["eps_tci"],
                     eps_temp=summary["eps_temp"])
    for now, rows in steps.items():
        air_temp = float(rows[0]["air_temp"])
        if now in pending:
            ctl.on_occupancy_change(group_for(pending.pop(now)), now, air_temp)
        tcis = [(r["occupant_id"], float(r["tci_pred"])) for r in rows if r["tci_pred"] != ""]
        if tcis:
            ctl.evaluate(sorted(tcis), air_temp, now)

    replayed = [(c.issued_at, c.target_temp, c.reason.value) for c in ctl.commands]
    recorded = [(c["issued_at"], c["target_temp"], c["reason"]) for c in summary["commands"]]

    # the trace's own reason column must tell the same story
    reasons = [(t, r) for t, rows in steps.items() for r in rows[0]["command_reason"].split(";")
               if r]
    if reasons != [(t, r) for t, _, r in recorded]:
        recorded = recorded + [("trace-column-mismatch", None, None)]
    return replayed, recorded


def cmd_replay(args):
    summary = args.summary or os.path.join(os.path.dirname(args.trace) or ".", "summary.json")
    replayed, recorded = replay_trace(args.trace, summary)
    diffs = []
    for i in range(max(len(replayed), len(recorded))):
        a = replayed[i] if i < len(replayed) else None
        b = recorded[i] if i < len(recorded) else None
        if a != b:
            diffs.append({"index": i, "replayed": a, "recorded": b})
    _emit(args, {"commands": len(replayed), "diffs": diffs},
          f"replayed {len(replayed)} commands, {len(diffs)} diffs"
          + "".join(f"\n  #{d['index']}: replayed={d['replayed']} recorded={d['recorded']}"
                    for d in diffs))
    if diffs:
        raise CommandFailed("replayed command sequence differs from the recording")


# -- parser --------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="comfortloop",
        description="Physiology-driven group setpoint control: simulation and hub tools.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    p = add("simulate", cmd_simulate, "run a closed-loop scenario")
    p.add_argument("--config", required=True, help="scenario JSON or TOML file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override the scenario master_seed")
    p.add_argument("--duration", type=float, help="override the simulated duration (s)")

    p = add("train", cmd_train, "train a TCI model from a labelled CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--ridge", type=float, default=DEFAULT_RIDGE)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=float, default=DEFAULT_WINDOW,
                   help="tumbling window length in seconds")

    p = add("pmv", cmd_pmv, "compute PMV and PPD")
    p.add_argument("--ta", type=float, required=True, help="air temperature, degC")
    p.add_argument("--tr", type=float, help="mean radiant temperature, degC (default: --ta)")
    p.add_argument("--vel", type=float, default=0.1, help="air velocity, m/s")
    p.add_argument("--rh", type=float, default=50.0, help="relative humidity, %%")
    p.add_argument("--met", type=float, default=1.2, help="metabolic rate, met")
    p.add_argument("--clo", type=float, default=0.5, help="clothing insulation, clo")

    p = add("profile", cmd_profile, "estimate neutral temperatures and the group setpoint")
    p.add_argument("--model", required=True)
    p.add_argument("--sweep", type=_parse_sweep, default=(16.0, 30.0, 0.5),
                   help="lo:hi:step in degC")
    p.add_argument("--config", help="scenario file whose occupants supply response curves")
    p.add_argument("--grid-step", type=float, default=0.1)
    p.add_argument("--out", help="write the group profile JSON here")

    p = add("serve", cmd_serve, "run the telemetry gateway")
    p.add_argument("--config", help="gateway JSON config")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--token")
    p.add_argument("--dropout-timeout", type=float)
    p.add_argument("--snapshot", help="snapshot file, restored on start if present")

    p = add("replay", cmd_replay, "re-run the controller over a trace and diff commands")
    p.add_argument("--trace", required=True)
    p.add_argument("--summary", help="summary JSON (default: next to the trace)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except CommandFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ComfortLoopError as exc:
        print(f"error: {args.command} failed in {_origin(exc)}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
