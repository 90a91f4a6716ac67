"""Deterministic room, occupant and scenario simulation.

Every random draw is keyed by ``(seed, occupant, signal, time)`` rather
than taken from a shared stream, so a trace does not depend on the order in
which occupants or nodes are sampled.
"""

import csv
import hashlib
import io
import json
import logging
import math
import struct
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from .comfort import clamp_tci
from .control import EPS_TCI, EPS_TEMP, EVAL_PERIOD, Controller, Phase
from .errors import ComfortLoopError, ConfigError, EmptyWindow, ScenarioError
from .gateway import DEFAULT_DROPOUT_TIMEOUT, Gateway, NodeKind, NodeStatus
from .predictor import (
    DEFAULT_RIDGE,
    DEFAULT_WINDOW,
    EnvSample,
    PhysioSample,
    extract_features,
    predict_tci,
    train_tci_model,
)
from .profile import (
    DEFAULT_GRID_STEP,
    OccupantProfile,
    build_group_profile,
    estimate_neutral_temp,
    select_setpoint,
)

logger = logging.getLogger(__name__)

ENV_NODE_ID = "env-01"
SCENARIO_TOKEN = "sim-token"
CALIBRATION_EPOCH = -1.0e6
PROBE_EPOCH = -2.0e6

TRACE_COLUMNS = ("time", "air_temp", "setpoint", "occupant_id", "tci_pred",
                 "tci_true", "command_reason")


# -- room plant ---------------------------------------------------------------

@dataclass(frozen=True)
class RoomPlant:
    """Single-zone RC room with a proportional HVAC actuator.

    Units: J/degC, W/degC, degC, W. ``gain`` is the actuator's
    proportional gain in W/degC.
    """

    thermal_capacitance: float = 2.0e6
    loss_coefficient: float = 80.0
    outdoor_temp: float = 15.0
    hvac_max_power: float = 3000.0
    air_temp: float = 20.0
    gain: float = 150.0

    def validate(self):
        if self.thermal_capacitance <= 0:
            raise ConfigError("thermal_capacitance must be positive")
        if self.loss_coefficient < 0:
            raise ConfigError("loss_coefficient must be non-negative")
        if self.hvac_max_power <= 0:
            raise ConfigError("hvac_max_power must be positive")
        if self.gain <= 0:
            raise ConfigError("gain must be positive")
        return self

    @property
    def max_stable_dt(self):
        """Largest explicit-Euler step that cannot overshoot."""
        return self.thermal_capacitance / (self.gain + self.loss_coefficient)

    def fixed_point(self, setpoint):
        """Unsaturated steady state for a held setpoint."""
        ua, k = self.loss_coefficient, self.gain
        if setpoint is None:
            return self.outdoor_temp
        return (k * setpoint + ua * self.outdoor_temp) / (k + ua)


def hvac_power(plant: RoomPlant, setpoint):
    if setpoint is None:
        return 0.0
    p = plant.gain * (setpoint - plant.air_temp)
    return min(plant.hvac_max_power, max(-plant.hvac_max_power, p))


def plant_step(plant: RoomPlant, setpoint, dt) -> RoomPlant:
    if dt <= 0:
        raise ValueError("dt must be positive")
    p = hvac_power(plant, setpoint)
    loss = plant.loss_coefficient * (plant.air_temp - plant.outdoor_temp)
    return replace(plant, air_temp=plant.air_temp + dt / plant.thermal_capacitance * (p - loss))


# -- synthetic occupants ------------------------------------------------------

@dataclass(frozen=True)
class SyntheticOccupant:
    occupant_id: str
    true_neutral_temp: float
    true_sensitivity: float = 0.5  # TCI per degC
    hr_base: float = 70.0
    hr_slope: float = 2.0  # bpm per degC
    gsr_base: float = 2.0
    gsr_slope: float = 0.3  # uS per degC above neutral
    clothing_insulation: float = 0.5
    metabolic_rate: float = 1.2
    hr_noise_sd: float = 0.0
    gsr_noise_sd: float = 0.0
    rng_seed: int = 0

    def validate(self):
        if self.true_sensitivity <= 0:
            raise ConfigError(f"{self.occupant_id}: true_sensitivity must be positive")
        if not 40 < self.hr_base < 100:
            raise ConfigError(f"{self.occupant_id}: hr_base must lie in (40, 100)")
        if self.hr_noise_sd < 0 or self.gsr_noise_sd < 0:
            raise ConfigError(f"{self.occupant_id}: noise sd must be non-negative")
        return self


def keyed_normal(seed, occupant_id, signal, t):
    """Standard normal draw that depends only on its key.

    The key is hashed into two uniforms and passed through Box-Muller.
    """
    key = f"{seed}/{occupant_id}/{signal}/{float(t)!r}".encode()
    a, b = struct.unpack("<QQ", hashlib.blake2b(key, digest_size=16).digest())
    u1 = (a + 1) / 18446744073709551617.0  # (0, 1]
    u2 = b / 18446744073709551616.0
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def sample_occupant(occ: SyntheticOccupant, air_temp, t) -> PhysioSample:
    delta = air_temp - occ.true_neutral_temp
    hr = occ.hr_base + occ.hr_slope * delta
    gsr = occ.gsr_base + occ.gsr_slope * max(0.0, delta)
    if occ.hr_noise_sd:
        hr += occ.hr_noise_sd * keyed_normal(occ.rng_seed, occ.occupant_id, "hr", t)
    if occ.gsr_noise_sd:
        gsr += occ.gsr_noise_sd * keyed_normal(occ.rng_seed, occ.occupant_id, "gsr", t)
    hr = min(249.0, max(26.0, hr))
    gsr = max(0.01, gsr)
    return PhysioSample(occ.occupant_id, float(t), hr, gsr,
                        occ.clothing_insulation, occ.metabolic_rate)


def true_tci(occ: SyntheticOccupant, air_temp) -> float:
    return clamp_tci(occ.true_sensitivity * (air_temp - occ.true_neutral_temp))


# -- scenario configuration ---------------------------------------------------

@dataclass(frozen=True)
class Environment:
    rel_humidity: float = 50.0
    air_velocity: float = 0.1

    def sample(self, t, air_temp):
        return EnvSample(float(t), air_temp, air_temp, self.rel_humidity, self.air_velocity)


@dataclass(frozen=True)
class Dropout:
    """A wearable stays silent for ``start <= t < end``."""

    occupant_id: str
    start: float
    end: float

    def silences(self, occupant_id, t):
        return occupant_id == self.occupant_id and self.start <= t < self.end


@dataclass(frozen=True)
class Calibration:
    sweep_lo: float = 16.0
    sweep_hi: float = 30.0
    sweep_step: float = 0.5
    samples_per_step: int = 10
    ridge_strength: float = DEFAULT_RIDGE

    @property
    def temps(self):
        n = int(round((self.sweep_hi - self.sweep_lo) / self.sweep_step))
        return [self.sweep_lo + k * self.sweep_step for k in range(n + 1)]


@dataclass(frozen=True)
class ScenarioConfig:
    occupants: tuple
    plant: RoomPlant = field(default_factory=RoomPlant)
    duration: float = 7200.0
    dt: float = 10.0
    node_rate: float = 1.0
    master_seed: int = 0
    initial_air_temp: float = 28.0
    environment: Environment = field(default_factory=Environment)
    calibration: Calibration = field(default_factory=Calibration)
    dropouts: tuple = ()
    eval_period: float = EVAL_PERIOD
    window: float = DEFAULT_WINDOW
    grid_step: float = DEFAULT_GRID_STEP
    eps_tci: float = EPS_TCI
    eps_temp: float = EPS_TEMP
    dropout_timeout: float = DEFAULT_DROPOUT_TIMEOUT

    def validate(self):
        if not self.occupants:
            raise ConfigError("scenario needs at least one occupant")
        ids = [o.occupant_id for o in self.occupants]
        if len(set(ids)) != len(ids) or ENV_NODE_ID in ids:
            raise ConfigError("occupant ids must be unique and differ from the env node id")
        for occ in self.occupants:
            occ.validate()
        self.plant.validate()
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if self.duration < self.dt:
            raise ConfigError("duration must be at least one dt")
        if self.node_rate <= 0:
            raise ConfigError("node_rate must be positive")
        bound = self.plant.max_stable_dt
        if self.dt > bound:
            raise ConfigError(
                f"dt={self.dt:g}s violates the plant stability bound "
                f"dt <= C/(gain + UA) = {bound:.6g}s"
            )
        if not _is_multiple(self.eval_period, self.dt):
            raise ConfigError("eval_period must be a whole number of dt steps")
        if not _is_multiple(self.dt * self.node_rate, 1.0):
            raise ConfigError("dt * node_rate must be a whole number of frames")
        if self.calibration.samples_per_step / self.node_rate > self.window:
            raise ConfigError("calibration samples must fit inside one feature window")
        return self

    @classmethod
    def from_dict(cls, doc):
        doc = dict(doc)
        try:
            occupants = tuple(SyntheticOccupant(**o) for o in doc.pop("occupants"))
            plant = RoomPlant(**doc.pop("plant", {}))
            env = Environment(**doc.pop("environment", {}))
            calib = Calibration(**doc.pop("calibration", {}))
            dropouts = tuple(Dropout(**d) for d in doc.pop("dropouts", ()))
            return cls(occupants=occupants, plant=plant, environment=env,
                       calibration=calib, dropouts=dropouts, **doc)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"invalid scenario config: {exc}") from None

    def to_dict(self):
        return asdict(self)

    @classmethod
    def load(cls, path):
        """Read a scenario from a JSON or TOML file."""
        if str(path).endswith(".toml"):
            try:
                import tomllib
            except ModuleNotFoundError:  # Python < 3.11
                import tomli as tomllib
            with open(path, "rb") as fh:
                doc = tomllib.load(fh)
        else:
            with open(path) as fh:
                doc = json.load(fh)
        return cls.from_dict(doc)


def _is_multiple(x, unit):
    k = round(x / unit)
    return k >= 1 and abs(k * unit - x) < 1e-9 * max(1.0, abs(x))


# -- calibration (offline learning) ----------------------------------------------

def calibration_samples(occ, env, calib, node_rate, window):
    """Yield ``(temp, physio, env)`` windows of the calibration sweep for one occupant."""
    for k, temp in enumerate(calib.temps):
        base = CALIBRATION_EPOCH + k * window
        times = [base + j / node_rate for j in range(calib.samples_per_step)]
        yield (temp,
               [sample_occupant(occ, temp, t) for t in times],
               [env.sample(t, temp) for t in times])


def calibration_dataset(config: ScenarioConfig):
    """Labelled training rows plus the per-sample records behind them.

    Windows whose ground-truth comfort sits beyond the +/-3 rail are left
    out: a clamped label carries no information about the slope and would
    bias the linear fit.
    """
    rows, records = [], []
    for occ in config.occupants:
        for temp, physio, env in calibration_samples(
                occ, config.environment, config.calibration, config.node_rate,
                config.window):
            raw = occ.true_sensitivity * (temp - occ.true_neutral_temp)
            if abs(raw) > 3.0:
                continue
            label = clamp_tci(raw)
            end = physio[-1].timestamp
            rows.append((extract_features(physio, env, config.window, end=end), label))
            for p, e in zip(physio, env):
                records.append({
                    "occupant_id": occ.occupant_id, "timestamp": p.timestamp,
                    "hr": p.heart_rate, "gsr": p.gsr, "clo": p.clothing_insulation,
                    "met": p.metabolic_rate, "air_temp": e.air_temp,
                    "mrt": e.mean_radiant_temp, "rh": e.rel_humidity,
                    "vel": e.air_velocity, "tci_label": label,
                })
    return rows, records


def occupant_feature_fn(occ, env, samples=10, node_rate=1.0, window=DEFAULT_WINDOW):
    """The occupant's feature vector as a function of held air temperature.

    Sample times are fixed, so noise enters as the same offset at every
    temperature and the function stays deterministic and smooth in temp.
    """
    times = [PROBE_EPOCH + j / node_rate for j in range(samples)]

    def features_at(temp):
        physio = [sample_occupant(occ, temp, t) for t in times]
        envs = [env.sample(t, temp) for t in times]
        return extract_features(physio, envs, window, end=times[-1])

    return features_at


@dataclass
class Calibrated:
    model: object
    feature_fns: dict
    profiles: dict
    group: object
    records: list


def calibrate(config: ScenarioConfig) -> Calibrated:
    """Phase A: label a temperature sweep, train, profile, pick t0."""
    calib = config.calibration
    rows, records = calibration_dataset(config)
    model = train_tci_model(rows, calib.ridge_strength, seed=config.master_seed)
    fns = {
        o.occupant_id: occupant_feature_fn(o, config.environment, calib.samples_per_step,
                                           config.node_rate, config.window)
        for o in config.occupants
    }
    profiles = {}
    for oid in sorted(fns):
        neutral, sens = estimate_neutral_temp(
            model, fns[oid], (calib.sweep_lo, calib.sweep_hi), calib.sweep_step)
        profiles[oid] = OccupantProfile(oid, neutral, sens)
    group = select_setpoint(build_group_profile(profiles.values()), model, fns,
                            config.grid_step)
    return Calibrated(model, fns, profiles, group, records)


def seeded_occupants(config: ScenarioConfig):
    """Occupants with noise streams re-keyed by the scenario's master seed."""
    return tuple(
        replace(o, rng_seed=config.master_seed * 1_000_003 + o.rng_seed) for o in config.occupants
    )


# -- closed loop ----------------------------------------------------------------

def _fmt(x):
    return "" if x is None else repr(float(x))


@dataclass
class ScenarioTrace:
    rows: list
    times: np.ndarray
    air_temps: np.ndarray
    commands: list
    occupancy_events: list
    audit: list
    summary: dict
    model: object = None
    group: object = None
    calibration_records: list = field(default_factory=list, repr=False)

    def csv_text(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for r in self.rows:
            writer.writerow([_fmt(r["time"]), _fmt(r["air_temp"]), _fmt(r["setpoint"]),
                             r["occupant_id"], _fmt(r["tci_pred"]), _fmt(r["tci_true"]),
                             r["command_reason"]])
        return buf.getvalue()

    def summary_json(self):
        return json.dumps(self.summary, indent=2, sort_keys=True) + "\n"

    def write(self, out_dir):
        """Write trace.csv, summary.json, audit.jsonl, model.json and group.json."""
        import os

        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "trace.csv"), "w", newline="") as fh:
            fh.write(self.csv_text())
        with open(os.path.join(out_dir, "summary.json"), "w") as fh:
            fh.write(self.summary_json())
        with open(os.path.join(out_dir, "audit.jsonl"), "w") as fh:
            fh.writelines(line + "\n" for line in self.audit)
        if self.model is not None:
            self.model.save(os.path.join(out_dir, "model.json"))
        if self.group is not None:
            self.group.to_json(os.path.join(out_dir, "group.json"))

    def time_to_band(self, target, tol):
        """First time after which the plant stays within ``tol`` of ``target``."""
        inside = np.abs(self.air_temps - target) <= tol
        if not inside[-1]:
            return None
        outside = np.flatnonzero(~inside)
        idx = 0 if outside.size == 0 else outside[-1] + 1
        return float(self.times[idx])


def _mean_sq_tci(occupants, air_temp):
    return math.fsum(true_tci(o, air_temp) ** 2 for o in occupants) / len(occupants)


class _Loop:
    """Phase B state: gateway, controller, plant and trace buffers."""

    def __init__(self, config, occupants, calibrated):
        self.config = config
        self.occupants = occupants
        self.cal = calibrated
        self.gateway = Gateway(SCENARIO_TOKEN, config.dropout_timeout)
        self.audit = []
        self.controller = Controller(group=calibrated.group, audit=self.audit,
                                     eps_tci=config.eps_tci, eps_temp=config.eps_temp)
        self.plant = replace(config.plant, air_temp=config.initial_air_temp)
        self.rows = []
        self.occupancy_events = [{"time": 0.0, "members": list(calibrated.group.member_ids),
                                  "t0": calibrated.group.t0}]
        self.phase_log = []

        self.gateway.register_node(ENV_NODE_ID, NodeKind.ENVIRONMENT, SCENARIO_TOKEN, 0.0)
        for occ in occupants:
            self.gateway.register_node(occ.occupant_id, NodeKind.WEARABLE, SCENARIO_TOKEN, 0.0)

    def _send(self, msg):
        msg.update(v=1, token=SCENARIO_TOKEN)
        reply = self.gateway.handle_line(json.dumps(msg).encode())
        if reply["status"] != "ok":
            raise ComfortLoopError(f"gateway rejected frame from {msg['node']}: {reply['code']}")

    def emit_frames(self, t_start):
        cfg = self.config
        env = cfg.environment
        temp = self.plant.air_temp
        for j in range(1, int(round(cfg.dt * cfg.node_rate)) + 1):
            ts = t_start + j / cfg.node_rate
            self._send({"op": "data", "node": ENV_NODE_ID, "t": ts, "ta": temp, "mrt": temp,
                        "rh": env.rel_humidity, "vel": env.air_velocity})
            for occ in self.occupants:
                if any(d.silences(occ.occupant_id, ts) for d in cfg.dropouts):
                    continue
                s = sample_occupant(occ, temp, ts)
                self._send({"op": "data", "node": occ.occupant_id, "t": ts,
                            "hr": s.heart_rate, "gsr": s.gsr,
                            "clo": s.clothing_insulation, "met": s.metabolic_rate})

    def _regroup(self, active, now, air_temp):
        profiles = [self.cal.profiles[oid] for oid in active]
        group = select_setpoint(build_group_profile(profiles), self.cal.model,
                                self.cal.feature_fns, self.config.grid_step)
        self.occupancy_events.append({"time": now, "members": list(group.member_ids),
                                      "t0": group.t0})
        return self.controller.on_occupancy_change(group, now, air_temp)

    def evaluate(self, now):
        cfg = self.config
        gw = self.gateway
        gw.sweep_dropouts(now)
        env_window = gw.query_window(ENV_NODE_ID, now - cfg.window, now)
        air_temp = env_window[-1].air_temp
        active = sorted(
            r.node_id for r in gw.nodes(kind=NodeKind.WEARABLE, status=NodeStatus.ACTIVE)
        )
        commands = []
        if not active:
            logger.warning("t=%g: no active wearables, skipping evaluation", now)
            self._record(now, air_temp, {}, commands)
            return
        if tuple(active) != self.controller.state.group.member_ids:
            cmd = self._regroup(active, now, air_temp)
            if cmd:
                commands.append(cmd)

        tcis = {}
        for oid in active:
            physio = gw.query_window(oid, now - cfg.window, now)
            try:
                feats = extract_features(physio, env_window, cfg.window, end=now)
            except EmptyWindow:
                continue
            tcis[oid] = predict_tci(self.cal.model, feats)
        if tcis:
            cmd = self.controller.evaluate(sorted(tcis.items()), air_temp, now)
            if cmd:
                commands.append(cmd)
        self.phase_log.append((now, self.controller.state.phase))
        self._record(now, air_temp, tcis, commands)

    def _record(self, now, air_temp, tcis, commands):
        reason = ";".join(c.reason.value for c in commands)
        setpoint = self.controller.state.current_setpoint
        for occ in self.occupants:
            self.rows.append({
                "time": now, "air_temp": air_temp, "setpoint": setpoint,
                "occupant_id": occ.occupant_id, "tci_pred": tcis.get(occ.occupant_id),
                "tci_true": true_tci(occ, self.plant.air_temp), "command_reason": reason,
            })


def run_scenario(config: ScenarioConfig) -> ScenarioTrace:
    """Calibrate, then close the loop between nodes, hub, controller and plant."""
    config.validate()
    occupants = seeded_occupants(config)
    seeded = replace(config, occupants=occupants)
    try:
        cal = calibrate(seeded)
    except ComfortLoopError as exc:
        raise ScenarioError(0.0, exc) from exc
    logger.info("calibrated group: t_bar=%.3f sigma=%.3f t0=%.3f",
                cal.group.t_bar, cal.group.sigma, cal.group.t0)

    loop = _Loop(config, occupants, cal)
    n_steps = int(round(config.duration / config.dt))
    eval_every = int(round(config.eval_period / config.dt))
    times = np.empty(n_steps + 1)
    temps = np.empty(n_steps + 1)
    times[0], temps[0] = 0.0, loop.plant.air_temp
    discomfort = 0.0
    start_mean = _mean_sq_tci(occupants, loop.plant.air_temp)

    now = 0.0
    for step in range(n_steps):
        t_start = step * config.dt
        now = (step + 1) * config.dt
        try:
            loop.emit_frames(t_start)
            loop.plant = plant_step(loop.plant, loop.controller.state.current_setpoint,
                                    config.dt)
            if (step + 1) % eval_every == 0:
                loop.evaluate(now)
        except ComfortLoopError as exc:
            raise ScenarioError(now, exc) from exc
        times[step + 1], temps[step + 1] = now, loop.plant.air_temp
        discomfort += _mean_sq_tci(occupants, loop.plant.air_temp) * config.dt

    ctl = loop.controller
    convergence_time = None
    if ctl.state.phase is Phase.CONVERGED:
        for t, phase in reversed(loop.phase_log):
            if phase is not Phase.CONVERGED:
                break
            convergence_time = t
    final_group = ctl.state.group
    summary = {
        "master_seed": config.master_seed,
        "t0": final_group.t0,
        "initial_t0": cal.group.t0,
        "t_bar": final_group.t_bar,
        "sigma": final_group.sigma,
        "band": list(final_group.band),
        "converged": ctl.state.phase is Phase.CONVERGED,
        "convergence_time": convergence_time,
        "final_air_temp": loop.plant.air_temp,
        "final_setpoint": ctl.state.current_setpoint,
        "discomfort_integral": discomfort,
        "start_mean_tci_sq": start_mean,
        "end_mean_tci_sq": _mean_sq_tci(occupants, loop.plant.air_temp),
        "n_commands": len(ctl.commands),
        "commands": [c.to_dict() for c in ctl.commands],
        "profiles": [
            {"occupant_id": p.occupant_id, "neutral_temp": p.neutral_temp,
             "sensitivity": p.sensitivity}
            for p in (cal.profiles[k] for k in sorted(cal.profiles))
        ],
        "occupancy_events": loop.occupancy_events,
        "eps_tci": config.eps_tci,
        "eps_temp": config.eps_temp,
    }
    return ScenarioTrace(
        rows=loop.rows, times=times, air_temps=temps, commands=list(ctl.commands),
        occupancy_events=loop.occupancy_events, audit=loop.audit, summary=summary,
        model=cal.model, group=cal.group, calibration_records=cal.records,
    )


# -- stock scenarios -------------------------------------------------------------

RESPONSIVE_PLANT = RoomPlant(
    thermal_capacitance=5.0e5,
    loss_coefficient=20.0,
    outdoor_temp=30.0,
    hvac_max_power=3000.0,
    air_temp=28.0,
    gain=2000.0,
)


def make_occupants(neutral_temps, sensitivities=None, noise_fraction=0.0, **common):
    """Occupants ``w-01, w-02, ...`` with heart-rate slopes tied to sensitivity.

    ``noise_fraction`` sets each signal's noise SD to that fraction of the
    signal's response to a 1 degC change.
    """
    sensitivities = sensitivities or [0.5] * len(neutral_temps)
    out = []
    for i, (neutral, sens) in enumerate(zip(neutral_temps, sensitivities), start=1):
        hr_slope = common.get("hr_slope", 4.0 * sens)
        gsr_slope = common.get("gsr_slope", 0.3)
        params = dict(common, hr_slope=hr_slope, gsr_slope=gsr_slope)
        out.append(SyntheticOccupant(
            occupant_id=f"w-{i:02d}",
            true_neutral_temp=float(neutral),
            true_sensitivity=float(sens),
            hr_noise_sd=noise_fraction * hr_slope,
            gsr_noise_sd=noise_fraction * gsr_slope,
            rng_seed=i,
            **{k: v for k, v in params.items() if k not in ("hr_noise_sd", "gsr_noise_sd")},
        ))
    return tuple(out)


def five_occupant_scenario(duration=10800.0, noise_fraction=0.0, master_seed=7,
                           dropouts=(), **overrides) -> ScenarioConfig:
    return ScenarioConfig(
        occupants=make_occupants([21, 22, 23, 24, 25], noise_fraction=noise_fraction),
        plant=RESPONSIVE_PLANT,
        duration=duration,
        master_seed=master_seed,
        initial_air_temp=28.0,
        dropouts=tuple(dropouts),
        **overrides,
    )


def single_occupant_scenario(neutral=22.0, duration=7200.0, master_seed=3,
                             **overrides) -> ScenarioConfig:
    return ScenarioConfig(
        occupants=make_occupants([neutral]),
        plant=RESPONSIVE_PLANT,
        duration=duration,
        master_seed=master_seed,
        initial_air_temp=28.0,
        **overrides,
    )
