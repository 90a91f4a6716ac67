"""Setpoint controller: a small explicit state machine.

``evaluate`` and ``on_occupancy_change`` are pure transition functions over
an immutable :class:`ControllerState`. :class:`Controller` wraps them with
the mutable bookkeeping a running loop needs and writes the audit log.
"""

import enum
import json
from dataclasses import dataclass, replace
from typing import Optional

from .errors import NoGroupProfile, NoOccupants
from .profile import GroupThermalProfile

EPS_TCI = 0.5
EPS_TEMP = 0.2  # degC
EVAL_PERIOD = 60.0  # s
SETPOINT_LIMITS = (10.0, 35.0)


class Phase(str, enum.Enum):
    IDLE = "Idle"
    ADJUSTING = "Adjusting"
    CONVERGED = "Converged"


class Reason(str, enum.Enum):
    TCI_OUT_OF_BAND = "TciOutOfBand"
    OCCUPANCY_CHANGED = "OccupancyChanged"
    MANUAL = "Manual"


@dataclass(frozen=True)
class SetpointCommand:
    target_temp: float
    issued_at: float
    reason: Reason

    def __post_init__(self):
        lo, hi = SETPOINT_LIMITS
        if not lo <= self.target_temp <= hi:
            raise ValueError(
                f"setpoint {self.target_temp:.2f} outside [{lo:g}, {hi:g}] degC"
            )

    def to_dict(self):
        return {"target_temp": self.target_temp, "issued_at": self.issued_at,
                "reason": self.reason.value}


@dataclass(frozen=True)
class ControllerState:
    phase: Phase = Phase.IDLE
    current_setpoint: Optional[float] = None
    group: Optional[GroupThermalProfile] = None
    last_eval_time: float = float("-inf")
    occupancy_epoch: int = 0


def _settled(state, air_temp, eps_temp):
    return (state.current_setpoint is not None
            and abs(air_temp - state.current_setpoint) <= eps_temp)


def evaluate(state: ControllerState, tcis, air_temp, now,
             eps_tci=EPS_TCI, eps_temp=EPS_TEMP):
    """One pass of the comfort loop.

    ``tcis`` is a sequence of ``(occupant_id, tci)``. Returns
    ``(new_state, command_or_None)``.
    """
    if not tcis:
        raise NoOccupants("no occupant TCIs to evaluate")
    if state.group is None or state.group.t0 is None:
        raise NoGroupProfile("controller has no group profile with a setpoint")

    t0 = state.group.t0
    uncomfortable = any(abs(v) > eps_tci for _, v in tcis)
    stale = state.current_setpoint is None or abs(state.current_setpoint - t0) > eps_temp
    state = replace(state, last_eval_time=now)

    if uncomfortable and stale:
        cmd = SetpointCommand(t0, now, Reason.TCI_OUT_OF_BAND)
        state = replace(state, phase=Phase.ADJUSTING, current_setpoint=t0)
        if _settled(state, air_temp, eps_temp):
            state = replace(state, phase=Phase.CONVERGED)
        return state, cmd
    if _settled(state, air_temp, eps_temp):
        return replace(state, phase=Phase.CONVERGED), None
    if state.current_setpoint is None:
        return replace(state, phase=Phase.IDLE), None
    return replace(state, phase=Phase.ADJUSTING), None


def on_occupancy_change(state: ControllerState, new_group: GroupThermalProfile,
                        now, eps_temp=EPS_TEMP):
    if new_group.t0 is None:
        raise NoGroupProfile("new group profile has no selected setpoint")
    state = replace(state, group=new_group, occupancy_epoch=state.occupancy_epoch + 1)
    sp = state.current_setpoint
    if sp is not None and abs(new_group.t0 - sp) <= eps_temp:
        return state, None
    cmd = SetpointCommand(new_group.t0, now, Reason.OCCUPANCY_CHANGED)
    return replace(state, phase=Phase.ADJUSTING, current_setpoint=new_group.t0), cmd


class Controller:
    """Serialised controller actor with an optional JSON-lines audit sink."""

    def __init__(self, group=None, audit=None, eps_tci=EPS_TCI, eps_temp=EPS_TEMP):
        self.state = ControllerState(group=group)
        self.eps_tci = eps_tci
        self.eps_temp = eps_temp
        self.audit = audit
        self.commands = []

    def _record(self, before, now, tcis, air_temp, cmd):
        if cmd is not None:
            self.commands.append(cmd)
        if self.audit is None:
            return
        entry = {
            "time": now,
            "phase_before": before.value,
            "phase_after": self.state.phase.value,
            "tcis": {oid: v for oid, v in tcis} if tcis is not None else None,
            "air_temp": air_temp,
            "command": cmd.to_dict() if cmd else None,
        }
        line = json.dumps(entry, sort_keys=True)
        if callable(getattr(self.audit, "write", None)):
            self.audit.write(line + "\n")
        else:
            self.audit.append(line)

    def evaluate(self, tcis, air_temp, now):
        before = self.state.phase
        self.state, cmd = evaluate(self.state, tcis, air_temp, now,
                                   self.eps_tci, self.eps_temp)
        self._record(before, now, tcis, air_temp, cmd)
        return cmd

    def on_occupancy_change(self, group, now, air_temp=None):
        before = self.state.phase
        self.state, cmd = on_occupancy_change(self.state, group, now, self.eps_temp)
        self._record(before, now, None, air_temp, cmd)
        return cmd
