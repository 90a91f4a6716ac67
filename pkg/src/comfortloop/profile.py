"""Per-occupant neutral temperatures and group setpoint selection."""

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import EmptyGroup, NoNeutralPoint, NonMonotone
from .predictor import TciModel, predict_tci

FeatureFn = Callable[[float], np.ndarray]

BISECT_TCI_TOL = 1e-4
BISECT_WIDTH_TOL = 0.01  # degC
SENSITIVITY_STEP = 0.1  # degC, central difference half-width
DEFAULT_GRID_STEP = 0.1


@dataclass(frozen=True)
class OccupantProfile:
    occupant_id: str
    neutral_temp: float
    sensitivity: float


@dataclass(frozen=True)
class GroupThermalProfile:
    members: tuple
    t_bar: float
    sigma: float
    t0: Optional[float] = None
    objective_trace: tuple = field(default=(), compare=False)

    @property
    def band(self):
        return (self.t_bar - self.sigma, self.t_bar + self.sigma)

    @property
    def member_ids(self):
        return tuple(sorted(m.occupant_id for m in self.members))

    def to_dict(self):
        lo, hi = self.band
        return {
            "members": [
                {"occupant_id": m.occupant_id, "neutral_temp": m.neutral_temp,
                 "sensitivity": m.sensitivity}
                for m in sorted(self.members, key=lambda m: m.occupant_id)
            ],
            "t_bar": self.t_bar,
            "sigma": self.sigma,
            "band": [lo, hi],
            "t0": self.t0,
            "objective_trace": [
                {"candidate": c, "objective": v} for c, v in self.objective_trace
            ],
        }

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def _grid(lo, hi, step):
    n = int(math.floor((hi - lo) / step + 1e-9))
    pts = [lo + k * step for k in range(n + 1)]
    if hi - pts[-1] > 1e-9:
        pts.append(hi)
    return pts


def _bisect(f, a, fa, b, fb):
    while True:
        mid = 0.5 * (a + b)
        fm = f(mid)
        if abs(fm) < BISECT_TCI_TOL:
            return mid
        if (b - a) < BISECT_WIDTH_TOL:
            # secant through the final bracket; stays inside [a, b]
            return a - fa * (b - a) / (fb - fa)
        if (fm < 0) == (fa < 0):
            a, fa = mid, fm
        else:
            b, fb = mid, fm


def estimate_neutral_temp(model: TciModel, features_at: FeatureFn,
                          sweep=(16.0, 30.0), step=0.5):
    """Air temperature where the predicted TCI crosses zero.

    Scans the sweep grid for a single sign change and bisects inside the
    bracketing cell. Returns ``(neutral_temp, sensitivity)`` where the
    sensitivity is a central difference of predicted TCI at the root.
    """
    lo, hi = sweep
    if not lo < hi:
        raise ValueError("sweep must satisfy lo < hi")
    if step <= 0:
        raise ValueError("step must be positive")

    def tci(t):
        return predict_tci(model, features_at(t))

    temps = _grid(lo, hi, step)
    values = [tci(t) for t in temps]

    # sign changes between nonzero grid values; exact zeros are roots
    signed = [(t, v) for t, v in zip(temps, values) if v != 0.0]
    changes = [
        i for i in range(len(signed) - 1)
        if (signed[i][1] < 0) != (signed[i + 1][1] < 0)
    ]
    if len(changes) > 1:
        raise NonMonotone(
            f"predicted TCI changes sign {len(changes)} times over [{lo:g}, {hi:g}]"
        )
    zeros = [t for t, v in zip(temps, values) if v == 0.0]
    if changes:
        (a, fa), (b, fb) = signed[changes[0]], signed[changes[0] + 1]
        inner = [t for t in zeros if a < t < b]
        root = inner[0] if inner else _bisect(tci, a, fa, b, fb)
    elif zeros and len(zeros) == len(temps):
        raise NonMonotone("predicted TCI is identically zero over the sweep")
    elif zeros:
        root = zeros[0]
    else:
        raise NoNeutralPoint(
            f"predicted TCI never reaches 0 over [{lo:g}, {hi:g}] "
            f"(range {min(values):+.3f}..{max(values):+.3f})"
        )

    h = SENSITIVITY_STEP
    sensitivity = (tci(root + h) - tci(root - h)) / (2 * h)
    if sensitivity <= 0:
        raise NonMonotone(
            f"predicted TCI does not increase through the neutral point at {root:.3f}"
        )
    return root, sensitivity


def build_group_profile(members: Sequence[OccupantProfile]) -> GroupThermalProfile:
    """Mean and population spread of the members' neutral temperatures."""
    members = tuple(members)
    if not members:
        raise EmptyGroup("group profile needs at least one member")
    temps = [m.neutral_temp for m in members]
    n = len(temps)
    t_bar = math.fsum(temps) / n
    sigma = math.sqrt(math.fsum((t - t_bar) ** 2 for t in temps) / n)
    return GroupThermalProfile(members=members, t_bar=t_bar, sigma=sigma)


def setpoint_candidates(group: GroupThermalProfile, grid_step=DEFAULT_GRID_STEP):
    """Grid over the band centred on the mean, plus both band edges."""
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    lo, hi = group.band
    k = int(math.floor(group.sigma / grid_step + 1e-9))
    pts = [group.t_bar + i * grid_step for i in range(-k, k + 1)]
    if group.sigma > 0:
        if pts[0] - lo > 1e-9:
            pts.insert(0, lo)
        if hi - pts[-1] > 1e-9:
            pts.append(hi)
    return pts


def group_objective(model, feature_fns: Mapping[str, FeatureFn], member_ids, temp):
    return math.fsum(predict_tci(model, feature_fns[oid](temp)) ** 2 for oid in member_ids)


def select_setpoint(group: GroupThermalProfile, model: TciModel,
                    feature_fns: Mapping[str, FeatureFn],
                    grid_step=DEFAULT_GRID_STEP) -> GroupThermalProfile:
    """Choose t0 inside ``t_bar +/- sigma`` minimising the summed squared TCI.

    Ties go to the candidate nearest ``t_bar``, then to the lower
    temperature. Returns a copy of ``group`` with ``t0`` and the
    per-candidate objective trace filled in.
    """
    if not group.members:
        raise EmptyGroup("group profile needs at least one member")
    ids = group.member_ids
    trace = tuple(
        (t, group_objective(model, feature_fns, ids, t))
        for t in setpoint_candidates(group, grid_step)
    )
    best = min(v for _, v in trace)
    tol = 1e-12 * max(1.0, best)
    tied = [t for t, v in trace if v <= best + tol]
    t0 = min(tied, key=lambda t: (abs(t - group.t_bar), t))
    return replace(group, t0=t0, objective_trace=trace)


def profile_group(model, feature_fns: Mapping[str, FeatureFn], member_ids=None,
                  sweep=(16.0, 30.0), step=0.5, grid_step=DEFAULT_GRID_STEP):
    """Estimate every member's profile and select the group setpoint."""
    ids = sorted(feature_fns if member_ids is None else member_ids)
    members = []
    for oid in ids:
        neutral, sens = estimate_neutral_temp(model, feature_fns[oid], sweep, step)
        members.append(OccupantProfile(oid, neutral, sens))
    return select_setpoint(build_group_profile(members), model, feature_fns, grid_step)
