"""Featurisation and ridge-regression TCI model."""

import csv
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .comfort import clamp_tci
from .errors import (
    DegenerateDesign,
    EmptyWindow,
    NotFinite,
    OutOfRange,
    TooFewSamples,
)

FEATURE_NAMES = (
    "hr_mean",
    "hr_sd",
    "gsr_mean",
    "gsr_sd",
    "clo",
    "met",
    "air_temp",
    "air_velocity",
    "rel_humidity",
)
N_FEATURES = len(FEATURE_NAMES)
AIR_TEMP_INDEX = FEATURE_NAMES.index("air_temp")

DEFAULT_WINDOW = 60.0
DEFAULT_RIDGE = 1e-3
MIN_TRAINING_ROWS = 10

DATASET_COLUMNS = (
    "occupant_id", "timestamp", "hr", "gsr", "clo", "met",
    "air_temp", "mrt", "rh", "vel", "tci_label",
)


def _check(name, value, lo, hi, lo_open=False, hi_open=False):
    ok_lo = value > lo if lo_open else value >= lo
    ok_hi = value < hi if hi_open else value <= hi
    if not (ok_lo and ok_hi):
        raise OutOfRange(name, value, lo, hi)


@dataclass(frozen=True)
class PhysioSample:
    occupant_id: str
    timestamp: float
    heart_rate: float  # bpm
    gsr: float  # microsiemens
    clothing_insulation: float
    metabolic_rate: float

    def validate(self):
        _check("heart_rate", self.heart_rate, 25.0, 250.0, lo_open=True, hi_open=True)
        _check("gsr", self.gsr, 0.0, math.inf, lo_open=True, hi_open=True)
        _check("clothing_insulation", self.clothing_insulation, 0.0, 2.0)
        _check("metabolic_rate", self.metabolic_rate, 0.7, 4.0)
        return self


@dataclass(frozen=True)
class EnvSample:
    timestamp: float
    air_temp: float
    mean_radiant_temp: float
    rel_humidity: float
    air_velocity: float

    def validate(self):
        _check("air_temp", self.air_temp, -10.0, 50.0)
        _check("mean_radiant_temp", self.mean_radiant_temp, -10.0, 50.0)
        _check("rel_humidity", self.rel_humidity, 0.0, 100.0)
        _check("air_velocity", self.air_velocity, 0.0, 5.0)
        return self


def _mean_sd(values):
    arr = np.asarray(values, dtype=float)
    return float(arr.mean()), float(arr.std())


def extract_features(physio, env, window=DEFAULT_WINDOW, end=None):
    """Aggregate one occupant's samples into a 9-element feature vector.

    The window is ``(end - window, end]``; ``end`` defaults to the latest
    timestamp seen in either list. Standard deviations are population SDs.
    """
    if end is None:
        stamps = [s.timestamp for s in physio] + [s.timestamp for s in env]
        if not stamps:
            raise EmptyWindow("no samples supplied")
        end = max(stamps)
    start = end - window
    p = [s for s in physio if start < s.timestamp <= end]
    e = [s for s in env if start < s.timestamp <= end]
    if not p:
        raise EmptyWindow(f"no physiological samples in ({start:g}, {end:g}]")
    if not e:
        raise EmptyWindow(f"no environment samples in ({start:g}, {end:g}]")
    if len({s.occupant_id for s in p}) > 1:
        raise ValueError("physiological samples span more than one occupant")

    latest = max(p, key=lambda s: s.timestamp)
    hr_mean, hr_sd = _mean_sd([s.heart_rate for s in p])
    gsr_mean, gsr_sd = _mean_sd([s.gsr for s in p])
    return np.array([
        hr_mean,
        hr_sd,
        gsr_mean,
        gsr_sd,
        latest.clothing_insulation,
        latest.metabolic_rate,
        float(np.mean([s.air_temp for s in e])),
        float(np.mean([s.air_velocity for s in e])),
        float(np.mean([s.rel_humidity for s in e])),
    ])


@dataclass(frozen=True)
class TciModel:
    """Linear model on z-scored features. Immutable once trained."""

    coef: np.ndarray
    intercept: float
    feature_mean: np.ndarray
    feature_scale: np.ndarray
    seed: int = 0
    n_samples: int = 0
    ridge_strength: float = DEFAULT_RIDGE
    feature_names: tuple = field(default=FEATURE_NAMES)

    def __post_init__(self):
        for name in ("coef", "feature_mean", "feature_scale"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.coef.shape != (N_FEATURES,):
            raise ValueError(f"coef must have {N_FEATURES} entries")
        if not np.all(self.feature_scale > 0):
            raise ValueError("feature scales must be positive")
        if not np.all(np.isfinite(self.coef)):
            raise NotFinite("model coefficients must be finite")

    def raw_output(self, features) -> float:
        x = np.asarray(features, dtype=float)
        if x.shape != (N_FEATURES,):
            raise ValueError(f"expected {N_FEATURES} features, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise NotFinite("feature vector contains non-finite entries")
        z = (x - self.feature_mean) / self.feature_scale
        return float(self.intercept + z @ self.coef)

    def raw_coefficients(self):
        """Coefficients and intercept expressed on unscaled features."""
        w = self.coef / self.feature_scale
        return w, float(self.intercept - w @ self.feature_mean)

    def to_dict(self):
        return {
            "feature_names": list(self.feature_names),
            "coef": self.coef.tolist(),
            "intercept": self.intercept,
            "feature_mean": self.feature_mean.tolist(),
            "feature_scale": self.feature_scale.tolist(),
            "metadata": {
                "seed": self.seed,
                "n_samples": self.n_samples,
                "ridge_strength": self.ridge_strength,
            },
        }

    @classmethod
    def from_dict(cls, doc):
        meta = doc.get("metadata", {})
        return cls(
            coef=doc["coef"],
            intercept=float(doc["intercept"]),
            feature_mean=doc["feature_mean"],
            feature_scale=doc["feature_scale"],
            seed=int(meta.get("seed", 0)),
            n_samples=int(meta.get("n_samples", 0)),
            ridge_strength=float(meta.get("ridge_strength", DEFAULT_RIDGE)),
            feature_names=tuple(doc.get("feature_names", FEATURE_NAMES)),
        )

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def train_tci_model(dataset, ridge_strength=DEFAULT_RIDGE, seed=0) -> TciModel:
    """Fit a ridge regression of TCI labels on standardised features.

    ``dataset`` is a sequence of ``(features, label)`` pairs. The normal
    equations ``(Z'Z + lambda I) w = Z'(y - mean(y))`` are solved directly;
    the intercept is the label mean because the columns of Z are centred.
    The fit has no stochastic step, so ``seed`` is only recorded.
    """
    if ridge_strength < 0:
        raise ValueError("ridge_strength must be non-negative")
    if len(dataset) < MIN_TRAINING_ROWS:
        raise TooFewSamples(
            f"need at least {MIN_TRAINING_ROWS} rows, got {len(dataset)}"
        )
    X = np.array([np.asarray(f, dtype=float) for f, _ in dataset])
    y = np.array([float(label) for _, label in dataset])
    if X.shape[1] != N_FEATURES:
        raise ValueError(f"expected {N_FEATURES} features per row")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise NotFinite("training data contains non-finite values")

    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    # rounding noise in a constant column must not become a tiny scale
    flat = scale <= 1e-9 * np.maximum(1.0, np.abs(mean))
    if np.any(flat):
        if ridge_strength == 0:
            names = [FEATURE_NAMES[i] for i in np.flatnonzero(flat)]
            raise DegenerateDesign(f"zero-variance features with no ridge: {names}")
        scale = np.where(flat, 1.0, scale)

    Z = (X - mean) / scale
    Z[:, flat] = 0.0
    y_mean = float(y.mean())
    gram = Z.T @ Z + ridge_strength * np.eye(N_FEATURES)
    try:
        coef = np.linalg.solve(gram, Z.T @ (y - y_mean))
    except np.linalg.LinAlgError as exc:
        raise DegenerateDesign(f"singular normal equations: {exc}") from None
    if ridge_strength == 0 and np.linalg.cond(gram) > 1e12:
        raise DegenerateDesign("collinear features with no ridge")

    return TciModel(
        coef=coef,
        intercept=y_mean,
        feature_mean=mean,
        feature_scale=scale,
        seed=seed,
        n_samples=len(dataset),
        ridge_strength=ridge_strength,
    )


def ridge_objective(model: TciModel, dataset):
    """Penalised residual sum of squares that the fit minimises."""
    resid = [model.raw_output(f) - y for f, y in dataset]
    return float(np.sum(np.square(resid)) + model.ridge_strength * model.coef @ model.coef)


def predict_tci(model: TciModel, features) -> float:
    return clamp_tci(model.raw_output(features))


# -- dataset files ---------------------------------------------------------

def write_dataset_csv(path, rows):
    """Write per-sample labelled rows; each row is a mapping over DATASET_COLUMNS."""
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=DATASET_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in DATASET_COLUMNS})


def read_dataset_csv(path, window=DEFAULT_WINDOW):
    """Load a labelled CSV and turn it into ``(features, label)`` pairs.

    Samples are grouped per occupant into tumbling windows
    ``[k * window, (k + 1) * window)``; the label of a window is the mean of
    its per-sample labels.
    """
    buckets = defaultdict(list)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(DATASET_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"dataset is missing columns: {sorted(missing)}")
        for row in reader:
            t = float(row["timestamp"])
            buckets[(row["occupant_id"], math.floor(t / window))].append(row)

    dataset = []
    for (occupant, _), rows in sorted(buckets.items()):
        physio = [
            PhysioSample(occupant, float(r["timestamp"]), float(r["hr"]),
                         float(r["gsr"]), float(r["clo"]), float(r["met"])).validate()
            for r in rows
        ]
        env = [
            EnvSample(float(r["timestamp"]), float(r["air_temp"]), float(r["mrt"]),
                      float(r["rh"]), float(r["vel"])).validate()
            for r in rows
        ]
        # window end is inclusive in extract_features; shift past the bucket start
        last = max(s.timestamp for s in physio)
        first = min(s.timestamp for s in physio)
        features = extract_features(physio, env, window=last - first + 1.0, end=last)
        label = float(np.mean([float(r["tci_label"]) for r in rows]))
        dataset.append((features, label))
    return dataset
