"""Epicenter-retrieval harness: trace features, three regressors, MSE.

The regressors are the dependency-free members of the usual lineup: a
constant baseline (training-mean predictor), ridge regression on
mean-centered data, and k-nearest-neighbors on standardized inputs.
They are enough to show the qualitative result that non-trivial models
recover epicenter information that the constant baseline cannot.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

FEATURES_PER_TRACE = 8
AUTOCORR_LAGS = (1, 5, 10)
PEAK_THRESHOLD_FRACTION = 0.1
STD_FLOOR = 1e-12


def trace_features(samples: np.ndarray, rate: float) -> list[float]:
    """Eight per-trace features.

    absolute energy (sum x^2), maximum absolute value, mean, least-squares
    slope versus time, biased autocorrelation at lags 1/5/10 samples
    (defined as 0 for constant or too-short traces), and the count of
    strict local maxima above 10% of the trace maximum.
    """
    x = np.asarray(samples, dtype=np.float64)
    n = len(x)
    energy = float(np.sum(x * x))
    max_abs = float(np.max(np.abs(x))) if n else 0.0
    mean = float(np.mean(x)) if n else 0.0

    if n >= 2:
        t = np.arange(n) / rate
        tc = t - t.mean()
        denom = float(np.sum(tc * tc))
        slope = float(np.sum(tc * (x - mean)) / denom) if denom > 0.0 else 0.0
    else:
        slope = 0.0

    xc = x - mean
    var = float(np.sum(xc * xc))
    autocorrs = []
    for lag in AUTOCORR_LAGS:
        if var <= 0.0 or lag >= n:
            autocorrs.append(0.0)
        else:
            autocorrs.append(float(np.sum(xc[:-lag] * xc[lag:]) / var))

    peaks = 0
    if n >= 3 and max_abs > 0.0:
        threshold = PEAK_THRESHOLD_FRACTION * max_abs
        inner = x[1:-1]
        peaks = int(
            np.sum((inner > x[:-2]) & (inner > x[2:]) & (inner > threshold))
        )
    return [energy, max_abs, mean, slope, *autocorrs, peaks]


def features(record) -> np.ndarray:
    """Concatenated per-trace features over a record's interrogators."""
    if not record.seismograms:
        raise ConfigurationError("record has no seismograms")
    out: list[float] = []
    for s in record.seismograms:
        out.extend(trace_features(s.samples, s.rate))
    return np.array(out, dtype=np.float64)


def raw_vector(record) -> np.ndarray:
    """All traces flattened into one input vector (raw-seismogram mode)."""
    return np.concatenate([np.asarray(s.samples) for s in record.seismograms])


def design_matrix(records, input_mode: str) -> tuple[np.ndarray, np.ndarray]:
    """Stack inputs (raw or features) and epicenter targets for records."""
    if input_mode not in ("raw", "features"):
        raise ConfigurationError(f"input_mode must be raw|features, got {input_mode!r}")
    rows, targets = [], []
    for record in records:
        rows.append(
            raw_vector(record) if input_mode == "raw" else features(record)
        )
        targets.append(record.epicenter)
    if not rows:
        raise ConfigurationError("no records supplied")
    return np.stack(rows), np.asarray(targets, dtype=np.float64)


@dataclass
class Regressor:
    """A fitted predictor; ``kind`` is one of baseline / ridge / knn."""

    kind: str
    mean_y: np.ndarray | None = None
    weights: np.ndarray | None = None
    intercept: np.ndarray | None = None
    mean_x: np.ndarray | None = None
    std_x: np.ndarray | None = None
    train_x: np.ndarray | None = None
    train_y: np.ndarray | None = None
    k: int = 5
    lam: float = 0.0
    pseudo_inverse_fallback: bool = False
    n_features: int = 0


def fit(kind: str, X, Y, k: int = 5, lam: float = 1.0) -> Regressor:
    """Fit a regressor of the given kind to inputs X and targets Y."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.ndim != 2 or Y.ndim != 2:
        raise ConfigurationError("X and Y must be 2-D (rows are records)")
    if len(X) != len(Y) or len(X) < 1:
        raise ConfigurationError(
            f"need equal, non-zero row counts, got X:{len(X)} Y:{len(Y)}"
        )
    if kind == "baseline":
        return Regressor(kind=kind, mean_y=Y.mean(axis=0), n_features=X.shape[1])
    if kind == "ridge":
        if lam < 0.0:
            raise ConfigurationError(f"ridge lambda must be >= 0, got {lam}")
        mean_x = X.mean(axis=0)
        mean_y = Y.mean(axis=0)
        Xc = X - mean_x
        Yc = Y - mean_y
        gram = Xc.T @ Xc + lam * np.eye(X.shape[1])
        fallback = False
        try:
            L = np.linalg.cholesky(gram)
            w = np.linalg.solve(L.T, np.linalg.solve(L, Xc.T @ Yc))
        except np.linalg.LinAlgError:
            w = np.linalg.pinv(Xc) @ Yc
            fallback = True
        return Regressor(
            kind=kind, weights=w, intercept=mean_y, mean_x=mean_x,
            lam=lam, pseudo_inverse_fallback=fallback, n_features=X.shape[1],
        )
    if kind == "knn":
        if k < 1:
            raise ConfigurationError(f"knn k must be >= 1, got {k}")
        mean_x = X.mean(axis=0)
        std_x = np.maximum(X.std(axis=0), STD_FLOOR)
        return Regressor(
            kind=kind, mean_x=mean_x, std_x=std_x,
            train_x=(X - mean_x) / std_x, train_y=Y.copy(), k=k,
            n_features=X.shape[1],
        )
    raise ConfigurationError(f"unknown regressor kind {kind!r}")


def predict(model: Regressor, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ConfigurationError(
            f"X must be 2-D with {model.n_features} columns, got shape {X.shape}"
        )
    if model.kind == "baseline":
        return np.tile(model.mean_y, (len(X), 1))
    if model.kind == "ridge":
        return (X - model.mean_x) @ model.weights + model.intercept
    # knn: Euclidean distances on standardized columns; ties break toward
    # the lower training index via the stable argsort.
    Q = (X - model.mean_x) / model.std_x
    k = min(model.k, len(model.train_x))
    out = np.empty((len(Q), model.train_y.shape[1]))
    for i, q in enumerate(Q):
        d2 = np.sum((model.train_x - q) ** 2, axis=1)
        nearest = np.argsort(d2, kind="stable")[:k]
        out[i] = model.train_y[nearest].mean(axis=0)
    return out


@dataclass
class EvalReport:
    """Per-coordinate MSE, their mean, and per-record residuals."""

    per_coordinate_mse: list[float]
    total_mse: float
    residuals: np.ndarray
    model: str = ""
    input_mode: str = ""
    flags: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        doc = {
            "model": self.model,
            "input_mode": self.input_mode,
            "per_coordinate_mse": self.per_coordinate_mse,
            "total_mse": self.total_mse,
            "n_records": int(len(self.residuals)),
            "flags": self.flags,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def write_residuals_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            ndim = self.residuals.shape[1]
            writer.writerow(
                ["record"] + [f"residual_{ax}" for ax in "xyz"[:ndim]]
            )
            for i, row in enumerate(self.residuals):
                writer.writerow([i] + [f"{v:.17g}" for v in row])


def evaluate(model: Regressor, records, input_mode: str = "features") -> EvalReport:
    """MSE of a fitted model over test records."""
    X, Y = design_matrix(records, input_mode)
    Y_hat = predict(model, X)
    residuals = Y_hat - Y
    per_coord = np.mean(residuals * residuals, axis=0)
    flags = []
    if model.kind == "ridge" and model.pseudo_inverse_fallback:
        flags.append("ridge-pseudo-inverse-fallback")
    return EvalReport(
        per_coordinate_mse=[float(v) for v in per_coord],
        total_mse=float(np.mean(per_coord)),
        residuals=residuals,
        model=model.kind,
        input_mode=input_mode,
        flags=flags,
    )
