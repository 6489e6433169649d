"""Readout training for the gating task.

Only ``W_out`` is learned. During training the conceptor is the identity and,
by default, the feedback path is driven by the target ``M`` (teacher
forcing), which makes the collected states independent of ``W_out``.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .esn import EsnModel, ReservoirError, run
from .tasks import TaskTrace

SETTLE_STEPS = 5


@dataclass(frozen=True)
class TrainConfig:
    n_train_steps: int = 25_000
    washout: int = 100
    ridge: float = 1e-4
    mode: str = "offline"
    teacher_forcing: bool = True

    def __post_init__(self):
        if self.washout >= self.n_train_steps:
            raise ValueError("washout must be smaller than n_train_steps")
        if self.ridge < 0:
            raise ValueError("ridge must be >= 0")
        if self.mode not in ("offline", "online"):
            raise ValueError(f"mode must be 'offline' or 'online', got {self.mode!r}")


@dataclass
class Metrics:
    rmse_hold: float
    rmse_trigger: float
    max_drift: float

    def csv_row(self, seed, variant: str) -> str:
        return f"{seed},{variant},{float(self.rmse_hold)!r},{float(self.rmse_trigger)!r},{float(self.max_drift)!r}\n"

    @staticmethod
    def csv_header() -> str:
        return "seed,variant,rmse_hold,rmse_trigger,max_drift\n"


def harvest_states(model: EsnModel, trace: TaskTrace, teacher_forcing: bool = True):
    """Drive the reservoir over ``trace`` with identity conceptor.

    Returns states as columns, shape ``(N, steps)``. With teacher forcing the
    feedback at step n is ``M[n-1]`` (the model's current ``y`` at n = 0) and
    the model ends in the last training state. Without it the current
    readout (zero if untrained) closes the loop.
    """
    p = model.params
    steps = len(trace)
    U = trace.inputs
    M = trace.M.reshape(-1, p.output_dim)
    X = np.empty((p.n_neurons, steps))
    x, y = model.x, model.y
    W_out = model.W_out if model.W_out is not None else np.zeros((p.output_dim, p.n_neurons))
    bound = np.sqrt(3.0) * p.noise_std
    for n in range(steps):
        if p.noise_std > 0:
            rec = model.W @ (x + model.rng.uniform(-bound, bound, p.n_neurons))
        else:
            rec = model.W @ x
        x = np.tanh(model.W_in @ U[n] + rec + model.W_fb @ y)
        X[:, n] = x
        y = M[n] if teacher_forcing else W_out @ x
    model.x = x
    model.y = y.copy()
    return X


def _training_data(model: EsnModel, trace: TaskTrace, cfg: TrainConfig):
    if len(trace) < cfg.n_train_steps:
        raise ValueError(f"trace has {len(trace)} steps, config needs {cfg.n_train_steps}")
    trace = trace.slice(0, cfg.n_train_steps)
    X = harvest_states(model, trace, cfg.teacher_forcing)
    Y = trace.M.reshape(1, -1)
    return X[:, cfg.washout:], Y[:, cfg.washout:]


def ridge_readout(X: np.ndarray, Y: np.ndarray, ridge: float) -> np.ndarray:
    """Solve ``W_out = Y X^T (X X^T + ridge I)^-1`` (states as columns)."""
    A = X @ X.T
    A[np.diag_indices_from(A)] += ridge
    return np.linalg.solve(A, X @ Y.T).T


def train_offline(model: EsnModel, trace: TaskTrace, cfg: TrainConfig = TrainConfig()) -> EsnModel:
    X, Y = _training_data(model, trace, cfg)
    model.W_out = ridge_readout(X, Y, cfg.ridge)
    model.y = model.W_out @ model.x
    return model


class RlsReadout:
    """Recursive least squares on the readout weights.

    ``P`` starts at ``I / ridge`` so that after every update the weights are
    the ridge solution over all samples seen so far.
    """

    def __init__(self, n_features: int, n_outputs: int = 1, ridge: float = 1e-4):
        if ridge <= 0:
            raise ValueError("online training needs ridge > 0 to initialise P")
        self.P = np.eye(n_features) / ridge
        self.W = np.zeros((n_outputs, n_features))

    def update(self, x: np.ndarray, target: np.ndarray):
        Px = self.P @ x
        k = Px / (1.0 + x @ Px)
        err = target - self.W @ x
        self.W += np.outer(err, k)
        self.P -= np.outer(k, Px)
        self.P = 0.5 * (self.P + self.P.T)
        return err


def train_online(model: EsnModel, trace: TaskTrace, cfg: TrainConfig = TrainConfig(mode="online"),
                 epochs: int = 1) -> EsnModel:
    X, Y = _training_data(model, trace, cfg)
    rls = RlsReadout(model.n_neurons, model.params.output_dim, cfg.ridge)
    for _ in range(epochs):
        for n in range(X.shape[1]):
            rls.update(X[:, n], Y[:, n])
    model.W_out = rls.W
    model.y = model.W_out @ model.x
    return model


def train(model: EsnModel, trace: TaskTrace, cfg: TrainConfig = TrainConfig()) -> EsnModel:
    if cfg.mode == "online":
        return train_online(model, trace, cfg)
    return train_offline(model, trace, cfg)


def hold_mask(T: np.ndarray, settle: int = SETTLE_STEPS) -> np.ndarray:
    """Non-trigger steps at least ``settle + 1`` steps after the last trigger."""
    mask = np.zeros(T.shape[0], dtype=bool)
    last = None
    for n in range(T.shape[0]):
        if T[n] > 0.5:
            last = n
        elif last is not None and n - last > settle:
            mask[n] = True
    return mask


def score(outputs, trace: TaskTrace, settle: int = SETTLE_STEPS) -> Metrics:
    """Metrics for a given output sequence against the trace targets."""
    y = np.asarray(outputs, dtype=np.float64).reshape(-1)
    err = y - trace.M
    hold = hold_mask(trace.T, settle)
    trig = trace.T > 0.5

    def rms(e):
        return float(np.sqrt(np.mean(e ** 2))) if e.size else 0.0

    return Metrics(
        rmse_hold=rms(err[hold]),
        rmse_trigger=rms(err[trig]),
        max_drift=float(np.max(np.abs(err[hold]))) if hold.any() else 0.0,
    )


def evaluate(model: EsnModel, trace: TaskTrace, settle: int = SETTLE_STEPS) -> Metrics:
    """Closed-loop run over ``trace`` (identity conceptor) and score it."""
    if not model.trained:
        raise ReservoirError("cannot evaluate an untrained model")
    traj = run(model, trace.inputs)
    return score(traj.outputs[:, 0], trace, settle)


def metrics_csv(rows) -> str:
    """CSV text for ``(seed, variant, Metrics)`` tuples."""
    buf = io.StringIO()
    buf.write(Metrics.csv_header())
    for seed, variant, m in rows:
        buf.write(m.csv_row(seed, variant))
    return buf.getvalue()
