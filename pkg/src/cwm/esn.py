"""Echo state network with output feedback and optional conceptor gating.

State update (no bias term)::

    x[n] = C tanh(W_in u[n] + W (x[n-1] + xi) + W_fb y[n-1])
    y[n] = W_out x[n]

``C`` defaults to the identity. ``xi`` is uniform white noise on
``[-sqrt(3) s, sqrt(3) s]`` so that its standard deviation is exactly ``s``.

Random streams
--------------
Every model owns two numpy ``PCG64`` generators derived from
``SeedSequence(seed).spawn(2)``: the first draws the weights (W, sparsity
mask, W_in, W_fb in that order), the second draws the reservoir noise. The
noise generator's state is part of the model and is serialized with it.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

SQRT3 = np.sqrt(3.0)


class ReservoirError(ValueError):
    """Raised when a reservoir cannot be built or stepped as requested."""


@dataclass(frozen=True)
class EsnParams:
    n_neurons: int = 1000
    sparsity: float = 0.5
    spectral_radius: float = 0.1
    noise_std: float = 0.0
    input_dim: int = 2
    output_dim: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.n_neurons < 1:
            raise ValueError(f"n_neurons must be >= 1, got {self.n_neurons}")
        if not 0.0 <= self.sparsity <= 1.0:
            raise ValueError(f"sparsity must lie in [0, 1], got {self.sparsity}")
        if not self.spectral_radius > 0:
            raise ValueError(f"spectral_radius must be > 0, got {self.spectral_radius}")
        if self.noise_std < 0:
            raise ValueError(f"noise_std must be >= 0, got {self.noise_std}")
        if self.input_dim < 1 or self.output_dim < 1:
            raise ValueError("input_dim and output_dim must be >= 1")

    def to_dict(self) -> dict:
        return {
            "n_neurons": int(self.n_neurons),
            "sparsity": float(self.sparsity),
            "spectral_radius": float(self.spectral_radius),
            "noise_std": float(self.noise_std),
            "input_dim": int(self.input_dim),
            "output_dim": int(self.output_dim),
            "seed": int(self.seed),
        }


@dataclass
class EsnModel:
    """Reservoir weights plus the mutable network state.

    A model is single-writer: ``step``/``run`` update ``x``, ``y`` and the
    noise generator in place.
    """

    W: np.ndarray
    W_in: np.ndarray
    W_fb: np.ndarray
    params: EsnParams
    W_out: Optional[np.ndarray] = None
    x: np.ndarray = None
    y: np.ndarray = None
    rng: np.random.Generator = field(default=None, repr=False)

    def __post_init__(self):
        n = self.params.n_neurons
        if self.x is None:
            self.x = np.zeros(n)
        if self.y is None:
            self.y = np.zeros(self.params.output_dim)
        if self.rng is None:
            self.rng = _noise_generator(self.params.seed)

    @property
    def n_neurons(self) -> int:
        return self.params.n_neurons

    @property
    def trained(self) -> bool:
        return self.W_out is not None

    @property
    def rng_state(self) -> dict:
        return self.rng.bit_generator.state

    @rng_state.setter
    def rng_state(self, state: dict):
        self.rng.bit_generator.state = state

    def copy(self) -> "EsnModel":
        """Deep copy, including the noise generator state."""
        clone = EsnModel(
            W=self.W.copy(),
            W_in=self.W_in.copy(),
            W_fb=self.W_fb.copy(),
            params=self.params,
            W_out=None if self.W_out is None else self.W_out.copy(),
            x=self.x.copy(),
            y=self.y.copy(),
        )
        clone.rng_state = self.rng_state
        return clone

    def set_state(self, x: np.ndarray, y: np.ndarray):
        self.x = np.array(x, dtype=np.float64, copy=True)
        self.y = np.array(y, dtype=np.float64, copy=True).reshape(self.params.output_dim)


@dataclass
class StateTrajectory:
    states: np.ndarray  # (steps, N)
    outputs: np.ndarray  # (steps, output_dim)

    def __len__(self):
        return self.states.shape[0]


def _noise_generator(seed: int) -> np.random.Generator:
    _, noise_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(noise_seq))


def _weight_generator(seed: int) -> np.random.Generator:
    weight_seq, _ = np.random.SeedSequence(seed).spawn(2)
    return np.random.Generator(np.random.PCG64(weight_seq))


def spectral_radius(M: np.ndarray, tol: float = 1e-8, max_iter: int = 10_000) -> float:
    """Largest absolute eigenvalue of a square matrix.

    Power iteration is tried first; it only converges when the dominant
    eigenvalue is real and isolated, so a complex dominant pair (common for
    random non-symmetric matrices) falls through to a dense eigensolver.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    v = np.ones(n) / np.sqrt(n)
    lam = 0.0
    for _ in range(max_iter):
        w = M @ v
        lam = np.linalg.norm(w)
        if lam == 0.0:
            break
        # residual for eigenvalue +lam or -lam
        res = min(np.linalg.norm(w - lam * v), np.linalg.norm(w + lam * v))
        if res <= tol * lam:
            return float(lam)
        v = w / lam
    logger.debug("power iteration did not converge; using dense eigensolver")
    return float(np.max(np.abs(np.linalg.eigvals(M)))) if n else 0.0


def init_reservoir(params: EsnParams) -> EsnModel:
    """Sample W, W_in, W_fb uniformly on [-1, 1]; sparsify and rescale W."""
    rng = _weight_generator(params.seed)
    n = params.n_neurons
    W = rng.uniform(-1.0, 1.0, (n, n))
    W[rng.random((n, n)) < params.sparsity] = 0.0
    W_in = rng.uniform(-1.0, 1.0, (n, params.input_dim))
    W_fb = rng.uniform(-1.0, 1.0, (n, params.output_dim))

    rho = spectral_radius(W)
    if not np.isfinite(rho) or rho <= 0.0:
        raise ReservoirError(
            f"cannot rescale recurrent matrix with spectral radius {rho} "
            f"(sparsity={params.sparsity})"
        )
    W *= params.spectral_radius / rho
    return EsnModel(W=W, W_in=W_in, W_fb=W_fb, params=params)


def _conceptor_matrix(conceptor, n: int) -> Optional[np.ndarray]:
    if conceptor is None:
        return None
    C = getattr(conceptor, "matrix", conceptor)
    C = np.asarray(C)
    if C.shape != (n, n):
        raise ReservoirError(f"conceptor shape {C.shape} does not match reservoir size {n}")
    return C


def _draw_noise(model: EsnModel, size) -> np.ndarray:
    bound = SQRT3 * model.params.noise_std
    return model.rng.uniform(-bound, bound, size)


def step(model: EsnModel, u, conceptor=None):
    """Advance the network by one step, returning ``(state, output)``.

    ``conceptor`` may be a :class:`cwm.conceptors.Conceptor`, a raw N x N
    array, or ``None`` for the identity.
    """
    if model.W_out is None:
        raise ReservoirError("model has no readout; train it first")
    n = model.n_neurons
    C = _conceptor_matrix(conceptor, n)
    u = np.asarray(u, dtype=np.float64).reshape(model.params.input_dim)

    if model.params.noise_std > 0:
        recurrent = model.W @ (model.x + _draw_noise(model, n))
    else:
        recurrent = model.W @ model.x
    z = np.tanh(model.W_in @ u + recurrent + model.W_fb @ model.y)
    model.x = z if C is None else C @ z
    model.y = model.W_out @ model.x
    return model.x, model.y


def run(model: EsnModel, inputs, conceptor_schedule: Optional[Sequence] = None) -> StateTrajectory:
    """Fold :func:`step` over ``inputs`` (shape ``(steps, input_dim)``)."""
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim == 1:
        inputs = inputs.reshape(-1, model.params.input_dim)
    steps = inputs.shape[0]
    if steps == 0:
        raise ValueError("inputs must be non-empty")
    if conceptor_schedule is not None and len(conceptor_schedule) == 0:
        conceptor_schedule = None
    if conceptor_schedule is not None and len(conceptor_schedule) != steps:
        raise ValueError(
            f"schedule length {len(conceptor_schedule)} != input length {steps}"
        )

    states = np.empty((steps, model.n_neurons))
    outputs = np.empty((steps, model.params.output_dim))
    for n in range(steps):
        C = None if conceptor_schedule is None else conceptor_schedule[n]
        states[n], outputs[n] = step(model, inputs[n], C)
    return StateTrajectory(states, outputs)


def run_batch(model: EsnModel, inputs, conceptor=None, x0=None, y0=None):
    """Run ``B`` independent copies of the network in lockstep.

    ``inputs`` has shape ``(steps, B, input_dim)``; one conceptor (or none)
    is shared by the batch. Starts from ``x0``/``y0`` (broadcast from the
    model's state when omitted) and does not modify the model except for
    consuming noise draws. Returns ``(outputs, x_final, y_final)`` with
    outputs of shape ``(steps, B, output_dim)``.

    With a conceptor the update is evaluated on ``z = tanh(...)`` and the
    products ``W C`` and ``W_out C`` are formed once, so each step costs one
    N x N product instead of two. Results agree with :func:`run` to rounding.
    """
    if model.W_out is None:
        raise ReservoirError("model has no readout; train it first")
    inputs = np.asarray(inputs, dtype=np.float64)
    steps, batch, _ = inputs.shape
    n = model.n_neurons
    C = _conceptor_matrix(conceptor, n)

    x = np.broadcast_to(model.x if x0 is None else x0, (batch, n)).astype(np.float64)
    y = np.broadcast_to(model.y if y0 is None else y0, (batch, model.params.output_dim))
    y = y.astype(np.float64)

    noisy = model.params.noise_std > 0
    Wt = model.W.T
    W_in_t = model.W_in.T
    W_fb_t = model.W_fb.T
    outputs = np.empty((steps, batch, model.params.output_dim))

    if C is None:
        W_out_t = model.W_out.T
        for k in range(steps):
            pre = inputs[k] @ W_in_t + x @ Wt + y @ W_fb_t
            if noisy:
                pre += _draw_noise(model, (batch, n)) @ Wt
            x = np.tanh(pre)
            y = x @ W_out_t
            outputs[k] = y
        return outputs, x, y

    # x = C z; carry z and fold C into the linear maps
    WC_t = (model.W @ C).T
    WoutC_t = (model.W_out @ C).T
    z = None
    for k in range(steps):
        rec = x @ Wt if z is None else z @ WC_t
        pre = inputs[k] @ W_in_t + rec + y @ W_fb_t
        if noisy:
            pre += _draw_noise(model, (batch, n)) @ Wt
        z = np.tanh(pre)
        y = z @ WoutC_t
        outputs[k] = y
    x = z @ C.T
    return outputs, x, y
