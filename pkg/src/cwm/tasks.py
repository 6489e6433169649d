"""Gating-task episodes and their discretized variants.

The network sees a value stream ``V`` and a binary trigger ``T``; the target
``M`` latches ``V`` whenever ``T == 1`` and holds it otherwise. In the C2D
variant only the latched target is snapped to the level grid; in D2D the
value presented at trigger steps is snapped as well.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

VARIANTS = ("original", "c2d", "d2d")


@dataclass(frozen=True)
class TaskSpec:
    n_steps: int
    trigger_prob: float = 0.01
    min_gap: int = 1
    variant: str = "original"
    n_levels: int = 11
    seed: int = 0

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if not 0.0 <= self.trigger_prob <= 1.0:
            raise ValueError("trigger_prob must lie in [0, 1]")
        if self.n_levels < 2:
            raise ValueError("n_levels must be >= 2")
        if self.min_gap < 1:
            raise ValueError("min_gap must be >= 1")
        object.__setattr__(self, "variant", normalize_variant(self.variant))


def normalize_variant(variant: str) -> str:
    v = variant.lower()
    if v not in VARIANTS:
        raise ValueError(f"unknown task variant {variant!r}; expected one of {VARIANTS}")
    return v


@dataclass
class TaskTrace:
    V: np.ndarray
    T: np.ndarray
    M: np.ndarray

    def __post_init__(self):
        self.V = np.asarray(self.V, dtype=np.float64)
        self.T = np.asarray(self.T, dtype=np.float64)
        self.M = np.asarray(self.M, dtype=np.float64)
        if not (self.V.shape == self.T.shape == self.M.shape) or self.V.ndim != 1:
            raise ValueError("V, T and M must be 1-D sequences of equal length")

    def __len__(self):
        return self.V.shape[0]

    @property
    def inputs(self) -> np.ndarray:
        """Network input sequence, shape ``(steps, 2)`` with columns (V, T)."""
        return np.column_stack([self.V, self.T])

    @property
    def trigger_steps(self) -> np.ndarray:
        return np.flatnonzero(self.T > 0.5)

    def __add__(self, other: "TaskTrace") -> "TaskTrace":
        return TaskTrace(
            np.concatenate([self.V, other.V]),
            np.concatenate([self.T, other.T]),
            np.concatenate([self.M, other.M]),
        )

    def slice(self, start: int, stop: Optional[int] = None) -> "TaskTrace":
        return TaskTrace(self.V[start:stop], self.T[start:stop], self.M[start:stop])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("step,V,T,M\n")
        for n, (v, t, m) in enumerate(zip(self.V, self.T, self.M)):
            buf.write(f"{n},{float(v)!r},{int(t)},{float(m)!r}\n")
        return buf.getvalue()


def level_grid(n_levels: int = 11) -> np.ndarray:
    """The ``n_levels`` evenly spaced values on [-1, 1].

    Each level is formed as ``(2k - (n-1)) / (n-1)`` so that it is the
    correctly rounded value of the exact fraction (0.4 is exactly ``0.4``).
    """
    d = n_levels - 1
    return np.array([(2 * k - d) / d for k in range(n_levels)])


def discretize(v: float, n_levels: int = 11) -> float:
    """Nearest point of the level grid; exact midpoints go to the upper level."""
    d = n_levels - 1
    k = math.floor((v + 1.0) * d / 2.0 + 0.5)
    k = min(max(k, 0), d)
    return (2 * k - d) / d


def _targets(V: np.ndarray, T: np.ndarray, variant: str, n_levels: int) -> np.ndarray:
    M = np.empty_like(V)
    held = 0.0
    for n in range(V.shape[0]):
        if T[n] > 0.5:
            held = discretize(V[n], n_levels) if variant != "original" else V[n]
        M[n] = held
    return M


def make_trace(V, T, variant: str = "original", n_levels: int = 11) -> TaskTrace:
    """Build a trace from explicit ``V``/``T`` sequences, applying the variant."""
    variant = normalize_variant(variant)
    V = np.array(V, dtype=np.float64)
    T = np.asarray(T, dtype=np.float64)
    if variant == "d2d":
        for n in np.flatnonzero(T > 0.5):
            V[n] = discretize(V[n], n_levels)
    return TaskTrace(V, T, _targets(V, T, variant, n_levels))


def generate_trace(spec: TaskSpec) -> TaskTrace:
    rng = np.random.default_rng(spec.seed)
    V = rng.uniform(-1.0, 1.0, spec.n_steps)
    draws = rng.random(spec.n_steps)
    T = np.zeros(spec.n_steps)
    T[0] = 1.0
    last = 0
    for n in range(1, spec.n_steps):
        if draws[n] < spec.trigger_prob and n - last >= spec.min_gap:
            T[n] = 1.0
            last = n
    return make_trace(V, T, spec.variant, spec.n_levels)


def single_hold_trace(m: float, n_steps: int, rng=None) -> TaskTrace:
    """One trigger presenting ``m`` at step 0, then ``n_steps - 1`` distractor values."""
    if not -1.0 <= m <= 1.0:
        raise ValueError(f"held value must lie in [-1, 1], got {m}")
    rng = np.random.default_rng(rng)
    V = rng.uniform(-1.0, 1.0, n_steps)
    V[0] = m
    T = np.zeros(n_steps)
    T[0] = 1.0
    return TaskTrace(V, T, np.full(n_steps, float(m)))


def hold_sequence(values, segment_len: int, rng=None, variant: str = "original",
                  n_levels: int = 11) -> TaskTrace:
    """Concatenate one held segment of ``segment_len`` steps per value."""
    rng = np.random.default_rng(rng)
    trace = None
    for m in values:
        seg = single_hold_trace(float(m), segment_len, rng)
        seg = make_trace(seg.V, seg.T, variant, n_levels)
        trace = seg if trace is None else trace + seg
    return trace
