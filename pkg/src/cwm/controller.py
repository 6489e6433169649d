"""Transfer between short-term (readout) and long-term (conceptor) memory.

After every trigger the controller lets the network run freely for
``collect_len`` steps, builds a conceptor from those states and then keeps
applying it (or the closest stored conceptor) until the next trigger.
"""
from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .conceptors import Conceptor, conceptor_from_states, distance
from .esn import EsnModel, ReservoirError, run, run_batch, step
from .tasks import TaskTrace, level_grid, single_hold_trace

logger = logging.getLogger(__name__)

MODES = ("store_raw", "snap_to_bank", "none")
_MODE_ALIASES = {"raw": "store_raw", "snap": "snap_to_bank", "none": "none"}


@dataclass
class ConceptorBank:
    entries: List[Tuple[float, Conceptor]]
    n_levels: int = 11
    aperture: float = 10.0

    def __post_init__(self):
        values = [m for m, _ in self.entries]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("bank values must be strictly increasing")
        dims = {C.matrix.shape for _, C in self.entries}
        if len(dims) > 1:
            raise ValueError(f"bank conceptors have mixed shapes {dims}")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def values(self) -> np.ndarray:
        return np.array([m for m, _ in self.entries])

    @property
    def conceptors(self) -> List[Conceptor]:
        return [C for _, C in self.entries]

    def get(self, m: float, tol: float = 1e-9) -> Conceptor:
        for value, C in self.entries:
            if abs(value - m) <= tol:
                return C
        raise KeyError(f"no conceptor stored for value {m}")


@dataclass(frozen=True)
class ControllerPolicy:
    collect_len: int = 100
    mode: str = "snap_to_bank"
    release_on_trigger: bool = True
    aperture: float = 10.0

    def __post_init__(self):
        mode = _MODE_ALIASES.get(self.mode, self.mode)
        if mode not in MODES:
            raise ValueError(f"unknown controller mode {self.mode!r}")
        object.__setattr__(self, "mode", mode)
        if self.collect_len < 1:
            raise ValueError("collect_len must be >= 1")


@dataclass
class SessionTrace:
    V: np.ndarray
    T: np.ndarray
    y: np.ndarray
    phase: List[str]
    conceptor_id: List[Optional[str]]
    conceptor_tag: np.ndarray  # NaN where no tag
    events: List[tuple] = field(default_factory=list)

    def __len__(self):
        return self.y.shape[0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("step,V,T,y,phase,conceptor_tag\n")
        for n in range(len(self)):
            tag = self.conceptor_tag[n]
            tag_s = "" if np.isnan(tag) else repr(float(tag))
            buf.write(f"{n},{float(self.V[n])!r},{int(self.T[n])},{float(self.y[n])!r},{self.phase[n]},{tag_s}\n")
        return buf.getvalue()


def _require_trained(model: EsnModel):
    if not model.trained:
        raise ReservoirError("model has no readout; train it first")


def collect_conceptor(model: EsnModel, m: float, aperture: float = 10.0, collect_len: int = 100,
                      rng=None, normalize_r: bool = False) -> Conceptor:
    """Conceptor for value ``m`` from a fresh hold episode on a copy of ``model``."""
    work = model.copy()
    trace = single_hold_trace(m, collect_len, rng)
    traj = run(work, trace.inputs)
    return conceptor_from_states(traj.states.T, aperture, tag=float(m), normalize_r=normalize_r)


def build_bank(model: EsnModel, values: Optional[Sequence[float]] = None, aperture: float = 10.0,
               collect_len: int = 100, seed: int = 0, normalize_r: bool = False) -> ConceptorBank:
    """One conceptor per value, each collected from the model's current state.

    The model itself is left untouched; call this right after training so the
    current state is the last training state.
    """
    _require_trained(model)
    values = level_grid(11) if values is None else np.asarray(values, dtype=np.float64)
    rng = np.random.default_rng(seed)
    entries = [
        (float(m), collect_conceptor(model, float(m), aperture, collect_len, rng, normalize_r))
        for m in values
    ]
    return ConceptorBank(entries, n_levels=len(values), aperture=aperture)


def nearest_in_bank(bank: ConceptorBank, C) -> Tuple[float, Conceptor]:
    """Closest stored conceptor in Frobenius distance; ties go to the smaller value."""
    if len(bank) == 0:
        raise ValueError("bank is empty")
    best = None
    for m, Cm in bank:
        d = distance(Cm, C)
        if best is None or d < best[0]:
            best = (d, m, Cm)
    return best[1], best[2]


def run_gated_session(model: EsnModel, trace: TaskTrace, policy: ControllerPolicy = ControllerPolicy(),
                      bank: Optional[ConceptorBank] = None) -> SessionTrace:
    """Drive ``model`` over ``trace`` under the collect-then-apply policy."""
    _require_trained(model)
    if policy.mode == "snap_to_bank" and (bank is None or len(bank) == 0):
        raise ValueError("snap_to_bank needs a non-empty bank")

    steps = len(trace)
    U = trace.inputs
    ys = np.empty(steps)
    phases: List[str] = []
    ids: List[Optional[str]] = []
    tags = np.full(steps, np.nan)
    events = []

    active: Optional[Conceptor] = None
    active_id: Optional[str] = None
    phase = "idle"
    collected: List[np.ndarray] = []

    for n in range(steps):
        if trace.T[n] > 0.5:
            if phase == "collecting":
                logger.info("trigger at step %d interrupts collection; restarting", n)
                events.append((n, "restart", None))
            phase = "collecting"
            collected = []
            if policy.release_on_trigger:
                active, active_id = None, None

        x, y = step(model, U[n], active)
        ys[n] = y[0]
        phases.append(phase)
        ids.append(active_id)
        if active is not None and active.tag is not None:
            tags[n] = active.tag

        if phase == "collecting":
            collected.append(x.copy())
            if len(collected) == policy.collect_len:
                if policy.mode == "none":
                    phase = "idle"
                else:
                    current = conceptor_from_states(np.column_stack(collected), policy.aperture)
                    if policy.mode == "snap_to_bank":
                        m, active = nearest_in_bank(bank, current)
                        active_id = f"bank:{m!r}"
                    else:
                        active, active_id = current, f"raw:{n}"
                    events.append((n, "apply", active.tag))
                    phase = "applying"
                collected = []

    return SessionTrace(trace.V.copy(), trace.T.copy(), ys, phases, ids, tags, events)


def _same(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=0.0, abs_tol=1e-12)


def _sign(v: float) -> float:
    return 1.0 if v >= 0 else -1.0


def predict_relaxation(c1: float, c2: float, v: float) -> float:
    """Value the output settles to under ``C_c1 or C_c2`` after presenting ``v``."""
    if _same(c1, c2):
        return c1
    if min(abs(c1), abs(c2)) < abs(v) or _same(c1, -c2):
        return _sign(v) * max(abs(c1), abs(c2))
    return 0.0


def predict_relaxation_n(cs: Sequence[float], v: float) -> float:
    """n-ary version of :func:`predict_relaxation`."""
    cs = [float(c) for c in cs]
    if not cs:
        raise ValueError("need at least one value")
    if all(_same(c, cs[0]) for c in cs):
        return cs[0]
    mags = [abs(c) for c in cs]
    equal_mags = all(_same(a, mags[0]) for a in mags)
    sign_flip = any(_same(ci, -cj) and not _same(ci, 0.0) for i, ci in enumerate(cs) for cj in cs[:i])
    if min(mags) < abs(v) or (equal_mags and sign_flip):
        return _sign(v) * max(mags)
    return 0.0


def measure_relaxation(session, window: int = 1000) -> float:
    """Mean output over the last ``window`` steps of a session (or output array)."""
    y = np.asarray(getattr(session, "y", session), dtype=np.float64).reshape(-1)
    if y.shape[0] < window:
        raise ValueError(f"session has {y.shape[0]} steps, fewer than the window {window}")
    return float(np.mean(y[-window:]))


def relaxation_outputs(model: EsnModel, conceptor, values: Sequence[float], n_steps: int,
                       rng=None) -> np.ndarray:
    """Present each value with a trigger, then apply ``conceptor`` for ``n_steps``.

    The trigger step runs without a conceptor, as under the controller's
    release-on-trigger rule; distractor values follow on every later step.
    All values run as one batch from the model's current state. Returns the
    post-trigger outputs, shape ``(n_steps, len(values))``.
    """
    _require_trained(model)
    rng = np.random.default_rng(rng)
    values = np.asarray(values, dtype=np.float64)
    B = values.shape[0]
    trig = np.zeros((1, B, 2))
    trig[0, :, 0] = values
    trig[0, :, 1] = 1.0
    _, x, y = run_batch(model, trig)
    rest = np.zeros((n_steps, B, 2))
    rest[:, :, 0] = rng.uniform(-1.0, 1.0, (n_steps, B))
    out, _, _ = run_batch(model, rest, conceptor, x0=x, y0=y)
    return out[:, :, 0]
