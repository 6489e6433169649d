"""Discretizing held values by training (C2D, D2D) or by conceptor snapping."""
from __future__ import annotations

import numpy as np

from ..controller import ControllerPolicy, run_gated_session
from ..esn import run_batch
from ..tasks import discretize, hold_sequence
from .common import TEST, ExperimentResult, bank_for, derive_seed, settle_time, trained_model
from .config import ExperimentConfig
from .svg import line_plot
from .table import Table

SETTLE_TOL = 0.02
PANELS = {"A": "d2d_offline", "B": "c2d_offline", "C": "c2d_online", "D": "conceptor_snap"}


def _closed_loop(model, trace) -> np.ndarray:
    out, _, _ = run_batch(model, trace.inputs[:, None, :])
    return out[:, 0, 0]


def exp_discretization(cfg: ExperimentConfig, seed: int) -> ExperimentResult:
    res = ExperimentResult("discretization", seed, cfg.config_hash)
    seg = cfg.resolved_horizon
    rng = np.random.default_rng(derive_seed(seed, TEST))
    n_triggers = int(cfg.option("n_triggers", 10))
    values = [float(v) for v in cfg.option("values", rng.uniform(-0.95, 0.95, n_triggers))]
    trace = hold_sequence(values, seg, rng=derive_seed(seed, TEST, 1))
    targets = [discretize(v, cfg.n_levels) for v in values]
    tail = min(100, max(1, seg // 2))

    outputs = {}
    outputs["A"] = _closed_loop(trained_model(cfg, seed, "d2d"), trace)
    outputs["B"] = _closed_loop(trained_model(cfg, seed, "c2d"), trace)
    if cfg.option("online", True):
        outputs["C"] = _closed_loop(trained_model(cfg, seed, "c2d", mode="online"), trace)
    base = trained_model(cfg, seed)
    bank = bank_for(cfg, base, seed)
    policy = ControllerPolicy(cfg.collect_len, "snap_to_bank", True, cfg.aperture)
    outputs["D"] = run_gated_session(base, trace, policy, bank).y

    summary = Table(["panel", "training", "trigger", "value", "discrete_target", "settle_steps",
                     "final_mean", "err_discrete", "err_continuous"])
    traces = Table(["panel", "step", "V", "T", "y"])
    for panel, y in outputs.items():
        for k, (v, t) in enumerate(zip(values, targets)):
            ys = y[k * seg:(k + 1) * seg]
            fm = float(np.mean(ys[-tail:]))
            summary.add(panel, PANELS[panel], k, v, t, settle_time(ys, t, SETTLE_TOL), fm,
                        abs(fm - t), abs(fm - v))
        for n in range(len(trace)):
            traces.add(panel, n, trace.V[n], int(trace.T[n]), y[n])
        steps = np.arange(len(trace))
        ref = np.repeat(targets, seg)
        res.plots[f"panel_{panel.lower()}"] = line_plot(
            [("y", steps, y), ("discrete target", steps, ref), ("continuous", steps, trace.M)],
            title=f"Panel {panel}: {PANELS[panel]}", xlabel="step", ylabel="output",
            dashed=("discrete target", "continuous"), ylim=(-1.1, 1.1))

    res.add_table("discretization_summary", summary)
    res.add_table("discretization_trace", traces)
    for panel in outputs:
        rows = [r for r in summary.records() if r["panel"] == panel]
        times = [seg if r["settle_steps"] is None else r["settle_steps"] for r in rows]
        res.summary[PANELS[panel]] = {
            "mean_settle": float(np.mean(times)),
            "max_err_continuous": max(r["err_continuous"] for r in rows),
        }
    return res
