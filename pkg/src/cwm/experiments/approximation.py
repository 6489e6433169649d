"""Holding values with raw or discrete conceptors.

Panel A applies bank conceptors from a random state with no trigger. Panel B
stores the conceptor collected after each trigger and applies it. Panel C
snaps that conceptor to the nearest bank entry.
"""
from __future__ import annotations

import numpy as np

from ..controller import ControllerPolicy, run_gated_session
from ..esn import run_batch
from ..tasks import discretize, hold_sequence
from .common import DISTRACT, TEST, ExperimentResult, bank_for, derive_seed, trained_model
from .config import ExperimentConfig
from .svg import line_plot
from .table import Table

PANEL_A_VALUES = (-0.6, 0.0, 0.4, 0.8)
SNAP_TOL = 0.02


def exp_approximation(cfg: ExperimentConfig, seed: int) -> ExperimentResult:
    res = ExperimentResult("approximation", seed, cfg.config_hash)
    model = trained_model(cfg, seed)
    bank = bank_for(cfg, model, seed)
    H = cfg.resolved_horizon
    rng = np.random.default_rng(derive_seed(seed, TEST))
    tail = min(1000, max(1, H // 2))

    trace_rows = Table(["panel", "segment", "step", "V", "T", "target", "y"])
    summary = Table(["panel", "segment", "value", "target", "applied_tag", "final_mean", "max_dev",
                     "frac_within_tol"])

    # A: discrete conceptors from a random state
    a_values = [float(v) for v in cfg.option("panel_a_values", PANEL_A_VALUES)]
    a_series = []
    for i, m in enumerate(a_values):
        x0 = rng.uniform(-1.0, 1.0, model.n_neurons)
        y0 = model.W_out @ x0
        U = np.zeros((H, 1, 2))
        U[:, 0, 0] = np.random.default_rng(derive_seed(seed, DISTRACT, i)).uniform(-1, 1, H)
        out, _, _ = run_batch(model, U, bank.get(m), x0=x0, y0=y0)
        y = out[:, 0, 0]
        for n in range(H):
            trace_rows.add("A", i, n, U[n, 0, 0], 0, m, y[n])
        dev = np.abs(y[-tail:] - m)
        summary.add("A", i, m, m, m, float(np.mean(y[-tail:])), float(dev.max()), float(np.mean(dev < SNAP_TOL)))
        a_series.append((f"C_{m:g}", np.arange(H), y))

    # B and C: controller sessions on the same test trace
    n_segments = int(cfg.option("n_segments", 4))
    values = [float(v) for v in cfg.option("values", rng.uniform(-0.95, 0.95, n_segments))]
    seg = cfg.collect_len + H
    trace = hold_sequence(values, seg, rng=derive_seed(seed, TEST, 1))
    plots = {}
    for panel, mode in (("B", "store_raw"), ("C", "snap_to_bank")):
        session = run_gated_session(model.copy(), trace,
                                    ControllerPolicy(cfg.collect_len, mode, True, cfg.aperture), bank)
        target = trace.M if panel == "B" else np.array([discretize(m, cfg.n_levels) for m in trace.M])
        for n in range(len(trace)):
            trace_rows.add(panel, n // seg, n, trace.V[n], int(trace.T[n]), target[n], session.y[n])
        for k, v in enumerate(values):
            lo, hi = k * seg + cfg.collect_len, (k + 1) * seg
            y = session.y[lo:hi]
            t = target[lo]
            dev = np.abs(y - t)
            tag = session.conceptor_tag[lo]
            summary.add(panel, k, v, t, None if np.isnan(tag) else float(tag), float(np.mean(y[-tail:])),
                        float(dev.max()), float(np.mean(dev < SNAP_TOL)))
        steps = np.arange(len(trace))
        series = [("y", steps, session.y), ("target", steps, target)]
        if panel == "C":
            series.append(("continuous", steps, trace.M))
        plots[f"panel_{panel.lower()}"] = line_plot(
            series, title=f"Panel {panel}: {mode}", xlabel="step", ylabel="output",
            dashed=("continuous", "target"), ylim=(-1.1, 1.1))

    res.add_table("approximation_trace", trace_rows)
    res.add_table("approximation_summary", summary)
    res.plots["panel_a"] = line_plot(a_series, title="Panel A: bank conceptors from a random state",
                                     xlabel="step", ylabel="output", ylim=(-1.1, 1.1))
    res.plots.update(plots)
    res.summary = {r["panel"] + str(r["segment"]): r["max_dev"] for r in summary.records()}
    return res
