"""Long holds with or without a conceptor, with or without state noise."""
from __future__ import annotations

import dataclasses

import numpy as np

from ..conceptors import conceptor_from_states
from ..esn import run, run_batch
from ..readout import SETTLE_STEPS
from ..tasks import single_hold_trace
from .common import TEST, ExperimentResult, derive_seed, first_exceedance, trained_model
from .config import ExperimentConfig
from .svg import line_plot
from .table import Table

FAIL_TOL = 0.1
TRACE_STRIDE = 100


def hold_run(model, trace, collect_len: int, aperture: float, use_conceptor: bool) -> np.ndarray:
    """Outputs of one long hold; the conceptor (if any) is built from the first window."""
    head = run(model, trace.inputs[:collect_len])
    C = conceptor_from_states(head.states.T, aperture) if use_conceptor else None
    rest = trace.inputs[collect_len:, None, :]
    if rest.shape[0] == 0:
        return head.outputs[:, 0]
    out, _, _ = run_batch(model, rest, C)
    return np.concatenate([head.outputs[:, 0], out[:, 0, 0]])


def exp_stability(cfg: ExperimentConfig, seed: int) -> ExperimentResult:
    res = ExperimentResult("stability", seed, cfg.config_hash)
    base = trained_model(cfg, seed)
    H = cfg.resolved_horizon
    rng = np.random.default_rng(derive_seed(seed, TEST))
    m = float(cfg.option("value", rng.uniform(-0.9, 0.9)))
    trace = single_hold_trace(m, H, rng=derive_seed(seed, TEST, 1))

    summary = Table(["conceptor", "noise_std", "value", "horizon", "failure_step", "max_dev", "final_y"])
    traces = Table(["conceptor", "noise_std", "step", "y"])
    series = []
    for use_c in (False, True):
        for noise in (0.0, cfg.noise_std):
            model = base.copy()
            model.params = dataclasses.replace(model.params, noise_std=noise)
            y = hold_run(model, trace, min(cfg.collect_len, H), cfg.aperture, use_c)
            fail = first_exceedance(y, m, FAIL_TOL, start=SETTLE_STEPS)
            dev = float(np.max(np.abs(y[SETTLE_STEPS:] - m))) if H > SETTLE_STEPS else 0.0
            summary.add(use_c, noise, m, H, fail, dev, float(y[-1]))
            idx = np.arange(0, H, TRACE_STRIDE)
            for n in idx:
                traces.add(use_c, noise, int(n), float(y[n]))
            label = f"{'conceptor' if use_c else 'no conceptor'}, noise {noise:g}"
            series.append((label, idx, y[idx]))
            res.summary[f"conceptor={use_c},noise={noise:g}"] = {"failure_step": fail, "max_dev": dev}
    series.append(("target", [0, H - 1], [m, m]))
    res.add_table("stability_summary", summary)
    res.add_table("stability_trace", traces)
    res.plots["stability"] = line_plot(series, title=f"Holding {m:.3f}", xlabel="step", ylabel="output",
                                       dashed=("target",))
    return res
