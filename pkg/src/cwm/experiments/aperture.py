"""Holding values after rescaling the aperture of a bank conceptor."""
from __future__ import annotations

import numpy as np

from ..conceptors import aperture_adapt
from ..controller import measure_relaxation, relaxation_outputs
from .common import DISTRACT, ExperimentResult, bank_for, derive_seed, trained_model
from .config import ExperimentConfig
from .svg import line_plot
from .table import Table

GAMMAS = np.logspace(-2, 2, 17)
VALUES = (-0.6, 0.2, 0.8)
HOLD_TOL = 0.05


def exp_aperture(cfg: ExperimentConfig, seed: int) -> ExperimentResult:
    res = ExperimentResult("aperture", seed, cfg.config_hash)
    model = trained_model(cfg, seed)
    bank = bank_for(cfg, model, seed)
    gammas = np.asarray(cfg.option("gammas", GAMMAS), dtype=np.float64)
    values = [float(v) for v in cfg.option("values", VALUES)]
    H = cfg.resolved_horizon
    window = min(1000, H)

    table = Table(["value", "gamma", "aperture", "relaxation", "hold_error", "max_dev"])
    series = []
    for a, m in enumerate(values):
        errs = []
        for g, gamma in enumerate(gammas):
            C = aperture_adapt(bank.get(m), float(gamma))
            y = relaxation_outputs(model, C, [m], H, rng=derive_seed(seed, DISTRACT, a, g))[:, 0]
            rel = measure_relaxation(y, window)
            err = abs(rel - m)
            errs.append(err)
            table.add(m, float(gamma), C.aperture, rel, err, float(np.max(np.abs(y[-window:] - m))))
        ok = [g for g, e in zip(gammas, errs) if e < HOLD_TOL]
        # smallest gamma from which every larger gamma also holds
        threshold = None
        for idx in range(len(gammas)):
            if all(e < HOLD_TOL for e in errs[idx:]):
                threshold = float(gammas[idx])
                break
        res.summary[m] = {"holding_gammas": len(ok), "threshold_gamma": threshold}
        series.append((f"m={m:g}", np.log10(gammas), errs))
    res.add_table("aperture_sweep", table)
    res.plots["aperture"] = line_plot(series, title="Hold error against aperture scaling",
                                      xlabel="log10 gamma", ylabel="|relaxation - m|")
    return res
