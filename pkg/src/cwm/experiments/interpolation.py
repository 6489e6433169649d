"""Linear interpolation between two constant-memory conceptors, with PCA."""
from __future__ import annotations

import numpy as np

from ..conceptors import lincomb
from ..controller import measure_relaxation, relaxation_outputs
from .common import DISTRACT, ExperimentResult, bank_for, derive_seed, trained_model
from .config import ExperimentConfig
from .pca import pca_conceptors
from .svg import line_plot
from .table import Table

LAMBDAS = np.round(np.linspace(-1.0, 2.0, 31), 12)
LOW, HIGH = 0.1, 1.0


def exp_interpolation(cfg: ExperimentConfig, seed: int) -> ExperimentResult:
    res = ExperimentResult("interpolation", seed, cfg.config_hash)
    model = trained_model(cfg, seed)
    n_pca = int(cfg.option("n_pca", 201))
    d = n_pca - 1
    if d < 20 or d % 20:
        raise ValueError(f"n_pca={n_pca} gives a value grid without {LOW} and {HIGH}; use 20k + 1")
    values = np.array([(2 * k - d) / d for k in range(n_pca)])
    bank = bank_for(cfg, model, seed, values)
    C_low, C_high = bank.get(LOW), bank.get(HIGH)

    pca = pca_conceptors(bank, k=3)
    H = cfg.resolved_horizon
    window = min(1000, H)
    triggers = [float(v) for v in cfg.option("trigger_values", (0.5,))]

    table = Table(["lambda", "trigger_value", "valid", "relaxation", "mean_abs", "oscillation",
                   "pc1", "pc2", "pc3"])
    curves = {v: [] for v in triggers}
    proj = []
    for i, lam in enumerate(LAMBDAS):
        C = lincomb(C_high, C_low, float(lam))
        p = pca.project(C)
        proj.append(p)
        y = relaxation_outputs(model, C, triggers, H, rng=derive_seed(seed, DISTRACT, i))
        for b, v in enumerate(triggers):
            tail = y[-window:, b]
            rel = measure_relaxation(y[:, b], window)
            curves[v].append(rel)
            table.add(float(lam), v, C.valid, rel, float(np.mean(np.abs(tail))), float(np.std(tail)),
                      float(p[0]), float(p[1]), float(p[2]))

    ratios = Table(["component", "explained_variance_ratio", "cumulative"])
    for j, r in enumerate(pca.explained_variance_ratio):
        ratios.add(j + 1, float(r), float(np.sum(pca.explained_variance_ratio[:j + 1])))
    coords = Table(["value", "pc1", "pc2", "pc3"])
    for m, p in zip(values, pca.projections):
        coords.add(float(m), float(p[0]), float(p[1]), float(p[2]))

    res.add_table("interpolation", table)
    res.add_table("pca_ratios", ratios)
    res.add_table("pca_bank", coords)
    res.plots["interpolation"] = line_plot(
        [(f"trigger {v:g}", LAMBDAS, curves[v]) for v in triggers]
        + [("lambda * 1.0 + (1 - lambda) * 0.1", LAMBDAS, 0.1 + 0.9 * LAMBDAS)],
        title="Relaxation under lambda C_1.0 + (1 - lambda) C_0.1", xlabel="lambda", ylabel="relaxation",
        dashed=("lambda * 1.0 + (1 - lambda) * 0.1",), ylim=(-1.1, 1.6))
    proj = np.array(proj)
    res.plots["pca"] = line_plot(
        [("bank", pca.projections[:, 0], pca.projections[:, 1]), ("interpolation", proj[:, 0], proj[:, 1])],
        title="Conceptors in the first two principal components", xlabel="PC1", ylabel="PC2")
    res.summary = {
        "top3_ratio": float(np.sum(pca.explained_variance_ratio)),
        "relaxation": {v: dict(zip(LAMBDAS.tolist(), curves[v])) for v in triggers},
    }
    return res
