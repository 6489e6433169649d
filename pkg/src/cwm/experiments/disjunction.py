"""Relaxation values under unions and intersections of bank conceptors."""
from __future__ import annotations

import numpy as np

from ..conceptors import and_, or_
from ..controller import measure_relaxation, predict_relaxation, relaxation_outputs
from ..tasks import level_grid
from .common import DISTRACT, ExperimentResult, bank_for, derive_seed, trained_model
from .config import ExperimentConfig
from .svg import heatmap_grid
from .table import Table

AGREE_TOL = 0.1
OPS = {"or": or_, "and": and_}


def relaxation_grid(model, bank, op: str, v_values, n_steps: int, seed: int) -> np.ndarray:
    """Measured relaxation, shape ``(n_c, n_c, n_v)``.

    Both operations are commutative, so each unordered pair runs once and
    fills both cells.
    """
    f = OPS[op]
    cs = bank.values
    out = np.empty((len(cs), len(cs), len(v_values)))
    window = min(1000, n_steps)
    for i in range(len(cs)):
        for j in range(i, len(cs)):
            C = f(bank.get(cs[i]), bank.get(cs[j]))
            y = relaxation_outputs(model, C, v_values, n_steps,
                                   rng=derive_seed(seed, DISTRACT, list(OPS).index(op), i, j))
            vals = [measure_relaxation(y[:, b], window) for b in range(len(v_values))]
            out[i, j] = out[j, i] = vals
    return out


def exp_disjunction(cfg: ExperimentConfig, seed: int) -> ExperimentResult:
    res = ExperimentResult("disjunction", seed, cfg.config_hash)
    model = trained_model(cfg, seed)
    bank = bank_for(cfg, model, seed)
    cs = bank.values
    vs = np.asarray(cfg.option("v_values", level_grid(cfg.n_levels)), dtype=np.float64)
    H = cfg.resolved_horizon
    ops = tuple(cfg.option("ops", ("or", "and")))

    table = Table(["op", "c1", "c2", "v", "predicted", "measured", "abs_err", "within_tol", "extreme_v"])
    for op in ops:
        grid = relaxation_grid(model, bank, op, vs, H, seed)
        pred = np.full_like(grid, np.nan)
        inside, total, inside_all = 0, 0, 0
        for i, c1 in enumerate(cs):
            for j, c2 in enumerate(cs):
                for k, v in enumerate(vs):
                    p = predict_relaxation(c1, c2, v) if op == "or" else None
                    ref = 0.0 if p is None else p
                    err = abs(grid[i, j, k] - ref)
                    ok = bool(err < AGREE_TOL)
                    extreme = bool(np.isclose(abs(v), 1.0))
                    table.add(op, float(c1), float(c2), float(v), p, float(grid[i, j, k]), err, ok, extreme)
                    if p is not None:
                        pred[i, j, k] = p
                    inside_all += int(ok)
                    if not extreme:
                        total += 1
                        inside += int(ok)
        res.summary[op] = {"agreement": float(inside / total) if total else float("nan"),
                           "agreement_all_cells": float(inside_all / grid.size),
                           "diagonal_max_err": float(max(abs(grid[i, i, k] - cs[i])
                                                         for i in range(len(cs)) for k in range(len(vs))))}
        panels = [(f"v={v:g}", grid[:, :, k]) for k, v in enumerate(vs)]
        res.plots[f"{op}_measured"] = heatmap_grid(panels, cs, cs, title=f"Measured relaxation under C1 {op} C2")
        if op == "or":
            res.plots["or_predicted"] = heatmap_grid([(f"v={v:g}", pred[:, :, k]) for k, v in enumerate(vs)],
                                                     cs, cs, title="Predicted relaxation under C1 or C2")
    res.add_table("relaxation_grid", table)
    return res
