"""Helpers shared by the experiment scripts."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from ..controller import ConceptorBank, build_bank
from ..esn import EsnModel, EsnParams, init_reservoir
from ..readout import TrainConfig, train
from ..tasks import TaskSpec, generate_trace, level_grid
from .config import ExperimentConfig
from .table import Table

# Sub-stream keys for derive_seed.
TRAIN, BANK, TEST, DISTRACT = 1, 2, 3, 4


@dataclass
class ExperimentResult:
    """Tables and plots of one experiment for one seed; no files are touched."""

    experiment: str
    seed: int
    config_hash: str
    tables: Dict[str, Table] = field(default_factory=dict)
    plots: Dict[str, str] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def add_table(self, name: str, table: Table):
        self.tables[name] = table.with_provenance(self.seed, self.config_hash)


def derive_seed(seed: int, *keys: int) -> int:
    """Independent, reproducible integer seed for a named sub-stream."""
    return int(np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(1)[0])


def trained_model(cfg: ExperimentConfig, seed: int, variant: str = "original", mode: str = "offline",
                  noise_std: float = 0.0) -> EsnModel:
    """Reservoir for ``seed`` trained noise-free on the task variant.

    All variants of one seed share the reservoir and the raw training stream;
    only the discretization applied to it differs. ``noise_std`` is switched
    on after training.
    """
    model = init_reservoir(EsnParams(n_neurons=cfg.n_neurons, seed=seed))
    trace = generate_trace(TaskSpec(n_steps=cfg.n_train_steps, variant=variant, n_levels=cfg.n_levels,
                                    seed=derive_seed(seed, TRAIN)))
    train(model, trace, TrainConfig(n_train_steps=cfg.n_train_steps, ridge=cfg.ridge, mode=mode))
    if noise_std:
        model.params = dataclasses.replace(model.params, noise_std=noise_std)
    return model


def bank_for(cfg: ExperimentConfig, model: EsnModel, seed: int,
             values: Optional[Sequence[float]] = None) -> ConceptorBank:
    values = level_grid(cfg.n_levels) if values is None else values
    return build_bank(model, values, cfg.aperture, cfg.collect_len, seed=derive_seed(seed, BANK))


def settle_time(y: np.ndarray, target: float, tol: float) -> Optional[int]:
    """First index from which ``|y - target| < tol`` holds to the end, else None."""
    bad = np.flatnonzero(np.abs(np.asarray(y) - target) >= tol)
    if bad.size == 0:
        return 0
    k = int(bad[-1]) + 1
    return k if k < len(y) else None


def first_exceedance(y: np.ndarray, target: float, tol: float, start: int = 0) -> Optional[int]:
    """First step ``>= start`` with ``|y - target| > tol``, else None."""
    bad = np.flatnonzero(np.abs(np.asarray(y)[start:] - target) > tol)
    return int(bad[0]) + start if bad.size else None
