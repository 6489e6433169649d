"""Seeded experiment scripts. Each returns tables and plots per seed; writing
them to disk is left to :mod:`cwm.output`."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List

from .aperture import exp_aperture
from .approximation import exp_approximation
from .common import ExperimentResult, derive_seed, trained_model
from .config import EXPERIMENT_IDS, ExperimentConfig
from .discretization import exp_discretization
from .disjunction import exp_disjunction
from .interpolation import exp_interpolation
from .pca import PcaResult, pca_conceptors
from .stability import exp_stability
from .table import Table

EXPERIMENTS: Dict[str, Callable[[ExperimentConfig, int], ExperimentResult]] = {
    "approximation": exp_approximation,
    "stability": exp_stability,
    "discretization": exp_discretization,
    "interpolation": exp_interpolation,
    "disjunction": exp_disjunction,
    "aperture": exp_aperture,
}


def _run_one(cfg: ExperimentConfig, seed: int) -> ExperimentResult:
    return EXPERIMENTS[cfg.experiment](cfg, seed)


def run_experiment(cfg: ExperimentConfig) -> List[ExperimentResult]:
    """Run every seed of ``cfg``; results come back in seed order."""
    if cfg.workers == 1 or len(cfg.seeds) == 1:
        return [_run_one(cfg, s) for s in cfg.seeds]
    with ProcessPoolExecutor(max_workers=min(cfg.workers, len(cfg.seeds))) as pool:
        return list(pool.map(_run_one, [cfg] * len(cfg.seeds), cfg.seeds))


__all__ = [
    "EXPERIMENTS", "EXPERIMENT_IDS", "ExperimentConfig", "ExperimentResult", "PcaResult", "Table",
    "derive_seed", "exp_aperture", "exp_approximation", "exp_discretization", "exp_disjunction",
    "exp_interpolation", "exp_stability", "pca_conceptors", "run_experiment", "trained_model",
]
