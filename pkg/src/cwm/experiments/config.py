"""Experiment configuration and provenance hashing."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from typing import Optional, Tuple

EXPERIMENT_IDS = ("approximation", "stability", "discretization", "interpolation", "disjunction", "aperture")

# Horizons used when the config leaves ``horizon`` unset: (desk, full scale).
DEFAULT_HORIZONS = {
    "approximation": (2_000, 2_000),
    "stability": (50_000, 200_000),
    "discretization": (500, 500),
    "interpolation": (2_000, 2_000),
    "disjunction": (2_000, 2_000),
    "aperture": (2_000, 2_000),
}

# Fields that do not change results and so stay out of the hash.
_UNHASHED = ("output_dir", "workers")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seeds: Tuple[int, ...] = (1,)
    n_neurons: int = 500
    horizon: Optional[int] = None
    noise_std: float = 1e-4
    output_dir: str = "results"
    full_scale: bool = False
    workers: int = 1
    n_train_steps: int = 25_000
    ridge: float = 1e-4
    aperture: float = 10.0
    collect_len: int = 100
    n_levels: int = 11
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_IDS:
            raise ValueError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENT_IDS}")
        seeds = tuple(int(s) for s in self.seeds)
        if not seeds:
            raise ValueError("seeds must be nonempty")
        object.__setattr__(self, "seeds", seeds)
        if self.full_scale and self.n_neurons == 500:
            object.__setattr__(self, "n_neurons", 1000)
        if self.horizon is not None and self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        object.__setattr__(self, "options", dict(self.options))

    @property
    def resolved_horizon(self) -> int:
        if self.horizon is not None:
            return self.horizon
        desk, full = DEFAULT_HORIZONS[self.experiment]
        return full if self.full_scale else desk

    def option(self, name, default):
        return self.options.get(name, default)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["seeds"] = list(self.seeds)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**d)

    @property
    def config_hash(self) -> str:
        d = {k: v for k, v in self.to_dict().items() if k not in _UNHASHED}
        blob = json.dumps(d, sort_keys=True, default=float).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:12]
