"""Writing experiment results as ``<out>/<experiment>/<seed>/*.csv|svg``."""
from __future__ import annotations

import json
import os
from typing import Iterable, List

from .experiments import ExperimentConfig, ExperimentResult


def _write_text(path: str, text: str):
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_results(results: Iterable[ExperimentResult], cfg: ExperimentConfig, out_dir=None) -> List[str]:
    """Write every table, plot and a config echo; returns the written paths."""
    root = os.fspath(out_dir if out_dir is not None else cfg.output_dir)
    echo = dict(cfg.to_dict(), config_hash=cfg.config_hash, resolved_horizon=cfg.resolved_horizon)
    paths = []
    for res in results:
        d = os.path.join(root, res.experiment, str(res.seed))
        os.makedirs(d, exist_ok=True)
        for name, table in res.tables.items():
            paths.append(os.path.join(d, f"{name}.csv"))
            _write_text(paths[-1], table.to_csv())
        for name, svg in res.plots.items():
            paths.append(os.path.join(d, f"{name}.svg"))
            _write_text(paths[-1], svg)
        paths.append(os.path.join(d, "config.json"))
        _write_text(paths[-1], json.dumps(echo, indent=2, sort_keys=True, default=float) + "\n")
        paths.append(os.path.join(d, "summary.json"))
        _write_text(paths[-1], json.dumps(res.summary, indent=2, sort_keys=True, default=_jsonable) + "\n")
    return paths


def _jsonable(v):
    if hasattr(v, "item"):
        return v.item()
    return str(v)
