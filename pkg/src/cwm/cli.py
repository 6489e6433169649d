"""Command-line entry point: ``cwm train|bank|run|experiment|inspect``.

Exit codes: 0 success, 1 usage error, 2 data or format error, 3 numerical
failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from typing import List, Optional

import numpy as np

from . import persistence
from .controller import ControllerPolicy, build_bank, run_gated_session
from .esn import EsnParams, ReservoirError, init_reservoir
from .experiments import EXPERIMENT_IDS, ExperimentConfig, run_experiment
from .experiments.common import TRAIN, derive_seed
from .output import write_results
from .readout import TrainConfig, score, train
from .tasks import VARIANTS, TaskSpec, generate_trace, level_grid

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

logger = logging.getLogger("cwm")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Reports usage errors with exit code 1 instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(obj):
    print(json.dumps(obj, indent=2, sort_keys=True, default=float))


def _load_trained(path):
    model = persistence.load_model(path)
    if not model.trained:
        raise ValueError(f"model in {path} has no trained readout")
    return model


def cmd_train(args) -> int:
    params = EsnParams(n_neurons=args.neurons, seed=args.seed)
    model = init_reservoir(params)
    trace = generate_trace(TaskSpec(n_steps=args.steps, variant=args.variant, seed=derive_seed(args.seed, TRAIN)))
    train(model, trace, TrainConfig(n_train_steps=args.steps, ridge=args.ridge, mode=args.mode))
    persistence.save_model(model, args.out)
    _emit({"out": args.out, "n_neurons": args.neurons, "variant": args.variant, "mode": args.mode,
           "seed": args.seed})
    return EXIT_OK


def cmd_bank(args) -> int:
    model = _load_trained(args.model)
    bank = build_bank(model, level_grid(args.levels), args.aperture, args.collect, seed=args.seed)
    persistence.save_bank(bank, args.out)
    _emit({"out": args.out, "tags": [float(v) for v in bank.values]})
    return EXIT_OK


def cmd_run(args) -> int:
    model = _load_trained(args.model)
    if args.noise:
        model.params = dataclasses.replace(model.params, noise_std=args.noise)
    bank = persistence.load_bank(args.bank) if args.bank else None
    policy = ControllerPolicy(mode=args.policy)
    if policy.mode == "snap_to_bank" and bank is None:
        raise UsageError("--policy snap needs --bank")
    if bank is not None and len(bank) and bank.conceptors[0].n != model.n_neurons:
        raise ValueError(f"bank has {bank.conceptors[0].n}-neuron conceptors, model has {model.n_neurons}")
    trace = generate_trace(TaskSpec(n_steps=args.steps, trigger_prob=args.trigger_prob, seed=args.seed))
    session = run_gated_session(model, trace, policy, bank)
    if not np.all(np.isfinite(session.y)):
        raise FloatingPointError("non-finite outputs")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(session.to_csv())
    m = score(session.y, trace)
    _emit({"policy": policy.mode, "steps": args.steps, "triggers": int(trace.T.sum()),
           "rmse_hold": m.rmse_hold, "rmse_trigger": m.rmse_trigger, "max_drift": m.max_drift,
           "csv": args.csv})
    return EXIT_OK


_OVERRIDES = {"seeds": "seeds", "neurons": "n_neurons", "horizon": "horizon", "noise": "noise_std",
              "workers": "workers", "train_steps": "n_train_steps"}


def experiment_config(args) -> ExperimentConfig:
    d = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            d = json.load(fh)
        if not isinstance(d, dict):
            raise ValueError("config file must hold a JSON object")
    d["experiment"] = args.id
    for flag, key in _OVERRIDES.items():
        v = getattr(args, flag)
        if v is not None:
            d[key] = v
    if args.full_scale:
        d["full_scale"] = True
    if args.out:
        d["output_dir"] = args.out
    return ExperimentConfig.from_dict(d)


def cmd_experiment(args) -> int:
    cfg = experiment_config(args)
    results = run_experiment(cfg)
    paths = write_results(results, cfg)
    _emit({"experiment": cfg.experiment, "config_hash": cfg.config_hash, "files": len(paths),
           "summary": {str(r.seed): r.summary for r in results}})
    return EXIT_OK


def cmd_inspect(args) -> int:
    _emit(persistence.read_metadata(args.file))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cwm", description="Gated working-memory reservoir with conceptor long-term memory.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("train", help="train a readout and save the model")
    t.add_argument("--variant", choices=VARIANTS, default="original")
    t.add_argument("--mode", choices=("offline", "online"), default="offline")
    t.add_argument("--neurons", type=int, default=1000)
    t.add_argument("--steps", type=int, default=25_000)
    t.add_argument("--ridge", type=float, default=1e-4)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    b = sub.add_parser("bank", help="collect one conceptor per level")
    b.add_argument("--model", required=True)
    b.add_argument("--levels", type=int, default=11)
    b.add_argument("--aperture", type=float, default=10.0)
    b.add_argument("--collect", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bank)

    r = sub.add_parser("run", help="run a gated session on a fresh task trace")
    r.add_argument("--model", required=True)
    r.add_argument("--bank")
    r.add_argument("--policy", choices=("none", "raw", "snap"), default="snap")
    r.add_argument("--steps", type=int, default=5_000)
    r.add_argument("--noise", type=float, default=0.0)
    r.add_argument("--trigger-prob", type=float, default=0.01)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--csv")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("experiment", help="run a scripted experiment")
    e.add_argument("id", choices=EXPERIMENT_IDS)
    e.add_argument("--config", help="JSON file with experiment settings; flags override it")
    e.add_argument("--out")
    e.add_argument("--seeds", type=int, nargs="+")
    e.add_argument("--neurons", type=int)
    e.add_argument("--horizon", type=int)
    e.add_argument("--noise", type=float)
    e.add_argument("--train-steps", type=int)
    e.add_argument("--workers", type=int)
    e.add_argument("--full-scale", action="store_true")
    e.set_defaults(func=cmd_experiment)

    i = sub.add_parser("inspect", help="print a container's metadata")
    i.add_argument("--file", required=True)
    i.set_defaults(func=cmd_inspect)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cwm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ReservoirError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"cwm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (persistence.ContainerError, OSError, ValueError, KeyError) as exc:
        print(f"cwm: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
