"""``kedm`` command-line interface.

::

    kedm experiment sparsity --config table1.json --jobs 4 --out results/
    kedm simulate --config scene.json --out inputs/
    kedm localize --config localize.json --out estimate/

Exit codes: 0 success, 1 configuration error, 2 solver failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .exceptions import AnchorError, SingularSystemError
from .experiments import RUNNERS, ConfigError, ExperimentConfig, ExperimentKind, run_localize
from .sdr import SolverError

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2

logger = logging.getLogger("kedm")


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _parse_override(item: str) -> tuple[str, object]:
    key, sep, value = item.partition("=")
    if not sep or not key:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    return key.strip(), _parse_value(value)


def _nest(overrides: list[tuple[str, object]]) -> dict:
    out: dict = {}
    for key, value in overrides:
        head, dot, tail = key.partition(".")
        if dot:  # e.g. sdr.solver_tol=1e-5
            out.setdefault(head, {})[tail] = value
        else:
            out[key] = value
    return out


def load_config(path: str | None, experiment: str | None, seed: int | None,
                overrides: list[str]) -> ExperimentConfig:
    """Config file, then ``--experiment``/``--seed``, then ``--set`` overrides."""
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    if experiment is not None:
        data["experiment"] = experiment
    if seed is not None:
        data["seed"] = seed
    for key, value in _nest([_parse_override(o) for o in overrides]).items():
        if isinstance(value, dict) and isinstance(data.get(key), dict):
            data[key] = {**data[key], **value}
        else:
            data[key] = value
    return ExperimentConfig.from_dict(data).validate()


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors are configuration errors, not solver failures
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON experiment config")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--out", default="kedm-out", help="output directory")
    common.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config field (JSON value)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = _Parser(prog="kedm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("localize", parents=[common], help="estimate trajectories from JSON inputs")
    sub.add_parser("simulate", parents=[common], help="write synthetic measurements and anchors")
    exp = sub.add_parser("experiment", parents=[common], help="run an experiment")
    exp.add_argument("kind", nargs="?", choices=[k.value for k in ExperimentKind])
    exp.add_argument("--experiment", dest="experiment_flag",
                     choices=[k.value for k in ExperimentKind])
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(asctime)s %(name)s %(message)s")
    try:
        if args.jobs < 1:
            raise ConfigError("--jobs must be positive")
        if args.command == "experiment":
            experiment = args.kind or args.experiment_flag
            if args.kind and args.experiment_flag and args.kind != args.experiment_flag:
                raise ConfigError("conflicting experiment kinds")
        else:
            experiment = args.command
        cfg = load_config(args.config, experiment, args.seed, args.overrides)
        if cfg.experiment is ExperimentKind.LOCALIZE:
            base = Path(args.config).parent if args.config else None
            output = run_localize(cfg, args.jobs, base)
        else:
            output = RUNNERS[cfg.experiment](cfg, jobs=args.jobs)
        output.summary.setdefault("config", cfg.to_dict())
        written = output.write(Path(args.out))
    except (ConfigError, AnchorError) as exc:
        print(f"kedm: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, SingularSystemError, np.linalg.LinAlgError) as exc:
        print(f"kedm: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
