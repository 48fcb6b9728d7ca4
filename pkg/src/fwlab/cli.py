"""Command-line entry point: ``fwlab <experiment> [flags]``."""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys
from typing import Sequence

from .errors import FWLabError, InvalidArgumentError
from .experiments import EXPERIMENTS, ExperimentConfig, default_config, render_report, run_experiment

EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2

_FLAGS = {
    "grid_n": int,
    "grid_m": float,
    "s": float,
    "p": float,
    "r": float,
    "sigma": float,
    "l": int,
    "n_min": int,
    "n_max": int,
    "n_terms": int,
    "t": None,
    "eps": float,
    "max_iters": int,
    "out": str,
    "format": str,
}


def _float(text: str) -> float:
    v = float(text)
    if math.isnan(v):
        raise ValueError("nan is not allowed")
    return v


def _times(text: str) -> tuple:
    return tuple(_float(v) for v in text.split(",") if v.strip())


def _converter(name: str):
    conv = _FLAGS.get(name)
    if name == "t":
        return _times
    if conv is float:
        return _float
    return conv or _float


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment, '-' in keys reads as '_'."""
    known = {f.name for f in dataclasses.fields(ExperimentConfig)} - {"experiment"}
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidArgumentError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in known:
                raise InvalidArgumentError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = _converter(key)(value)
            except ValueError as exc:
                raise InvalidArgumentError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fwlab",
        description="Numerical experiments for the nonlocal Fornberg-Whitham equation.",
    )
    sub = parser.add_subparsers(dest="experiment", required=True, metavar="EXPERIMENT")
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", help="key=value file; flags override it")
        for key in _FLAGS:
            flag = "--" + key.replace("_", "-")
            kwargs = {"dest": key, "default": None, "type": _converter(key)}
            if key == "format":
                kwargs["choices"] = ("csv", "json")
            if key == "t":
                kwargs["help"] = "probe time(s), comma separated"
            sp.add_argument(flag, **kwargs)
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    params = read_config_file(args.config) if args.config else {}
    params.update({k: getattr(args, k) for k in _FLAGS if getattr(args, k) is not None})
    return default_config(args.experiment, **params)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; keep 2 reserved for failed verdicts
        return EXIT_PASS if exc.code in (0, None) else EXIT_ERROR
    try:
        config = config_from_args(args)
        report = run_experiment(config)
        text = render_report(report, config.format)
        if config.out:
            with open(config.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (FWLabError, OSError) as exc:
        print(f"fwlab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for name, ok in report.verdicts.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}", file=sys.stderr)
    print(f"{report.experiment}: {'pass' if report.passed else 'fail'} "
          f"({report.wall_clock:.1f} s)", file=sys.stderr)
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
