"""Command-line experiment runner.

    redistnet run <preset|config.json> [--scale F] [--seed N] [--out DIR]
                  [--format csv|json] [--workers N]
    redistnet validate <config.json>
    redistnet presets

Exit codes: 0 success, 1 validation error, 2 runtime failure.  The default
output directory is $REDISTNET_OUT (falling back to ./results); the resolved
config is echoed next to the results for provenance.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from .experiments import (
    PRESETS,
    ConfigError,
    ExperimentConfig,
    preset,
    run_experiment,
    scaled,
)

OUT_ENV_VAR = "REDISTNET_OUT"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="redistnet",
        description="Evolutionary game dynamics on networks with local wealth redistribution",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a preset or a config file")
    run_p.add_argument("target", help="preset name or path to a config JSON")
    run_p.add_argument("--scale", type=float, default=1.0,
                       help="scale factor for Z, replicates, instances, iteration cap "
                            "(1.0 = full size; ~0.1 is a desk-scale run)")
    run_p.add_argument("--seed", type=int, default=None, help="override master_seed")
    run_p.add_argument("--out", default=None, help="output directory")
    run_p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="override output format")
    run_p.add_argument("--workers", type=int, default=1,
                       help="concurrent replicate workers per cell")
    run_p.add_argument("--quiet", action="store_true", help="suppress per-cell progress")

    val_p = sub.add_parser("validate", help="validate a config file")
    val_p.add_argument("config_path")

    sub.add_parser("presets", help="list available presets")
    return parser


def _load_target(target: str, scale: float) -> ExperimentConfig:
    if target in PRESETS:
        return preset(target, scale)
    path = Path(target)
    if not path.exists():
        raise ConfigError("target", f"{target!r} is neither a preset nor an existing file")
    config = ExperimentConfig.from_json(path.read_text(encoding="utf-8"))
    return scaled(config, scale)


def _cmd_run(args) -> int:
    config = _load_target(args.target, args.scale)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    if args.format is not None:
        config = replace(config, output_format=args.format)
    config.validate()

    out_dir = Path(args.out or os.environ.get(OUT_ENV_VAR, "results"))
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / f"{config.name}.config.json", "w", encoding="utf-8") as fh:
        fh.write(config.to_json())

    started = time.perf_counter()
    rows = run_experiment(config, out_dir=out_dir, workers=args.workers,
                          progress=not args.quiet)
    elapsed = time.perf_counter() - started
    result_path = out_dir / f"{config.name}.{config.output_format}"
    print(f"{config.name}: {len(rows)} cells in {elapsed:.1f}s -> {result_path}")
    return 0


def _cmd_validate(args) -> int:
    path = Path(args.config_path)
    if not path.exists():
        raise ConfigError("config_path", f"no such file: {args.config_path}")
    config = ExperimentConfig.from_json(path.read_text(encoding="utf-8"))
    config.validate()
    print(f"OK: {config.name} ({config.mode}, "
          f"{len(config.networks)} network spec(s), seed {config.master_seed})")
    return 0


def _cmd_presets() -> int:
    width = max(len(n) for n in PRESETS)
    for name, desc in PRESETS.items():
        print(f"{name:<{width}}  {desc}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; map onto the validation code
        return 0 if exc.code in (0, None) else 1
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_presets()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
