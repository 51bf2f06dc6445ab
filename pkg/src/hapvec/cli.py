"""Command-line front end: ``hapvec analyze | sweep | validate``.

Exit codes: 0 success, 1 invalid input, 2 infeasible scenario (analyze),
3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .des import SimConfig, simulate_system
from .errors import ConfigError, InfeasibleScenario, UnstableQueue
from .experiments import (
    INFEASIBLE,
    MODES,
    PRESETS,
    SWEEP_PARAMS,
    VALIDATE_COLUMNS,
    SweepSpec,
    load_scenario,
    result_columns,
    rows_to_csv,
    run_analyze,
    run_sweep,
    run_validate,
    write_trace_csv,
)

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _values(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad value list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML scenario file (overrides a preset)")
    common.add_argument("--preset", choices=PRESETS, help="bundled scenario")
    common.add_argument("--out", default="-", help="CSV output path (default: stdout)")
    common.add_argument("--seed", type=_u64, default=0, help="root seed for simulation")
    common.add_argument("--mode", choices=MODES, default=None,
                        help="analytical, simulate or both (default: analytical)")
    common.add_argument("--frames", type=int, default=1_000_000,
                        help="simulated frames per point (default: 1e6)")

    p = argparse.ArgumentParser(prog="hapvec", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="optimize one scenario")
    sw = sub.add_parser("sweep", parents=[common], help="optimize over a parameter grid")
    sw.add_argument("--param", choices=SWEEP_PARAMS, help="swept parameter")
    sw.add_argument("--values", type=_values, help="comma-separated increasing values")
    va = sub.add_parser("validate", parents=[common], help="compare analysis against simulation")
    va.add_argument("--eta", type=float, default=0.5, help="offloading factor (default: 0.5)")
    va.add_argument("--trace", type=Path, help="optional per-frame trace CSV")
    return p


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)


def _sweep_spec(args, from_file: SweepSpec | None) -> SweepSpec:
    param = args.param or (from_file.parameter if from_file else None)
    values = args.values or (from_file.values if from_file else None)
    mode = args.mode or (from_file.mode if from_file else "analytical")
    if param is None or values is None:
        raise ConfigError("sweep needs --param and --values (or a sweep section in the config)")
    return SweepSpec(param, tuple(values), mode)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.frames < 10_000:
            raise ConfigError("--frames must be >= 10000")
        cfg, sweep = load_scenario(args.config, args.preset)

        if args.command == "analyze":
            mode = args.mode or "analytical"
            row = run_analyze(cfg, mode, args.seed, args.frames)
            _emit(rows_to_csv([row], result_columns(mode)), args.out)
            return EXIT_INFEASIBLE if row["status"] == INFEASIBLE else EXIT_OK

        if args.command == "sweep":
            spec = _sweep_spec(args, sweep)
            rows = run_sweep(cfg, spec, args.seed, args.frames)
            _emit(rows_to_csv(rows, result_columns(spec.mode)), args.out)
            return EXIT_OK

        if not 0.0 <= args.eta <= 1.0:
            raise ConfigError("--eta must lie in [0, 1]")
        rows = run_validate(cfg, args.eta, args.frames, args.seed)
        _emit(rows_to_csv(rows, VALIDATE_COLUMNS), args.out)
        if args.trace is not None:
            st = simulate_system(SimConfig(cfg, args.eta, args.frames, seed=args.seed),
                                 keep_trace=True)
            write_trace_csv(st.trace, args.trace)
        return EXIT_OK
    except OSError as exc:
        print(f"hapvec: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InfeasibleScenario, UnstableQueue) as exc:
        # validate on an unstable point is an input problem, not an analysis outcome
        print(f"hapvec: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConfigError, ValueError) as exc:
        print(f"hapvec: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
