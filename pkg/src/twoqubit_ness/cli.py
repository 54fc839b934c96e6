"""Command-line front end.

Exit codes: 0 success, 1 invalid configuration, 2 failed comparison or
self-check, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, Mode, OutputFormat, SweepConfig, bundled_config, bundled_names, load_config
from .errors import UnsupportedClosedFormError
from .output import write_csv, write_matrix
from .selfcheck import CHECKS, INFORMATIONAL, run_selfcheck
from .sweep import SweepResult, phase_summary, run_comparison, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_ORACLE, EXIT_IO = 0, 1, 2, 3


def _load(spec: str) -> SweepConfig:
    path = Path(spec)
    if path.exists():
        return load_config(path)
    if spec in bundled_names():
        return bundled_config(spec)
    raise ConfigError(f"{spec}: no such file or bundled configuration (bundled: {', '.join(bundled_names())})")


def _apply_flags(cfg: SweepConfig, args) -> SweepConfig:
    changes = {}
    if getattr(args, "output", None):
        changes["output"] = Path(args.output)
    if getattr(args, "format", None):
        changes["output_format"] = OutputFormat(args.format)
    if getattr(args, "mode", None):
        changes["mode"] = Mode(args.mode)
    if getattr(args, "secular", False):
        changes["secular"] = True
    if getattr(args, "workers", None):
        changes["workers"] = args.workers
    return replace(cfg, **changes) if changes else cfg


def _emit(result: SweepResult, cfg: SweepConfig) -> None:
    target = cfg.output
    if cfg.output_format is OutputFormat.MATRIX:
        write_matrix(result, target)
    else:
        write_csv(result, target)


def _plot(result: SweepResult, cfg: SweepConfig) -> Path:
    from .plotting import plot_result

    out = cfg.output.with_suffix(".png") if cfg.output else Path(f"{cfg.name}.png")
    return plot_result(result, out)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_sweep(args) -> int:
    cfg = _apply_flags(_load(args.config), args)
    if args.command == "phase-diagram":
        cfg = replace(cfg, phase_diagram=True)
        SweepConfig.__post_init__(cfg)
    result = run_sweep(cfg)
    _emit(result, cfg)
    if args.plot:
        _note(f"plot written to {_plot(result, cfg)}")
    if result.invalid_count:
        _note(f"{result.invalid_count} of {len(result.rows)} grid points are out of range (status column)")
    bad = int((~result.column("positivity_ok").astype(bool) & result.ok).sum())
    if bad:
        _note(f"{bad} grid points violate positivity (positivity_ok column)")
    if args.command == "phase-diagram":
        summary = json.dumps(phase_summary(result).as_dict(), indent=2)
        if cfg.output is None:
            _note(summary)
        else:
            print(summary)
    return EXIT_OK


def cmd_compare(args) -> int:
    cfg = _apply_flags(_load(args.config), args)
    report = run_comparison(cfg, seed=args.seed, workers=cfg.workers)
    if cfg.output is not None:
        write_csv(SweepResult(cfg, _comparison_columns(report.rows), report.rows), cfg.output)
    print(json.dumps(report.as_dict(), indent=2))
    return EXIT_OK if report.passed else EXIT_ORACLE


def _comparison_columns(rows) -> tuple[str, ...]:
    from .sweep import RESULT_COLUMNS, parameter_columns

    extra = sorted({k for r in rows for k in r} - set(parameter_columns("flat")) - set(RESULT_COLUMNS))
    return parameter_columns("flat", extra) + RESULT_COLUMNS


def cmd_selfcheck(args) -> int:
    summary = run_selfcheck(args.only)
    text = json.dumps(summary, indent=2, default=str)
    if args.output:
        Path(args.output).write_text(text + "\n")
    print(text)
    return EXIT_OK if summary["passed"] else EXIT_ORACLE


def cmd_configs(args) -> int:
    for name in bundled_names():
        print(name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twoqubit-ness",
        description="Steady states of two coupled qubits in separate boson or fermion reservoirs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def grid_flags(p):
        p.add_argument("config", help="JSON configuration file or bundled configuration name")
        p.add_argument("--workers", type=int, help="worker processes (default: configuration, else CPU count)")
        p.add_argument("--output", help="output path ('-' for stdout)")
        p.add_argument("--format", choices=[f.value for f in OutputFormat])
        p.add_argument("--mode", choices=[m.value for m in Mode])
        p.add_argument("--secular", action="store_true", help="drop the cross-frequency dissipator")
        p.add_argument("--plot", action="store_true", help="also render a PNG next to the output")

    for name, help_ in (("sweep", "evaluate a parameter grid"), ("phase-diagram", "two-axis grid with summary")):
        grid_flags(sub.add_parser(name, help=help_))

    p = sub.add_parser("compare", help="closed form against the numerical engine")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=0, help="seed for random-draw comparisons")
    p.add_argument("--workers", type=int)
    p.add_argument("--output", help="write per-point rows as CSV")

    p = sub.add_parser("selfcheck", help="run the built-in consistency checks")
    p.add_argument("--only", nargs="+", choices=sorted({*CHECKS, *INFORMATIONAL}))
    p.add_argument("--output", help="also write the JSON summary here")

    sub.add_parser("configs", help="list bundled configurations")
    return parser


_COMMANDS = {
    "sweep": cmd_sweep,
    "phase-diagram": cmd_sweep,
    "compare": cmd_compare,
    "selfcheck": cmd_selfcheck,
    "configs": cmd_configs,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", None) is not None and args.workers < 1:
        _note("error: --workers must be >= 1")
        return EXIT_CONFIG
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, UnsupportedClosedFormError) as exc:
        _note(f"error: {exc}")
        return EXIT_CONFIG
    except OSError as exc:
        _note(f"error: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
