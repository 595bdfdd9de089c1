"""Command-line entry point: ``shapejc <command> [--config PATH] [--out PATH] [--format csv|json]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from ..errors import ShapeJCError
from .commands import COMMANDS, RUNNERS, CommandResult
from .config import ConfigError, RunConfig, config_from_dict, config_to_dict, parse_config

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_RUNTIME_ERROR = 3

DEFAULT_CONFIG = {
    "model": {"kind": "harmonic", "omega": 1.0},
    "N": 8,
    "alpha": 0.2,
    "delta": 0.3,
    "times": {"start": 0.0, "stop": 5.0, "count": 11},
}


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def to_csv(columns: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def to_json(cfg: RunConfig | None, result: CommandResult) -> str:
    reports = [r if isinstance(r, dict) else r.__dict__ for r in result.reports]
    doc = {
        "config": config_to_dict(cfg) if cfg is not None else None,
        "rows": result.rows,
        "reports": reports,
        "provenance": result.provenance,
    }
    return json.dumps(_jsonable(doc), indent=2) + "\n"


def _error_text(exc: Exception, fmt: str) -> str:
    record = {"error_type": type(exc).__name__, "message": str(exc)}
    for attr in ("line", "name", "field", "reason"):
        if hasattr(exc, attr):
            record[attr] = getattr(exc, attr)
    if fmt == "json":
        return json.dumps({"error": _jsonable(record)}, indent=2) + "\n"
    return to_csv(["error_type", "message"], [record])


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shapejc", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="YAML run configuration (a built-in default is used if omitted)")
    p.add_argument("--out", help="output file (default: the config's output.path, else stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="output format (overrides the config)")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    fmt = args.format or "csv"
    cfg = None
    try:
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        else:
            cfg = config_from_dict(DEFAULT_CONFIG)
    except (ConfigError, OSError) as exc:
        _emit(_error_text(exc, fmt), args.out)
        print(f"shapejc: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    fmt = args.format or cfg.output.format
    out = args.out or cfg.output.path
    try:
        result = RUNNERS[args.command](cfg)
    except (ShapeJCError, ArithmeticError, ValueError) as exc:
        _emit(_error_text(exc, fmt), out)
        print(f"shapejc: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR

    text = to_json(cfg, result) if fmt == "json" else to_csv(result.columns, result.rows)
    _emit(text, out)
    return EXIT_CHECK_FAILED if result.exit_code else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
