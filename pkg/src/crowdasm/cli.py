"""Command-line front door: run scenarios, sweep overrides, self-verify, and
re-render reports from stored traces.

Exit codes: 0 success, 1 usage or scenario error, 2 verification failure,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from .config import config_to_dict, consumption_caps, drift_slack, validate_config
from .errors import ConfigError, CrowdAsmError, SearchSpaceTooLarge
from .metrics import bound_check, time_averaged_profit
from .oracle import horizon_optimal_profit
from .report import bound_row, bound_table_text, export_report, export_run
from .scenarios import FIXTURES, default_config, load_fixture_raw
from .simulator import run, trace_from_dict

log = logging.getLogger("crowdasm")

POLICIES = ("crowdasm", "never", "max", "random", "oracle-step")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage problems instead of argparse's 2
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="crowdasm", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--scenario", help="scenario JSON path or bundled fixture name")
        p.add_argument("--policy", default="crowdasm", choices=POLICIES)
        p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="K=V",
                       help="dotted-key config override, repeatable")
        p.add_argument("--out", default=None, help="output directory (default $CROWDASM_OUT or ./crowdasm_out)")
        p.add_argument("--format", dest="formats", action="append", default=[],
                       choices=("csv", "json", "svg"), help="output formats, repeatable (default csv+json)")

    common(sub.add_parser("run", help="run one simulation and write its report"))
    common(sub.add_parser("sweep", help="run the cross-product of override value lists"))
    sub.add_parser("verify", help="run the bundled verification suites")
    rep = sub.add_parser("report", help="re-render outputs from stored trace.json files")
    rep.add_argument("--trace", dest="traces", action="append", required=True, help="trace.json path, repeatable")
    rep.add_argument("--out", default=None)
    rep.add_argument("--format", dest="formats", action="append", default=[],
                     choices=("csv", "json", "svg"))
    return parser


def _out_dir(arg) -> Path:
    return Path(arg or os.environ.get("CROWDASM_OUT") or "crowdasm_out")


def _formats(args) -> tuple[str, ...]:
    return tuple(args.formats) if args.formats else ("csv", "json")


def _load_scenario(arg) -> dict:
    if arg is None:
        return config_to_dict(default_config())
    path = Path(arg)
    if path.exists():
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    if arg in FIXTURES:
        return load_fixture_raw(arg)
    raise FileNotFoundError(f"scenario not found: {arg}")


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _split_sweep_values(text: str) -> list[str]:
    """Split on commas that are not inside brackets, so JSON lists survive."""
    parts, depth, current = [], 0, []
    for ch in text:
        if ch in "[{":
            depth += 1
        elif ch in "]}":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
    parts.append("".join(current))
    return parts


def apply_override(raw: dict, key: str, value) -> None:
    node = raw
    parts = key.split(".")
    for part in parts[:-1]:
        node = node[int(part)] if isinstance(node, list) else node[part]
    last = parts[-1]
    if isinstance(node, list):
        node[int(last)] = value
    else:
        if last not in node:
            raise UsageError(f"override targets unknown config key {key!r}")
        node[last] = value


def _parse_overrides(pairs) -> list[tuple[str, str]]:
    parsed = []
    for pair in pairs:
        if "=" not in pair:
            raise UsageError(f"--set expects K=V, got {pair!r}")
        key, _, value = pair.partition("=")
        parsed.append((key.strip(), value.strip()))
    return parsed


def _effective_config(args, assignment) -> dict:
    raw = _load_scenario(args.scenario)
    for key, value in assignment:
        apply_override(raw, key, value)
    if args.seed is not None:
        raw["seed"] = args.seed
    return raw


def _bound_row_for(cfg, trace, index: int, policy: str) -> dict:
    xi = drift_slack(cfg.mobilization_cap, consumption_caps(cfg.task_types, cfg.skills))
    avg = time_averaged_profit(trace) if trace.steps else 0.0
    report = None
    try:
        delta_opt = horizon_optimal_profit(cfg)
        report = bound_check(avg, delta_opt, xi, cfg.rho)
    except SearchSpaceTooLarge:
        pass
    return bound_row(index, policy, cfg.seed, report, avg, xi, cfg.rho)


def cmd_run(args) -> int:
    raw = _effective_config(args, [(k, _parse_value(v)) for k, v in _parse_overrides(args.overrides)])
    cfg = validate_config(raw)
    trace = run(cfg, policy=args.policy)
    out = _out_dir(args.out)
    formats = _formats(args)
    paths = export_run(trace, out, formats)
    row = _bound_row_for(cfg, trace, 0, args.policy)
    if "csv" in formats:
        (out / "bound_report.csv").write_text(bound_table_text([row]), encoding="utf-8")
    log.info(
        "run: policy=%s seed=%s avg_profit=%.6g -> %s", args.policy, cfg.seed,
        time_averaged_profit(trace) if trace.steps else 0.0, out,
    )
    return 0


def cmd_sweep(args) -> int:
    assignments: list[list[tuple[str, object]]] = [[]]
    for key, text in _parse_overrides(args.overrides):
        values = [_parse_value(v) for v in _split_sweep_values(text)]
        assignments = [base + [(key, v)] for base in assignments for v in values]
    traces = []
    rows = []
    for index, assignment in enumerate(assignments):
        cfg = validate_config(_effective_config(args, assignment))
        trace = run(cfg, policy=args.policy)
        traces.append(trace)
        rows.append(_bound_row_for(cfg, trace, index, args.policy))
        log.info(
            "sweep %03d: %s avg_profit=%.6g", index,
            " ".join(f"{k}={v}" for k, v in assignment) or "(base)",
            time_averaged_profit(trace) if trace.steps else 0.0,
        )
    export_report(traces, rows, _out_dir(args.out), _formats(args))
    return 0


def cmd_verify() -> int:
    from .verify import run_verification

    return 0 if run_verification(emit=lambda line: print(line)) else 2


def cmd_report(args) -> int:
    traces = []
    for path in args.traces:
        with open(path, "r", encoding="utf-8") as fh:
            traces.append(trace_from_dict(json.load(fh)))
    export_report(traces, [], _out_dir(args.out), _formats(args))
    return 0


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        if args.verb == "run":
            return cmd_run(args)
        if args.verb == "sweep":
            return cmd_sweep(args)
        if args.verb == "verify":
            return cmd_verify()
        if args.verb == "report":
            return cmd_report(args)
        raise UsageError(f"unknown verb {args.verb!r}")
    except (UsageError, ConfigError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    except CrowdAsmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
