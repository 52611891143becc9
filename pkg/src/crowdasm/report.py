"""File outputs for runs and sweeps: delimited per-step tables, JSON
summaries, and SVG line charts rendered next to them.

All outputs are byte-stable for fixed inputs: JSON is written with sorted
keys, CSV rows use shortest-roundtrip float formatting, and the SVG
renderer is salted with the config hash and stripped of timestamps.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .metrics import BoundReport, mean_backlog, time_averaged_profit
from .simulator import SimulationTrace, trace_to_dict

SUMMARY_SCHEMA = "crowdasm.run_summary/1"
SWEEP_SCHEMA = "crowdasm.bound_report/1"

BOUND_COLUMNS = (
    "index",
    "policy",
    "seed",
    "rho",
    "xi",
    "avg_profit",
    "delta_opt",
    "bound_rhs",
    "margin",
    "satisfied",
    "tolerance",
)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def run_csv_text(trace: SimulationTrace) -> str:
    """Per-step table: t, per-skill queues, per-type demand/served/flags,
    per-skill recruitment, cost, profit, revenue, queue energy."""
    header = trace.header
    skills = header["config"]["skills"]
    types = len(header["config"]["task_types"])
    columns = (
        ["t"]
        + [f"q_{m}" for m in range(skills)]
        + [f"T_{k}" for k in range(types)]
        + [f"T_served_{k}" for k in range(types)]
        + [f"d_{k}" for k in range(types)]
        + [f"a_{m}" for m in range(skills)]
        + ["cost", "delta", "realized_revenue", "lyapunov"]
    )
    lines = [
        "# config_hash={} seed={} policy={} demand_form={}".format(
            header["config_hash"], header["seed"], header["policy"], header["demand_form"]
        ),
        ",".join(columns),
    ]
    for s in trace.steps:
        row = (
            [s.t]
            + list(s.q_before)
            + list(s.realized_demand)
            + list(s.served_demand)
            + list(s.plan.served)
            + list(s.plan.mobilized_counts)
            + [s.plan.scored_cost, s.delta, s.realized_revenue, s.lyapunov]
        )
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def run_summary(trace: SimulationTrace) -> dict:
    header = trace.header
    types = len(header["config"]["task_types"])
    per_type = []
    for k in range(types):
        per_type.append(
            {
                "type": k,
                "demand": sum(s.realized_demand[k] for s in trace.steps),
                "served": sum(s.served_demand[k] for s in trace.steps),
                "revenue": sum(
                    s.served_demand[k] * header["config"]["task_types"][k]["price"] for s in trace.steps
                ),
            }
        )
    return {
        "schema": SUMMARY_SCHEMA,
        "config_hash": header["config_hash"],
        "seed": header["seed"],
        "policy": header["policy"],
        "demand_form": header["demand_form"],
        "demand_mode": header["demand_mode"],
        "horizon": header["horizon"],
        "steps": len(trace.steps),
        "avg_profit": time_averaged_profit(trace) if trace.steps else 0.0,
        "total_expected_profit": sum(s.delta for s in trace.steps),
        "total_realized_revenue": sum(s.realized_revenue for s in trace.steps),
        "total_mobilization_spend": sum(s.plan.total_spend for s in trace.steps),
        "total_scored_cost": sum(s.plan.scored_cost for s in trace.steps),
        "total_demand": sum(sum(s.realized_demand) for s in trace.steps),
        "total_served": sum(sum(s.served_demand) for s in trace.steps),
        "mean_backlog": mean_backlog(trace),
        "final_queue": list(trace.steps[-1].q_after) if trace.steps else None,
        "clamped_demand_events": trace.clamped_total,
        "effective_config": header["config"],
    }


def _write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def _write_json(path: Path, payload) -> Path:
    return _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _save_figure(fig, path: Path, salt: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": salt}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def write_run_figures(trace: SimulationTrace, out_dir: Path, prefix: str = "fig") -> list[Path]:
    salt = trace.header["config_hash"]
    skills = trace.header["config"]["skills"]
    ts = [s.t for s in trace.steps]
    paths = []

    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.plot(ts, [s.delta for s in trace.steps], label="expected profit", color="tab:blue")
    ax.plot(ts, [s.realized_revenue for s in trace.steps], label="realized revenue", color="tab:orange")
    ax.set_xlabel("step")
    ax.set_ylabel("currency")
    ax.legend(loc="best")
    ax.set_title("profit per step")
    paths.append(_save_figure(fig, out_dir / f"{prefix}_profit.svg", salt))

    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    for m in range(skills):
        ax.plot(ts, [s.q_before[m] for s in trace.steps], label=f"skill {m}")
    ax.set_xlabel("step")
    ax.set_ylabel("available workers")
    ax.legend(loc="best")
    ax.set_title("queue length per skill")
    paths.append(_save_figure(fig, out_dir / f"{prefix}_queues.svg", salt))

    if len(trace.steps) >= 2:
        from .metrics import drift_series

        drift = drift_series(trace)
        fig, ax = plt.subplots(figsize=(6.4, 3.6))
        ax.plot(ts[:-1], drift, color="tab:green")
        ax.set_xlabel("step")
        ax.set_ylabel("queue-energy change")
        ax.set_title("drift per step")
        paths.append(_save_figure(fig, out_dir / f"{prefix}_drift.svg", salt))
    return paths


def export_run(trace: SimulationTrace, out_dir, formats=("csv", "json")) -> list[Path]:
    """Write one run's outputs into a directory; returns the written paths."""
    out = Path(out_dir)
    paths = []
    if "csv" in formats:
        paths.append(_write_text(out / "run.csv", run_csv_text(trace)))
    if "json" in formats:
        paths.append(_write_json(out / "summary.json", run_summary(trace)))
        paths.append(_write_json(out / "trace.json", trace_to_dict(trace)))
    if "svg" in formats:
        paths.extend(write_run_figures(trace, out))
    return paths


def bound_row(index: int, policy: str, seed: int, report: BoundReport | None, avg_profit: float, xi: float, rho: float) -> dict:
    row = {
        "index": index,
        "policy": policy,
        "seed": seed,
        "rho": rho,
        "xi": xi,
        "avg_profit": avg_profit,
        "delta_opt": None,
        "bound_rhs": None,
        "margin": None,
        "satisfied": None,
        "tolerance": None,
    }
    if report is not None:
        row.update(
            delta_opt=report.delta_opt,
            bound_rhs=report.bound_rhs,
            margin=report.margin,
            satisfied=report.satisfied,
            tolerance=report.tolerance,
        )
    return row


def bound_table_text(rows) -> str:
    lines = [",".join(BOUND_COLUMNS)]
    for row in rows:
        lines.append(",".join(_cell(row[c]) for c in BOUND_COLUMNS))
    return "\n".join(lines) + "\n"


def export_report(traces, bound_rows, out_dir, formats=("csv", "json")) -> list[Path]:
    """Render any number of runs plus an optional bound table to a directory.

    Zero traces still produce a summary recording zero runs; a single trace
    writes directly into the directory; multiple traces get numbered
    subdirectories plus the merged bound table.
    """
    out = Path(out_dir)
    traces = list(traces)
    bound_rows = list(bound_rows)
    paths: list[Path] = []
    if not traces:
        paths.append(_write_json(out / "summary.json", {"schema": SUMMARY_SCHEMA, "runs": 0}))
    elif len(traces) == 1:
        paths.extend(export_run(traces[0], out, formats))
    else:
        for i, trace in enumerate(traces):
            paths.extend(export_run(trace, out / f"run_{i:03d}", formats))
    if bound_rows:
        if "csv" in formats:
            paths.append(_write_text(out / "bound_report.csv", bound_table_text(bound_rows)))
        if "json" in formats:
            paths.append(_write_json(out / "bound_report.json", {"schema": SWEEP_SCHEMA, "rows": bound_rows}))
    return paths
