"""Deterministic crowd-market simulator with a budgeted team-assembly
controller, exhaustive oracles, and baseline policies."""

from .config import (
    MarketConfig,
    SkillQueueState,
    TaskTypeSpec,
    WorkerSpec,
    budget_at,
    config_hash,
    consumption_caps,
    drift_slack,
    load_config,
    validate_config,
)
from .demand import DemandParams, expected_demand, linearized_demand, realize_demand
from .metrics import BoundReport, bound_check, drift_series, lyapunov_value, mean_backlog, time_averaged_profit
from .oracle import OracleResult, baseline_policy, brute_force_mobilization, horizon_optimal_profit
from .reputation import (
    RatingHistory,
    Worker,
    pool_reliability,
    record_outcome,
    reliability,
    task_reliability,
)
from .report import export_report, export_run
from .scenarios import default_config, load_fixture, random_scenario
from .scheduler import (
    MobilizationPlan,
    TaskRequestBatch,
    TeamAssignment,
    assemble_teams,
    mobilization_cost,
    mobilization_score,
    plan_mobilization,
    sort_task_requests,
)
from .simulator import SimulationTrace, StepLedger, run, step_profit

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "DemandParams",
    "MarketConfig",
    "MobilizationPlan",
    "OracleResult",
    "RatingHistory",
    "SimulationTrace",
    "SkillQueueState",
    "StepLedger",
    "TaskRequestBatch",
    "TaskTypeSpec",
    "TeamAssignment",
    "Worker",
    "WorkerSpec",
    "assemble_teams",
    "baseline_policy",
    "bound_check",
    "brute_force_mobilization",
    "budget_at",
    "config_hash",
    "consumption_caps",
    "default_config",
    "drift_series",
    "drift_slack",
    "expected_demand",
    "export_report",
    "export_run",
    "horizon_optimal_profit",
    "linearized_demand",
    "load_config",
    "load_fixture",
    "lyapunov_value",
    "mean_backlog",
    "mobilization_cost",
    "mobilization_score",
    "plan_mobilization",
    "pool_reliability",
    "random_scenario",
    "realize_demand",
    "record_outcome",
    "reliability",
    "run",
    "sort_task_requests",
    "step_profit",
    "task_reliability",
    "time_averaged_profit",
    "validate_config",
]
