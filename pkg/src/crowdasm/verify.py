"""Self-verification suites behind the `verify` CLI command.

Also hosts the trace-level invariant checkers shared with the test suite:
queue-law conservation, recruitment-constraint safety, and rating replay.
"""

from __future__ import annotations

from dataclasses import replace

from .config import MarketConfig, budget_at, consumption_caps, drift_slack
from .metrics import bound_check, time_averaged_profit
from .oracle import brute_force_mobilization, horizon_optimal_profit
from .report import run_csv_text, run_summary
from .scenarios import BOUND_FIXTURES, load_fixture, load_fixture_raw, random_planning_instance, random_scenario
from .scheduler import plan_mobilization
from .simulator import SimulationTrace, run

RHO_GRID = (0.5, 1.0, 2.0, 5.0, 10.0)


def check_queue_law(trace: SimulationTrace) -> list[str]:
    """Exact conservation per step plus non-negativity; returns violations."""
    cfg = trace.header["config"]
    requirements = [t["requirements"] for t in cfg["task_types"]]
    skills = cfg["skills"]
    problems = []
    for s in trace.steps:
        consumed = [0] * skills
        for k, count in enumerate(s.served_demand):
            for m in range(skills):
                consumed[m] += requirements[k][m] * count
        for m in range(skills):
            mu = consumed[m] - s.available_gain[m]
            residual = s.q_after[m] - s.q_before[m] + mu - s.plan.mobilized_counts[m]
            if residual != 0:
                problems.append(f"t={s.t} skill={m}: queue-law residual {residual}")
            if s.q_before[m] < 0 or s.q_after[m] < 0:
                problems.append(f"t={s.t} skill={m}: negative queue")
    for s in trace.steps:
        for k in range(len(s.realized_demand)):
            if s.served_demand[k] > s.plan.served[k] * s.realized_demand[k]:
                problems.append(f"t={s.t} type={k}: served more than the indicator allows")
    return problems


def check_constraints(trace: SimulationTrace) -> list[str]:
    """Recruitment cap, reliability threshold, and budget safety per step.

    Reliabilities are replayed from the recorded completions, so this check
    is independent of the simulator's internal bookkeeping.
    """
    cfg = trace.header["config"]
    skills = cfg["skills"]
    caps = cfg["mobilization_cap"]
    costs = cfg["mobilization_cost"]
    epsilon = cfg["epsilon"]
    budget = cfg["budget_per_step"]
    problems = []
    counts: dict[int, list[int]] = {
        w["id"]: [w["successes"], w["failures"]] for w in _initial_counts(trace)
    }
    busy_until: dict[int, int] = {}
    for s in trace.steps:
        for m in range(skills):
            if s.plan.mobilized_counts[m] > caps[m]:
                problems.append(f"t={s.t} skill={m}: recruitment above cap")
        spend = sum(costs[m] * s.plan.mobilized_counts[m] for m in range(skills))
        limit = budget[min(s.t, len(budget) - 1)] if isinstance(budget, list) else budget
        if spend > limit:
            problems.append(f"t={s.t}: spend {spend} exceeds budget {limit}")
        for m, ids in enumerate(s.plan.mobilized_ids):
            for wid in ids:
                succ, fail = counts.setdefault(wid, [0, 0])
                rel = (succ + 1) / (succ + fail + 2)
                if rel < epsilon:
                    problems.append(f"t={s.t}: mobilized worker {wid} below threshold ({rel:.3f})")
        for team in s.teams:
            for wid, _ in team.members:
                if busy_until.get(wid, -1) > s.t:
                    problems.append(f"t={s.t}: worker {wid} teamed while busy")
                succ, fail = counts.setdefault(wid, [0, 0])
                rel = (succ + 1) / (succ + fail + 2)
                if rel < epsilon:
                    problems.append(f"t={s.t}: teamed worker {wid} below threshold ({rel:.3f})")
        for team in s.teams:
            service = cfg["task_types"][team.task_type]["service_time"]
            for wid, _ in team.members:
                busy_until[wid] = s.t + service
        for _, member_ids, success in s.completions:
            for wid in member_ids:
                entry = counts.setdefault(wid, [0, 0])
                entry[0 if success else 1] += 1
    return problems


def _initial_counts(trace: SimulationTrace):
    # Initial roster ids follow the initial_workers order; arrivals get later ids
    # and fresh (0, 0) histories, which setdefault supplies on demand.
    for i, w in enumerate(trace.header["config"]["initial_workers"]):
        yield {"id": i, "successes": w["successes"], "failures": w["failures"]}


def oracle_equivalence_case(seed: int, tolerance: float = 1e-12) -> str | None:
    """Compare the controller's objective with the exhaustive minimum for the
    same served set on one random tiny instance; None means agreement."""
    snapshot, roster, batch, cfg = random_planning_instance(seed)
    plan = plan_mobilization(snapshot, roster, batch, cfg)
    served = {k for k in range(len(cfg.task_types)) if plan.served[k] == 1 and batch.demand[k] > 0}
    result = brute_force_mobilization(snapshot, roster, batch, cfg, require_set=served)
    diff = abs(plan.objective - result.best_objective)
    if diff > tolerance:
        return f"seed {seed}: objective {plan.objective} vs oracle {result.best_objective} (diff {diff})"
    return None


def bound_suite(fixture_names=BOUND_FIXTURES, rho_grid=RHO_GRID, tolerance: float = 1e-9):
    """For every scripted fixture: exhaustive optimum once, then the profit
    bound at each rho. Yields (fixture, rho, BoundReport)."""
    for name in fixture_names:
        cfg = load_fixture(name)
        delta_opt = horizon_optimal_profit(cfg)
        xi = drift_slack(cfg.mobilization_cap, consumption_caps(cfg.task_types, cfg.skills))
        for rho in rho_grid:
            scenario = replace(cfg, rho=rho)
            trace = run(scenario, policy="crowdasm")
            avg = time_averaged_profit(trace)
            yield name, rho, bound_check(avg, delta_opt, xi, rho, tolerance)


def run_verification(emit=print) -> bool:
    """Full self-check; prints one line per check and returns overall success."""
    ok = True

    def report(name: str, problems) -> None:
        nonlocal ok
        if problems:
            ok = False
            emit(f"FAIL {name}: {problems[0]}" + (f" (+{len(problems) - 1} more)" if len(problems) > 1 else ""))
        else:
            emit(f"PASS {name}")

    expected = load_fixture_raw("tiny3_expected.json")
    trace = run(load_fixture("tiny3.json"), policy="crowdasm", check=True)
    problems = []
    for i, s in enumerate(trace.steps):
        if s.q_before != expected["q_before"][i] or s.q_after != expected["q_after"][i]:
            problems.append(f"t={i}: queue trajectory diverged")
        if s.plan.mobilized_counts != expected["mobilized"][i] or s.realized_demand != expected["realized_demand"][i]:
            problems.append(f"t={i}: plan diverged")
        if abs(s.delta - expected["delta"][i]) > 1e-9:
            problems.append(f"t={i}: profit diverged")
    report("tiny3 scripted trajectory", problems)

    delta_opt = horizon_optimal_profit(load_fixture("tiny3.json"))
    report(
        "tiny3 frozen optimum",
        [] if abs(delta_opt - expected["delta_opt"]) <= 1e-9 else [f"{delta_opt} != {expected['delta_opt']}"],
    )

    problems = []
    for seed in range(150):
        msg = oracle_equivalence_case(seed)
        if msg:
            problems.append(msg)
    report("per-step oracle equivalence (150 instances)", problems)

    problems = []
    last = None
    for name, rho, result in bound_suite():
        if not result.satisfied:
            problems.append(f"{name} rho={rho}: margin {result.margin}")
        if last is not None and last[0] == name and result.xi > 0 and result.bound_rhs <= last[1]:
            problems.append(f"{name}: bound rhs not increasing in rho")
        last = (name, result.bound_rhs)
    report("profit bound on scripted fixtures", problems)

    problems = []
    for seed in range(10):
        cfg = random_scenario(seed, horizon=100)
        trace = run(cfg, policy="crowdasm", check=True)
        problems.extend(check_queue_law(trace))
        problems.extend(check_constraints(trace))
    report("queue law and constraint safety (10 random scenarios)", problems)

    first = run(load_fixture("tiny3.json"), policy="crowdasm")
    second = run(load_fixture("tiny3.json"), policy="crowdasm")
    same = run_csv_text(first) == run_csv_text(second) and run_summary(first) == run_summary(second)
    report("determinism", [] if same else ["repeated runs differ"])

    return ok
