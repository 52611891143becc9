"""Discrete-time market engine.

Each step runs a fixed phase order: (1) busy workers that finished service
and fresh arrivals rejoin the available pool; (2) demand is realized per
task type from the current offline-pool reliabilities; (3) the policy
plans recruitment and teams are assembled; (4) served teams go busy for
their type's service time; (5) tasks finishing this step draw an outcome
and every team member receives it as a rating event; (6) the queue law
q(t+1) = q(t) - consumption + recruitment is applied and the step ledger
recorded. Identical (config, seed, policy) triples produce byte-identical
traces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .config import (
    MarketConfig,
    SkillQueueState,
    budget_at,
    config_hash,
    config_to_dict,
    validate_config,
)
from .demand import (
    DemandParams,
    expected_demand,
    linearized_demand_raw,
    realize_demand,
)
from .errors import UnknownPolicy
from .metrics import lyapunov_value
from .reputation import (
    BUSY,
    LOGGED_IN,
    OFFLINE,
    RatingHistory,
    Worker,
    pool_reliabilities,
    record_outcome,
    task_reliability_with_fallback,
    worker_reliability,
)
from .scheduler import (
    MobilizationPlan,
    TaskRequestBatch,
    Team,
    TeamAssignment,
    assemble_teams,
    plan_mobilization,
)


@dataclass
class InFlight:
    complete_step: int
    task_type: int
    member_ids: tuple[int, ...]
    success_prob: float


@dataclass
class SimState:
    roster: list[Worker]
    q: list[int]
    next_return: dict[int, list[int]] = field(default_factory=dict)
    in_flight: list[InFlight] = field(default_factory=list)
    clamped: int = 0

    def clone(self) -> "SimState":
        return SimState(
            roster=[
                Worker(w.id, w.skill, w.history, w.presence, w.busy_until) for w in self.roster
            ],
            q=list(self.q),
            next_return={t: list(ids) for t, ids in self.next_return.items()},
            in_flight=[
                InFlight(f.complete_step, f.task_type, f.member_ids, f.success_prob)
                for f in self.in_flight
            ],
            clamped=self.clamped,
        )


@dataclass
class StepLedger:
    t: int
    q_before: list[int]
    q_after: list[int]
    available_gain: list[int]
    expected_demand: list[float]
    realized_demand: list[int]
    served_demand: list[int]
    plan: MobilizationPlan
    teams: list[Team]
    completions: list[tuple[int, tuple[int, ...], bool]]  # (task type, member ids, success)
    delta: float
    realized_revenue: float
    lyapunov: float
    clamped_events: int


@dataclass
class SimulationTrace:
    header: dict
    steps: list[StepLedger]
    final_workers: list[dict]
    clamped_total: int


def init_state(cfg: MarketConfig) -> SimState:
    roster: list[Worker] = []
    for spec in cfg.initial_workers:
        roster.append(
            Worker(
                id=len(roster),
                skill=spec.skill,
                history=RatingHistory(spec.successes, spec.failures),
                presence=LOGGED_IN if spec.logged_in else OFFLINE,
            )
        )
    q = [0] * cfg.skills
    for w in roster:
        if w.presence == LOGGED_IN:
            q[w.skill] += 1
    return SimState(roster=roster, q=q)


def snapshot_queues(roster, skills: int, epsilon: float) -> SkillQueueState:
    """Live per-skill counts derived from the roster."""
    q = [0] * skills
    logged_in = [0] * skills
    offline_eligible = [0] * skills
    for w in roster:
        if w.presence == LOGGED_IN:
            q[w.skill] += 1
            if worker_reliability(w) >= epsilon:
                logged_in[w.skill] += 1
        elif w.presence == OFFLINE and worker_reliability(w) >= epsilon:
            offline_eligible[w.skill] += 1
    return SkillQueueState(tuple(q), tuple(logged_in), tuple(offline_eligible))


def step_profit(served_flags, expected_demands, prices, cost: float) -> float:
    """Expected step profit: served-type demand revenue minus the scored
    recruitment cost."""
    return sum(d * f * p for d, f, p in zip(served_flags, expected_demands, prices)) - cost


def begin_step(sim: SimState, cfg: MarketConfig, rng, t: int):
    """Phases 1-2: returns, arrivals, and demand realization (mutates sim)."""
    gain = [0] * cfg.skills
    for wid in sim.next_return.pop(t, []):
        w = sim.roster[wid]
        w.presence = LOGGED_IN
        w.busy_until = None
        gain[w.skill] += 1
    for m in range(cfg.skills):
        if cfg.arrival_schedule is not None:
            count = cfg.arrival_schedule[t][m]
        else:
            count = int(rng.poisson(cfg.arrival_rates[m]))
        for _ in range(count):
            sim.roster.append(Worker(id=len(sim.roster), skill=m, presence=LOGGED_IN))
            gain[m] += 1

    snapshot = snapshot_queues(sim.roster, cfg.skills, cfg.epsilon)
    pool_rels = pool_reliabilities(sim.roster, cfg.skills, cfg.epsilon)
    params = DemandParams(cfg.alpha1, cfg.alpha2, cfg.alpha3, cfg.demand_form)
    expected: list[float] = []
    realized: list[int] = []
    for spec in cfg.task_types:
        rel = task_reliability_with_fallback(spec, pool_rels)
        if cfg.demand_form == "linearized_eq12":
            raw = linearized_demand_raw(spec.price, rel, spec.positive_ratings, params)
            if raw < 0:
                sim.clamped += 1
            fk = max(0.0, raw)
        else:
            fk = expected_demand(spec.price, rel, spec.positive_ratings, params)
        expected.append(fk)
        realized.append(realize_demand(fk, spec.demand_cap, cfg.demand_mode, rng))
    batch = TaskRequestBatch(
        demand=tuple(realized),
        prices=tuple(spec.price for spec in cfg.task_types),
        budget=budget_at(cfg, t),
    )
    return gain, snapshot, expected, batch


def finish_step(
    sim: SimState,
    cfg: MarketConfig,
    rng,
    t: int,
    gain,
    snapshot: SkillQueueState,
    expected,
    batch: TaskRequestBatch,
    plan: MobilizationPlan,
    check: bool = False,
) -> StepLedger:
    """Phases 3-6 once the plan is fixed (mutates sim)."""
    q_before = list(sim.q)
    clamped_before = sim.clamped

    for m, ids in enumerate(plan.mobilized_ids):
        for wid in ids:
            w = sim.roster[wid]
            assert w.presence == OFFLINE, "plan mobilized a worker who is not offline"
            w.presence = LOGGED_IN

    teams = assemble_teams(plan, sim.roster, batch, cfg)
    consumed = [0] * cfg.skills
    for team in teams.teams:
        spec = cfg.task_types[team.task_type]
        prob = sum(worker_reliability(sim.roster[wid]) for wid, _ in team.members) / len(team.members)
        done_at = t + spec.service_time
        for wid, m in team.members:
            w = sim.roster[wid]
            assert w.presence == LOGGED_IN, "teamed a worker who is not available"
            w.presence = BUSY
            w.busy_until = done_at
            consumed[m] += 1
            sim.next_return.setdefault(done_at, []).append(wid)
        sim.in_flight.append(InFlight(done_at - 1, team.task_type, tuple(w for w, _ in team.members), prob))

    still_running: list[InFlight] = []
    completions: list[tuple[int, tuple[int, ...], bool]] = []
    for task in sim.in_flight:
        if task.complete_step != t:
            still_running.append(task)
            continue
        if cfg.outcome_mode == "always_success":
            success = True
        else:
            success = bool(rng.random() < task.success_prob)
        for wid in task.member_ids:
            record_outcome(sim.roster[wid], success)
        completions.append((task.task_type, task.member_ids, success))
    sim.in_flight = still_running

    q_after = [
        q_before[m] + gain[m] + plan.mobilized_counts[m] - consumed[m] for m in range(cfg.skills)
    ]
    sim.q = list(q_after)
    if check:
        observed = snapshot_queues(sim.roster, cfg.skills, cfg.epsilon).q
        assert tuple(q_after) == observed, f"queue law bookkeeping diverged at t={t}"

    served_demand = [plan.served[k] * batch.demand[k] for k in range(len(cfg.task_types))]
    delta = step_profit(plan.served, expected, batch.prices, plan.scored_cost)
    revenue = sum(served_demand[k] * batch.prices[k] for k in range(len(cfg.task_types)))
    return StepLedger(
        t=t,
        q_before=q_before,
        q_after=q_after,
        available_gain=list(gain),
        expected_demand=list(expected),
        realized_demand=list(batch.demand),
        served_demand=served_demand,
        plan=plan,
        teams=teams.teams,
        completions=completions,
        delta=delta,
        realized_revenue=revenue,
        lyapunov=lyapunov_value(q_before),
        clamped_events=sim.clamped - clamped_before,
    )


def step(sim: SimState, cfg: MarketConfig, rng, t: int, policy, check: bool = False) -> StepLedger:
    gain, snapshot, expected, batch = begin_step(sim, cfg, rng, t)
    plan = policy(snapshot, sim.roster, batch, cfg, rng)
    return finish_step(sim, cfg, rng, t, gain, snapshot, expected, batch, plan, check=check)


def crowdasm_policy(snapshot, roster, batch, cfg, rng) -> MobilizationPlan:
    return plan_mobilization(snapshot, roster, batch, cfg)


def resolve_policy(policy):
    if callable(policy):
        return policy
    if policy == "crowdasm":
        return crowdasm_policy
    if policy in ("never", "max", "random"):
        from .oracle import baseline_policy

        return baseline_policy(policy)
    if policy == "oracle-step":
        from .oracle import oracle_step_policy

        return oracle_step_policy
    raise UnknownPolicy(f"unknown policy {policy!r}")


def worker_to_dict(w: Worker) -> dict:
    return {
        "id": w.id,
        "skill": w.skill,
        "successes": w.history.successes,
        "failures": w.history.failures,
        "presence": w.presence,
        "busy_until": w.busy_until,
    }


def run(cfg, policy="crowdasm", check: bool = False) -> SimulationTrace:
    """Run one scenario to its horizon under the named policy."""
    cfg = validate_config(cfg)
    policy_name = policy if isinstance(policy, str) else getattr(policy, "__name__", "custom")
    policy_fn = resolve_policy(policy)
    rng = np.random.default_rng(cfg.seed)
    sim = init_state(cfg)
    header = {
        "config": config_to_dict(cfg),
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "policy": policy_name,
        "demand_form": cfg.demand_form,
        "demand_mode": cfg.demand_mode,
        "horizon": cfg.horizon,
    }
    steps = [step(sim, cfg, rng, t, policy_fn, check=check) for t in range(cfg.horizon)]
    return SimulationTrace(
        header=header,
        steps=steps,
        final_workers=[worker_to_dict(w) for w in sim.roster],
        clamped_total=sim.clamped,
    )


def trace_to_dict(trace: SimulationTrace) -> dict:
    return {
        "header": trace.header,
        "clamped_total": trace.clamped_total,
        "steps": [
            {
                "t": s.t,
                "q_before": s.q_before,
                "q_after": s.q_after,
                "available_gain": s.available_gain,
                "expected_demand": s.expected_demand,
                "realized_demand": s.realized_demand,
                "served_demand": s.served_demand,
                "plan": {
                    "mobilized_counts": s.plan.mobilized_counts,
                    "served": s.plan.served,
                    "mobilized_ids": s.plan.mobilized_ids,
                    "total_spend": s.plan.total_spend,
                    "scored_cost": s.plan.scored_cost,
                    "objective": s.plan.objective,
                    "scores": s.plan.scores,
                    "order": s.plan.order,
                    "explanations": s.plan.explanations,
                },
                "teams": [{"task_type": tm.task_type, "members": [list(p) for p in tm.members]} for tm in s.teams],
                "completions": [
                    {"task_type": k, "member_ids": list(ids), "success": ok} for k, ids, ok in s.completions
                ],
                "delta": s.delta,
                "realized_revenue": s.realized_revenue,
                "lyapunov": s.lyapunov,
                "clamped_events": s.clamped_events,
            }
            for s in trace.steps
        ],
        "final_workers": trace.final_workers,
    }


def trace_from_dict(data: dict) -> SimulationTrace:
    steps = []
    for s in data["steps"]:
        plan = MobilizationPlan(
            mobilized_counts=list(s["plan"]["mobilized_counts"]),
            served=list(s["plan"]["served"]),
            mobilized_ids=[list(ids) for ids in s["plan"]["mobilized_ids"]],
            total_spend=s["plan"]["total_spend"],
            scored_cost=s["plan"]["scored_cost"],
            objective=s["plan"]["objective"],
            scores=list(s["plan"]["scores"]),
            order=list(s["plan"]["order"]),
            explanations=list(s["plan"]["explanations"]),
        )
        teams = [Team(tm["task_type"], tuple(tuple(p) for p in tm["members"])) for tm in s["teams"]]
        completions = [
            (c["task_type"], tuple(c["member_ids"]), bool(c["success"])) for c in s["completions"]
        ]
        steps.append(
            StepLedger(
                t=s["t"],
                q_before=list(s["q_before"]),
                q_after=list(s["q_after"]),
                available_gain=list(s["available_gain"]),
                expected_demand=list(s["expected_demand"]),
                realized_demand=list(s["realized_demand"]),
                served_demand=list(s["served_demand"]),
                plan=plan,
                teams=teams,
                completions=completions,
                delta=s["delta"],
                realized_revenue=s["realized_revenue"],
                lyapunov=s["lyapunov"],
                clamped_events=s["clamped_events"],
            )
        )
    return SimulationTrace(
        header=data["header"],
        steps=steps,
        final_workers=list(data["final_workers"]),
        clamped_total=data["clamped_total"],
    )


def trace_json(trace: SimulationTrace) -> str:
    return json.dumps(trace_to_dict(trace), sort_keys=True, indent=2)
