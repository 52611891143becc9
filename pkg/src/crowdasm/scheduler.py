"""Per-step team-assembly controller.

Each step the controller scores every skill by queue length minus the
weighted per-worker recruitment cost, processes task types in ascending
order of their requirement-weighted score sums, and recruits offline
workers to cover per-type staffing shortfalls subject to the per-skill
recruitment cap, the reliability threshold, and the step budget. Service
is all-or-nothing per type: a type is either fully staffed for all of its
requested tasks or not served at all, in which case its tentative
recruitment is rolled back (configurable).
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import MarketConfig, SkillQueueState
from .errors import DomainError, InternalInconsistency, MissingReliability
from .reputation import (
    LOGGED_IN,
    Worker,
    eligible_offline_workers,
    pool_reliabilities,
    worker_reliability,
)


@dataclass(frozen=True)
class TaskRequestBatch:
    """Realized per-type request counts, prices, and the step budget."""

    demand: tuple[int, ...]
    prices: tuple[float, ...]
    budget: float


@dataclass
class MobilizationPlan:
    mobilized_counts: list[int]
    served: list[int]
    mobilized_ids: list[list[int]]
    total_spend: float
    scored_cost: float
    objective: float
    scores: list[float]
    order: list[int]
    explanations: list[str]


@dataclass(frozen=True)
class Team:
    task_type: int
    members: tuple[tuple[int, int], ...]  # (worker id, skill)


@dataclass
class TeamAssignment:
    teams: list[Team]


def mobilization_score(queue_length: int, rho: float, cost: float, pool_rel: float) -> float:
    """Per-skill recruitment score; lower scores are recruited earlier."""
    if not 0 < pool_rel < 1:
        raise DomainError(f"pool reliability must lie in (0, 1), got {pool_rel}")
    return queue_length - rho * cost / pool_rel


def effective_scores(state: SkillQueueState, cfg: MarketConfig, pool_rels) -> list[float]:
    """Scores for every skill; when a skill has no usable offline pool the
    cost term is dropped (no recruitment is possible there anyway)."""
    scores = []
    for m in range(cfg.skills):
        r = pool_rels[m]
        if r is None:
            scores.append(float(state.q[m]))
        else:
            scores.append(mobilization_score(state.q[m], cfg.rho, cfg.mobilization_cost[m], r))
    return scores


def mobilization_cost(counts, costs, pool_rels) -> float:
    """Reliability-weighted recruitment cost: sum of cost*count/pool_rel."""
    total = 0.0
    for m, a in enumerate(counts):
        if a == 0:
            continue
        if pool_rels[m] is None:
            raise MissingReliability(f"skill {m} mobilized {a} workers but has no usable offline pool")
        total += costs[m] * a / pool_rels[m]
    return total


def sort_task_requests(batch: TaskRequestBatch, scores, requirements) -> list[int]:
    """Task types in ascending order of requirement-weighted score sums,
    ties broken by ascending type id."""
    keyed = []
    for k, req in enumerate(requirements):
        key = sum(n * scores[m] for m, n in enumerate(req))
        keyed.append((key, k))
    keyed.sort()
    return [k for _, k in keyed]


def plan_mobilization(
    state: SkillQueueState, roster, batch: TaskRequestBatch, cfg: MarketConfig
) -> MobilizationPlan:
    """Build the step's recruitment-and-service plan over an immutable snapshot."""
    skills = cfg.skills
    pool_rels = pool_reliabilities(roster, skills, cfg.epsilon)
    scores = effective_scores(state, cfg, pool_rels)
    requirements = [t.requirements for t in cfg.task_types]
    order = sort_task_requests(batch, scores, requirements)

    pools = eligible_offline_workers(roster, skills, cfg.epsilon)
    cursor = [0] * skills
    capacity = list(state.logged_in)
    counts = [0] * skills
    chosen: list[list[int]] = [[] for _ in range(skills)]
    spent = 0.0
    served = [0] * len(cfg.task_types)
    notes: list[str] = []

    for k in order:
        spec = cfg.task_types[k]
        requested = batch.demand[k]
        if requested == 0:
            notes.append(f"type {k}: no requests this step")
            continue

        capacity_before = list(capacity)
        counts_before = list(counts)
        cursor_before = list(cursor)
        spent_before = spent
        tentative: list[tuple[int, list[int]]] = []

        for m, n in enumerate(spec.requirements):
            if n == 0:
                continue
            need = n * requested
            shortfall = max(0, need - capacity[m])
            picked: list[int] = []
            pool = pools[m]
            unit = cfg.mobilization_cost[m]
            while (
                capacity[m] < need
                and counts[m] < cfg.mobilization_cap[m]
                and cursor[m] < len(pool)
                and spent + unit <= batch.budget
            ):
                picked.append(pool[cursor[m]].id)
                cursor[m] += 1
                counts[m] += 1
                capacity[m] += 1
                spent += unit
            tentative.append((m, picked))
            notes.append(
                f"type {k} skill {m}: score={scores[m]:.6g} need={need} "
                f"shortfall={shortfall} mobilized={len(picked)} spent={len(picked) * unit:.6g}"
            )

        covered = all(capacity[m] >= n * requested for m, n in enumerate(spec.requirements) if n > 0)
        if covered:
            served[k] = 1
            for m, n in enumerate(spec.requirements):
                if n:
                    capacity[m] -= n * requested
            for m, ids in tentative:
                chosen[m].extend(ids)
            notes.append(f"type {k}: served {requested} task(s)")
        else:
            served[k] = 0
            if cfg.rollback_infeasible:
                capacity[:] = capacity_before
                counts[:] = counts_before
                cursor[:] = cursor_before
                spent = spent_before
                notes.append(f"type {k}: cannot be fully staffed, recruitment rolled back")
            else:
                for m, ids in tentative:
                    chosen[m].extend(ids)
                notes.append(f"type {k}: cannot be fully staffed, recruitment kept")

    scored = mobilization_cost(counts, cfg.mobilization_cost, pool_rels)
    objective = sum(counts[m] * scores[m] for m in range(skills))
    total_spend = sum(cfg.mobilization_cost[m] * counts[m] for m in range(skills))
    return MobilizationPlan(
        mobilized_counts=counts,
        served=served,
        mobilized_ids=chosen,
        total_spend=total_spend,
        scored_cost=scored,
        objective=objective,
        scores=scores,
        order=order,
        explanations=notes,
    )


def plan_with_fixed_mobilization(
    state: SkillQueueState,
    roster,
    batch: TaskRequestBatch,
    cfg: MarketConfig,
    desired_counts,
    serve_only=None,
) -> MobilizationPlan:
    """Plan for policies that pick recruitment counts up front.

    Recruits up to ``desired_counts`` per skill (clipped by the per-skill cap,
    the eligible offline supply, and the shared budget, filling skills in
    ascending order), then allocates capacity to task types greedily in score
    order. With ``serve_only`` the plan serves exactly that set of types and
    raises if the recruited capacity cannot cover it.
    """
    skills = cfg.skills
    pool_rels = pool_reliabilities(roster, skills, cfg.epsilon)
    scores = effective_scores(state, cfg, pool_rels)
    requirements = [t.requirements for t in cfg.task_types]
    order = sort_task_requests(batch, scores, requirements)

    pools = eligible_offline_workers(roster, skills, cfg.epsilon)
    counts = [0] * skills
    chosen: list[list[int]] = [[] for _ in range(skills)]
    spent = 0.0
    for m in range(skills):
        want = min(desired_counts[m], cfg.mobilization_cap[m], len(pools[m]))
        unit = cfg.mobilization_cost[m]
        while counts[m] < want and spent + unit <= batch.budget:
            chosen[m].append(pools[m][counts[m]].id)
            counts[m] += 1
            spent += unit

    capacity = [state.logged_in[m] + counts[m] for m in range(skills)]
    served = [0] * len(cfg.task_types)
    notes: list[str] = []
    for k in order:
        spec = cfg.task_types[k]
        requested = batch.demand[k]
        if requested == 0:
            continue
        if serve_only is not None and k not in serve_only:
            notes.append(f"type {k}: skipped by policy")
            continue
        coverable = all(capacity[m] >= n * requested for m, n in enumerate(spec.requirements) if n > 0)
        if not coverable:
            if serve_only is not None:
                raise InternalInconsistency(f"forced service of type {k} exceeds recruited capacity")
            notes.append(f"type {k}: cannot be fully staffed")
            continue
        served[k] = 1
        for m, n in enumerate(spec.requirements):
            if n:
                capacity[m] -= n * requested
        notes.append(f"type {k}: served {requested} task(s)")

    scored = mobilization_cost(counts, cfg.mobilization_cost, pool_rels)
    objective = sum(counts[m] * scores[m] for m in range(skills))
    total_spend = sum(cfg.mobilization_cost[m] * counts[m] for m in range(skills))
    return MobilizationPlan(
        mobilized_counts=counts,
        served=served,
        mobilized_ids=chosen,
        total_spend=total_spend,
        scored_cost=scored,
        objective=objective,
        scores=scores,
        order=order,
        explanations=notes,
    )


def assemble_teams(plan: MobilizationPlan, roster, batch: TaskRequestBatch, cfg: MarketConfig) -> TeamAssignment:
    """Assign concrete workers to every served task.

    Workers recruited this step must already be marked available. Within a
    skill, workers who were already logged in are used before newly recruited
    ones, best reliability first, ties by ascending id.
    """
    mobilized = {wid for ids in plan.mobilized_ids for wid in ids}
    pools: list[list[Worker]] = [[] for _ in range(cfg.skills)]
    for w in roster:
        if w.presence == LOGGED_IN and worker_reliability(w) >= cfg.epsilon:
            pools[w.skill].append(w)
    for pool in pools:
        pool.sort(key=lambda w: (w.id in mobilized, -worker_reliability(w), w.id))

    position = [0] * cfg.skills
    teams: list[Team] = []
    for k in plan.order:
        if not plan.served[k] or batch.demand[k] == 0:
            continue
        spec = cfg.task_types[k]
        for _ in range(batch.demand[k]):
            members: list[tuple[int, int]] = []
            for m, n in enumerate(spec.requirements):
                for _ in range(n):
                    if position[m] >= len(pools[m]):
                        raise InternalInconsistency(
                            f"plan marked type {k} served but skill {m} ran out of workers"
                        )
                    members.append((pools[m][position[m]].id, m))
                    position[m] += 1
            teams.append(Team(task_type=k, members=tuple(members)))
    return TeamAssignment(teams=teams)
