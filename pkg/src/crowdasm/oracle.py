"""Ground-truth references: exhaustive per-step minimizer, horizon-exhaustive
profit optimum on scripted scenarios, and baseline policies.

The per-step search enumerates every recruitment vector within the caps,
the eligible offline supply, and the budget, and keeps only vectors that
are exactly the staffing shortfall of some fully servable set of task
types (recruiting beyond a shortfall is not part of the service
semantics). The horizon search instead allows any feasible recruitment
vector per step, so its optimum dominates every policy in this package.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .config import MarketConfig, budget_at, validate_config
from .errors import SearchSpaceTooLarge, UnknownPolicy, UnservableSet
from .reputation import eligible_offline_workers, pool_reliabilities
from .scheduler import effective_scores, plan_with_fixed_mobilization


@dataclass(frozen=True)
class OracleResult:
    best_counts: tuple[int, ...]
    best_objective: float
    evaluated_count: int
    served_set: tuple[int, ...]  # served flag per task type


def _served_requirement(cfg: MarketConfig, batch, members) -> list[int]:
    need = [0] * cfg.skills
    for k in members:
        spec = cfg.task_types[k]
        for m, n in enumerate(spec.requirements):
            need[m] += n * batch.demand[k]
    return need


def brute_force_mobilization(state, roster, batch, cfg: MarketConfig, require_set=None) -> OracleResult:
    """Exhaustive minimizer of the recruitment objective sum(a_m * score_m).

    With ``require_set`` the search is restricted to candidates whose served
    set covers the given task types; otherwise the global minimum over all
    achievable served sets is returned. Ties prefer the lexicographically
    smallest recruitment vector, then the largest served set.
    """
    space = 1
    for cap in cfg.mobilization_cap:
        space *= cap + 1
    if space > 10**6:
        raise SearchSpaceTooLarge(f"recruitment space {space} exceeds 1e6")

    skills = cfg.skills
    pool_rels = pool_reliabilities(roster, skills, cfg.epsilon)
    scores = effective_scores(state, cfg, pool_rels)
    pools = eligible_offline_workers(roster, skills, cfg.epsilon)
    bounds = [min(cfg.mobilization_cap[m], len(pools[m])) for m in range(skills)]
    costs = cfg.mobilization_cost

    demanded = [k for k in range(len(cfg.task_types)) if batch.demand[k] > 0]
    required = set() if require_set is None else {k for k in require_set if batch.demand[k] > 0}

    # Candidate subsets, largest first so ties keep maximal coverage.
    subsets = sorted(
        (frozenset(c) for r in range(len(demanded) + 1) for c in itertools.combinations(demanded, r)),
        key=lambda s: (-len(s), tuple(sorted(s))),
    )
    needs = {s: _served_requirement(cfg, batch, s) for s in subsets}

    best_counts: tuple[int, ...] | None = None
    best_obj = math.inf
    best_served: tuple[int, ...] = ()
    evaluated = 0
    for counts in itertools.product(*(range(b + 1) for b in bounds)):
        if sum(c * a for c, a in zip(costs, counts)) > batch.budget:
            continue
        evaluated += 1
        for s in subsets:
            if required and not required <= s:
                continue
            need = needs[s]
            consistent = all(
                (need[m] == state.logged_in[m] + counts[m]) if counts[m] > 0 else (need[m] <= state.logged_in[m])
                for m in range(skills)
            )
            if not consistent:
                continue
            obj = sum(counts[m] * scores[m] for m in range(skills))
            if obj < best_obj:
                best_obj = obj
                best_counts = counts
                best_served = tuple(1 if k in s else 0 for k in range(len(cfg.task_types)))
            break  # first consistent subset is the largest for this vector

    if best_counts is None:
        raise UnservableSet(f"no feasible recruitment serves the required set {sorted(required)}")
    return OracleResult(
        best_counts=best_counts,
        best_objective=best_obj,
        evaluated_count=evaluated,
        served_set=best_served,
    )


def horizon_optimal_profit(cfg) -> float:
    """Maximal time-averaged profit over every feasible recruitment-and-service
    sequence of a scripted deterministic scenario (exhaustive search).

    Requires deterministic demand, a scripted arrival sequence, and
    deterministic task outcomes so each action sequence yields exactly one
    trajectory.
    """
    from .simulator import begin_step, finish_step, init_state

    cfg = validate_config(cfg)
    if cfg.demand_mode != "deterministic":
        raise SearchSpaceTooLarge("horizon search requires deterministic demand")
    if cfg.arrival_schedule is None:
        raise SearchSpaceTooLarge("horizon search requires a scripted arrival sequence")
    if cfg.outcome_mode != "always_success":
        raise SearchSpaceTooLarge("horizon search requires deterministic task outcomes")
    if cfg.horizon < 1 or cfg.horizon > 8:
        raise SearchSpaceTooLarge(f"horizon {cfg.horizon} outside the supported range 1..8")

    branching = 2 ** len(cfg.task_types)
    for cap in cfg.mobilization_cap:
        branching *= cap + 1
    if branching**cfg.horizon > 10**7:
        raise SearchSpaceTooLarge(f"sequence space {branching}**{cfg.horizon} exceeds 1e7")

    tau = cfg.horizon
    best = -math.inf

    def explore(sim, t: int, acc: float) -> None:
        nonlocal best
        if t == tau:
            best = max(best, acc / tau)
            return
        probe = sim.clone()
        gain, snapshot, expected, batch = begin_step(probe, cfg, None, t)
        pools = eligible_offline_workers(probe.roster, cfg.skills, cfg.epsilon)
        bounds = [min(cfg.mobilization_cap[m], len(pools[m])) for m in range(cfg.skills)]
        demanded = [k for k in range(len(cfg.task_types)) if batch.demand[k] > 0]
        for counts in itertools.product(*(range(b + 1) for b in bounds)):
            spend = sum(c * a for c, a in zip(cfg.mobilization_cost, counts))
            if spend > batch.budget:
                continue
            capacity = [snapshot.logged_in[m] + counts[m] for m in range(cfg.skills)]
            for r in range(len(demanded) + 1):
                for chosen in itertools.combinations(demanded, r):
                    feasible = all(
                        capacity[m] >= sum(cfg.task_types[k].requirements[m] * batch.demand[k] for k in chosen)
                        for m in range(cfg.skills)
                    )
                    if not feasible:
                        continue
                    branch = sim.clone()
                    b_gain, b_snapshot, b_expected, b_batch = begin_step(branch, cfg, None, t)
                    plan = plan_with_fixed_mobilization(
                        b_snapshot, branch.roster, b_batch, cfg, counts, serve_only=set(chosen)
                    )
                    ledger = finish_step(
                        branch, cfg, None, t, b_gain, b_snapshot, b_expected, b_batch, plan
                    )
                    explore(branch, t + 1, acc + ledger.delta)

    explore(init_state(cfg), 0, 0.0)
    return best


def baseline_policy(name: str):
    """Comparator policies: never recruit, recruit to the caps, or recruit a
    uniformly random feasible vector."""

    if name == "never":

        def never(snapshot, roster, batch, cfg, rng):
            return plan_with_fixed_mobilization(snapshot, roster, batch, cfg, [0] * cfg.skills)

        return never

    if name == "max":

        def max_policy(snapshot, roster, batch, cfg, rng):
            return plan_with_fixed_mobilization(snapshot, roster, batch, cfg, list(cfg.mobilization_cap))

        return max_policy

    if name == "random":

        def random_policy(snapshot, roster, batch, cfg, rng):
            pools = eligible_offline_workers(roster, cfg.skills, cfg.epsilon)
            bounds = [min(cfg.mobilization_cap[m], len(pools[m])) for m in range(cfg.skills)]
            counts = [0] * cfg.skills
            for _ in range(1000):
                draw = [int(rng.integers(0, b + 1)) for b in bounds]
                if sum(c * a for c, a in zip(cfg.mobilization_cost, draw)) <= batch.budget:
                    counts = draw
                    break
            return plan_with_fixed_mobilization(snapshot, roster, batch, cfg, counts)

        return random_policy

    raise UnknownPolicy(f"unknown baseline policy {name!r}")


def oracle_step_policy(snapshot, roster, batch, cfg, rng):
    """Enacts the per-step exhaustive minimizer's recruitment vector."""
    result = brute_force_mobilization(snapshot, roster, batch, cfg)
    return plan_with_fixed_mobilization(snapshot, roster, batch, cfg, list(result.best_counts))
