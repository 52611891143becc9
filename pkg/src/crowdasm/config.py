"""Scenario configuration: core types, strict validation, and derived capacity constants.

A scenario is a single JSON document whose keys match the ``MarketConfig``
field names exactly (snake_case). Unknown keys are a hard error so typos
cannot silently change an experiment.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .errors import ConfigError, ConfigIssue, LengthMismatch

DEMAND_MODES = ("deterministic", "poisson")
DEMAND_FORMS = ("exact_eq5", "linearized_eq12")
OUTCOME_MODES = ("reputation_bernoulli", "always_success")

# Skills are dense integer indices 0..skills-1.
SkillId = int


@dataclass(frozen=True)
class TaskTypeSpec:
    """One task type: per-skill head-count requirements and market parameters."""

    id: int
    requirements: tuple[int, ...]
    price: float
    demand_cap: int
    positive_ratings: int
    service_time: int = 1


@dataclass(frozen=True)
class WorkerSpec:
    """Initial-roster entry: one worker with a seeded rating history."""

    skill: int
    successes: int = 0
    failures: int = 0
    logged_in: bool = False


@dataclass(frozen=True)
class MarketConfig:
    skills: int
    task_types: tuple[TaskTypeSpec, ...]
    alpha1: float
    alpha2: float
    alpha3: float
    epsilon: float
    rho: float
    mobilization_cost: tuple[float, ...]
    mobilization_cap: tuple[int, ...]
    budget_per_step: float | tuple[float, ...]
    arrival_rates: tuple[float, ...]
    horizon: int
    seed: int
    demand_mode: str = "deterministic"
    demand_form: str = "exact_eq5"
    initial_workers: tuple[WorkerSpec, ...] = ()
    arrival_schedule: tuple[tuple[int, ...], ...] | None = None
    outcome_mode: str = "reputation_bernoulli"
    rollback_infeasible: bool = True


@dataclass(frozen=True)
class SkillQueueState:
    """Per-skill worker counts at a decision point.

    ``q`` counts every available (logged-in, not busy) worker; ``logged_in``
    counts only the available workers at or above the reliability threshold;
    ``offline_eligible`` counts offline workers at or above the threshold.
    """

    q: tuple[int, ...]
    logged_in: tuple[int, ...]
    offline_eligible: tuple[int, ...]


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_num(x) -> bool:
    return _is_int(x) or isinstance(x, float)


def _finite(x) -> bool:
    return _is_num(x) and math.isfinite(x)


def _field_names(cls) -> set[str]:
    return {f.name for f in fields(cls)}


def _check_unknown_keys(raw: dict, cls, where: str, issues: list[ConfigIssue]) -> None:
    extra = set(raw) - _field_names(cls)
    for key in sorted(extra):
        issues.append(ConfigIssue("UnknownKey", f"{where}: unknown key {key!r}"))


def _coerce_task_type(raw, index: int, skills: int, issues: list[ConfigIssue]) -> TaskTypeSpec | None:
    if isinstance(raw, TaskTypeSpec):
        raw = asdict(raw)
    if not isinstance(raw, dict):
        issues.append(ConfigIssue("BadTaskType", f"task_types[{index}] is not an object"))
        return None
    _check_unknown_keys(raw, TaskTypeSpec, f"task_types[{index}]", issues)
    ok = True

    tid = raw.get("id")
    if not _is_int(tid) or tid != index:
        issues.append(ConfigIssue("BadTaskTypeId", f"task_types[{index}].id must equal {index}"))
        ok = False
    req = raw.get("requirements")
    if not isinstance(req, (list, tuple)) or len(req) != skills or not all(_is_int(n) and n >= 0 for n in req):
        issues.append(
            ConfigIssue(
                "BadRequirements",
                f"task_types[{index}].requirements must be {skills} non-negative integers",
            )
        )
        ok = False
    elif not any(n > 0 for n in req):
        issues.append(ConfigIssue("EmptyRequirements", f"task_types[{index}] requires no workers of any skill"))
        ok = False
    price = raw.get("price")
    if not _finite(price) or price <= 0:
        issues.append(ConfigIssue("NegativePrice", f"task_types[{index}].price must be > 0"))
        ok = False
    cap = raw.get("demand_cap")
    if not _is_int(cap) or cap < 0:
        issues.append(ConfigIssue("BadDemandCap", f"task_types[{index}].demand_cap must be an integer >= 0"))
        ok = False
    npos = raw.get("positive_ratings")
    if not _is_int(npos) or npos < 1:
        issues.append(ConfigIssue("BadPositiveRatings", f"task_types[{index}].positive_ratings must be an integer >= 1"))
        ok = False
    st = raw.get("service_time", 1)
    if not _is_int(st) or st < 1:
        issues.append(ConfigIssue("BadServiceTime", f"task_types[{index}].service_time must be an integer >= 1"))
        ok = False
    if not ok:
        return None
    return TaskTypeSpec(
        id=tid,
        requirements=tuple(int(n) for n in req),
        price=float(price),
        demand_cap=int(cap),
        positive_ratings=int(npos),
        service_time=int(st),
    )


def _coerce_worker(raw, index: int, skills: int, issues: list[ConfigIssue]) -> WorkerSpec | None:
    if isinstance(raw, WorkerSpec):
        raw = asdict(raw)
    if not isinstance(raw, dict):
        issues.append(ConfigIssue("BadWorkerSpec", f"initial_workers[{index}] is not an object"))
        return None
    _check_unknown_keys(raw, WorkerSpec, f"initial_workers[{index}]", issues)
    skill = raw.get("skill")
    succ = raw.get("successes", 0)
    fail = raw.get("failures", 0)
    logged = raw.get("logged_in", False)
    if (
        not _is_int(skill)
        or not 0 <= skill < skills
        or not _is_int(succ)
        or succ < 0
        or not _is_int(fail)
        or fail < 0
        or not isinstance(logged, bool)
    ):
        issues.append(ConfigIssue("BadWorkerSpec", f"initial_workers[{index}] has invalid fields"))
        return None
    return WorkerSpec(skill=skill, successes=succ, failures=fail, logged_in=logged)


def validate_config(raw) -> MarketConfig:
    """Validate a raw scenario (dict or MarketConfig) and return the typed config.

    Raises ConfigError listing every violated invariant. Validating an
    already-valid MarketConfig returns it unchanged.
    """
    if isinstance(raw, MarketConfig):
        validate_config(config_to_dict(raw))
        return raw
    if not isinstance(raw, dict):
        raise ConfigError([ConfigIssue("BadScenario", "scenario must be a JSON object")])

    issues: list[ConfigIssue] = []
    _check_unknown_keys(raw, MarketConfig, "scenario", issues)

    skills = raw.get("skills")
    if not _is_int(skills) or skills < 1:
        issues.append(ConfigIssue("BadSkillCount", "skills must be an integer >= 1"))
        raise ConfigError(issues)

    raw_types = raw.get("task_types")
    task_types: list[TaskTypeSpec] = []
    if not isinstance(raw_types, (list, tuple)) or not raw_types:
        issues.append(ConfigIssue("BadTaskTypes", "task_types must be a non-empty list"))
    else:
        for i, entry in enumerate(raw_types):
            spec = _coerce_task_type(entry, i, skills, issues)
            if spec is not None:
                task_types.append(spec)

    for name in ("alpha1", "alpha2", "alpha3"):
        if not _finite(raw.get(name)):
            issues.append(ConfigIssue("BadAlpha", f"{name} must be a finite number"))
    if _finite(raw.get("alpha2")) and raw["alpha2"] >= 0:
        issues.append(ConfigIssue("BadAlphaSigns", "alpha2 must be < 0"))
    if _finite(raw.get("alpha3")) and raw["alpha3"] <= 0:
        issues.append(ConfigIssue("BadAlphaSigns", "alpha3 must be > 0"))

    eps = raw.get("epsilon")
    if not _finite(eps) or not 0 < eps < 1:
        issues.append(ConfigIssue("BadEpsilon", "epsilon must lie strictly inside (0, 1)"))
    rho = raw.get("rho")
    if not _finite(rho) or rho <= 0:
        issues.append(ConfigIssue("NonPositiveRho", "rho must be > 0"))

    costs = raw.get("mobilization_cost")
    if not isinstance(costs, (list, tuple)) or len(costs) != skills or not all(_finite(c) and c > 0 for c in costs):
        issues.append(ConfigIssue("BadMobilizationCost", f"mobilization_cost must be {skills} numbers > 0"))
        costs = None
    caps = raw.get("mobilization_cap")
    if not isinstance(caps, (list, tuple)) or len(caps) != skills or not all(_is_int(c) and c >= 0 for c in caps):
        issues.append(ConfigIssue("BadMobilizationCap", f"mobilization_cap must be {skills} integers >= 0"))
        caps = None

    budget = raw.get("budget_per_step")
    if _finite(budget) and budget >= 0:
        budget_value: float | tuple[float, ...] = float(budget)
    elif isinstance(budget, (list, tuple)) and budget and all(_finite(b) and b >= 0 for b in budget):
        budget_value = tuple(float(b) for b in budget)
    else:
        issues.append(ConfigIssue("BadBudget", "budget_per_step must be a number >= 0 or a non-empty list of them"))
        budget_value = 0.0

    rates = raw.get("arrival_rates")
    if not isinstance(rates, (list, tuple)) or len(rates) != skills or not all(_finite(r) and r >= 0 for r in rates):
        issues.append(ConfigIssue("BadArrivalRates", f"arrival_rates must be {skills} numbers >= 0"))
        rates = None

    horizon = raw.get("horizon")
    if not _is_int(horizon) or horizon < 0:
        issues.append(ConfigIssue("BadHorizon", "horizon must be an integer >= 0"))
    seed = raw.get("seed")
    if not _is_int(seed) or not 0 <= seed < 2**64:
        issues.append(ConfigIssue("BadSeed", "seed must be an integer in [0, 2**64)"))

    mode = raw.get("demand_mode", "deterministic")
    if mode not in DEMAND_MODES:
        issues.append(ConfigIssue("BadDemandMode", f"demand_mode must be one of {DEMAND_MODES}"))
    form = raw.get("demand_form", "exact_eq5")
    if form not in DEMAND_FORMS:
        issues.append(ConfigIssue("BadDemandForm", f"demand_form must be one of {DEMAND_FORMS}"))
    outcome = raw.get("outcome_mode", "reputation_bernoulli")
    if outcome not in OUTCOME_MODES:
        issues.append(ConfigIssue("BadOutcomeMode", f"outcome_mode must be one of {OUTCOME_MODES}"))
    rollback = raw.get("rollback_infeasible", True)
    if not isinstance(rollback, bool):
        issues.append(ConfigIssue("BadRollbackFlag", "rollback_infeasible must be a boolean"))
        rollback = True

    workers: list[WorkerSpec] = []
    raw_workers = raw.get("initial_workers", ())
    if not isinstance(raw_workers, (list, tuple)):
        issues.append(ConfigIssue("BadWorkerSpec", "initial_workers must be a list"))
    else:
        for i, entry in enumerate(raw_workers):
            spec = _coerce_worker(entry, i, skills, issues)
            if spec is not None:
                workers.append(spec)

    schedule = raw.get("arrival_schedule")
    schedule_value: tuple[tuple[int, ...], ...] | None = None
    if schedule is not None:
        bad = not isinstance(schedule, (list, tuple)) or any(
            not isinstance(row, (list, tuple)) or len(row) != skills or not all(_is_int(n) and n >= 0 for n in row)
            for row in schedule
        )
        if bad:
            issues.append(
                ConfigIssue("BadArrivalSchedule", f"arrival_schedule rows must each hold {skills} integers >= 0")
            )
        elif _is_int(horizon) and len(schedule) < horizon:
            issues.append(ConfigIssue("BadArrivalSchedule", "arrival_schedule shorter than horizon"))
        else:
            schedule_value = tuple(tuple(int(n) for n in row) for row in schedule)

    if issues:
        raise ConfigError(issues)

    return MarketConfig(
        skills=skills,
        task_types=tuple(task_types),
        alpha1=float(raw["alpha1"]),
        alpha2=float(raw["alpha2"]),
        alpha3=float(raw["alpha3"]),
        epsilon=float(eps),
        rho=float(rho),
        mobilization_cost=tuple(float(c) for c in costs),
        mobilization_cap=tuple(int(c) for c in caps),
        budget_per_step=budget_value,
        arrival_rates=tuple(float(r) for r in rates),
        horizon=horizon,
        seed=seed,
        demand_mode=mode,
        demand_form=form,
        initial_workers=tuple(workers),
        arrival_schedule=schedule_value,
        outcome_mode=outcome,
        rollback_infeasible=rollback,
    )


def config_to_dict(cfg: MarketConfig) -> dict:
    """Plain-JSON form of a config, suitable for hashing and round-tripping."""
    d = asdict(cfg)
    d["task_types"] = [asdict(t) for t in cfg.task_types]
    d["initial_workers"] = [asdict(w) for w in cfg.initial_workers]
    if isinstance(cfg.budget_per_step, tuple):
        d["budget_per_step"] = list(cfg.budget_per_step)
    d["arrival_rates"] = list(cfg.arrival_rates)
    d["mobilization_cost"] = list(cfg.mobilization_cost)
    d["mobilization_cap"] = list(cfg.mobilization_cap)
    if cfg.arrival_schedule is not None:
        d["arrival_schedule"] = [list(row) for row in cfg.arrival_schedule]
    return d


def config_hash(cfg: MarketConfig) -> str:
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_config(path: str | Path) -> MarketConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return validate_config(json.load(fh))


def budget_at(cfg: MarketConfig, t: int) -> float:
    """Budget for step t; list schedules extend their last entry forever."""
    b = cfg.budget_per_step
    if isinstance(b, tuple):
        return b[min(t, len(b) - 1)]
    return b


def consumption_caps(task_types, skills: int) -> list[int]:
    """Per-skill ceiling on workers consumable in one step: sum over types of
    head-count times the type's demand cap."""
    caps = [0] * skills
    for spec in task_types:
        for m, n in enumerate(spec.requirements):
            caps[m] += n * spec.demand_cap
    return caps


def drift_slack(mobilization_caps, consumption_caps_) -> float:
    """Constant bounding the quadratic step-change of the queue energy:
    half the sum over skills of squared mobilization and consumption caps."""
    if len(mobilization_caps) != len(consumption_caps_):
        raise LengthMismatch(
            f"cap vectors differ in length: {len(mobilization_caps)} vs {len(consumption_caps_)}"
        )
    return 0.5 * sum(a * a + u * u for a, u in zip(mobilization_caps, consumption_caps_))
