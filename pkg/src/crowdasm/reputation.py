"""Worker reliability scores from rating histories, plus pooled aggregates.

A worker's reliability is the beta-expectation (s+1)/(s+f+2) of their
success/failure counts, so it is always strictly inside (0, 1) and starts
at 0.5 for a fresh worker.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .config import TaskTypeSpec
from .errors import MissingSkillReliability, NoEligibleWorkers

LOGGED_IN = "logged_in"
OFFLINE = "offline"
BUSY = "busy"


@dataclass(frozen=True)
class RatingHistory:
    successes: int = 0
    failures: int = 0


@dataclass
class Worker:
    id: int
    skill: int
    history: RatingHistory = RatingHistory()
    presence: str = OFFLINE
    busy_until: int | None = None


def reliability(history: RatingHistory) -> float:
    return (history.successes + 1) / (history.successes + history.failures + 2)


def worker_reliability(worker: Worker) -> float:
    return reliability(worker.history)


def record_outcome(worker: Worker, success: bool) -> Worker:
    """Add one rating event to the worker's history and return the worker."""
    if success:
        worker.history = replace(worker.history, successes=worker.history.successes + 1)
    else:
        worker.history = replace(worker.history, failures=worker.history.failures + 1)
    return worker


def eligible_offline_workers(roster, skills: int, epsilon: float) -> list[list[Worker]]:
    """Offline workers at or above the threshold, per skill, best reliability
    first (ties broken by ascending worker id)."""
    pools: list[list[Worker]] = [[] for _ in range(skills)]
    for w in roster:
        if w.presence == OFFLINE and worker_reliability(w) >= epsilon:
            pools[w.skill].append(w)
    for pool in pools:
        pool.sort(key=lambda w: (-worker_reliability(w), w.id))
    return pools


def pool_reliability(roster, skill: int, epsilon: float) -> float:
    """Mean reliability of the skill's offline workers at or above epsilon.

    Raises NoEligibleWorkers when the filtered pool is empty; callers must
    treat the skill's offline pool as unusable for that step.
    """
    vals = [
        worker_reliability(w)
        for w in roster
        if w.skill == skill and w.presence == OFFLINE and worker_reliability(w) >= epsilon
    ]
    if not vals:
        raise NoEligibleWorkers(f"skill {skill}: no offline worker with reliability >= {epsilon}")
    return sum(vals) / len(vals)


def pool_reliabilities(roster, skills: int, epsilon: float) -> list[float | None]:
    """Per-skill offline pool reliability, None where the pool is unusable."""
    out: list[float | None] = []
    for m in range(skills):
        try:
            out.append(pool_reliability(roster, m, epsilon))
        except NoEligibleWorkers:
            out.append(None)
    return out


def task_reliability(task: TaskTypeSpec, pool_rels) -> float:
    """Head-count-weighted mean pool reliability over the skills the task needs."""
    num = 0.0
    den = 0
    for m, n in enumerate(task.requirements):
        if n <= 0:
            continue
        r = pool_rels[m]
        if r is None:
            raise MissingSkillReliability(f"task type {task.id}: no pool reliability for skill {m}")
        num += n * r
        den += n
    return num / den


def task_reliability_with_fallback(task: TaskTypeSpec, pool_rels, prior: float = 0.5) -> float:
    """Like task_reliability, but skips skills with unusable pools (renormalizing
    the weights) and falls back to an uninformative prior when none remain."""
    num = 0.0
    den = 0
    for m, n in enumerate(task.requirements):
        if n <= 0 or pool_rels[m] is None:
            continue
        num += n * pool_rels[m]
        den += n
    if den == 0:
        return prior
    return num / den
