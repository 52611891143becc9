"""Shared helpers for building planning-instance test cases."""

from __future__ import annotations

from crowdasm.config import validate_config
from crowdasm.scheduler import TaskRequestBatch
from crowdasm.simulator import init_state, snapshot_queues


def history_for(reliability: float) -> tuple[int, int]:
    """Success/failure counts whose beta expectation is exactly the target."""
    table = {
        0.9: (8, 0),
        0.8: (7, 1),
        0.7: (6, 2),
        0.6: (5, 3),
        0.5: (0, 0),
        0.3: (2, 6),
        0.315: (62, 136),
        0.25: (2, 7),
    }
    return table[reliability]


def make_instance(
    *,
    skills=1,
    task_types=None,
    offline=(),
    logged_in=(),
    demand=(2,),
    epsilon=0.5,
    rho=1.0,
    costs=(2.0,),
    caps=(3,),
    budget=5.0,
    rollback=True,
):
    """Build (snapshot, roster, batch, cfg) for one scheduler decision point.

    ``offline`` and ``logged_in`` are sequences of (skill, reliability) pairs
    resolved through history_for.
    """
    if task_types is None:
        task_types = [
            {"id": 0, "requirements": [1] * skills, "price": 1.0, "demand_cap": max(demand), "positive_ratings": 16}
        ]
    workers = []
    for skill, rel in offline:
        s, f = history_for(rel)
        workers.append({"skill": skill, "successes": s, "failures": f, "logged_in": False})
    for skill, rel in logged_in:
        s, f = history_for(rel)
        workers.append({"skill": skill, "successes": s, "failures": f, "logged_in": True})
    cfg = validate_config(
        {
            "skills": skills,
            "task_types": task_types,
            "alpha1": 0.0,
            "alpha2": -0.5,
            "alpha3": 0.25,
            "epsilon": epsilon,
            "rho": rho,
            "mobilization_cost": list(costs),
            "mobilization_cap": list(caps),
            "budget_per_step": float(budget),
            "arrival_rates": [0.0] * skills,
            "horizon": 1,
            "seed": 0,
            "initial_workers": workers,
            "rollback_infeasible": rollback,
        }
    )
    sim = init_state(cfg)
    snapshot = snapshot_queues(sim.roster, cfg.skills, cfg.epsilon)
    batch = TaskRequestBatch(
        demand=tuple(demand),
        prices=tuple(t.price for t in cfg.task_types),
        budget=float(budget),
    )
    return snapshot, sim.roster, batch, cfg
