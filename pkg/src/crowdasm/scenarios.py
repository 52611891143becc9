"""Bundled scenarios, the out-of-the-box default, and random generators
used by the verification suites.

Random generators draw money amounts (costs, budgets) on a 0.25 grid so
budget arithmetic stays exact in floating point and greedy spending agrees
bit-for-bit with the oracle's aggregate sums.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .config import MarketConfig, validate_config
from .scheduler import TaskRequestBatch
from .simulator import init_state, snapshot_queues

FIXTURES = (
    "tiny3.json",
    "stress.json",
    "bound_single_skill.json",
    "bound_two_skill.json",
    "bound_two_types.json",
    "bound_joint_team.json",
    "bound_budget_schedule.json",
)

BOUND_FIXTURES = tuple(name for name in FIXTURES if name.startswith("bound_"))


def fixture_path(name: str) -> Path:
    path = resources.files("crowdasm.fixtures").joinpath(name)
    with resources.as_file(path) as concrete:
        return Path(concrete)


def load_fixture(name: str) -> MarketConfig:
    with resources.files("crowdasm.fixtures").joinpath(name).open("r", encoding="utf-8") as fh:
        return validate_config(json.load(fh))


def load_fixture_raw(name: str) -> dict:
    with resources.files("crowdasm.fixtures").joinpath(name).open("r", encoding="utf-8") as fh:
        return json.load(fh)


def default_config() -> MarketConfig:
    """Runnable defaults for commands invoked without a scenario file."""
    return validate_config(
        {
            "skills": 2,
            "task_types": [
                {
                    "id": 0,
                    "requirements": [1, 0],
                    "price": 2.0,
                    "demand_cap": 3,
                    "positive_ratings": 16,
                    "service_time": 1,
                },
                {
                    "id": 1,
                    "requirements": [1, 1],
                    "price": 3.0,
                    "demand_cap": 2,
                    "positive_ratings": 16,
                    "service_time": 1,
                },
            ],
            "alpha1": 1.0,
            "alpha2": -0.5,
            "alpha3": 0.25,
            "epsilon": 0.5,
            "rho": 1.0,
            "mobilization_cost": [1.0, 2.0],
            "mobilization_cap": [3, 3],
            "budget_per_step": 10.0,
            "arrival_rates": [0.5, 0.5],
            "horizon": 50,
            "seed": 42,
            "demand_mode": "deterministic",
            "demand_form": "exact_eq5",
            "initial_workers": (
                [{"skill": 0, "successes": s, "failures": f, "logged_in": li} for s, f, li in _DEFAULT_POOL]
                + [{"skill": 1, "successes": s, "failures": f, "logged_in": li} for s, f, li in _DEFAULT_POOL]
            ),
        }
    )


_DEFAULT_POOL = [
    (8, 0, True),
    (6, 2, True),
    (4, 1, True),
    (9, 1, False),
    (7, 1, False),
    (5, 3, False),
    (3, 1, False),
    (1, 5, False),
]


def random_scenario(seed: int, max_skills: int = 4, max_types: int = 3, horizon: int = 200) -> MarketConfig:
    """A random but always-valid scenario for stress and invariant checks."""
    rng = np.random.default_rng(seed)
    skills = int(rng.integers(1, max_skills + 1))
    types = int(rng.integers(1, max_types + 1))
    task_types = []
    for k in range(types):
        req = [int(rng.integers(0, 3)) for _ in range(skills)]
        if not any(req):
            req[int(rng.integers(0, skills))] = 1
        task_types.append(
            {
                "id": k,
                "requirements": req,
                "price": round(float(rng.uniform(0.5, 5.0)), 2),
                "demand_cap": int(rng.integers(0, 4)),
                "positive_ratings": int(rng.integers(1, 50)),
                "service_time": int(rng.integers(1, 4)),
            }
        )
    workers = []
    for m in range(skills):
        for _ in range(int(rng.integers(2, 9))):
            workers.append(
                {
                    "skill": m,
                    "successes": int(rng.integers(0, 10)),
                    "failures": int(rng.integers(0, 10)),
                    "logged_in": True,
                }
            )
        for _ in range(int(rng.integers(2, 9))):
            workers.append(
                {
                    "skill": m,
                    "successes": int(rng.integers(0, 10)),
                    "failures": int(rng.integers(0, 10)),
                    "logged_in": False,
                }
            )
    return validate_config(
        {
            "skills": skills,
            "task_types": task_types,
            "alpha1": float(rng.uniform(-1.0, 1.5)),
            "alpha2": float(rng.uniform(-1.5, -0.1)),
            "alpha3": float(rng.uniform(0.05, 1.0)),
            "epsilon": float(rng.uniform(0.2, 0.8)),
            "rho": float(np.exp(rng.uniform(np.log(0.1), np.log(10.0)))),
            "mobilization_cost": [0.25 * int(rng.integers(1, 17)) for _ in range(skills)],
            "mobilization_cap": [int(rng.integers(0, 4)) for _ in range(skills)],
            "budget_per_step": 0.25 * int(rng.integers(0, 61)),
            "arrival_rates": [round(float(rng.uniform(0.0, 0.6)), 2) for _ in range(skills)],
            "horizon": horizon,
            "seed": int(rng.integers(0, 2**63)),
            "demand_mode": "poisson" if rng.random() < 0.5 else "deterministic",
            "demand_form": "exact_eq5",
            "initial_workers": workers,
        }
    )


def random_planning_instance(seed: int):
    """One tiny decision-point instance: (snapshot, roster, batch, cfg).

    Sized for exhaustive search: at most 3 skills, 2 task types, per-skill
    recruitment caps of 3, and request counts of 3.
    """
    rng = np.random.default_rng(seed)
    skills = int(rng.integers(1, 4))
    types = int(rng.integers(1, 3))
    task_types = []
    for k in range(types):
        req = [int(rng.integers(0, 3)) for _ in range(skills)]
        if not any(req):
            req[int(rng.integers(0, skills))] = 1
        task_types.append(
            {
                "id": k,
                "requirements": req,
                "price": round(float(rng.uniform(0.5, 4.0)), 2),
                "demand_cap": 3,
                "positive_ratings": int(rng.integers(1, 30)),
                "service_time": 1,
            }
        )
    workers = []
    for m in range(skills):
        for _ in range(int(rng.integers(0, 4))):
            workers.append(
                {
                    "skill": m,
                    "successes": int(rng.integers(0, 10)),
                    "failures": int(rng.integers(0, 10)),
                    "logged_in": True,
                }
            )
        for _ in range(int(rng.integers(0, 5))):
            workers.append(
                {
                    "skill": m,
                    "successes": int(rng.integers(0, 10)),
                    "failures": int(rng.integers(0, 10)),
                    "logged_in": False,
                }
            )
    cfg = validate_config(
        {
            "skills": skills,
            "task_types": task_types,
            "alpha1": 0.5,
            "alpha2": -0.5,
            "alpha3": 0.25,
            "epsilon": float(rng.choice([0.3, 0.5, 0.7])),
            "rho": float(rng.choice([0.25, 1.0, 4.0])),
            "mobilization_cost": [0.25 * int(rng.integers(1, 17)) for _ in range(skills)],
            "mobilization_cap": [int(rng.integers(0, 4)) for _ in range(skills)],
            "budget_per_step": 0.25 * int(rng.integers(0, 49)),
            "arrival_rates": [0.0] * skills,
            "horizon": 1,
            "seed": int(rng.integers(0, 2**63)),
            "demand_mode": "deterministic",
            "initial_workers": workers,
        }
    )
    sim = init_state(cfg)
    snapshot = snapshot_queues(sim.roster, cfg.skills, cfg.epsilon)
    demand = tuple(int(rng.integers(0, 4)) for _ in range(types))
    batch = TaskRequestBatch(
        demand=demand,
        prices=tuple(t.price for t in cfg.task_types),
        budget=budgets_from(cfg),
    )
    return snapshot, sim.roster, batch, cfg


def budgets_from(cfg: MarketConfig) -> float:
    b = cfg.budget_per_step
    return b[0] if isinstance(b, tuple) else b
