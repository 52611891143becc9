"""Demand models mapping price and pool reliability to a task-request volume.

Two forms are supported: the exact log-linear model, and the linearized
variant kept for comparison runs. The linearized form can go negative
(its leading coefficient is a product of a negative and a positive
elasticity), so its output is clamped at zero and callers count clamps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class DemandParams:
    alpha1: float
    alpha2: float
    alpha3: float
    form: str = "exact_eq5"


@dataclass(frozen=True)
class DemandDraw:
    expected: float
    realized: int


def _check_inputs(price: float, pool_rel: float, positive_ratings: int) -> None:
    if price <= 0:
        raise DomainError(f"price must be > 0, got {price}")
    if not 0 < pool_rel < 1:
        raise DomainError(f"pool reliability must lie in (0, 1), got {pool_rel}")
    if positive_ratings < 1:
        raise DomainError(f"positive_ratings must be >= 1, got {positive_ratings}")


def expected_demand(price: float, pool_rel: float, positive_ratings: int, params: DemandParams) -> float:
    """Log-linear demand: exp(a1) * rel^a2 * ratings^a3 * price."""
    _check_inputs(price, pool_rel, positive_ratings)
    return math.exp(params.alpha1) * pool_rel**params.alpha2 * positive_ratings**params.alpha3 * price


def linearized_demand_raw(price: float, pool_rel: float, positive_ratings: int, params: DemandParams) -> float:
    """Linearized demand as printed: (a2 * a3 * ratings * exp(a1)) * rel * price.

    With a2 < 0 and a3 > 0 the coefficient is negative, so this is usually
    negative; see linearized_demand for the clamped version.
    """
    _check_inputs(price, pool_rel, positive_ratings)
    beta = params.alpha2 * params.alpha3 * positive_ratings * math.exp(params.alpha1)
    return beta * pool_rel * price


def linearized_demand(price: float, pool_rel: float, positive_ratings: int, params: DemandParams) -> float:
    return max(0.0, linearized_demand_raw(price, pool_rel, positive_ratings, params))


def realize_demand(expected: float, cap: int, mode: str, rng) -> int:
    """Turn an expected volume into an integer request count, capped per step.

    deterministic: round half up. poisson: one draw from the run's generator.
    """
    if expected < 0:
        raise DomainError(f"expected demand must be >= 0, got {expected}")
    if mode == "deterministic":
        count = math.floor(expected + 0.5)
    elif mode == "poisson":
        count = int(rng.poisson(expected))
    else:
        raise DomainError(f"unknown demand mode {mode!r}")
    return min(count, cap)
