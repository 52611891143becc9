"""Queue-energy diagnostics, time-averaged profit, and the profit-bound check."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyTrace, TraceTooShort


@dataclass(frozen=True)
class BoundReport:
    rho: float
    xi: float
    delta_opt: float
    avg_profit: float
    bound_rhs: float
    margin: float
    satisfied: bool
    tolerance: float


def lyapunov_value(q) -> float:
    """Scalar congestion measure: half the sum of squared queue lengths."""
    return 0.5 * sum(x * x for x in q)


def drift_series(trace) -> list[float]:
    """Per-step change of the queue energy along a trace.

    Entry t is L(q(t+1)) - L(q(t)); the series telescopes to the energy
    difference between the last and first recorded queue states.
    """
    if len(trace.steps) < 2:
        raise TraceTooShort(f"need at least 2 steps, trace has {len(trace.steps)}")
    values = [lyapunov_value(s.q_before) for s in trace.steps]
    return [values[i + 1] - values[i] for i in range(len(values) - 1)]


def time_averaged_profit(trace) -> float:
    if not trace.steps:
        raise EmptyTrace("trace has no steps")
    return sum(s.delta for s in trace.steps) / len(trace.steps)


def mean_backlog(trace) -> float:
    """Average total queue length over the run (0 for an empty trace)."""
    if not trace.steps:
        return 0.0
    return sum(sum(s.q_before) for s in trace.steps) / len(trace.steps)


def bound_check(avg_profit: float, delta_opt: float, xi: float, rho: float, tolerance: float = 1e-9) -> BoundReport:
    """Check that the achieved average profit is within xi/rho of the optimum."""
    rhs = delta_opt - xi / rho
    margin = avg_profit - rhs
    return BoundReport(
        rho=rho,
        xi=xi,
        delta_opt=delta_opt,
        avg_profit=avg_profit,
        bound_rhs=rhs,
        margin=margin,
        satisfied=margin >= -tolerance,
        tolerance=tolerance,
    )
