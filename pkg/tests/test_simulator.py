import json

import pytest

from crowdasm.config import validate_config
from crowdasm.scenarios import load_fixture, load_fixture_raw, random_scenario
from crowdasm.simulator import run, step_profit, trace_json
from crowdasm.verify import check_constraints, check_queue_law


def scripted(raw_overrides=None, **kwargs):
    raw = {
        "skills": 1,
        "task_types": [
            {"id": 0, "requirements": [2], "price": 1.0, "demand_cap": 1, "positive_ratings": 16, "service_time": 1}
        ],
        "alpha1": 0.0,
        "alpha2": -0.5,
        "alpha3": 0.25,
        "epsilon": 0.5,
        "rho": 1.0,
        "mobilization_cost": [1.0],
        "mobilization_cap": [2],
        "budget_per_step": 5.0,
        "arrival_rates": [0.0],
        "horizon": 1,
        "seed": 3,
        "demand_mode": "deterministic",
        "outcome_mode": "always_success",
        "initial_workers": [],
        "arrival_schedule": [[0]],
    }
    raw.update(raw_overrides or {})
    raw.update(kwargs)
    return validate_config(raw)


def test_step_profit_examples():
    assert step_profit([0], [2.0], [3.0], 0.0) == 0.0
    assert step_profit([1], [2.0], [3.0], 2.5) == pytest.approx(3.5)
    assert step_profit([0], [2.0], [3.0], 2.5) == pytest.approx(-2.5)


def test_idle_step_changes_nothing():
    # no demand (price so low expected demand rounds to zero), no arrivals
    cfg = scripted(
        {"task_types": [{"id": 0, "requirements": [2], "price": 0.1, "demand_cap": 1, "positive_ratings": 1}]},
        initial_workers=[{"skill": 0, "successes": 8, "failures": 0, "logged_in": True}],
    )
    trace = run(cfg, policy="crowdasm", check=True)
    s = trace.steps[0]
    assert s.realized_demand == [0]
    assert s.q_before == s.q_after == [1]
    assert s.delta == 0.0


def test_served_task_consumes_team_from_queue():
    # one task needing two workers of skill 0, no arrivals, no recruitment
    cfg = scripted(
        initial_workers=[
            {"skill": 0, "successes": 8, "failures": 0, "logged_in": True},
            {"skill": 0, "successes": 6, "failures": 2, "logged_in": True},
            {"skill": 0, "successes": 4, "failures": 1, "logged_in": True},
        ]
    )
    trace = run(cfg, policy="crowdasm", check=True)
    s = trace.steps[0]
    assert s.realized_demand == [1]
    assert s.plan.served == [1]
    assert s.plan.mobilized_counts == [0]
    assert s.q_before == [3]
    assert s.q_after == [1]  # dropped by exactly the team size


def test_tiny3_matches_hand_simulated_trajectory():
    expected = load_fixture_raw("tiny3_expected.json")
    trace = run(load_fixture("tiny3.json"), policy="crowdasm", check=True)
    assert [s.q_before for s in trace.steps] == expected["q_before"]
    assert [s.q_after for s in trace.steps] == expected["q_after"]
    assert [s.realized_demand for s in trace.steps] == expected["realized_demand"]
    assert [s.served_demand for s in trace.steps] == expected["served_demand"]
    assert [s.plan.mobilized_counts for s in trace.steps] == expected["mobilized"]
    for got, want in zip([s.delta for s in trace.steps], expected["delta"]):
        assert got == pytest.approx(want, abs=1e-9)


def test_empty_horizon_gives_empty_trace_with_header():
    cfg = scripted(horizon=0, arrival_schedule=[])
    trace = run(cfg, policy="crowdasm")
    assert trace.steps == []
    assert trace.header["config_hash"]
    assert trace.header["policy"] == "crowdasm"


def test_never_policy_never_recruits():
    cfg = random_scenario(17, horizon=60)
    trace = run(cfg, policy="never")
    assert all(sum(s.plan.mobilized_counts) == 0 for s in trace.steps)
    assert all(s.plan.total_spend == 0.0 for s in trace.steps)


def test_same_seed_gives_identical_serialized_traces():
    cfg = random_scenario(23, horizon=40)
    a = trace_json(run(cfg, policy="crowdasm"))
    b = trace_json(run(cfg, policy="crowdasm"))
    assert a == b


def test_queue_law_and_constraints_on_random_scenarios():
    for seed in range(8):
        cfg = random_scenario(seed, horizon=60)
        trace = run(cfg, policy="crowdasm", check=True)
        assert check_queue_law(trace) == []
        assert check_constraints(trace) == []


def test_queue_law_holds_for_baseline_policies():
    for policy in ("never", "max", "random"):
        trace = run(random_scenario(31, horizon=50), policy=policy, check=True)
        assert check_queue_law(trace) == []
        assert check_constraints(trace) == []


def test_busy_workers_never_teamed_or_counted_available():
    cfg = random_scenario(41, horizon=60)
    trace = run(cfg, policy="crowdasm", check=True)
    busy_until: dict[int, int] = {}
    for s in trace.steps:
        for team in s.teams:
            for wid, _ in team.members:
                assert busy_until.get(wid, -1) <= s.t
        for team in s.teams:
            service = cfg.task_types[team.task_type].service_time
            for wid, _ in team.members:
                busy_until[wid] = s.t + service


def test_rating_updates_equal_completing_workers():
    cfg = random_scenario(53, horizon=60)
    trace = run(cfg, policy="crowdasm", check=True)
    # completions are exactly the teams served service_time-1 steps earlier
    expected = sorted(
        (s.t + cfg.task_types[team.task_type].service_time - 1, team.task_type, tuple(sorted(w for w, _ in team.members)))
        for s in trace.steps
        for team in s.teams
        if s.t + cfg.task_types[team.task_type].service_time - 1 < len(trace.steps)
    )
    observed = sorted(
        (s.t, task_type, tuple(sorted(member_ids)))
        for s in trace.steps
        for task_type, member_ids, _ in s.completions
    )
    assert observed == expected
    # and the roster's total rating-count increase equals the completion volume
    total_events = sum(len(ids) for s in trace.steps for _, ids, _ in s.completions)
    initial = {i: (w.successes, w.failures) for i, w in enumerate(cfg.initial_workers)}
    final_events = 0
    for w in trace.final_workers:
        s0, f0 = initial.get(w["id"], (0, 0))
        final_events += (w["successes"] - s0) + (w["failures"] - f0)
    assert final_events == total_events


def test_served_counts_respect_indicator_range():
    cfg = random_scenario(67, horizon=60)
    trace = run(cfg, policy="crowdasm")
    for s in trace.steps:
        for k in range(len(s.realized_demand)):
            assert s.served_demand[k] <= s.plan.served[k] * s.realized_demand[k]


def test_linearized_form_clamps_and_counts():
    cfg = scripted(
        demand_form="linearized_eq12",
        horizon=3,
        arrival_schedule=[[0], [0], [0]],
        initial_workers=[{"skill": 0, "successes": 8, "failures": 0, "logged_in": False}],
    )
    trace = run(cfg, policy="crowdasm")
    assert trace.clamped_total == 3  # every step's demand went negative and clamped
    assert all(s.expected_demand == [0.0] for s in trace.steps)
    assert all(s.realized_demand == [0] for s in trace.steps)
    assert trace.header["demand_form"] == "linearized_eq12"


def test_trace_round_trips_through_dict_form():
    from crowdasm.simulator import trace_from_dict, trace_to_dict

    cfg = random_scenario(71, horizon=30)
    trace = run(cfg, policy="crowdasm")
    payload = json.loads(json.dumps(trace_to_dict(trace)))
    again = trace_from_dict(payload)
    assert trace_json(again) == trace_json(trace)
