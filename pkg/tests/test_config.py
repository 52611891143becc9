import dataclasses
import json

import numpy as np
import pytest

from crowdasm.config import (
    budget_at,
    config_hash,
    config_to_dict,
    consumption_caps,
    drift_slack,
    validate_config,
)
from crowdasm.errors import ConfigError, LengthMismatch
from crowdasm.scenarios import default_config


def base_raw():
    return {
        "skills": 1,
        "task_types": [
            {"id": 0, "requirements": [1], "price": 1.0, "demand_cap": 2, "positive_ratings": 5, "service_time": 1}
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
        "horizon": 3,
        "seed": 1,
    }


def test_accepts_valid_config():
    cfg = validate_config(base_raw())
    assert cfg.skills == 1
    assert cfg.task_types[0].price == 1.0
    assert cfg.demand_mode == "deterministic"


def test_rejects_positive_alpha2():
    raw = base_raw()
    raw["alpha2"] = 0.5
    with pytest.raises(ConfigError) as exc:
        validate_config(raw)
    assert "BadAlphaSigns" in exc.value.codes()


def test_rejects_non_positive_alpha3():
    raw = base_raw()
    raw["alpha3"] = 0.0
    with pytest.raises(ConfigError) as exc:
        validate_config(raw)
    assert "BadAlphaSigns" in exc.value.codes()


def test_rejects_empty_requirements():
    raw = base_raw()
    raw["task_types"][0]["requirements"] = [0]
    with pytest.raises(ConfigError) as exc:
        validate_config(raw)
    assert "EmptyRequirements" in exc.value.codes()


def test_rejects_bad_price_and_rho_together():
    raw = base_raw()
    raw["task_types"][0]["price"] = -2.0
    raw["rho"] = 0.0
    with pytest.raises(ConfigError) as exc:
        validate_config(raw)
    # every violated invariant is reported, not just the first
    assert {"NegativePrice", "NonPositiveRho"} <= exc.value.codes()


def test_rejects_unknown_keys():
    raw = base_raw()
    raw["unknown_knob"] = 3
    with pytest.raises(ConfigError) as exc:
        validate_config(raw)
    assert "UnknownKey" in exc.value.codes()


def test_rejects_bad_epsilon():
    raw = base_raw()
    raw["epsilon"] = 1.0
    with pytest.raises(ConfigError) as exc:
        validate_config(raw)
    assert "BadEpsilon" in exc.value.codes()


def test_validation_is_idempotent():
    cfg = validate_config(base_raw())
    assert validate_config(cfg) is cfg


def test_config_roundtrip_and_hash_stability():
    cfg = default_config()
    again = validate_config(json.loads(json.dumps(config_to_dict(cfg))))
    assert again == cfg
    assert config_hash(again) == config_hash(cfg)


def test_budget_schedule_extends_last_entry():
    raw = base_raw()
    raw["budget_per_step"] = [4.0, 0.0]
    cfg = validate_config(raw)
    assert budget_at(cfg, 0) == 4.0
    assert budget_at(cfg, 1) == 0.0
    assert budget_at(cfg, 99) == 0.0
    assert budget_at(validate_config(base_raw()), 7) == 5.0


def test_consumption_caps_single_product():
    cfg = validate_config(base_raw())
    caps = consumption_caps(cfg.task_types, cfg.skills)
    assert caps == [2]  # 1 worker/task times cap of 2


def test_consumption_caps_sums_over_types():
    raw = base_raw()
    raw["task_types"] = [
        {"id": 0, "requirements": [1], "price": 1.0, "demand_cap": 2, "positive_ratings": 5, "service_time": 1},
        {"id": 1, "requirements": [2], "price": 1.0, "demand_cap": 2, "positive_ratings": 5, "service_time": 1},
    ]
    assert consumption_caps(validate_config(raw).task_types, 1) == [6]


def test_consumption_caps_zero_demand():
    raw = base_raw()
    raw["task_types"][0]["demand_cap"] = 0
    assert consumption_caps(validate_config(raw).task_types, 1) == [0]


def test_consumption_caps_additive_under_type_split():
    # splitting a type into two with the same summed head-count*cap leaves the caps unchanged
    rng = np.random.default_rng(5)
    for _ in range(50):
        skills = int(rng.integers(1, 4))
        req = [int(rng.integers(0, 3)) for _ in range(skills)]
        if not any(req):
            req[0] = 1
        cap = int(rng.integers(1, 5))
        whole = [{"id": 0, "requirements": req, "price": 1.0, "demand_cap": 2 * cap, "positive_ratings": 1}]
        split = [
            {"id": 0, "requirements": req, "price": 1.0, "demand_cap": cap, "positive_ratings": 1},
            {"id": 1, "requirements": req, "price": 1.0, "demand_cap": cap, "positive_ratings": 1},
        ]
        raw = base_raw()
        raw["skills"] = skills
        raw["mobilization_cost"] = [1.0] * skills
        raw["mobilization_cap"] = [1] * skills
        raw["arrival_rates"] = [0.0] * skills
        raw["task_types"] = whole
        a = consumption_caps(validate_config(raw).task_types, skills)
        raw["task_types"] = split
        b = consumption_caps(validate_config(raw).task_types, skills)
        assert a == b


def test_drift_slack_examples():
    assert drift_slack([0], [0]) == 0.0
    assert drift_slack([2], [3]) == 6.5
    assert drift_slack([1, 1], [2, 2]) == 5.0


def test_drift_slack_permutation_invariant_and_monotone():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(1, 6))
        a = [int(x) for x in rng.integers(0, 10, n)]
        u = [int(x) for x in rng.integers(0, 10, n)]
        perm = rng.permutation(n)
        assert drift_slack(a, u) == drift_slack([a[i] for i in perm], [u[i] for i in perm])
        bumped = list(a)
        bumped[int(rng.integers(0, n))] += 1
        assert drift_slack(bumped, u) >= drift_slack(a, u)


def test_drift_slack_length_mismatch():
    with pytest.raises(LengthMismatch):
        drift_slack([1, 2], [1])


def test_configs_are_immutable():
    cfg = validate_config(base_raw())
    with pytest.raises(dataclasses.FrozenInstanceError):
        cfg.rho = 2.0
