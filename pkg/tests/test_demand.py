import math

import numpy as np
import pytest

from crowdasm.demand import (
    DemandParams,
    expected_demand,
    linearized_demand,
    linearized_demand_raw,
    realize_demand,
)
from crowdasm.errors import DomainError


def test_expected_demand_all_zero_exponents():
    params = DemandParams(0.0, 0.0, 0.0)
    assert expected_demand(1.0, 0.7, 5, params) == pytest.approx(1.0)


def test_expected_demand_linear_in_price():
    params = DemandParams(0.3, -0.7, 0.2)
    base = expected_demand(1.5, 0.6, 9, params)
    assert expected_demand(3.0, 0.6, 9, params) == pytest.approx(2 * base)


def test_expected_demand_closed_form_value():
    # hand-evaluated: e^1 * 0.81^-0.5 * 16^0.25 * 2 = 12.0813 to 4 dp
    params = DemandParams(1.0, -0.5, 0.25)
    assert expected_demand(2.0, 0.81, 16, params) == pytest.approx(12.0813, abs=5e-5)


def test_expected_demand_domain_errors():
    params = DemandParams(0.0, -0.5, 0.25)
    with pytest.raises(DomainError):
        expected_demand(0.0, 0.5, 5, params)
    with pytest.raises(DomainError):
        expected_demand(1.0, 1.0, 5, params)
    with pytest.raises(DomainError):
        expected_demand(1.0, 0.5, 0, params)


def test_expected_demand_monotone_directions():
    params = DemandParams(0.2, -0.8, 0.3)
    # decreasing in pool reliability, increasing in positive ratings
    assert expected_demand(1.0, 0.4, 5, params) > expected_demand(1.0, 0.8, 5, params)
    assert expected_demand(1.0, 0.5, 20, params) > expected_demand(1.0, 0.5, 5, params)


def test_expected_demand_matches_log_space_evaluation():
    # independent formulation through the log-linear form
    rng = np.random.default_rng(21)
    for _ in range(2000):
        params = DemandParams(float(rng.uniform(-1, 2)), float(rng.uniform(-2, -0.01)), float(rng.uniform(0.01, 1.5)))
        p = float(rng.uniform(0.1, 20))
        r = float(rng.uniform(0.05, 0.95))
        n = int(rng.integers(1, 200))
        via_logs = math.exp(params.alpha1 + params.alpha2 * math.log(r) + params.alpha3 * math.log(n) + math.log(p))
        assert expected_demand(p, r, n, params) == pytest.approx(via_logs, rel=1e-9)


def test_linearized_zero_coefficient():
    params = DemandParams(0.0, -0.5, 0.0)  # alpha3=0 forced for the zero-coefficient case
    assert linearized_demand(3.0, 0.5, 7, params) == 0.0


def test_linearized_positive_value_passes_through():
    # coefficient 2 needs sign overrides, allowed at this layer (config validation is stricter)
    params = DemandParams(0.0, 2.0, 1.0)
    assert linearized_demand_raw(3.0, 0.5, 1, params) == pytest.approx(3.0)
    assert linearized_demand(3.0, 0.5, 1, params) == pytest.approx(3.0)


def test_linearized_negative_coefficient_clamps():
    params = DemandParams(0.0, -0.5, 0.25)
    raw = linearized_demand_raw(1.0, 0.5, 16, params)
    assert raw == pytest.approx(-2.0 * 0.5 * 1.0)  # coefficient -2
    assert linearized_demand(1.0, 0.5, 16, params) == 0.0


def test_realize_zero_expected():
    rng = np.random.default_rng(0)
    assert realize_demand(0.0, 5, "deterministic", rng) == 0
    assert realize_demand(0.0, 5, "poisson", rng) == 0


def test_realize_deterministic_rounds_half_up():
    rng = np.random.default_rng(0)
    assert realize_demand(2.5, 10, "deterministic", rng) == 3
    assert realize_demand(2.49, 10, "deterministic", rng) == 2
    assert realize_demand(2.5, 2, "deterministic", rng) == 2  # cap binds


def test_realize_poisson_law_of_large_numbers():
    rng = np.random.default_rng(123)
    n = 10**5
    mean = sum(realize_demand(4.0, 10, "poisson", rng) for _ in range(n)) / n
    assert abs(mean - 4.0) < 0.05


def test_realize_never_exceeds_cap():
    rng = np.random.default_rng(7)
    for _ in range(500):
        expected = float(rng.uniform(0, 12))
        cap = int(rng.integers(0, 6))
        assert realize_demand(expected, cap, "poisson", rng) <= cap
        assert realize_demand(expected, cap, "deterministic", rng) <= cap
