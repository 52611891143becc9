import numpy as np
import pytest

from crowdasm.config import TaskTypeSpec
from crowdasm.errors import MissingSkillReliability, NoEligibleWorkers
from crowdasm.reputation import (
    RatingHistory,
    Worker,
    pool_reliability,
    record_outcome,
    reliability,
    task_reliability,
    task_reliability_with_fallback,
    worker_reliability,
)


def offline(wid, skill, s, f):
    return Worker(id=wid, skill=skill, history=RatingHistory(s, f), presence="offline")


def test_reliability_uniform_prior():
    assert reliability(RatingHistory(0, 0)) == 0.5


def test_reliability_examples():
    assert reliability(RatingHistory(4, 0)) == pytest.approx(5 / 6)
    assert reliability(RatingHistory(1, 3)) == pytest.approx(2 / 6)


def test_reliability_strictly_inside_unit_interval():
    rng = np.random.default_rng(3)
    for _ in range(200):
        s, f = int(rng.integers(0, 1000)), int(rng.integers(0, 1000))
        r = reliability(RatingHistory(s, f))
        assert 0 < r < 1


def test_reliability_approaches_success_rate():
    # fixed 3:1 ratio, growing counts
    for n in (10, 100, 10000):
        r = reliability(RatingHistory(3 * n, n))
        assert abs(r - 0.75) < 2 / n


def test_record_outcome_success():
    w = offline(0, 0, 0, 0)
    record_outcome(w, True)
    assert (w.history.successes, w.history.failures) == (1, 0)


def test_record_outcome_failure():
    w = offline(0, 0, 2, 1)
    record_outcome(w, False)
    assert (w.history.successes, w.history.failures) == (2, 2)


def test_record_outcome_leaves_other_fields():
    w = offline(7, 1, 2, 1)
    record_outcome(w, True)
    assert (w.id, w.skill, w.presence, w.busy_until) == (7, 1, "offline", None)


def test_success_strictly_raises_reliability():
    rng = np.random.default_rng(4)
    for _ in range(100):
        s, f = int(rng.integers(0, 50)), int(rng.integers(0, 50))
        assert reliability(RatingHistory(s + 1, f)) > reliability(RatingHistory(s, f))


def test_record_outcome_matches_manual_counts():
    w = offline(0, 0, 3, 2)
    record_outcome(w, True)
    assert worker_reliability(w) == reliability(RatingHistory(4, 2))


def test_pool_reliability_mean():
    # reliabilities 0.9 and 0.7
    roster = [offline(0, 0, 8, 0), offline(1, 0, 6, 2)]
    assert pool_reliability(roster, 0, 0.5) == pytest.approx(0.8)


def test_pool_reliability_filters_below_threshold():
    roster = [offline(0, 0, 8, 0), offline(1, 0, 6, 2)]
    assert pool_reliability(roster, 0, 0.8) == pytest.approx(0.9)


def test_pool_reliability_no_eligible_workers():
    # reliability 0.3 < 0.5
    roster = [offline(0, 0, 2, 8)]
    with pytest.raises(NoEligibleWorkers):
        pool_reliability(roster, 0, 0.5)


def test_pool_reliability_ignores_logged_in_and_busy():
    roster = [
        offline(0, 0, 8, 0),
        Worker(id=1, skill=0, history=RatingHistory(0, 0), presence="logged_in"),
        Worker(id=2, skill=0, history=RatingHistory(9, 0), presence="busy", busy_until=4),
    ]
    assert pool_reliability(roster, 0, 0.5) == pytest.approx(0.9)


def test_pool_reliability_never_below_threshold():
    rng = np.random.default_rng(9)
    for _ in range(100):
        eps = float(rng.uniform(0.1, 0.9))
        roster = [offline(i, 0, int(rng.integers(0, 12)), int(rng.integers(0, 12))) for i in range(6)]
        try:
            value = pool_reliability(roster, 0, eps)
        except NoEligibleWorkers:
            continue
        assert eps <= value < 1


def task(requirements):
    return TaskTypeSpec(id=0, requirements=tuple(requirements), price=1.0, demand_cap=1, positive_ratings=1)


def test_task_reliability_single_skill():
    assert task_reliability(task([1]), [0.8]) == pytest.approx(0.8)


def test_task_reliability_equal_weights():
    assert task_reliability(task([1, 1]), [0.6, 1.0 - 1e-9]) == pytest.approx(0.8)


def test_task_reliability_headcount_weights():
    assert task_reliability(task([3, 1]), [0.8, 0.4]) == pytest.approx(0.7)


def test_task_reliability_missing_skill():
    with pytest.raises(MissingSkillReliability):
        task_reliability(task([1, 1]), [0.8, None])


def test_task_reliability_is_convex_combination():
    rng = np.random.default_rng(10)
    for _ in range(100):
        skills = int(rng.integers(1, 5))
        req = [int(rng.integers(0, 4)) for _ in range(skills)]
        if not any(req):
            req[0] = 1
        rels = [float(rng.uniform(0.05, 0.95)) for _ in range(skills)]
        value = task_reliability(task(req), rels)
        used = [rels[m] for m, n in enumerate(req) if n > 0]
        assert min(used) - 1e-12 <= value <= max(used) + 1e-12


def test_task_reliability_fallback_renormalizes_then_uses_prior():
    assert task_reliability_with_fallback(task([1, 1]), [0.8, None]) == pytest.approx(0.8)
    assert task_reliability_with_fallback(task([1, 1]), [None, None]) == 0.5
