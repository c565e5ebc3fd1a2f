import math

import pytest

import rankleak


def test_qi_point_recovers_truth():
    inst = rankleak.uniform_bool(60, 4, 3, seed=5)
    for victim in (0, 7, 31):
        truth = inst.tuple_values(victim)[inst.public_count]
        out = rankleak.attack(inst, victim, "qi-point", seed=victim)
        assert out["status"] in ("inferred", "inferred_all")
        assert out["value"]["index"] == truth


def test_q_point_never_lies():
    inst = rankleak.uniform_bool(40, 4, 2, seed=9)
    for victim in range(10):
        out = rankleak.attack(inst, victim, "q-point", seed=1)
        if out["status"] == "inferred":
            assert out["value"]["index"] == inst.tuple_values(victim)[inst.public_count]


def test_oracle_contains_truth():
    inst = rankleak.uniform_bool(12, 3, 2, seed=2)
    feasible = rankleak.feasible_values(inst, 3)
    truth = inst.tuple_values(3)[inst.public_count :]
    for j, value in enumerate(truth):
        assert value in feasible[j]


def test_estimates_in_range():
    inst = rankleak.uniform_bool(50, 5, 3, seed=4)
    est = rankleak.estimates(inst, 0)
    assert 0 < est["findq_success_prob"] <= 1
    assert est["qi_point_expected_cost"] >= 1


def test_erf_value():
    assert math.isclose(rankleak.erf(1.0), 0.8427007929497149, abs_tol=1e-12)


def test_bad_algorithm_raises():
    inst = rankleak.uniform_bool(10, 2, 2, seed=1)
    with pytest.raises(rankleak.RankleakError):
        rankleak.attack(inst, 0, "nope")


def test_scenarios():
    ok, correct, wrong, _ = rankleak.scenario_boolean_preference(3)
    assert ok and wrong == 0 and correct > 0
    ok, code, _ = rankleak.scenario_zipcode("Z042", 0.0, 3)
    assert ok and code == "Z042"
