import pytest

from aspguide.core import DecisionSequence, lit, neg, pos
from aspguide.policy import (
    Policy,
    TrainingRecord,
    best_choice_points,
    in_window,
    learn_policy,
    merge,
    occurrence_count,
    window_positions,
)

p, nq, u = pos(lit("p")), neg(lit("q")), pos(lit("u"))
RECORDS = [
    TrainingRecord("s", DecisionSequence((p, nq, u))),
    TrainingRecord("s", DecisionSequence((p, u, nq))),
    TrainingRecord("s", None),
]


def test_occurrence_counts_delta_1():
    pol = learn_policy(RECORDS, 1)
    assert occurrence_count(pol, p, 0, "s") == 2
    assert occurrence_count(pol, nq, 1, "s") == 1
    assert occurrence_count(pol, u, 1, "s") == 1
    assert occurrence_count(pol, u, 2, "s") == 1
    assert occurrence_count(pol, p, 1, "s") == 0
    assert occurrence_count(pol, p, 0, "other") == 0


def test_occurrence_counts_delta_2():
    pol = learn_policy(RECORDS, 2)
    assert occurrence_count(pol, p, 1, "s") == 2


def test_empty_training_set():
    pol = learn_policy([], 1)
    assert pol.empty
    assert occurrence_count(pol, p, 0, "s") == 0


def test_best_choice_points():
    pol = learn_policy(RECORDS, 1)
    assert best_choice_points(pol, 1, {p, nq, u}, "s") == {nq, u}
    assert best_choice_points(pol, 5, {p, nq, u}, "s") == set()
    assert best_choice_points(pol, 1, set(), "s") == set()


def test_learn_keeps_only_nonzero_entries():
    pol = learn_policy(RECORDS, 1)
    assert pol.tables == {"s": {(p, 0): 2, (nq, 1): 1, (u, 2): 1, (u, 1): 1, (nq, 2): 1}}
    assert learn_policy(RECORDS[2:], 1).tables == {}


@pytest.mark.parametrize("delta", [1, 2, 3, 4, 5])
def test_window_positions_match_definition(delta):
    for level in range(8):
        expected = [i for i in range(20) if in_window(i, level, delta)]
        assert list(window_positions(level, delta)) == expected


def test_window_boundaries():
    # delta 3 at level 2: 1 <= 2*idx < 7, so idx in {1, 2, 3}
    assert list(window_positions(2, 3)) == [1, 2, 3]
    # delta 2 at level 0: -2 <= 2*idx < 2, so idx 0 only
    assert list(window_positions(0, 2)) == [0]


def test_merge_requires_same_delta():
    with pytest.raises(ValueError):
        merge(Policy(1), Policy(2))


def test_merge_adds_counts():
    a = learn_policy(RECORDS[:1], 1)
    b = learn_policy(RECORDS[1:], 1)
    assert merge(a, b) == learn_policy(RECORDS, 1)


def test_policy_validation():
    with pytest.raises(ValueError):
        Policy(0)
    with pytest.raises(ValueError):
        Policy(1, {"s": {(p, 0): 0}})
