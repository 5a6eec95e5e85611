"""Trailing-window verdicts and the two-candidate decision rule."""

import pytest
from helpers import make_series

from trustan import (
    INCONCLUSIVE,
    InsufficientData,
    TrendVerdict,
    WeekIndex,
    WeeklySeries,
    predict_winner,
    trend_verdict,
)


def profile(values, entity="X", first_week=30):
    return make_series(values, entity=entity, kind="profile", first_week=first_week)


def verdict(entity, classification, mean, trend=0.0, window=4, theta=0.05):
    return TrendVerdict(entity, window, mean, trend, classification, theta)


# --- trend_verdict -----------------------------------------------------------

def test_flat_profile_is_stable():
    v = trend_verdict(profile([0.0, 0.0, 0.0, 0.0]))
    assert (v.mean_profile, v.trend, v.classification) == (0.0, 0.0, "STABLE")


def test_hand_ols_declining():
    v = trend_verdict(profile([0.5, 0.2, -0.3, -0.6]), theta=0.05)
    assert v.trend == pytest.approx(-0.38, abs=1e-12)
    assert v.classification == "DECLINING"
    assert v.mean_profile == pytest.approx(-0.05)


def test_two_point_rising():
    v = trend_verdict(profile([-1.0, 1.0]))
    assert v.trend == pytest.approx(2.0)
    assert v.classification == "RISING"


def test_window_uses_only_trailing_weeks():
    # strongly rising early, flat in the last 4 weeks
    v = trend_verdict(profile([-9.0, -6.0, -3.0, 0.1, 0.1, 0.1, 0.1]), window_weeks=4)
    assert v.trend == pytest.approx(0.0, abs=1e-12)
    assert v.classification == "STABLE"
    assert v.mean_profile == pytest.approx(0.1)


def test_window_counts_calendar_weeks_not_points():
    w10, w13 = WeekIndex.from_ordinal(2850), WeekIndex.from_ordinal(2853)
    inside = WeeklySeries("X", ((w10, 1.0), (w13, 2.0)), "profile")
    v = trend_verdict(inside, window_weeks=4)
    assert v.trend == pytest.approx(1 / 3)
    w9 = WeekIndex.from_ordinal(2849)
    outside = WeeklySeries("X", ((w9, 1.0), (w13, 2.0)), "profile")
    with pytest.raises(InsufficientData, match="insufficient data"):
        trend_verdict(outside, window_weeks=4)


def test_insufficient_data_cases():
    with pytest.raises(InsufficientData):
        trend_verdict(profile([]), window_weeks=4)
    with pytest.raises(InsufficientData):
        trend_verdict(profile([1.0]), window_weeks=4)
    with pytest.raises(InsufficientData):
        trend_verdict(profile([1.0, 2.0, 3.0]), window_weeks=1)


def test_theta_boundary_is_stable():
    # trend exactly -theta: DECLINING requires strictly below -theta
    v = trend_verdict(profile([0.3, 0.2, 0.1, 0.0]), theta=0.1)
    assert v.trend == pytest.approx(-0.1, abs=1e-12)
    assert v.classification == "STABLE"


# --- predict_winner -----------------------------------------------------------

def test_stable_beats_declining():
    pred = predict_winner([
        verdict("TRUMP", "STABLE", 0.0),
        verdict("HARRIS", "DECLINING", -0.05),
    ])
    assert pred.winner == "TRUMP"
    assert pred.rule_trace
    assert any("classification rank" in line for line in pred.rule_trace)


def test_rising_beats_stable():
    pred = predict_winner([verdict("A", "RISING", -1.0), verdict("B", "STABLE", 5.0)])
    assert pred.winner == "A"


def test_identical_verdicts_inconclusive():
    pred = predict_winner([verdict("A", "STABLE", 0.25), verdict("B", "STABLE", 0.25)])
    assert pred.winner == INCONCLUSIVE
    assert any("tie" in line for line in pred.rule_trace)


def test_equal_class_higher_mean_wins():
    pred = predict_winner([verdict("A", "DECLINING", -0.9), verdict("B", "DECLINING", -0.2)])
    assert pred.winner == "B"
    assert any("mean profile" in line for line in pred.rule_trace)


def test_symmetry_under_swap():
    cases = [
        (verdict("A", "STABLE", 0.0), verdict("B", "DECLINING", -0.1)),
        (verdict("A", "RISING", 0.3), verdict("B", "RISING", 0.1)),
        (verdict("A", "STABLE", 0.2), verdict("B", "STABLE", 0.2)),
    ]
    for a, b in cases:
        forward = predict_winner([a, b]).winner
        backward = predict_winner([b, a]).winner
        assert forward == backward


def test_depends_only_on_classification_and_mean():
    pred1 = predict_winner([
        verdict("A", "STABLE", 0.1, trend=0.01),
        verdict("B", "STABLE", 0.05, trend=-0.04),
    ])
    pred2 = predict_winner([
        verdict("A", "STABLE", 0.1, trend=0.049),
        verdict("B", "STABLE", 0.05, trend=0.0),
    ])
    assert pred1.winner == pred2.winner == "A"


def test_mismatched_windows_rejected():
    with pytest.raises(ValueError, match="windows differ"):
        predict_winner([verdict("A", "STABLE", 0.0, window=4),
                        verdict("B", "STABLE", 0.0, window=5)])


def test_requires_exactly_two():
    with pytest.raises(ValueError, match="exactly two"):
        predict_winner([verdict("A", "STABLE", 0.0)])


def test_prediction_deterministic_including_trace():
    args = [verdict("A", "STABLE", 0.0), verdict("B", "DECLINING", -0.4, trend=-0.3)]
    assert predict_winner(args) == predict_winner(args)


def test_prediction_serialization_shape():
    pred = predict_winner([verdict("A", "STABLE", 0.0), verdict("B", "DECLINING", -0.1)])
    doc = pred.to_dict()
    assert set(doc) == {"winner", "window_weeks", "verdicts", "rule_trace"}
    assert doc["winner"] == "A"
    assert doc["window_weeks"] == 4
    assert [v["entity"] for v in doc["verdicts"]] == ["A", "B"]
    assert all(isinstance(line, str) for line in doc["rule_trace"])
