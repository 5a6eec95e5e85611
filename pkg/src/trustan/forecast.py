"""Deterministic winner call from two trust profiles.

Each candidate's profile is reduced over a trailing window (default 4
weeks, "the last month") to a mean level and an ordinary-least-squares
trend, classified RISING / STABLE / DECLINING against a threshold theta.
The better classification wins; ties fall through to the higher mean;
an exact mean tie is INCONCLUSIVE.  The winner therefore depends only on
the (classification, mean) pairs, never on the raw series.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InsufficientData
from .trends import WeeklySeries

DEFAULT_WINDOW_WEEKS = 4
DEFAULT_THETA = 0.05

INCONCLUSIVE = "INCONCLUSIVE"

_CLASS_RANK = {"DECLINING": 0, "STABLE": 1, "RISING": 2}


@dataclass(frozen=True)
class TrendVerdict:
    entity_id: str
    window_weeks: int
    mean_profile: float
    trend: float
    classification: str
    theta: float

    def to_dict(self) -> dict:
        return {
            "entity": self.entity_id,
            "window_weeks": self.window_weeks,
            "mean_profile": self.mean_profile,
            "trend": self.trend,
            "classification": self.classification,
            "theta": self.theta,
        }


@dataclass(frozen=True)
class Prediction:
    winner: str  # entity_id or INCONCLUSIVE
    verdicts: tuple
    rule_trace: tuple

    def to_dict(self) -> dict:
        return {
            "winner": self.winner,
            "window_weeks": self.verdicts[0].window_weeks,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "rule_trace": list(self.rule_trace),
        }


def ols_slope(xs, ys) -> float:
    """Least-squares slope of y against x."""
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    return sxy / sxx


def trend_verdict(
    profile: WeeklySeries,
    window_weeks: int = DEFAULT_WINDOW_WEEKS,
    theta: float = DEFAULT_THETA,
) -> TrendVerdict:
    """Classify the trailing-window tendency of one profile series."""
    if window_weeks < 2:
        raise InsufficientData("window_weeks must be >= 2")
    if theta < 0:
        raise InsufficientData("theta must be >= 0")
    if len(profile) == 0:
        raise InsufficientData(f"insufficient data: empty profile for {profile.entity_id}")
    cutoff = profile.points[-1][0].week_ordinal - window_weeks
    windowed = [(w, v) for w, v in profile.points if w.week_ordinal > cutoff]
    if len(windowed) < 2:
        raise InsufficientData(
            f"insufficient data: {profile.entity_id} has {len(windowed)} point(s) "
            f"in the trailing {window_weeks}-week window, need >= 2"
        )
    xs = [w.week_ordinal for w, _ in windowed]
    ys = [v for _, v in windowed]
    trend = ols_slope(xs, ys)
    if trend < -theta:
        classification = "DECLINING"
    elif trend > theta:
        classification = "RISING"
    else:
        classification = "STABLE"
    return TrendVerdict(
        entity_id=profile.entity_id,
        window_weeks=window_weeks,
        mean_profile=sum(ys) / len(ys),
        trend=trend,
        classification=classification,
        theta=theta,
    )


def predict_winner(verdicts) -> Prediction:
    """Pick the winner from exactly two verdicts over the same window."""
    verdicts = tuple(verdicts)
    if len(verdicts) != 2:
        raise ValueError(f"prediction requires exactly two verdicts, got {len(verdicts)}")
    a, b = verdicts
    if a.window_weeks != b.window_weeks:
        raise ValueError(
            f"verdict windows differ: {a.entity_id}={a.window_weeks}, "
            f"{b.entity_id}={b.window_weeks}"
        )
    trace = [
        f"window: trailing {a.window_weeks} weeks; classes ranked RISING > STABLE > DECLINING",
        f"{a.entity_id}: {a.classification} (trend {a.trend:+.6f}, theta {a.theta}, "
        f"mean profile {a.mean_profile:+.6f})",
        f"{b.entity_id}: {b.classification} (trend {b.trend:+.6f}, theta {b.theta}, "
        f"mean profile {b.mean_profile:+.6f})",
    ]
    rank_a, rank_b = _CLASS_RANK[a.classification], _CLASS_RANK[b.classification]
    if rank_a != rank_b:
        winner = a if rank_a > rank_b else b
        trace.append(
            f"decided by classification rank: {winner.entity_id} "
            f"({winner.classification}) beats the lower class"
        )
        return Prediction(winner.entity_id, verdicts, tuple(trace))
    trace.append(f"classification tie ({a.classification}); comparing mean profile")
    if a.mean_profile == b.mean_profile:
        trace.append("exact mean-profile tie: INCONCLUSIVE")
        return Prediction(INCONCLUSIVE, verdicts, tuple(trace))
    winner = a if a.mean_profile > b.mean_profile else b
    trace.append(f"decided by higher mean profile: {winner.entity_id}")
    return Prediction(winner.entity_id, verdicts, tuple(trace))
