"""Weekly aggregation and the three trend metrics.

Labeled mentions are binned into ISO-8601 calendar weeks (Monday start,
UTC).  From the per-week counts we derive:

* trust / distrust proportions  (share of support / attack labels per week),
* the week-to-week slope        s = (y_t1 - y_t0) / (x_t1 - x_t0)
  with x measured in week ordinals, so gaps widen the denominator,
* the smoothed trust:distrust ratio  (n_support + a) / (n_attack + a),
* the trust profile             (week-to-week slope of that ratio).
"""

from __future__ import annotations

import datetime as dt
import logging
import math
from dataclasses import dataclass

log = logging.getLogger(__name__)

# Monday of ISO week 1970-W01; week ordinals count weeks from here.
WEEK_EPOCH = dt.date(1969, 12, 29)

VALUE_KINDS = (
    "trust_proportion",
    "distrust_proportion",
    "trust_slope",
    "ratio",
    "profile",
)

# Input kind -> output kind for slope_series.  Other kinds have no
# slope meaning in this pipeline and are rejected.
_SLOPE_KIND = {"trust_proportion": "trust_slope", "ratio": "profile"}


@dataclass(frozen=True, order=True)
class WeekIndex:
    """One ISO-8601 calendar week (Monday start, UTC)."""

    iso_year: int
    iso_week: int

    def __post_init__(self):
        # raises ValueError for impossible (year, week) pairs, e.g. W53
        # in a 52-week year
        dt.date.fromisocalendar(self.iso_year, self.iso_week, 1)

    @property
    def week_ordinal(self) -> int:
        """Weeks since WEEK_EPOCH; consecutive calendar weeks differ by 1."""
        return (self.monday() - WEEK_EPOCH).days // 7

    def monday(self) -> dt.date:
        return dt.date.fromisocalendar(self.iso_year, self.iso_week, 1)

    @classmethod
    def from_date(cls, day: dt.date) -> "WeekIndex":
        iso = day.isocalendar()
        return cls(iso[0], iso[1])

    @classmethod
    def from_datetime(cls, ts: dt.datetime) -> "WeekIndex":
        if ts.tzinfo is None:
            raise ValueError("naive datetime; week binning requires UTC timestamps")
        return cls.from_date(ts.astimezone(dt.timezone.utc).date())

    @classmethod
    def from_ordinal(cls, ordinal: int) -> "WeekIndex":
        return cls.from_date(WEEK_EPOCH + dt.timedelta(weeks=ordinal))


@dataclass(frozen=True)
class WeeklyCounts:
    """Label counts for one entity in one week."""

    entity_id: str
    week: WeekIndex
    n_support: int
    n_attack: int
    n_none: int

    def __post_init__(self):
        for n in (self.n_support, self.n_attack, self.n_none):
            if n < 0:
                raise ValueError("counts must be >= 0")

    @property
    def n_total(self) -> int:
        return self.n_support + self.n_attack + self.n_none


@dataclass(frozen=True)
class WeeklySeries:
    """Week-indexed values of one kind for one entity."""

    entity_id: str
    points: tuple  # of (WeekIndex, float)
    value_kind: str

    def __post_init__(self):
        if self.value_kind not in VALUE_KINDS:
            raise ValueError(f"unknown value_kind {self.value_kind!r}")
        object.__setattr__(self, "points", tuple(self.points))
        last = None
        for week, value in self.points:
            if last is not None and week.week_ordinal <= last:
                raise ValueError("series weeks must be strictly increasing")
            last = week.week_ordinal
            if not math.isfinite(value):
                raise ValueError(f"non-finite value {value!r} at {week}")
            if self.value_kind.endswith("_proportion") and not 0.0 <= value <= 1.0:
                raise ValueError(f"proportion {value!r} outside [0, 1]")

    def __len__(self):
        return len(self.points)

    def values(self) -> list[float]:
        return [v for _, v in self.points]

    def weeks(self) -> list[WeekIndex]:
        return [w for w, _ in self.points]


@dataclass(frozen=True)
class EventMarker:
    date: dt.date
    label: str


def bin_weekly(labels) -> list[WeeklyCounts]:
    """Aggregate labeled mentions into (entity, ISO week) cells.

    Cells with no mentions are absent.  Output is sorted by
    (entity_id, week ordinal); the reduction is a commutative count, so
    input order never matters.
    """
    cells: dict[tuple[str, WeekIndex], list[int]] = {}
    for lab in labels:
        week = WeekIndex.from_datetime(lab.mention.sentence.created_at)
        key = (lab.mention.entity_id, week)
        counts = cells.setdefault(key, [0, 0, 0])
        slot = {"support": 0, "attack": 1, "none": 2}[lab.label.value]
        counts[slot] += 1
    return [
        WeeklyCounts(entity, week, s, a, n)
        for (entity, week), (s, a, n) in sorted(
            cells.items(), key=lambda kv: (kv[0][0], kv[0][1])
        )
    ]


def _single_entity(counts) -> str:
    entities = {c.entity_id for c in counts}
    if len(entities) != 1:
        raise ValueError(f"expected counts for exactly one entity, got {sorted(entities)}")
    return entities.pop()


def proportion_series(counts, kind: str, min_n: int = 1) -> WeeklySeries:
    """Per-week share of support ("trust") or attack ("distrust") labels.

    Weeks with fewer than min_n mentions are omitted rather than reported
    as zero: no data is not the same thing as a measured zero.
    """
    if kind not in ("trust", "distrust"):
        raise ValueError(f"kind must be 'trust' or 'distrust', got {kind!r}")
    entity = _single_entity(counts)
    points = []
    for c in sorted(counts, key=lambda c: c.week):
        if c.n_total < min_n or c.n_total == 0:
            continue
        num = c.n_support if kind == "trust" else c.n_attack
        points.append((c.week, num / c.n_total))
    return WeeklySeries(entity, tuple(points), f"{kind}_proportion")


def slope_series(series: WeeklySeries) -> WeeklySeries:
    """Week-to-week slope: for each consecutive pair of points,
    (y_t1 - y_t0) / (x_t1 - x_t0) reported at the later week.

    x is the week ordinal, so a gap of k missing weeks divides by k+1
    instead of interpolating.  The first input week has no output point.
    """
    try:
        out_kind = _SLOPE_KIND[series.value_kind]
    except KeyError:
        raise ValueError(
            f"no slope defined for series of kind {series.value_kind!r}"
        ) from None
    if len(series) < 2:
        log.warning(
            "slope of %s series for %s needs >= 2 points, got %d; empty result",
            series.value_kind, series.entity_id, len(series),
        )
        return WeeklySeries(series.entity_id, (), out_kind)
    points = []
    for (w0, y0), (w1, y1) in zip(series.points, series.points[1:]):
        s = (y1 - y0) / (w1.week_ordinal - w0.week_ordinal)
        points.append((w1, s))
    return WeeklySeries(series.entity_id, tuple(points), out_kind)


def ratio_series(counts, alpha: float = 1.0) -> WeeklySeries:
    """Smoothed trust:distrust ratio per week,
    (n_support + alpha) / (n_attack + alpha).

    alpha=1 (default) keeps every week finite and positive; alpha=0
    reproduces the raw ratio and raises on weeks where it is undefined.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    entity = _single_entity(counts)
    points = []
    for c in sorted(counts, key=lambda c: c.week):
        denom = c.n_attack + alpha
        if denom == 0:
            raise ValueError(
                f"ratio undefined for {entity} {c.week.iso_year}-W{c.week.iso_week:02d} "
                f"(n_attack=0, alpha=0); enable smoothing"
            )
        points.append((c.week, (c.n_support + alpha) / denom))
    return WeeklySeries(entity, tuple(points), "ratio")


def trust_profile(counts, alpha: float = 1.0) -> WeeklySeries:
    """Week-to-week slope of the smoothed trust:distrust ratio."""
    return slope_series(ratio_series(counts, alpha=alpha))


def default_events() -> list[EventMarker]:
    """The six fixed 2024 campaign events marked on every chart."""
    return [
        EventMarker(dt.date(2024, 6, 27), "Biden-Trump debate"),
        EventMarker(dt.date(2024, 7, 13), "assassination attempt"),
        EventMarker(dt.date(2024, 7, 21), "Biden withdrawal"),
        EventMarker(dt.date(2024, 8, 5), "Harris nominee"),
        EventMarker(dt.date(2024, 9, 10), "Harris-Trump debate"),
        EventMarker(dt.date(2024, 10, 16), "Fox News interview"),
    ]
