"""Tabular and graphical report emission.

Every analytic artifact is deterministic: series CSVs use a fixed
header, 6-decimal values, LF line endings and (entity, week, kind) row
order; charts are standalone SVGs rendered with a pinned hash salt and
no embedded date, so reruns on identical inputs are byte-identical and
golden-file diffable.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.dates as mdates
import matplotlib.pyplot as plt

from .classify import EthosLabel, LabeledMention
from .errors import ChartError
from .ingest import format_timestamp, parse_timestamp
from .sentences import MentionSentence, Sentence
from .trends import WeekIndex, WeeklyCounts, WeeklySeries

log = logging.getLogger(__name__)

SERIES_FIELDS = ("entity", "iso_year", "iso_week", "kind", "value")
COUNTS_FIELDS = ("entity", "iso_year", "iso_week", "n_support", "n_attack", "n_none", "n_total")

SVG_HASHSALT = "trustan"

# chart kind -> (series kinds plotted, title, y label)
CHART_KINDS = {
    "proportion": (
        ("trust_proportion", "distrust_proportion"),
        "Weekly trust and distrust proportions",
        "share of labeled mentions",
    ),
    "slope": (
        ("trust_slope",),
        "Week-to-week slope of trust",
        "proportion change per week",
    ),
    "profile": (
        ("profile",),
        "Trust profile (weekly slope of trust:distrust ratio)",
        "ratio change per week",
    ),
}

_KIND_LINE_LABEL = {
    "trust_proportion": "trust",
    "distrust_proportion": "distrust",
    "trust_slope": "",
    "ratio": "",
    "profile": "",
}


def emit_series_csv(series_list, path) -> None:
    """entity,iso_year,iso_week,kind,value rows, sorted, 6-decimal values.

    Each (entity, week, kind) triple may appear once; the file format
    cannot represent two values for the same cell.
    """
    rows = []
    seen = set()
    for series in series_list:
        for week, value in series.points:
            key = (series.entity_id, week.iso_year, week.iso_week, series.value_kind)
            if key in seen:
                raise ValueError(f"duplicate series cell {key}")
            seen.add(key)
            rows.append(key + (value,))
    rows.sort(key=lambda r: (r[0], WeekIndex(r[1], r[2]).week_ordinal, r[3]))
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SERIES_FIELDS)
        for entity, year, week, kind, value in rows:
            writer.writerow([entity, year, week, kind, f"{value:.6f}"])


def parse_series_csv(path) -> list[WeeklySeries]:
    """Inverse of emit_series_csv (values carry the 6-decimal quantization)."""
    grouped: dict[tuple[str, str], list] = defaultdict(list)
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != SERIES_FIELDS:
            raise ValueError(f"{path}: unexpected series header {header!r}")
        for row in reader:
            entity, year, week, kind, value = row
            grouped[(entity, kind)].append((WeekIndex(int(year), int(week)), float(value)))
    series = []
    for (entity, kind), points in sorted(grouped.items()):
        points.sort(key=lambda p: p[0].week_ordinal)
        series.append(WeeklySeries(entity, tuple(points), kind))
    return series


def emit_counts_csv(counts, path) -> None:
    """Raw weekly label counts, one row per (entity, week) cell."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COUNTS_FIELDS)
        for c in sorted(counts, key=lambda c: (c.entity_id, c.week.week_ordinal)):
            writer.writerow(
                [c.entity_id, c.week.iso_year, c.week.iso_week,
                 c.n_support, c.n_attack, c.n_none, c.n_total]
            )


def parse_counts_csv(path) -> list[WeeklyCounts]:
    out = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != COUNTS_FIELDS:
            raise ValueError(f"{path}: unexpected counts header {header!r}")
        for row in reader:
            entity, year, week, s, a, n, _total = row
            out.append(WeeklyCounts(entity, WeekIndex(int(year), int(week)),
                                    int(s), int(a), int(n)))
    return out


def write_labeled_mentions(labels, path) -> None:
    """One JSON object per labeled mention; confidence omitted when absent."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        for lab in labels:
            sent = lab.mention.sentence
            record = {
                "sentence_id": sent.sentence_id,
                "post_id": sent.post_id,
                "ordinal": sent.ordinal,
                "entity": lab.mention.entity_id,
                "created_at": format_timestamp(sent.created_at),
                "text": sent.text,
                "label": lab.label.wire,
                "classifier_id": lab.classifier_id,
            }
            if lab.confidence is not None:
                record["confidence"] = lab.confidence
            fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n")


def read_labeled_mentions(path) -> list[LabeledMention]:
    out = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                sentence = Sentence(
                    sentence_id=rec["sentence_id"],
                    post_id=rec["post_id"],
                    ordinal=rec["ordinal"],
                    created_at=parse_timestamp(rec["created_at"]),
                    text=rec["text"],
                )
                out.append(
                    LabeledMention(
                        mention=MentionSentence(sentence, rec["entity"]),
                        label=EthosLabel.from_wire(rec["label"]),
                        confidence=rec.get("confidence"),
                        classifier_id=rec["classifier_id"],
                    )
                )
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad labeled-mention record: {exc}") from exc
    return out


def emit_chart_svg(series_list, events, kind: str, path) -> None:
    """Render one chart kind to a standalone, deterministic SVG.

    One line per non-empty series, a legend, a dated x axis, and one
    vertical dashed line per event marker that falls inside the plotted
    date range (out-of-range markers are logged and omitted).  Marker
    lines carry an id of the form event-marker-YYYY-MM-DD.
    """
    if kind not in CHART_KINDS:
        raise ChartError(f"unknown chart kind {kind!r}")
    wanted, title, ylabel = CHART_KINDS[kind]
    plotted = sorted(
        (s for s in series_list if s.value_kind in wanted and len(s) > 0),
        key=lambda s: (s.entity_id, s.value_kind),
    )
    if not plotted:
        raise ChartError(f"nothing to plot for chart kind {kind!r}")

    with matplotlib.rc_context({"svg.hashsalt": SVG_HASHSALT}):
        fig, ax = plt.subplots(figsize=(9.0, 4.5))
        try:
            for series in plotted:
                xs = [w.monday() for w in series.weeks()]
                suffix = _KIND_LINE_LABEL[series.value_kind]
                label = f"{series.entity_id} {suffix}".strip()
                style = "--" if series.value_kind == "distrust_proportion" else "-"
                (line,) = ax.plot(xs, series.values(), style, marker="o",
                                  markersize=3, label=label)
                line.set_gid(f"series-{series.entity_id}-{series.value_kind}")

            # a weekly point at Monday covers its whole ISO week, so the
            # plotted range runs through the last week's Sunday
            lo = min(w.monday() for s in plotted for w in s.weeks())
            hi = max(w.monday() for s in plotted for w in s.weeks()) + dt.timedelta(days=6)
            for event in events:
                if not lo <= event.date <= hi:
                    log.warning("event %r (%s) outside plotted range, marker omitted",
                                event.label, event.date)
                    continue
                line = ax.axvline(event.date, color="0.45", linestyle=":", linewidth=1.0)
                line.set_gid(f"event-marker-{event.date.isoformat()}")
                ax.annotate(
                    event.label,
                    xy=(event.date, 1.0),
                    xycoords=("data", "axes fraction"),
                    fontsize=6.5,
                    color="0.35",
                    rotation=90,
                    ha="right",
                    va="top",
                )

            ax.set_title(title)
            ax.set_ylabel(ylabel)
            ax.grid(alpha=0.25)
            ax.legend(loc="best", fontsize=8)
            ax.xaxis.set_major_locator(mdates.AutoDateLocator())
            ax.xaxis.set_major_formatter(mdates.ConciseDateFormatter(ax.xaxis.get_major_locator()))
            fig.autofmt_xdate()
            fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
