"""Shared builders for pipeline objects used across the test modules."""

import datetime as dt
import itertools

from trustan import (
    EthosLabel,
    LabeledMention,
    MentionSentence,
    Post,
    Sentence,
    WeekIndex,
    WeeklySeries,
)

UTC = dt.timezone.utc

_counter = itertools.count()


def utc(year, month, day, hour=0, minute=0, second=0):
    return dt.datetime(year, month, day, hour, minute, second, tzinfo=UTC)


def make_post(post_id=None, body="Hello there.", ts=None, thread_id="th-1", author="user"):
    return Post(
        post_id=post_id or f"p{next(_counter):05d}",
        thread_id=thread_id,
        author=author,
        created_at=ts or utc(2024, 7, 1, 12),
        body=body,
    )


def make_sentence(text="Example text.", ts=None, post_id=None, ordinal=0):
    post_id = post_id or f"p{next(_counter):05d}"
    return Sentence(f"{post_id}#{ordinal}", post_id, ordinal, ts or utc(2024, 7, 1, 12), text)


def make_mention(entity="TRUMP", text="Trump spoke.", ts=None):
    return MentionSentence(make_sentence(text=text, ts=ts), entity)


def make_labeled(entity="TRUMP", label=EthosLabel.NONE, ts=None, text="Trump spoke.",
                 confidence=None, classifier_id="lexicon"):
    return LabeledMention(make_mention(entity, text, ts), label, confidence, classifier_id)


def make_series(values, entity="X", kind="ratio", iso_year=2024, first_week=20, weeks=None):
    """Series over consecutive weeks, or over explicit (year, week) pairs."""
    if weeks is None:
        idx = [WeekIndex.from_ordinal(WeekIndex(iso_year, first_week).week_ordinal + i)
               for i in range(len(values))]
    else:
        idx = [WeekIndex(y, w) for y, w in weeks]
    return WeeklySeries(entity, tuple(zip(idx, values)), kind)


class EchoAdapter:
    """In-process fixture: answers every id with a fixed or text-keyed label."""

    classifier_id = "adapter-echo"

    def __init__(self, label="support", reorder=False, confidence=None):
        self.label = label
        self.reorder = reorder
        self.confidence = confidence
        self.batches = []

    def submit(self, requests_batch):
        self.batches.append([r["id"] for r in requests_batch])
        responses = []
        for req in requests_batch:
            resp = {"id": req["id"], "label": self.label}
            if self.confidence is not None:
                resp["confidence"] = self.confidence
            responses.append(resp)
        if self.reorder:
            responses = responses[::-1]
        return responses


class ScriptedAdapter:
    """Fixture returning exactly the responses it was given."""

    classifier_id = "adapter-scripted"

    def __init__(self, responses):
        self.responses = responses

    def submit(self, requests_batch):
        return self.responses
