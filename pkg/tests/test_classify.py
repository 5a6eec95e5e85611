"""Lexicon baseline, label wire format, and the adapter client."""

import json
import sys
from pathlib import Path

import pytest
from helpers import EchoAdapter, ScriptedAdapter, make_mention

from trustan import (
    AdapterCrash,
    AdapterProtocolError,
    AdapterTimeout,
    ConfigError,
    EthosLabel,
    HttpAdapter,
    Lexicon,
    StdioAdapter,
    classify_corpus,
    classify_external,
    classify_lexicon,
)

MINI_ADAPTER = Path(__file__).parent / "data" / "mini_adapter.py"

FIXTURE_LEXICON = Lexicon(
    support_cues=["honest", "wise", "good faith"],
    attack_cues=["liar", "fraud", "hypocrite"],
)


def adapter_cmd(fixture_mode="support"):
    return [sys.executable, str(MINI_ADAPTER), fixture_mode]


# --- labels ------------------------------------------------------------------

def test_wire_round_trip():
    for label in EthosLabel:
        assert EthosLabel.from_wire(label.wire) is label


def test_wire_is_case_sensitive():
    for bad in ("Support", "ATTACK", "positive", "", None):
        with pytest.raises(ValueError):
            EthosLabel.from_wire(bad)


# --- lexicon ------------------------------------------------------------------

def test_lexicon_validation():
    with pytest.raises(ConfigError):
        Lexicon(["good"], ["good"])
    with pytest.raises(ConfigError):
        Lexicon(["good", " "], ["bad"])


def test_default_lexicon_loads():
    lex = Lexicon.default()
    assert len(lex.support_cues) == 40
    assert len(lex.attack_cues) == 40
    assert not lex.support_cues & lex.attack_cues


def test_lexicon_from_file(tmp_path):
    path = tmp_path / "lex.json"
    path.write_text(json.dumps({"support": ["ok"], "attack": ["bad"]}), encoding="utf-8")
    lex = Lexicon.from_file(path)
    assert lex.support_cues == {"ok"}
    bad = tmp_path / "bad.json"
    bad.write_text('{"support": []}', encoding="utf-8")
    with pytest.raises(ConfigError):
        Lexicon.from_file(bad)


def test_attack_majority():
    lab = classify_lexicon(make_mention(text="Trump is a liar and a fraud"), FIXTURE_LEXICON)
    assert lab.label is EthosLabel.ATTACK
    assert lab.confidence == 1.0
    assert lab.classifier_id == "lexicon"


def test_zero_hits_none_without_confidence():
    lab = classify_lexicon(make_mention(text="The debate is on Tuesday"), FIXTURE_LEXICON)
    assert lab.label is EthosLabel.NONE
    assert lab.confidence is None


def test_tie_is_none_with_half_confidence():
    lab = classify_lexicon(
        make_mention(text="Harris is honest but a hypocrite"), FIXTURE_LEXICON
    )
    assert lab.label is EthosLabel.NONE
    assert lab.confidence == 0.5


def test_support_majority_and_counting():
    lab = classify_lexicon(
        make_mention(text="Wise and honest, argued in good faith, one liar remark aside."),
        FIXTURE_LEXICON,
    )
    assert lab.label is EthosLabel.SUPPORT
    assert lab.confidence == pytest.approx(3 / 4)


def test_multiword_cue_and_boundaries():
    assert classify_lexicon(
        make_mention(text="He acted in good faith."), FIXTURE_LEXICON
    ).label is EthosLabel.SUPPORT
    # substring inside a longer word does not count
    assert classify_lexicon(
        make_mention(text="The fraudster vibe was unmistakable."), FIXTURE_LEXICON
    ).label is EthosLabel.NONE


def test_no_alphabetic_text_is_none():
    for text in ("12345 !!!", "...", "?? 77 ??"):
        assert classify_lexicon(make_mention(text=text), FIXTURE_LEXICON).label is EthosLabel.NONE


def test_lexicon_deterministic():
    mentions = [make_mention(text=t) for t in ("honest honest fraud", "wise", "nothing")]
    first = [classify_lexicon(m, FIXTURE_LEXICON) for m in mentions]
    second = [classify_lexicon(m, FIXTURE_LEXICON) for m in mentions]
    assert first == second


# --- external classifier client ------------------------------------------------

def test_echo_adapter_batch_in_order():
    batch = [make_mention(text=f"text {i}") for i in range(3)]
    labels = classify_external(batch, EchoAdapter("support"))
    assert [l.label for l in labels] == [EthosLabel.SUPPORT] * 3
    assert [l.mention for l in labels] == batch


def test_out_of_order_responses_restored():
    batch = [make_mention(text=f"text {i}") for i in range(3)]
    labels = classify_external(batch, EchoAdapter("attack", reorder=True))
    assert [l.mention for l in labels] == batch
    assert all(l.label is EthosLabel.ATTACK for l in labels)


def test_unknown_label_names_offending_id():
    batch = [make_mention(text="x")]
    with pytest.raises(AdapterProtocolError, match="'positive' for id 0"):
        classify_external(batch, EchoAdapter("positive"))


def test_duplicate_and_missing_ids_rejected():
    batch = [make_mention(text="a"), make_mention(text="b")]
    dup = ScriptedAdapter([{"id": 0, "label": "none"}, {"id": 0, "label": "none"}])
    with pytest.raises(AdapterProtocolError, match="twice"):
        classify_external(batch, dup)
    missing = ScriptedAdapter([{"id": 0, "label": "none"}])
    with pytest.raises(AdapterProtocolError, match="unanswered"):
        classify_external(batch, missing)
    unknown = ScriptedAdapter([{"id": 0, "label": "none"}, {"id": 7, "label": "none"}])
    with pytest.raises(AdapterProtocolError, match="unknown id"):
        classify_external(batch, unknown)


def test_error_object_and_bad_confidence_rejected():
    batch = [make_mention(text="a")]
    with pytest.raises(AdapterProtocolError, match="adapter error"):
        classify_external(batch, ScriptedAdapter([{"id": None, "error": "boom"}]))
    with pytest.raises(AdapterProtocolError, match="outside"):
        classify_external(batch, EchoAdapter("support", confidence=1.5))


def test_classify_corpus_empty_and_deterministic():
    assert classify_corpus([], FIXTURE_LEXICON) == []
    mentions = [make_mention(text=f"honest {i}") for i in range(10)]
    assert classify_corpus(mentions, FIXTURE_LEXICON) == classify_corpus(mentions, FIXTURE_LEXICON)


def test_classify_corpus_partition_invariance():
    mentions = [make_mention(text=f"text {i}") for i in range(10)]
    one_batch = classify_corpus(mentions, EchoAdapter("none"), batch_size=10)
    singletons = classify_corpus(mentions, EchoAdapter("none"), batch_size=1)
    assert [(l.mention, l.label) for l in one_batch] == [
        (l.mention, l.label) for l in singletons
    ]


def test_label_conservation_both_routes():
    mentions = [make_mention(text=f"honest liar {i}") for i in range(25)]
    assert len(classify_corpus(mentions, FIXTURE_LEXICON)) == len(mentions)
    assert len(classify_corpus(mentions, EchoAdapter("attack"), batch_size=7)) == len(mentions)


# --- stdio transport -------------------------------------------------------------

def test_stdio_adapter_round_trip():
    batch = [make_mention(text=f"line {i}") for i in range(5)]
    with StdioAdapter(adapter_cmd(), timeout=20) as adapter:
        labels = classify_external(batch, adapter)
    assert [l.label for l in labels] == [EthosLabel.SUPPORT] * 5
    assert labels[0].classifier_id.startswith("adapter-cmd:")


def test_stdio_adapter_reorder_restored():
    batch = [make_mention(text=f"line {i}") for i in range(6)]
    with StdioAdapter(adapter_cmd("reverse"), timeout=20) as adapter:
        labels = classify_external(batch, adapter)
    assert [l.mention for l in labels] == batch


def test_stdio_adapter_bad_handshake():
    adapter = StdioAdapter(adapter_cmd("bad-hello"), timeout=20)
    with pytest.raises(AdapterProtocolError, match="announced"):
        adapter.start()


def test_stdio_adapter_crash_carries_diagnostics():
    adapter = StdioAdapter(adapter_cmd("crash"), timeout=20)
    with pytest.raises(AdapterCrash, match="synthetic failure"):
        adapter.start()
        classify_external([make_mention(text="x")], adapter)
    adapter.close()


def test_stdio_adapter_bad_label_via_protocol():
    with StdioAdapter(adapter_cmd("bad-label"), timeout=20) as adapter:
        with pytest.raises(AdapterProtocolError, match="non-canonical"):
            classify_external([make_mention(text="x")], adapter)


def test_stdio_adapter_timeout_is_retriable():
    # announces the protocol, then swallows requests without answering
    hang = [sys.executable, "-c",
            "import json,sys; print(json.dumps({'protocol': 'trustan-adapter/1'}),"
            " flush=True); [None for _ in sys.stdin]"]
    with StdioAdapter(hang, timeout=0.4) as adapter:
        with pytest.raises(AdapterTimeout) as err:
            classify_external([make_mention(text="x")], adapter)
        assert err.value.retriable is True


# --- http transport ---------------------------------------------------------------

class FakeResponse:
    def __init__(self, status_code=200, text="", headers=None):
        self.status_code = status_code
        self.text = text
        self.headers = headers or {}


class FakeSession:
    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = []

    def post(self, url, data=None, headers=None, timeout=None):
        self.calls.append((url, data))
        resp = self.responses.pop(0)
        if isinstance(resp, Exception):
            raise resp
        return resp

    def close(self):
        pass


def _ndjson(objs):
    return "".join(json.dumps(o) + "\n" for o in objs)


def test_http_adapter_round_trip_with_protocol_line():
    body = _ndjson([
        {"protocol": "trustan-adapter/1"},
        {"id": 1, "label": "attack"},
        {"id": 0, "label": "support"},
    ])
    session = FakeSession([FakeResponse(200, body)])
    adapter = HttpAdapter("http://adapter.test/classify", session=session)
    labels = classify_external([make_mention(text="a"), make_mention(text="b")], adapter)
    assert [l.label for l in labels] == [EthosLabel.SUPPORT, EthosLabel.ATTACK]
    sent = session.calls[0][1].decode("utf-8").splitlines()
    assert json.loads(sent[0]) == {"id": 0, "text": "a"}


def test_http_adapter_wrong_protocol_rejected():
    session = FakeSession([FakeResponse(200, _ndjson([{"protocol": "bogus/1"}]))])
    adapter = HttpAdapter("http://adapter.test", session=session)
    with pytest.raises(AdapterProtocolError, match="announced"):
        adapter.submit([{"id": 0, "text": "x"}])


def test_http_adapter_status_handling():
    import requests

    retriable = FakeSession([FakeResponse(429)])
    with pytest.raises(AdapterTimeout):
        HttpAdapter("http://a", session=retriable).submit([{"id": 0, "text": "x"}])
    server_err = FakeSession([FakeResponse(503)])
    with pytest.raises(AdapterTimeout):
        HttpAdapter("http://a", session=server_err).submit([{"id": 0, "text": "x"}])
    fatal = FakeSession([FakeResponse(404)])
    with pytest.raises(AdapterProtocolError):
        HttpAdapter("http://a", session=fatal).submit([{"id": 0, "text": "x"}])
    timed_out = FakeSession([requests.Timeout("slow")])
    with pytest.raises(AdapterTimeout):
        HttpAdapter("http://a", session=timed_out).submit([{"id": 0, "text": "x"}])
