"""Protocol conformance of the stdio serving loop."""

import json

from adapter_harness import read_handshake, read_responses, send_lines, send_requests, spawn_adapter


def test_announces_protocol_first():
    proc = spawn_adapter()
    try:
        assert read_handshake(proc) == {"protocol": "trustan-adapter/1"}
    finally:
        proc.stdin.close()
        assert proc.wait(timeout=10) == 0


def test_eof_right_after_handshake_exits_clean():
    proc = spawn_adapter()
    read_handshake(proc)
    proc.stdin.close()
    assert proc.wait(timeout=10) == 0
    assert proc.stdout.read() == ""


def test_flush_answers_every_pending_id_in_arrival_order():
    proc = spawn_adapter()
    read_handshake(proc)
    requests = [{"id": i, "text": f"point {i}: wise"} for i in (3, 1, 4, 1_0, 5)]
    send_requests(proc, requests)
    responses = read_responses(proc, len(requests))
    assert [r["id"] for r in responses] == [3, 1, 4, 10, 5]
    assert all(r["label"] == "support" for r in responses)
    proc.stdin.close()
    assert proc.wait(timeout=10) == 0


def test_interleaved_flush_groups():
    proc = spawn_adapter()
    read_handshake(proc)
    for base in (0, 10, 20):
        group = [{"id": base + i, "text": "liar" if i % 2 else "honest"} for i in range(4)]
        send_requests(proc, group)
        responses = read_responses(proc, 4)
        assert [r["id"] for r in responses] == [base + i for i in range(4)]
        assert [r["label"] for r in responses] == ["support", "attack"] * 2
    proc.stdin.close()
    assert proc.wait(timeout=10) == 0


def test_malformed_lines_yield_error_objects_and_loop_continues():
    proc = spawn_adapter()
    read_handshake(proc)
    send_lines(proc, [
        "this is not json",
        json.dumps({"id": 1}),                      # missing text
        json.dumps({"id": "seven", "text": "x"}),   # non-integer id
        json.dumps({"text": "no id"}),
        json.dumps({"id": 2, "text": "still works, wise choice"}),
        "",
    ])
    responses = read_responses(proc, 5)
    errors = [r for r in responses if "error" in r]
    assert len(errors) == 4
    assert all(r["id"] is None for r in errors)
    assert any("text" in r["error"] for r in errors)
    ok = [r for r in responses if "error" not in r]
    assert ok == [{"id": 2, "label": "support"}]
    proc.stdin.close()
    assert proc.wait(timeout=10) == 0


def test_eof_with_pending_requests_still_answers():
    proc = spawn_adapter()
    read_handshake(proc)
    send_requests(proc, [{"id": 9, "text": "corrupt"}], flush=False)
    proc.stdin.close()  # EOF without a blank-line flush
    assert json.loads(proc.stdout.readline()) == {"id": 9, "label": "attack"}
    assert proc.wait(timeout=10) == 0


def test_blank_flush_with_nothing_pending_is_noop():
    proc = spawn_adapter()
    read_handshake(proc)
    send_lines(proc, ["", "", ""])
    send_requests(proc, [{"id": 0, "text": "ok"}])
    assert read_responses(proc, 1) == [{"id": 0, "label": "none"}]
    proc.stdin.close()
    assert proc.wait(timeout=10) == 0


def test_custom_label_map_flag():
    proc = spawn_adapter("--label-map", '{"0":"support","1":"attack","2":"none"}')
    read_handshake(proc)
    send_requests(proc, [{"id": 0, "text": "a fraud and a liar"}])
    assert read_responses(proc, 1) == [{"id": 0, "label": "attack"}]
    proc.stdin.close()
    assert proc.wait(timeout=10) == 0


def test_usage_error_exit_codes():
    import subprocess
    import sys

    both = subprocess.run(
        [sys.executable, "-m", "trustan_adapter", "--stub", "--model", "x"],
        capture_output=True, text=True,
    )
    assert both.returncode == 2  # argparse mutual exclusion

    bad_map = subprocess.run(
        [sys.executable, "-m", "trustan_adapter", "--stub",
         "--label-map", '{"0":"support","1":"support","2":"none"}'],
        capture_output=True, text=True,
    )
    assert bad_map.returncode == 3
    assert "bijection" in bad_map.stderr
