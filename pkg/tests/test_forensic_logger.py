"""Tests for forensic_logger module."""
import json

import numpy as np

from rmhd_dg.dg.errors import RecoveryError
from rmhd_dg.forensic_logger import (
    close_forensic_log,
    event_counts,
    get_forensic_log_path,
    init_forensic_log,
    log_event,
    log_failure,
    set_phase,
    set_step,
)


def _lines(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").strip().split("\n")]


class TestForensicLoggerInit:
    def test_creates_events_directory(self, tmp_path):
        init_forensic_log(tmp_path / "run", "test-run-001")
        assert (tmp_path / "run" / "events").is_dir()
        close_forensic_log()

    def test_creates_jsonl_file(self, tmp_path):
        init_forensic_log(tmp_path, "test-run-001")
        path = get_forensic_log_path()
        assert path is not None
        assert path.name == "test-run-001.jsonl"
        assert path.exists()
        close_forensic_log()

    def test_colons_in_run_id_are_replaced(self, tmp_path):
        init_forensic_log(tmp_path, "2026-01-01T12:00:00_abc")
        assert get_forensic_log_path().name == "2026-01-01T12-00-00_abc.jsonl"
        close_forensic_log()


class TestLogEvent:
    def test_appends_valid_jsonl(self, tmp_path):
        init_forensic_log(tmp_path, "run1")
        log_event("step", {"step": 1, "t": 0.01})
        log_event("step", {"step": 2, "t": 0.02})
        close_forensic_log()

        entries = _lines(tmp_path / "events" / "run1.jsonl")
        assert len(entries) == 2
        assert entries[0]["event"] == "step"
        assert entries[1]["data"]["t"] == 0.02
        assert "ts" in entries[0]

    def test_includes_phase_context(self, tmp_path):
        init_forensic_log(tmp_path, "run2")
        set_phase("setup")
        log_event("run_start", {"K": 2})
        set_phase("integrate")
        log_event("step", {"step": 1})
        close_forensic_log()

        entries = _lines(tmp_path / "events" / "run2.jsonl")
        assert entries[0]["phase"] == "setup"
        assert entries[1]["phase"] == "integrate"

    def test_numpy_values_are_serialised(self, tmp_path):
        init_forensic_log(tmp_path, "run3")
        log_event("limiter_fallback", {"cells": np.int64(3), "fraction": np.float64(0.25),
                                       "flags": np.array([True, False])})
        close_forensic_log()

        data = _lines(tmp_path / "events" / "run3.jsonl")[0]["data"]
        assert data == {"cells": 3, "fraction": 0.25, "flags": [True, False]}

    def test_event_without_data(self, tmp_path):
        init_forensic_log(tmp_path, "run4")
        log_event("run_end")
        close_forensic_log()
        assert "data" not in _lines(tmp_path / "events" / "run4.jsonl")[0]

    def test_reinit_switches_file(self, tmp_path):
        init_forensic_log(tmp_path, "first")
        log_event("a")
        init_forensic_log(tmp_path, "second")
        log_event("b")
        close_forensic_log()
        assert _lines(tmp_path / "events" / "first.jsonl")[0]["event"] == "a"
        assert _lines(tmp_path / "events" / "second.jsonl")[0]["event"] == "b"


class TestNoInit:
    def test_log_event_noop_without_init(self):
        close_forensic_log()
        log_event("should_not_crash", {"data": "test"})

    def test_path_none_after_close(self, tmp_path):
        init_forensic_log(tmp_path, "run5")
        close_forensic_log()
        assert get_forensic_log_path() is None


class TestStepContext:
    def test_events_carry_step_and_time(self, tmp_path):
        init_forensic_log(tmp_path, "run6")
        log_event("run_start")
        set_step(3, 0.125)
        log_event("step", {"dt": 0.01})
        set_step(None)
        log_event("run_end")
        close_forensic_log()

        start, step, end = _lines(tmp_path / "events" / "run6.jsonl")
        assert "step" not in start
        assert (step["step"], step["t"]) == (3, 0.125)
        assert "step" not in end and "t" not in end


class TestFailuresAndCounts:
    def test_solver_error_fields(self, tmp_path):
        init_forensic_log(tmp_path, "run7")
        log_failure(RecoveryError("stalled", cell=(2, 5), time=0.5))
        close_forensic_log()

        data = _lines(tmp_path / "events" / "run7.jsonl")[0]["data"]
        assert data == {"kind": "recovery-failure", "message": "stalled", "cell": [2, 5], "time": 0.5}

    def test_generic_exception(self, tmp_path):
        init_forensic_log(tmp_path, "run8")
        log_failure(KeyboardInterrupt())
        close_forensic_log()

        data = _lines(tmp_path / "events" / "run8.jsonl")[0]["data"]
        assert data == {"kind": "KeyboardInterrupt", "message": ""}

    def test_event_counts(self, tmp_path):
        init_forensic_log(tmp_path, "run9")
        for _ in range(3):
            log_event("step")
        log_event("limiter_fallback", {"cells": 1})
        assert event_counts() == {"step": 3, "limiter_fallback": 1}
        close_forensic_log()
        assert event_counts() == {}
