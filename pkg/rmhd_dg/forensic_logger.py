"""
forensic_logger.py — Append-only JSONL event log for solver runs.

One line per event in <output_dir>/events/<run_id>.jsonl::

    {"ts": ..., "phase": "integrate", "step": 12, "t": 0.0431,
     "event": "limiter_fallback", "data": {"cells": 2}}

``step``/``t`` are present once the integrator has reported a step. The
module keeps a single active log; every function is a no-op while no log is
open, so the numerical core can be used as a library without side effects.
"""
from __future__ import annotations

import json
from collections import Counter
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Any

import numpy as np


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def _jsonable(value: Any):
    """json.dumps default: numpy scalars/arrays, paths, then str()."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return str(value)


class EventLog:
    """An open JSONL file plus the phase/step context stamped on each line."""

    def __init__(self, path: Path):
        self.path = path
        self.phase: str | None = None
        self.step: int | None = None
        self.time: float | None = None
        self.counts: Counter[str] = Counter()
        self._fh: IO[str] | None = open(path, "a", encoding="utf-8")

    def write(self, event: str, data: dict[str, Any] | None) -> None:
        if self._fh is None:
            return
        entry: dict[str, Any] = {"ts": _now(), "phase": self.phase}
        if self.step is not None:
            entry["step"] = self.step
            entry["t"] = self.time
        entry["event"] = event
        if data:
            entry["data"] = data
        try:
            self._fh.write(json.dumps(entry, ensure_ascii=False, default=_jsonable) + "\n")
            self._fh.flush()
        except (OSError, ValueError):
            return
        self.counts[event] += 1

    def close(self) -> None:
        if self._fh is None:
            return
        try:
            self._fh.close()
        except OSError:
            pass
        self._fh = None


_active: EventLog | None = None


def init_forensic_log(log_dir: Path, run_id: str) -> None:
    """Open <log_dir>/events/<run_id>.jsonl as the active log, closing any previous one."""
    global _active
    close_forensic_log()
    events_dir = Path(log_dir) / "events"
    events_dir.mkdir(parents=True, exist_ok=True)
    _active = EventLog(events_dir / f"{run_id.replace(':', '-')}.jsonl")


def set_phase(phase: str | None) -> None:
    if _active is not None:
        _active.phase = phase


def set_step(step: int | None, t: float | None = None) -> None:
    """Stamp subsequent events with the integrator step and time (None clears)."""
    if _active is not None:
        _active.step = step
        _active.time = None if step is None else t


def log_event(event: str, data: dict[str, Any] | None = None) -> None:
    if _active is not None:
        _active.write(event, data)


def log_failure(exc: BaseException) -> None:
    """Record an exception; solver errors contribute kind, cell and time."""
    kind = getattr(exc, "kind", None) or type(exc).__name__
    data: dict[str, Any] = {"kind": kind, "message": str(exc)}
    for attr in ("cell", "time"):
        value = getattr(exc, attr, None)
        if value is not None:
            data[attr] = value
    log_event("failure", data)


def event_counts() -> dict[str, int]:
    return dict(_active.counts) if _active is not None else {}


def get_forensic_log_path() -> Path | None:
    return _active.path if _active is not None else None


def close_forensic_log() -> None:
    global _active
    if _active is not None:
        _active.close()
    _active = None
