"""
run_trace.py — Run manifest for rmhd-dg.

``manifest.json`` in a run's output directory is a JSON list with one object
per invocation: run id, UTC start/finish stamps, status, the fully resolved
parameters, one record per phase (setup, integrate, output) and a summary
derived from those records. The file is rewritten atomically after every
phase, so an interrupted run still leaves a readable manifest.
"""
from __future__ import annotations

import json
import time
import uuid
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterator

from .forensic_logger import _jsonable

# phase keys lifted into the run summary, with their defaults
SUMMARY_KEYS = {
    "steps": 0,
    "final_time": None,
    "max_troubled_fraction": 0.0,
    "limiter_fallbacks": 0,
}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def new_run_id() -> str:
    return f"{_now()}_{uuid.uuid4().hex[:8]}"


class RunTrace:
    """Manifest writer for the runs sharing one output directory."""

    def __init__(self, trace_path: Path):
        self.path = Path(trace_path)
        self.runs: list[dict] = self._load()
        self._run: dict | None = None
        self._clock: dict[str, tuple[str, float]] = {}

    @property
    def run_id(self) -> str | None:
        return None if self._run is None else self._run["run_id"]

    def begin_run(self, parameters: dict[str, Any], run_id: str | None = None) -> str:
        self._run = {
            "run_id": run_id or new_run_id(),
            "started_at": _now(),
            "finished_at": None,
            "status": "running",
            "error": None,
            "parameters": dict(parameters),
            "phases": {},
            "summary": {},
        }
        self.runs.append(self._run)
        self._flush()
        return self._run["run_id"]

    def begin_phase(self, phase: str) -> None:
        self._clock[phase] = (_now(), time.perf_counter())

    def end_phase(self, phase: str, status: str, metadata: dict[str, Any] | None = None) -> None:
        if self._run is None:
            return
        started_at, t0 = self._clock.pop(phase, (None, None))
        record: dict[str, Any] = {
            "started_at": started_at,
            "finished_at": _now(),
            "seconds": None if t0 is None else round(time.perf_counter() - t0, 3),
            "status": status,
        }
        record.update(metadata or {})
        self._run["phases"][phase] = record
        self._flush()

    @contextmanager
    def phase(self, phase: str) -> Iterator[dict[str, Any]]:
        """Time a phase; the yielded dict becomes its metadata.

        An exception closes the phase as ``failed`` with the error text and
        propagates.
        """
        metadata: dict[str, Any] = {}
        self.begin_phase(phase)
        try:
            yield metadata
        except BaseException as exc:
            metadata.setdefault("error", f"{type(exc).__name__}: {exc}")
            self.end_phase(phase, "failed", metadata)
            raise
        self.end_phase(phase, "ok", metadata)

    def end_run(self, status: str = "ok", error: str | None = None, **extra: Any) -> None:
        """Close the current run; ``extra`` entries are added to its summary."""
        if self._run is None:
            return
        self._run["finished_at"] = _now()
        self._run["status"] = status
        self._run["error"] = error
        self._run["summary"] = {**self._summary(self._run), **extra}
        self._flush()
        self._run = None

    @staticmethod
    def _summary(run: dict) -> dict:
        phases = run["phases"]
        integrate = phases.get("integrate", {})
        summary: dict[str, Any] = {key: integrate.get(key, default) for key, default in SUMMARY_KEYS.items()}
        try:
            elapsed = datetime.fromisoformat(run["finished_at"]) - datetime.fromisoformat(run["started_at"])
            summary["total_time_seconds"] = round(elapsed.total_seconds(), 3)
        except (TypeError, ValueError):
            summary["total_time_seconds"] = None
        summary["phase_seconds"] = {name: rec.get("seconds") for name, rec in phases.items()}
        summary["errors"] = [f"{name}: {rec['error']}" for name, rec in phases.items() if rec.get("error")]
        return summary

    def _load(self) -> list[dict]:
        if not self.path.exists():
            return []
        try:
            data = json.loads(self.path.read_text(encoding="utf-8"))
        except (json.JSONDecodeError, OSError):
            data = None
        if isinstance(data, list):
            return data
        # unreadable manifest: set it aside as .json.bak
        try:
            self.path.replace(self.path.with_suffix(".json.bak"))
        except OSError:
            pass
        return []

    def _flush(self) -> None:
        tmp = self.path.with_suffix(".tmp")
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            tmp.write_text(json.dumps(self.runs, indent=2, ensure_ascii=False, default=_jsonable),
                           encoding="utf-8")
            tmp.replace(self.path)
        except OSError:
            pass
