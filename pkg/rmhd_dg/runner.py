"""
Run orchestration: one simulation, or a convergence sweep.

run() resolves a RunConfig, builds the scheme, marches it to t_end and
emits the field dump, troubled-cell history, divergence history (2D), the
error table (smooth problems), the manifest and the JSONL event log.
convergence_sweep() repeats run() over a list of resolutions, in parallel
when ``workers`` > 1, and tabulates errors and observed orders.
"""
from __future__ import annotations

import concurrent.futures
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import forensic_logger as flog
from .console_utils import safe_print, verbose_print
from .dg.errors import NoExactSolutionError, RmhdError
from .dg.physics import PRIM_NAMES
from .dg.problems import ErrorReport, convergence_orders, error_report, get_problem
from .dg.schemes import build_scheme
from .dg.time_integration import StepControl, StepRecord, integrate
from .output import (
    write_divergence_history,
    write_error_table,
    write_fields,
    write_rows,
    write_troubled_history,
)
from .run_config import RunConfig
from .run_trace import RunTrace, new_run_id

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    run_id: str
    output_dir: Path
    parameters: dict[str, Any]
    final_time: float
    steps: int
    max_troubled_fraction: float = 0.0
    limiter_fallbacks: int = 0
    errors: ErrorReport | None = None
    files: list[Path] = field(default_factory=list)


@dataclass
class Simulation:
    """In-memory outcome of a run, before anything is written."""

    scheme: Any
    state: Any
    t: float
    steps: int
    troubled: list[dict]
    divergence: list[dict]
    snapshots: list[tuple[int, float, Any]]


def _troubled_record(scheme, t: float) -> dict:
    flags = scheme.last_flags
    rec = {"t": t, "count": 0, "fraction": 0.0, "dual_count": 0, "dual_fraction": 0.0,
           "edge_count": 0, "fallbacks": 0}
    if flags is not None:
        rec.update(count=flags.count, fraction=flags.fraction, dual_count=flags.dual_count,
                   dual_fraction=flags.dual_fraction, edge_count=flags.edge_count,
                   fallbacks=flags.fallbacks)
    return rec


def _divergence_record(scheme, state, t: float) -> dict | None:
    report = scheme.divergence_report(state)
    if report is None:
        return None
    return {"t": t, "max_divergence": report.max_divergence, "max_jump": report.max_jump,
            "max_compatibility": report.max_compatibility}


def prepare(config: RunConfig, params: dict[str, Any]):
    """Scheme, projected initial state and step control for a resolved config."""
    spec = get_problem(config.problem)
    scheme = build_scheme(spec, config.method, config.K, tuple(params["cells"]), params["M"],
                          config.limiter, config.lf_alpha, config.floor_values() or False)
    control = StepControl(params["cfl"], params["t_end"], config.scheme, params["theta"],
                          config.limiter, config.max_steps)
    return scheme, scheme.initial_state(), control


def simulate(config: RunConfig, params: dict[str, Any] | None = None, prepared=None) -> Simulation:
    """Build and integrate without touching the disk (events still go to the active log)."""
    params = params or config.resolve()
    scheme, state, control = prepared or prepare(config, params)

    troubled: list[dict] = []
    divergence: list[dict] = []
    snapshots: list[tuple[int, float, Any]] = []
    first = _divergence_record(scheme, state, 0.0)
    if first is not None:
        divergence.append(first)
    progress = {"t": 0.0}

    def on_step(st, rec: StepRecord) -> None:
        progress["t"] = rec.t
        row = _troubled_record(scheme, rec.t)
        troubled.append(row)
        flog.set_step(rec.step, rec.t)
        flog.log_event("step", {"dt": rec.dt, "troubled": row["count"], "dual_troubled": row["dual_count"]})
        if row["fallbacks"]:
            flog.log_event("limiter_fallback", {"cells": row["fallbacks"]})
        if config.output_every and rec.step % config.output_every == 0:
            snapshots.append((rec.step, rec.t, st))
            div = _divergence_record(scheme, st, rec.t)
            if div is not None:
                divergence.append(div)

    try:
        state, t, steps = integrate(scheme, state, control, on_step=on_step)
    except RmhdError as exc:
        if exc.time is None:
            exc.time = progress["t"]
        raise
    finally:
        flog.set_step(None)
    if not config.output_every or steps % config.output_every:
        last = _divergence_record(scheme, state, t)
        if last is not None:
            divergence.append(last)
    return Simulation(scheme, state, t, steps, troubled, divergence, snapshots)


def _write_outputs(config: RunConfig, sim: Simulation, out_dir: Path) -> tuple[list[Path], ErrorReport | None]:
    scheme = sim.scheme
    files = []
    coords, prim = scheme.center_values(sim.state)
    files.append(write_fields(out_dir / "fields.csv", coords, prim))
    for step, t, st in sim.snapshots:
        coords, prim = scheme.center_values(st)
        files.append(write_fields(out_dir / "snapshots" / f"fields_{step:06d}.csv", coords, prim))
    if config.dump_dual and scheme.method == "central":
        coords, prim = scheme.center_values(sim.state, "dual")
        files.append(write_fields(out_dir / "fields_dual.csv", coords, prim))
    files.append(write_troubled_history(out_dir / "troubled_cells.csv", sim.troubled,
                                        central=scheme.method == "central"))
    if scheme.dim == 2:
        files.append(write_divergence_history(out_dir / "divergence.csv", sim.divergence))

    report = None
    if scheme.spec.has_exact:
        values, coords, weights = scheme.quadrature_values(sim.state)
        report = error_report(scheme.spec, values, coords, weights, sim.t)
        row = {"N": report.cells[0], "t": sim.t, **report.as_row()}
        files.append(write_error_table(out_dir / "errors.csv", [row]))
    return files, report


def run(config: RunConfig) -> RunResult:
    """Execute one simulation and write every artefact into its output directory."""
    params = config.resolve()
    out_dir = config.resolved_output_dir() / config.run_name()
    out_dir.mkdir(parents=True, exist_ok=True)

    trace = RunTrace(out_dir / "manifest.json")
    run_id = trace.begin_run(params, new_run_id())
    flog.init_forensic_log(out_dir, run_id)
    flog.set_phase("setup")
    flog.log_event("run_start", params)
    verbose_print(f"{config.run_name()}: {params['cells']} cells, cfl={params['cfl']}, "
                  f"M={params['M']}, theta={params['theta']}, t_end={params['t_end']}", "INFO")

    try:
        with trace.phase("setup") as meta:
            prepared = prepare(config, params)
            meta["scheme"] = type(prepared[0]).__name__

        flog.set_phase("integrate")
        with trace.phase("integrate") as meta:
            sim = simulate(config, params, prepared)
            max_fraction = max((r["fraction"] for r in sim.troubled), default=0.0)
            fallbacks = sum(r["fallbacks"] for r in sim.troubled)
            meta.update(steps=sim.steps, final_time=sim.t,
                        max_troubled_fraction=max_fraction, limiter_fallbacks=fallbacks)

        flog.set_phase("output")
        with trace.phase("output") as meta:
            files, report = _write_outputs(config, sim, out_dir)
            if report is not None:
                flog.log_event("errors", report.as_row())
            meta["files"] = [p.name for p in files]
    except BaseException as exc:
        flog.log_failure(exc)
        trace.end_run("failed", exc.describe() if isinstance(exc, RmhdError) else f"{type(exc).__name__}: {exc}",
                      events=flog.event_counts())
        flog.close_forensic_log()
        raise

    flog.log_event("run_end", {"steps": sim.steps, "t": sim.t})
    trace.end_run("ok", events=flog.event_counts())
    flog.close_forensic_log()
    files.append(out_dir / "manifest.json")
    safe_print(f"{config.run_name()}: reached t={sim.t:.6g} in {sim.steps} steps "
               f"(max troubled fraction {max_fraction:.3f})", "SUCCESS")
    return RunResult(run_id, out_dir, params, sim.t, sim.steps, max_fraction, fallbacks, report, files)


def _run_worker(config: RunConfig) -> RunResult:
    return run(config)


def convergence_sweep(config: RunConfig, resolutions: Sequence[int]) -> tuple[list[dict], Path]:
    """Run each resolution and write convergence.csv.

    Rows: N, l1 error per primitive component, observed order per component
    (empty on the first row).
    """
    spec = get_problem(config.problem)
    if not spec.has_exact:
        raise NoExactSolutionError(f"problem {spec.id!r} has no exact solution to converge against")
    resolutions = [int(n) for n in resolutions]
    configs = [config.with_overrides(N=n, Ny=None) for n in resolutions]

    if config.workers > 1 and len(configs) > 1:
        results: dict[int, RunResult] = {}
        with concurrent.futures.ProcessPoolExecutor(max_workers=config.workers) as executor:
            future_to_n = {executor.submit(_run_worker, cfg): cfg.N for cfg in configs}
            for future in concurrent.futures.as_completed(future_to_n):
                n = future_to_n[future]
                results[n] = future.result()
                verbose_print(f"sweep: N={n} finished", "INFO")
        ordered = [results[n] for n in resolutions]
    else:
        ordered = [run(cfg) for cfg in configs]

    rows = [{"N": n} for n in resolutions]
    for name in PRIM_NAMES:
        errs = [res.errors.l1[name] for res in ordered]
        orders = convergence_orders(errs, resolutions)
        for row, e, o in zip(rows, errs, orders):
            row[f"l1_{name}"] = e
            row[f"order_{name}"] = o

    out_dir = config.resolved_output_dir() / f"{config.problem}_{config.method}_P{config.K}_sweep"
    header = ["N"] + [f"{kind}_{name}" for name in PRIM_NAMES for kind in ("l1", "order")]
    path = write_rows(out_dir / "convergence.csv", header, ([row[c] for c in header] for row in rows))
    if spec.error_component:
        for row in rows:
            order = row[f"order_{spec.error_component}"]
            safe_print(f"N={row['N']:>5d}  l1({spec.error_component})={row[f'l1_{spec.error_component}']:.3e}  "
                       f"order={'--' if order is None else f'{order:.2f}'}", "INFO")
    return rows, path
