"""Tests for rmhd_dg.runner: single runs and convergence sweeps."""
import json

import pytest

from rmhd_dg.dg.errors import NoExactSolutionError, RecoveryError
from rmhd_dg.output import read_rows
from rmhd_dg.run_config import RunConfig
from rmhd_dg.runner import convergence_sweep, run, simulate


def _events(out_dir):
    (path,) = (out_dir / "events").glob("*.jsonl")
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


class TestRun:
    def test_smooth_run_writes_artefacts(self, isolated_output_dir):
        config = RunConfig(problem="smooth1d", K=1, N=8, t_end=0.02)
        result = run(config)

        assert result.output_dir == isolated_output_dir / "smooth1d_noncentral_P1_N8"
        assert result.final_time == pytest.approx(0.02)
        assert result.steps >= 1
        for name in ("fields.csv", "troubled_cells.csv", "errors.csv", "manifest.json"):
            assert (result.output_dir / name).exists()

        fields = read_rows(result.output_dir / "fields.csv")
        assert len(fields) == 8
        troubled = read_rows(result.output_dir / "troubled_cells.csv")
        assert len(troubled) == result.steps
        errors = read_rows(result.output_dir / "errors.csv")
        assert errors[0]["N"] == "8"
        assert float(errors[0]["l1_By"]) < 0.05
        assert result.errors.l1["By"] == pytest.approx(float(errors[0]["l1_By"]))

    def test_manifest_and_events(self):
        result = run(RunConfig(problem="smooth1d", K=1, N=8, t_end=0.01))
        manifest = json.loads((result.output_dir / "manifest.json").read_text(encoding="utf-8"))
        entry = manifest[-1]
        assert entry["run_id"] == result.run_id
        assert entry["status"] == "ok"
        assert entry["parameters"]["cfl"] == pytest.approx(0.3)
        assert set(entry["phases"]) == {"setup", "integrate", "output"}
        assert entry["summary"]["steps"] == result.steps

        entries = _events(result.output_dir)
        events = [e["event"] for e in entries]
        assert events[0] == "run_start"
        assert events.count("step") == result.steps
        assert events[-1] == "run_end"
        steps = [e for e in entries if e["event"] == "step"]
        assert [e["step"] for e in steps] == list(range(1, result.steps + 1))
        assert entry["summary"]["events"]["step"] == result.steps

    def test_riemann_problem_has_no_error_table(self):
        result = run(RunConfig(problem="rp1", K=1, N=20, M=0.0, max_steps=2))
        assert result.steps == 2
        assert result.errors is None
        assert not (result.output_dir / "errors.csv").exists()
        assert result.max_troubled_fraction > 0.0

    def test_snapshots(self):
        result = run(RunConfig(problem="smooth1d", K=1, N=8, max_steps=4, output_every=2))
        snaps = sorted(p.name for p in (result.output_dir / "snapshots").iterdir())
        assert snaps == ["fields_000002.csv", "fields_000004.csv"]

    def test_central_run_dumps_dual(self):
        result = run(RunConfig(problem="smooth1d", method="central", K=1, N=8, max_steps=2, dump_dual=True))
        assert len(read_rows(result.output_dir / "fields_dual.csv")) == 8
        assert "dual_count" in read_rows(result.output_dir / "troubled_cells.csv")[0]

    def test_solver_failure_is_recorded(self, mocker):
        mocker.patch("rmhd_dg.runner.integrate",
                     side_effect=RecoveryError("Newton iteration stalled", cell=(3,)))
        config = RunConfig(problem="smooth1d", K=1, N=8, t_end=0.01)
        with pytest.raises(RecoveryError) as info:
            run(config)
        assert info.value.time == 0.0

        out_dir = config.resolved_output_dir() / config.run_name()
        entry = json.loads((out_dir / "manifest.json").read_text(encoding="utf-8"))[-1]
        assert entry["status"] == "failed"
        assert "kind=recovery-failure" in entry["error"]
        failure = [e for e in _events(out_dir) if e["event"] == "failure"][0]
        assert failure["data"]["kind"] == "recovery-failure"
        assert failure["data"]["cell"] == [3]

    @pytest.mark.slow
    def test_central_2d_run(self):
        result = run(RunConfig(problem="orszag-tang", method="central", K=1, N=8, max_steps=2))
        divergence = read_rows(result.output_dir / "divergence.csv")
        assert len(divergence) == 2
        assert all(float(row["max_divergence"]) < 1e-10 for row in divergence)
        assert len(read_rows(result.output_dir / "fields.csv")) == 64


class TestSimulate:
    def test_no_files_written(self, isolated_output_dir):
        sim = simulate(RunConfig(problem="smooth1d", K=2, N=8, max_steps=1))
        assert sim.steps == 1
        assert sim.divergence == []
        assert not isolated_output_dir.exists()


class TestConvergenceSweep:
    def test_requires_exact_solution(self):
        with pytest.raises(NoExactSolutionError):
            convergence_sweep(RunConfig(problem="rp1"), [10, 20])

    def test_table(self):
        rows, path = convergence_sweep(RunConfig(problem="smooth1d", K=1, t_end=0.05), [8, 16])
        assert path.name == "convergence.csv"
        assert [row["N"] for row in rows] == [8, 16]
        assert rows[0]["order_By"] is None
        assert rows[1]["l1_By"] < rows[0]["l1_By"]
        assert rows[1]["order_By"] > 1.5
        table = read_rows(path)
        assert table[0]["order_By"] == ""
