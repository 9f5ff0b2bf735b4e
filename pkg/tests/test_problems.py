"""Tests for rmhd_dg.dg.problems: registry, initial data, exact solutions, error norms."""
import math

import numpy as np
import pytest

from rmhd_dg.dg.basis import gauss_rule
from rmhd_dg.dg.errors import NoExactSolutionError, UnknownProblemError
from rmhd_dg.dg.physics import check_primitive
from rmhd_dg.dg.problems import (
    PROBLEMS,
    SMOOTH_KAPPA,
    convergence_orders,
    error_report,
    exact_state,
    get_problem,
    initial_state,
    list_problems,
)

TWO_D = [pid for pid, spec in PROBLEMS.items() if spec.dim == 2]


class TestRegistry:
    def test_all_benchmarks_registered(self):
        assert set(list_problems()) == {
            "smooth1d", "rp1", "rp2", "rp3", "smooth2d", "orszag-tang", "blast", "rotor", "shock-cloud"}

    def test_unknown_problem(self):
        with pytest.raises(UnknownProblemError, match="choose one of"):
            get_problem("kelvin-helmholtz")

    def test_only_smooth_problems_have_exact_solutions(self):
        assert {pid for pid, spec in PROBLEMS.items() if spec.has_exact} == {"smooth1d", "smooth2d"}

    @pytest.mark.parametrize("problem_id", TWO_D)
    def test_two_d_problems_carry_a_potential(self, problem_id):
        spec = get_problem(problem_id)
        assert spec.vector_potential is not None
        assert spec.bounds_y is not None

    def test_mesh_cells_scale_y(self):
        assert get_problem("smooth2d").mesh_cells(20) == (20, 40)
        assert get_problem("rotor").mesh_cells(20) == (20, 20)
        assert get_problem("rp1").mesh_cells(64) == (64,)

    def test_blast_uses_floors(self):
        assert get_problem("blast").floor_values() is not None
        assert get_problem("rp1").floor_values() is None


class TestInitialData:
    def test_kappa(self):
        assert SMOOTH_KAPPA == pytest.approx(1.5042030, rel=1e-7)

    def test_rp1_left_state(self):
        prim = initial_state("rp1", np.array([-0.1, 0.1]))
        np.testing.assert_allclose(prim[0], [1.0, 0, 0, 0, 0.5, 1.0, 0, 1.0])
        np.testing.assert_allclose(prim[1], [0.125, 0, 0, 0, 0.5, -1.0, 0, 0.1])

    def test_rotor_taper_midpoint(self):
        prim = initial_state("rotor", np.array(0.1075), np.array(0.0))
        assert prim[0] == pytest.approx(5.5)
        assert prim[2] == pytest.approx(9.95 * 0.1 * 0.5)
        assert prim[1] == pytest.approx(0.0)

    def test_rotor_disk_and_ambient(self):
        prim = initial_state("rotor", np.array([0.05, 0.3]), np.array([0.0, 0.0]))
        assert prim[0, 0] == pytest.approx(10.0)
        assert prim[0, 2] == pytest.approx(9.95 * 0.05)
        np.testing.assert_allclose(prim[1], [1.0, 0, 0, 0, 1.0, 0, 0, 1.0])

    def test_smooth2d_origin(self):
        prim = initial_state("smooth2d", np.array(0.0), np.array(0.0))
        np.testing.assert_allclose(prim[:4], [1.0, 0.0, 0.0, 0.1], atol=1e-14)
        np.testing.assert_allclose(prim[4:7], [math.cos(math.pi / 6), math.sin(math.pi / 6), 0.1 * SMOOTH_KAPPA])
        assert prim[7] == pytest.approx(0.1)

    def test_two_d_requires_y(self):
        with pytest.raises(ValueError):
            initial_state("blast", np.zeros(3))

    @pytest.mark.parametrize("problem_id", list(PROBLEMS))
    def test_initial_data_is_physical(self, problem_id):
        spec = get_problem(problem_id)
        rng = np.random.default_rng(3)
        if spec.dim == 1:
            a, b = spec.domain
            prim = initial_state(spec, rng.uniform(a, b, 200))
        else:
            x0, x1, y0, y1 = spec.domain
            prim = initial_state(spec, rng.uniform(x0, x1, 200), rng.uniform(y0, y1, 200))
        assert prim.shape == (200, 8)
        check_primitive(prim)

    @pytest.mark.parametrize("problem_id", TWO_D)
    def test_vector_potential_matches_field(self, problem_id):
        """Centred differences of A_z give (Bx, By) = (dA/dy, -dA/dx) away from jumps."""
        spec = get_problem(problem_id)
        x0, x1, y0, y1 = spec.domain
        rng = np.random.default_rng(11)
        x = rng.uniform(x0 + 0.1, x1 - 0.1, 50)
        y = rng.uniform(y0 + 0.1, y1 - 0.1, 50)
        if problem_id == "shock-cloud":
            x = np.abs(x - 0.05) + 0.1
        eps = 1e-6
        A = spec.vector_potential
        bx = (A(x, y + eps) - A(x, y - eps)) / (2 * eps)
        by = -(A(x + eps, y) - A(x - eps, y)) / (2 * eps)
        prim = initial_state(spec, x, y)
        np.testing.assert_allclose(bx, prim[:, 4], atol=1e-6)
        np.testing.assert_allclose(by, prim[:, 5], atol=1e-6)


class TestExactSolutions:
    def test_initial_matches_exact_at_zero(self):
        x = np.linspace(0.0, 1.0, 17)
        np.testing.assert_allclose(exact_state("smooth1d", x, t=0.0), initial_state("smooth1d", x))

    def test_smooth1d_periodic_in_time(self):
        x = np.linspace(0.0, 1.0, 17)
        np.testing.assert_allclose(exact_state("smooth1d", x, t=SMOOTH_KAPPA), initial_state("smooth1d", x),
                                   atol=1e-12)

    def test_smooth1d_translates(self):
        x = np.linspace(0.0, 1.0, 9)
        shift = 0.25
        np.testing.assert_allclose(exact_state("smooth1d", x, t=shift * SMOOTH_KAPPA),
                                   initial_state("smooth1d", x + shift), atol=1e-12)

    def test_smooth2d_periodic_over_domain(self):
        spec = get_problem("smooth2d")
        x = np.linspace(0.0, 0.3, 5)
        y = np.linspace(0.0, 0.7, 5)
        np.testing.assert_allclose(initial_state(spec, x + spec.domain[1], y), initial_state(spec, x, y),
                                   atol=1e-12)
        np.testing.assert_allclose(initial_state(spec, x, y + spec.domain[3]), initial_state(spec, x, y),
                                   atol=1e-12)

    def test_no_exact_solution(self):
        with pytest.raises(NoExactSolutionError):
            exact_state("rp1", np.zeros(2), t=0.1)


class TestErrorReport:
    def _coords(self, n):
        rule = gauss_rule(3)
        h = 1.0 / n
        x = (np.arange(n)[:, None] + 0.5) * h + 0.5 * h * rule.nodes
        return x, rule.weights

    def test_exact_data_has_zero_error(self):
        x, w = self._coords(10)
        report = error_report("smooth1d", exact_state("smooth1d", x, t=0.3), (x,), w, 0.3)
        assert report.cells == (10,)
        assert max(report.l1.values()) == pytest.approx(0.0, abs=1e-15)
        assert max(report.linf.values()) == pytest.approx(0.0, abs=1e-15)

    def test_constant_offset(self):
        x, w = self._coords(8)
        numerical = exact_state("smooth1d", x, t=0.0)
        numerical[..., 0] += 0.01
        report = error_report("smooth1d", numerical, (x,), w, 0.0)
        assert report.l1["rho"] == pytest.approx(0.01)
        assert report.linf["rho"] == pytest.approx(0.01)
        assert report.l1["p"] == pytest.approx(0.0, abs=1e-15)

    def test_as_row_columns(self):
        x, w = self._coords(4)
        row = error_report("smooth1d", exact_state("smooth1d", x), (x,), w, 0.0).as_row()
        assert set(row) == {f"{kind}_{name}" for kind in ("l1", "linf")
                            for name in ("rho", "vx", "vy", "vz", "Bx", "By", "Bz", "p")}

    def test_no_exact_solution(self):
        x, w = self._coords(4)
        with pytest.raises(NoExactSolutionError):
            error_report("rp2", np.zeros(x.shape + (8,)), (x,), w, 0.1)


class TestConvergenceOrders:
    def test_second_order(self):
        assert convergence_orders([1e-2, 2.5e-3], [10, 20]) == [None, pytest.approx(2.0)]

    def test_three_rows(self):
        orders = convergence_orders([1.0, 0.125, 0.015625], [8, 16, 32])
        assert orders[0] is None
        assert orders[1] == pytest.approx(3.0)
        assert orders[2] == pytest.approx(3.0)

    def test_non_positive_error_has_no_order(self):
        assert convergence_orders([1e-3, 0.0], [10, 20]) == [None, None]

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            convergence_orders([1.0], [10, 20])
