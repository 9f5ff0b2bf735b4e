"""Tests for rmhd_dg.dg.physics: state conversion, fluxes, wave speeds, frames."""
import numpy as np
import pytest

from rmhd_dg.dg.errors import (
    DegenerateFrameError,
    DomainViolationError,
    InadmissibleStateError,
    RecoveryError,
)
from rmhd_dg.dg.physics import (
    Eos,
    Floors,
    PrimitiveState,
    characteristic_frames,
    characteristic_frames_batch,
    check_primitive,
    cons_to_prim,
    flux,
    lorentz_factor,
    magnetic_pressure,
    max_signal_speed,
    prim_to_cons,
    solve_quartic,
    wave_speeds,
)

from .conftest import (
    ALIGNED_FIELD_GAS,
    GENERIC_STATE,
    MAGNETIZED_GAS,
    MOVING_GAS,
    STATIC_GAS,
    random_admissible_states,
    wide_range_states,
)


# ---------------------------------------------------------------------------
# Equation of state / helpers
# ---------------------------------------------------------------------------

class TestEos:
    def test_enthalpy(self, eos53):
        assert eos53.enthalpy(1.0, 0.1) == pytest.approx(1.25)

    def test_sound_speed(self, eos53):
        assert eos53.sound_speed_sq(1.0, 0.1) == pytest.approx(2.0 / 15.0)

    @pytest.mark.parametrize("gamma", [1.0, 0.5])
    def test_rejects_gamma_not_above_one(self, gamma):
        with pytest.raises(DomainViolationError):
            Eos(gamma)


class TestStateHelpers:
    def test_lorentz_factor(self):
        assert lorentz_factor(MOVING_GAS) == pytest.approx(2.0 / np.sqrt(3.0))

    def test_magnetic_pressure_static(self):
        assert magnetic_pressure(MAGNETIZED_GAS) == pytest.approx(0.625)

    def test_primitive_state_roundtrip_to_array(self):
        state = PrimitiveState.from_array(GENERIC_STATE)
        np.testing.assert_array_equal(state.to_array(), GENERIC_STATE)
        assert state.lorentz_factor == pytest.approx(float(lorentz_factor(GENERIC_STATE)))

    def test_check_primitive_superluminal(self):
        bad = STATIC_GAS.copy()
        bad[1] = 1.0
        with pytest.raises(DomainViolationError):
            check_primitive(bad)

    def test_check_primitive_reports_cell(self):
        states = np.tile(STATIC_GAS, (4, 1))
        states[2, 7] = -1.0
        with pytest.raises(DomainViolationError) as exc:
            check_primitive(states)
        assert exc.value.cell == 2
        assert exc.value.kind == "domain-violation"


# ---------------------------------------------------------------------------
# prim_to_cons
# ---------------------------------------------------------------------------

class TestPrimToCons:
    def test_static_gas(self, eos53):
        np.testing.assert_allclose(prim_to_cons(STATIC_GAS, eos53),
                                   [1.0, 0, 0, 0, 0, 0, 0, 1.15], atol=1e-14)

    def test_static_magnetized_gas(self, eos2):
        np.testing.assert_allclose(prim_to_cons(MAGNETIZED_GAS, eos2),
                                   [1.0, 0, 0, 0, 0.5, 1.0, 0, 2.625], atol=1e-14)

    def test_moving_gas(self, eos53):
        u = prim_to_cons(MOVING_GAS, eos53)
        np.testing.assert_allclose(u, [1.1547005, 0.8333333, 0, 0, 0, 0, 0, 1.5666667], atol=1e-7)

    def test_accepts_dataclass_input(self, eos53):
        state = PrimitiveState(1.0, (0.0, 0.0, 0.0), (0.0, 0.0, 0.0), 0.1)
        np.testing.assert_allclose(prim_to_cons(state, eos53), prim_to_cons(STATIC_GAS, eos53))

    def test_rejects_negative_density(self, eos53):
        bad = STATIC_GAS.copy()
        bad[0] = -1.0
        with pytest.raises(DomainViolationError):
            prim_to_cons(bad, eos53)


# ---------------------------------------------------------------------------
# cons_to_prim
# ---------------------------------------------------------------------------

class TestConsToPrim:
    def test_static_gas(self, eos53):
        u = np.array([1.0, 0, 0, 0, 0, 0, 0, 1.15])
        np.testing.assert_allclose(cons_to_prim(u, eos53), STATIC_GAS, atol=1e-12)

    def test_static_magnetized_gas(self, eos2):
        u = np.array([1.0, 0, 0, 0, 0.5, 1.0, 0, 2.625])
        np.testing.assert_allclose(cons_to_prim(u, eos2), MAGNETIZED_GAS, atol=1e-12)

    def test_roundtrip_random_states(self, eos53):
        prim = random_admissible_states(2000)
        back, iterations = cons_to_prim(prim_to_cons(prim, eos53), eos53, return_iterations=True)
        np.testing.assert_allclose(back, prim, rtol=1e-7, atol=1e-9)
        assert iterations.shape == (2000,)
        assert np.mean(iterations <= 8) >= 0.99

    def test_wide_range_states_recover_within_eight_iterations(self, eos53):
        prim = wide_range_states(10_000, seed=11)
        cons = prim_to_cons(prim, eos53)
        recovered, iterations = cons_to_prim(cons, eos53, return_iterations=True)
        back = prim_to_cons(recovered, eos53)
        rel = np.linalg.norm(back - cons, axis=1) / np.linalg.norm(cons, axis=1)
        assert rel.max() <= 1e-10
        assert np.mean(iterations <= 8) >= 0.99

    def test_magnetically_dominated_state(self, eos53):
        # B^2 / p ~ 4e5: the residual is small against B^2-sized terms
        prim = np.array([1.44, -0.002, -0.02, -0.026, -261.0, -67.0, 37.0, 0.179])
        back, iterations = cons_to_prim(prim_to_cons(prim, eos53), eos53, return_iterations=True)
        np.testing.assert_allclose(back, prim, rtol=1e-6, atol=1e-9)
        assert iterations <= 8

    def test_roundtrip_keeps_grid_shape(self, eos53):
        prim = random_admissible_states(12).reshape(3, 4, 8)
        back = cons_to_prim(prim_to_cons(prim, eos53), eos53)
        assert back.shape == (3, 4, 8)
        np.testing.assert_allclose(back, prim, rtol=1e-7, atol=1e-9)

    def test_negative_pressure_is_inadmissible(self, eos53):
        # E < D at rest means a negative thermal energy
        u = np.array([1.0, 0, 0, 0, 0, 0, 0, 0.9])
        with pytest.raises(InadmissibleStateError) as exc:
            cons_to_prim(u[None, :], eos53)
        assert exc.value.cell == 0

    def test_floors_replace_inadmissible_values(self, eos53):
        u = np.array([1.0, 0, 0, 0, 0, 0, 0, 0.9])
        out = cons_to_prim(u, eos53, floors=Floors())
        assert out[7] == pytest.approx(Floors().p)
        assert out[0] == pytest.approx(1.0)

    def test_non_convergence_raises_with_residual(self, eos53):
        u = prim_to_cons(GENERIC_STATE, eos53)
        with pytest.raises(RecoveryError) as exc:
            cons_to_prim(u, eos53, max_iter=1)
        assert exc.value.iterations == 1
        assert np.isfinite(exc.value.residual)
        assert exc.value.kind == "recovery-failure"


# ---------------------------------------------------------------------------
# flux
# ---------------------------------------------------------------------------

class TestFlux:
    def test_static_gas_is_pure_pressure(self, eos53):
        np.testing.assert_allclose(flux(STATIC_GAS, eos53, "x"), [0, 0.1, 0, 0, 0, 0, 0, 0], atol=1e-14)

    def test_static_magnetized_gas(self, eos2):
        np.testing.assert_allclose(flux(MAGNETIZED_GAS, eos2, 0),
                                   [0, 1.375, -0.5, 0, 0, 0, 0, 0], atol=1e-14)

    def test_moving_gas(self, eos53):
        np.testing.assert_allclose(flux(MOVING_GAS, eos53, "x"),
                                   [0.5773503, 0.5166667, 0, 0, 0, 0, 0, 0.8333333], atol=1e-7)

    def test_normal_field_flux_vanishes(self, eos53):
        assert flux(GENERIC_STATE, eos53, "x")[4] == 0.0
        assert flux(GENERIC_STATE, eos53, "y")[5] == 0.0

    def test_y_flux_of_rotated_state(self, eos53):
        """Swapping x and y components maps the x flux onto the y flux."""
        swap = [0, 2, 1, 3, 5, 4, 6, 7]
        fx = flux(GENERIC_STATE, eos53, "x")
        fy = flux(GENERIC_STATE[swap], eos53, "y")
        np.testing.assert_allclose(fy[swap], fx, atol=1e-14)

    def test_bad_direction(self, eos53):
        with pytest.raises(ValueError):
            flux(STATIC_GAS, eos53, "z")


# ---------------------------------------------------------------------------
# Wave speeds
# ---------------------------------------------------------------------------

class TestWaveSpeeds:
    def test_static_gas(self, eos53):
        ws = wave_speeds(STATIC_GAS, eos53)
        assert ws.fast_plus == pytest.approx(0.3651484, abs=1e-7)
        assert ws.fast_minus == pytest.approx(-0.3651484, abs=1e-7)
        for s in (ws.slow_minus, ws.slow_plus, ws.alfven_minus, ws.alfven_plus, ws.entropy):
            assert s == pytest.approx(0.0, abs=1e-12)

    def test_static_gas_aligned_field(self, eos53):
        ws = wave_speeds(ALIGNED_FIELD_GAS, eos53)
        assert ws.fast_plus == pytest.approx(2.0 / 3.0, abs=1e-7)
        assert ws.alfven_plus == pytest.approx(2.0 / 3.0, abs=1e-7)
        assert ws.slow_plus == pytest.approx(0.3651484, abs=1e-7)
        assert ws.slow_minus == pytest.approx(-0.3651484, abs=1e-7)
        assert ws.entropy == pytest.approx(0.0)

    def test_entropy_speed_is_normal_velocity(self, eos53):
        states = random_admissible_states(50)
        np.testing.assert_array_equal(wave_speeds(states, eos53, "y").entropy, states[:, 2])

    def test_speeds_are_ordered(self, eos53):
        speeds = wave_speeds(random_admissible_states(200), eos53, "x").as_array()
        assert np.all(np.diff(speeds, axis=-1) >= -1e-12)

    def test_max_signal_speed_examples(self, eos53):
        assert max_signal_speed(STATIC_GAS, eos53) == pytest.approx(0.3651484, abs=1e-7)
        assert max_signal_speed(ALIGNED_FIELD_GAS, eos53) == pytest.approx(2.0 / 3.0, abs=1e-7)

    def test_max_signal_speed_is_subluminal(self, eos53):
        assert np.all(max_signal_speed(random_admissible_states(200), eos53, 1) < 1.0)


class TestSolveQuartic:
    def test_real_roots(self):
        # (x + 3)(x + 1)(x - 1)(x - 2)
        roots = solve_quartic(1.0, 1.0, -7.0, -1.0, 6.0)
        np.testing.assert_allclose(roots.real, [-3.0, -1.0, 1.0, 2.0], atol=1e-10)
        np.testing.assert_allclose(roots.imag, 0.0, atol=1e-10)

    def test_biquadratic(self):
        # 2.25 l^4 - 1.3 l^2 + 2/15: the aligned-field magnetosonic polynomial
        roots = solve_quartic(2.25, 0.0, -1.3, 0.0, 2.0 / 15.0)
        expected = [-2.0 / 3.0, -np.sqrt(2.0 / 15.0), np.sqrt(2.0 / 15.0), 2.0 / 3.0]
        np.testing.assert_allclose(roots.real, expected, atol=1e-10)


# ---------------------------------------------------------------------------
# Characteristic frames
# ---------------------------------------------------------------------------

class TestCharacteristicFrames:
    def test_left_right_are_inverse(self, eos53):
        L, R = characteristic_frames(GENERIC_STATE, eos53, "x")
        np.testing.assert_allclose(L @ R, np.eye(8), atol=1e-8)

    def test_eigenvalues_match_wave_speeds(self, eos53):
        _, _, lam, ok = characteristic_frames_batch(GENERIC_STATE[None, :], eos53, 0)
        assert ok[0]
        speeds = wave_speeds(GENERIC_STATE, eos53, 0).as_array()
        # the normal field adds a zero eigenvalue
        expected = np.sort(np.append(speeds, 0.0))
        np.testing.assert_allclose(np.sort(lam[0]), expected, atol=1e-6)

    def test_aligned_field_spectrum(self, eos53):
        _, _, lam, _ = characteristic_frames_batch(ALIGNED_FIELD_GAS[None, :], eos53, 0)
        cs = np.sqrt(2.0 / 15.0)
        expected = [-2 / 3, -2 / 3, -cs, 0.0, 0.0, cs, 2 / 3, 2 / 3]
        np.testing.assert_allclose(np.sort(lam[0]), expected, atol=1e-5)

    def test_degenerate_frame_raises(self, eos53, mocker):
        jac = np.zeros((1, 8, 8))
        jac[0, 0, 1] = 1.0  # nilpotent: repeated eigenvalue with one eigenvector
        mocker.patch("rmhd_dg.dg.physics.flux_jacobian", return_value=jac)
        with pytest.raises(DegenerateFrameError):
            characteristic_frames(GENERIC_STATE, eos53)

    def test_batch_falls_back_to_identity(self, eos53, mocker):
        jac = np.zeros((2, 8, 8))
        jac[:, 0, 1] = 1.0
        mocker.patch("rmhd_dg.dg.physics.flux_jacobian", return_value=jac)
        L, R, _, ok = characteristic_frames_batch(np.tile(GENERIC_STATE, (2, 1)), eos53)
        assert not ok.any()
        np.testing.assert_array_equal(R[0], np.eye(8))
        np.testing.assert_array_equal(L[1], np.eye(8))
