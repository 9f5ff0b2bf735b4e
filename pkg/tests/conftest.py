"""Shared fixtures for the rmhd_dg test suite."""
import dataclasses

import numpy as np
import pytest

from rmhd_dg.console_utils import set_verbose
from rmhd_dg.dg.mesh import AxisBoundaries, BoundaryKind
from rmhd_dg.dg.physics import Eos
from rmhd_dg.dg.problems import get_problem

# ─────────────────────────────────────────────────────────────────────────────
# Reference states
# ─────────────────────────────────────────────────────────────────────────────

STATIC_GAS = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1])
MAGNETIZED_GAS = np.array([1.0, 0.0, 0.0, 0.0, 0.5, 1.0, 0.0, 1.0])
MOVING_GAS = np.array([1.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.1])
ALIGNED_FIELD_GAS = np.array([1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.1])
# moving, magnetized and oblique; used where every term of the flux matters
GENERIC_STATE = np.array([1.3, 0.3, -0.2, 0.1, 0.7, -0.4, 0.25, 0.8])


def random_admissible_states(n: int, seed: int = 7) -> np.ndarray:
    """n primitive states spread over a few decades of rho, p and |B|, |v| < 0.95."""
    rng = np.random.default_rng(seed)
    rho = 10.0 ** rng.uniform(-2, 1, n)
    p = 10.0 ** rng.uniform(-2, 1, n)
    direction = rng.normal(size=(n, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    v = direction * rng.uniform(0.0, 0.95, n)[:, None]
    B = rng.normal(size=(n, 3)) * 10.0 ** rng.uniform(-1, 0.5, n)[:, None]
    return np.column_stack([rho, v, B, p])


def wide_range_states(n: int, seed: int = 2024) -> np.ndarray:
    """n primitive states with rho, p and |B| over six decades, |v| < 0.99."""
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=(n, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    prim = np.column_stack([
        10.0 ** rng.uniform(-3, 3, n),
        direction * rng.uniform(0.0, 0.99, n)[:, None],
        rng.normal(size=(n, 3)) * (10.0 ** rng.uniform(-3, 3, n) / np.sqrt(3.0))[:, None],
        10.0 ** rng.uniform(-3, 3, n),
    ])
    prim[:, 4:7] *= np.minimum(1.0, 1e3 / np.linalg.norm(prim[:, 4:7], axis=1))[:, None]
    return prim


@pytest.fixture
def eos53():
    return Eos(5.0 / 3.0)


@pytest.fixture
def eos2():
    return Eos(2.0)


# ─────────────────────────────────────────────────────────────────────────────
# Problems
# ─────────────────────────────────────────────────────────────────────────────

def _uniform_1d(state):
    def prim(x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(state, x.shape + (8,)).copy()
    return prim


def _uniform_2d(state):
    def prim(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return np.broadcast_to(state, x.shape + (8,)).copy()
    return prim


UNIFORM_STATE_2D = np.array([1.0, 0.2, -0.1, 0.0, 0.6, 0.3, 0.1, 0.5])


@pytest.fixture
def uniform_1d_problem():
    """Periodic 1D problem holding a constant moving magnetized state."""
    return dataclasses.replace(
        get_problem("smooth1d"), id="uniform1d", initial=_uniform_1d(GENERIC_STATE),
        exact=None, error_component=None, cells=(12,))


@pytest.fixture
def uniform_2d_problem():
    """Periodic unit square holding a constant state with B = (0.6, 0.3, 0.1).

    Its vector potential 0.6 y - 0.3 x gives the same in-plane field.
    """
    periodic = AxisBoundaries.both(BoundaryKind.periodic())
    return dataclasses.replace(
        get_problem("orszag-tang"), id="uniform2d", domain=(0.0, 1.0, 0.0, 1.0),
        bounds_x=periodic, bounds_y=periodic, initial=_uniform_2d(UNIFORM_STATE_2D),
        vector_potential=lambda x, y: 0.6 * np.asarray(y, float) - 0.3 * np.asarray(x, float),
        cells=(6, 6))


@pytest.fixture(autouse=True)
def isolated_output_dir(tmp_path, monkeypatch):
    """Keep every run's artefacts inside the test's temp dir."""
    monkeypatch.setenv("RMHD_DG_OUTPUT_DIR", str(tmp_path / "runs"))
    set_verbose(False)
    yield tmp_path / "runs"
    set_verbose(False)
