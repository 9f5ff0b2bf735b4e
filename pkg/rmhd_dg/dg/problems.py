"""
Built-in benchmark problems, exact solutions and error norms.

Every problem is a ProblemSpec: domain, adiabatic index, boundary kinds,
vectorized initial primitive data and the default run parameters. The two
smooth problems also carry an exact solution; the 2D problems carry a vector
potential A_z with (Bx, By) = (dA/dy, -dA/dx) for the central method's edge
initialisation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NoExactSolutionError, UnknownProblemError
from .mesh import AxisBoundaries, BoundaryKind
from .physics import NCOMP, PRIM_NAMES, Eos, Floors

PrimFn = Callable[..., np.ndarray]

SMOOTH_AMPLITUDE = 0.1
SMOOTH_ANGLE = math.radians(30.0)
ROTOR_SPIN = 9.95
ROTOR_RADIUS = 0.1
ROTOR_TAPER = 0.115


def _smooth_kappa(gamma: float = 5.0 / 3.0, rho: float = 1.0, p: float = 0.1,
                  amplitude: float = SMOOTH_AMPLITUDE) -> float:
    """kappa = sqrt(1 + rho h gamma^2) for the constant background."""
    h = 1.0 + gamma / (gamma - 1.0) * p / rho
    return math.sqrt(1.0 + rho * h / (1.0 - amplitude ** 2))


SMOOTH_KAPPA = _smooth_kappa()


def _pack(shape, **components) -> np.ndarray:
    out = np.zeros(tuple(shape) + (NCOMP,))
    for k, name in enumerate(PRIM_NAMES):
        if name in components:
            out[..., k] = components[name]
    return out


def _piecewise(mask, inside: Sequence[float], outside: Sequence[float]) -> np.ndarray:
    mask = np.asarray(mask)[..., None]
    return np.where(mask, np.asarray(inside, dtype=float), np.asarray(outside, dtype=float))


# ---------------------------------------------------------------------------
# ProblemSpec
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemSpec:
    """A benchmark: geometry, physics and the default run parameters.

    ``initial`` maps x (1D) or (x, y) (2D) arrays to primitive states (..., 8).
    ``exact`` takes the same coordinates plus t.
    """

    id: str
    dim: int
    domain: tuple[float, ...]
    gamma: float
    bounds_x: AxisBoundaries
    initial: PrimFn
    t_end: float
    M: float
    cells: tuple[int, ...]
    bounds_y: AxisBoundaries | None = None
    exact: PrimFn | None = None
    vector_potential: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    theta: float = 1.0
    floors: bool = False
    error_component: str | None = None
    description: str = ""
    y_aspect: int = 1

    @property
    def eos(self) -> Eos:
        return Eos(self.gamma)

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    def floor_values(self) -> Floors | None:
        return Floors() if self.floors else None

    def mesh_cells(self, n: int, ny: int | None = None) -> tuple[int, ...]:
        """Cell counts for resolution N; 2D problems scale y by ``y_aspect``."""
        if self.dim == 1:
            return (n,)
        return (n, ny if ny is not None else n * self.y_aspect)


# ---------------------------------------------------------------------------
# 1D problems
# ---------------------------------------------------------------------------

def _smooth1d_exact(x, t=0.0):
    x = np.asarray(x, dtype=float)
    phase = 2.0 * np.pi * (x + t / SMOOTH_KAPPA)
    vy = SMOOTH_AMPLITUDE * np.sin(phase)
    vz = SMOOTH_AMPLITUDE * np.cos(phase)
    return _pack(x.shape, rho=1.0, vy=vy, vz=vz, Bx=1.0, By=SMOOTH_KAPPA * vy,
                 Bz=SMOOTH_KAPPA * vz, p=0.1)


def _smooth1d(x):
    return _smooth1d_exact(x, 0.0)


def _riemann(left: Sequence[float], right: Sequence[float], x0: float = 0.0) -> PrimFn:
    def prim(x):
        return _piecewise(np.asarray(x, dtype=float) < x0, left, right)
    return prim


RP1_STATES = ((1.0, 0, 0, 0, 0.5, 1.0, 0, 1.0), (0.125, 0, 0, 0, 0.5, -1.0, 0, 0.1))
RP2_STATES = ((1.0, 0, 0, 0, 5.0, 6.0, 6.0, 30.0), (1.0, 0, 0, 0, 5.0, 0.7, 0.7, 1.0))
RP3_STATES = ((1.0, 0, 0, 0, 10.0, 7.0, 7.0, 1000.0), (1.0, 0, 0, 0, 10.0, 0.7, 0.7, 0.1))


# ---------------------------------------------------------------------------
# 2D problems
# ---------------------------------------------------------------------------

def _smooth2d_exact(x, y, t=0.0):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    ca, sa = math.cos(SMOOTH_ANGLE), math.sin(SMOOTH_ANGLE)
    zeta = x * ca + y * sa
    s = np.sin(2.0 * np.pi * (zeta + t / SMOOTH_KAPPA))
    vx = -SMOOTH_AMPLITUDE * s * sa
    vy = SMOOTH_AMPLITUDE * s * ca
    vz = SMOOTH_AMPLITUDE * np.cos(2.0 * np.pi * (zeta + t / SMOOTH_KAPPA))
    return _pack(x.shape, rho=1.0, vx=vx, vy=vy, vz=vz, Bx=ca + SMOOTH_KAPPA * vx,
                 By=sa + SMOOTH_KAPPA * vy, Bz=SMOOTH_KAPPA * vz, p=0.1)


def _smooth2d(x, y):
    return _smooth2d_exact(x, y, 0.0)


def _smooth2d_potential(x, y):
    ca, sa = math.cos(SMOOTH_ANGLE), math.sin(SMOOTH_ANGLE)
    zeta = x * ca + y * sa
    return (y * ca - x * sa
            + SMOOTH_AMPLITUDE * SMOOTH_KAPPA * np.cos(2.0 * np.pi * zeta) / (2.0 * np.pi))


_OT_B = 1.0 / math.sqrt(4.0 * math.pi)


def _orszag_tang(x, y):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return _pack(x.shape, rho=25.0 / (36.0 * np.pi), vx=0.5 * np.sin(2 * np.pi * y),
                 vy=0.5 * np.sin(2 * np.pi * x), Bx=-_OT_B * np.sin(2 * np.pi * y),
                 By=_OT_B * np.sin(4 * np.pi * x), p=5.0 / (12.0 * np.pi))


def _orszag_tang_potential(x, y):
    return (_OT_B * np.cos(2 * np.pi * y) / (2 * np.pi)
            + _OT_B * np.cos(4 * np.pi * x) / (4 * np.pi))


BLAST_RADIUS = 0.2
BLAST_STATES = ((1.0, 0, 0, 0, 0.05, 0, 0, 1.0), (1.0, 0, 0, 0, 0.05, 0, 0, 1e-3))


def _blast(x, y):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return _piecewise(np.hypot(x, y) < BLAST_RADIUS, *BLAST_STATES)


def _rotor(x, y):
    """Spinning dense disk with a linear taper to the ambient state.

    Inside the taper band the rim speed alpha * r_disk is carried outwards
    and reduced by delta(r); alpha (-y, x) delta / r on its own exceeds the
    speed of light.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    r = np.hypot(x, y)
    delta = np.clip((ROTOR_TAPER - r) / (ROTOR_TAPER - ROTOR_RADIUS), 0.0, 1.0)
    disk = r < ROTOR_RADIUS
    taper = (~disk) & (r <= ROTOR_TAPER)
    safe_r = np.where(r > 0.0, r, 1.0)
    scale = np.where(disk, ROTOR_SPIN, np.where(taper, ROTOR_SPIN * ROTOR_RADIUS * delta / safe_r, 0.0))
    rho = np.where(disk, 10.0, np.where(taper, 1.0 + 9.0 * delta, 1.0))
    return _pack(x.shape, rho=rho, vx=-scale * y, vy=scale * x, Bx=1.0, p=1.0)


SHOCK_CLOUD_LEFT = (3.86859, 0.68, 0.0, 0.0, 0.0, 0.84981, -0.84981, 1.25115)
SHOCK_CLOUD_RIGHT = (1.0, 0.0, 0.0, 0.0, 0.0, 0.16106, 0.16106, 0.05)
SHOCK_POSITION = 0.05
CLOUD_CENTER = (0.25, 0.5)
CLOUD_RADIUS = 0.15
CLOUD_DENSITY = 30.0


def _shock_cloud(x, y):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    out = _piecewise(x < SHOCK_POSITION, SHOCK_CLOUD_LEFT, SHOCK_CLOUD_RIGHT)
    cloud = np.hypot(x - CLOUD_CENTER[0], y - CLOUD_CENTER[1]) < CLOUD_RADIUS
    out[..., 0] = np.where(cloud, CLOUD_DENSITY, out[..., 0])
    return out


def _shock_cloud_potential(x, y):
    x = np.asarray(x, dtype=float)
    by = np.where(x < SHOCK_POSITION, SHOCK_CLOUD_LEFT[5], SHOCK_CLOUD_RIGHT[5])
    return -by * (x - SHOCK_POSITION) + 0.0 * np.asarray(y, dtype=float)


def _uniform_bx(value: float):
    def potential(x, y):
        return value * np.asarray(y, dtype=float) + 0.0 * np.asarray(x, dtype=float)
    return potential


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

_PERIODIC = AxisBoundaries.both(BoundaryKind.periodic())
_OUTFLOW = AxisBoundaries.both(BoundaryKind.outflow())

PROBLEMS: dict[str, ProblemSpec] = {
    "smooth1d": ProblemSpec(
        "smooth1d", 1, (0.0, 1.0), 5.0 / 3.0, _PERIODIC, _smooth1d, t_end=1.0, M=500.0,
        cells=(80,), exact=_smooth1d_exact, error_component="By",
        description="Periodic Alfven-type sine wave in [0, 1]"),
    "rp1": ProblemSpec(
        "rp1", 1, (-0.5, 0.5), 2.0, _OUTFLOW, _riemann(*RP1_STATES), t_end=0.4, M=500.0,
        cells=(800,), description="Relativistic Brio-Wu shock tube"),
    "rp2": ProblemSpec(
        "rp2", 1, (-0.5, 0.5), 5.0 / 3.0, _OUTFLOW, _riemann(*RP2_STATES), t_end=0.4, M=500.0,
        cells=(800,), description="Two rarefactions, contact and two shocks"),
    "rp3": ProblemSpec(
        "rp3", 1, (-0.5, 0.5), 5.0 / 3.0, _OUTFLOW, _riemann(*RP3_STATES), t_end=0.4, M=500.0,
        cells=(800,), description="Strong shocks close to the contact"),
    "smooth2d": ProblemSpec(
        "smooth2d", 2, (0.0, 2.0 / math.sqrt(3.0), 0.0, 2.0), 5.0 / 3.0, _PERIODIC, _smooth2d,
        t_end=1.0, M=50.0, cells=(40, 80), bounds_y=_PERIODIC, exact=_smooth2d_exact,
        vector_potential=_smooth2d_potential, error_component="Bx", y_aspect=2,
        description="Sine wave propagating at 30 degrees on an N x 2N mesh"),
    "orszag-tang": ProblemSpec(
        "orszag-tang", 2, (0.0, 1.0, 0.0, 1.0), 5.0 / 3.0, _PERIODIC, _orszag_tang, t_end=1.0,
        M=50.0, cells=(200, 200), bounds_y=_PERIODIC, vector_potential=_orszag_tang_potential,
        description="Relativistic Orszag-Tang vortex"),
    "blast": ProblemSpec(
        "blast", 2, (-0.5, 0.5, -0.5, 0.5), 4.0 / 3.0, _OUTFLOW, _blast, t_end=0.3, M=50.0,
        cells=(300, 300), bounds_y=_OUTFLOW, vector_potential=_uniform_bx(0.05), floors=True,
        description="Cylindrical blast wave in a weak uniform field"),
    "rotor": ProblemSpec(
        "rotor", 2, (-0.5, 0.5, -0.5, 0.5), 5.0 / 3.0, _OUTFLOW, _rotor, t_end=0.4, M=500.0,
        cells=(300, 300), bounds_y=_OUTFLOW, vector_potential=_uniform_bx(1.0), theta=0.3,
        description="Relativistic rotor with tapered rim"),
    "shock-cloud": ProblemSpec(
        "shock-cloud", 2, (-0.2, 1.2, 0.0, 1.0), 5.0 / 3.0,
        AxisBoundaries(BoundaryKind.inflow(SHOCK_CLOUD_LEFT), BoundaryKind.outflow()),
        _shock_cloud, t_end=1.2, M=50.0, cells=(420, 300), bounds_y=_OUTFLOW,
        vector_potential=_shock_cloud_potential, theta=0.3,
        description="Shock hitting a dense cloud in an oblique field"),
}


def list_problems() -> list[str]:
    return list(PROBLEMS)


def get_problem(problem_id: str) -> ProblemSpec:
    try:
        return PROBLEMS[problem_id]
    except KeyError:
        raise UnknownProblemError(
            f"unknown problem {problem_id!r}; choose one of {', '.join(PROBLEMS)}") from None


def _resolve(spec: ProblemSpec | str) -> ProblemSpec:
    return get_problem(spec) if isinstance(spec, str) else spec


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def initial_state(spec: ProblemSpec | str, x, y=None) -> np.ndarray:
    """Primitive initial data at the given points, shape (..., 8)."""
    spec = _resolve(spec)
    if spec.dim == 1:
        return spec.initial(x)
    if y is None:
        raise ValueError(f"problem {spec.id!r} is two-dimensional and needs y")
    return spec.initial(x, y)


def exact_state(spec: ProblemSpec | str, x, y=None, t: float = 0.0) -> np.ndarray:
    spec = _resolve(spec)
    if spec.exact is None:
        raise NoExactSolutionError(f"problem {spec.id!r} has no exact solution")
    if spec.dim == 1:
        return spec.exact(x, t)
    if y is None:
        raise ValueError(f"problem {spec.id!r} is two-dimensional and needs y")
    return spec.exact(x, y, t)


@dataclass(frozen=True)
class ErrorReport:
    """Per-component errors of the primitive variables at time t.

    l1 is the quadrature integral of |numerical - exact| divided by the
    domain measure; linf is the maximum over the quadrature points.
    """

    t: float
    cells: tuple[int, ...]
    l1: dict[str, float]
    linf: dict[str, float]

    def as_row(self) -> dict[str, float]:
        row: dict[str, float] = {}
        for name in PRIM_NAMES:
            row[f"l1_{name}"] = self.l1[name]
            row[f"linf_{name}"] = self.linf[name]
        return row


def error_report(spec: ProblemSpec | str, numerical: np.ndarray, coords: Sequence[np.ndarray],
                 weights: np.ndarray, t: float) -> ErrorReport:
    """Errors of quadrature-point primitive values against the exact solution.

    numerical: (cells..., npts, 8) primitive values at the physical points
    ``coords`` (x or (x, y), each of shape (cells..., npts)); weights are the
    reference quadrature weights of the npts points.
    """
    spec = _resolve(spec)
    exact = exact_state(spec, *coords, t=t) if spec.dim == 1 else exact_state(spec, coords[0], coords[1], t=t)
    diff = np.abs(np.asarray(numerical, dtype=float) - exact)
    ncells = int(np.prod(diff.shape[:-2]))
    # cell means, then the domain mean over uniform cells
    means = np.einsum("p,...pc->...c", weights, diff) / np.sum(weights)
    l1 = means.reshape(ncells, NCOMP).sum(axis=0) / ncells
    linf = diff.reshape(-1, NCOMP).max(axis=0)
    return ErrorReport(t, tuple(diff.shape[:-2]),
                       {n: float(v) for n, v in zip(PRIM_NAMES, l1)},
                       {n: float(v) for n, v in zip(PRIM_NAMES, linf)})


def convergence_orders(errors: Sequence[float], resolutions: Sequence[int]) -> list[float | None]:
    """log(e_prev / e) / log(N / N_prev); None for the first row."""
    if len(errors) != len(resolutions):
        raise ValueError("errors and resolutions differ in length")
    orders: list[float | None] = [None]
    for k in range(1, len(errors)):
        e0, e1 = errors[k - 1], errors[k]
        if e0 <= 0.0 or e1 <= 0.0:
            orders.append(None)
            continue
        orders.append(math.log(e0 / e1) / math.log(resolutions[k] / resolutions[k - 1]))
    return orders
