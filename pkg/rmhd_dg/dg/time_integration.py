"""
Explicit Runge-Kutta drivers and CFL time steps.

States are arrays or (nested) dataclasses of arrays; ``lincomb`` combines them
field by field, so the same drivers advance a bare ODE vector, a DG solution
or a primal/dual pair.
"""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Any, Callable, Literal, Sequence

import numpy as np

from .limiter import LIMIT_MODES
from .physics import Eos, Floors, cons_to_prim, max_signal_speed

logger = logging.getLogger(__name__)

SchemeName = Literal["euler", "rk3", "rk4"]
SCHEMES = ("euler", "rk3", "rk4")

# Courant numbers per K = 1, 2, 3
DEFAULT_CFL = {
    ("noncentral", 1): (0.3, 0.2, 0.1),
    ("central", 1): (0.4, 0.3, 0.2),
    ("noncentral", 2): (0.2, 0.15, 0.1),
    ("central", 2): (0.3, 0.25, 0.2),
}


def default_cfl(method: str, dim: int, K: int) -> float:
    return DEFAULT_CFL[(method, dim)][K - 1]


@dataclass(frozen=True)
class StepControl:
    cfl: float
    t_end: float
    scheme: SchemeName = "rk3"
    theta: float = 1.0
    limiter: str = "per-stage"
    max_steps: int | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown time scheme {self.scheme!r}")
        if self.limiter not in LIMIT_MODES:
            raise ValueError(f"unknown limiter mode {self.limiter!r}")
        if not 0.0 < self.theta <= 1.0:
            raise ValueError(f"theta must lie in (0, 1], got {self.theta}")
        if not self.cfl > 0.0:
            raise ValueError(f"cfl must be positive, got {self.cfl}")


def lincomb(coeffs: Sequence[float], states: Sequence[Any]) -> Any:
    """sum_k coeffs[k] * states[k], recursing through dataclass fields."""
    first = states[0]
    if first is None:
        return None
    if dataclasses.is_dataclass(first) and not isinstance(first, type):
        values = {
            f.name: lincomb(coeffs, [getattr(s, f.name) for s in states])
            for f in dataclasses.fields(first)
        }
        return type(first)(**values)
    if isinstance(first, (str, bool)):
        return first
    out = coeffs[0] * np.asarray(first)
    for c, s in zip(coeffs[1:], states[1:]):
        out = out + c * np.asarray(s)
    return out


def compute_dt(averages, eos: Eos, h, cfl: float, floors: Floors | None = None) -> float:
    """tau = cfl h / max lambda (1D) or cfl / max(lx/hx + ly/hy) (2D).

    averages are conserved cell averages (..., 8); ``h`` is a width or (hx, hy).
    A sequence of average arrays (both meshes of the central method) is reduced
    jointly.
    """
    groups = averages if isinstance(averages, (list, tuple)) else [averages]
    rate = 0.0
    for avg in groups:
        prim = cons_to_prim(avg, eos, floors=floors)
        if np.ndim(h) == 0:
            rate = max(rate, float(np.max(max_signal_speed(prim, eos, 0))) / float(h))
        else:
            hx, hy = h
            lam = (max_signal_speed(prim, eos, 0) / hx + max_signal_speed(prim, eos, 1) / hy)
            rate = max(rate, float(np.max(lam)))
    if rate <= 0.0:
        return np.inf
    return cfl / rate


def _stage(state, limiter, mode: str, last: bool):
    if limiter is None or mode == "off":
        return state
    if mode == "per-step" and not last:
        return state
    return limiter(state)


def advance(state, rhs: Callable[[Any], Any], dt: float, scheme: SchemeName = "rk3",
            limiter: Callable[[Any], Any] | None = None, limit_mode: str = "per-stage"):
    """One step of Euler, SSP-RK3 or classical RK4.

    ``limiter`` is applied after every stage (per-stage/global) or only to the
    completed step (per-step).
    """
    if scheme == "euler":
        return _stage(lincomb([1.0, dt], [state, rhs(state)]), limiter, limit_mode, True)
    if scheme == "rk3":
        u1 = _stage(lincomb([1.0, dt], [state, rhs(state)]), limiter, limit_mode, False)
        u2 = _stage(lincomb([0.75, 0.25, 0.25 * dt], [state, u1, rhs(u1)]), limiter, limit_mode, False)
        return _stage(lincomb([1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0 * dt], [state, u2, rhs(u2)]),
                      limiter, limit_mode, True)
    if scheme == "rk4":
        k1 = rhs(state)
        u1 = _stage(lincomb([1.0, 0.5 * dt], [state, k1]), limiter, limit_mode, False)
        k2 = rhs(u1)
        u2 = _stage(lincomb([1.0, 0.5 * dt], [state, k2]), limiter, limit_mode, False)
        k3 = rhs(u2)
        u3 = _stage(lincomb([1.0, dt], [state, k3]), limiter, limit_mode, False)
        k4 = rhs(u3)
        new = lincomb([1.0, dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0], [state, k1, k2, k3, k4])
        return _stage(new, limiter, limit_mode, True)
    raise ValueError(f"unknown time scheme {scheme!r}")


@dataclass
class StepRecord:
    step: int
    t: float
    dt: float


def integrate(scheme_obj, state, control: StepControl, t0: float = 0.0,
              on_step: Callable[[Any, StepRecord], None] | None = None):
    """March ``state`` to control.t_end with a scheme object.

    The scheme object provides ``tau(state, cfl)`` (the admissible step for
    Courant number cfl), ``rhs(state, tau)`` and ``limit(state)``. The step is
    dt = theta * tau with tau computed from cfl / theta, held across stages, and
    clamped so the last step lands on t_end.
    """
    t = t0
    steps = 0
    while t < control.t_end * (1.0 - 1e-14):
        if control.max_steps is not None and steps >= control.max_steps:
            logger.warning("stopping after max_steps=%d at t=%.6g", control.max_steps, t)
            break
        tau = scheme_obj.tau(state, control.cfl / control.theta)
        dt = min(control.theta * tau, control.t_end - t)

        def rhs(s, _tau=tau):
            return scheme_obj.rhs(s, _tau)

        limiter = None if control.limiter == "off" else scheme_obj.limit
        state = advance(state, rhs, dt, control.scheme, limiter, control.limiter)
        t += dt
        steps += 1
        if on_step is not None:
            on_step(state, StepRecord(steps, t, dt))
    return state, t, steps
