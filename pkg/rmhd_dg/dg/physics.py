"""
physics.py — Pointwise special relativistic MHD state algebra.

All functions are vectorised over leading axes: a state is an array whose last
axis holds the eight components

    primitive  V = (rho, vx, vy, vz, Bx, By, Bz, p)
    conserved  U = (D,   mx, my, mz, Bx, By, Bz, E)

in units with c = 1. The magnetic field is shared between V and U.

Public API:
    Eos                       ideal-gas equation of state (adiabatic index Gamma)
    prim_to_cons(V, eos)      V -> U
    cons_to_prim(U, eos, ...) safeguarded Newton recovery of V from U
    flux(V, eos, axis)        physical flux along x (axis 0) or y (axis 1)
    wave_speeds(V, eos, axis) the seven ordered characteristic speeds
    max_signal_speed(...)     max |fast speed|
    characteristic_frames(...)          (L, R) for one state, raises on degeneracy
    characteristic_frames_batch(...)    batched (L, R, ok) with identity fallback
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import (
    DegenerateFrameError,
    DomainViolationError,
    EigenvalueError,
    InadmissibleStateError,
    RecoveryError,
)

logger = logging.getLogger(__name__)

NCOMP = 8
RHO, VX, VY, VZ, BX, BY, BZ, P = range(NCOMP)
D, MX, MY, MZ, E = 0, 1, 2, 3, 7
PRIM_NAMES = ("rho", "vx", "vy", "vz", "Bx", "By", "Bz", "p")
CONS_NAMES = ("D", "mx", "my", "mz", "Bx", "By", "Bz", "E")

# Recovery defaults
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 50
SUPERLUMINAL_EPS = 1e-13

# Wave-speed and frame tolerances
ROOT_IMAG_TOL = 1e-6
LIGHT_SPEED_TOL = 1e-10
FRAME_REL_STEP = 1e-6
FRAME_COND_MAX = 1e10


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Eos:
    """Ideal gas law p = (Gamma - 1) rho e."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise DomainViolationError(f"adiabatic index must exceed 1, got {self.gamma}")

    def enthalpy(self, rho, p):
        return 1.0 + self.gamma / (self.gamma - 1.0) * p / rho

    def sound_speed_sq(self, rho, p):
        return self.gamma * p / (rho * self.enthalpy(rho, p))


@dataclass(frozen=True)
class Floors:
    """Lower bounds applied to recovered rho and p when enabled."""

    rho: float = 1e-10
    p: float = 1e-12


@dataclass(frozen=True)
class PrimitiveState:
    rho: float
    v: tuple[float, float, float]
    B: tuple[float, float, float]
    p: float

    def to_array(self) -> np.ndarray:
        return np.array([self.rho, *self.v, *self.B, self.p], dtype=float)

    @classmethod
    def from_array(cls, a) -> "PrimitiveState":
        a = np.asarray(a, dtype=float)
        return cls(float(a[RHO]), tuple(a[VX:VZ + 1].tolist()),
                   tuple(a[BX:BZ + 1].tolist()), float(a[P]))

    @property
    def lorentz_factor(self) -> float:
        return float(lorentz_factor(self.to_array()))


@dataclass(frozen=True)
class ConservedState:
    D: float
    m: tuple[float, float, float]
    B: tuple[float, float, float]
    E: float

    def to_array(self) -> np.ndarray:
        return np.array([self.D, *self.m, *self.B, self.E], dtype=float)

    @classmethod
    def from_array(cls, a) -> "ConservedState":
        a = np.asarray(a, dtype=float)
        return cls(float(a[D]), tuple(a[MX:MZ + 1].tolist()),
                   tuple(a[BX:BZ + 1].tolist()), float(a[E]))


@dataclass(frozen=True)
class WaveSpeeds:
    """Seven ordered signal speeds, each an array over the input states."""

    fast_minus: np.ndarray
    alfven_minus: np.ndarray
    slow_minus: np.ndarray
    entropy: np.ndarray
    slow_plus: np.ndarray
    alfven_plus: np.ndarray
    fast_plus: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack([self.fast_minus, self.alfven_minus, self.slow_minus, self.entropy,
                         self.slow_plus, self.alfven_plus, self.fast_plus], axis=-1)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _as_state_array(x: Any) -> np.ndarray:
    if hasattr(x, "to_array"):
        return x.to_array()
    return np.asarray(x, dtype=float)


def _axis(direction: Any) -> int:
    if direction in (0, "x"):
        return 0
    if direction in (1, "y"):
        return 1
    raise ValueError(f"direction must be x/0 or y/1, got {direction!r}")


def _first_index(mask: np.ndarray, shape: tuple[int, ...]):
    flat = int(np.flatnonzero(mask)[0])
    if len(shape) <= 1:
        return flat
    return tuple(int(i) for i in np.unravel_index(flat, shape))


def lorentz_factor(prim) -> np.ndarray:
    w = _as_state_array(prim)
    v2 = np.sum(w[..., VX:VZ + 1] ** 2, axis=-1)
    return 1.0 / np.sqrt(1.0 - v2)


def magnetic_pressure(prim) -> np.ndarray:
    """p_m = |b|^2 / 2 with |b|^2 = B^2/gamma^2 + (v.B)^2."""
    w = _as_state_array(prim)
    v, B = w[..., VX:VZ + 1], w[..., BX:BZ + 1]
    v2 = np.sum(v * v, axis=-1)
    vB = np.sum(v * B, axis=-1)
    return 0.5 * (np.sum(B * B, axis=-1) * (1.0 - v2) + vB * vB)


def check_primitive(prim) -> None:
    """Raise DomainViolationError unless rho > 0, p > 0 and |v| < 1 everywhere."""
    w = _as_state_array(prim)
    shape = w.shape[:-1]
    v2 = np.sum(w[..., VX:VZ + 1] ** 2, axis=-1)
    bad = ~(v2 < 1.0)
    if np.any(bad):
        raise DomainViolationError("superluminal velocity |v| >= 1", cell=_first_index(bad, shape))
    bad = ~((w[..., RHO] > 0.0) & (w[..., P] > 0.0))
    if np.any(bad):
        raise DomainViolationError("non-positive density or pressure", cell=_first_index(bad, shape))


# ---------------------------------------------------------------------------
# Primitive <-> conserved
# ---------------------------------------------------------------------------

def prim_to_cons(prim, eos: Eos) -> np.ndarray:
    w = _as_state_array(prim)
    check_primitive(w)
    rho, v, B, p = w[..., RHO], w[..., VX:VZ + 1], w[..., BX:BZ + 1], w[..., P]
    v2 = np.sum(v * v, axis=-1)
    gam2 = 1.0 / (1.0 - v2)
    h = eos.enthalpy(rho, p)
    vB = np.sum(v * B, axis=-1)
    B2 = np.sum(B * B, axis=-1)
    ptot = p + 0.5 * (B2 / gam2 + vB * vB)
    theta = rho * h * gam2

    out = np.empty_like(w)
    out[..., D] = rho * np.sqrt(gam2)
    out[..., MX:MZ + 1] = (theta + B2)[..., None] * v - vB[..., None] * B
    out[..., BX:BZ + 1] = B
    out[..., E] = theta - ptot + B2
    return out


def _velocity_sq(theta, m2, S2, B2):
    """|v|^2 at theta, summed from non-negative terms."""
    tau = theta + B2
    return m2 / (tau * tau) + S2 * (1.0 / (theta * tau * tau) + 1.0 / (theta * theta * tau))


def _magnetic_excess(theta, X, B2):
    """|B x m|^2 / (2 (theta + B^2)^2); decreasing in theta."""
    tau = theta + B2
    return 0.5 * X / (tau * tau)


def _recovery_residual(theta, Dd, m2, S2, B2, X, Ered, g):
    """Energy residual f(theta), its derivative and the size of the summed terms.

    f = theta - p + |B x m|^2 / (2 (theta + B^2)^2) - (E - B^2/2). Using
    |B x m|^2 = B^2 |m|^2 - (m.B)^2 removes the B^2-sized terms analytically,
    so round-off in f is relative to theta, p and E - B^2/2 only.
    """
    tau = theta + B2
    v2 = _velocity_sq(theta, m2, S2, B2)
    w = np.maximum(1.0 - v2, SUPERLUMINAL_EPS * 1e-3)
    sw = np.sqrt(w)
    dw = 2.0 * m2 / tau ** 3 + 2.0 * S2 * (1.0 / (theta ** 3 * tau) + 1.0 / (theta * tau) ** 2
                                           + 1.0 / (theta * tau ** 3))
    p = g * (theta * w - Dd * sw)
    dp = g * (w + dw * (theta - 0.5 * Dd / sw))
    mag = 0.5 * X / (tau * tau)
    f = theta - p + mag - Ered
    df = 1.0 - dp - 2.0 * mag / tau
    return f, df, theta + np.abs(p) + mag + np.abs(Ered)


def _theta_lower_bound(m2, S2, B2, theta_max, eps=SUPERLUMINAL_EPS):
    """theta at which |v|^2 reaches 1 - eps; |v|^2 decreases in theta above it."""
    c = 1.0 - eps
    hi = np.maximum(np.sqrt(m2 / c), 1e-300)
    lo = np.zeros_like(hi)
    th = hi.copy()
    with np.errstate(all="ignore"):
        for _ in range(60):
            tb = th + B2
            phi = c * th * th * tb * tb - (th * th * m2 + 2.0 * th * S2 + S2 * B2)
            dphi = c * (2.0 * th * tb * tb + 2.0 * th * th * tb) - (2.0 * th * m2 + 2.0 * S2)
            pos = phi > 0.0
            hi = np.where(pos, th, hi)
            lo = np.where(pos, lo, th)
            new = th - phi / dphi
            bad = ~np.isfinite(new) | (new < lo) | (new > hi)
            new = np.where(bad, 0.5 * (lo + hi), new)
            done = np.abs(new - th) <= 1e-14 * np.maximum(new, 1e-300)
            th = new
            if np.all(done):
                break
    return np.maximum(th, 1e-15 * theta_max)


def _recovery_bracket(Dd, m2, S2, B2, X, En, Ered, gamma):
    """Bracket [lo, hi] for theta and a starting point inside it.

    theta - p lies in [theta / Gamma, theta] and equals Ered - mag(theta), so
    theta <= Gamma (Ered - mag(Gamma Ered)). Physical states also have
    theta >= max(D, Ered - mag(D)); that bound only seeds the start since
    states recovering to p < 0 must still be bracketed.
    """
    loose = gamma * En
    lo = _theta_lower_bound(m2, S2, B2, loose)
    upper = gamma * (Ered - _magnetic_excess(gamma * Ered, X, B2)) * (1.0 + 1e-12)
    hi = np.where(np.isfinite(upper) & (upper > lo), upper, loose)
    floor = np.maximum(lo, Dd)
    seed = np.maximum(floor, Ered - _magnetic_excess(floor, X, B2))
    start = np.where((seed > 0.0) & (seed < hi), np.sqrt(seed * hi), 0.5 * (lo + hi))
    return lo, hi, np.clip(start, lo, hi)


@dataclass
class _Recovery:
    prim: np.ndarray
    iterations: np.ndarray
    residual: np.ndarray
    unconverged: np.ndarray
    inadmissible: np.ndarray


def _recover_flat(flat: np.ndarray, eos: Eos, tol: float, max_iter: int) -> _Recovery:
    """Vectorised recovery core; never raises, reports failures as masks.

    A state is converged once |f| is at round-off level, the Newton step is
    below tol * theta, or a sign change has been bracketed to tol * theta.
    """
    Dd = flat[:, D]
    m = flat[:, MX:MZ + 1]
    B = flat[:, BX:BZ + 1]
    En = flat[:, E]
    S = np.sum(m * B, axis=-1)
    S2 = S * S
    m2 = np.sum(m * m, axis=-1)
    B2 = np.sum(B * B, axis=-1)
    X = np.sum(np.cross(B, m) ** 2, axis=-1)
    Ered = En - 0.5 * B2
    g = (eos.gamma - 1.0) / eos.gamma
    f_tol = 16.0 * np.finfo(float).eps

    with np.errstate(all="ignore"):
        lo, hi, theta = _recovery_bracket(Dd, m2, S2, B2, X, En, Ered, eos.gamma)
    iterations = np.zeros(theta.shape, dtype=int)
    residual = np.full(theta.shape, np.inf)
    seen_pos = np.zeros(theta.shape, dtype=bool)
    seen_neg = np.zeros(theta.shape, dtype=bool)
    active = np.isfinite(theta) & (hi > 0.0)

    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            th = theta[idx]
            f, df, scale = _recovery_residual(th, Dd[idx], m2[idx], S2[idx], B2[idx], X[idx], Ered[idx], g)
            residual[idx] = f
            iterations[idx] += 1
            pos = f > 0.0
            seen_pos[idx] |= pos
            seen_neg[idx] |= f < 0.0
            lo_i = np.where(pos, lo[idx], th)
            hi_i = np.where(pos, th, hi[idx])
            lo[idx] = lo_i
            hi[idx] = hi_i

            new = th - f / df
            outside = ~np.isfinite(new) | (new <= lo_i) | (new >= hi_i)
            # geometric bisection while the bracket spans decades
            split = np.where((lo_i > 0.0) & (hi_i > 4.0 * lo_i), np.sqrt(lo_i * hi_i), 0.5 * (lo_i + hi_i))
            new = np.where(outside, split, new)

            at_root = np.abs(f) <= f_tol * scale
            small_step = np.abs(new - th) <= tol * th
            pinched = seen_pos[idx] & seen_neg[idx] & (hi_i - lo_i <= tol * hi_i)
            theta[idx] = np.where(at_root, th, new)
            active[idx[at_root | small_step | pinched]] = False

    unconverged = active | ~np.isfinite(theta)

    with np.errstate(all="ignore"):
        v2 = _velocity_sq(theta, m2, S2, B2)
        w = 1.0 - v2
        sw = np.sqrt(np.maximum(w, 0.0))
        v = (m + (S / theta)[:, None] * B) / (theta + B2)[:, None]
        rho = Dd * sw
        p = g * (theta * w - Dd * sw)

    inadmissible = ~unconverged & ~(np.isfinite(rho) & np.isfinite(p) & (rho > 0.0)
                                    & (p > 0.0) & (w > 0.0))
    out = np.empty_like(flat)
    out[:, RHO] = rho
    out[:, VX:VZ + 1] = v
    out[:, BX:BZ + 1] = B
    out[:, P] = p
    return _Recovery(out, iterations, residual, unconverged, inadmissible)


def cons_to_prim(cons, eos: Eos, tol: float = NEWTON_TOL, max_iter: int = NEWTON_MAX_ITER,
                 floors: Floors | None = None, return_iterations: bool = False):
    """Recover V from U by Newton iteration on theta = rho h gamma^2.

    The root is bracketed between the velocity bound theta_min and
    Gamma (E - B^2/2 - |B x m|^2 / (2 tau^2)); iterates leaving the bracket
    are replaced by bisection. Raises RecoveryError on non-convergence and
    InadmissibleStateError on rho <= 0 or p <= 0 unless ``floors`` is given.
    """
    u = _as_state_array(cons)
    shape = u.shape[:-1]
    rec = _recover_flat(u.reshape(-1, NCOMP), eos, tol, max_iter)

    if np.any(rec.unconverged):
        k = int(np.flatnonzero(rec.unconverged)[0])
        raise RecoveryError(
            f"primitive recovery did not converge after {max_iter} iterations",
            residual=float(abs(rec.residual[k])), iterations=int(rec.iterations[k]),
            cell=_first_index(rec.unconverged, shape),
        )

    out = rec.prim
    if np.any(rec.inadmissible):
        if floors is None:
            raise InadmissibleStateError(
                "recovered state has non-positive density or pressure",
                cell=_first_index(rec.inadmissible, shape),
            )
        logger.debug("flooring %d recovered states", int(np.count_nonzero(rec.inadmissible)))
        rho, p = out[:, RHO], out[:, P]
        out[:, RHO] = np.where(np.isfinite(rho), np.maximum(rho, floors.rho), floors.rho)
        out[:, P] = np.where(np.isfinite(p), np.maximum(p, floors.p), floors.p)
        bad_v = ~(np.sum(out[:, VX:VZ + 1] ** 2, axis=-1) < 1.0)
        out[bad_v, VX:VZ + 1] = 0.0

    out = out.reshape(u.shape)
    if return_iterations:
        return out, rec.iterations.reshape(shape)
    return out


def admissible_mask(cons, eos: Eos, tol: float = NEWTON_TOL,
                    max_iter: int = NEWTON_MAX_ITER) -> np.ndarray:
    """True where the conserved state recovers to rho > 0, p > 0, |v| < 1."""
    u = _as_state_array(cons)
    rec = _recover_flat(u.reshape(-1, NCOMP), eos, tol, max_iter)
    ok = ~(rec.unconverged | rec.inadmissible)
    return ok.reshape(u.shape[:-1])


# ---------------------------------------------------------------------------
# Flux
# ---------------------------------------------------------------------------

def flux(prim, eos: Eos, direction: Any = 0) -> np.ndarray:
    axis = _axis(direction)
    w = _as_state_array(prim)
    rho, v, B, p = w[..., RHO], w[..., VX:VZ + 1], w[..., BX:BZ + 1], w[..., P]
    v2 = np.sum(v * v, axis=-1)
    inv_gam2 = 1.0 - v2
    h = eos.enthalpy(rho, p)
    vB = np.sum(v * B, axis=-1)
    B2 = np.sum(B * B, axis=-1)
    ptot = p + 0.5 * (B2 * inv_gam2 + vB * vB)
    m = (rho * h / inv_gam2 + B2)[..., None] * v - vB[..., None] * B
    vn = v[..., axis]
    Bn = B[..., axis]

    F = np.empty_like(w)
    F[..., D] = rho / np.sqrt(inv_gam2) * vn
    F[..., MX:MZ + 1] = (m * vn[..., None]
                         - Bn[..., None] * (B * inv_gam2[..., None] + v * vB[..., None]))
    F[..., MX + axis] += ptot
    F[..., BX:BZ + 1] = B * vn[..., None] - Bn[..., None] * v
    F[..., BX + axis] = 0.0
    F[..., E] = m[..., axis]
    return F


# ---------------------------------------------------------------------------
# Wave speeds
# ---------------------------------------------------------------------------

def _cubic_root_largest(a2, a1, a0):
    """Root of largest modulus of z^3 + a2 z^2 + a1 z + a0 (complex arrays)."""
    P_ = a1 - a2 * a2 / 3.0
    Q_ = 2.0 * a2 ** 3 / 27.0 - a2 * a1 / 3.0 + a0
    disc = np.sqrt((Q_ / 2.0) ** 2 + (P_ / 3.0) ** 3)
    u_plus = (-Q_ / 2.0 + disc) ** (1.0 / 3.0)
    u_minus = (-Q_ / 2.0 - disc) ** (1.0 / 3.0)
    u = np.where(np.abs(u_plus) >= np.abs(u_minus), u_plus, u_minus)
    omega = np.exp(2j * np.pi / 3.0)
    best = np.zeros_like(u)
    best_abs = np.full(u.shape, -1.0)
    for k in range(3):
        uk = u * omega ** k
        safe = np.abs(uk) > 0.0
        zk = np.where(safe, uk - P_ / (3.0 * np.where(safe, uk, 1.0)), 0.0) - a2 / 3.0
        take = np.abs(zk) > best_abs
        best = np.where(take, zk, best)
        best_abs = np.where(take, np.abs(zk), best_abs)
    return best


def solve_quartic(c4, c3, c2, c1, c0, polish_steps: int = 2) -> np.ndarray:
    """All four roots of c4 x^4 + ... + c0 by Ferrari's method, Newton-polished.

    Vectorised over the coefficient arrays; returns complex roots with shape
    (..., 4) sorted by real part.
    """
    c4 = np.asarray(c4, dtype=float)
    a = (c3 / c4).astype(complex)
    b = (c2 / c4).astype(complex)
    c = (c1 / c4).astype(complex)
    d = (c0 / c4).astype(complex)
    p = b - 3.0 * a * a / 8.0
    q = c - a * b / 2.0 + a ** 3 / 8.0
    r = d - a * c / 4.0 + a * a * b / 16.0 - 3.0 * a ** 4 / 256.0

    biquad = np.abs(q) <= 1e-14 * np.maximum(1.0, np.abs(p) ** 1.5)
    m = _cubic_root_largest(p, p * p / 4.0 - r, -q * q / 8.0)
    m = np.where(biquad | (m == 0), 1.0, m)
    sm = np.sqrt(2.0 * m)
    roots = []
    for s in (1.0, -1.0):
        inner = np.sqrt(-(2.0 * p + 2.0 * m + s * 2.0 * q / sm))
        roots.append((s * sm + inner) / 2.0)
        roots.append((s * sm - inner) / 2.0)
    y = np.stack(roots, axis=-1)

    sq = np.sqrt(p * p - 4.0 * r)
    y2a = np.sqrt((-p + sq) / 2.0)
    y2b = np.sqrt((-p - sq) / 2.0)
    y_bi = np.stack([y2a, -y2a, y2b, -y2b], axis=-1)
    y = np.where(biquad[..., None], y_bi, y)
    x = y - (a / 4.0)[..., None]

    coeffs = [np.asarray(ci, dtype=float)[..., None] for ci in (c4, c3, c2, c1, c0)]
    xr = x.real.copy()
    for _ in range(polish_steps):
        val = (((coeffs[0] * xr + coeffs[1]) * xr + coeffs[2]) * xr + coeffs[3]) * xr + coeffs[4]
        der = ((4.0 * coeffs[0] * xr + 3.0 * coeffs[1]) * xr + 2.0 * coeffs[2]) * xr + coeffs[3]
        new = xr - val / der
        new_val = (((coeffs[0] * new + coeffs[1]) * new + coeffs[2]) * new + coeffs[3]) * new + coeffs[4]
        accept = np.isfinite(new) & (np.abs(new_val) <= np.abs(val))
        xr = np.where(accept, new, xr)
    x = xr + 1j * x.imag
    order = np.argsort(x.real, axis=-1)
    return np.take_along_axis(x, order, axis=-1)


def wave_speeds(prim, eos: Eos, direction: Any = 0) -> WaveSpeeds:
    """Alfven, magnetosonic and entropy speeds along one coordinate axis."""
    axis = _axis(direction)
    w = _as_state_array(prim)
    shape = w.shape[:-1]
    flat = w.reshape(-1, NCOMP)
    rho, v, B, p = flat[:, RHO], flat[:, VX:VZ + 1], flat[:, BX:BZ + 1], flat[:, P]
    vn = v[:, axis]
    Bn = B[:, axis]
    v2 = np.sum(v * v, axis=-1)
    gam2 = 1.0 / (1.0 - v2)
    gam = np.sqrt(gam2)
    rhoh = rho * eos.enthalpy(rho, p)
    cs2 = eos.sound_speed_sq(rho, p)
    vB = np.sum(v * B, axis=-1)
    B2 = np.sum(B * B, axis=-1)
    b0 = gam * vB
    bn = Bn / gam + gam * vn * vB
    b2 = B2 / gam2 + vB * vB

    # Alfven pair from (rho h + b^2) gamma^2 (vn - lam)^2 = (bn - b0 lam)^2
    s = gam * np.sqrt(rhoh + b2)
    al_1 = (s * vn + bn) / (s + b0)
    al_2 = (s * vn - bn) / (s - b0)
    al_m = np.minimum(al_1, al_2)
    al_p = np.maximum(al_1, al_2)

    fast_m = np.empty_like(vn)
    fast_p = np.empty_like(vn)
    slow_m = np.empty_like(vn)
    slow_p = np.empty_like(vn)

    static = v2 == 0.0
    perp = (Bn == 0.0) & ~static
    general = ~(static | perp)

    with np.errstate(all="ignore"):
        # v = 0: biquadratic in lam^2
        qa = rhoh + B2
        qb = -(B2 + rhoh * cs2 + cs2 * Bn * Bn)
        qc = cs2 * Bn * Bn
        xf = (-qb + np.sqrt(np.maximum(qb * qb - 4.0 * qa * qc, 0.0))) / (2.0 * qa)
        xs = np.where(xf > 0.0, qc / (qa * xf), 0.0)
        sf = np.sqrt(np.maximum(xf, 0.0))
        ss = np.sqrt(np.maximum(xs, 0.0))
        fast_m[static], fast_p[static] = -sf[static], sf[static]
        slow_m[static], slow_p[static] = -ss[static], ss[static]

        # Bn = 0: double root at vn and a quadratic for the fast pair
        A = rhoh * (1.0 - cs2) * gam2 * gam2
        Q = b2 + rhoh * cs2
        C = gam2 * (Q - cs2 * vB * vB)
        root = np.sqrt(np.maximum(C * (A * (1.0 - vn * vn) + C), 0.0))
        lam_lo = (A * vn - root) / (A + C)
        lam_hi = (A * vn + root) / (A + C)
        fast_m[perp], fast_p[perp] = lam_lo[perp], lam_hi[perp]
        slow_m[perp], slow_p[perp] = vn[perp], vn[perp]

        if np.any(general):
            gi = general
            t2 = Q[gi] * gam2[gi] - cs2[gi] * b0[gi] ** 2
            t1 = -2.0 * Q[gi] * gam2[gi] * vn[gi] + 2.0 * cs2[gi] * bn[gi] * b0[gi]
            t0 = Q[gi] * gam2[gi] * vn[gi] ** 2 - cs2[gi] * bn[gi] ** 2
            Ag, vg = A[gi], vn[gi]
            roots = solve_quartic(
                Ag + t2,
                -4.0 * Ag * vg + t1,
                6.0 * Ag * vg ** 2 - (t2 - t0),
                -4.0 * Ag * vg ** 3 - t1,
                Ag * vg ** 4 - t0,
            )
            fast_imag = np.maximum(np.abs(roots[:, 0].imag), np.abs(roots[:, 3].imag))
            bad = ~(fast_imag <= ROOT_IMAG_TOL)
            if np.any(bad):
                full = np.zeros(vn.shape, dtype=bool)
                full[np.flatnonzero(gi)[bad]] = True
                raise EigenvalueError("complex magnetosonic roots", cell=_first_index(full, shape))
            fast_m[gi], slow_m[gi] = roots[:, 0].real, roots[:, 1].real
            slow_p[gi], fast_p[gi] = roots[:, 2].real, roots[:, 3].real

    out_of_range = ~(np.maximum(np.abs(fast_m), np.abs(fast_p)) < 1.0 + LIGHT_SPEED_TOL)
    if np.any(out_of_range):
        raise EigenvalueError("superluminal characteristic speed",
                              cell=_first_index(out_of_range, shape))

    fast_m = np.clip(fast_m, -1.0, 1.0)
    fast_p = np.clip(fast_p, -1.0, 1.0)
    slow_m = np.clip(np.minimum(slow_m, vn), fast_m, None)
    slow_p = np.clip(np.maximum(slow_p, vn), None, fast_p)
    al_m = np.clip(al_m, fast_m, slow_m)
    al_p = np.clip(al_p, slow_p, fast_p)

    return WaveSpeeds(*(x.reshape(shape) for x in
                        (fast_m, al_m, slow_m, vn.copy(), slow_p, al_p, fast_p)))


def max_signal_speed(prim, eos: Eos, direction: Any = 0) -> np.ndarray:
    ws = wave_speeds(prim, eos, direction)
    return np.maximum(np.abs(ws.fast_minus), np.abs(ws.fast_plus))


# ---------------------------------------------------------------------------
# Characteristic frames
# ---------------------------------------------------------------------------

def flux_jacobian(prim, eos: Eos, direction: Any = 0, rel_step: float = FRAME_REL_STEP) -> np.ndarray:
    """Central finite-difference Jacobian dF/dU, shape (..., 8, 8)."""
    w = _as_state_array(prim)
    shape = w.shape[:-1]
    cons = prim_to_cons(w, eos).reshape(-1, NCOMP)
    scale = np.max(np.abs(cons), axis=-1, keepdims=True)
    step = rel_step * np.maximum(np.abs(cons), 1e-3 * scale)
    J = np.empty((cons.shape[0], NCOMP, NCOMP))
    for j in range(NCOMP):
        up = cons.copy()
        dn = cons.copy()
        up[:, j] += step[:, j]
        dn[:, j] -= step[:, j]
        f_up = flux(cons_to_prim(up, eos), eos, direction)
        f_dn = flux(cons_to_prim(dn, eos), eos, direction)
        J[:, :, j] = (f_up - f_dn) / (2.0 * step[:, j, None])
    return J.reshape(shape + (NCOMP, NCOMP))


def characteristic_frames_batch(prim, eos: Eos, direction: Any = 0):
    """Left/right eigenvector matrices for many states.

    Returns (L, R, eigenvalues, ok). Where ``ok`` is False the decomposition
    was complex or ill-conditioned and L = R = identity (component-wise limiting).
    """
    w = _as_state_array(prim)
    shape = w.shape[:-1]
    J = flux_jacobian(w, eos, direction).reshape(-1, NCOMP, NCOMP)
    lam, vec = np.linalg.eig(J)
    order = np.argsort(lam.real, axis=-1)
    lam = np.take_along_axis(lam, order, axis=-1)
    vec = np.take_along_axis(vec, order[:, None, :], axis=-1)

    R = vec.real
    ok = np.max(np.abs(lam.imag), axis=-1) <= ROOT_IMAG_TOL
    ok &= np.max(np.abs(vec.imag), axis=(-2, -1)) <= ROOT_IMAG_TOL
    eye = np.broadcast_to(np.eye(NCOMP), R.shape)
    R = np.where(ok[:, None, None], R, eye)
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(R)
    ok &= np.isfinite(cond) & (cond <= FRAME_COND_MAX)
    R = np.where(ok[:, None, None], R, eye)
    L = np.linalg.inv(R)
    if not np.all(ok):
        logger.debug("%d degenerate characteristic frames", int(np.count_nonzero(~ok)))
    return (L.reshape(shape + (NCOMP, NCOMP)), R.reshape(shape + (NCOMP, NCOMP)),
            lam.real.reshape(shape + (NCOMP,)), ok.reshape(shape))


def characteristic_frames(prim, eos: Eos, direction: Any = 0):
    """(L, R) with L R = I for a single state; raises DegenerateFrameError."""
    L, R, _, ok = characteristic_frames_batch(_as_state_array(prim)[None, :], eos, direction)
    if not ok[0]:
        raise DegenerateFrameError("eigendecomposition is complex or ill-conditioned")
    return L[0], R[0]
