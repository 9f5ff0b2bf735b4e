"""
limiter.py — Troubled-cell detection and WENO rebuilding.

Detection applies the modified TVB minmod to the interface deviations of the
cell averages in characteristic variables. Flagged cells keep their averages;
their higher moments are recomputed from WENO point values at the Gauss
points. The central method additionally limits its edge polynomials with a
scalar one-dimensional version of the same procedure.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .basis import DivFreeBasis, ScalarBasis, ScalarBasis1D, gauss_rule
from .errors import RmhdError
from .physics import NCOMP, Eos, admissible_mask, characteristic_frames_batch, cons_to_prim
from .weno import weno_reconstructor

logger = logging.getLogger(__name__)

LimitMode = Literal["per-stage", "per-step", "off", "global"]
LIMIT_MODES = ("per-stage", "per-step", "off", "global")
# relative size below which a minmod correction counts as unchanged
FLAG_RTOL = 1e-10


def minmod(a1, a2, a3):
    a1, a2, a3 = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (a1, a2, a3)))
    s = np.sign(a1)
    same = (np.sign(a2) == s) & (np.sign(a3) == s)
    mag = np.minimum(np.abs(a1), np.minimum(np.abs(a2), np.abs(a3)))
    return np.where(same, s * mag, 0.0)


def tvb_minmod(a1, a2, a3, M: float, h: float):
    """a1 if |a1| <= M h^2, otherwise minmod(a1, a2, a3)."""
    a1 = np.asarray(a1, dtype=float)
    return np.where(np.abs(a1) <= M * h * h, a1, minmod(a1, a2, a3))


@dataclass
class TroubleFlags:
    """Boolean masks of limited cells (and edges for the central method)."""

    cells: np.ndarray
    dual_cells: np.ndarray | None = None
    edges_x: np.ndarray | None = None
    edges_y: np.ndarray | None = None
    fallbacks: int = 0

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.cells))

    @property
    def fraction(self) -> float:
        return self.count / max(self.cells.size, 1)

    @property
    def dual_count(self) -> int:
        return 0 if self.dual_cells is None else int(np.count_nonzero(self.dual_cells))

    @property
    def dual_fraction(self) -> float:
        if self.dual_cells is None:
            return 0.0
        return self.dual_count / max(self.dual_cells.size, 1)

    @property
    def edge_count(self) -> int:
        return sum(int(np.count_nonzero(e)) for e in (self.edges_x, self.edges_y) if e is not None)


# ---------------------------------------------------------------------------
# Characteristic frames with fallback
# ---------------------------------------------------------------------------

def frames_for_averages(avg: np.ndarray, eos: Eos, direction: int):
    """(L, R) per cell; identity where the average or its frame is unusable."""
    shape = avg.shape[:-1]
    flat = avg.reshape(-1, NCOMP)
    eye = np.eye(NCOMP)
    L = np.broadcast_to(eye, (flat.shape[0], NCOMP, NCOMP)).copy()
    R = L.copy()
    ok = admissible_mask(flat, eos)
    if np.any(ok):
        try:
            Lk, Rk, _, good = characteristic_frames_batch(cons_to_prim(flat[ok], eos), eos, direction)
        except RmhdError as exc:
            logger.debug("frame computation failed, limiting componentwise: %s", exc)
        else:
            L[ok], R[ok] = Lk, Rk
            ok[np.flatnonzero(ok)[~good]] = False
    return L.reshape(shape + (NCOMP, NCOMP)), R.reshape(shape + (NCOMP, NCOMP))


def _apply(M, x):
    return np.einsum("...ij,...j->...i", M, x)


def _flag_direction(avg, prev, nxt, hi, lo, L, M: float, h: float) -> np.ndarray:
    dev_hi = _apply(L, hi - avg)
    dev_lo = _apply(L, avg - lo)
    fwd = _apply(L, nxt - avg)
    bwd = _apply(L, avg - prev)
    # a cell is changed only beyond round-off of its characteristic state
    tol = FLAG_RTOL * np.max(np.abs(_apply(L, avg)), axis=-1, keepdims=True)
    changed = ((np.abs(tvb_minmod(dev_hi, fwd, bwd, M, h) - dev_hi) > tol)
               | (np.abs(tvb_minmod(dev_lo, fwd, bwd, M, h) - dev_lo) > tol))
    return np.any(changed, axis=-1)


# ---------------------------------------------------------------------------
# Detection
# ---------------------------------------------------------------------------

def detect_troubled(avg_padded: np.ndarray, ghosts: int, traces: dict, eos: Eos, M: float,
                    h, frames: dict | None = None) -> np.ndarray:
    """Per-cell trouble flags.

    avg_padded: ghost-padded cell averages, (N+2g, 8) or (nx+2g, ny+2g, 8).
    traces: line-averaged face values of the interior cells, keys
        right/left (and top/bottom in 2D).
    h: cell width, or (hx, hy) in 2D.
    frames: optional {direction: L} precomputed left eigenvector matrices.
    """
    g = ghosts
    two_d = avg_padded.ndim == 3
    frames = frames or {}
    if not two_d:
        avg = avg_padded[g:-g]
        L = frames.get(0)
        if L is None:
            L = frames_for_averages(avg, eos, 0)[0]
        return _flag_direction(avg, avg_padded[g - 1:-g - 1], avg_padded[g + 1:len(avg_padded) - g + 1],
                               traces["right"], traces["left"], L, M, h)

    hx, hy = h
    nxp, nyp = avg_padded.shape[:2]
    avg = avg_padded[g:nxp - g, g:nyp - g]
    Lx = frames.get(0)
    Ly = frames.get(1)
    if Lx is None:
        Lx = frames_for_averages(avg, eos, 0)[0]
    if Ly is None:
        Ly = frames_for_averages(avg, eos, 1)[0]
    fx = _flag_direction(avg, avg_padded[g - 1:nxp - g - 1, g:nyp - g], avg_padded[g + 1:nxp - g + 1, g:nyp - g],
                         traces["right"], traces["left"], Lx, M, hx)
    fy = _flag_direction(avg, avg_padded[g:nxp - g, g - 1:nyp - g - 1], avg_padded[g:nxp - g, g + 1:nyp - g + 1],
                         traces["top"], traces["bottom"], Ly, M, hy)
    return fx | fy


# ---------------------------------------------------------------------------
# WENO point values
# ---------------------------------------------------------------------------

def weno_points_1d(avg_padded, ghosts: int, cells: np.ndarray, L, R, K: int) -> np.ndarray:
    """Conserved values at the K+1 Gauss points of the given cells: (nt, K+1, 8)."""
    rec = weno_reconstructor(K)
    offsets = np.arange(-K, K + 1)
    stencil = avg_padded[cells[:, None] + ghosts + offsets[None, :]]
    char = np.einsum("tij,tkj->tik", L, stencil)
    vals = rec.reconstruct(char)
    return np.einsum("tij,tjp->tpi", R, vals)


def weno_points_2d(avg_padded, ghosts: int, ci: np.ndarray, cj: np.ndarray, L, R, K: int) -> np.ndarray:
    """Dimension-by-dimension WENO to the (K+1)^2 Gauss points: (nt, (K+1)^2, 8).

    The y sweep runs first and turns cell averages into x-averaged values at
    the eta Gauss points, then the x sweep gives point values. Both sweeps use
    the frame of the target cell.
    """
    rec = weno_reconstructor(K)
    off = np.arange(-K, K + 1)
    I = ci[:, None, None] + ghosts + off[None, :, None]
    J = cj[:, None, None] + ghosts + off[None, None, :]
    block = avg_padded[I, J]
    char = np.einsum("tij,tabj->tiab", L, block)
    along_y = rec.reconstruct(char)
    along_x = rec.reconstruct(np.swapaxes(along_y, -1, -2))
    q = K + 1
    vals = np.swapaxes(along_x, -1, -2).reshape(ci.size, NCOMP, q * q)
    return np.einsum("tij,tjp->tpi", R, vals)


# ---------------------------------------------------------------------------
# Rebuilds
# ---------------------------------------------------------------------------

def weno_rebuild_R(coeffs: np.ndarray, point_values: np.ndarray, phi: np.ndarray, weights: np.ndarray,
                   norms: np.ndarray) -> np.ndarray:
    """New moments l >= 1 by quadrature of the WENO point values; mode 0 kept.

    coeffs (nt, dim, nc), point_values (nt, npts, nc), phi (npts, dim).
    """
    new = np.einsum("p,pl,tpc->tlc", weights, phi, point_values) / norms[:, None]
    new[:, 0] = coeffs[:, 0]
    return new


def weno_rebuild_Q_noncentral(Q: np.ndarray, field_values: np.ndarray, basis: DivFreeBasis,
                              xi, eta, weights, factor=None) -> np.ndarray:
    """Keep the two constant modes, solve the Gram system for the rest.

    Q (nt, D_W); field_values (nt, npts, 2) WENO values of (Bx, By).
    """
    if factor is None:
        factor = cho_factor(basis.gram[2:, 2:])
    rhs = basis.moments(field_values, xi, eta, weights)[:, 2:]
    new = Q.copy()
    new[:, 2:] = cho_solve(factor, rhs.T).T
    return new


def limit_edge_fields(b: np.ndarray, axis: int, periodic: bool, M: float, h: float, K: int,
                      flag_all: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Limit edge polynomials b (..., K+1) along the edge direction ``axis``.

    Returns the limited array and the per-edge flags. Zeroth moments are
    never modified.
    """
    basis = ScalarBasis1D(K)
    avg = b[..., 0]
    pad = [(0, 0)] * avg.ndim
    pad[axis] = (K + 1, K + 1)
    avg_p = np.pad(avg, pad, mode="wrap" if periodic else "edge")
    n = avg.shape[axis]
    g = K + 1

    def shifted(k):
        return np.take(avg_p, np.arange(g + k, g + k + n), axis=axis)

    if flag_all:
        flags = np.ones(avg.shape, dtype=bool)
    else:
        hi = b @ basis.right
        lo = b @ basis.left
        fwd, bwd = shifted(1) - avg, avg - shifted(-1)
        flags = ((tvb_minmod(hi - avg, fwd, bwd, M, h) != hi - avg)
                 | (tvb_minmod(avg - lo, fwd, bwd, M, h) != avg - lo))
    if not np.any(flags):
        return b, flags

    stencil = np.stack([shifted(k) for k in range(-K, K + 1)], axis=-1)[flags]
    vals = weno_reconstructor(K).reconstruct(stencil)
    rule = gauss_rule(K + 1)
    moments = np.einsum("p,pm,tp->tm", rule.weights, basis.values(rule.nodes), vals) / basis.norms
    out = b.copy()
    out[flags, 1:] = moments[:, 1:]
    return out, flags


# ---------------------------------------------------------------------------
# Cell rebuild drivers
# ---------------------------------------------------------------------------

class CellLimiter:
    """Detection plus WENO rebuild for scalar-basis cells in 1D or 2D."""

    def __init__(self, K: int, eos: Eos, M: float, two_d: bool, mode: LimitMode = "per-stage"):
        if mode not in LIMIT_MODES:
            raise ValueError(f"unknown limiter mode {mode!r}")
        self.K = K
        self.eos = eos
        self.M = M
        self.two_d = two_d
        self.mode = mode
        self.rule = gauss_rule(K + 1)
        if two_d:
            self.basis = ScalarBasis(K)
            self.xi, self.eta, self.weights = self.rule.tensor()
            self.phi = self.basis.values(self.xi, self.eta)
        else:
            self.basis = ScalarBasis1D(K)
            self.xi, self.eta, self.weights = self.rule.nodes, None, self.rule.weights
            self.phi = self.basis.values(self.xi)

    def flags(self, avg_padded, ghosts: int, traces: dict, h) -> tuple[np.ndarray, dict]:
        g = ghosts
        avg = avg_padded[g:-g, g:-g] if self.two_d else avg_padded[g:-g]
        frames = {0: frames_for_averages(avg, self.eos, 0)}
        if self.mode == "global":
            flags = np.ones(avg.shape[:-1], dtype=bool)
        else:
            Ls = {0: frames[0][0]}
            if self.two_d:
                Ls[1] = frames_for_averages(avg, self.eos, 1)[0]
            flags = detect_troubled(avg_padded, g, traces, self.eos, self.M, h, Ls)
        return flags, frames

    def point_values(self, avg_padded, ghosts: int, flags: np.ndarray, frames: dict):
        """WENO point values for flagged cells and a recoverability mask."""
        idx = np.nonzero(flags)
        L, R = frames[0]
        if self.two_d:
            pts = weno_points_2d(avg_padded, ghosts, idx[0], idx[1], L[idx], R[idx], self.K)
        else:
            pts = weno_points_1d(avg_padded, ghosts, idx[0], L[idx], R[idx], self.K)
        ok = np.all(admissible_mask(pts, self.eos), axis=-1)
        return idx, pts, ok

    def rebuild(self, coeffs: np.ndarray, comps, idx, pts: np.ndarray, ok: np.ndarray) -> tuple[np.ndarray, int]:
        """Write rebuilt moments of ``comps`` into a copy of coeffs; P0 where not ok."""
        out = coeffs.copy()
        old = coeffs[idx]
        new = weno_rebuild_R(old, pts[..., comps], self.phi, self.weights, self.basis.norms)
        fallback = int(np.count_nonzero(~ok))
        if fallback:
            logger.info("WENO rebuild unrecoverable in %d cells, keeping cell averages only", fallback)
            new[~ok, 1:] = 0.0
        out[idx] = new
        return out, fallback
