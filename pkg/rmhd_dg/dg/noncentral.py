"""
Semi-discrete operators of the locally divergence-free RKDG method.

1D: all eight conserved components live on the scalar Legendre basis.
2D: D, m, Bz, E (the R-block) live on the scalar basis; (Bx, By) (the Q-block)
live on the divergence-free vector basis, so the in-cell field is solenoidal
by construction. Cells are coupled through a Lax-Friedrichs flux.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .basis import DivFreeBasis, ScalarBasis, ScalarBasis1D, gauss_rule
from .mesh import AxisBoundaries, BoundaryKind, Mesh1D, Mesh2D, fill_ghosts
from .physics import NCOMP, Eos, Floors, cons_to_prim, flux, max_signal_speed, prim_to_cons

logger = logging.getLogger(__name__)

AlphaMode = Literal["local", "global"]

# Conserved components carried by the scalar basis in 2D, and by the vector basis.
R_IDX = np.array([0, 1, 2, 3, 6, 7])
Q_IDX = np.array([4, 5])


@dataclass
class DGSolution:
    """Modal coefficients on one mesh.

    R: (N, dim, 8) in 1D, (nx, ny, dim, 6) in 2D.
    Q: (nx, ny, D_W) divergence-free coefficients in 2D, None in 1D.
    """

    R: np.ndarray
    Q: np.ndarray | None = None

    def copy(self) -> "DGSolution":
        return DGSolution(self.R.copy(), None if self.Q is None else self.Q.copy())


def lax_friedrichs(u_minus, u_plus, eos: Eos, direction: int, alpha: AlphaMode = "local",
                   floors: Floors | None = None) -> np.ndarray:
    """0.5 (F(U-) + F(U+) - a (U+ - U-)) with a the larger fast speed."""
    p_minus = cons_to_prim(u_minus, eos, floors=floors)
    p_plus = cons_to_prim(u_plus, eos, floors=floors)
    a = np.maximum(max_signal_speed(p_minus, eos, direction), max_signal_speed(p_plus, eos, direction))
    if alpha == "global":
        a = np.full_like(a, a.max())
    return 0.5 * (flux(p_minus, eos, direction) + flux(p_plus, eos, direction)
                  - a[..., None] * (u_plus - u_minus))


def degree_from_scalar_dim(dim: int, two_d: bool) -> int:
    for K in (1, 2, 3):
        if dim == ((K + 1) * (K + 2) // 2 if two_d else K + 1):
            return K
    raise ValueError(f"no polynomial degree matches {dim} modes")


# ---------------------------------------------------------------------------
# 1D
# ---------------------------------------------------------------------------

class NoncentralSolver1D:
    def __init__(self, mesh: Mesh1D, K: int, eos: Eos, bounds: AxisBoundaries,
                 lf_alpha: AlphaMode = "local", floors: Floors | None = None):
        self.mesh = mesh
        self.K = K
        self.eos = eos
        self.bounds = bounds
        self.lf_alpha = lf_alpha
        self.floors = floors
        self.basis = ScalarBasis1D(K)
        self.rule = gauss_rule(K + 1)
        self.phi = self.basis.values(self.rule.nodes)
        self.dphi = self.basis.derivatives(self.rule.nodes)

    def _ghost_block(self, kind: BoundaryKind):
        if kind.kind != "inflow":
            return None
        block = np.zeros((self.basis.dim, NCOMP))
        block[0] = prim_to_cons(np.asarray(kind.state), self.eos)
        return block

    def pad(self, R: np.ndarray, ghosts: int | None = None) -> np.ndarray:
        g = self.mesh.ghosts if ghosts is None else ghosts
        return fill_ghosts(R, g, self.bounds, 0, self._ghost_block(self.bounds.lower),
                           self._ghost_block(self.bounds.upper))

    def project(self, prim_fn) -> DGSolution:
        rule = gauss_rule(self.K + 3)
        x = self.mesh.physical(np.arange(self.mesh.n), rule.nodes)
        U = prim_to_cons(prim_fn(x), self.eos)
        return DGSolution(self.basis.project(U, rule))

    def point_values(self, sol: DGSolution, xi) -> np.ndarray:
        return self.basis.evaluate(sol.R, xi)

    def cell_averages(self, sol: DGSolution) -> np.ndarray:
        return sol.R[:, 0, :]

    def rhs(self, sol: DGSolution) -> DGSolution:
        c = sol.R
        cp = self.pad(c, 1)
        w = self.rule.weights

        U = np.einsum("pl,nlc->npc", self.phi, c)
        F = flux(cons_to_prim(U, self.eos, floors=self.floors), self.eos, 0)
        vol = np.einsum("p,pl,npc->nlc", w, self.dphi, F)

        u_minus = np.einsum("l,nlc->nc", self.basis.right, cp[:-1])
        u_plus = np.einsum("l,nlc->nc", self.basis.left, cp[1:])
        Fh = lax_friedrichs(u_minus, u_plus, self.eos, 0, self.lf_alpha, self.floors)

        surf = (self.basis.right[None, :, None] * Fh[1:, None, :]
                - self.basis.left[None, :, None] * Fh[:-1, None, :])
        scale = 2.0 / (self.mesh.h * self.basis.norms)
        return DGSolution((vol - surf) * scale[None, :, None])


def rhs_1d(solution: DGSolution, eos: Eos, mesh: Mesh1D, bounds: AxisBoundaries | None = None,
           lf_alpha: AlphaMode = "local") -> DGSolution:
    K = degree_from_scalar_dim(solution.R.shape[-2], two_d=False)
    bounds = bounds or AxisBoundaries.both(BoundaryKind.periodic())
    return NoncentralSolver1D(mesh, K, eos, bounds, lf_alpha).rhs(solution)


# ---------------------------------------------------------------------------
# 2D
# ---------------------------------------------------------------------------

class NoncentralSolver2D:
    def __init__(self, mesh: Mesh2D, K: int, eos: Eos, bounds_x: AxisBoundaries,
                 bounds_y: AxisBoundaries, lf_alpha: AlphaMode = "local",
                 floors: Floors | None = None):
        self.mesh = mesh
        self.K = K
        self.eos = eos
        self.bounds = (bounds_x, bounds_y)
        self.lf_alpha = lf_alpha
        self.floors = floors
        self.scalar = ScalarBasis(K)
        self.divfree = DivFreeBasis(K, mesh.hx, mesh.hy)
        self.rule = gauss_rule(K + 1)
        self._gram = cho_factor(self.divfree.gram)
        self._precompute()

    def _precompute(self) -> None:
        xi, eta, w = self.rule.tensor()
        self.vol_pts = (xi, eta)
        self.vol_w = w
        self.phi_v = self.scalar.values(xi, eta)
        self.grad_v = self.scalar.gradients(xi, eta)
        self.psi_v = self.divfree.values(xi, eta)
        self.psi_dxi = self.divfree.d_xi(xi, eta)
        self.psi_deta = self.divfree.d_eta(xi, eta)

        t = self.rule.nodes
        one = np.ones_like(t)
        self.edge_w = self.rule.weights
        self.face_pts = {
            "right": (one, t), "left": (-one, t), "top": (t, one), "bottom": (t, -one),
        }
        self.phi_f = {k: self.scalar.values(*p) for k, p in self.face_pts.items()}
        self.psi_f = {k: self.divfree.values(*p) for k, p in self.face_pts.items()}

    # -- state plumbing -----------------------------------------------------

    def evaluate(self, R, Q, phi, psi) -> np.ndarray:
        U = np.empty(R.shape[:-2] + (phi.shape[0], NCOMP))
        U[..., R_IDX] = np.einsum("pl,...lc->...pc", phi, R)
        U[..., Q_IDX] = np.einsum("plc,...l->...pc", psi, Q)
        return U

    def ghost_blocks(self, kind: BoundaryKind):
        if kind.kind != "inflow":
            return None, None
        u = prim_to_cons(np.asarray(kind.state), self.eos)
        rb = np.zeros((self.scalar.dim, R_IDX.size))
        rb[0] = u[R_IDX]
        qb = np.zeros(self.divfree.dim)
        qb[0], qb[1] = u[5], u[4]
        return rb, qb

    def pad_axis(self, sol: DGSolution, axis: int, ghosts: int) -> DGSolution:
        bounds = self.bounds[axis]
        rl, ql = self.ghost_blocks(bounds.lower)
        ru, qu = self.ghost_blocks(bounds.upper)
        return DGSolution(fill_ghosts(sol.R, ghosts, bounds, axis, rl, ru),
                          fill_ghosts(sol.Q, ghosts, bounds, axis, ql, qu))

    def pad(self, sol: DGSolution, ghosts: int | None = None) -> DGSolution:
        g = self.mesh.ghosts if ghosts is None else ghosts
        return self.pad_axis(self.pad_axis(sol, 0, g), 1, g)

    def project(self, prim_fn) -> DGSolution:
        xi, eta, w = gauss_rule(self.K + 3).tensor()
        X, Y = self.mesh.physical(xi, eta)
        U = prim_to_cons(prim_fn(X, Y), self.eos)
        R = self.scalar.project(U[..., R_IDX], xi, eta, w)
        rhs = self.divfree.moments(U[..., Q_IDX], xi, eta, w)
        Q = self._solve_gram(rhs)
        return DGSolution(R, Q)

    def _solve_gram(self, rhs: np.ndarray) -> np.ndarray:
        flat = rhs.reshape(-1, rhs.shape[-1])
        return cho_solve(self._gram, flat.T).T.reshape(rhs.shape)

    def cell_averages(self, sol: DGSolution) -> np.ndarray:
        avg = np.empty(sol.R.shape[:-2] + (NCOMP,))
        avg[..., R_IDX] = sol.R[..., 0, :]
        avg[..., 4] = sol.Q[..., 1]
        avg[..., 5] = sol.Q[..., 0]
        return avg

    def point_values(self, sol: DGSolution, xi, eta) -> np.ndarray:
        return self.evaluate(sol.R, sol.Q, self.scalar.values(xi, eta), self.divfree.values(xi, eta))

    def in_cell_divergence(self, sol: DGSolution, xi, eta) -> np.ndarray:
        return self.divfree.divergence(sol.Q, xi, eta)

    # -- operator -------------------------------------------------------------

    def _face_fluxes(self, sol: DGSolution, axis: int) -> np.ndarray:
        padded = self.pad_axis(sol, axis, 1)
        hi_face, lo_face = ("right", "left") if axis == 0 else ("top", "bottom")
        take = (lambda a, s: a[s]) if axis == 0 else (lambda a, s: a[:, s])
        u_minus = self.evaluate(take(padded.R, slice(None, -1)), take(padded.Q, slice(None, -1)),
                                self.phi_f[hi_face], self.psi_f[hi_face])
        u_plus = self.evaluate(take(padded.R, slice(1, None)), take(padded.Q, slice(1, None)),
                               self.phi_f[lo_face], self.psi_f[lo_face])
        return lax_friedrichs(u_minus, u_plus, self.eos, axis, self.lf_alpha, self.floors)

    def rhs(self, sol: DGSolution) -> DGSolution:
        hx, hy = self.mesh.hx, self.mesh.hy
        w = self.vol_w

        U = self.evaluate(sol.R, sol.Q, self.phi_v, self.psi_v)
        V = cons_to_prim(U, self.eos, floors=self.floors)
        F1 = flux(V, self.eos, 0)
        F2 = flux(V, self.eos, 1)

        vol_R = (np.einsum("p,pl,xypc->xylc", w * hy / 2, self.grad_v[..., 0], F1[..., R_IDX])
                 + np.einsum("p,pl,xypc->xylc", w * hx / 2, self.grad_v[..., 1], F2[..., R_IDX]))
        vol_Q = (np.einsum("p,plc,xypc->xyl", w * hy / 2, self.psi_dxi, F1[..., Q_IDX])
                 + np.einsum("p,plc,xypc->xyl", w * hx / 2, self.psi_deta, F2[..., Q_IDX]))

        Fx = self._face_fluxes(sol, 0)
        Fy = self._face_fluxes(sol, 1)
        ew = self.edge_w
        surf_R = (np.einsum("p,pl,xypc->xylc", ew * hy / 2, self.phi_f["right"], Fx[1:][..., R_IDX])
                  - np.einsum("p,pl,xypc->xylc", ew * hy / 2, self.phi_f["left"], Fx[:-1][..., R_IDX])
                  + np.einsum("p,pl,xypc->xylc", ew * hx / 2, self.phi_f["top"], Fy[:, 1:][..., R_IDX])
                  - np.einsum("p,pl,xypc->xylc", ew * hx / 2, self.phi_f["bottom"], Fy[:, :-1][..., R_IDX]))
        surf_Q = (np.einsum("p,plc,xypc->xyl", ew * hy / 2, self.psi_f["right"], Fx[1:][..., Q_IDX])
                  - np.einsum("p,plc,xypc->xyl", ew * hy / 2, self.psi_f["left"], Fx[:-1][..., Q_IDX])
                  + np.einsum("p,plc,xypc->xyl", ew * hx / 2, self.psi_f["top"], Fy[:, 1:][..., Q_IDX])
                  - np.einsum("p,plc,xypc->xyl", ew * hx / 2, self.psi_f["bottom"], Fy[:, :-1][..., Q_IDX]))

        area = hx * hy / 4.0
        dR = (vol_R - surf_R) / (area * self.scalar.norms)[:, None]
        dQ = self._solve_gram(vol_Q - surf_Q) / area
        return DGSolution(dR, dQ)


def rhs_2d(solution: DGSolution, eos: Eos, mesh: Mesh2D, bounds_x: AxisBoundaries | None = None,
           bounds_y: AxisBoundaries | None = None, lf_alpha: AlphaMode = "local") -> DGSolution:
    K = degree_from_scalar_dim(solution.R.shape[-2], two_d=True)
    periodic = AxisBoundaries.both(BoundaryKind.periodic())
    solver = NoncentralSolver2D(mesh, K, eos, bounds_x or periodic, bounds_y or periodic, lf_alpha)
    return solver.rhs(solution)
