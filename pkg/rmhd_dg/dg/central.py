"""
Central DG on overlapping primal/dual meshes.

Each mesh carries the scalar-basis coefficients R of (D, m, [Bx, By,] Bz, E)
and, in 2D, the normal magnetic field on its cell edges (EdgeField) plus the
closure coefficient a7 for K = 3. The in-cell field is rebuilt from the edge
polynomials, which makes it exactly divergence-free with continuous normal
component.

Every update on one mesh reads only the other mesh's solution. The blended
central Euler step

    R^{n+1} = theta P(U_other) + (1 - theta) R^n + dt L(U_other)

is written as the ODE  dR/dt = (P - R)/tau + L  so that one Euler step with
dt = theta * tau reproduces it and Runge-Kutta drivers apply stage by stage.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .basis import (
    LEGENDRE_NORMS,
    CentralVectorSpace,
    ScalarBasis,
    ScalarBasis1D,
    gauss_rule,
    legendre_values,
)
from .errors import ReconstructionError
from .mesh import AxisBoundaries, BoundaryKind, Mesh1D, Mesh2D, fill_ghosts
from .noncentral import R_IDX
from .physics import NCOMP, Eos, Floors, cons_to_prim, flux, prim_to_cons

logger = logging.getLogger(__name__)

COMPATIBILITY_TOL = 1e-11
# int int ((xi^2 - 1/3) eta)^2 over the reference square
A7_NORM = LEGENDRE_NORMS[2] * LEGENDRE_NORMS[1]


@dataclass
class EdgeField:
    """bx: (nxe, ny, K+1) on vertical edges, edge i is the left edge of cell i.
    by: (nx, nye, K+1) on horizontal edges, edge j is the bottom edge of row j."""

    bx: np.ndarray
    by: np.ndarray


@dataclass
class CentralMeshState:
    R: np.ndarray
    edges: EdgeField | None = None
    a7: np.ndarray | None = None


@dataclass
class DualSolution:
    primal: CentralMeshState
    dual: CentralMeshState

    def mesh(self, name: str) -> CentralMeshState:
        return self.primal if name == "primal" else self.dual


@dataclass(frozen=True)
class DivergenceReport:
    max_divergence: float
    max_jump: float
    max_compatibility: float | None


def _other(name: str) -> str:
    return "dual" if name == "primal" else "primal"


# ---------------------------------------------------------------------------
# In-cell reconstruction
# ---------------------------------------------------------------------------

def compatibility_residual(bx_left, bx_right, by_bottom, by_top, hx: float, hy: float) -> np.ndarray:
    """hy (R0 - L0) + hx (T0 - B0) per cell, relative to the field scale."""
    res = hy * (bx_right[..., 0] - bx_left[..., 0]) + hx * (by_top[..., 0] - by_bottom[..., 0])
    scale = (hy * max(np.max(np.abs(bx_left[..., 0]), initial=0.0), np.max(np.abs(bx_right[..., 0]), initial=0.0))
             + hx * max(np.max(np.abs(by_bottom[..., 0]), initial=0.0), np.max(np.abs(by_top[..., 0]), initial=0.0)))
    return np.abs(res) / max(scale, np.finfo(float).tiny)


def reconstruct_cell_field(bx_left, bx_right, by_bottom, by_top, K: int, hx: float, hy: float,
                           a7=None, check: bool = True, tol: float = COMPATIBILITY_TOL):
    """In-cell (Bx, By) as Legendre tensor arrays matching the four edge traces.

    Edge arguments hold Legendre moments of shape (..., K+1). Returns (Cx, Cy)
    of shape (..., K+2, K+2). For K = 3 the coefficient of P2(xi) P1(eta) in
    Bx is the supplied ``a7``.
    """
    bx_left, bx_right = np.asarray(bx_left, float), np.asarray(bx_right, float)
    by_bottom, by_top = np.asarray(by_bottom, float), np.asarray(by_top, float)
    if check:
        residual = compatibility_residual(bx_left, bx_right, by_bottom, by_top, hx, hy)
        if np.any(residual > tol):
            worst = float(residual.max())
            raise ReconstructionError("edge fields violate the compatibility condition",
                                      residual=worst)

    sx, dx = 0.5 * (bx_right + bx_left), 0.5 * (bx_right - bx_left)
    sy, dy = 0.5 * (by_top + by_bottom), 0.5 * (by_top - by_bottom)
    r = hx / hy
    shape = sx.shape[:-1] + (K + 2, K + 2)
    Cx = np.zeros(shape)
    Cy = np.zeros(shape)

    Cx[..., 0, 0] = sx[..., 0] + r / 3.0 * dy[..., 1]
    Cx[..., 1, 0] = dx[..., 0]
    Cx[..., 0, 1] = sx[..., 1]
    Cx[..., 2, 0] = -0.5 * r * dy[..., 1]
    Cx[..., 1, 1] = dx[..., 1]
    Cy[..., 0, 0] = sy[..., 0] + dx[..., 1] / (3.0 * r)
    Cy[..., 0, 1] = dy[..., 0]
    Cy[..., 1, 0] = sy[..., 1]
    Cy[..., 0, 2] = -0.5 * dx[..., 1] / r
    Cy[..., 1, 1] = dy[..., 1]

    if K >= 2:
        Cx[..., 1, 0] += 2.0 * r / 15.0 * dy[..., 2]
        Cx[..., 0, 2] = sx[..., 2]
        Cx[..., 3, 0] = -r / 3.0 * dy[..., 2]
        Cx[..., 1, 2] = dx[..., 2]
        Cy[..., 0, 1] += 2.0 / (15.0 * r) * dx[..., 2]
        Cy[..., 2, 0] = sy[..., 2]
        Cy[..., 2, 1] = dy[..., 2]
        Cy[..., 0, 3] = -dx[..., 2] / (3.0 * r)

    if K >= 3:
        a7 = np.zeros(sx.shape[:-1]) if a7 is None else np.asarray(a7, float)
        Cx[..., 2, 0] = r * (3.0 / 35.0 * dy[..., 3] - 0.5 * dy[..., 1])
        Cx[..., 0, 3] = sx[..., 3]
        Cx[..., 4, 0] = -0.25 * r * dy[..., 3]
        Cx[..., 1, 3] = dx[..., 3]
        Cy[..., 0, 2] = (3.0 / 35.0 * dx[..., 3] - 0.5 * dx[..., 1]) / r
        Cy[..., 3, 0] = sy[..., 3]
        Cy[..., 3, 1] = dy[..., 3]
        Cy[..., 0, 4] = -0.25 * dx[..., 3] / r
        # underdetermined quadruple closed by a7
        Cx[..., 2, 1] = a7
        Cx[..., 0, 1] = sx[..., 1] - 2.0 / 3.0 * a7
        Cy[..., 1, 2] = -a7 / r
        Cy[..., 1, 0] = sy[..., 1] - 2.0 / 3.0 * Cy[..., 1, 2]
    return Cx, Cy


# ---------------------------------------------------------------------------
# 2D
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _PointSet:
    phi: np.ndarray
    px: np.ndarray
    py: np.ndarray


@dataclass(frozen=True)
class _Quadrant:
    qx: int
    qy: int
    w: np.ndarray
    phi: np.ndarray
    grad: np.ndarray
    p2: np.ndarray
    a7_test: np.ndarray
    points: _PointSet


@dataclass(frozen=True)
class _Half:
    q: int
    w: np.ndarray
    mu: np.ndarray
    dmu: np.ndarray
    p2: np.ndarray
    phi_right: np.ndarray
    phi_left: np.ndarray
    phi_top: np.ndarray
    phi_bottom: np.ndarray
    vline: _PointSet
    hline: _PointSet


def _face_neighbours(C: np.ndarray, axis: int, periodic: bool) -> tuple[np.ndarray, np.ndarray]:
    """Cells above and below every face normal to ``axis``; periodic axes include the wrap face."""
    if periodic:
        return C, np.roll(C, 1, axis=axis)
    n = C.shape[axis]
    return np.take(C, np.arange(1, n), axis=axis), np.take(C, np.arange(n - 1), axis=axis)


class CentralSolver2D:
    def __init__(self, mesh: Mesh2D, K: int, eos: Eos, bounds_x: AxisBoundaries,
                 bounds_y: AxisBoundaries, floors: Floors | None = None):
        if mesh.ghosts < 2:
            raise ValueError("central method needs at least two ghost layers")
        self.K = K
        self.eos = eos
        self.floors = floors
        self.bounds = (bounds_x, bounds_y)
        self.periodic = (bounds_x.periodic, bounds_y.periodic)
        self.meshes = {"primal": mesh, "dual": mesh.dual(*self.periodic)}
        self.hx, self.hy = mesh.hx, mesh.hy
        self.g = mesh.ghosts
        self.scalar = ScalarBasis(K)
        self.edge_basis = ScalarBasis1D(K)
        self.space = CentralVectorSpace(K)
        self.rule = gauss_rule(K + 1)
        self.offsets = {
            name: (m.x.offset_to(self.meshes[_other(name)].x), m.y.offset_to(self.meshes[_other(name)].y))
            for name, m in self.meshes.items()
        }
        self._precompute()

    # -- geometry -------------------------------------------------------------

    def edge_counts(self, name: str) -> tuple[int, int]:
        nx, ny = self.meshes[name].shape
        return (nx if self.periodic[0] else nx + 1, ny if self.periodic[1] else ny + 1)

    def _point_set(self, xi, eta) -> _PointSet:
        n = self.space.size - 1
        return _PointSet(self.scalar.values(xi, eta), legendre_values(n, xi), legendre_values(n, eta))

    def _precompute(self) -> None:
        t, w = self.rule.nodes, self.rule.weights
        tx, ty, wt = self.rule.tensor()
        self.quadrants = []
        for qx in (0, 1):
            for qy in (0, 1):
                sx, sy = 2 * qx - 1, 2 * qy - 1
                xa, ya = (tx + sx) / 2, (ty + sy) / 2
                p2 = legendre_values(2, xa)[..., 2]
                self.quadrants.append(_Quadrant(
                    qx, qy, wt / 4.0, self.scalar.values(xa, ya), self.scalar.gradients(xa, ya),
                    p2, p2 * ya, self._point_set((tx - sx) / 2, (ty - sy) / 2)))
        self.halves = []
        zero, one = np.zeros_like(t), np.ones_like(t)
        for q in (0, 1):
            s = 2 * q - 1
            ta, tb = (t + s) / 2, (t - s) / 2
            self.halves.append(_Half(
                q, w / 2.0, self.edge_basis.values(ta), self.edge_basis.derivatives(ta),
                legendre_values(2, ta)[..., 2],
                self.scalar.values(one, ta), self.scalar.values(-one, ta),
                self.scalar.values(ta, one), self.scalar.values(ta, -one),
                self._point_set(zero, tb), self._point_set(tb, zero)))
        self.center = self._point_set(np.zeros(1), np.zeros(1))

    # -- boundary plumbing ------------------------------------------------------

    def _ghost_blocks(self, kind: BoundaryKind):
        if kind.kind != "inflow":
            return None, None, None
        u = prim_to_cons(np.asarray(kind.state), self.eos)
        rb = np.zeros((self.scalar.dim, R_IDX.size))
        rb[0] = u[R_IDX]
        cx = np.zeros((self.space.size, self.space.size))
        cy = np.zeros_like(cx)
        cx[0, 0], cy[0, 0] = u[4], u[5]
        return rb, cx, cy

    def pad_cells(self, arrays: tuple[np.ndarray, ...], ghosts: int | None = None) -> tuple[np.ndarray, ...]:
        """Pad (R, Cx, Cy) with ghost cells in x then y."""
        g = self.g if ghosts is None else ghosts
        out = list(arrays)
        for axis in (0, 1):
            b = self.bounds[axis]
            lo, hi = self._ghost_blocks(b.lower), self._ghost_blocks(b.upper)
            out = [fill_ghosts(a, g, b, axis, lo[k], hi[k]) for k, a in enumerate(out)]
        return tuple(out)

    # -- reconstruction -----------------------------------------------------------

    def cell_edges(self, name: str, edges: EdgeField):
        nx, ny = self.meshes[name].shape
        bx, by = edges.bx, edges.by
        right = np.roll(bx, -1, axis=0)[:nx] if self.periodic[0] else bx[1:]
        top = np.roll(by, -1, axis=1)[:, :ny] if self.periodic[1] else by[:, 1:]
        return bx[:nx], right, by[:, :ny], top

    def reconstruct(self, name: str, st: CentralMeshState, check: bool = True):
        left, right, bottom, top = self.cell_edges(name, st.edges)
        return reconstruct_cell_field(left, right, bottom, top, self.K, self.hx, self.hy,
                                      a7=st.a7, check=check)

    def cell_averages(self, name: str, st: CentralMeshState, fields=None) -> np.ndarray:
        Cx, Cy = self.reconstruct(name, st, check=False) if fields is None else fields
        avg = np.empty(st.R.shape[:-2] + (NCOMP,))
        avg[..., R_IDX] = st.R[..., 0, :]
        avg[..., 4] = Cx[..., 0, 0]
        avg[..., 5] = Cy[..., 0, 0]
        return avg

    def point_values(self, st: CentralMeshState, fields, xi, eta) -> np.ndarray:
        Cx, Cy = fields
        U = np.empty(st.R.shape[:-2] + (np.size(xi), NCOMP))
        U[..., R_IDX] = np.einsum("pl,...lc->...pc", self.scalar.values(xi, eta), st.R)
        U[..., 4:6] = self.space.evaluate(Cx, Cy, xi, eta)
        return U

    # -- sampling the other mesh ---------------------------------------------------

    @staticmethod
    def _sample(padded, x0: int, nx: int, y0: int, ny: int, pts: _PointSet) -> np.ndarray:
        Rp, Cxp, Cyp = padded
        sl = (slice(x0, x0 + nx), slice(y0, y0 + ny))
        U = np.empty((nx, ny, pts.phi.shape[0], NCOMP))
        U[..., R_IDX] = np.einsum("pl,xylc->xypc", pts.phi, Rp[sl])
        U[..., 4] = np.einsum("pi,pj,xyij->xyp", pts.px, pts.py, Cxp[sl])
        U[..., 5] = np.einsum("pi,pj,xyij->xyp", pts.px, pts.py, Cyp[sl])
        return U

    def _prim(self, U):
        return cons_to_prim(U, self.eos, floors=self.floors)

    @staticmethod
    def _emf(V) -> np.ndarray:
        """G = Bx vy - By vx."""
        return V[..., 4] * V[..., 2] - V[..., 5] * V[..., 1]

    # -- rates ------------------------------------------------------------------------

    def rates(self, state: DualSolution, tau: float) -> DualSolution:
        padded = {}
        for name in ("primal", "dual"):
            st = state.mesh(name)
            Cx, Cy = self.reconstruct(name, st)
            padded[name] = self.pad_cells((st.R, Cx, Cy))
        return DualSolution(
            self._mesh_rates("primal", state.primal, padded["dual"], tau),
            self._mesh_rates("dual", state.dual, padded["primal"], tau),
        )

    def _mesh_rates(self, name: str, st: CentralMeshState, other, tau: float) -> CentralMeshState:
        nx, ny = self.meshes[name].shape
        nxe, nye = self.edge_counts(name)
        ox, oy = self.offsets[name]
        g, hx, hy, K = self.g, self.hx, self.hy, self.K

        proj = np.zeros_like(st.R)
        vol = np.zeros_like(st.R)
        a7_proj = np.zeros((nx, ny))
        a7_vol = np.zeros((nx, ny))
        for qd in self.quadrants:
            U = self._sample(other, ox + qd.qx + g, nx, oy + qd.qy + g, ny, qd.points)
            V = self._prim(U)
            F1 = flux(V, self.eos, 0)[..., R_IDX]
            F2 = flux(V, self.eos, 1)[..., R_IDX]
            proj += np.einsum("p,pl,xypc->xylc", qd.w, qd.phi, U[..., R_IDX])
            vol += (np.einsum("p,pl,xypc->xylc", qd.w * (2.0 / hx), qd.grad[..., 0], F1)
                    + np.einsum("p,pl,xypc->xylc", qd.w * (2.0 / hy), qd.grad[..., 1], F2))
            if K == 3:
                a7_proj += np.einsum("p,p,xyp->xy", qd.w, qd.a7_test, U[..., 4])
                a7_vol += np.einsum("p,p,xyp->xy", qd.w, qd.p2, self._emf(V))

        surf = np.zeros_like(st.R)
        vlines, hlines = [], []
        for hf in self.halves:
            U = self._sample(other, ox + g, nx + 1, oy + hf.q + g, ny, hf.vline)
            V = self._prim(U)
            F1 = flux(V, self.eos, 0)[..., R_IDX]
            surf += (2.0 / hx) * (np.einsum("p,pl,xypc->xylc", hf.w, hf.phi_right, F1[1:])
                                  - np.einsum("p,pl,xypc->xylc", hf.w, hf.phi_left, F1[:-1]))
            vlines.append((hf, U, V))
        for hf in self.halves:
            U = self._sample(other, ox + hf.q + g, nx, oy + g, ny + 1, hf.hline)
            V = self._prim(U)
            F2 = flux(V, self.eos, 1)[..., R_IDX]
            surf += (2.0 / hy) * (np.einsum("p,pl,xypc->xylc", hf.w, hf.phi_top, F2[:, 1:])
                                  - np.einsum("p,pl,xypc->xylc", hf.w, hf.phi_bottom, F2[:, :-1]))
            hlines.append((hf, U, V))

        norms = self.scalar.norms[:, None]
        dR = (proj / norms - st.R) / tau + (vol - surf) / norms

        Gc = self._emf(self._prim(self._sample(other, ox + g, nx + 1, oy + g, ny + 1, self.center)))[..., 0]
        a_m = LEGENDRE_NORMS[: K + 1]
        mu_hi, mu_lo = self.edge_basis.right, self.edge_basis.left

        pbx = np.zeros((nxe, ny, K + 1))
        gint = np.zeros((nxe, ny, K + 1))
        for hf, U, V in vlines:
            pbx += np.einsum("p,pm,xyp->xym", hf.w, hf.mu, U[:nxe, ..., 4])
            gint += np.einsum("p,pm,xyp->xym", hf.w, hf.dmu, self._emf(V[:nxe]))
        emf = gint - Gc[:nxe, 1:, None] * mu_hi + Gc[:nxe, :-1, None] * mu_lo
        dbx = (pbx / a_m - st.edges.bx) / tau + 2.0 / (hy * a_m) * emf

        pby = np.zeros((nx, nye, K + 1))
        gint = np.zeros((nx, nye, K + 1))
        for hf, U, V in hlines:
            pby += np.einsum("p,pm,xyp->xym", hf.w, hf.mu, U[:, :nye, :, 5])
            gint += np.einsum("p,pm,xyp->xym", hf.w, hf.dmu, self._emf(V[:, :nye]))
        emf = -gint + Gc[1:, :nye, None] * mu_hi - Gc[:-1, :nye, None] * mu_lo
        dby = (pby / a_m - st.edges.by) / tau + 2.0 / (hx * a_m) * emf

        da7 = None
        if K == 3:
            top = np.zeros((nx, ny))
            bottom = np.zeros((nx, ny))
            for hf, _, V in hlines:
                G = self._emf(V)
                top += np.einsum("p,p,xyp->xy", hf.w, hf.p2, G[:, 1:])
                bottom += np.einsum("p,p,xyp->xy", hf.w, hf.p2, G[:, :-1])
            da7 = (a7_proj / A7_NORM - st.a7) / tau + 2.0 / (hy * A7_NORM) * (a7_vol - top - bottom)

        return CentralMeshState(dR, EdgeField(dbx, dby), da7)

    # -- blended Euler steps ------------------------------------------------------------

    def _euler(self, state: DualSolution, dt: float, theta: float) -> DualSolution:
        if not 0.0 < theta <= 1.0:
            raise ValueError(f"blending factor must lie in (0, 1], got {theta}")
        rates = self.rates(state, dt / theta)

        def step(st: CentralMeshState, rt: CentralMeshState) -> CentralMeshState:
            a7 = None if st.a7 is None else st.a7 + dt * rt.a7
            return CentralMeshState(st.R + dt * rt.R,
                                    EdgeField(st.edges.bx + dt * rt.edges.bx, st.edges.by + dt * rt.edges.by),
                                    a7)
        return DualSolution(step(state.primal, rates.primal), step(state.dual, rates.dual))

    def step_R_central(self, state: DualSolution, dt: float, theta: float) -> tuple[np.ndarray, np.ndarray]:
        new = self._euler(state, dt, theta)
        return new.primal.R, new.dual.R

    def evolve_edge_fields(self, state: DualSolution, dt: float, theta: float) -> tuple[EdgeField, EdgeField]:
        new = self._euler(state, dt, theta)
        return new.primal.edges, new.dual.edges

    def compute_a7(self, state: DualSolution, dt: float, theta: float) -> tuple[np.ndarray, np.ndarray] | None:
        if self.K != 3:
            return None
        new = self._euler(state, dt, theta)
        return new.primal.a7, new.dual.a7

    # -- initial data ----------------------------------------------------------------------

    def project(self, prim_fn, vector_potential=None) -> DualSolution:
        return DualSolution(self._project_mesh("primal", prim_fn, vector_potential),
                            self._project_mesh("dual", prim_fn, vector_potential))

    def _project_mesh(self, name: str, prim_fn, vector_potential) -> CentralMeshState:
        mesh = self.meshes[name]
        K = self.K
        xi, eta, w = gauss_rule(K + 3).tensor()
        X, Y = mesh.physical(xi, eta)
        U = prim_to_cons(prim_fn(X, Y), self.eos)
        R = self.scalar.project(U[..., R_IDX], xi, eta, w)

        a7 = None
        if K == 3:
            test = legendre_values(2, xi)[..., 2] * eta
            a7 = np.einsum("p,p,xyp->xy", w, test, U[..., 4]) / A7_NORM

        rule = gauss_rule(K + 3)
        t, tw = rule.nodes, rule.weights
        mu = self.edge_basis.values(t)
        nxe, nye = self.edge_counts(name)
        x_edges = mesh.x.x_left + np.arange(nxe) * mesh.hx
        y_edges = mesh.y.x_left + np.arange(nye) * mesh.hy
        yc, xc = mesh.y.centers, mesh.x.centers

        XV = np.broadcast_to(x_edges[:, None, None], (nxe, mesh.y.n, t.size))
        YV = yc[None, :, None] + 0.5 * mesh.hy * t
        bx_vals = prim_to_cons(prim_fn(XV, np.broadcast_to(YV, XV.shape)), self.eos)[..., 4]
        bx = np.einsum("p,pm,xyp->xym", tw, mu, bx_vals) / LEGENDRE_NORMS[: K + 1]

        XH = xc[:, None, None] + 0.5 * mesh.hx * t
        YH = np.broadcast_to(y_edges[None, :, None], (mesh.x.n, nye, t.size))
        by_vals = prim_to_cons(prim_fn(np.broadcast_to(XH, YH.shape), YH), self.eos)[..., 5]
        by = np.einsum("p,pm,xyp->xym", tw, mu, by_vals) / LEGENDRE_NORMS[: K + 1]

        if vector_potential is not None:
            y_lo, y_hi = yc - 0.5 * mesh.hy, yc + 0.5 * mesh.hy
            bx[..., 0] = (vector_potential(x_edges[:, None], y_hi[None, :])
                          - vector_potential(x_edges[:, None], y_lo[None, :])) / mesh.hy
            x_lo, x_hi = xc - 0.5 * mesh.hx, xc + 0.5 * mesh.hx
            by[..., 0] = -(vector_potential(x_hi[:, None], y_edges[None, :])
                           - vector_potential(x_lo[:, None], y_edges[None, :])) / mesh.hx
        return CentralMeshState(R, EdgeField(bx, by), a7)

    # -- diagnostics -------------------------------------------------------------------------

    def divergence_report(self, state: DualSolution, name: str = "primal") -> DivergenceReport:
        st = state.mesh(name)
        left, right, bottom, top = self.cell_edges(name, st.edges)
        compat = compatibility_residual(left, right, bottom, top, self.hx, self.hy)
        Cx, Cy = self.reconstruct(name, st, check=False)
        xi, eta, _ = gauss_rule(self.K + 2).tensor()
        scale = max(float(np.max(np.abs(self.space.evaluate(Cx, Cy, xi, eta)))), np.finfo(float).tiny)
        div = np.abs(self.space.divergence(Cx, Cy, xi, eta, self.hx, self.hy))

        t = self.rule.nodes
        one = np.ones_like(t)
        (cx_hi, cx_lo), (cy_hi, cy_lo) = (_face_neighbours(C, 0, self.periodic[0]) for C in (Cx, Cy))
        jump_x = (self.space.evaluate(cx_hi, cy_hi, -one, t)[..., 0]
                  - self.space.evaluate(cx_lo, cy_lo, one, t)[..., 0])
        (cx_hi, cx_lo), (cy_hi, cy_lo) = (_face_neighbours(C, 1, self.periodic[1]) for C in (Cx, Cy))
        jump_y = (self.space.evaluate(cx_hi, cy_hi, t, -one)[..., 1]
                  - self.space.evaluate(cx_lo, cy_lo, t, one)[..., 1])
        jump = max(np.max(np.abs(jump_x), initial=0.0), np.max(np.abs(jump_y), initial=0.0))
        return DivergenceReport(float(div.max()) * min(self.hx, self.hy) / scale, float(jump) / scale,
                                float(compat.max()))


# ---------------------------------------------------------------------------
# 1D
# ---------------------------------------------------------------------------

class CentralSolver1D:
    """All eight components on the scalar basis of both interval meshes."""

    def __init__(self, mesh: Mesh1D, K: int, eos: Eos, bounds: AxisBoundaries,
                 floors: Floors | None = None):
        self.K = K
        self.eos = eos
        self.floors = floors
        self.bounds = bounds
        self.meshes = {"primal": mesh, "dual": mesh.dual(bounds.periodic)}
        self.g = mesh.ghosts
        self.basis = ScalarBasis1D(K)
        self.rule = gauss_rule(K + 1)
        self.offsets = {name: m.offset_to(self.meshes[_other(name)]) for name, m in self.meshes.items()}

    def _ghost_block(self, kind: BoundaryKind):
        if kind.kind != "inflow":
            return None
        block = np.zeros((self.basis.dim, NCOMP))
        block[0] = prim_to_cons(np.asarray(kind.state), self.eos)
        return block

    def pad(self, R: np.ndarray, ghosts: int | None = None) -> np.ndarray:
        g = self.g if ghosts is None else ghosts
        return fill_ghosts(R, g, self.bounds, 0, self._ghost_block(self.bounds.lower),
                           self._ghost_block(self.bounds.upper))

    def project(self, prim_fn, vector_potential=None) -> DualSolution:
        rule = gauss_rule(self.K + 3)
        out = {}
        for name, mesh in self.meshes.items():
            x = mesh.physical(np.arange(mesh.n), rule.nodes)
            out[name] = CentralMeshState(self.basis.project(prim_to_cons(prim_fn(x), self.eos), rule))
        return DualSolution(out["primal"], out["dual"])

    def cell_averages(self, name: str, st: CentralMeshState, fields=None) -> np.ndarray:
        return st.R[:, 0, :]

    def rates(self, state: DualSolution, tau: float) -> DualSolution:
        return DualSolution(
            CentralMeshState(self._mesh_rates("primal", state.primal.R, self.pad(state.dual.R), tau)),
            CentralMeshState(self._mesh_rates("dual", state.dual.R, self.pad(state.primal.R), tau)),
        )

    def _mesh_rates(self, name: str, R: np.ndarray, other: np.ndarray, tau: float) -> np.ndarray:
        n = self.meshes[name].n
        h = self.meshes[name].h
        o, g = self.offsets[name], self.g
        t, w = self.rule.nodes, self.rule.weights
        proj = np.zeros_like(R)
        vol = np.zeros_like(R)
        for q in (0, 1):
            s = 2 * q - 1
            ta, tb = (t + s) / 2, (t - s) / 2
            U = self.basis.evaluate(other[o + q + g: o + q + g + n], tb)
            F = flux(cons_to_prim(U, self.eos, floors=self.floors), self.eos, 0)
            proj += np.einsum("p,pl,npc->nlc", w / 2, self.basis.values(ta), U)
            vol += np.einsum("p,pl,npc->nlc", w / 2, self.basis.derivatives(ta), F)
        Uc = self.basis.evaluate(other[o + g: o + g + n + 1], np.zeros(1))[:, 0]
        Fc = flux(cons_to_prim(Uc, self.eos, floors=self.floors), self.eos, 0)
        surf = (self.basis.right[None, :, None] * Fc[1:, None, :]
                - self.basis.left[None, :, None] * Fc[:-1, None, :])
        norms = self.basis.norms[:, None]
        return (proj / norms - R) / tau + 2.0 / h * (vol - surf) / norms
