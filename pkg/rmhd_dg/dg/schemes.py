"""
schemes.py — Scheme objects binding operators, limiter and time-step rule.

A scheme owns one problem discretisation (method, dimension, degree, mesh)
and exposes the protocol the time integrator drives:

    tau(state, cfl)   admissible step for Courant number cfl
    rhs(state, tau)   semi-discrete rates
    limit(state)      troubled-cell limiting, flags kept in ``last_flags``

plus the read-outs the runner writes to disk (cell-centre values, quadrature
values for error norms, divergence diagnostics).
"""
from __future__ import annotations

import logging
from typing import Literal

import numpy as np
from scipy.linalg import cho_factor

from .basis import gauss_rule
from .central import CentralMeshState, CentralSolver1D, CentralSolver2D, DivergenceReport, DualSolution, EdgeField
from .limiter import CellLimiter, TroubleFlags, limit_edge_fields, weno_rebuild_Q_noncentral
from .mesh import Mesh1D, Mesh2D, ghost_width
from .noncentral import Q_IDX, R_IDX, AlphaMode, DGSolution, NoncentralSolver1D, NoncentralSolver2D
from .physics import Floors, cons_to_prim
from .problems import ProblemSpec
from .time_integration import compute_dt

logger = logging.getLogger(__name__)

Method = Literal["noncentral", "central"]
METHODS = ("noncentral", "central")


def _face_mean(weights: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Line average over a face from Gauss values (..., npts, 8)."""
    return np.einsum("p,...pc->...c", weights, values) / np.sum(weights)


def resolve_floors(spec: ProblemSpec, floors: Floors | bool | None) -> Floors | None:
    """Explicit Floors win; True/False switch the defaults; None follows the problem."""
    if isinstance(floors, Floors):
        return floors
    if floors is None:
        return spec.floor_values()
    return Floors() if floors else None


def _limit_1d(limiter: CellLimiter, R: np.ndarray, padded: np.ndarray, g: int, basis, h: float):
    """Detect and rebuild on one interval mesh padded with g ghosts; returns (R, flags, fallbacks)."""
    avg_p = padded[:, 0, :]
    traces = {"right": np.einsum("l,nlc->nc", basis.right, R),
              "left": np.einsum("l,nlc->nc", basis.left, R)}
    flags, frames = limiter.flags(avg_p, g, traces, h)
    if not np.any(flags):
        return R, flags, 0
    idx, pts, ok = limiter.point_values(avg_p, g, flags, frames)
    out, fallbacks = limiter.rebuild(R, slice(None), idx, pts, ok)
    return out, flags, fallbacks


class _SchemeBase:
    method: Method
    dim: int

    def __init__(self, spec: ProblemSpec, K: int, M: float | None = None,
                 limit_mode: str = "per-stage", floors: Floors | bool | None = None):
        self.spec = spec
        self.K = K
        self.eos = spec.eos
        self.M = spec.M if M is None else M
        self.limit_mode = limit_mode
        self.floors = resolve_floors(spec, floors)
        self.limiter = CellLimiter(K, self.eos, self.M, self.dim == 2, limit_mode)
        self.error_rule = gauss_rule(K + 3)
        self.last_flags: TroubleFlags | None = None

    @property
    def flag_all(self) -> bool:
        return self.limit_mode == "global"

    def _prim(self, U: np.ndarray) -> np.ndarray:
        return cons_to_prim(U, self.eos, floors=self.floors)

    def divergence_report(self, state) -> DivergenceReport | None:
        return None


# ---------------------------------------------------------------------------
# Non-central
# ---------------------------------------------------------------------------

class NoncentralScheme1D(_SchemeBase):
    method = "noncentral"
    dim = 1

    def __init__(self, spec: ProblemSpec, K: int, n: int, M: float | None = None,
                 limit_mode: str = "per-stage", lf_alpha: AlphaMode = "local",
                 floors: Floors | bool | None = None):
        super().__init__(spec, K, M, limit_mode, floors)
        self.mesh = Mesh1D.uniform(spec.domain[0], spec.domain[1], n, ghost_width(K))
        self.solver = NoncentralSolver1D(self.mesh, K, self.eos, spec.bounds_x, lf_alpha, self.floors)

    def initial_state(self) -> DGSolution:
        return self.solver.project(self.spec.initial)

    def tau(self, state: DGSolution, cfl: float) -> float:
        return compute_dt(self.solver.cell_averages(state), self.eos, self.mesh.h, cfl, self.floors)

    def rhs(self, state: DGSolution, tau: float | None = None) -> DGSolution:
        return self.solver.rhs(state)

    def limit(self, state: DGSolution) -> DGSolution:
        padded = self.solver.pad(state.R)
        R, flags, fallbacks = _limit_1d(self.limiter, state.R, padded, self.mesh.ghosts,
                                        self.solver.basis, self.mesh.h)
        self.last_flags = TroubleFlags(flags, fallbacks=fallbacks)
        return DGSolution(R)

    def cell_averages(self, state: DGSolution) -> np.ndarray:
        return self.solver.cell_averages(state)

    def center_values(self, state: DGSolution, name: str = "primal"):
        """(coords, primitive values) at the cell centres."""
        U = self.solver.basis.evaluate(state.R, np.zeros(1))[:, 0]
        return (self.mesh.centers,), self._prim(U)

    def quadrature_values(self, state: DGSolution):
        """(primitive values, coords, weights) at the error quadrature points."""
        nodes = self.error_rule.nodes
        U = self.solver.basis.evaluate(state.R, nodes)
        x = self.mesh.physical(np.arange(self.mesh.n), nodes)
        return self._prim(U), (x,), self.error_rule.weights


class NoncentralScheme2D(_SchemeBase):
    method = "noncentral"
    dim = 2

    def __init__(self, spec: ProblemSpec, K: int, nx: int, ny: int, M: float | None = None,
                 limit_mode: str = "per-stage", lf_alpha: AlphaMode = "local",
                 floors: Floors | bool | None = None):
        super().__init__(spec, K, M, limit_mode, floors)
        x0, x1, y0, y1 = spec.domain
        self.mesh = Mesh2D.uniform(x0, x1, y0, y1, nx, ny, ghost_width(K))
        self.solver = NoncentralSolver2D(self.mesh, K, self.eos, spec.bounds_x, spec.bounds_y,
                                         lf_alpha, self.floors)
        self._q_factor = cho_factor(self.solver.divfree.gram[2:, 2:])

    def initial_state(self) -> DGSolution:
        return self.solver.project(self.spec.initial)

    def tau(self, state: DGSolution, cfl: float) -> float:
        return compute_dt(self.solver.cell_averages(state), self.eos, (self.mesh.hx, self.mesh.hy),
                          cfl, self.floors)

    def rhs(self, state: DGSolution, tau: float | None = None) -> DGSolution:
        return self.solver.rhs(state)

    def _traces(self, state: DGSolution) -> dict:
        s, w = self.solver, self.solver.edge_w
        return {face: _face_mean(w, s.evaluate(state.R, state.Q, s.phi_f[face], s.psi_f[face]))
                for face in ("right", "left", "top", "bottom")}

    def limit(self, state: DGSolution) -> DGSolution:
        g = self.mesh.ghosts
        padded = self.solver.pad(state, g)
        avg_p = self.solver.cell_averages(padded)
        lim = self.limiter
        flags, frames = lim.flags(avg_p, g, self._traces(state), (self.mesh.hx, self.mesh.hy))
        if not np.any(flags):
            self.last_flags = TroubleFlags(flags)
            return state
        idx, pts, ok = lim.point_values(avg_p, g, flags, frames)
        R, fallbacks = lim.rebuild(state.R, R_IDX, idx, pts, ok)
        Q = state.Q.copy()
        newQ = weno_rebuild_Q_noncentral(state.Q[idx], pts[..., Q_IDX], self.solver.divfree,
                                         lim.xi, lim.eta, lim.weights, self._q_factor)
        newQ[~ok, 2:] = 0.0
        Q[idx] = newQ
        self.last_flags = TroubleFlags(flags, fallbacks=fallbacks)
        return DGSolution(R, Q)

    def cell_averages(self, state: DGSolution) -> np.ndarray:
        return self.solver.cell_averages(state)

    def center_values(self, state: DGSolution, name: str = "primal"):
        U = self.solver.point_values(state, np.zeros(1), np.zeros(1))[..., 0, :]
        X, Y = self.mesh.centers()
        return (X, Y), self._prim(U)

    def quadrature_values(self, state: DGSolution):
        xi, eta, w = self.error_rule.tensor()
        U = self.solver.point_values(state, xi, eta)
        return self._prim(U), self.mesh.physical(xi, eta), w

    def divergence_report(self, state: DGSolution) -> DivergenceReport:
        """In-cell divergence (zero by construction) and normal-field jumps."""
        s = self.solver
        xi, eta, _ = gauss_rule(self.K + 2).tensor()
        field = s.divfree.evaluate(state.Q, xi, eta)
        scale = max(float(np.max(np.abs(field))), np.finfo(float).tiny)
        div = np.abs(s.in_cell_divergence(state, xi, eta))
        Bx_r = s.divfree.evaluate(state.Q, *s.face_pts["right"])[..., 0]
        Bx_l = s.divfree.evaluate(state.Q, *s.face_pts["left"])[..., 0]
        By_t = s.divfree.evaluate(state.Q, *s.face_pts["top"])[..., 1]
        By_b = s.divfree.evaluate(state.Q, *s.face_pts["bottom"])[..., 1]
        jump = max(np.max(np.abs(Bx_l[1:] - Bx_r[:-1]), initial=0.0),
                   np.max(np.abs(By_b[:, 1:] - By_t[:, :-1]), initial=0.0))
        h = min(self.mesh.hx, self.mesh.hy)
        return DivergenceReport(float(div.max()) * h / scale, float(jump) / scale, None)


# ---------------------------------------------------------------------------
# Central
# ---------------------------------------------------------------------------

class CentralScheme1D(_SchemeBase):
    method = "central"
    dim = 1

    def __init__(self, spec: ProblemSpec, K: int, n: int, M: float | None = None,
                 limit_mode: str = "per-stage", floors: Floors | bool | None = None):
        super().__init__(spec, K, M, limit_mode, floors)
        self.mesh = Mesh1D.uniform(spec.domain[0], spec.domain[1], n, ghost_width(K))
        self.solver = CentralSolver1D(self.mesh, K, self.eos, spec.bounds_x, self.floors)

    def initial_state(self) -> DualSolution:
        return self.solver.project(self.spec.initial)

    def tau(self, state: DualSolution, cfl: float) -> float:
        averages = [state.primal.R[:, 0, :], state.dual.R[:, 0, :]]
        return compute_dt(averages, self.eos, self.mesh.h, cfl, self.floors)

    def rhs(self, state: DualSolution, tau: float) -> DualSolution:
        return self.solver.rates(state, tau)

    def limit(self, state: DualSolution) -> DualSolution:
        out, flags, fallbacks = {}, {}, 0
        for name in ("primal", "dual"):
            R = state.mesh(name).R
            padded = self.solver.pad(R)
            out[name], flags[name], fb = _limit_1d(self.limiter, R, padded, self.mesh.ghosts,
                                                   self.solver.basis, self.mesh.h)
            fallbacks += fb
        self.last_flags = TroubleFlags(flags["primal"], dual_cells=flags["dual"], fallbacks=fallbacks)
        return DualSolution(CentralMeshState(out["primal"]), CentralMeshState(out["dual"]))

    def cell_averages(self, state: DualSolution, name: str = "primal") -> np.ndarray:
        return state.mesh(name).R[:, 0, :]

    def center_values(self, state: DualSolution, name: str = "primal"):
        U = self.solver.basis.evaluate(state.mesh(name).R, np.zeros(1))[:, 0]
        return (self.solver.meshes[name].centers,), self._prim(U)

    def quadrature_values(self, state: DualSolution):
        nodes = self.error_rule.nodes
        U = self.solver.basis.evaluate(state.primal.R, nodes)
        x = self.mesh.physical(np.arange(self.mesh.n), nodes)
        return self._prim(U), (x,), self.error_rule.weights


class CentralScheme2D(_SchemeBase):
    method = "central"
    dim = 2

    def __init__(self, spec: ProblemSpec, K: int, nx: int, ny: int, M: float | None = None,
                 limit_mode: str = "per-stage", floors: Floors | bool | None = None):
        super().__init__(spec, K, M, limit_mode, floors)
        x0, x1, y0, y1 = spec.domain
        self.mesh = Mesh2D.uniform(x0, x1, y0, y1, nx, ny, ghost_width(K))
        self.solver = CentralSolver2D(self.mesh, K, self.eos, spec.bounds_x, spec.bounds_y, self.floors)

    def initial_state(self) -> DualSolution:
        return self.solver.project(self.spec.initial, self.spec.vector_potential)

    def tau(self, state: DualSolution, cfl: float) -> float:
        averages = [self.solver.cell_averages(name, state.mesh(name)) for name in ("primal", "dual")]
        return compute_dt(averages, self.eos, (self.mesh.hx, self.mesh.hy), cfl, self.floors)

    def rhs(self, state: DualSolution, tau: float) -> DualSolution:
        return self.solver.rates(state, tau)

    def _traces(self, st: CentralMeshState, fields) -> dict:
        s = self.solver
        t, w = s.rule.nodes, s.rule.weights
        one = np.ones_like(t)
        faces = {"right": (one, t), "left": (-one, t), "top": (t, one), "bottom": (t, -one)}
        return {face: _face_mean(w, s.point_values(st, fields, *pts)) for face, pts in faces.items()}

    def _limit_mesh(self, name: str, st: CentralMeshState):
        s, lim = self.solver, self.limiter
        g = self.mesh.ghosts
        fields = s.reconstruct(name, st, check=False)
        Rp, Cxp, Cyp = s.pad_cells((st.R,) + tuple(fields), g)
        avg_p = s.cell_averages(name, CentralMeshState(Rp), (Cxp, Cyp))
        flags, frames = lim.flags(avg_p, g, self._traces(st, fields), (s.hx, s.hy))
        R, fallbacks = st.R, 0
        if np.any(flags):
            idx, pts, ok = lim.point_values(avg_p, g, flags, frames)
            R, fallbacks = lim.rebuild(st.R, R_IDX, idx, pts, ok)
        bx, ex = limit_edge_fields(st.edges.bx, 1, s.periodic[1], self.M, s.hy, self.K, self.flag_all)
        by, ey = limit_edge_fields(st.edges.by, 0, s.periodic[0], self.M, s.hx, self.K, self.flag_all)
        return CentralMeshState(R, EdgeField(bx, by), st.a7), flags, (ex, ey), fallbacks

    def limit(self, state: DualSolution) -> DualSolution:
        primal, fp, ep, fbp = self._limit_mesh("primal", state.primal)
        dual, fd, ed, fbd = self._limit_mesh("dual", state.dual)
        self.last_flags = TroubleFlags(
            fp, dual_cells=fd,
            edges_x=np.concatenate([ep[0].ravel(), ed[0].ravel()]),
            edges_y=np.concatenate([ep[1].ravel(), ed[1].ravel()]),
            fallbacks=fbp + fbd)
        return DualSolution(primal, dual)

    def cell_averages(self, state: DualSolution, name: str = "primal") -> np.ndarray:
        return self.solver.cell_averages(name, state.mesh(name))

    def center_values(self, state: DualSolution, name: str = "primal"):
        st = state.mesh(name)
        fields = self.solver.reconstruct(name, st, check=False)
        U = self.solver.point_values(st, fields, np.zeros(1), np.zeros(1))[..., 0, :]
        X, Y = self.solver.meshes[name].centers()
        return (X, Y), self._prim(U)

    def quadrature_values(self, state: DualSolution):
        xi, eta, w = self.error_rule.tensor()
        fields = self.solver.reconstruct("primal", state.primal, check=False)
        U = self.solver.point_values(state.primal, fields, xi, eta)
        return self._prim(U), self.mesh.physical(xi, eta), w

    def divergence_report(self, state: DualSolution) -> DivergenceReport:
        return self.solver.divergence_report(state, "primal")


# ---------------------------------------------------------------------------
# Factory
# ---------------------------------------------------------------------------

def build_scheme(spec: ProblemSpec, method: Method, K: int, cells: tuple[int, ...],
                 M: float | None = None, limit_mode: str = "per-stage",
                 lf_alpha: AlphaMode = "local", floors: Floors | bool | None = None):
    """Scheme object for ``method`` on the problem's dimension."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if spec.dim == 1:
        (n,) = cells[:1]
        if method == "noncentral":
            return NoncentralScheme1D(spec, K, n, M, limit_mode, lf_alpha, floors)
        return CentralScheme1D(spec, K, n, M, limit_mode, floors)
    nx, ny = cells
    if method == "noncentral":
        return NoncentralScheme2D(spec, K, nx, ny, M, limit_mode, lf_alpha, floors)
    return CentralScheme2D(spec, K, nx, ny, M, limit_mode, floors)


__all__ = [
    "METHODS",
    "CentralScheme1D",
    "CentralScheme2D",
    "NoncentralScheme1D",
    "NoncentralScheme2D",
    "build_scheme",
]
