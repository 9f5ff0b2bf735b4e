"""
Uniform interval and rectangle meshes, their duals, ghost filling.

A mesh is described by the left (bottom) coordinate of its first cell, the
cell width and the cell count. The dual of a mesh is offset by half a cell so
that dual cell corners sit on primal cell centres. For periodic directions the
dual has the same number of cells and wraps; otherwise it has one more cell and
overhangs the domain by half a cell on both sides.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import DomainViolationError

BoundaryName = Literal["periodic", "outflow", "inflow"]


def ghost_width(K: int) -> int:
    """Ghost layers for degree K: the WENO stencil reaches K cells, plus one face neighbour."""
    return K + 2


@dataclass(frozen=True)
class BoundaryKind:
    kind: BoundaryName
    state: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in ("periodic", "outflow", "inflow"):
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if self.kind == "inflow":
            if self.state is None or len(self.state) != 8:
                raise ValueError("inflow boundary needs an 8-component primitive state")
            from .physics import check_primitive
            check_primitive(np.asarray(self.state, dtype=float))

    @classmethod
    def periodic(cls) -> "BoundaryKind":
        return cls("periodic")

    @classmethod
    def outflow(cls) -> "BoundaryKind":
        return cls("outflow")

    @classmethod
    def inflow(cls, prim) -> "BoundaryKind":
        return cls("inflow", tuple(float(v) for v in np.asarray(prim, dtype=float)))

    @property
    def is_periodic(self) -> bool:
        return self.kind == "periodic"


@dataclass(frozen=True)
class AxisBoundaries:
    lower: BoundaryKind
    upper: BoundaryKind

    def __post_init__(self):
        if self.lower.is_periodic != self.upper.is_periodic:
            raise ValueError("periodic boundaries must be paired on both sides of an axis")

    @property
    def periodic(self) -> bool:
        return self.lower.is_periodic

    @classmethod
    def both(cls, kind: BoundaryKind) -> "AxisBoundaries":
        return cls(kind, kind)


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mesh1D:
    """n cells of width h starting at x_left."""

    x_left: float
    h: float
    n: int
    ghosts: int = 2

    def __post_init__(self):
        if self.n < 1 or not self.h > 0.0:
            raise DomainViolationError(f"invalid mesh: n={self.n}, h={self.h}")

    @classmethod
    def uniform(cls, a: float, b: float, n: int, ghosts: int = 2) -> "Mesh1D":
        return cls(float(a), (float(b) - float(a)) / n, int(n), ghosts)

    @property
    def centers(self) -> np.ndarray:
        return self.x_left + (np.arange(self.n) + 0.5) * self.h

    @property
    def length(self) -> float:
        return self.n * self.h

    def dual(self, periodic: bool) -> "Mesh1D":
        if periodic:
            return Mesh1D(self.x_left + 0.5 * self.h, self.h, self.n, self.ghosts)
        return Mesh1D(self.x_left - 0.5 * self.h, self.h, self.n + 1, self.ghosts)

    def physical(self, i, xi) -> np.ndarray:
        """Physical coordinate of reference point xi in cell i."""
        return self.centers[np.asarray(i)][..., None] + 0.5 * self.h * np.asarray(xi)

    def offset_to(self, other: "Mesh1D") -> int:
        """Index of the other-mesh cell centred on this mesh's cell 0 left edge."""
        return int(round((self.x_left - (other.x_left + 0.5 * other.h)) / self.h))


@dataclass(frozen=True)
class Mesh2D:
    x: Mesh1D
    y: Mesh1D

    @classmethod
    def uniform(cls, x0: float, x1: float, y0: float, y1: float, nx: int, ny: int,
                ghosts: int = 2) -> "Mesh2D":
        return cls(Mesh1D.uniform(x0, x1, nx, ghosts), Mesh1D.uniform(y0, y1, ny, ghosts))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.x.n, self.y.n)

    @property
    def hx(self) -> float:
        return self.x.h

    @property
    def hy(self) -> float:
        return self.y.h

    @property
    def ghosts(self) -> int:
        return self.x.ghosts

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.x.centers, self.y.centers, indexing="ij")

    def dual(self, periodic_x: bool, periodic_y: bool) -> "Mesh2D":
        return Mesh2D(self.x.dual(periodic_x), self.y.dual(periodic_y))

    def physical(self, xi, eta) -> tuple[np.ndarray, np.ndarray]:
        """Physical coordinates of reference points in every cell: (nx, ny, npts)."""
        cx, cy = self.centers()
        return (cx[..., None] + 0.5 * self.hx * np.asarray(xi),
                cy[..., None] + 0.5 * self.hy * np.asarray(eta))


# ---------------------------------------------------------------------------
# Ghost cells
# ---------------------------------------------------------------------------

def fill_ghosts(coeffs: np.ndarray, ghosts: int, bounds: AxisBoundaries, axis: int = 0,
                inflow_lower=None, inflow_upper=None) -> np.ndarray:
    """Return ``coeffs`` padded with ``ghosts`` cells on both sides of ``axis``.

    periodic copies cyclically, outflow repeats the adjacent interior cell and
    inflow fills with the supplied per-cell block (the projection of the fixed
    state), broadcast against one slice of ``coeffs``.
    """
    a = np.moveaxis(np.asarray(coeffs), axis, 0)
    n = a.shape[0]
    if bounds.periodic:
        if ghosts > n:
            raise DomainViolationError(f"{ghosts} periodic ghosts need at least as many cells, have {n}")
        padded = np.concatenate([a[n - ghosts:], a, a[:ghosts]], axis=0)
        return np.moveaxis(padded, 0, axis)

    def side(kind: BoundaryKind, edge_slice, block):
        if kind.kind == "inflow":
            if block is None:
                raise ValueError("inflow boundary requires its ghost block")
            return np.broadcast_to(np.asarray(block, dtype=a.dtype), (ghosts,) + a.shape[1:])
        return np.repeat(edge_slice, ghosts, axis=0)

    lo = side(bounds.lower, a[:1], inflow_lower)
    hi = side(bounds.upper, a[-1:], inflow_upper)
    padded = np.concatenate([lo, a, hi], axis=0)
    return np.moveaxis(padded, 0, axis)
