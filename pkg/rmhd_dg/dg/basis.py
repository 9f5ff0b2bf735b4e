"""
Reference-cell polynomial spaces and Gauss rules.

Reference coordinates are xi = 2(x - x_j)/h_x and eta = 2(y - y_k)/h_y on
[-1, 1] (or [-1, 1]^2). Scalar bases are products of monic Legendre
polynomials; the divergence-free basis is the fixed list of 14 vector fields
whose first 5 / 9 / 14 members span the K = 1 / 2 / 3 spaces.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg
from numpy.polynomial import polynomial as nppoly

MAX_DEGREE = 3

# Monic Legendre polynomials as monomial coefficients (lowest order first).
_MONIC_LEGENDRE = (
    np.array([1.0]),
    np.array([0.0, 1.0]),
    np.array([-1.0 / 3.0, 0.0, 1.0]),
    np.array([0.0, -3.0 / 5.0, 0.0, 1.0]),
    np.array([3.0 / 35.0, 0.0, -6.0 / 7.0, 0.0, 1.0]),
)
# int_{-1}^{1} P_n^2
LEGENDRE_NORMS = np.array([2.0, 2.0 / 3.0, 8.0 / 45.0, 8.0 / 175.0, 128.0 / 11025.0])


def _check_degree(K: int) -> None:
    if K not in (1, 2, 3):
        raise ValueError(f"polynomial degree K must be 1, 2 or 3, got {K}")


def legendre_values(n_max: int, x) -> np.ndarray:
    """Monic Legendre P_0..P_{n_max} at x; shape x.shape + (n_max+1,)."""
    x = np.asarray(x, dtype=float)
    return np.stack([nppoly.polyval(x, _MONIC_LEGENDRE[n]) for n in range(n_max + 1)], axis=-1)


def legendre_derivatives(n_max: int, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.stack([nppoly.polyval(x, nppoly.polyder(_MONIC_LEGENDRE[n])) if n else np.zeros_like(x)
                     for n in range(n_max + 1)], axis=-1)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule with q points on [-1, 1], exact to degree 2q - 1."""

    q: int
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("quadrature needs at least one point")
        x, w = npleg.leggauss(self.q)
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)

    def tensor(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(xi, eta, weights) of the q*q product rule, xi varying slowest."""
        xi, eta = np.meshgrid(self.nodes, self.nodes, indexing="ij")
        w = np.outer(self.weights, self.weights)
        return xi.ravel(), eta.ravel(), w.ravel()


@lru_cache(maxsize=None)
def gauss_rule(q: int) -> QuadratureRule:
    return QuadratureRule(q)


# ---------------------------------------------------------------------------
# Scalar bases
# ---------------------------------------------------------------------------

class ScalarBasis1D:
    """P_0..P_K on [-1, 1]."""

    def __init__(self, K: int):
        _check_degree(K)
        self.K = K
        self.dim = K + 1
        self.norms = LEGENDRE_NORMS[: self.dim].copy()
        self.right = legendre_values(K, 1.0)
        self.left = legendre_values(K, -1.0)

    def values(self, x) -> np.ndarray:
        return legendre_values(self.K, x)

    def derivatives(self, x) -> np.ndarray:
        return legendre_derivatives(self.K, x)

    def project(self, point_values, rule: QuadratureRule) -> np.ndarray:
        """Modal coefficients from values at ``rule`` nodes on axis -2.

        point_values has shape (..., q, ncomp); result (..., dim, ncomp).
        """
        phi = self.values(rule.nodes)
        return np.einsum("p,pl,...pc->...lc", rule.weights, phi, point_values) / self.norms[:, None]

    def evaluate(self, coeffs, x) -> np.ndarray:
        """coeffs (..., dim, ncomp) at points x -> (..., npts, ncomp)."""
        return np.einsum("pl,...lc->...pc", self.values(x), coeffs)


class ScalarBasis:
    """Tensor Legendre products P_i(xi) P_j(eta) with i + j <= K.

    Ordered by total degree, then by decreasing xi-degree:
    (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), (3,0), ...
    """

    def __init__(self, K: int):
        _check_degree(K)
        self.K = K
        self.indices = [(d - j, j) for d in range(K + 1) for j in range(d + 1)]
        self.dim = len(self.indices)
        self.norms = np.array([LEGENDRE_NORMS[i] * LEGENDRE_NORMS[j] for i, j in self.indices])

    def values(self, xi, eta) -> np.ndarray:
        px = legendre_values(self.K, xi)
        py = legendre_values(self.K, eta)
        return np.stack([px[..., i] * py[..., j] for i, j in self.indices], axis=-1)

    def gradients(self, xi, eta) -> np.ndarray:
        """Reference gradient (d/dxi, d/deta), shape xi.shape + (dim, 2)."""
        px, py = legendre_values(self.K, xi), legendre_values(self.K, eta)
        dx, dy = legendre_derivatives(self.K, xi), legendre_derivatives(self.K, eta)
        gx = np.stack([dx[..., i] * py[..., j] for i, j in self.indices], axis=-1)
        gy = np.stack([px[..., i] * dy[..., j] for i, j in self.indices], axis=-1)
        return np.stack([gx, gy], axis=-1)

    def eval_scalar(self, index: int, xi, eta):
        if not 0 <= index < self.dim:
            raise IndexError(f"basis index {index} out of range for K={self.K}")
        return self.values(xi, eta)[..., index], self.gradients(xi, eta)[..., index, :]

    def project(self, point_values, xi, eta, weights) -> np.ndarray:
        """(..., npts, ncomp) values at a 2D rule -> (..., dim, ncomp) coefficients."""
        phi = self.values(xi, eta)
        return np.einsum("p,pl,...pc->...lc", weights, phi, point_values) / self.norms[:, None]

    def evaluate(self, coeffs, xi, eta) -> np.ndarray:
        return np.einsum("pl,...lc->...pc", self.values(xi, eta), coeffs)


# ---------------------------------------------------------------------------
# Divergence-free vector basis
# ---------------------------------------------------------------------------

def _poly2(entries: dict[tuple[int, int], float]) -> np.ndarray:
    c = np.zeros((4, 4))
    for (i, j), v in entries.items():
        c[i, j] = v
    return c


def _divfree_members(hx: float, hy: float) -> list[tuple[np.ndarray, np.ndarray]]:
    """(v1, v2) monomial coefficient pairs, c[i, j] multiplying xi^i eta^j."""
    t = 1.0 / 3.0
    return [
        (_poly2({}), _poly2({(0, 0): 1.0})),
        (_poly2({(0, 0): 1.0}), _poly2({})),
        (_poly2({}), _poly2({(1, 0): 1.0})),
        (_poly2({(0, 1): 1.0}), _poly2({})),
        (_poly2({(1, 0): hx}), _poly2({(0, 1): -hy})),
        (_poly2({(0, 2): 1.0, (0, 0): -t}), _poly2({})),
        (_poly2({}), _poly2({(2, 0): 1.0, (0, 0): -t})),
        (_poly2({(2, 0): hx, (0, 0): -t * hx}), _poly2({(1, 1): -2.0 * hy})),
        (_poly2({(1, 1): -2.0 * hx}), _poly2({(0, 2): hy, (0, 0): -t * hy})),
        (_poly2({(0, 3): 1.0, (0, 1): -0.6}), _poly2({})),
        (_poly2({}), _poly2({(3, 0): 1.0, (1, 0): -0.6})),
        (_poly2({(2, 1): hx, (0, 1): -t * hx}), _poly2({(1, 2): -hy, (1, 0): t * hy})),
        (_poly2({(1, 2): hx, (1, 0): -t * hx}), _poly2({(0, 3): -t * hy, (0, 1): t * hy})),
        (_poly2({(3, 0): t * hx, (1, 0): -t * hx}), _poly2({(2, 1): -hy, (0, 1): t * hy})),
    ]


def divfree_dim(K: int) -> int:
    return (K + 1) * (K + 4) // 2


class DivFreeBasis:
    """Vector fields with zero physical divergence on an hx-by-hy cell.

    Member 0 is (0, 1) and member 1 is (1, 0); all later members have zero
    cell mean, so Q[1] and Q[0] are the cell averages of Bx and By.
    """

    def __init__(self, K: int, hx: float = 1.0, hy: float = 1.0):
        _check_degree(K)
        self.K = K
        self.hx = float(hx)
        self.hy = float(hy)
        self.dim = divfree_dim(K)
        self._members = _divfree_members(self.hx, self.hy)[: self.dim]
        self._dxi = [(nppoly.polyder(a, axis=0), nppoly.polyder(b, axis=0)) for a, b in self._members]
        self._deta = [(nppoly.polyder(a, axis=1), nppoly.polyder(b, axis=1)) for a, b in self._members]
        self.gram = self._reference_gram()

    @staticmethod
    def _eval(pairs, xi, eta) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        out = [np.stack([nppoly.polyval2d(xi, eta, a), nppoly.polyval2d(xi, eta, b)], axis=-1)
               for a, b in pairs]
        return np.stack(out, axis=-2)

    def values(self, xi, eta) -> np.ndarray:
        """shape xi.shape + (dim, 2)."""
        return self._eval(self._members, xi, eta)

    def d_xi(self, xi, eta) -> np.ndarray:
        return self._eval(self._dxi, xi, eta)

    def d_eta(self, xi, eta) -> np.ndarray:
        return self._eval(self._deta, xi, eta)

    def eval_divfree(self, index: int, xi, eta) -> np.ndarray:
        if not 0 <= index < self.dim:
            raise IndexError(f"divergence-free index {index} out of range for K={self.K}")
        return self.values(xi, eta)[..., index, :]

    def divergence(self, coeffs, xi, eta) -> np.ndarray:
        """Physical divergence of sum_l coeffs[..., l] phi_l at the given points."""
        gx = self.d_xi(xi, eta)[..., 0]
        gy = self.d_eta(xi, eta)[..., 1]
        div = 2.0 / self.hx * gx + 2.0 / self.hy * gy
        return np.einsum("pl,...l->...p", div, coeffs)

    def _reference_gram(self) -> np.ndarray:
        xi, eta, w = gauss_rule(5).tensor()
        phi = self.values(xi, eta)
        return np.einsum("p,plc,pmc->lm", w, phi, phi)

    def evaluate(self, coeffs, xi, eta) -> np.ndarray:
        """coeffs (..., dim) -> (Bx, By) values (..., npts, 2)."""
        return np.einsum("plc,...l->...pc", self.values(xi, eta), coeffs)

    def moments(self, field_values, xi, eta, weights) -> np.ndarray:
        """int phi_l . B over the reference cell; field_values (..., npts, 2)."""
        return np.einsum("p,plc,...pc->...l", weights, self.values(xi, eta), field_values)


# ---------------------------------------------------------------------------
# Central in-cell space
# ---------------------------------------------------------------------------

class CentralVectorSpace:
    """[P^K]^2 enriched by the curls of x^{K+1} y and x y^{K+1}.

    Fields are stored as Legendre tensor arrays Cx, Cy of shape (K+2, K+2):
    Bx = sum Cx[i, j] P_i(xi) P_j(eta), likewise By.
    """

    def __init__(self, K: int):
        _check_degree(K)
        self.K = K
        self.size = K + 2
        self.dim = 2 * ((K + 1) * (K + 2) // 2) + 2

    def evaluate(self, Cx, Cy, xi, eta) -> np.ndarray:
        """(..., size, size) arrays -> (..., npts, 2)."""
        px = legendre_values(self.size - 1, xi)
        py = legendre_values(self.size - 1, eta)
        bx = np.einsum("pi,pj,...ij->...p", px, py, Cx)
        by = np.einsum("pi,pj,...ij->...p", px, py, Cy)
        return np.stack([bx, by], axis=-1)

    def divergence(self, Cx, Cy, xi, eta, hx: float, hy: float) -> np.ndarray:
        n = self.size - 1
        px, py = legendre_values(n, xi), legendre_values(n, eta)
        dx, dy = legendre_derivatives(n, xi), legendre_derivatives(n, eta)
        ddx = np.einsum("pi,pj,...ij->...p", dx, py, Cx)
        ddy = np.einsum("pi,pj,...ij->...p", px, dy, Cy)
        return 2.0 / hx * ddx + 2.0 / hy * ddy
