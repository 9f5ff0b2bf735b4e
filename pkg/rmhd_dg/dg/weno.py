"""
One-dimensional WENO point reconstruction from cell averages.

For degree K the big stencil has 2K+1 cells centred on the target cell and
K+1 candidate stencils of K+1 cells each. Point values are produced at the
K+1 Gauss points of the target cell. Linear weights solve the consistency
problem (big-stencil value as a combination of candidate values); where a
linear weight is negative the positive/negative splitting is applied.
Smoothness indicators are the usual sums of squared derivatives.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as nppoly

from .basis import gauss_rule

WENO_EPS = 1e-6
WENO_POWER = 2


def _average_matrix(cells: np.ndarray, degree: int) -> np.ndarray:
    """V[k, d] = cell average of s^d over [k - 1/2, k + 1/2]."""
    V = np.empty((cells.size, degree + 1))
    for d in range(degree + 1):
        V[:, d] = ((cells + 0.5) ** (d + 1) - (cells - 0.5) ** (d + 1)) / (d + 1)
    return V


def _value_rows(cells: np.ndarray, degree: int, points: np.ndarray) -> np.ndarray:
    """Rows mapping the averages of ``cells`` to point values, shape (npts, ncells)."""
    coeff_map = np.linalg.inv(_average_matrix(cells, degree))
    powers = points[:, None] ** np.arange(degree + 1)[None, :]
    return powers @ coeff_map


def _indicator_matrix(cells: np.ndarray, degree: int) -> np.ndarray:
    """B with beta = u^T B u for the stencil polynomial on the target cell."""
    coeff_map = np.linalg.inv(_average_matrix(cells, degree))
    M = np.zeros((degree + 1, degree + 1))
    for l in range(1, degree + 1):
        for d in range(degree + 1):
            for e in range(degree + 1):
                ed = np.zeros(degree + 1)
                ee = np.zeros(degree + 1)
                ed[d] = ee[e] = 1.0
                prod = nppoly.polymul(nppoly.polyder(ed, l), nppoly.polyder(ee, l))
                anti = nppoly.polyint(prod)
                M[d, e] += nppoly.polyval(0.5, anti) - nppoly.polyval(-0.5, anti)
    return coeff_map.T @ M @ coeff_map


class WenoReconstructor:
    """Order 2K+1 reconstruction at the K+1 Gauss points of the centre cell."""

    def __init__(self, K: int, eps: float = WENO_EPS, power: int = WENO_POWER):
        self.K = K
        self.eps = eps
        self.power = power
        self.width = 2 * K + 1
        self.points = gauss_rule(K + 1).nodes / 2.0

        big_cells = np.arange(-K, K + 1, dtype=float)
        self.big_rows = _value_rows(big_cells, 2 * K, self.points)
        self.small_rows = np.zeros((K + 1, self.points.size, self.width))
        self.indicators = np.zeros((K + 1, self.width, self.width))
        for r in range(K + 1):
            cells = np.arange(r - K, r + 1, dtype=float)
            cols = slice(r, r + K + 1)
            self.small_rows[r][:, cols] = _value_rows(cells, K, self.points)
            self.indicators[r][cols, cols] = _indicator_matrix(cells, K)

        self.linear_weights = np.zeros((self.points.size, K + 1))
        for p in range(self.points.size):
            A = self.small_rows[:, p, :].T
            sol, *_ = np.linalg.lstsq(A, self.big_rows[p], rcond=None)
            self.linear_weights[p] = sol

    def _nonlinear(self, d: np.ndarray, beta: np.ndarray) -> np.ndarray:
        alpha = d / (self.eps + beta) ** self.power
        return alpha / np.sum(alpha, axis=-1, keepdims=True)

    def reconstruct(self, averages) -> np.ndarray:
        """averages (..., 2K+1) -> point values (..., K+1)."""
        u = np.asarray(averages, dtype=float)
        cand = np.einsum("rpk,...k->...pr", self.small_rows, u)
        beta = np.einsum("...k,rkm,...m->...r", u, self.indicators, u)[..., None, :]
        out = np.empty(u.shape[:-1] + (self.points.size,))
        for p in range(self.points.size):
            d = self.linear_weights[p]
            b = beta[..., 0, :]
            if np.all(d >= 0.0):
                w = self._nonlinear(d, b)
                out[..., p] = np.sum(w * cand[..., p, :], axis=-1)
                continue
            plus = 0.5 * (d + 3.0 * np.abs(d))
            minus = plus - d
            s_plus, s_minus = plus.sum(), minus.sum()
            w_plus = self._nonlinear(plus / s_plus, b)
            w_minus = self._nonlinear(minus / s_minus, b)
            out[..., p] = (s_plus * np.sum(w_plus * cand[..., p, :], axis=-1)
                           - s_minus * np.sum(w_minus * cand[..., p, :], axis=-1))
        return out


@lru_cache(maxsize=None)
def weno_reconstructor(K: int) -> WenoReconstructor:
    return WenoReconstructor(K)
