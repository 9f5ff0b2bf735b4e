"""
errors.py — Exception hierarchy for the rmhd_dg solver.

Every error carries a short machine-readable ``kind`` so the CLI can print a
structured failure line without inspecting exception types. Solver errors may
also carry the offending ``cell`` index and the simulation ``time``.
"""
from __future__ import annotations

from typing import Any


class RmhdError(Exception):
    """Base class for every error raised by the solver."""

    kind = "solver"

    def __init__(self, message: str, *, cell: Any = None, time: float | None = None):
        super().__init__(message)
        self.cell = cell
        self.time = time

    def describe(self) -> str:
        """One-line ``kind=... cell=... t=... msg=...`` summary."""
        t = "-" if self.time is None else f"{self.time:.6g}"
        cell = "-" if self.cell is None else str(self.cell)
        return f"kind={self.kind} cell={cell} t={t} msg={self}"


class DomainViolationError(RmhdError):
    """Primitive state outside the physical domain (|v| >= 1, rho <= 0, p <= 0)."""

    kind = "domain-violation"


class RecoveryError(RmhdError):
    """Conservative-to-primitive Newton iteration did not converge."""

    kind = "recovery-failure"

    def __init__(self, message: str, *, residual: float = float("nan"),
                 iterations: int = 0, cell: Any = None, time: float | None = None):
        super().__init__(message, cell=cell, time=time)
        self.residual = residual
        self.iterations = iterations


class InadmissibleStateError(RmhdError):
    """Recovered density or pressure is not positive and floors are disabled."""

    kind = "inadmissible-state"


class EigenvalueError(RmhdError):
    """Magnetosonic roots are complex or superluminal beyond the polish tolerance."""

    kind = "eigenvalue-failure"


class DegenerateFrameError(RmhdError):
    """Numerical eigendecomposition is complex or too ill-conditioned to use."""

    kind = "degenerate-frame"


class ReconstructionError(RmhdError):
    """Edge fields violate the compatibility condition of the in-cell reconstruction."""

    kind = "reconstruction-failure"

    def __init__(self, message: str, *, residual: float = float("nan"),
                 cell: Any = None, time: float | None = None):
        super().__init__(message, cell=cell, time=time)
        self.residual = residual


class NoExactSolutionError(RmhdError):
    kind = "no-exact-solution"


class UnknownProblemError(RmhdError):
    kind = "unknown-problem"


class ConfigError(RmhdError, ValueError):
    """Invalid run configuration (maps to exit code 2)."""

    kind = "config"
