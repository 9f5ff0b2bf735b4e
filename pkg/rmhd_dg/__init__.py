"""
rmhd-dg: divergence-free Runge-Kutta discontinuous Galerkin solvers for the
special relativistic MHD equations in one and two dimensions.
"""

from .core import cli_invoke
from .run_config import RunConfig

__version__ = "0.1.0"

__all__ = [
    "RunConfig",
    "cli_invoke",
]
