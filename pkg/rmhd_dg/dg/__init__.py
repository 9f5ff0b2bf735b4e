"""Numerical core: physics, bases, meshes, operators, limiter, problems."""

from .errors import RmhdError
from .physics import Eos, Floors, PrimitiveState, cons_to_prim, prim_to_cons
from .problems import PROBLEMS, get_problem
from .schemes import build_scheme

__all__ = [
    "PROBLEMS",
    "Eos",
    "Floors",
    "PrimitiveState",
    "RmhdError",
    "build_scheme",
    "cons_to_prim",
    "get_problem",
    "prim_to_cons",
]
