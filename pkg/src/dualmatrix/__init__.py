"""Dual matrix climbing solver for strict homogeneous systems ``A x > 0``."""
from .driver import SolveConfig, SolveResult, solve
from .problem import InequalitySystem, parse, serialize

__all__ = ["InequalitySystem", "SolveConfig", "SolveResult", "parse", "serialize", "solve"]
