"""Exact checks for mechanical quotients of affine connection control systems."""

__version__ = "0.1.0"

from .geometry import AccsSystem, Chart, Connection, TangentSystem, VectorField
from .symexpr import RationalExpr, parse_expr

__all__ = [
    "AccsSystem",
    "Chart",
    "Connection",
    "RationalExpr",
    "TangentSystem",
    "VectorField",
    "parse_expr",
]
