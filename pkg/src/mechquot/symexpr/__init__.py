"""Exact multivariate rational functions: the scalar layer."""

from fractions import Fraction
from typing import Mapping

from ..errors import ExprError
from .parser import parse_expr
from .polynomial import Monomial, Polynomial
from .rational import ONE, ZERO, RationalExpr

__all__ = [
    "Monomial",
    "Polynomial",
    "RationalExpr",
    "ZERO",
    "ONE",
    "parse_expr",
    "arith",
    "differentiate",
    "substitute",
    "eval_at",
    "is_zero",
]


def arith(a: RationalExpr, b: RationalExpr, kind: str) -> RationalExpr:
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a / b
    raise ValueError(f"unknown operation {kind!r}")


def differentiate(a: RationalExpr, coord: str, chart=None) -> RationalExpr:
    if chart is not None and coord not in chart:
        raise ExprError(f"unknown coordinate {coord!r}")
    return a.diff(coord)


def substitute(a: RationalExpr, bindings: Mapping[str, RationalExpr]) -> RationalExpr:
    return a.substitute(bindings)


def eval_at(a: RationalExpr, point: Mapping[str, Fraction]) -> Fraction:
    return a.evaluate(point)


def is_zero(a: RationalExpr) -> bool:
    return a.is_zero()
