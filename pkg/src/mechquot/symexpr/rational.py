"""Exact rational functions over named coordinates.

Normal form: the denominator is nonzero, has coprime integer coefficients and a
positive leading coefficient.  No multivariate gcd is taken; common monomial
factors are cancelled and exact polynomial division is tried when cheap.
Equality is decided by cross-multiplication, so two equal values may print
differently.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Union

from ..errors import ExprError, PoleError
from .polynomial import ONE_POLY, ZERO_POLY, Polynomial, mono_gcd

# cancellation by trial division only below this many term-products
_DIVISION_BUDGET = 4000

Number = Union[int, Fraction]


class RationalExpr:
    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial = ONE_POLY, _normal: bool = False):
        if _normal:
            self.num = num
            self.den = den
            return
        if den.is_zero():
            raise ExprError("division by the zero polynomial")
        self.num, self.den = _normalize(num, den)

    # constructors
    @classmethod
    def const(cls, c: Number) -> "RationalExpr":
        return cls(Polynomial.constant(c), ONE_POLY, _normal=True)

    @classmethod
    def var(cls, name: str) -> "RationalExpr":
        return cls(Polynomial.variable(name), ONE_POLY, _normal=True)

    @classmethod
    def coerce(cls, value) -> "RationalExpr":
        if isinstance(value, RationalExpr):
            return value
        if isinstance(value, Polynomial):
            return cls(value)
        if isinstance(value, (int, Fraction)):
            return cls.const(value)
        raise TypeError(f"cannot use {type(value).__name__} as a rational expression")

    # predicates
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.constant_value() / self.den.constant_value()

    def variables(self) -> frozenset:
        return self.num.variables() | self.den.variables()

    def degree(self) -> int:
        """Larger of numerator and denominator total degree."""
        return max(self.num.total_degree(), self.den.total_degree())

    def degree_in(self, names) -> int:
        """Degree of a polynomial value in the given variables (denominator must not involve them)."""
        if self.den.variables() & set(names):
            raise ValueError("denominator depends on the requested variables")
        return self.num.degree_in(names)

    # arithmetic
    def __add__(self, other) -> "RationalExpr":
        other = _coerce(other)
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return RationalExpr(self.num + other.num, self.den)
        if self.den.is_constant() and other.den.is_constant():
            return RationalExpr(self.num + other.num, ONE_POLY)
        q = _cheap_div(self.den, other.den)
        if q is not None:
            return RationalExpr(self.num + other.num * q, self.den)
        q = _cheap_div(other.den, self.den)
        if q is not None:
            return RationalExpr(self.num * q + other.num, other.den)
        return RationalExpr(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalExpr":
        return RationalExpr(-self.num, self.den, _normal=True)

    def __sub__(self, other) -> "RationalExpr":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "RationalExpr":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "RationalExpr":
        other = _coerce(other)
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        if self.den.is_constant() and other.den.is_constant():
            return RationalExpr(self.num * other.num, ONE_POLY, _normal=True)
        return RationalExpr(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalExpr":
        other = _coerce(other)
        if other.num.is_zero():
            raise ExprError("division by an identically zero expression")
        return RationalExpr(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "RationalExpr":
        return _coerce(other) / self

    def __pow__(self, k: int) -> "RationalExpr":
        if not isinstance(k, int):
            raise ExprError("exponent must be an integer")
        if k < 0:
            return ONE / (self ** (-k))
        if self.den.is_constant():
            return RationalExpr(self.num ** k, ONE_POLY, _normal=True)
        return RationalExpr(self.num ** k, self.den ** k)

    def __eq__(self, other) -> bool:
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return (self.num * other.den - other.num * self.den).is_zero()

    __hash__ = None  # equal values need not share a representation

    # calculus
    def diff(self, name: str) -> "RationalExpr":
        dn = self.num.diff(name)
        if self.den.is_constant():
            return RationalExpr(dn, ONE_POLY, _normal=True)
        dd = self.den.diff(name)
        if dd.is_zero():
            if dn.is_zero():
                return ZERO
            return RationalExpr(dn, self.den)
        return RationalExpr(dn * self.den - self.num * dd, self.den * self.den)

    def substitute(self, bindings: Mapping[str, "RationalExpr"]) -> "RationalExpr":
        """Simultaneous substitution of expressions for variables."""
        relevant = {k: _coerce(v) for k, v in bindings.items() if k in self.variables()}
        if not relevant:
            return self
        num = _subst_poly(self.num, relevant)
        den = _subst_poly(self.den, relevant)
        if den.is_zero():
            raise PoleError("substitution makes the denominator identically zero")
        return num / den

    def evaluate(self, point: Mapping[str, Number]) -> Fraction:
        pt = {k: Fraction(v) for k, v in point.items()}
        try:
            d = self.den.evaluate(pt)
            n = self.num.evaluate(pt)
        except KeyError as exc:
            raise ExprError(f"point does not bind {exc.args[0]!r}") from None
        if d == 0:
            raise PoleError(f"pole of {self} at {dict(point)}")
        return n / d

    def partial_evaluate(self, point: Mapping[str, Number]) -> "RationalExpr":
        pt = {k: Fraction(v) for k, v in point.items()}
        den = self.den.partial_evaluate(pt)
        if den.is_zero():
            raise PoleError(f"pole of {self} at {dict(point)}")
        return RationalExpr(self.num.partial_evaluate(pt), den)

    # printing
    def __str__(self) -> str:
        if self.den == ONE_POLY:
            return str(self.num)
        n = str(self.num)
        if len(self.num) > 1:
            n = f"({n})"
        return f"{n}/({self.den})"

    def __repr__(self) -> str:
        return f"RationalExpr({str(self)!r})"


def _coerce(value) -> RationalExpr:
    return RationalExpr.coerce(value)


def _cheap_div(a: Polynomial, b: Polynomial):
    if b.is_constant() or len(a) * len(b) > _DIVISION_BUDGET or len(b) > len(a):
        return None
    return a.exact_div(b)


def _normalize(num: Polynomial, den: Polynomial):
    if num.is_zero():
        return ZERO_POLY, ONE_POLY
    if den.is_constant():
        c = den.constant_value()
        return (num if c == 1 else num.scale(1 / c)), ONE_POLY
    g = den.monomial_content()
    if g:
        common = mono_gcd(g, num.monomial_content())
        if common:
            num = num.div_monomial(common)
            den = den.div_monomial(common)
    if not den.is_constant() and len(num) * len(den) <= _DIVISION_BUDGET:
        q = num.exact_div(den)
        if q is not None:
            return q, ONE_POLY
        if len(num) <= len(den):
            q = den.exact_div(num)
            if q is not None:
                c = q.rational_content() * (1 if q.leading_coefficient() > 0 else -1)
                return Polynomial.constant(1 / c), q.scale(1 / c)
    if den.is_constant():
        c = den.constant_value()
        return num.scale(1 / c), ONE_POLY
    c = den.rational_content()
    if den.leading_coefficient() < 0:
        c = -c
    if c != 1:
        inv = 1 / c
        num = num.scale(inv)
        den = den.scale(inv)
    return num, den


def _subst_poly(p: Polynomial, bindings: Mapping[str, RationalExpr]) -> RationalExpr:
    total = ZERO
    for m, c in p.terms.items():
        term = RationalExpr.const(c)
        rest = []
        for n, e in m:
            if n in bindings:
                term = term * (bindings[n] ** e)
            else:
                rest.append((n, e))
        if rest:
            term = term * RationalExpr(Polynomial({tuple(rest): Fraction(1)}, _trusted=True), ONE_POLY, _normal=True)
        total = total + term
    return total


ZERO = RationalExpr(ZERO_POLY, ONE_POLY, _normal=True)
ONE = RationalExpr(ONE_POLY, ONE_POLY, _normal=True)
