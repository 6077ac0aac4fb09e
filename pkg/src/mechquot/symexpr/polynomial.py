"""Sparse multivariate polynomials with exact rational coefficients.

A monomial is a tuple of ``(name, exponent)`` pairs sorted by name, with no
zero exponents; the empty tuple is the constant monomial.  Polynomials are
immutable once built.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple

from ..errors import ExprError

Monomial = Tuple[Tuple[str, int], ...]

ONE_MONO: Monomial = ()

# exponents are kept machine-width
MAX_EXPONENT = 2**31 - 1


def _check_exp(e: int) -> int:
    if e > MAX_EXPONENT:
        raise ExprError(f"exponent {e} exceeds {MAX_EXPONENT}")
    return e


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        na, ea = a[i]
        nb, eb = b[j]
        if na == nb:
            out.append((na, _check_exp(ea + eb)))
            i += 1
            j += 1
        elif na < nb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_div(a: Monomial, b: Monomial) -> Optional[Monomial]:
    """Return a/b, or None when b does not divide a."""
    if not b:
        return a
    da = dict(a)
    for name, e in b:
        have = da.get(name, 0)
        if have < e:
            return None
        if have == e:
            del da[name]
        else:
            da[name] = have - e
    return tuple(sorted(da.items()))


def mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    db = dict(b)
    out = []
    for name, e in a:
        f = db.get(name)
        if f:
            out.append((name, min(e, f)))
    return tuple(out)


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _grlex_key(m: Monomial, names: Tuple[str, ...]):
    d = dict(m)
    return (mono_degree(m), tuple(d.get(n, 0) for n in names))


def _lex_key(m: Monomial, names: Tuple[str, ...]):
    d = dict(m)
    return tuple(d.get(n, 0) for n in names)


class Polynomial:
    """Immutable sparse polynomial ``{monomial: Fraction}`` with no zero terms."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, Fraction]] = None, _trusted: bool = False):
        if terms is None:
            self.terms: Dict[Monomial, Fraction] = {}
        elif _trusted:
            self.terms = terms  # type: ignore[assignment]
        else:
            clean = {}
            for m, c in terms.items():
                c = Fraction(c)
                if c:
                    for name, e in m:
                        if e <= 0:
                            raise ValueError(f"monomial {m!r} has non-positive exponent")
                        _check_exp(e)
                    clean[tuple(sorted(m))] = c
            self.terms = clean
        self._hash = None

    # construction helpers
    @classmethod
    def constant(cls, c) -> "Polynomial":
        c = Fraction(c)
        return cls({ONE_MONO: c} if c else {}, _trusted=True)

    @classmethod
    def variable(cls, name: str) -> "Polynomial":
        return cls({((name, 1),): Fraction(1)}, _trusted=True)

    # predicates
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and ONE_MONO in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get(ONE_MONO, Fraction(0))

    def variables(self) -> frozenset:
        return frozenset(n for m in self.terms for n, _ in m)

    def total_degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def degree_in(self, names: Iterable[str]) -> int:
        names = set(names)
        return max((sum(e for n, e in m if n in names) for m in self.terms), default=0)

    def __len__(self) -> int:
        return len(self.terms)

    # arithmetic
    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s += c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial(out, _trusted=True)

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = -c
            else:
                s -= c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Polynomial(out, _trusted=True)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if not self.terms or not other.terms:
            return ZERO_POLY
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (mb, cb), = b.items()
            if not mb:
                if cb == 1:
                    return Polynomial(a, _trusted=True)
                return Polynomial({m: c * cb for m, c in a.items()}, _trusted=True)
            return Polynomial({mono_mul(m, mb): c * cb for m, c in a.items()}, _trusted=True)
        out: Dict[Monomial, Fraction] = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = mono_mul(ma, mb)
                s = out.get(m)
                out[m] = ca * cb if s is None else s + ca * cb
        return Polynomial({m: c for m, c in out.items() if c}, _trusted=True)

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return ZERO_POLY
        if c == 1:
            return self
        return Polynomial({m: v * c for m, v in self.terms.items()}, _trusted=True)

    def mul_monomial(self, mono: Monomial) -> "Polynomial":
        if not mono:
            return self
        return Polynomial({mono_mul(m, mono): c for m, c in self.terms.items()}, _trusted=True)

    def div_monomial(self, mono: Monomial) -> "Polynomial":
        if not mono:
            return self
        out = {}
        for m, c in self.terms.items():
            q = mono_div(m, mono)
            if q is None:
                raise ArithmeticError("monomial does not divide polynomial")
            out[q] = c
        return Polynomial(out, _trusted=True)

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = ONE_POLY
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # calculus and evaluation
    def diff(self, name: str) -> "Polynomial":
        out = {}
        for m, c in self.terms.items():
            for idx, (n, e) in enumerate(m):
                if n == name:
                    if e == 1:
                        nm = m[:idx] + m[idx + 1:]
                    else:
                        nm = m[:idx] + ((n, e - 1),) + m[idx + 1:]
                    out[nm] = c * e
                    break
        return Polynomial(out, _trusted=True)

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for n, e in m:
                v *= point[n] ** e
            total += v
        return total

    def partial_evaluate(self, point: Mapping[str, Fraction]) -> "Polynomial":
        """Substitute numbers for the named variables that appear in ``point``."""
        out: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            keep = []
            for n, e in m:
                if n in point:
                    c = c * Fraction(point[n]) ** e
                else:
                    keep.append((n, e))
            if c:
                k = tuple(keep)
                out[k] = out.get(k, Fraction(0)) + c
        return Polynomial({m: c for m, c in out.items() if c}, _trusted=True)

    # normalisation helpers
    def monomial_content(self) -> Monomial:
        it = iter(self.terms)
        try:
            g = next(it)
        except StopIteration:
            return ONE_MONO
        for m in it:
            if not g:
                break
            g = mono_gcd(g, m)
        return g

    def rational_content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self.terms:
            return Fraction(1)
        num_g = 0
        den_l = 1
        for c in self.terms.values():
            num_g = math.gcd(num_g, c.numerator)
            den_l = den_l * c.denominator // math.gcd(den_l, c.denominator)
        return Fraction(num_g, den_l)

    def sorted_terms(self):
        """Terms in graded lexicographic order, leading term first."""
        names = tuple(sorted(self.variables()))
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0], names), reverse=True)

    def leading_coefficient(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        return self.sorted_terms()[0][1]

    def exact_div(self, other: "Polynomial") -> Optional["Polynomial"]:
        """Return self/other if other divides self exactly, else None."""
        if not other.terms:
            raise ZeroDivisionError("polynomial division by zero")
        if not self.terms:
            return ZERO_POLY
        if len(other.terms) == 1:
            (mo, co), = other.terms.items()
            out = {}
            for m, c in self.terms.items():
                q = mono_div(m, mo)
                if q is None:
                    return None
                out[q] = c / co
            return Polynomial(out, _trusted=True)
        names = tuple(sorted(self.variables() | other.variables()))
        lt_o = max(other.terms, key=lambda m: _lex_key(m, names))
        lc_o = other.terms[lt_o]
        rem = dict(self.terms)
        quot: Dict[Monomial, Fraction] = {}
        while rem:
            lt = max(rem, key=lambda m: _lex_key(m, names))
            q = mono_div(lt, lt_o)
            if q is None:
                return None
            qc = rem[lt] / lc_o
            quot[q] = qc
            for m, c in other.terms.items():
                mm = mono_mul(m, q)
                v = rem.get(mm, Fraction(0)) - c * qc
                if v:
                    rem[mm] = v
                else:
                    rem.pop(mm, None)
        return Polynomial(quot, _trusted=True)

    # printing
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            neg = c < 0
            a = -c if neg else c
            mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if i == 0:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"


ZERO_POLY = Polynomial({}, _trusted=True)
ONE_POLY = Polynomial({ONE_MONO: Fraction(1)}, _trusted=True)
