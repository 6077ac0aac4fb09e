"""Distributions given by generators: rank, membership and closure tests.

Every span condition is decided over the field of rational functions (the
"generic" verdict).  When a distribution carries a base point the rank is also
computed there, so degenerate points can be flagged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .errors import CapExceeded, ChartMismatch, InputError
from .geometry import Connection, VectorField, covariant_derivative, lie_bracket, symmetric_product
from .symexpr import RationalExpr

DEFAULT_DEGREE_CEILING = 64


@dataclass
class Distribution:
    coords: Tuple[str, ...]
    generators: List[VectorField]
    base_point: Optional[Dict[str, Fraction]] = None

    def __post_init__(self):
        self.coords = tuple(self.coords)
        if not self.generators:
            raise InputError("a distribution needs at least one generator")
        for g in self.generators:
            if g.coords != self.coords:
                raise ChartMismatch("generators must share the distribution's chart")
        if self.base_point is not None:
            self.base_point = {k: Fraction(v) for k, v in self.base_point.items()}
            for g in self.generators:
                g.evaluate(self.base_point)  # raises PoleError

    @property
    def dimension(self) -> int:
        return len(self.coords)

    def with_generators(self, generators: List[VectorField]) -> "Distribution":
        return Distribution(self.coords, generators, self.base_point)


@dataclass
class RankReport:
    generic_rank: int
    pointwise_rank: Optional[int] = None
    singular: bool = False


@dataclass
class Membership:
    member: bool
    coefficients: Optional[List[RationalExpr]] = None
    witness: Optional[VectorField] = None

    def __bool__(self) -> bool:
        return self.member


@dataclass
class CheckResult:
    """Outcome of a closure-type test; on failure ``witness`` names the offending fields."""

    holds: bool
    witness: Optional[Tuple[str, VectorField]] = None
    details: List[Tuple[str, VectorField]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.holds


def _columns(fields: Sequence[VectorField]):
    return [list(f.comps) for f in fields]


def pointwise_rank(fields: Sequence[VectorField], point) -> int:
    return linalg.numeric_rank([f.evaluate(point) for f in fields])


def generic_rank(D: Distribution) -> RankReport:
    r = linalg.generic_rank(_columns(D.generators))
    if D.base_point is None:
        return RankReport(r)
    p = pointwise_rank(D.generators, D.base_point)
    return RankReport(r, p, p < r)


def contains(D: Distribution, w: VectorField) -> Membership:
    if w.coords != D.coords:
        raise ChartMismatch("field and distribution live on different charts")
    if w.is_zero():
        return Membership(True, [RationalExpr.const(0)] * len(D.generators))
    _, member, coeffs = linalg.solve_in_span(_columns(D.generators), list(w.comps))
    if member:
        return Membership(True, coeffs)
    return Membership(False, None, w)


def in_span(fields: Sequence[VectorField], w: VectorField) -> bool:
    if w.is_zero():
        return True
    if not fields:
        return False
    return linalg.solve_in_span(_columns(fields), list(w.comps))[1]


def is_involutive(D: Distribution) -> CheckResult:
    gens = D.generators
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            br = lie_bracket(gens[a], gens[b])
            if not contains(D, br):
                return CheckResult(False, (f"[g{a + 1}, g{b + 1}]", br))
    return CheckResult(True)


def is_geodesically_invariant(conn: Connection, D: Distribution) -> CheckResult:
    gens = D.generators
    for a in range(len(gens)):
        for b in range(a, len(gens)):
            sp = symmetric_product(conn, gens[a], gens[b])
            if not contains(D, sp):
                return CheckResult(False, (f"<g{a + 1}:g{b + 1}>", sp))
    return CheckResult(True)


def restricts_connection(conn: Connection, D: Distribution) -> CheckResult:
    """nabla_{d_i} g_a in D for all coordinate fields d_i and generators g_a."""
    coords = D.coords
    for a, g in enumerate(D.generators):
        for i in range(len(coords)):
            cd = covariant_derivative(conn, VectorField.basis(coords, i), g)
            if not contains(D, cd):
                return CheckResult(False, (f"nabla_d/d{coords[i]} g{a + 1}", cd))
    return CheckResult(True)


@dataclass
class SymClosure:
    distribution: Distribution
    rank: RankReport
    passes: int
    labels: List[str]


def sym_closure(
    conn: Connection,
    seed: Sequence[VectorField],
    base_point=None,
    degree_ceiling: int = DEFAULT_DEGREE_CEILING,
) -> SymClosure:
    """Smallest symmetric-product-closed distribution containing ``seed``.

    Only generically independent fields take part in products; a dependent
    field's products lie in the span of the basis products.
    """
    if not seed:
        raise InputError("empty seed")
    coords = seed[0].coords
    n = len(coords)
    gens = list(seed)
    labels = [f"g{i + 1}" for i in range(len(seed))]
    basis: List[int] = []
    for idx, g in enumerate(gens):
        if not g.is_zero() and not in_span([gens[b] for b in basis], g):
            basis.append(idx)
    checked = set()
    passes = 0
    grew = True
    while grew and len(basis) < n:
        passes += 1
        if passes > n + 1:
            raise CapExceeded(f"symmetric closure did not stabilise within {n + 1} passes")
        grew = False
        current = list(basis)
        for ai in range(len(current)):
            for bi in range(ai, len(current)):
                a, b = current[ai], current[bi]
                if (a, b) in checked:
                    continue
                checked.add((a, b))
                sp = symmetric_product(conn, gens[a], gens[b])
                if sp.degree() > degree_ceiling:
                    raise CapExceeded(
                        f"symmetric product <{labels[a]}:{labels[b]}> exceeds degree ceiling {degree_ceiling}"
                    )
                if sp.is_zero() or in_span([gens[k] for k in basis], sp):
                    continue
                gens.append(sp)
                labels.append(f"<{labels[a]}:{labels[b]}>")
                basis.append(len(gens) - 1)
                grew = True
                if len(basis) == n:
                    break
            if len(basis) == n:
                break
    D = Distribution(coords, gens, base_point)
    return SymClosure(D, RankReport(len(basis)) if base_point is None else generic_rank(D), passes, labels)
