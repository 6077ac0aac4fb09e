"""Geodesic accessibility and the iterated-bracket families of a lifted system.

The bracket families are

    nu_1 = {f_1, ..., f_r}
    nu_i = union over p + l = i of [nu_p, ad_{f_0} nu_l]

with f_0 the drift.  Their real span is an infinite union; it is truncated
once the cumulative generic rank has stopped growing for two consecutive
levels, or at ``max_level``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional

from . import linalg
from .distribution import DEFAULT_DEGREE_CEILING, RankReport, pointwise_rank, sym_closure
from .errors import CapExceeded, InputError
from .geometry import AccsSystem, TangentSystem, VectorField, lie_bracket

MAX_FIELDS = 4000


@dataclass
class AccessibilityReport:
    n: int
    sym_rank_generic: int
    sym_rank_at_point: int
    geodesically_accessible: bool
    closure_labels: List[str] = field(default_factory=list)
    closure_fields: List[VectorField] = field(default_factory=list)
    nu_dim: Optional[int] = None
    nu_plus_bracket_dim: Optional[int] = None
    nu_abelian: Optional[bool] = None
    drift_in_nu: Optional[bool] = None


def _point(point: Mapping[str, object]) -> Dict[str, Fraction]:
    return {k: Fraction(v) for k, v in point.items()}


def is_geodesically_accessible(
    sys: AccsSystem, x0: Mapping[str, object], degree_ceiling: int = DEFAULT_DEGREE_CEILING
) -> AccessibilityReport:
    pt = _point(x0)
    missing = [c for c in sys.chart.base if c not in pt]
    if missing:
        raise InputError(f"point does not bind {', '.join(missing)}")
    closure = sym_closure(sys.connection, sys.controls, degree_ceiling=degree_ceiling)
    fields = closure.distribution.generators
    at_point = pointwise_rank(fields, pt)
    return AccessibilityReport(
        n=sys.n,
        sym_rank_generic=closure.rank.generic_rank,
        sym_rank_at_point=at_point,
        geodesically_accessible=at_point == sys.n,
        closure_labels=closure.labels,
        closure_fields=fields,
    )


@dataclass
class NuSequence:
    levels: List[List[VectorField]]
    spans: List[RankReport]  # cumulative generic rank after each level
    stabilized_at: Optional[int]
    truncation_level: int

    def fields(self) -> List[VectorField]:
        return [f for level in self.levels for f in level]


def _dedupe(fields: List[VectorField]) -> List[VectorField]:
    out: List[VectorField] = []
    for f in fields:
        if f.is_zero():
            continue
        if any(f == g for g in out):
            continue
        out.append(f)
    return out


def nu_sequence(
    tsys: TangentSystem, max_level: Optional[int] = None, degree_ceiling: int = DEFAULT_DEGREE_CEILING
) -> NuSequence:
    dim = len(tsys.coords)
    if max_level is None:
        max_level = 2 * dim
    if max_level < 2:
        raise InputError("max_level must be at least 2")
    f0 = tsys.drift
    levels: List[List[VectorField]] = [list(tsys.inputs)]
    ad: List[List[VectorField]] = [[lie_bracket(f0, X) for X in levels[0]]]
    basis: List[VectorField] = []
    spans: List[RankReport] = []

    def absorb(level: List[VectorField]) -> None:
        for f in level:
            if not f.is_zero() and (not basis or not linalg.solve_in_span([list(b.comps) for b in basis], list(f.comps))[1]):
                basis.append(f)
        spans.append(RankReport(len(basis)))

    absorb(levels[0])
    stabilized_at = None
    unchanged = 0
    for i in range(2, max_level + 1):
        level: List[VectorField] = []
        for p in range(1, i):
            l = i - p
            for X in levels[p - 1]:
                for Y in ad[l - 1]:
                    br = lie_bracket(X, Y)
                    if br.degree() > degree_ceiling:
                        raise CapExceeded(f"bracket at level {i} exceeds degree ceiling {degree_ceiling}")
                    level.append(br)
        level = _dedupe(level)
        if sum(len(lv) for lv in levels) + len(level) > MAX_FIELDS:
            raise CapExceeded(f"bracket families exceed {MAX_FIELDS} fields at level {i}")
        levels.append(level)
        ad.append([lie_bracket(f0, X) for X in level])
        absorb(level)
        if spans[-1].generic_rank == spans[-2].generic_rank:
            unchanged += 1
            if unchanged == 2:
                stabilized_at = i - 2
                break
        else:
            unchanged = 0
    return NuSequence(levels, spans, stabilized_at, len(levels))


@dataclass
class NuConditionsReport:
    n: int
    truncation_level: int
    stabilized_at: Optional[int]
    nu_dim_generic: int
    nu_dim_at_point: int
    nu_plus_bracket_dim_generic: int
    nu_plus_bracket_dim_at_point: int
    condition1: bool
    nu_abelian: bool
    condition2: bool
    drift_in_nu: bool
    condition3: bool
    offending_pair: Optional[tuple] = None


def check_nu_conditions(tsys: TangentSystem, y0: Mapping[str, object], max_level: Optional[int] = None) -> NuConditionsReport:
    """Rank, commutativity and drift conditions on the truncated bracket families.

    Commutativity is checked pairwise on the generating fields only.
    """
    dim = len(tsys.coords)
    if dim % 2:
        raise InputError("tangent system must have even dimension")
    n = dim // 2
    pt = _point(y0)
    nu = nu_sequence(tsys, max_level)
    gens = nu.fields()
    cols = [list(f.comps) for f in gens]
    nu_generic = linalg.generic_rank(cols) if cols else 0
    nu_point = pointwise_rank(gens, pt) if gens else 0
    brackets = [lie_bracket(tsys.drift, f) for f in gens]
    both = gens + brackets
    both_generic = linalg.generic_rank([list(f.comps) for f in both]) if both else 0
    both_point = pointwise_rank(both, pt) if both else 0
    cond1 = nu_generic == n and nu_point == n and both_generic == dim and both_point == dim

    abelian = True
    offending = None
    for a in range(len(gens)):
        for b in range(a + 1, len(gens)):
            if not lie_bracket(gens[a], gens[b]).is_zero():
                abelian = False
                offending = (a, b)
                break
        if not abelian:
            break

    f0_at = tsys.drift.evaluate(pt)
    if gens:
        drift_in = linalg.numeric_member([f.evaluate(pt) for f in gens], f0_at)
    else:
        drift_in = all(c == 0 for c in f0_at)
    return NuConditionsReport(
        n=n,
        truncation_level=nu.truncation_level,
        stabilized_at=nu.stabilized_at,
        nu_dim_generic=nu_generic,
        nu_dim_at_point=nu_point,
        nu_plus_bracket_dim_generic=both_generic,
        nu_plus_bracket_dim_at_point=both_point,
        condition1=cond1,
        nu_abelian=abelian,
        condition2=abelian,
        drift_in_nu=drift_in,
        condition3=drift_in,
        offending_pair=offending,
    )
