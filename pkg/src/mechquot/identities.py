"""Exact identity checks for a connection against random polynomial fields.

Each check is a theorem about symmetric connections and their lifts to the
tangent chart, so a failure indicates a bug (or a non-symmetric table).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .geometry import (
    Chart,
    Connection,
    VectorField,
    base_part,
    covariant_along_velocity,
    covariant_derivative,
    curvature,
    geodesic_spray,
    horizontal_lift,
    lie_bracket,
    symmetric_product,
    torsion,
    vertical_lift,
)
from .symexpr import Polynomial, RationalExpr


def random_polynomial(names: Sequence[str], rng: random.Random, degree: int = 3, terms: int = 3) -> RationalExpr:
    out = {}
    for _ in range(rng.randint(1, terms)):
        d = rng.randint(0, degree)
        mono = {}
        for _ in range(d):
            n = rng.choice(names)
            mono[n] = mono.get(n, 0) + 1
        c = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        key = tuple(sorted(mono.items()))
        out[key] = out.get(key, Fraction(0)) + c
    return RationalExpr(Polynomial(out))


def random_field(names: Sequence[str], rng: random.Random, degree: int = 3, terms: int = 3, density: float = 0.7) -> VectorField:
    comps = []
    for _ in names:
        comps.append(random_polynomial(names, rng, degree, terms) if rng.random() < density else RationalExpr.const(0))
    return VectorField(names, comps)


def random_connection(chart: Chart, rng: random.Random, degree: int = 3, terms: int = 2, density: float = 0.5) -> Connection:
    n = chart.n
    entries = {}
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                if rng.random() < density:
                    entries[(k, i, j)] = random_polynomial(chart.base, rng, degree, terms)
    return Connection(chart, entries)


@dataclass
class IdentityResult:
    name: str
    trial: int
    holds: bool
    residual: Optional[VectorField] = None


def _check(name: str, trial: int, lhs: VectorField, rhs: VectorField) -> IdentityResult:
    diff = lhs - rhs
    return IdentityResult(name, trial, diff.is_zero(), None if diff.is_zero() else diff)


def spray_bracket_identities(conn: Connection, X1: VectorField, X2: VectorField, trial: int = 0) -> List[IdentityResult]:
    """The three bracket relations between the spray and vertical lifts.

    [S, X^vlft] = -X^H + (nabla_v X)^vlft
    [X1^vlft, [S, X2^vlft]] = <X1:X2>^vlft
    base part of [S, [S, X^vlft]] = -2 nabla_v X
    """
    chart = conn.chart
    S = geodesic_spray(conn)
    V1 = vertical_lift(X1, chart)
    V2 = vertical_lift(X2, chart)
    SV1 = lie_bracket(S, V1)
    nabla_v = covariant_along_velocity(conn, X1)
    bracket_rhs = -horizontal_lift(conn, X1) + vertical_lift(nabla_v, chart)
    sym_rhs = vertical_lift(symmetric_product(conn, X1, X2), chart)
    SSV1 = lie_bracket(S, SV1)
    return [
        _check("spray_vertical_bracket", trial, SV1, bracket_rhs),
        _check("double_vertical_bracket", trial, lie_bracket(V1, lie_bracket(S, V2)), sym_rhs),
        _check("double_spray_bracket_horizontal", trial, base_part(SSV1, chart), nabla_v.scale(-2)),
    ]


def identity_suite(conn: Connection, seed: int = 0, trials: int = 3, degree: int = 2) -> List[IdentityResult]:
    """Run every identity on ``trials`` random field triples drawn from ``seed``."""
    rng = random.Random(seed)
    names = conn.chart.base
    results: List[IdentityResult] = []
    for t in range(trials):
        X = random_field(names, rng, degree)
        Y = random_field(names, rng, degree)
        W = random_field(names, rng, degree)
        f = random_polynomial(names, rng, degree)
        results.append(_check("torsion_free", t, torsion(conn, X, Y), VectorField.zero(names)))
        results.append(_check("symmetric_product_symmetry", t, symmetric_product(conn, X, Y), symmetric_product(conn, Y, X)))
        results.append(_check("function_linearity", t, covariant_derivative(conn, X.scale(f), Y), covariant_derivative(conn, X, Y).scale(f)))
        results.append(
            _check("leibniz_rule", t, covariant_derivative(conn, X, Y.scale(f)),
                   covariant_derivative(conn, X, Y).scale(f) + Y.scale(X.apply(f)))
        )
        results.extend(spray_bracket_identities(conn, X, Y, t))
        results.append(_check("horizontal_lift_projects", t, base_part(horizontal_lift(conn, X), conn.chart), X))
        R = curvature(conn, X, Y, W)
        results.append(_check("curvature_tensoriality", t, curvature(conn, X.scale(f), Y, W), R.scale(f)))
        bianchi = R + curvature(conn, Y, W, X) + curvature(conn, W, X, Y)
        results.append(_check("first_bianchi", t, bianchi, VectorField.zero(names)))
    return results
