"""Coordinate differential geometry for symmetric affine connections.

Vector fields are tuples of exact rational functions on a named chart.  The
tangent chart of a base chart lists the base coordinates followed by one
velocity coordinate per base coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import ChartMismatch, InputError
from .symexpr import ONE, ZERO, RationalExpr

VELOCITY_PREFIX = "v_"


@dataclass(frozen=True)
class Chart:
    base: Tuple[str, ...]
    velocity: Tuple[str, ...] = ()

    def __post_init__(self):
        base = tuple(self.base)
        velocity = tuple(self.velocity) or tuple(VELOCITY_PREFIX + n for n in base)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "velocity", velocity)
        if len(set(base)) != len(base):
            raise InputError(f"duplicate base coordinate in {base}")
        if len(velocity) != len(base):
            raise InputError("need exactly one velocity name per base coordinate")
        if len(set(velocity)) != len(velocity) or set(velocity) & set(base):
            raise InputError("velocity names must be unique and disjoint from base names")

    @property
    def n(self) -> int:
        return len(self.base)

    @property
    def tangent(self) -> Tuple[str, ...]:
        return self.base + self.velocity

    def restrict(self, keep: Sequence[int]) -> "Chart":
        """Sub-chart on the base coordinates with the given indices."""
        return Chart(tuple(self.base[i] for i in keep), tuple(self.velocity[i] for i in keep))


class VectorField:
    """Components of a vector field on the coordinates ``coords``."""

    __slots__ = ("coords", "comps")

    def __init__(self, coords: Sequence[str], comps: Iterable):
        self.coords = tuple(coords)
        self.comps = tuple(RationalExpr.coerce(c) for c in comps)
        if len(self.comps) != len(self.coords):
            raise ChartMismatch(f"{len(self.comps)} components for {len(self.coords)} coordinates")

    @classmethod
    def zero(cls, coords: Sequence[str]) -> "VectorField":
        return cls(coords, [ZERO] * len(coords))

    @classmethod
    def basis(cls, coords: Sequence[str], i: int) -> "VectorField":
        return cls(coords, [ONE if j == i else ZERO for j in range(len(coords))])

    def __len__(self) -> int:
        return len(self.comps)

    def __getitem__(self, i: int) -> RationalExpr:
        return self.comps[i]

    def _check(self, other: "VectorField") -> None:
        if self.coords != other.coords:
            raise ChartMismatch(f"fields live on different charts {self.coords} and {other.coords}")

    def __add__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField(self.coords, [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField(self.coords, [a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self) -> "VectorField":
        return VectorField(self.coords, [-a for a in self.comps])

    def scale(self, f) -> "VectorField":
        f = RationalExpr.coerce(f)
        return VectorField(self.coords, [f * a for a in self.comps])

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorField) or self.coords != other.coords:
            return NotImplemented
        return all(a == b for a, b in zip(self.comps, other.comps))

    __hash__ = None

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def apply(self, f: RationalExpr) -> RationalExpr:
        """Directional derivative X(f)."""
        total = ZERO
        for name, c in zip(self.coords, self.comps):
            if not c.is_zero() and name in f.variables():
                total = total + c * f.diff(name)
        return total

    def degree(self) -> int:
        return max((c.degree() for c in self.comps), default=0)

    def evaluate(self, point) -> list:
        return [c.evaluate(point) for c in self.comps]

    def __str__(self) -> str:
        parts = [f"({c})*d/d{n}" for n, c in zip(self.coords, self.comps) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"VectorField({self.coords}, [{', '.join(str(c) for c in self.comps)}])"


class Connection:
    """Symmetric Christoffel table; ``gamma(k, i, j)`` is the coefficient of d/dx^k in nabla_{d_i} d_j."""

    def __init__(self, chart: Chart, entries: Optional[Dict[Tuple[int, int, int], RationalExpr]] = None):
        self.chart = chart
        table: Dict[Tuple[int, int, int], RationalExpr] = {}
        n = chart.n
        for (k, i, j), expr in (entries or {}).items():
            if not (0 <= k < n and 0 <= i < n and 0 <= j < n):
                raise InputError(f"Christoffel index ({k}, {i}, {j}) out of range for n={n}")
            expr = RationalExpr.coerce(expr)
            key = (k, min(i, j), max(i, j))
            if key in table:
                if not table[key] == expr:
                    raise InputError(
                        f"inconsistent Christoffel entries for Gamma^{k + 1}_{{{key[1] + 1}{key[2] + 1}}}: "
                        f"{table[key]} vs {expr}"
                    )
                continue
            if not expr.is_zero():
                table[key] = expr
        self._table = table

    @classmethod
    def flat(cls, chart: Chart) -> "Connection":
        return cls(chart, {})

    @classmethod
    def from_entries(cls, chart: Chart, entries: Iterable[Tuple[int, int, int, RationalExpr]]) -> "Connection":
        """Build from 0-based ``(k, i, j, expr)`` tuples; (i, j) and (j, i) must agree when both given."""
        table: Dict[Tuple[int, int, int], RationalExpr] = {}
        raw: Dict[Tuple[int, int, int], RationalExpr] = {}
        for k, i, j, expr in entries:
            expr = RationalExpr.coerce(expr)
            if (k, i, j) in raw and not raw[(k, i, j)] == expr:
                raise InputError(f"duplicate Christoffel entry ({k + 1}, {i + 1}, {j + 1}) with different values")
            raw[(k, i, j)] = expr
        for (k, i, j), expr in raw.items():
            other = raw.get((k, j, i))
            if other is not None and not other == expr:
                raise InputError(
                    f"asymmetric Christoffel entries Gamma^{k + 1}_{{{i + 1}{j + 1}}} != Gamma^{k + 1}_{{{j + 1}{i + 1}}}"
                )
            table[(k, i, j)] = expr
        return cls(chart, table)

    @property
    def n(self) -> int:
        return self.chart.n

    def gamma(self, k: int, i: int, j: int) -> RationalExpr:
        if i > j:
            i, j = j, i
        return self._table.get((k, i, j), ZERO)

    def entries(self) -> List[Tuple[int, int, int, RationalExpr]]:
        """Nonzero entries ``(k, i, j, expr)`` with i <= j, sorted."""
        return [(k, i, j, e) for (k, i, j), e in sorted(self._table.items())]

    def is_flat_table(self) -> bool:
        return not self._table


@dataclass
class AccsSystem:
    chart: Chart
    connection: Connection
    controls: List[VectorField] = field(default_factory=list)

    def __post_init__(self):
        if self.connection.chart.base != self.chart.base:
            raise ChartMismatch("connection chart differs from system chart")
        for g in self.controls:
            if g.coords != self.chart.base:
                raise ChartMismatch("control field not on the base chart")
        if not self.controls:
            raise InputError("an affine connection control system needs at least one control field")

    @property
    def n(self) -> int:
        return self.chart.n


@dataclass
class TangentSystem:
    """First-order affine control system ``dot z = drift(z) + sum u_r inputs[r](z)``."""

    coords: Tuple[str, ...]
    drift: VectorField
    inputs: List[VectorField]

    def __post_init__(self):
        self.coords = tuple(self.coords)
        for f in [self.drift, *self.inputs]:
            if f.coords != self.coords:
                raise ChartMismatch("system fields do not live on the system chart")


def _base_check(conn: Connection, *fields: VectorField) -> None:
    for f in fields:
        if f.coords != conn.chart.base:
            raise ChartMismatch(f"field on {f.coords} but connection chart is {conn.chart.base}")


def covariant_derivative(conn: Connection, X: VectorField, Y: VectorField) -> VectorField:
    """(nabla_X Y)^k = X(Y^k) + Gamma^k_ij X^i Y^j."""
    _base_check(conn, X, Y)
    n = conn.n
    out = []
    for k in range(n):
        acc = X.apply(Y.comps[k])
        for i in range(n):
            xi = X.comps[i]
            if xi.is_zero():
                continue
            for j in range(n):
                yj = Y.comps[j]
                if yj.is_zero():
                    continue
                g = conn.gamma(k, i, j)
                if not g.is_zero():
                    acc = acc + g * xi * yj
        out.append(acc)
    return VectorField(X.coords, out)


def symmetric_product(conn: Connection, X: VectorField, Y: VectorField) -> VectorField:
    return covariant_derivative(conn, X, Y) + covariant_derivative(conn, Y, X)


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y]^k = X(Y^k) - Y(X^k)."""
    X._check(Y)
    return VectorField(X.coords, [X.apply(b) - Y.apply(a) for a, b in zip(X.comps, Y.comps)])


def torsion(conn: Connection, X: VectorField, Y: VectorField) -> VectorField:
    return covariant_derivative(conn, X, Y) - covariant_derivative(conn, Y, X) - lie_bracket(X, Y)


def curvature(conn: Connection, X: VectorField, Y: VectorField, W: VectorField) -> VectorField:
    """R(X, Y)W = nabla_X nabla_Y W - nabla_Y nabla_X W - nabla_[X,Y] W."""
    _base_check(conn, X, Y, W)
    return (
        covariant_derivative(conn, X, covariant_derivative(conn, Y, W))
        - covariant_derivative(conn, Y, covariant_derivative(conn, X, W))
        - covariant_derivative(conn, lie_bracket(X, Y), W)
    )


def geodesic_spray(conn: Connection) -> VectorField:
    chart = conn.chart
    n = chart.n
    v = [RationalExpr.var(name) for name in chart.velocity]
    accel = []
    for j in range(n):
        acc = ZERO
        for k in range(n):
            for l in range(k, n):
                g = conn.gamma(j, k, l)
                if g.is_zero():
                    continue
                term = g * v[k] * v[l]
                acc = acc - (term if k == l else term * 2)
        accel.append(acc)
    return VectorField(chart.tangent, v + accel)


def vertical_lift(X: VectorField, chart: Chart) -> VectorField:
    if X.coords != chart.base:
        raise ChartMismatch("vertical lift needs a base-chart field")
    return VectorField(chart.tangent, [ZERO] * chart.n + list(X.comps))


def horizontal_lift(conn: Connection, X: VectorField) -> VectorField:
    """X^i (d/dq^i - Gamma^j_ik v^k d/dv^j)."""
    _base_check(conn, X)
    chart = conn.chart
    n = chart.n
    v = [RationalExpr.var(name) for name in chart.velocity]
    vert = []
    for j in range(n):
        acc = ZERO
        for i in range(n):
            xi = X.comps[i]
            if xi.is_zero():
                continue
            for k in range(n):
                g = conn.gamma(j, i, k)
                if not g.is_zero():
                    acc = acc - g * xi * v[k]
        vert.append(acc)
    return VectorField(chart.tangent, list(X.comps) + vert)


def base_part(Z: VectorField, chart: Chart) -> VectorField:
    """Components of a tangent-chart field along the base coordinates."""
    return VectorField(chart.base, Z.comps[: chart.n])


def velocity_part(Z: VectorField, chart: Chart) -> VectorField:
    """Components of a tangent-chart field along the velocity coordinates, read as a base-chart field."""
    return VectorField(chart.base, Z.comps[chart.n:])


def formal_velocity(chart: Chart) -> VectorField:
    """The field v^i d/dx^i whose coefficients are the velocity coordinates."""
    return VectorField(chart.base, [RationalExpr.var(name) for name in chart.velocity])


def covariant_along_velocity(conn: Connection, X: VectorField) -> VectorField:
    """nabla_v X with v the formal velocity; components are functions on the tangent chart."""
    chart = conn.chart
    n = chart.n
    v = formal_velocity(chart)
    out = []
    for k in range(n):
        acc = v.apply(X.comps[k])
        for i in range(n):
            for j in range(n):
                g = conn.gamma(k, i, j)
                if g.is_zero() or X.comps[j].is_zero():
                    continue
                acc = acc + g * v.comps[i] * X.comps[j]
        out.append(acc)
    return VectorField(chart.base, out)


def lift_system(sys: AccsSystem) -> TangentSystem:
    return TangentSystem(
        sys.chart.tangent,
        geodesic_spray(sys.connection),
        [vertical_lift(g, sys.chart) for g in sys.controls],
    )
