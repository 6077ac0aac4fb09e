"""Mechanical quotients of affine connection control systems.

Two independent decision routes are provided:

* ``check_quotient_conditions`` tests the base-manifold conditions directly:
  D involutive, the connection restricts to D, R(X, v)v in D for X in D, and
  [g_i, D] in D.
* ``verify_lifted_invariance`` works on the tangent chart: it builds
  span{D^vlft, [S, D^vlft]} and tests invariance under the spray and the
  lifted controls by brute-force brackets.

The two must agree on every input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .distribution import Distribution, contains, generic_rank, in_span, is_involutive, restricts_connection
from .errors import DependenceViolation, NotAdapted, PreconditionError, SingularPoint
from .geometry import (
    AccsSystem,
    Chart,
    Connection,
    VectorField,
    curvature,
    geodesic_spray,
    horizontal_lift,
    lie_bracket,
    vertical_lift,
)

CONTROLS_NOTE = "[g_i, D] in D checked on generators; function multiples follow from the Leibniz rule"
GLOBAL_NOTE = "local conditions hold; global structure requires completeness assumptions"


@dataclass
class Witness:
    condition: str
    fields: str
    vector: VectorField


@dataclass
class QuotientVerdict:
    involutive: bool
    connection_restricts: bool
    curvature_ok: bool
    controls_invariant: bool
    witnesses: List[Witness] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return self.involutive and self.connection_restricts and self.curvature_ok and self.controls_invariant


def _check_base_point(D: Distribution) -> None:
    if D.base_point is None:
        return
    rank = generic_rank(D)
    if rank.singular:
        raise SingularPoint(
            f"distribution has generic rank {rank.generic_rank} but rank {rank.pointwise_rank} at the base point"
        )


def check_quotient_conditions(sys: AccsSystem, D: Distribution) -> QuotientVerdict:
    if D.coords != sys.chart.base:
        raise PreconditionError("distribution must live on the system's base chart")
    _check_base_point(D)
    conn = sys.connection
    coords = D.coords
    n = len(coords)
    witnesses: List[Witness] = []

    inv = is_involutive(D)
    if not inv:
        witnesses.append(Witness("involutive", *inv.witness))

    res = restricts_connection(conn, D)
    if not res:
        witnesses.append(Witness("connection_restricts", *res.witness))

    curv_ok = True
    basis = [VectorField.basis(coords, i) for i in range(n)]
    for a, g in enumerate(D.generators):
        for j in range(n):
            for l in range(j, n):
                w = curvature(conn, g, basis[j], basis[l])
                if l != j:
                    w = w + curvature(conn, g, basis[l], basis[j])
                if not contains(D, w):
                    curv_ok = False
                    label = (
                        f"R(g{a + 1}, d/d{coords[j]})d/d{coords[j]}"
                        if j == l
                        else f"R(g{a + 1}, d/d{coords[j]})d/d{coords[l]} + R(g{a + 1}, d/d{coords[l]})d/d{coords[j]}"
                    )
                    witnesses.append(Witness("curvature", label, w))
                    break
            if not curv_ok:
                break
        if not curv_ok:
            break

    ctrl_ok = True
    for i, g in enumerate(sys.controls):
        for a, X in enumerate(D.generators):
            br = lie_bracket(g, X)
            if not contains(D, br):
                ctrl_ok = False
                witnesses.append(Witness("controls_invariant", f"[u{i + 1}, g{a + 1}]", br))
                break
        if not ctrl_ok:
            break

    return QuotientVerdict(inv.holds, res.holds, curv_ok, ctrl_ok, witnesses, [CONTROLS_NOTE])


def build_lifted_distribution(sys: AccsSystem, D: Distribution) -> Distribution:
    """span{D^H, D^vlft} on the tangent chart; requires the connection to restrict to D."""
    res = restricts_connection(sys.connection, D)
    if not res:
        raise PreconditionError(f"connection does not restrict to D: {res.witness[0]} = {res.witness[1]}")
    chart = sys.chart
    gens = [horizontal_lift(sys.connection, X) for X in D.generators]
    gens += [vertical_lift(X, chart) for X in D.generators]
    return Distribution(chart.tangent, gens)


@dataclass
class LiftedInvariance:
    holds: bool
    generators: List[VectorField]
    witnesses: List[Witness] = field(default_factory=list)


def verify_lifted_invariance(sys: AccsSystem, D: Distribution) -> LiftedInvariance:
    chart = sys.chart
    S = geodesic_spray(sys.connection)
    vl = [vertical_lift(X, chart) for X in D.generators]
    gens = vl + [lie_bracket(S, V) for V in vl]
    labels = [f"g{a + 1}^vlft" for a in range(len(vl))] + [f"[S, g{a + 1}^vlft]" for a in range(len(vl))]
    witnesses: List[Witness] = []
    movers = [("S", S)] + [(f"u{i + 1}^vlft", vertical_lift(g, chart)) for i, g in enumerate(sys.controls)]
    for name, F in movers:
        for label, G in zip(labels, gens):
            br = lie_bracket(F, G)
            if not in_span(gens, br):
                witnesses.append(Witness("lifted_invariance", f"[{name}, {label}]", br))
                return LiftedInvariance(False, gens, witnesses)
    return LiftedInvariance(True, gens, witnesses)


def aligned_indices(D: Distribution) -> List[int]:
    """Coordinate indices spanning D when D is a coordinate distribution; raise NotAdapted otherwise."""
    support = set()
    for g in D.generators:
        for i, c in enumerate(g.comps):
            if not c.is_zero():
                support.add(i)
    idx = sorted(support)
    if generic_rank(D).generic_rank != len(idx):
        raise NotAdapted(
            "distribution is not spanned by coordinate fields; rectify to adapted coordinates first"
        )
    return idx


@dataclass
class QuotientSystem:
    system: Optional[AccsSystem]  # None for the zero-dimensional quotient
    chart: Chart
    kept: List[int]
    dropped: List[int]
    controls: List[VectorField]

    @property
    def projection_names(self) -> Tuple[str, ...]:
        return self.chart.tangent


def build_quotient_system(sys: AccsSystem, D: Distribution, verdict: Optional[QuotientVerdict] = None) -> QuotientSystem:
    dropped = aligned_indices(D)
    if verdict is None:
        verdict = check_quotient_conditions(sys, D)
    if not verdict.overall:
        failed = [w.condition for w in verdict.witnesses]
        raise PreconditionError(f"quotient conditions fail: {', '.join(failed)}")
    n = sys.n
    kept = [i for i in range(n) if i not in dropped]
    names = sys.chart.base
    dropped_names = [names[e] for e in dropped]
    conn = sys.connection

    def independent(expr, label):
        for e in dropped_names:
            if not expr.diff(e).is_zero():
                raise DependenceViolation(f"{label} = {expr} depends on {e}", label)

    entries = []
    for a_new, a in enumerate(kept):
        for b_new, b in enumerate(kept):
            for c_new in range(b_new, len(kept)):
                c = kept[c_new]
                g = conn.gamma(a, b, c)
                if g.is_zero():
                    continue
                label = f"Gamma^{names[a]}_{{{names[b]} {names[c]}}}"
                independent(g, label)
                entries.append((a_new, b_new, c_new, g))
    chart = sys.chart.restrict(kept)
    controls = []
    for i, g in enumerate(sys.controls):
        comps = []
        for a in kept:
            independent(g.comps[a], f"u{i + 1}^{names[a]}")
            comps.append(g.comps[a])
        controls.append(VectorField(chart.base, comps))
    reduced = None
    if kept:
        reduced = AccsSystem(chart, Connection.from_entries(chart, entries), controls)
    return QuotientSystem(reduced, chart, kept, dropped, controls)


def projection_components(sys: AccsSystem, q: QuotientSystem) -> List[str]:
    """Tangent-chart names kept by the adapted projection (reduced positions, then velocities)."""
    return [sys.chart.base[i] for i in q.kept] + [sys.chart.velocity[i] for i in q.kept]
