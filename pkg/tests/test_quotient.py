from __future__ import annotations

import random
from fractions import Fraction

import pytest

from mechquot.accessibility import is_geodesically_accessible
from mechquot.distribution import Distribution, generic_rank
from mechquot.errors import DependenceViolation, NotAdapted, PreconditionError, SingularPoint
from mechquot.geometry import AccsSystem, Chart, Connection, VectorField, lift_system
from mechquot.identities import random_connection, random_field, random_polynomial
from mechquot.quotient import (
    QuotientVerdict,
    aligned_indices,
    build_lifted_distribution,
    build_quotient_system,
    check_quotient_conditions,
    projection_components,
    verify_lifted_invariance,
)
from mechquot.symexpr import ZERO, RationalExpr, parse_expr

R2 = Chart(("x1", "x2"), ("y1", "y2"))
R3 = Chart(("x1", "x2", "x3"), ("y1", "y2", "y3"))


def F(names, *comps):
    return VectorField(names, [parse_expr(str(c), names) for c in comps])


def d(chart, i):
    return VectorField.basis(chart.base, i)


def worked_system():
    E = lambda t: parse_expr(t, R3.base)
    conn = Connection.from_entries(
        R3, [(0, 0, 0, E("-1")), (0, 0, 1, E("-1/2")), (1, 0, 0, E("-1")), (1, 0, 1, E("-1/2")), (1, 1, 1, E("1"))]
    )
    return AccsSystem(R3, conn, [d(R3, 1), d(R3, 2)])


def gamma222_system():
    conn = Connection.from_entries(R2, [(1, 1, 1, parse_expr("x1", R2.base))])
    return AccsSystem(R2, conn, [d(R2, 1)])


# -- random instances ---------------------------------------------------------------------


def adapted_instance(rng, n, k, break_it=False):
    """System on R^n with D = span{d_1..d_k} built to satisfy every quotient condition.

    With ``break_it`` one randomly chosen condition is violated.
    """
    chart = Chart(tuple(f"x{i + 1}" for i in range(n)), tuple(f"y{i + 1}" for i in range(n)))
    names = chart.base
    kept_names = names[k:]
    entries = {}
    for a in range(n):
        for b in range(n):
            for c in range(b, n):
                if a >= k:
                    if b < k or c < k:
                        continue  # Gamma^a_{ib} = 0 for kept a and dropped b
                    expr = random_polynomial(kept_names, rng, 2, 2) if rng.random() < 0.6 else ZERO
                else:
                    expr = random_polynomial(names, rng, 2, 2) if rng.random() < 0.5 else ZERO
                if not expr.is_zero():
                    entries[(a, b, c)] = expr
    controls = []
    for _ in range(rng.randint(1, 2)):
        comps = [random_polynomial(names, rng, 1, 2) if i < k else random_polynomial(kept_names, rng, 1, 2) for i in range(n)]
        controls.append(VectorField(names, comps))
    if break_it:
        kind = rng.choice(["restrict", "curvature", "controls"])
        e = rng.randrange(k)
        a = rng.randrange(k, n)
        xe = RationalExpr.var(names[e])
        if kind == "restrict":
            entries[(a, min(e, a), max(e, a))] = RationalExpr.const(rng.choice([1, 2, -3]))
        elif kind == "curvature":
            key = (a, k, k) if k < n else None
            entries[key] = entries.get(key, ZERO) + xe
        else:
            g = controls[0]
            comps = list(g.comps)
            comps[a] = comps[a] + xe
            controls[0] = VectorField(names, comps)
    conn = Connection(chart, entries)
    D = Distribution(names, [VectorField.basis(names, i) for i in range(k)])
    return AccsSystem(chart, conn, controls), D


def linear_change(sys, D, A):
    """Pull a system and distribution back along x = A x' (A integer, invertible)."""
    chart = sys.chart
    n = chart.n
    names = chart.base
    Ainv = _inverse(A)
    lin = {names[i]: sum((RationalExpr.var(names[j]) * RationalExpr.const(A[i][j]) for j in range(n)), ZERO) for i in range(n)}

    def pull(expr):
        return expr.substitute(lin)

    def push_field(X):
        comps = []
        for k in range(n):
            comps.append(sum((pull(X.comps[m]) * RationalExpr.const(Ainv[k][m]) for m in range(n) if Ainv[k][m]), ZERO))
        return VectorField(names, comps)

    G = [[[pull(sys.connection.gamma(m, p, q)) for q in range(n)] for p in range(n)] for m in range(n)]
    entries = {}
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                v = ZERO
                for m in range(n):
                    if not Ainv[k][m]:
                        continue
                    for p in range(n):
                        for q in range(n):
                            if A[p][i] and A[q][j] and not G[m][p][q].is_zero():
                                v = v + G[m][p][q] * RationalExpr.const(Ainv[k][m] * A[p][i] * A[q][j])
                if not v.is_zero():
                    entries[(k, i, j)] = v
    new = AccsSystem(chart, Connection(chart, entries), [push_field(g) for g in sys.controls])
    return new, Distribution(names, [push_field(g) for g in D.generators])


def _inverse(A):
    n = len(A)
    M = [[Fraction(A[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [v / piv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return [row[n:] for row in M]


def random_instances(count, seed=0):
    rng = random.Random(seed)
    out = []
    for t in range(count):
        n = rng.choice([2, 3])
        k = rng.randint(1, n - 1)
        sys, D = adapted_instance(rng, n, k, break_it=t % 3 == 1)
        if t % 4 == 3:
            A = [[int(i == j) for j in range(n)] for i in range(n)]
            A[rng.randrange(n)][rng.randrange(n)] += rng.choice([1, -1, 2])
            if abs(_det(A)) == 0:
                A = [[int(i == j) for j in range(n)] for i in range(n)]
                A[0][n - 1] = 1
            sys, D = linear_change(sys, D, A)
        if t % 5 == 4:
            conn = random_connection(sys.chart, rng, degree=1, density=0.4)
            D = Distribution(sys.chart.base, [random_field(sys.chart.base, rng, degree=1)])
            if D.generators[0].is_zero():
                D = Distribution(sys.chart.base, [VectorField.basis(sys.chart.base, 0)])
            sys = AccsSystem(sys.chart, conn, sys.controls)
        out.append((sys, D))
    return out


def _det(A):
    n = len(A)
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    return sum((-1) ** j * A[0][j] * _det([row[:j] + row[j + 1:] for row in A[1:]]) for j in range(n))


# -- condition checks ----------------------------------------------------------------------


def test_flat_plane_passes():
    sys = AccsSystem(R2, Connection.flat(R2), [d(R2, 1)])
    v = check_quotient_conditions(sys, Distribution(R2.base, [d(R2, 0)]))
    assert v.involutive and v.connection_restricts and v.curvature_ok and v.controls_invariant and v.overall


def test_gamma222_fails_only_curvature():
    v = check_quotient_conditions(gamma222_system(), Distribution(R2.base, [d(R2, 0)]))
    assert v.involutive and v.connection_restricts and v.controls_invariant
    assert not v.curvature_ok and not v.overall
    (w,) = v.witnesses
    assert w.condition == "curvature" and w.vector == d(R2, 1)
    assert "d/dx2)d/dx2" in w.fields


def test_worked_conditions():
    sys = worked_system()
    assert check_quotient_conditions(sys, Distribution(R3.base, [d(R3, 2)])).overall
    v = check_quotient_conditions(sys, Distribution(R3.base, [d(R3, 0)]))
    assert not v.connection_restricts and not v.overall


def test_controls_condition_witness():
    sys = AccsSystem(R2, Connection.flat(R2), [F(R2.base, 0, "x1")])
    v = check_quotient_conditions(sys, Distribution(R2.base, [d(R2, 0)]))
    assert not v.controls_invariant
    assert v.witnesses[0].vector == F(R2.base, 0, -1)


def test_singular_base_point():
    D = Distribution(R2.base, [F(R2.base, "x1", 0)], {"x1": 0, "x2": 0})
    with pytest.raises(SingularPoint):
        check_quotient_conditions(AccsSystem(R2, Connection.flat(R2), [d(R2, 1)]), D)


# -- lifted route ----------------------------------------------------------------------------


def test_lifted_distribution_examples():
    flat = AccsSystem(R2, Connection.flat(R2), [d(R2, 1)])
    Dt = build_lifted_distribution(flat, Distribution(R2.base, [d(R2, 0)]))
    assert Dt.generators == [F(R2.tangent, 1, 0, 0, 0), F(R2.tangent, 0, 0, 1, 0)]
    Dt = build_lifted_distribution(worked_system(), Distribution(R3.base, [d(R3, 2)]))
    assert Dt.generators == [F(R3.tangent, 0, 0, 1, 0, 0, 0), F(R3.tangent, 0, 0, 0, 0, 0, 1)]
    with pytest.raises(PreconditionError):
        build_lifted_distribution(worked_system(), Distribution(R3.base, [d(R3, 0)]))


def test_lifted_invariance_examples():
    flat = AccsSystem(R2, Connection.flat(R2), [d(R2, 1)])
    assert verify_lifted_invariance(flat, Distribution(R2.base, [d(R2, 0)])).holds
    res = verify_lifted_invariance(gamma222_system(), Distribution(R2.base, [d(R2, 0)]))
    assert not res.holds
    w = res.witnesses[0].vector
    assert not w.comps[3].is_zero()
    assert verify_lifted_invariance(worked_system(), Distribution(R3.base, [d(R3, 2)])).holds


def test_lifted_rank_is_twice_base_rank():
    for sys, D in random_instances(12, seed=7):
        if check_quotient_conditions(sys, D).overall:
            Dt = build_lifted_distribution(sys, D)
            assert generic_rank(Dt).generic_rank == 2 * generic_rank(D).generic_rank


def test_two_routes_agree_on_random_instances():
    instances = random_instances(24, seed=1)
    verdicts = []
    for sys, D in instances:
        direct = check_quotient_conditions(sys, D).overall
        lifted = verify_lifted_invariance(sys, D).holds
        assert direct == lifted
        verdicts.append(direct)
    # both outcomes occur, so agreement is not vacuous
    assert any(verdicts) and not all(verdicts)


def test_shear_preserves_verdict():
    rng = random.Random(11)
    for _ in range(4):
        sys, D = adapted_instance(rng, 3, 1)
        assert check_quotient_conditions(sys, D).overall
        sheared, Ds = linear_change(sys, D, [[1, 0, 0], [1, 1, 0], [0, 2, 1]])
        assert check_quotient_conditions(sheared, Ds).overall
        with pytest.raises(NotAdapted):
            aligned_indices(Ds)


# -- building the quotient --------------------------------------------------------------------


def test_worked_quotient_matches_first_two_blocks():
    sys = worked_system()
    q = build_quotient_system(sys, Distribution(R3.base, [d(R3, 2)]))
    red = q.system
    assert red.chart.base == ("x1", "x2") and red.chart.velocity == ("y1", "y2")
    t = lift_system(red)
    full = lift_system(sys)
    assert t.drift == VectorField(t.coords, [full.drift.comps[i] for i in (0, 1, 3, 4)])
    assert t.inputs[0] == F(t.coords, 0, 0, 0, 1)
    assert t.inputs[1].is_zero()
    assert projection_components(sys, q) == ["x1", "x2", "y1", "y2"]


def test_flat_r3_quotient():
    sys = AccsSystem(R3, Connection.flat(R3), [d(R3, 1), d(R3, 2)])
    q = build_quotient_system(sys, Distribution(R3.base, [d(R3, 0)]))
    assert q.system.connection.entries() == []
    assert q.system.controls == [F(("x2", "x3"), 1, 0), F(("x2", "x3"), 0, 1)]


def test_gamma122_quotient():
    conn = Connection.from_entries(R2, [(0, 1, 1, parse_expr("x2", R2.base))])
    sys = AccsSystem(R2, conn, [d(R2, 1)])
    q = build_quotient_system(sys, Distribution(R2.base, [d(R2, 0)]))
    assert q.system.chart.base == ("x2",)
    assert q.system.connection.entries() == []
    assert q.system.controls == [F(("x2",), 1)]


def test_not_adapted():
    sys = AccsSystem(R2, Connection.flat(R2), [d(R2, 1)])
    with pytest.raises(NotAdapted) as info:
        build_quotient_system(sys, Distribution(R2.base, [F(R2.base, 1, 1)]))
    assert info.value.code == "NOT_ADAPTED"


def test_dependence_violation_reports_symbol():
    # Passing conditions rule this out; force the check with a fabricated verdict.
    forged = QuotientVerdict(True, True, True, True)
    with pytest.raises(DependenceViolation) as info:
        build_quotient_system(gamma222_system(), Distribution(R2.base, [d(R2, 0)]), forged)
    assert info.value.symbol == "Gamma^x2_{x2 x2}"
    sys = AccsSystem(R2, Connection.flat(R2), [F(R2.base, 0, "x1")])
    with pytest.raises(DependenceViolation) as info:
        build_quotient_system(sys, Distribution(R2.base, [d(R2, 0)]), forged)
    assert info.value.symbol == "u1^x2"


def test_failed_conditions_block_build():
    with pytest.raises(PreconditionError):
        build_quotient_system(gamma222_system(), Distribution(R2.base, [d(R2, 0)]))


def test_extreme_distributions():
    sys = worked_system()
    full = Distribution(R3.base, [d(R3, i) for i in range(3)])
    assert check_quotient_conditions(sys, full).overall
    q = build_quotient_system(sys, full)
    assert q.system is None and q.kept == []
    zero = Distribution(R3.base, [VectorField.zero(R3.base)])
    assert check_quotient_conditions(sys, zero).overall
    q = build_quotient_system(sys, zero)
    assert q.system.connection.entries() == sys.connection.entries()
    assert q.system.controls == sys.controls


def test_passing_random_quotients_are_valid_systems():
    for sys, D in random_instances(16, seed=3):
        try:
            idx = aligned_indices(D)
        except NotAdapted:
            continue
        if not check_quotient_conditions(sys, D).overall:
            continue
        q = build_quotient_system(sys, D)
        if q.system is None:
            continue
        dropped = {sys.chart.base[i] for i in idx}
        for _, _, _, e in q.system.connection.entries():
            assert not (e.variables() & dropped)
        assert len(q.system.controls) == len(sys.controls)


def test_full_actuation_preserved():
    rng = random.Random(21)
    for _ in range(3):
        sys, D = adapted_instance(rng, 3, 1)
        controls = [VectorField.basis(R3.base, i) for i in range(3)]
        sys = AccsSystem(sys.chart, sys.connection, controls)
        if not check_quotient_conditions(sys, D).overall:
            continue
        q = build_quotient_system(sys, D)
        assert generic_rank(Distribution(q.system.chart.base, q.system.controls)).generic_rank == 2


def test_accessible_input_gives_accessible_quotient():
    conn = Connection.from_entries(R2, [(0, 1, 1, parse_expr("x2", R2.base))])
    sys = AccsSystem(R2, conn, [d(R2, 1)])
    assert is_geodesically_accessible(sys, {"x1": 0, "x2": 1}).geodesically_accessible
    q = build_quotient_system(sys, Distribution(R2.base, [d(R2, 0)]))
    assert is_geodesically_accessible(q.system, {"x2": 1}).geodesically_accessible
