from __future__ import annotations

import math
import os
import subprocess
import sys

import pytest

from mechquot.distribution import Distribution
from mechquot.errors import ChartMismatch, IntegrationError, PoleError
from mechquot.geometry import AccsSystem, Chart, Connection, TangentSystem, VectorField, lift_system
from mechquot.quotient import build_quotient_system
from mechquot.simulate import (
    BACKENDS,
    ControlSignal,
    QuotientMap,
    check_commutation,
    integrate,
    project,
    span_residual,
    step_halving_ratio,
)
from mechquot.symexpr import RationalExpr, parse_expr

R1 = Chart(("x",), ("y",))
R2 = Chart(("x1", "x2"), ("y1", "y2"))
R3 = Chart(("x1", "x2", "x3"), ("y1", "y2", "y3"))

WORKED_X0 = {"x1": 0, "x2": 0, "x3": 0, "y1": -1, "y2": 1, "y3": 0}


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


def planar_system():
    c = ("y1", "y2")
    return TangentSystem(c, F(c, "y1^2 + y1*y2", "y1^2 - y2^2 + y1*y2"), [F(c, 0, 1), F(c, 0, 0)])


def line(control="1"):
    return AccsSystem(R1, Connection.flat(R1), [F(R1.base, control)])


# -- integrator ------------------------------------------------------------------------


def test_straight_line_geodesic():
    traj = integrate(line(), {"x": 0, "y": 1}, ControlSignal.constant([0]), 1.0, 1e-3)
    for t, (x, y) in zip(traj.times, traj.states):
        assert abs(x - t) <= 1e-12 and abs(y - 1) <= 1e-12


def test_constant_acceleration():
    traj = integrate(line(), {"x": 0, "y": 0}, ControlSignal.constant([1]), 1.0, 1e-3)
    for t, (x, y) in zip(traj.times, traj.states):
        assert abs(y - t) <= 1e-9 and abs(x - t * t / 2) <= 1e-9


def test_exponential_growth_fourth_order():
    c = ("z",)
    sys = TangentSystem(c, F(c, "z"), [])
    errs = []
    for dt in (0.1, 0.05):
        traj = integrate(sys, [1.0], ControlSignal.constant([]), 1.0, dt)
        errs.append(abs(traj.states[-1][0] - math.e))
    assert 14 < errs[0] / errs[1] < 17


def test_worked_half_step_agreement():
    u = ControlSignal.constant([0, 0])
    a = integrate(worked_system(), WORKED_X0, u, 0.5, 1e-3)
    b = integrate(worked_system(), WORKED_X0, u, 0.5, 5e-4)
    assert max(abs(p - q) for s, s2 in zip(a.states, b.states[::2]) for p, q in zip(s, s2)) <= 1e-8


def test_step_halving_ratio_worked():
    ratio = step_halving_ratio(worked_system(), WORKED_X0, ControlSignal.constant([0, 0]), 0.5, 0.05)
    assert 8 <= ratio <= 32


def test_piecewise_control_changes_on_grid():
    u = ControlSignal([0, 0.5], [[1], [-1]])
    traj = integrate(line(), {"x": 0, "y": 0}, u, 1.0, 0.25)
    assert [s[1] for s in traj.states] == pytest.approx([0, 0.25, 0.5, 0.25, 0.0], abs=1e-15)


def test_control_signal_validation():
    with pytest.raises(IntegrationError):
        ControlSignal([0.1], [[1]])
    with pytest.raises(IntegrationError):
        ControlSignal([0, 0.5, 0.5], [[1], [2], [3]])
    with pytest.raises(IntegrationError):
        ControlSignal([0, 1], [[1]])
    with pytest.raises(IntegrationError):
        ControlSignal([0], [[math.inf]])
    with pytest.raises(IntegrationError):
        ControlSignal([0, 1], [[1], [1, 2]])


def test_grid_alignment_required():
    with pytest.raises(IntegrationError):
        integrate(line(), {"x": 0, "y": 0}, ControlSignal([0, 0.3], [[1], [0]]), 1.0, 0.25)
    with pytest.raises(IntegrationError):
        integrate(line(), {"x": 0, "y": 0}, ControlSignal.constant([1]), 0.9, 0.25)
    with pytest.raises(IntegrationError):
        integrate(line(), {"x": 0, "y": 0}, ControlSignal.constant([1]), 1.0, -0.25)


def test_input_count_and_state_checks():
    with pytest.raises(IntegrationError):
        integrate(line(), {"x": 0, "y": 0}, ControlSignal.constant([1, 2]), 1.0, 0.25)
    with pytest.raises(IntegrationError):
        integrate(line(), {"x": 0}, ControlSignal.constant([1]), 1.0, 0.25)
    with pytest.raises(IntegrationError):
        integrate(line(), [0.0, math.nan], ControlSignal.constant([1]), 1.0, 0.25)


@pytest.mark.parametrize("backend", sorted(BACKENDS))
def test_pole_reports_time(backend):
    with pytest.raises(PoleError) as info:
        integrate(line("1/(2*x - 1)"), {"x": 0, "y": 1}, ControlSignal.constant([0]), 1.0, 0.25, backend)
    assert info.value.time == 0.5


@pytest.mark.parametrize("backend", sorted(BACKENDS))
def test_blow_up_is_reported(backend):
    c = ("z",)
    sys = TangentSystem(c, F(c, "z^3"), [])
    with pytest.raises(IntegrationError):
        integrate(sys, [10.0], ControlSignal.constant([]), 10.0, 0.5, backend)


# -- backends ------------------------------------------------------------------------------


def test_backends_bit_identical():
    if "compiled" not in BACKENDS:
        pytest.skip("compiled kernel not built")
    u = ControlSignal([0, 0.2, 0.35], [[2, -1], [-1, 3], [0.5, 0]])
    x0 = {"x1": 1, "x2": -2, "x3": 0.5, "y1": -1, "y2": 0.5, "y3": 2}
    a = integrate(worked_system(), x0, u, 0.5, 1e-3, "python")
    b = integrate(worked_system(), x0, u, 0.5, 1e-3, "compiled")
    assert a.states == b.states
    rat = AccsSystem(R2, Connection.from_entries(R2, [(0, 1, 1, parse_expr("1/(1 + x1^2)", R2.base))]), [d(R2, 1)])
    x0 = {"x1": 0.3, "x2": 0, "y1": 0.1, "y2": 1}
    a = integrate(rat, x0, ControlSignal.constant([0.5]), 1.0, 1e-2, "python")
    b = integrate(rat, x0, ControlSignal.constant([0.5]), 1.0, 1e-2, "compiled")
    assert a.states == b.states


def test_pure_python_fallback_selected_by_environment():
    code = "from mechquot.simulate import BACKEND, BACKENDS; print(BACKEND, sorted(BACKENDS))"
    env = dict(os.environ, MECHQUOT_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python ['python']"


def test_unknown_backend():
    with pytest.raises(ValueError):
        integrate(line(), {"x": 0, "y": 0}, ControlSignal.constant([1]), 1.0, 0.25, "fortran")


# -- projection and commutation -------------------------------------------------------------


def test_project_identity_and_tau():
    traj = integrate(worked_system(), WORKED_X0, ControlSignal.constant([0, 1]), 0.1, 1e-2)
    ident = QuotientMap(R3.tangent, R3.tangent, [RationalExpr.var(c) for c in R3.tangent])
    assert project(traj, ident).states == traj.states
    tau = QuotientMap.coordinate_projection(R3.tangent, ["y1", "y2"])
    p = project(traj, tau)
    assert p.coords == ("y1", "y2")
    assert [s[0] for s in p.states] == traj.column("y1")
    with pytest.raises(ChartMismatch):
        project(p, tau)


def test_project_pole_along_trajectory():
    traj = integrate(line(), {"x": 0, "y": 1}, ControlSignal.constant([0]), 1.0, 0.25)
    m = QuotientMap(R1.tangent, ("w",), [parse_expr("1/(x - 1/2)", R1.tangent)])
    with pytest.raises(PoleError) as info:
        project(traj, m)
    assert info.value.time == 0.5


def test_flat_r3_commutation():
    sys = AccsSystem(R3, Connection.flat(R3), [d(R3, 1), d(R3, 2)])
    q = build_quotient_system(sys, Distribution(R3.base, [d(R3, 0)]))
    u = ControlSignal([0, 0.25, 0.5, 0.75], [[-1, 0.5], [0.5, -1], [-1, -1], [0.5, 0.5]])
    qmap = QuotientMap.coordinate_projection(R3.tangent, q.projection_names)
    x0 = {"x1": 1, "x2": 0, "x3": -1, "y1": 2, "y2": 0.5, "y3": -0.5}
    rep = check_commutation(sys, q.system, qmap, x0, u, 1.0, 1e-3, 1e-9)
    assert rep.passed and rep.residual <= 1e-9


def test_worked_to_planar_commutation():
    tau = QuotientMap.coordinate_projection(R3.tangent, ["y1", "y2"])
    for u in (ControlSignal.constant([1, 0]), ControlSignal([0, 0.25], [[0, 1], [-2, 3]])):
        rep = check_commutation(worked_system(), planar_system(), tau, WORKED_X0, u, 0.5, 1e-3, 1e-6)
        assert rep.passed


def test_planar_to_planar_tilde_commutation():
    c32 = ("y1", "y2")
    ctil = ("xt1", "xt2")
    planar_tilde = TangentSystem(ctil, F(ctil, "xt2", "4*xt1*xt2 - xt1^3"), [F(ctil, 0, "xt1"), F(ctil, 0, 0)])
    m = QuotientMap(c32, ctil, [parse_expr("y1", c32), parse_expr("y1^2 + y1*y2", c32)])
    for y2 in (1, 0.25, -0.5):
        rep = check_commutation(planar_system(), planar_tilde, m, {"y1": -1, "y2": y2}, ControlSignal([0, 0.25], [[1, 0], [-1, 0]]), 0.5, 1e-3, 1e-6)
        assert rep.passed, rep.residual


def test_violated_dependence_breaks_commutation():
    # Gamma^2_22 = x1 depends on the coordinate being quotiented out; freezing it at
    # x1 = 0 gives a plausible-looking but wrong quotient.
    sys = AccsSystem(R2, Connection.from_entries(R2, [(1, 1, 1, parse_expr("x1", R2.base))]), [d(R2, 1)])
    wrong = AccsSystem(Chart(("x2",), ("y2",)), Connection.flat(Chart(("x2",), ("y2",))), [F(("x2",), 1)])
    qmap = QuotientMap.coordinate_projection(R2.tangent, ["x2", "y2"])
    rep = check_commutation(sys, wrong, qmap, {"x1": 0, "x2": 0, "y1": 1, "y2": 1}, ControlSignal.constant([0]), 0.5, 1e-3, 1e-6)
    assert not rep.passed and rep.residual > 1e-3


def test_commutation_chart_mismatch():
    tau = QuotientMap.coordinate_projection(R3.tangent, ["y1", "y2"], target=["a", "b"])
    with pytest.raises(ChartMismatch):
        check_commutation(worked_system(), planar_system(), tau, WORKED_X0, ControlSignal.constant([1, 0]), 0.5, 1e-3)


# -- invariance shadow and CSV ------------------------------------------------------------


@pytest.mark.parametrize(
    "system, gens, x0",
    [
        (worked_system(), [d(R3, 2)], {"x1": 0.5, "x2": -1, "x3": 0, "y1": 0, "y2": 0, "y3": 1.5}),
        (
            AccsSystem(R2, Connection.from_entries(R2, [(0, 1, 1, parse_expr("x2", R2.base))]), [d(R2, 1)]),
            [d(R2, 0)],
            {"x1": 0, "x2": 1, "y1": -0.75, "y2": 0},
        ),
    ],
)
def test_geodesic_invariance_shadow(system, gens, x0):
    traj = integrate(system, x0, ControlSignal.constant([0] * len(system.controls)), 0.5, 1e-3)
    assert span_residual(traj, system.chart.base, system.chart.velocity, gens) <= 1e-6


def test_csv_format(tmp_path):
    traj = integrate(line(), {"x": 0, "y": 1}, ControlSignal.constant([0]), 0.5, 0.25)
    text = traj.to_csv()
    lines = text.splitlines()
    assert lines[0] == "t,x,y"
    assert lines[1] == "0,0,1"
    assert lines[-1] == "0.5,0.5,1"
    path = tmp_path / "traj.csv"
    traj.write_csv(path)
    assert path.read_text() == text
    assert float(lines[2].split(",")[1]) == 0.25


def test_lifted_system_accepted_directly():
    t = lift_system(line())
    a = integrate(t, [0, 1], ControlSignal.constant([0]), 0.5, 0.25)
    b = integrate(line(), [0, 1], ControlSignal.constant([0]), 0.5, 0.25)
    assert a.states == b.states
