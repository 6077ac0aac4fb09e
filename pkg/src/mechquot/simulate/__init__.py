"""Fixed-step RK4 simulation and quotient-map commutation checks."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence

import numpy as np

from ..errors import ChartMismatch, IntegrationError, PoleError
from ..geometry import AccsSystem, TangentSystem, VectorField, lift_system
from ..symexpr import RationalExpr
from ._backend import BACKEND, BACKENDS, get_kernel
from .tape import compile_fields

POLE_TOL = 1e-12
DEFAULT_DT = 1e-3
DEFAULT_TOL = 1e-6

__all__ = [
    "BACKEND",
    "BACKENDS",
    "ControlSignal",
    "Trajectory",
    "QuotientMap",
    "CommutationReport",
    "integrate",
    "project",
    "check_commutation",
    "step_halving_ratio",
    "span_residual",
]


@dataclass
class ControlSignal:
    """Piecewise-constant input: ``values[i]`` holds from ``breakpoints[i]`` until the next breakpoint."""

    breakpoints: List[float]
    values: List[List[float]]

    def __post_init__(self):
        self.breakpoints = [float(b) for b in self.breakpoints]
        self.values = [[float(v) for v in row] for row in self.values]
        if not self.breakpoints or self.breakpoints[0] != 0.0:
            raise IntegrationError("control breakpoints must start at 0")
        if any(nxt <= prev for prev, nxt in zip(self.breakpoints, self.breakpoints[1:])):
            raise IntegrationError("control breakpoints must be strictly increasing")
        if len(self.values) != len(self.breakpoints):
            raise IntegrationError("need one value vector per breakpoint interval")
        widths = {len(row) for row in self.values}
        if len(widths) != 1:
            raise IntegrationError("control vectors must all have the same length")
        if not all(math.isfinite(v) for row in self.values for v in row):
            raise IntegrationError("control values must be finite")

    @classmethod
    def constant(cls, values: Sequence[float]) -> "ControlSignal":
        return cls([0.0], [list(values)])

    @property
    def m(self) -> int:
        return len(self.values[0])

    def step_values(self, dt: float, nsteps: int) -> List[List[float]]:
        starts = [_grid_index(b, dt, "control breakpoint") for b in self.breakpoints]
        out = []
        seg = 0
        for s in range(nsteps):
            while seg + 1 < len(starts) and starts[seg + 1] <= s:
                seg += 1
            out.append(self.values[seg])
        return out


@dataclass
class Trajectory:
    coords: tuple
    times: List[float]
    states: List[List[float]]

    def column(self, name: str) -> List[float]:
        i = self.coords.index(name)
        return [s[i] for s in self.states]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(("t",) + tuple(self.coords)) + "\n")
        for t, s in zip(self.times, self.states):
            buf.write(",".join(f"{v:.17g}" for v in (t, *s)) + "\n")
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def _grid_index(t: float, dt: float, what: str) -> int:
    k = round(t / dt)
    if abs(k * dt - t) > 1e-9 * max(1.0, abs(t)):
        raise IntegrationError(f"{what} {t} is not a multiple of dt={dt}")
    return int(k)


def _as_tangent(system) -> TangentSystem:
    if isinstance(system, AccsSystem):
        return lift_system(system)
    if isinstance(system, TangentSystem):
        return system
    raise TypeError(f"cannot integrate {type(system).__name__}")


def _state_vector(coords, x0) -> List[float]:
    if isinstance(x0, Mapping):
        missing = [c for c in coords if c not in x0]
        if missing:
            raise IntegrationError(f"initial state does not bind {', '.join(missing)}")
        return [float(x0[c]) for c in coords]
    vals = [float(v) for v in x0]
    if len(vals) != len(coords):
        raise IntegrationError(f"initial state has {len(vals)} entries, expected {len(coords)}")
    return vals


def integrate(system, x0, u: ControlSignal, t_end: float, dt: float = DEFAULT_DT, backend: Optional[str] = None) -> Trajectory:
    """Classical RK4 with the control held constant over each step."""
    tsys = _as_tangent(system)
    if dt <= 0:
        raise IntegrationError("dt must be positive")
    if u.m != len(tsys.inputs):
        raise IntegrationError(f"control has {u.m} channels, system has {len(tsys.inputs)} inputs")
    nsteps = _grid_index(t_end, dt, "t_end")
    state = _state_vector(tsys.coords, x0)
    if not all(math.isfinite(v) for v in state):
        raise IntegrationError("initial state is not finite")
    tape = compile_fields(tsys.coords, [tsys.drift, *tsys.inputs])
    weights = [[1.0, *row] for row in u.step_values(dt, nsteps)]
    if not weights:
        weights_arr = np.zeros((0, 1 + u.m))
    else:
        weights_arr = np.asarray(weights, dtype=np.float64)
    kernel = get_kernel(backend)
    states, status, fail_step, fail_stage = kernel.rk4(
        state, weights_arr, float(dt), nsteps,
        tape.num_ptr, tape.den_ptr, tape.coef, tape.fac_ptr, tape.fac_var, tape.fac_exp, POLE_TOL,
    )
    if status == 1:
        t_fail = fail_step * dt + (0.0, 0.5, 0.5, 1.0)[fail_stage] * dt
        raise PoleError(f"pole encountered at t={t_fail:.17g}", time=t_fail)
    if status == 2:
        t_fail = (fail_step + 1) * dt
        raise IntegrationError(f"state became non-finite at t={t_fail:.17g}")
    times = [k * dt for k in range(nsteps + 1)]
    return Trajectory(tsys.coords, times, [list(s) for s in states])


class _FloatExpr:
    """Float evaluator for a rational expression over fixed coordinates."""

    def __init__(self, expr: RationalExpr, coords: Sequence[str]):
        index = {c: i for i, c in enumerate(coords)}
        unknown = expr.variables() - set(index)
        if unknown:
            raise ChartMismatch(f"expression uses {sorted(unknown)} outside {tuple(coords)}")
        self.num = [(float(c), [(index[n], e) for n, e in m]) for m, c in expr.num.terms.items()]
        self.den = [(float(c), [(index[n], e) for n, e in m]) for m, c in expr.den.terms.items()]

    @staticmethod
    def _poly(terms, x) -> float:
        total = 0.0
        for c, facs in terms:
            v = c
            for i, e in facs:
                xv = x[i]
                for _ in range(e):
                    v *= xv
            total += v
        return total

    def __call__(self, x) -> float:
        den = self._poly(self.den, x)
        if abs(den) < POLE_TOL:
            raise PoleError("pole while evaluating a map component")
        return self._poly(self.num, x) / den


@dataclass
class QuotientMap:
    source: tuple
    target: tuple
    components: List[RationalExpr]

    def __post_init__(self):
        self.source = tuple(self.source)
        self.target = tuple(self.target)
        if len(self.components) != len(self.target):
            raise ChartMismatch("quotient map needs one component per target coordinate")
        self._evals = [_FloatExpr(c, self.source) for c in self.components]

    @classmethod
    def coordinate_projection(cls, source: Sequence[str], keep: Sequence[str], target: Optional[Sequence[str]] = None):
        target = tuple(target) if target is not None else tuple(keep)
        return cls(tuple(source), target, [RationalExpr.var(k) for k in keep])

    def __call__(self, state: Sequence[float]) -> List[float]:
        return [f(state) for f in self._evals]


def project(traj: Trajectory, qmap: QuotientMap) -> Trajectory:
    if tuple(traj.coords) != qmap.source:
        raise ChartMismatch(f"map expects states on {qmap.source}, trajectory is on {traj.coords}")
    out = []
    for t, s in zip(traj.times, traj.states):
        try:
            out.append(qmap(s))
        except PoleError:
            raise PoleError(f"quotient map has a pole along the trajectory at t={t:.17g}", time=t) from None
    return Trajectory(qmap.target, list(traj.times), out)


@dataclass
class CommutationReport:
    residual: float
    tol: float
    worst_time: float
    source: Trajectory = field(repr=False)
    projected: Trajectory = field(repr=False)
    target: Trajectory = field(repr=False)

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol


def check_commutation(
    source, target, qmap: QuotientMap, x0, u: ControlSignal, t_end: float,
    dt: float = DEFAULT_DT, tol: float = DEFAULT_TOL, backend: Optional[str] = None,
) -> CommutationReport:
    """Integrate both systems and measure sup |psi(y(t)) - z(t)| with z(0) = psi(y(0))."""
    src = _as_tangent(source)
    tgt = _as_tangent(target)
    if tuple(tgt.coords) != qmap.target:
        raise ChartMismatch(f"map targets {qmap.target}, quotient system is on {tgt.coords}")
    y = integrate(src, x0, u, t_end, dt, backend)
    z0 = qmap(y.states[0])
    z = integrate(tgt, z0, u, t_end, dt, backend)
    proj = project(y, qmap)
    worst = 0.0
    worst_t = 0.0
    for t, a, b in zip(z.times, proj.states, z.states):
        d = max((abs(p - q) for p, q in zip(a, b)), default=0.0)
        if d > worst or math.isnan(d):
            worst, worst_t = d, t
    return CommutationReport(worst, tol, worst_t, y, proj, z)


def step_halving_ratio(system, x0, u: ControlSignal, t_end: float, dt: float, backend: Optional[str] = None) -> float:
    """||y_dt - y_dt/2|| / ||y_dt/2 - y_dt/4|| on the coarse grid; about 16 for a 4th-order method."""
    a = integrate(system, x0, u, t_end, dt, backend)
    b = integrate(system, x0, u, t_end, dt / 2, backend)
    c = integrate(system, x0, u, t_end, dt / 4, backend)
    e1 = max(abs(p - q) for k, s in enumerate(a.states) for p, q in zip(s, b.states[2 * k]))
    e2 = max(abs(p - q) for k, s in enumerate(a.states) for p, q in zip(b.states[2 * k], c.states[4 * k]))
    return e1 / e2


def span_residual(traj: Trajectory, base: Sequence[str], velocity: Sequence[str], generators: Sequence[VectorField]) -> float:
    """Largest least-squares distance of the velocity from span{generators} along a trajectory."""
    idx_v = [traj.coords.index(v) for v in velocity]
    evals = [[_FloatExpr(c, traj.coords) for c in g.comps] for g in generators]
    worst = 0.0
    for s in traj.states:
        A = np.array([[f(s) for f in g] for g in evals]).T
        v = np.array([s[i] for i in idx_v])
        coef, *_ = np.linalg.lstsq(A, v, rcond=None)
        worst = max(worst, float(np.max(np.abs(A @ coef - v))))
    return worst
