"""YAML system descriptions: loading, validation and emission.

Layout (every expression is a string in the expression grammar)::

    chart:
      base: [x1, x2, x3]
      velocity: [y1, y2, y3]          # optional, defaults to v_<name>
    christoffel:                      # Gamma^k_ij, 1-based; omitted entries are zero
      - {k: 1, i: 1, j: 1, expr: "-1"}
    controls:                         # one component list per control field
      - ["0", "1", "0"]
    distributions:
      D3:
        generators: [["0", "0", "1"]]
        base_point: {x1: 0, x2: 0, x3: 0}    # optional
    points:
      origin: {x1: 0, x2: 0, x3: 0}
    explicit_systems:                 # first-order affine systems, e.g. quotients that are not mechanical
      planar:
        coords: [y1, y2]
        drift: ["y1^2 + y1*y2", "y1^2 - y2^2 + y1*y2"]
        inputs: [["0", "1"], ["0", "0"]]
    maps:
      tau: {source: system, target: [y1, y2], components: ["y1", "y2"]}
    scenarios:
      run:
        source: system                # or an explicit system name
        target: planar                  # explicit system name or quotient:<distribution>
        map: tau                      # optional for quotient targets
        x0: {x1: 0, x2: 0, x3: 0, y1: -1, y2: 1, y3: 0}
        control: {breakpoints: [0], values: [[1, 0]]}
        t_end: 0.5
        dt: 0.001
        tol: 1.0e-6
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import yaml

from .distribution import Distribution
from .errors import ExprError, InputError, MechquotError
from .geometry import AccsSystem, Chart, Connection, TangentSystem, VectorField
from .simulate import ControlSignal
from .symexpr import RationalExpr, parse_expr

SYSTEM = "system"


@dataclass
class MapSpec:
    source: str
    target: tuple
    components: List[RationalExpr]


@dataclass
class Scenario:
    name: str
    x0: Dict[str, float]
    control: ControlSignal
    t_end: float
    dt: float = 1e-3
    tol: float = 1e-6
    source: str = SYSTEM
    target: Optional[str] = None
    map: Optional[str] = None


@dataclass
class SystemFile:
    chart: Chart
    connection: Connection
    controls: List[VectorField]
    distributions: Dict[str, Distribution] = field(default_factory=dict)
    points: Dict[str, Dict[str, Fraction]] = field(default_factory=dict)
    explicit_systems: Dict[str, TangentSystem] = field(default_factory=dict)
    maps: Dict[str, MapSpec] = field(default_factory=dict)
    scenarios: Dict[str, Scenario] = field(default_factory=dict)
    path: Optional[str] = None

    @property
    def system(self) -> AccsSystem:
        return AccsSystem(self.chart, self.connection, list(self.controls))


def _fail(where: str, message: str):
    raise InputError(f"{where}: {message}")


def _expr(text, chart: Sequence[str], where: str) -> RationalExpr:
    try:
        return parse_expr(text if not isinstance(text, float) else repr(text), chart)
    except ExprError as exc:
        _fail(where, f"bad expression {text!r}: {exc}")


def _names(value, where: str) -> tuple:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        _fail(where, "expected a list of names")
    return tuple(value)


def _rational(value, where: str) -> Fraction:
    if isinstance(value, bool):
        _fail(where, "expected a number")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            _fail(where, "non-finite number")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            _fail(where, f"not a rational number: {value!r}")
    _fail(where, f"expected a number, got {value!r}")


def _float(value, where: str) -> float:
    return float(_rational(value, where))


def _point(value, coords: Sequence[str], where: str) -> Dict[str, Fraction]:
    if not isinstance(value, Mapping):
        _fail(where, "expected a mapping from coordinate to value")
    unknown = set(value) - set(coords)
    if unknown:
        _fail(where, f"unknown coordinates {sorted(unknown)}")
    missing = [c for c in coords if c not in value]
    if missing:
        _fail(where, f"missing coordinates {missing}")
    return {c: _rational(value[c], f"{where}.{c}") for c in coords}


def _field(value, coords: Sequence[str], where: str) -> VectorField:
    if not isinstance(value, list) or len(value) != len(coords):
        _fail(where, f"expected {len(coords)} component expressions")
    return VectorField(coords, [_expr(v, coords, f"{where}[{i}]") for i, v in enumerate(value)])


def _index(value, n: int, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or not 1 <= value <= n:
        _fail(where, f"index {value!r} out of range 1..{n}")
    return value - 1


def parse_system(doc: Mapping[str, Any], path: Optional[str] = None) -> SystemFile:
    if not isinstance(doc, Mapping):
        _fail("file", "top level must be a mapping")
    try:
        return _parse(doc, path)
    except MechquotError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc)) from exc


def _parse(doc: Mapping[str, Any], path: Optional[str]) -> SystemFile:
    chart_doc = doc.get("chart")
    if not isinstance(chart_doc, Mapping) or "base" not in chart_doc:
        _fail("chart", "missing base coordinate list")
    base = _names(chart_doc["base"], "chart.base")
    if not base:
        _fail("chart.base", "need at least one coordinate")
    velocity = _names(chart_doc["velocity"], "chart.velocity") if "velocity" in chart_doc else ()
    chart = Chart(base, velocity)
    n = chart.n

    entries = []
    for idx, e in enumerate(doc.get("christoffel") or []):
        where = f"christoffel[{idx}]"
        if not isinstance(e, Mapping) or not {"k", "i", "j", "expr"} <= set(e):
            _fail(where, "entries need k, i, j and expr")
        k = _index(e["k"], n, f"{where}.k")
        i = _index(e["i"], n, f"{where}.i")
        j = _index(e["j"], n, f"{where}.j")
        entries.append((k, i, j, _expr(e["expr"], base, f"{where}.expr")))
    connection = Connection.from_entries(chart, entries)

    controls_doc = doc.get("controls")
    if not isinstance(controls_doc, list) or not controls_doc:
        _fail("controls", "need at least one control field")
    controls = [_field(c, base, f"controls[{i}]") for i, c in enumerate(controls_doc)]

    distributions = {}
    for name, d in (doc.get("distributions") or {}).items():
        where = f"distributions.{name}"
        if not isinstance(d, Mapping) or not isinstance(d.get("generators"), list) or not d["generators"]:
            _fail(where, "needs a nonempty generators list")
        gens = [_field(g, base, f"{where}.generators[{i}]") for i, g in enumerate(d["generators"])]
        bp = _point(d["base_point"], base, f"{where}.base_point") if d.get("base_point") is not None else None
        distributions[str(name)] = Distribution(base, gens, bp)

    points = {str(name): _point(p, base, f"points.{name}") for name, p in (doc.get("points") or {}).items()}

    explicit = {}
    for name, s in (doc.get("explicit_systems") or {}).items():
        where = f"explicit_systems.{name}"
        if not isinstance(s, Mapping):
            _fail(where, "expected a mapping")
        coords = _names(s.get("coords"), f"{where}.coords")
        drift = _field(s.get("drift"), coords, f"{where}.drift")
        inputs = [_field(g, coords, f"{where}.inputs[{i}]") for i, g in enumerate(s.get("inputs") or [])]
        explicit[str(name)] = TangentSystem(coords, drift, inputs)

    def source_coords(src: str, where: str) -> tuple:
        if src == SYSTEM:
            return chart.tangent
        if src not in explicit:
            _fail(where, f"unknown source system {src!r}")
        return explicit[src].coords

    maps = {}
    for name, m in (doc.get("maps") or {}).items():
        where = f"maps.{name}"
        if not isinstance(m, Mapping):
            _fail(where, "expected a mapping")
        src = str(m.get("source", SYSTEM))
        coords = source_coords(src, f"{where}.source")
        target = _names(m.get("target"), f"{where}.target")
        comps = m.get("components")
        if not isinstance(comps, list) or len(comps) != len(target):
            _fail(where, "needs one component per target coordinate")
        maps[str(name)] = MapSpec(src, target, [_expr(c, coords, f"{where}.components[{i}]") for i, c in enumerate(comps)])

    scenarios = {}
    for name, s in (doc.get("scenarios") or {}).items():
        where = f"scenarios.{name}"
        if not isinstance(s, Mapping):
            _fail(where, "expected a mapping")
        src = str(s.get("source", SYSTEM))
        coords = source_coords(src, f"{where}.source")
        x0 = s.get("x0")
        if not isinstance(x0, Mapping):
            _fail(f"{where}.x0", "expected a mapping")
        x0f = {c: float(v) for c, v in _point(x0, coords, f"{where}.x0").items()}
        ctrl = s.get("control")
        if not isinstance(ctrl, Mapping):
            _fail(f"{where}.control", "expected breakpoints and values")
        try:
            control = ControlSignal(
                [_float(b, f"{where}.control.breakpoints") for b in ctrl.get("breakpoints", [])],
                [[_float(v, f"{where}.control.values") for v in row] for row in ctrl.get("values", [])],
            )
        except MechquotError as exc:
            _fail(f"{where}.control", str(exc))
        if "t_end" not in s:
            _fail(where, "missing t_end")
        target = s.get("target")
        if target is not None:
            target = str(target)
            if target.startswith("quotient:"):
                if target.split(":", 1)[1] not in distributions:
                    _fail(f"{where}.target", f"unknown distribution in {target!r}")
            elif target not in explicit:
                _fail(f"{where}.target", f"unknown explicit system {target!r}")
        mp = s.get("map")
        if mp is not None and str(mp) not in maps:
            _fail(f"{where}.map", f"unknown map {mp!r}")
        scenarios[str(name)] = Scenario(
            name=str(name),
            x0=x0f,
            control=control,
            t_end=_float(s["t_end"], f"{where}.t_end"),
            dt=_float(s.get("dt", 1e-3), f"{where}.dt"),
            tol=_float(s.get("tol", 1e-6), f"{where}.tol"),
            source=src,
            target=target,
            map=None if mp is None else str(mp),
        )

    return SystemFile(chart, connection, controls, distributions, points, explicit, maps, scenarios, path)


def load_system(path) -> SystemFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise InputError(f"{path}: not a valid YAML document: {exc}") from None
    return parse_system(doc, str(path))


def system_document(sys: AccsSystem, distributions: Optional[Mapping[str, Distribution]] = None) -> Dict[str, Any]:
    chart = sys.chart
    doc: Dict[str, Any] = {"chart": {"base": list(chart.base), "velocity": list(chart.velocity)}}
    doc["christoffel"] = [
        {"k": k + 1, "i": i + 1, "j": j + 1, "expr": str(e)} for k, i, j, e in sys.connection.entries()
    ]
    doc["controls"] = [[str(c) for c in g.comps] for g in sys.controls]
    if distributions:
        doc["distributions"] = {
            name: {"generators": [[str(c) for c in g.comps] for g in D.generators]}
            for name, D in distributions.items()
        }
    return doc


def emit_system(sys: AccsSystem, distributions: Optional[Mapping[str, Distribution]] = None) -> str:
    return yaml.safe_dump(system_document(sys, distributions), sort_keys=False, default_flow_style=None)
