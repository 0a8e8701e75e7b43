"""Scenario files and the built-in catalog.

A scenario is an INI document::

    [scenario]
    name = exp-lagrange
    h_coords = x1, x2
    v_coords = y3, y4
    points = 50
    seed = 7
    lambda = 0
    newton_g = 1
    vacuum = false          ; assert the vacuum Einstein equations
    constcoeff = false      ; constant d-metric with N linear in y

    [source]
    type = generating_function   ; or metric_blocks, coordinate_metric
    L = exp(x1)*(y3^2 + y4^2)
    ; metric_blocks:     g_11, g_12, ..., h_11, ..., N_11 (N^a_i, a then i)
    ; coordinate_metric: G_11, G_12, ...
    ; indices are 1-based positions inside the block; missing entries are 0

    [domain]
    x1 = -1, 1                   ; one interval per coordinate

    [stress]                     ; optional symmetric T_ab in the natural frame
    T_11 = 0

    [tolerances]                 ; optional per-check overrides
    deflc = 1e-9
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import AkgravError, ScenarioError
from .expr import Chart, parse

SOURCES = ("generating_function", "metric_blocks", "coordinate_metric")
_ENTRY = re.compile(r"([A-Za-z]+)_(\d)(\d)\Z")


@dataclass
class Scenario:
    name: str
    chart: Chart
    source: str
    L: object = None
    g: list = None
    h: list = None
    N: list = None
    G: list = None
    lam: float = 0.0
    newton_g: float = 1.0
    stress: list = None
    box: list = field(default_factory=list)
    num_points: int = 50
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    vacuum: bool = False
    constcoeff: bool = False
    text: str = ""


def _matrix(entries, prefix, rows, cols, chart, symmetric):
    from .expr import ZERO

    M = [[ZERO for _ in range(cols)] for _ in range(rows)]
    seen = set()
    for key, src in entries.items():
        mt = _ENTRY.match(key)
        if not mt or mt.group(1) != prefix:
            continue
        i, j = int(mt.group(2)) - 1, int(mt.group(3)) - 1
        if not (0 <= i < rows and 0 <= j < cols):
            raise ScenarioError(f"entry {key} outside the {rows}x{cols} block")
        e = parse(src, chart)
        if symmetric and (j, i) in seen and M[j][i] is not e:
            raise ScenarioError(f"{key} conflicts with its symmetric partner")
        M[i][j] = e
        if symmetric:
            M[j][i] = e
        seen.add((i, j))
    return M


def _names(value):
    return tuple(s.strip() for s in value.split(",") if s.strip())


def _parse_bool(value):
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ScenarioError(f"not a boolean: {value!r}")


def parse_scenario(text, origin="<string>"):
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text, source=origin)
    except configparser.Error as exc:
        raise ScenarioError(f"{origin}: {exc}") from exc
    try:
        return _build(cp, text, origin)
    except ScenarioError:
        raise
    except (AkgravError, ValueError, KeyError) as exc:
        raise ScenarioError(f"{origin}: {exc}") from exc


def _build(cp, text, origin):
    for section in ("scenario", "source", "domain"):
        if not cp.has_section(section):
            raise ScenarioError(f"{origin}: missing [{section}] section")
    sc = cp["scenario"]
    chart = Chart(_names(sc.get("h_coords", "x1, x2")), _names(sc.get("v_coords", "y3, y4")))
    src = dict(cp["source"])
    kind = src.pop("type", "").strip()
    if kind not in SOURCES:
        raise ScenarioError(f"{origin}: source type must be one of {SOURCES}, got {kind!r}")
    out = Scenario(name=sc.get("name", Path(origin).stem), chart=chart, source=kind, text=text)
    n, m, dim = chart.n, chart.m, chart.dim
    if kind == "generating_function":
        if "L" not in src:
            raise ScenarioError(f"{origin}: generating_function source needs L")
        if n != m:
            raise ScenarioError(f"{origin}: a generating function needs as many h- as v-coordinates")
        out.L = parse(src["L"], chart)
    elif kind == "metric_blocks":
        out.g = _matrix(src, "g", n, n, chart, True)
        out.h = _matrix(src, "h", m, m, chart, True)
        out.N = _matrix(src, "N", m, n, chart, False)
    else:
        out.G = _matrix(src, "G", dim, dim, chart, True)
    dom = cp["domain"]
    box = []
    for name in chart.names:
        if name not in dom:
            raise ScenarioError(f"{origin}: no sample interval for {name}")
        parts = [p.strip() for p in dom[name].split(",")]
        if len(parts) != 2:
            raise ScenarioError(f"{origin}: interval for {name} must be 'lo, hi'")
        lo, hi = float(parts[0]), float(parts[1])
        if not lo <= hi:
            raise ScenarioError(f"{origin}: empty interval for {name}")
        box.append((lo, hi))
    out.box = box
    out.num_points = sc.getint("points", 50)
    if out.num_points < 1:
        raise ScenarioError(f"{origin}: points must be >= 1")
    out.seed = sc.getint("seed", 0)
    out.lam = sc.getfloat("lambda", 0.0)
    out.newton_g = sc.getfloat("newton_g", 1.0)
    out.vacuum = _parse_bool(sc.get("vacuum", "false"))
    out.constcoeff = _parse_bool(sc.get("constcoeff", "false"))
    if cp.has_section("stress"):
        out.stress = _matrix(dict(cp["stress"]), "T", dim, dim, chart, True)
    if cp.has_section("tolerances"):
        out.tolerances = {k: float(v) for k, v in cp["tolerances"].items()}
    return out


CATALOG = {
    "euclidean": """
[scenario]
name = euclidean
points = 50
seed = 11
vacuum = true
[source]
type = generating_function
L = y3^2 + y4^2
[domain]
x1 = -1, 1
x2 = -1, 1
y3 = -1.5, 1.5
y4 = -1.5, 1.5
""",
    "exp-lagrange": """
[scenario]
name = exp-lagrange
points = 50
seed = 12
[source]
type = generating_function
L = exp(x1)*(y3^2 + y4^2)
[domain]
x1 = -1, 1
x2 = -1, 1
y3 = -1.5, 1.5
y4 = -1.5, 1.5
""",
    "schwarzschild": """
[scenario]
name = schwarzschild
h_coords = t, r
v_coords = th, ph
points = 50
seed = 13
vacuum = true
; mass M = 1, sampled over r in [3M, 10M]
[source]
type = metric_blocks
g_11 = -(1 - 2/r)
g_22 = (1 - 2/r)^-1
h_11 = r^2
h_22 = r^2*sin(th)^2
[domain]
t = 0, 1
r = 3, 10
th = 0.3, 2.8
ph = 0, 6.2
""",
    "sphere-v": """
[scenario]
name = sphere-v
points = 50
seed = 14
; round 2-sphere of radius r0 = 2 in the v-block, flat h-block
[source]
type = metric_blocks
g_11 = 1
g_22 = 1
h_11 = 4
h_22 = 4*sin(y3)^2
[domain]
x1 = -1, 1
x2 = -1, 1
y3 = 0.3, 2.8
y4 = 0, 6.2
""",
    "constcoeff-linear": """
[scenario]
name = constcoeff-linear
points = 50
seed = 15
constcoeff = true
; constant blocks, N^a_i linear in y
[source]
type = metric_blocks
g_11 = 1
g_22 = 1
h_11 = 1
h_22 = 2
N_11 = y4
N_12 = 0.5*y3
N_21 = -y3
N_22 = 0.3*y4
[domain]
x1 = -1, 1
x2 = -1, 1
y3 = -1.5, 1.5
y4 = -1.5, 1.5
""",
}


def catalog_names():
    return list(CATALOG)


def load_scenario(ref):
    """``catalog:NAME`` or a path to a scenario file."""
    if ref.startswith("catalog:"):
        name = ref.split(":", 1)[1]
        if name not in CATALOG:
            raise ScenarioError(f"unknown catalog scenario {name!r}; known: {', '.join(CATALOG)}")
        return parse_scenario(CATALOG[name], f"catalog:{name}")
    path = Path(ref)
    if not path.is_file():
        raise ScenarioError(f"no such scenario file: {ref}")
    return parse_scenario(path.read_text(), str(path))
