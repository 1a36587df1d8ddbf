"""Assembling analysis results and writing them as JSON or CSV.

JSON numbers are written with 17 significant digits so that every float
survives a round trip exactly; NaN and infinities become ``null``.  Keys
keep insertion order, which the builders below fix, so a run with a given
seed always produces the same bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

from .catalog import CatalogEntry
from .core import invariants, sectional_curvature
from .errors import VanishingPick
from .expr import ConvexFunction, to_source
from .frames import theta_max
from .jets import jet4
from .pde import pde_report

__all__ = [
    "AnalysisReport", "analyze", "to_json", "dumps", "load_schema", "write_csv",
    "trajectory_rows", "geodesic_rows", "TOOL", "VERSION",
]

TOOL = "calabi"
VERSION = "0.1.0"


# -- JSON ------------------------------------------------------------------------

def _plain(obj):
    """Recursively convert numpy and dataclass values into JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _number(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    return text if any(c in text for c in ".en") else text + ".0"


def _emit(obj, out: list, indent: str, level: int) -> None:
    pad = "\n" + indent * (level + 1) if indent else ""
    end = "\n" + indent * level if indent else ""
    sep = ": " if indent else ":"
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_number(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[")
        for i, v in enumerate(obj):
            out.append(("," if i else "") + pad)
            _emit(v, out, indent, level + 1)
        out.append(end + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            out.append(("," if i else "") + pad + json.dumps(k) + sep)
            _emit(v, out, indent, level + 1)
        out.append(end + "}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Serialize with 17 significant digits per float and NaN as null."""
    out: list = []
    _emit(_plain(obj), out, " " * indent, 0)
    return "".join(out) + "\n"


def load_schema() -> dict:
    text = resources.files("calabi").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)


# -- CSV ---------------------------------------------------------------------------

def _cell(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return v


def write_csv(header: Sequence[str], rows: Iterable[Sequence], stream=None) -> str:
    """Header row, LF line endings, quoting only where needed; returns the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def trajectory_rows(traj):
    return ["t", "eta", "rho", "cbar"], list(zip(traj.t, traj.eta, traj.rho, traj.cbar))


def geodesic_rows(path):
    n = path.position.shape[1]
    header = ["s", *(f"x{i + 1}" for i in range(n)), "speed"]
    rows = [[s, *x, sp] for s, x, sp in zip(path.s, path.position, path.speed)]
    return header, rows


# -- analysis report -------------------------------------------------------------

@dataclass
class AnalysisReport:
    function: dict
    point: list
    metric: dict
    invariants: dict
    pde: list = field(default_factory=list)
    frames: dict | None = None
    expected: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "function": self.function,
            "point": self.point,
            "metric": self.metric,
            "invariants": self.invariants,
            "pde": self.pde,
            "frames": self.frames,
            "expected": self.expected,
            "provenance": self.provenance,
        }


def to_json(report: AnalysisReport) -> str:
    return dumps({"tool": TOOL, "version": VERSION, "command": "analyze",
                  "result": report.to_dict()})


def _pde_entry(f, point, a) -> dict:
    r = pde_report(f, point, a)
    return {"a": r.a, "w": r.w, "residual_12": r.residual_12,
            "normalized_residual": r.normalized_residual, "residual_11": r.residual_11,
            "implied_Lsharp": r.implied_Lsharp}


def analyze(f: ConvexFunction | CatalogEntry, point: Sequence[float], exponents=(),
            seed: int = 42, restarts: int = 16, sectional_samples: int = 3) -> AnalysisReport:
    """Metric, curvature, cubic-form and PDE summary of ``f`` at ``point``."""
    entry = f if isinstance(f, CatalogEntry) else None
    cf = entry.function if entry is not None else f
    cf.require_inside(point)
    point = [float(p) for p in point]
    jet = jet4(cf.body, point)
    m, c, cd = invariants(jet)
    eig = np.linalg.eigvalsh(m.G)

    rng = np.random.default_rng(seed)
    sections = []
    if cf.dim >= 2:
        for _ in range(sectional_samples):
            u, v = rng.standard_normal((2, cf.dim))
            sections.append({"u": u, "v": v, "K": sectional_curvature(cd, m, u, v)})

    try:
        ej = theta_max(cf, point, restarts=restarts, seed=seed)
        frames = {"theta": ej.theta, "maximizer": ej.maximizer, "lambda1": ej.lambda1,
                  "spectrum": ej.spectrum, "maximizer_spectrum": ej.maximizer_spectrum,
                  "iterations": ej.iterations}
    except VanishingPick:
        frames = None

    expected = []
    if entry is not None:
        for key, e in entry.expected.items():
            expected.append({"quantity": key, "value": e.value, "basis": e.basis,
                             "note": e.note})

    return AnalysisReport(
        function={"name": entry.name if entry else cf.name, "source": cf.source,
                  "n": cf.dim, "domain": [f"{to_source(h)} > 0" for h in cf.domain.constraints]},
        point=point,
        metric={"detD": m.detD, "eig_min": eig[0], "eig_max": eig[-1]},
        invariants={"Tnorm2": c.Tnorm2, "pickJ": c.pickJ,
                    "scalar_contracted": cd.scalar_contracted, "scalar_JT": cd.scalar_JT,
                    "sectional": sections},
        pde=[_pde_entry(cf, point, a) for a in exponents],
        frames=frames,
        expected=expected,
        provenance={"tool": TOOL, "version": VERSION, "seed": seed, "restarts": restarts},
    )
