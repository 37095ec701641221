"""Deterministic CSV, JSON and SVG writers."""
from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

SIG = 9


def fmt(x) -> str:
    """Fixed 9-significant-digit text for floats; exact text otherwise."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer, Fraction, str)):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    return "%.*g" % (SIG, x)


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        items = sorted(obj) if isinstance(obj, set) else obj
        return [jsonable(v) for v in items]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return fmt(x)
        return float(fmt(x))
    return obj


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def svg_text(polylines, points=(), size: int = 800, margin: float = 0.1) -> str:
    """Polylines (list of (points, closed, color)) and dots, auto-fitted."""
    allp = [np.asarray(p, dtype=float) for pl, _, _ in polylines for p in pl]
    allp += [np.asarray(p, dtype=float) for p, _ in points]
    allp = [p for p in allp if np.all(np.isfinite(p))]
    if allp:
        P = np.array(allp)
        lo, hi = P.min(axis=0), P.max(axis=0)
    else:
        lo, hi = np.zeros(2), np.ones(2)
    span = max(hi[0] - lo[0], hi[1] - lo[1], 1e-12)
    scale = size * (1 - 2 * margin) / span
    mid = (lo + hi) / 2

    def tx(p):
        return (size / 2 + scale * (p[0] - mid[0]), size / 2 - scale * (p[1] - mid[1]))

    out = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" viewBox="0 0 %d %d">'
           % (size, size, size, size),
           '<rect width="100%" height="100%" fill="white"/>']
    for pts, closed, color in polylines:
        coords = " ".join("%s,%s" % tuple(fmt(c) for c in tx(p)) for p in pts
                          if np.all(np.isfinite(p)))
        tag = "polygon" if closed else "polyline"
        out.append('<%s points="%s" fill="none" stroke="%s" stroke-width="1"/>' % (tag, coords, color))
    for p, color in points:
        if np.all(np.isfinite(p)):
            x, y = tx(p)
            out.append('<circle cx="%s" cy="%s" r="2" fill="%s"/>' % (fmt(x), fmt(y), color))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def ellipse_points(a: float, b: float, count: int = 240) -> list:
    t = np.linspace(0, 2 * math.pi, count, endpoint=False)
    return list(np.column_stack([math.sqrt(a) * np.cos(t), math.sqrt(b) * np.sin(t)]))


def write_text(directory, name: str, text: str) -> Path:
    path = Path(directory) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
