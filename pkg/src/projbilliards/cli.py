"""Command-line front end.

Every command prints a JSON summary to stdout and, when an output directory
is known (``--out`` or the PROJBILLIARDS_OUT environment variable), writes
its CSV/JSON/SVG files there.  Exit codes: 0 success, 1 property violation,
2 input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import analysis, caustics, polyref
from .errors import (BilliardError, DegenerateInputError, GeometryError, NumericalError,
                     StepBudgetError, TransversalityError)
from .output import csv_text, dumps, ellipse_points, svg_text, write_text
from .projcore import Quadric
from .reflect import (CentralFrame, FramedBoundary, MetricFrame, PseudoMetric, QuadricFrame,
                      QuadricSurface, Segment, ellipse, ellipsoid, iterate_orbit, slope_azimuth)

OUT_ENV = "PROJBILLIARDS_OUT"
EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(Exception):
    pass


class Violation(Exception):
    def __init__(self, message, summary=None):
        super().__init__(message)
        self.summary = summary


# --- parsing helpers -------------------------------------------------------------

_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


def parse_rational(text: str) -> Fraction:
    text = str(text).strip()
    if _RATIONAL.match(text):
        return Fraction(text)
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError("not a rational number: %r" % text)
    warnings.warn("decimal input %r converted to %s; write p/q to keep exactness" % (text, value))
    return value


def parse_floats(text: str, count: int | None = None) -> list[float]:
    # coordinates are floating point anyway, so decimals pass silently here
    try:
        vals = [float(Fraction(t.strip())) for t in str(text).replace(";", ",").split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise InputError("expected comma-separated numbers, got %r" % text)
    if count is not None and len(vals) != count:
        raise InputError("expected %d numbers, got %r" % (count, text))
    return vals


def parse_frame(text: str, d: int):
    """Frame rule from 'euclidean', 'pseudo(k,l)', 'central(...)' or 'quadric(...)'."""
    m = re.fullmatch(r"\s*(\w+)\s*(?:\((.*)\))?\s*", str(text))
    if not m:
        raise InputError("bad frame spec %r" % text)
    name, args = m.group(1), m.group(2)
    if name == "euclidean":
        return MetricFrame(PseudoMetric(d, 0))
    if name == "pseudo":
        k, l = (int(x) for x in parse_floats(args, 2))
        if k + l != d:
            raise InputError("signature %d,%d does not match dimension %d" % (k, l, d))
        return MetricFrame(PseudoMetric(k, l))
    if name in ("central", "vertex"):
        c = parse_floats(args)
        if len(c) == d:
            c = c + [1.0]
        if len(c) != d + 1:
            raise InputError("central frame needs %d or %d coordinates" % (d, d + 1))
        return CentralFrame(c)
    if name == "quadric":
        v = parse_floats(args)
        if len(v) == d:
            M = np.diag([1 / x for x in v] + [-1.0])
        elif len(v) == (d + 1) ** 2:
            M = np.array(v).reshape(d + 1, d + 1)
        else:
            raise InputError("quadric frame needs %d semi-axis squares or a %dx%d matrix" % (d, d + 1, d + 1))
        return ("quadric", Quadric(M))
    raise InputError("unknown frame %r" % name)


# --- configuration -------------------------------------------------------------

def out_dir(args) -> Path | None:
    d = args.out or os.environ.get(OUT_ENV)
    return Path(d) if d else None


def formats(args) -> set[str]:
    f = {x.strip() for x in args.format.split(",") if x.strip()}
    bad = f - {"csv", "json", "svg"}
    if bad:
        raise InputError("unknown output format(s): %s" % ", ".join(sorted(bad)))
    return f


def emit(args, stem: str, summary: dict, csv_parts=None, svg=None):
    d = out_dir(args)
    if d is not None:
        fm = formats(args)
        if "json" in fm:
            write_text(d, stem + ".json", dumps(summary))
        if "csv" in fm and csv_parts is not None:
            write_text(d, stem + ".csv", csv_text(*csv_parts))
        if "svg" in fm and svg is not None:
            write_text(d, stem + ".svg", svg)
    sys.stdout.write(dumps(summary))


# --- caustics -----------------------------------------------------------------

def cmd_caustics(args) -> int:
    n = args.n
    if n < 3:
        raise InputError("n must be at least 3")
    a, b = parse_rational(args.a), parse_rational(args.b)
    if a * b == 0:
        raise InputError("a and b must be nonzero")
    rep = caustics.n_caustics(n, a, b, check_poncelet=args.check_poncelet,
                              starts=args.starts, seed=args.seed)
    roots = []
    rows = []
    for r in rep.roots:
        entry = {"re": r.value.real, "im": r.value.imag, "multiplicity": r.multiplicity, "class": r.cls}
        if r.poncelet is not None:
            entry["poncelet"] = {"closes": r.poncelet["closes"], "max_residual": r.poncelet["max_residual"]}
        roots.append(entry)
        rows.append([n, a, b, rep.degree, r.value.real, r.value.imag, r.multiplicity, r.cls])
    summary = {"command": "caustics", "n": n, "a": a, "b": b, "degree": rep.degree,
               "expected_degree": caustics.expected_degree(n, a == b),
               "polynomial": str(rep.polynomial), "roots": roots}
    problems = []
    if args.check_poncelet:
        bad = [e for e in roots if "poncelet" in e and not e["poncelet"]["closes"]]
        if bad:
            problems.append("Poncelet closure failed for %d root(s)" % len(bad))
    if args.closed_form:
        if n == 3:
            vals = list(caustics.three_caustics_closed_form(a, b))
        elif n == 4:
            vals = list(caustics.four_caustics_closed_form(a, b))
        else:
            raise InputError("--closed-form is available for n = 3 and n = 4 only")
        computed = [r.value for r in rep.roots]
        res = max(min(abs(complex(float(v)) - z) for z in computed) / max(1.0, abs(float(v))) for v in vals)
        summary["closed_form"] = {"values": vals, "match_residual": res}
        if res > 1e-12:
            problems.append("closed form differs from computed roots (%.3g)" % res)
    header = ["n", "a", "b", "degree", "root_re", "root_im", "multiplicity", "class"]
    summary["status"] = "violation" if problems else "ok"
    emit(args, "caustics_n%d" % n, summary, (header, rows))
    if problems:
        raise Violation("; ".join(problems))
    return EXIT_OK


# --- orbit ----------------------------------------------------------------------

def load_scene(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError("cannot read scene %s: %s" % (path, exc.strerror))
    try:
        scene = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("malformed scene JSON at line %d, column %d: %s" % (exc.lineno, exc.colno, exc.msg))
    if not isinstance(scene, dict) or not ("boundary" in scene or "boundaries" in scene):
        raise InputError("scene must be an object with a 'boundary' or 'boundaries' entry")
    return scene


def _boundary_list(items):
    """Scenes given as a list of {kind, params, frame} pieces."""
    bs, dims, info = [], set(), {"type": "boundaries"}
    for j, it in enumerate(items):
        kind, params, frame = it.get("kind"), it.get("params"), it.get("frame", "euclidean")
        if kind == "ellipse":
            a, b = (float(params["a"]), float(params["b"])) if isinstance(params, dict) else map(float, params)
            surf = ellipse(a, b)
            if len(items) == 1:
                info.update(type="ellipse", a=a, b=b, frame=frame)
        elif kind == "quadric":
            surf = QuadricSurface(Quadric(np.array(params, dtype=float)))
        elif kind == "polygon-edge":
            P, Q = (np.array(x, dtype=float) for x in params)
            surf = Segment(P, Q)
            info.setdefault("vertices", []).append(P)
        else:
            raise InputError("boundary %d: unknown kind %r" % (j, kind))
        dims.add(surf.dim)
        fr = parse_frame(frame, surf.dim)
        if isinstance(fr, tuple):
            if not isinstance(surf, QuadricSurface):
                raise InputError("boundary %d: quadric frames need a quadric boundary" % j)
            fr = QuadricFrame(surf.Q, fr[1])
        bs.append(FramedBoundary(surf, fr))
    if len(dims) != 1:
        raise InputError("all boundaries must live in one dimension")
    if "vertices" in info:
        info["vertices"] = np.array(info["vertices"])
    return bs, dims.pop(), info


def build_scene(scene: dict):
    """(boundaries, dimension, info) for a scene dictionary."""
    if "boundaries" in scene:
        try:
            return _boundary_list(scene["boundaries"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError("bad boundary description: %s" % exc)
    bd = scene["boundary"]
    kind = bd.get("type")
    info = {"type": kind}
    frame_spec = scene.get("frame", "euclidean")
    try:
        if kind in ("ellipse", "ellipsoid", "conic"):
            if kind == "ellipse":
                a, b = float(bd["a"]), float(bd["b"])
                surf, d = ellipse(a, b), 2
                info.update(a=a, b=b)
            elif kind == "ellipsoid":
                axes = [float(x) for x in bd["axes"]]
                surf, d = ellipsoid(axes), len(axes)
            else:
                surf, d = QuadricSurface(Quadric(np.array(bd["matrix"], dtype=float))), 2
            fr = parse_frame(frame_spec, d)
            if isinstance(fr, tuple):
                fr = QuadricFrame(surf.Q, fr[1])
            info["frame"] = frame_spec
            return [FramedBoundary(surf, fr)], d, info
        if kind == "right-spherical":
            B = polyref.right_spherical(*bd["vertices"])
        elif kind == "centrally-projective":
            B = polyref.centrally_projective(bd["center"], *bd["vertices"])
        elif kind == "polygon":
            V = np.array(bd["vertices"], dtype=float)
            frames = scene.get("frames", frame_spec)
            if isinstance(frames, str):
                frames = [frames] * len(V)
            bs = []
            for j in range(len(V)):
                fr = parse_frame(frames[j], 2)
                if isinstance(fr, tuple):
                    raise InputError("quadric frames need a conic boundary")
                bs.append(FramedBoundary(Segment(V[j], V[(j + 1) % len(V)]), fr))
            info["vertices"] = V
            return bs, 2, info
        else:
            raise InputError("unknown boundary type %r" % kind)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (InputError, GeometryError)):
            raise
        raise InputError("bad boundary description: %s" % exc)
    info["vertices"] = B.vertices
    return B.framed_boundaries(), 2, info


def _point_residual(fb: FramedBoundary, x) -> float:
    s = fb.surface
    if isinstance(s, QuadricSurface):
        return abs(s.residual(x))
    if isinstance(s, Segment):
        c = s.covector
        return abs(c @ np.append(x, 1.0)) / np.linalg.norm(c[:2])
    return 0.0


def _start_index(bs, p2) -> int:
    if len(bs) == 1:
        return 0
    best = min(range(len(bs)), key=lambda j: _point_residual(bs[j], p2))
    if _point_residual(bs[best], p2) > 1e-9:
        raise InputError("second start point is not on any edge")
    return best


def _slope(p, v):
    z = slope_azimuth(p, v)
    # vertical lines may come back as a huge finite slope after rounding
    return math.inf if abs(z) > 1e12 else z


def cmd_orbit(args) -> int:
    scene = load_scene(args.scene)
    bs, d, info = build_scene(scene)
    start = args.start or scene.get("start")
    if start is None:
        raise InputError("no start given (use --start or a 'start' entry)")
    if isinstance(start, str):
        parts = start.split(";")
        if len(parts) != 2:
            raise InputError("--start needs two points 'x,y;x,y'")
        start = [parse_floats(p, d) for p in parts]
    try:
        p1, p2 = (np.array(p, dtype=float) for p in start)
    except (TypeError, ValueError):
        raise InputError("start must be two points")
    if p1.shape != (d,) or p2.shape != (d,):
        raise InputError("start points must have %d coordinates" % d)
    index = _start_index(bs, p2)
    for p, fb in ((p2, bs[index]),) + (((p1, bs[0]),) if len(bs) == 1 else ()):
        if _point_residual(fb, p) > 1e-8:
            raise InputError("start point %s is not on the boundary" % p.tolist())
    steps = args.steps
    if steps < 1:
        raise InputError("--steps must be positive")
    try:
        orbit = iterate_orbit(bs, p1, p2, steps, tol=args.tol, index=index)
    except (TransversalityError, GeometryError) as exc:
        raise NumericalError("orbit broke down: %s" % exc)
    conic = info.get("type") == "ellipse" and str(info.get("frame", "")).strip() == "euclidean"
    header = ["step"] + ["x", "y", "z", "w"][:d] + ["incoming_azimuth", "outgoing_azimuth", "residual"]
    if conic:
        header.append("joachimsthal")
    rows, jvals = [], []
    for k, v in enumerate(orbit.vertices):
        fb = bs[(index + k) % len(bs)]
        row = [k + 1] + list(v.point)
        if d == 2:
            row += [_slope(v.point, v.incoming), _slope(v.point, v.outgoing)]
        else:
            row += [None, None]
        row.append(_point_residual(fb, v.point))
        if conic:
            jv = caustics.joachimsthal(v.point, v.outgoing, info["a"], info["b"])
            jvals.append(jv)
            row.append(jv)
        rows.append(row)
    summary = {"command": "orbit", "scene": info["type"], "steps": steps,
               "periodic": orbit.periodic, "period": orbit.period,
               "closure_residual": orbit.closure_residual if orbit.periodic else None,
               "max_point_residual": max(r[d + 3] for r in rows)}
    problems = []
    if conic:
        drift = max(abs(j - jvals[0]) for j in jvals) / max(1.0, abs(jvals[0]))
        summary["joachimsthal"] = jvals[0]
        summary["joachimsthal_drift"] = drift
        if drift > 1e-10:
            problems.append("Joachimsthal drift %.3g" % drift)
    svg = None
    if d == 2:
        lines = [([p for p in orbit.points], False, "#c03030")]
        if "a" in info:
            lines.insert(0, (ellipse_points(info["a"], info["b"]), True, "black"))
        elif "vertices" in info:
            lines.insert(0, (list(info["vertices"]), True, "black"))
        svg = svg_text(lines)
    summary["status"] = "violation" if problems else "ok"
    emit(args, "orbit", summary, (header, rows), svg)
    if problems:
        raise Violation("; ".join(problems))
    return EXIT_OK


# --- polygon --------------------------------------------------------------------

QUADRILATERAL = [(0.0, 0.0), (2.0, 0.0), (2.5, 1.5), (0.5, 2.0)]
ODD_CENTER = (0.13, -0.07)


def polygon_fixture(kind: str, m: int | None, n: int | None):
    if kind == "right-spherical":
        return polyref.right_spherical((0.0, 0.0), (1.0, 0.0), (0.0, 1.0)), 3
    if kind == "cp-quadrilateral":
        return polyref.diagonal_quadrilateral(*QUADRILATERAL), 4
    if kind == "cp-regular-2m":
        if m is None or m < 2:
            raise InputError("cp-regular-2m needs --m >= 2")
        return polyref.regular_polygon(2 * m), 2 * m
    if kind == "cp-odd-n":
        if n is None or n < 3 or n % 2 == 0:
            raise InputError("cp-odd-n needs an odd --n >= 3")
        reg = polyref.regular_polygon(n)
        return polyref.centrally_projective(ODD_CENTER, *reg.vertices), 2 * n
    raise InputError("unknown polygon kind %r" % kind)


def cmd_polygon(args) -> int:
    B, k = polygon_fixture(args.kind, args.m, args.n)
    if args.samples < 1:
        raise InputError("--samples must be positive")
    rep = polyref.reflectivity_sweep(B, k, args.samples, seed=args.seed, tol=args.tol)
    summary = {"command": "polygon", "kind": args.kind, "vertices": B.n, "k": k,
               "samples": rep.samples, "closed": rep.closed, "max_residual": rep.max_residual,
               "early_resampled": rep.resampled}
    rng = np.random.default_rng(args.seed)
    orb = polyref.virtual_orbit(B, *polyref.sample_start(B, rng), 2 * k + 2, args.tol)
    # virtual orbits may leave the polygon; points near the line at infinity are dropped
    path = [p[:2] / p[2] for p in orb.points[:k + 1] if abs(p[2]) > 1e-9 * np.linalg.norm(p)]
    svg = svg_text([(list(B.vertices), True, "black"), (path, False, "#3060c0")])
    if B.center is not None:
        try:
            dual = polyref.dual_conjugate(B, orb)
            summary["dual"] = {"midpoint_residual": dual.midpoint_residual,
                               "lemma_residual": dual.lemma_residual, "period": dual.period}
        except DegenerateInputError as exc:
            summary["dual"] = {"skipped": str(exc)}
    problems = []
    if not rep.ok:
        problems.append("%d of %d samples failed to close at k=%d" % (rep.samples - rep.closed, rep.samples, k))
    if "lemma_residual" in summary.get("dual", {}) and summary["dual"]["lemma_residual"] > 1e-10:
        problems.append("dual identity residual %.3g" % summary["dual"]["lemma_residual"])
    header = ["kind", "vertices", "k", "samples", "closed", "max_residual", "early_resampled"]
    row = [args.kind, B.n, k, rep.samples, rep.closed, rep.max_residual, rep.resampled]
    summary["status"] = "violation" if problems else "ok"
    emit(args, "polygon_%s" % args.kind, summary, (header, [row]), svg)
    if problems:
        raise Violation("; ".join(problems))
    return EXIT_OK


# --- analysis commands ----------------------------------------------------------

def cmd_circumcenters(args) -> int:
    a, b = float(parse_rational(args.a)), float(parse_rational(args.b))
    if a <= 0 or b <= 0:
        raise InputError("need a, b > 0")
    if args.N < 20:
        raise InputError("-N must be at least 20")
    fit = analysis.circumcenter_locus(a, b, args.N)
    sym = analysis.mirror_hausdorff(fit.points)
    summary = {"command": "circumcenters", "a": a, "b": b, "N": args.N, "class": fit.cls,
               "residual": fit.residual, "coefficients": fit.coefficients, "mirror_distance": sym}
    problems = []
    if a == b:
        if fit.cls != "degenerate":
            problems.append("circle locus should be a single point")
    else:
        if fit.cls != "ellipse":
            problems.append("locus classified as %s" % fit.cls)
        if fit.residual >= 1e-8:
            problems.append("fit residual %.3g" % fit.residual)
        if sym >= 1e-8:
            problems.append("locus not symmetric (%.3g)" % sym)
    rows = [[i, p[0], p[1]] for i, p in enumerate(fit.points)]
    svg = svg_text([(ellipse_points(a, b), True, "black")], [(p, "#c03030") for p in fit.points])
    summary["status"] = "violation" if problems else "ok"
    emit(args, "circumcenters", summary, (["orbit", "x", "y"], rows), svg)
    if problems:
        raise Violation("; ".join(problems))
    return EXIT_OK


def _default_start(axes):
    d = len(axes)
    s = np.array([math.cos(0.3), math.sin(0.3), 0.4, 0.2][:d])
    s = s / np.linalg.norm(s)
    return s * np.sqrt(axes)


def cmd_chasles(args) -> int:
    if args.axes:
        axes = np.array(parse_floats(args.axes))
    else:
        axes = np.array([float(parse_rational(args.a)), float(parse_rational(args.b))])
    if np.any(axes <= 0):
        raise InputError("semi-axis squares must be positive")
    d = len(axes)
    if args.signature:
        k, l = (int(x) for x in parse_floats(args.signature, 2))
        if k + l != d:
            raise InputError("signature does not match dimension %d" % d)
    else:
        k = d
    p1 = np.array(parse_floats(args.start, d)) if args.start else _default_start(axes)
    if abs(np.sum(p1 ** 2 / axes) - 1) > 1e-8:
        raise InputError("start point is not on the boundary")
    v = np.array(parse_floats(args.direction, d)) if args.direction else np.array([-1.0, 0.3, -0.5, 0.1][:d])
    metric = PseudoMetric(k, d - k)
    if analysis.is_light_like(metric, v):
        raise InputError("start direction is light-like")
    try:
        p2 = ellipsoid(axes).intersect(p1, v)
        rep = analysis.chasles_invariance(axes, k, p1, p2, args.bounces)
    except (GeometryError, TransversalityError) as exc:
        raise NumericalError(str(exc))
    summary = {"command": "chasles", "axes": axes, "signature": [k, d - k], "bounces": args.bounces,
               "parameters": rep.parameters[0] if rep.parameters else [], "max_drift": rep.max_drift,
               "orthogonality": rep.orthogonality, "counts": rep.counts}
    problems = []
    if rep.max_drift >= 1e-8:
        problems.append("drift %.3g" % rep.max_drift)
    if rep.orthogonality >= 1e-8:
        problems.append("orthogonality defect %.3g" % rep.orthogonality)
    if rep.counts != {d - 1}:
        problems.append("tangency counts %s, expected %d" % (sorted(rep.counts), d - 1))
    header = ["chord"] + ["lambda_%d" % (i + 1) for i in range(d - 1)]
    rows = [[i] + (list(p) + [None] * (d - 1 - len(p)))[: d - 1] for i, p in enumerate(rep.parameters)]
    summary["status"] = "violation" if problems else "ok"
    emit(args, "chasles", summary, (header, rows))
    if problems:
        raise Violation("; ".join(problems))
    return EXIT_OK


def permitted_sample(axes, rng):
    """Random base point, inward line direction and jet on an ellipsoid."""
    d = len(axes)
    x = rng.standard_normal(d)
    x = x / math.sqrt(np.sum(x * x / axes))
    jet = analysis.ellipsoid_jet(axes, x)
    e = rng.standard_normal(d)
    if e @ jet.n > 0:
        e = -e
    return x, e, jet


def _sign_fix(v):
    v = np.asarray(v, dtype=float)
    return v if v[np.argmax(np.abs(v))] > 0 else -v


def cmd_permitted(args) -> int:
    axes = np.array(parse_floats(args.ellipsoid))
    if np.any(axes <= 0):
        raise InputError("semi-axis squares must be positive")
    d = len(axes)
    if d < 2:
        raise InputError("need at least two axes")
    sphere = bool(np.all(axes == axes[0]))
    rng = np.random.default_rng(args.seed)
    rows, counts = [], {}
    exceptional = 0
    problems = []
    worst_match = 0.0
    for s in range(args.samples):
        x, e, jet = permitted_sample(axes, rng)
        xi, ratio = analysis.decompose_direction(jet, e)
        rep = analysis.permitted_hyperplanes(jet, xi, ratio, seed=args.seed + s)
        if rep.exceptional:
            exceptional += 1
            continue
        counts[rep.count] = counts.get(rep.count, 0) + 1
        match = None
        if sphere:
            if rep.count != 1 or min(1 - abs(rep.hyperplanes[0] @ rep.xi / np.linalg.norm(rep.xi)), 1.0) > 1e-12:
                problems.append("sample %d: sphere should admit only the hyperplane normal to xi" % s)
        else:
            _, proj, _ = analysis.chasles_hyperplanes(axes, x, e)
            match = analysis.match_hyperplanes(rep.hyperplanes, proj)
            worst_match = max(worst_match, match)
            if rep.count != d - 1:
                problems.append("sample %d: %d permitted hyperplanes" % (s, rep.count))
        if rep.count > d - 1:
            problems.append("sample %d: count above d-1" % s)
        etas = [_sign_fix(h) for h in rep.hyperplanes]
        flat = [c for h in etas for c in h] + [None] * (d * (d - 1 - len(etas)))
        rows.append([s] + list(x) + list(rep.xi / np.linalg.norm(rep.xi)) + [ratio, rep.count] + flat + [match])
    if worst_match >= 1e-8:
        problems.append("cross-validation mismatch %.3g" % worst_match)
    names = "xyzw"[:d] if d <= 4 else [str(i) for i in range(d)]
    header = (["sample"] + ["b_%s" % c for c in names] + ["xi_%s" % c for c in names] + ["ratio", "count"]
              + ["eta%d_%s" % (i + 1, c) for i in range(d - 1) for c in names] + ["crossval"])
    summary = {"command": "permitted", "axes": axes, "samples": args.samples, "counts": counts,
               "exceptional": exceptional, "max_crossval": None if sphere else worst_match,
               "status": "violation" if problems else "ok"}
    if problems:
        summary["problems"] = problems[:10]
    emit(args, "permitted", summary, (header, rows))
    if problems:
        raise Violation("; ".join(problems[:3]))
    return EXIT_OK


def cmd_simple_roots(args) -> int:
    """Experiment: are the caustic polynomials squarefree at random rational (a, b)?"""
    rng = np.random.default_rng(args.seed)
    rows = []
    for n in range(3, args.n_max + 1):
        for _ in range(args.samples):
            a = Fraction(int(rng.integers(1, 40)), int(rng.integers(1, 40)))
            b = Fraction(int(rng.integers(1, 40)), int(rng.integers(1, 40)))
            if a == b:
                continue
            poly = caustics.normalized_caustic_polynomial(n, a, b)
            g = poly.gcd(poly.derivative())
            rows.append([n, a, b, poly.degree, g.degree == 0, poly(a) != 0 and poly(b) != 0])
    summary = {"command": "simple-roots", "n_max": args.n_max, "cases": len(rows),
               "squarefree": sum(1 for r in rows if r[4]),
               "a_b_not_roots": sum(1 for r in rows if r[5]), "status": "ok"}
    emit(args, "simple_roots", summary, (["n", "a", "b", "degree", "squarefree", "a_b_not_roots"], rows))
    return EXIT_OK


# --- entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (default: $%s; none means stdout only)" % OUT_ENV)
    common.add_argument("--format", default="csv,json,svg", help="comma list of csv, json, svg")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-9, help="closure tolerance")

    p = argparse.ArgumentParser(prog="projbilliards", description="Projective and complex billiards toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("caustics", parents=[common], help="n-caustics of a conic")
    c.add_argument("-n", type=int, required=True)
    c.add_argument("-a", required=True)
    c.add_argument("-b", required=True)
    c.add_argument("--check-poncelet", action="store_true")
    c.add_argument("--closed-form", action="store_true")
    c.add_argument("--starts", type=int, default=10)
    c.set_defaults(func=cmd_caustics)

    o = sub.add_parser("orbit", parents=[common], help="iterate a billiard scene")
    o.add_argument("scene")
    o.add_argument("--start", help="'x,y;x,y' (overrides the scene)")
    o.add_argument("--steps", type=int, default=50)
    o.set_defaults(func=cmd_orbit)

    g = sub.add_parser("polygon", parents=[common], help="k-reflectivity sweep")
    g.add_argument("kind", choices=["right-spherical", "cp-quadrilateral", "cp-regular-2m", "cp-odd-n"])
    g.add_argument("--m", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--samples", type=int, default=1000)
    g.set_defaults(func=cmd_polygon)

    cc = sub.add_parser("circumcenters", parents=[common], help="circumcenter locus of 3-periodic orbits")
    cc.add_argument("-a", required=True)
    cc.add_argument("-b", required=True)
    cc.add_argument("-N", type=int, default=200)
    cc.set_defaults(func=cmd_circumcenters)

    ch = sub.add_parser("chasles", parents=[common], help="tangency parameters along an orbit")
    ch.add_argument("-a", default="2")
    ch.add_argument("-b", default="1")
    ch.add_argument("--axes", help="comma list of semi-axis squares (overrides -a/-b)")
    ch.add_argument("--signature", help="k,l (default Euclidean)")
    ch.add_argument("--start", help="point on the boundary")
    ch.add_argument("--direction", help="first chord direction")
    ch.add_argument("--bounces", type=int, default=50)
    ch.set_defaults(func=cmd_chasles)

    pm = sub.add_parser("permitted", parents=[common], help="permitted hyperplanes on an ellipsoid")
    pm.add_argument("--ellipsoid", default="3,2,1")
    pm.add_argument("--samples", type=int, default=200)
    pm.set_defaults(func=cmd_permitted)

    sr = sub.add_parser("simple-roots", parents=[common], help="experiment: squarefree caustic polynomials")
    sr.add_argument("--n-max", type=int, default=6)
    sr.add_argument("--samples", type=int, default=5)
    sr.set_defaults(func=cmd_simple_roots)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol <= 0:
        parser.error("--tol must be positive")
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = lambda msg, *a, **k: print("warning: %s" % msg, file=sys.stderr)
        try:
            return args.func(args)
        except Violation as exc:
            print("violation: %s" % exc, file=sys.stderr)
            return EXIT_VIOLATION
        except (InputError, DegenerateInputError, GeometryError) as exc:
            print("input error: %s" % exc, file=sys.stderr)
            return EXIT_INPUT
        except (NumericalError, StepBudgetError, TransversalityError, FloatingPointError) as exc:
            print("numerical failure: %s" % exc, file=sys.stderr)
            return EXIT_NUMERIC
        except BilliardError as exc:
            print("error: %s" % exc, file=sys.stderr)
            return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
