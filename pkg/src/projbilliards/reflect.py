"""Reflection laws and billiard orbits.

The projective law at a boundary point p with tangent hyperplane h and frame
line through p and f is induced by the linear involution

    x -> x - 2 (h.x)/(h.f) f

which fixes h pointwise and sends f to -f.  On lines through p this is the
harmonic reflection; in affine directions it reads v = t + c w -> t - c w,
where w directs the frame and t is tangent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (DegenerateInputError, GeometryError, NumericalError,
                     StepBudgetError, TransversalityError)
from .projcore import (TOL, HomogeneousPoint, PencilChart, ProjectiveLine, Quadric,
                       _array, classify_line_isotropy, normalize, proj_distance)


# --- the projective law ------------------------------------------------------

@dataclass(frozen=True)
class FramedPoint:
    """Boundary point p, tangent hyperplane covector, frame point f != p.

    The frame line is the span of p and f; f may lie at infinity.
    """

    p: np.ndarray
    tangent: np.ndarray
    frame: np.ndarray

    def __post_init__(self):
        p, h, f = normalize(self.p), normalize(self.tangent), normalize(self.frame)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "tangent", h)
        object.__setattr__(self, "frame", f)
        if abs(h @ p) > 1e-8:
            raise GeometryError("point is not on its tangent hyperplane")
        if proj_distance(p, f) < TOL:
            raise DegenerateInputError("frame point coincides with the base point")
        if abs(h @ f) < 1e-10 * np.linalg.norm(f):
            raise TransversalityError("frame line lies in the tangent hyperplane")

    @property
    def frame_line(self) -> ProjectiveLine:
        return ProjectiveLine.through(self.p, self.frame)

    def involution(self, x) -> np.ndarray:
        x = _array(x)
        h, f = self.tangent, self.frame
        return x - 2 * (h @ x) / (h @ f) * f


def _away_from(line: ProjectiveLine, p: np.ndarray) -> np.ndarray:
    # point of the line Hermitian-orthogonal to p, hence distinct from p
    q = max(line.points, key=lambda x: proj_distance(x, p))
    return q - (np.vdot(p, q) / np.vdot(p, p)) * p


def projective_reflect(fp: FramedPoint, line, allow_tangent: bool = False) -> ProjectiveLine:
    """Image of a line through fp.p under the harmonic reflection."""
    if not isinstance(line, ProjectiveLine):
        line = ProjectiveLine.from_covector(line)
    if not line.contains(fp.p, 1e-9):
        raise GeometryError("line does not pass through the reflection point")
    x = _away_from(line, fp.p)
    if abs(fp.tangent @ normalize(x)) < 1e-10:
        if allow_tangent:
            return line
        raise TransversalityError("line lies in the tangent hyperplane")
    return ProjectiveLine.through(fp.p, fp.involution(x))


def reflect_direction(normal, frame_dir, v) -> np.ndarray:
    """Affine form of the law: the frame component of v changes sign."""
    n = np.asarray(normal)
    w = np.asarray(frame_dir)
    v = np.asarray(v)
    nw = n @ w
    if abs(nw) <= 1e-12 * np.linalg.norm(n) * np.linalg.norm(w):
        raise TransversalityError("frame direction is tangent")
    return v - 2 * (n @ v) / nw * w


# --- metrics -----------------------------------------------------------------

@dataclass(frozen=True)
class PseudoMetric:
    """Diagonal form with k plus signs followed by l minus signs."""

    k: int
    l: int = 0

    def __post_init__(self):
        if self.k < 0 or self.l < 0 or self.k + self.l < 1:
            raise GeometryError("signature must be nonnegative with k + l >= 1")

    @property
    def dim(self) -> int:
        return self.k + self.l

    @property
    def gram(self) -> np.ndarray:
        return np.diag([1.0] * self.k + [-1.0] * self.l)

    def form(self, x, y=None):
        y = x if y is None else y
        return np.asarray(x) @ self.gram @ np.asarray(y)

    def mirror(self, normal, v) -> np.ndarray:
        """Metric mirror map v = h + m -> h - m, m orthogonal to the tangent."""
        n = np.asarray(normal, dtype=float)
        w = self.gram @ n
        nn = self.form(w)
        if abs(nn) <= 1e-12 * (w @ w):
            raise TransversalityError("light-like tangent hyperplane")
        m = (self.form(v, w) / nn) * w
        return np.asarray(v) - 2 * m


def euclidean(d: int) -> PseudoMetric:
    return PseudoMetric(d, 0)


# --- frame rules -------------------------------------------------------------

class FrameRule:
    """Maps (affine point, tangent covector n) to a frame point (homogeneous)."""

    kind = "explicit-field"

    def frame_point(self, x: np.ndarray, n: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def direction(self, x: np.ndarray, n: np.ndarray) -> np.ndarray:
        f = self.frame_point(x, n)
        if abs(f[-1]) <= 1e-14 * np.max(np.abs(f)):
            return f[:-1]
        return f[:-1] / f[-1] - x


class FieldFrame(FrameRule):
    def __init__(self, fn: Callable):
        self.fn = fn

    def frame_point(self, x, n):
        return _array(self.fn(x, n))


class MetricFrame(FrameRule):
    """Frame = metric-orthogonal line to the tangent hyperplane."""

    kind = "metric-induced"

    def __init__(self, metric):
        if isinstance(metric, PseudoMetric):
            self.gram = metric.gram
        else:
            self.gram = np.asarray(metric, dtype=float)
        self.inv = np.linalg.inv(self.gram)

    def direction(self, x, n):
        w = self.inv @ n
        if abs(n @ w) <= 1e-12 * (n @ n):
            raise TransversalityError("tangent hyperplane is light-like for this metric")
        return w

    def frame_point(self, x, n):
        return np.append(self.direction(x, n), 0.0)


class EuclideanFrame(MetricFrame):
    kind = "euclidean"

    def __init__(self, d: int = 2):
        super().__init__(np.eye(d))


class CentralFrame(FrameRule):
    """Every frame line passes through one point O (possibly at infinity)."""

    kind = "central"

    def __init__(self, center):
        self.center = normalize(_array(center))

    def frame_point(self, x, n):
        return self.center


class QuadricFrame(FrameRule):
    """Frame at p on Q1: line from p to the pole of T_pQ1 with respect to Q2."""

    kind = "quadric-induced"

    def __init__(self, Q1: Quadric, Q2: Quadric):
        if not (Q1.nondegenerate and Q2.nondegenerate):
            raise DegenerateInputError("quadric frames need non-degenerate quadrics")
        if Q1.proportional(Q2):
            raise DegenerateInputError("Q1 and Q2 coincide")
        self.Q1, self.Q2 = Q1, Q2

    def frame_point(self, x, n):
        X = np.append(x, 1.0)
        h = self.Q1.matrix @ X
        u = np.linalg.solve(self.Q2.matrix, h)
        if proj_distance(u, X) < 1e-9:
            raise TransversalityError("Q2 is tangent to Q1 here; frame undefined")
        if abs(normalize(h) @ normalize(u)) < 1e-10:
            raise TransversalityError("frame line is tangent to Q1")
        return u


# --- boundaries --------------------------------------------------------------

class Surface:
    dim = 2

    def normal(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def intersect(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Next transversal intersection of the ray x + t v, t > 0."""
        raise NotImplementedError


class QuadricSurface(Surface):
    """Affine quadric X^T M X = 0 with X = (x, 1)."""

    def __init__(self, Q):
        self.Q = Q if isinstance(Q, Quadric) else Quadric(Q)
        self.M = self.Q.matrix
        self.dim = self.Q.dim

    def residual(self, x) -> float:
        X = np.append(x, 1.0)
        return float(abs(X @ self.M @ X))

    def normal(self, x):
        return (self.M @ np.append(x, 1.0))[:-1]

    def intersect(self, x, v):
        X = np.append(x, 1.0)
        V = np.append(v, 0.0)
        A = V @ self.M @ V
        B = X @ self.M @ V
        C = X @ self.M @ X
        if abs(A) <= 1e-13 * np.max(np.abs(self.M)) * (v @ v):
            raise TransversalityError("line is asymptotic to the quadric")
        # x is (close to) a root; take the other one
        disc = B * B - A * C
        if disc < 0:
            raise GeometryError("line misses the quadric")
        r = math.sqrt(disc)
        q = -(B + math.copysign(r, B))
        t1, t2 = q / A, (C / q if q != 0 else 0.0)
        t = t1 if abs(t1) >= abs(t2) else t2
        if abs(t) <= 1e-12:
            raise TransversalityError("reflected line is tangent to the boundary")
        return x + t * v


def ellipse(a, b) -> QuadricSurface:
    return QuadricSurface(np.diag([1 / float(a), 1 / float(b), -1.0]))


def ellipsoid(axes) -> QuadricSurface:
    """sum x_j^2 / a_j = 1 (a_j are squared semi-axes)."""
    return QuadricSurface(np.diag([1 / float(x) for x in axes] + [-1.0]))


class Segment(Surface):
    """Plane edge from P to Q with open endpoints."""

    corner_tol = 1e-9

    def __init__(self, P, Q, physical: bool = False):
        self.P = np.asarray(P, dtype=float)
        self.Q = np.asarray(Q, dtype=float)
        if np.linalg.norm(self.Q - self.P) < TOL:
            raise DegenerateInputError("segment endpoints coincide")
        self.physical = physical

    @property
    def covector(self) -> np.ndarray:
        return np.cross(np.append(self.P, 1.0), np.append(self.Q, 1.0))

    def normal(self, x):
        d = self.Q - self.P
        return np.array([d[1], -d[0]])

    def parameter(self, x) -> float:
        d = self.Q - self.P
        return float((x - self.P) @ d / (d @ d))

    def intersect(self, x, v):
        d = self.Q - self.P
        den = v[0] * d[1] - v[1] * d[0]
        if abs(den) <= 1e-14 * np.linalg.norm(v) * np.linalg.norm(d):
            raise TransversalityError("line is parallel to the edge")
        w = self.P - x
        t = (w[0] * d[1] - w[1] * d[0]) / den
        y = x + t * v
        if self.physical:
            s = self.parameter(y)
            if min(abs(s), abs(1 - s)) * np.linalg.norm(d) < self.corner_tol:
                raise GeometryError("orbit hits a corner")
            if not 0 < s < 1 or t <= 0:
                raise GeometryError("orbit leaves the edge segment")
        return y


class ParametricCurve(Surface):
    """Smooth plane curve u -> c(u); intersections by sampled Newton."""

    samples = 64
    max_iter = 50

    def __init__(self, c: Callable, dc: Callable, domain=(0.0, 2 * math.pi)):
        self.c, self.dc, self.domain = c, dc, domain

    def locate(self, x) -> float:
        us = np.linspace(*self.domain, 4 * self.samples)
        d = [np.linalg.norm(np.asarray(self.c(u)) - x) for u in us]
        return float(us[int(np.argmin(d))])

    def normal(self, x):
        t = np.asarray(self.dc(self.locate(x)), dtype=float)
        return np.array([t[1], -t[0]])

    def intersect(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)

        def g(u):
            w = np.asarray(self.c(u)) - x
            return w[0] * v[1] - w[1] * v[0]

        def dg(u):
            w = np.asarray(self.dc(u))
            return w[0] * v[1] - w[1] * v[0]

        us = np.linspace(*self.domain, self.samples + 1)
        gs = [g(u) for u in us]
        roots = []
        scale = np.linalg.norm(v) * max(1.0, np.linalg.norm(x))
        for i in range(self.samples):
            if gs[i] == 0:
                roots.append(us[i])
                continue
            if gs[i] * gs[i + 1] >= 0:
                continue
            lo, hi, glo = us[i], us[i + 1], gs[i]
            u = 0.5 * (lo + hi)
            for _ in range(self.max_iter):
                gu = g(u)
                if gu == 0 or hi - lo < 1e-15:
                    break
                if glo * gu < 0:
                    hi = u
                else:
                    lo, glo = u, gu
                du = dg(u)
                un = u - gu / du if du != 0 else lo
                u = un if lo < un < hi else 0.5 * (lo + hi)
            if abs(g(u)) > 1e-12 * scale:
                raise NumericalError("intersection did not converge")
            roots.append(u)
        best = None
        for u in roots:
            y = np.asarray(self.c(u), dtype=float)
            t = (y - x) @ v / (v @ v)
            if t > 1e-9 and (best is None or t < best[0]):
                best = (t, y)
        if best is None:
            raise GeometryError("no forward intersection with the curve")
        return best[1]


@dataclass
class FramedBoundary:
    surface: Surface
    frame: FrameRule

    @property
    def kind(self) -> str:
        return self.frame.kind

    def framed_point(self, x) -> FramedPoint:
        x = np.asarray(x, dtype=float)
        n = self.surface.normal(x)
        X = np.append(x, 1.0)
        h = np.append(n, -(n @ x))
        return FramedPoint(X, h, self.frame.frame_point(x, n))

    def reflect(self, x, v) -> np.ndarray:
        n = self.surface.normal(x)
        if abs(n @ v) <= 1e-12 * np.linalg.norm(n) * np.linalg.norm(v):
            raise TransversalityError("incoming line is tangent to the boundary")
        return reflect_direction(n, self.frame.direction(x, n), v)


def metric_frame(surface: Surface, q=None) -> FramedBoundary:
    q = euclidean(surface.dim) if q is None else q
    return FramedBoundary(surface, MetricFrame(q) if not isinstance(q, FrameRule) else q)


def quadric_frame(Q1: Quadric, Q2: Quadric) -> FramedBoundary:
    return FramedBoundary(QuadricSurface(Q1), QuadricFrame(Q1, Q2))


# --- sphere projection --------------------------------------------------------

def gnomonic_metric(x) -> np.ndarray:
    """Round metric of the sphere pushed to the plane z = -1 by central projection."""
    x = np.asarray(x, dtype=float)
    s = np.array([-x[0], -x[1], 1.0])
    r = np.linalg.norm(s)
    J = np.zeros((3, 2))
    for i in range(2):
        ds = np.zeros(3)
        ds[i] = -1.0
        J[:, i] = ds / r - s * (s @ ds) / r ** 3
    return J.T @ J


def _homography(src, dst) -> np.ndarray:
    """3x3 map sending four plane points src to dst."""
    rows = []
    for (x, y), (u, v) in zip(src, dst):
        rows.append([x, y, 1, 0, 0, 0, -u * x, -u * y, -u])
        rows.append([0, 0, 0, x, y, 1, -v * x, -v * y, -v])
    _, s, vh = np.linalg.svd(np.array(rows, dtype=float))
    if s[-2] < 1e-12 * s[0]:
        raise DegenerateInputError("points are not in general position")
    return vh[-1].reshape(3, 3)


def _trirectangular_triangle() -> np.ndarray:
    # octant vertices rotated so the centroid direction is +z, then projected
    e = np.eye(3)
    c = np.ones(3) / math.sqrt(3)
    z = np.array([0.0, 0.0, 1.0])
    k = np.cross(c, z)
    s, co = np.linalg.norm(k), c @ z
    k = k / s
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    R = np.eye(3) + s * K + (1 - co) * K @ K
    pts = (R @ e).T
    return np.array([-p[:2] / p[2] for p in pts])


class _SphereFrame(FrameRule):
    kind = "sphere-projection"

    def __init__(self, H, T0, j):
        self.H, self.Hinv = H, np.linalg.inv(H)
        a, b = T0[j], T0[(j + 1) % 3]
        d = b - a
        self.n0 = np.array([d[1], -d[0]])

    def frame_point(self, x, n):
        q = self.Hinv @ np.append(x, 1.0)
        q = q[:2] / q[2]
        w = np.linalg.solve(gnomonic_metric(q), self.n0)
        return self.H @ np.append(q + w, 1.0)


def sphere_projection_frame(P1, P2, P3) -> list[FramedBoundary]:
    """Edges framed by the spherical normal of a trirectangular triangle.

    The triangle is identified with the central projection of an octant of
    the sphere by the projective map fixing vertices and centroid; the frame
    at a point is the pushed-forward metric normal line.
    """
    P = np.array([P1, P2, P3], dtype=float)
    if abs(np.linalg.det(np.c_[P, np.ones(3)])) < 1e-12:
        raise DegenerateInputError("triangle vertices are collinear")
    T0 = _trirectangular_triangle()
    H = _homography(list(T0) + [T0.mean(axis=0)], list(P) + [P.mean(axis=0)])
    return [FramedBoundary(Segment(P[j], P[(j + 1) % 3]), _SphereFrame(H, T0, j)) for j in range(3)]


# --- billiard map and orbits -------------------------------------------------------

def _boundaries(B) -> list[FramedBoundary]:
    return list(B) if isinstance(B, (list, tuple)) else [B]


def billiard_map(B, p1, p2, index: int = 0):
    """(p1, p2) -> (p2, p3); index is the boundary carrying p2 in a list."""
    bs = _boundaries(B)
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    v = p2 - p1
    if np.linalg.norm(v) < TOL * max(1.0, np.linalg.norm(p2)):
        raise DegenerateInputError("p1 and p2 coincide")
    here = bs[index % len(bs)]
    w = here.reflect(p2, v)
    nxt = bs[(index + 1) % len(bs)]
    p3 = nxt.surface.intersect(p2, w)
    return p2, p3


@dataclass
class PhaseVertex:
    point: np.ndarray
    normal: np.ndarray
    frame_dir: np.ndarray
    incoming: np.ndarray
    outgoing: np.ndarray


@dataclass
class Orbit:
    points: list
    vertices: list = field(default_factory=list)
    periodic: bool = False
    period: int | None = None
    closure_residual: float = math.inf


def _rel(a, b) -> float:
    return float(np.linalg.norm(a - b) / max(1.0, np.linalg.norm(a)))


def iterate_orbit(B, p1, p2, steps: int, tol: float = 1e-9, index: int = 0,
                  stop_at_period: bool = False, require_period: bool = False) -> Orbit:
    bs = _boundaries(B)
    pts = [np.asarray(p1, dtype=float), np.asarray(p2, dtype=float)]
    verts = []
    orbit = Orbit(pts, verts)
    for k in range(steps):
        i = index + k
        prev, cur = pts[-2], pts[-1]
        here = bs[i % len(bs)]
        n = here.surface.normal(cur)
        w = here.frame.direction(cur, n)
        v = cur - prev
        out = here.reflect(cur, v)
        verts.append(PhaseVertex(cur, n, w, v, out))
        pts.append(bs[(i + 1) % len(bs)].surface.intersect(cur, out))
        m = k + 1
        if orbit.period is None and m % len(bs) == 0:
            r = max(_rel(pts[0], pts[m]), _rel(pts[1], pts[m + 1]))
            if r < tol:
                orbit.periodic, orbit.period, orbit.closure_residual = True, m, r
                if stop_at_period:
                    break
    if require_period and not orbit.periodic:
        raise StepBudgetError("no period found within %d steps" % steps)
    return orbit


def slope_azimuth(p, v):
    """Azimuth of the line through p with direction v in the slope chart."""
    a = PencilChart.slopes(p[0], p[1]).azimuth(np.cross(np.append(p, 1.0), np.append(v, 0.0)))
    return a.value


# --- complex reflection ------------------------------------------------------

class _Pencil:
    def __repr__(self):
        return "PENCIL"


PENCIL = _Pencil()


def complex_mirror_direction(v, t) -> np.ndarray:
    """v -> 2 q(v,t)/q(t) t - v with the bilinear q = dx^2 + dy^2."""
    v = np.asarray(v, dtype=complex)
    t = np.asarray(t, dtype=complex)
    qt = t @ t
    if abs(qt) <= 1e-12 * np.vdot(t, t).real:
        raise GeometryError("isotropic mirror direction")
    return 2 * (v @ t) / qt * t - v


def complex_reflect(T, line, p=None):
    """Reflect a complex plane line about the line T (both covectors).

    Returns a ProjectiveLine, or PENCIL when T is isotropic and line = T.
    """
    Tc = normalize(np.asarray(_array(T), dtype=complex))
    lc = normalize(np.asarray(_array(line), dtype=complex))
    if abs(Tc[0]) < TOL and abs(Tc[1]) < TOL:
        raise GeometryError("reflection about the line at infinity is undefined")
    if p is not None:
        P = np.asarray(_array(p), dtype=complex)
        if abs(normalize(P) @ Tc) > 1e-9:
            raise GeometryError("point is not on the mirror line")
        if abs(normalize(P) @ lc) > 1e-9:
            raise GeometryError("line does not pass through the point")
    if classify_line_isotropy(Tc) == "isotropic":
        if proj_distance(Tc, lc) < 1e-10:
            return PENCIL
        x = np.cross(Tc, lc)
        if abs(normalize(x)[2]) < 1e-12:
            raise GeometryError("lines meet at infinity; reflection undefined there")
        return ProjectiveLine.from_covector(Tc)
    al, be, ga = Tc
    t = np.array([be, -al])
    q = al * al + be * be
    p0 = np.array([-ga * al / q, -ga * be / q])
    R = 2 * np.outer(t, t) / (t @ t) - np.eye(2)
    S = np.eye(3, dtype=complex)
    S[:2, :2] = R
    S[:2, 2] = p0 - R @ p0
    return ProjectiveLine.from_covector(S.T @ lc)


@dataclass
class ComplexConicOrbit:
    points: list
    directions: list
    degenerate: bool = False


def complex_conic_orbit(a, b, p0, v0, steps: int) -> ComplexConicOrbit:
    """Complex billiard in x^2/a + y^2/b = 1; next point = second intersection."""
    a, b = float(a), float(b)
    p = np.asarray(p0, dtype=complex)
    v = np.asarray(v0, dtype=complex)
    pts, dirs = [p], [v]
    for _ in range(steps):
        A = v[0] ** 2 / a + v[1] ** 2 / b
        B = p[0] * v[0] / a + p[1] * v[1] / b
        if abs(A) < 1e-14 * np.vdot(v, v).real:
            return ComplexConicOrbit(pts, dirs, True)
        p = p - 2 * B / A * v
        t = np.array([-p[1] / b, p[0] / a])
        if abs(t @ t) <= 1e-12 * np.vdot(t, t).real:
            return ComplexConicOrbit(pts, dirs, True)
        v = complex_mirror_direction(v, t)
        pts.append(p)
        dirs.append(v)
    return ComplexConicOrbit(pts, dirs)
