"""k-reflective projective billiards in polygons.

Indexing: ``vertices[j]`` is P_j (mod n) and orbit point p_j lies on the line
P_j P_{j+1}.  Orbits are virtual: edges are full projective lines and points
may leave the segments or go to infinity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, GeometryError, StepBudgetError
from .projcore import TOL, normalize, proj_distance
from .reflect import CentralFrame, FramedBoundary, FramedPoint, Segment


def _h(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return p if len(p) == 3 else np.append(p, 1.0)


@dataclass
class PolygonBilliard:
    kind: str
    vertices: np.ndarray
    center: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.vertices)

    def edge(self, j: int) -> np.ndarray:
        n = self.n
        return normalize(np.cross(_h(self.vertices[j % n]), _h(self.vertices[(j + 1) % n])))

    def frame_point(self, j: int) -> np.ndarray:
        if self.kind == "right-spherical":
            return _h(self.vertices[(j + 2) % 3])
        return self.center

    def framed_boundaries(self, physical: bool = False) -> list[FramedBoundary]:
        """The same billiard as reflect boundaries (affine, real mode)."""
        n = self.n
        return [FramedBoundary(Segment(self.vertices[j], self.vertices[(j + 1) % n], physical),
                               CentralFrame(self.frame_point(j))) for j in range(n)]

    def transform(self, H: np.ndarray) -> "PolygonBilliard":
        """Image under the projective map H (vertices must stay finite)."""
        vs = []
        for v in self.vertices:
            w = H @ _h(v)
            vs.append(w[:2] / w[2])
        c = None if self.center is None else normalize(H @ self.center)
        return PolygonBilliard(self.kind, np.array(vs), c)


def _noncollinear(P, Q, R) -> bool:
    m = np.array([_h(P), _h(Q), _h(R)])
    return abs(np.linalg.det(m)) > 1e-12 * np.prod([np.linalg.norm(r) for r in m])


def right_spherical(P1, P2, P3) -> PolygonBilliard:
    if not _noncollinear(P1, P2, P3):
        raise DegenerateInputError("vertices are collinear")
    return PolygonBilliard("right-spherical", np.array([P1, P2, P3], dtype=float))


def centrally_projective(O, *P) -> PolygonBilliard:
    if len(P) < 3:
        raise GeometryError("a polygon needs at least three vertices")
    B = PolygonBilliard("centrally-projective", np.array(P, dtype=float), normalize(_h(O)))
    for j in range(B.n):
        if abs(B.edge(j) @ B.center) < 1e-10:
            raise DegenerateInputError("center lies on the line of edge %d" % j)
    return B


def diagonal_quadrilateral(P1, P2, P3, P4) -> PolygonBilliard:
    """Quadrilateral centered at the intersection of its diagonals."""
    O = np.cross(np.cross(_h(P1), _h(P3)), np.cross(_h(P2), _h(P4)))
    return centrally_projective(O, P1, P2, P3, P4)


def regular_polygon(n: int, clockwise: bool = True) -> PolygonBilliard:
    """Regular n-gon on the unit circle, centered at the origin."""
    s = -1 if clockwise else 1
    P = [(math.cos(s * 2 * math.pi * j / n), math.sin(s * 2 * math.pi * j / n)) for j in range(n)]
    return centrally_projective((0.0, 0.0), *P)


@dataclass
class VirtualOrbit:
    points: list
    edges: list
    period: int | None = None
    residual: float = math.inf

    def phase_residual(self, k: int) -> float:
        """Distance between the phase pairs (p_k, p_{k+1}) and (p_0, p_1)."""
        return max(proj_distance(self.points[0], self.points[k]),
                   proj_distance(self.points[1], self.points[k + 1]))

    def exits_segments(self, B: PolygonBilliard) -> list[int]:
        """Indices of points outside their closed edge segment (physical mode)."""
        out = []
        for i, (p, e) in enumerate(zip(self.points, self.edges)):
            if abs(p[2]) < 1e-12:
                out.append(i)
                continue
            x = p[:2] / p[2]
            P, Q = B.vertices[e % B.n], B.vertices[(e + 1) % B.n]
            d = Q - P
            s = (x - P) @ d / (d @ d)
            if s < -1e-12 or s > 1 + 1e-12:
                out.append(i)
        return out


def reflect_at(B: PolygonBilliard, edge: int, p: np.ndarray, prev: np.ndarray) -> np.ndarray:
    """Second point of the reflected line at p (on the given edge line)."""
    fp = FramedPoint(p, B.edge(edge), B.frame_point(edge))
    return fp.involution(prev)


def virtual_orbit(B: PolygonBilliard, p1, p2, steps: int, tol: float = 1e-9,
                  start_edge: int = 0, require_period: bool = False) -> VirtualOrbit:
    """Iterate the harmonic reflection; p1 on edge start_edge, p2 on the next."""
    pts = [normalize(_h(p1)), normalize(_h(p2))]
    edges = [start_edge, start_edge + 1]
    for p, e in zip(pts, edges):
        if abs(B.edge(e) @ p) > 1e-9:
            raise GeometryError("start point is not on its edge line")
    if proj_distance(pts[0], pts[1]) < TOL:
        raise DegenerateInputError("p1 and p2 coincide")
    orb = VirtualOrbit(pts, edges)
    n = B.n
    for k in range(1, steps + 1):
        e = edges[-1]
        x = reflect_at(B, e, pts[-1], pts[-2])
        line = np.cross(pts[-1], x)
        nxt = B.edge(e + 1)
        if proj_distance(line, nxt) < 1e-12:
            raise DegenerateInputError("reflected line is the next edge line")
        q = np.cross(line, nxt)
        if np.linalg.norm(q) == 0:
            raise DegenerateInputError("reflected line is degenerate")
        pts.append(normalize(q))
        edges.append(e + 1)
        if orb.period is None and k % n == 0 and k + 1 < len(pts):
            r = orb.phase_residual(k)
            if r < tol:
                orb.period, orb.residual = k, r
    if require_period and orb.period is None:
        raise StepBudgetError("no period within %d steps" % steps)
    return orb


@dataclass
class SweepReport:
    k: int
    samples: int
    closed: int
    max_residual: float
    early: int
    resampled: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.closed == self.samples


def sample_start(B: PolygonBilliard, rng, margin: float = 0.05):
    P = B.vertices
    t1, t2 = rng.uniform(margin, 1 - margin, size=2)
    p1 = (1 - t1) * P[0] + t1 * P[1]
    p2 = (1 - t2) * P[1] + t2 * P[2 % B.n]
    return p1, p2


def reflectivity_sweep(B: PolygonBilliard, k: int, samples: int, seed: int = 0,
                       tol: float = 1e-9, max_resample: int = 100) -> SweepReport:
    """Check closure at step k from random starts, and no closure before k.

    Starts that close early (a measure-zero set) are resampled.
    """
    rng = np.random.default_rng(seed)
    rep = SweepReport(k, samples, 0, 0.0, 0)
    done = 0
    while done < samples:
        p1, p2 = sample_start(B, rng)
        orb = virtual_orbit(B, p1, p2, k + 1, tol)
        early = [j for j in range(B.n, k, B.n) if orb.phase_residual(j) < tol]
        if early:
            rep.early += 1
            rep.resampled += 1
            if rep.resampled > max_resample:
                raise StepBudgetError("too many early closures")
            continue
        r = orb.phase_residual(k)
        rep.max_residual = max(rep.max_residual, r)
        if r < tol:
            rep.closed += 1
        else:
            rep.failures.append((p1.tolist(), p2.tolist(), r))
        done += 1
    return rep


def great_diagonal_check(B: PolygonBilliard, orbit: VirtualOrbit, ell: int, r: int,
                         tol: float = 1e-9) -> bool:
    """Lines p_{l-r-2}p_{l-r-1} and p_{l+r}p_{l+r+1} meet P_l P_{l+m} together."""
    n = B.n
    if n % 2:
        raise GeometryError("great diagonals need an even polygon")
    m = n // 2
    lo, hi = ell - r - 2, ell + r + 1
    if lo < 0 or hi >= len(orbit.points):
        raise IndexError("orbit too short around index %d" % ell)
    if orbit.edges[0] % n != 0:
        raise GeometryError("orbit must start on edge 0")
    diag = np.cross(_h(B.vertices[ell % n]), _h(B.vertices[(ell + m) % n]))
    p = orbit.points
    a = np.cross(np.cross(p[lo], p[lo + 1]), diag)
    b = np.cross(np.cross(p[ell + r], p[hi]), diag)
    return proj_distance(a, b) < tol


@dataclass
class DualOuterOrbit:
    q: list
    Q: list
    midpoint_residual: float
    lemma_residual: float
    period: int | None = None


def _pole_affine(line: np.ndarray) -> np.ndarray:
    # unit-circle polarity x^2 + y^2 - z^2
    if abs(line[2]) <= 1e-12 * np.linalg.norm(line):
        raise DegenerateInputError("dualized line passes through the center; pole at infinity")
    return np.array([-line[0] / line[2], -line[1] / line[2]])


def dual_conjugate(B: PolygonBilliard, orbit: VirtualOrbit, tol: float = 1e-9) -> DualOuterOrbit:
    """Polar images of an orbit: q_j = pole(p_j p_{j+1}), Q_j = pole(P_j P_{j+1}).

    O is moved to the origin and the unit-circle polarity is used, so the
    pole of the line at infinity is O.  Every polarity with that property
    sends lines through O to infinity, so such orbits are rejected.
    """
    if B.center is None or abs(B.center[2]) < 1e-12:
        raise GeometryError("dual conjugation needs a finite center")
    o = B.center[:2] / B.center[2]
    T = np.array([[1.0, 0.0, -o[0]], [0.0, 1.0, -o[1]], [0.0, 0.0, 1.0]])
    pts = [T @ p for p in orbit.points]
    q = [_pole_affine(np.cross(pts[j], pts[j + 1])) for j in range(len(pts) - 1)]
    Q = [_pole_affine(np.cross(T @ _h(B.vertices[j]), T @ _h(B.vertices[(j + 1) % B.n]))) for j in range(B.n)]
    Qe = [Q[e % B.n] for e in orbit.edges]
    mid = 0.0
    for j in range(1, len(q)):
        scale = max(1.0, np.linalg.norm(q[j - 1]), np.linalg.norm(q[j]))
        mid = max(mid, np.linalg.norm(Qe[j] - (q[j - 1] + q[j]) / 2) / scale)
    lem = 0.0
    for j in range(1, len(q) - 1):
        lhs = q[j + 1] - q[j - 1]
        rhs = 2 * (Qe[j + 1] - Qe[j])
        scale = max(1.0, np.linalg.norm(q[j + 1]), np.linalg.norm(q[j - 1]))
        lem = max(lem, np.linalg.norm(lhs - rhs) / scale)
    period = None
    for k in range(B.n, len(q) - 1, B.n):
        sc = max(1.0, np.linalg.norm(q[0]), np.linalg.norm(q[1]))
        if max(np.linalg.norm(q[k] - q[0]), np.linalg.norm(q[k + 1] - q[1])) / sc < tol:
            period = k
            break
    return DualOuterOrbit(q, Q, mid, lem, period)


def outer_orbit(Q, q0, steps: int) -> list[np.ndarray]:
    """Recursion q_j = 2 Q_j - q_{j-1} around the polygon Q_1..Q_n."""
    Q = [np.asarray(x, dtype=float) for x in Q]
    q = [np.asarray(q0, dtype=float)]
    for j in range(1, steps + 1):
        q.append(2 * Q[(j - 1) % len(Q)] - q[-1])
    return q
