"""Numeric verifiers for theorems about periodic orbits and caustics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .caustics import (poncelet_chain, tangency_parameters, tangency_point,
                       three_caustics_closed_form)
from .errors import DegenerateInputError, GeometryError, NumericalError
from .projcore import PencilChart, harmonic_conjugate_azimuth, normalize, proj_distance
from .reflect import MetricFrame, PseudoMetric, ellipsoid, iterate_orbit, FramedBoundary


# --- triangular orbits and the circumcenter locus --------------------------------

def triangular_caustic(a, b) -> float:
    """Parameter of the confocal caustic of real 3-periodic orbits."""
    if a == b:
        return 3 * float(a) / 4
    return three_caustics_closed_form(a, b)[1]


def triangular_orbit_family(a, b, N: int, tol: float = 1e-9) -> list[np.ndarray]:
    """N real 3-periodic orbits of x^2/a + y^2/b = 1 from equispaced starts."""
    a, b = float(a), float(b)
    if a <= 0 or b <= 0:
        raise GeometryError("need an ellipse (a, b > 0)")
    lam = triangular_caustic(a, b)
    C = np.diag([1 / a, 1 / b, -1.0])
    D = np.diag([1 / (a - lam), 1 / (b - lam), -1.0])
    out = []
    for i in range(N):
        th = 2 * math.pi * i / N
        p0 = np.array([math.sqrt(a) * math.cos(th), math.sqrt(b) * math.sin(th), 1.0])
        chain = poncelet_chain(C, D, p0, 3)
        r = proj_distance(chain[0], chain[3])
        if r > tol:
            raise NumericalError("triangular orbit did not close (residual %.3g)" % r)
        tri = np.array([(c[:2] / c[2]).real for c in chain[:3]])
        out.append(tri)
    return out


def circumcenter(p1, p2, p3) -> np.ndarray:
    p1, p2, p3 = (np.asarray(p, dtype=float) for p in (p1, p2, p3))
    A = 2 * np.array([p2 - p1, p3 - p1])
    if abs(np.linalg.det(A)) <= 1e-14 * max(1.0, np.max(np.abs(A))) ** 2:
        raise DegenerateInputError("collinear points have no circumcenter")
    rhs = np.array([p2 @ p2 - p1 @ p1, p3 @ p3 - p1 @ p1])
    return np.linalg.solve(A, rhs)


@dataclass
class ConicFit:
    coefficients: np.ndarray  # A, B, C, D, E, F of A x^2 + B xy + C y^2 + D x + E y + F
    residual: float
    cls: str
    points: np.ndarray | None = None

    def __call__(self, x, y):
        A, B, C, D, E, F = self.coefficients
        return A * x * x + B * x * y + C * y * y + D * x + E * y + F


def _conic_class(c: np.ndarray, tol: float = 1e-10) -> str:
    A, B, C, D, E, F = c
    M = np.array([[A, B / 2, D / 2], [B / 2, C, E / 2], [D / 2, E / 2, F]])
    s = np.linalg.svd(M, compute_uv=False)
    if s[2] < tol * s[0]:
        return "degenerate"
    disc = B * B - 4 * A * C
    scale = max(abs(A), abs(B), abs(C)) ** 2
    if abs(disc) <= tol * scale:
        return "parabola"
    return "ellipse" if disc < 0 else "hyperbola"


def fit_conic(points) -> ConicFit:
    """Algebraic least squares with a unit-norm coefficient vector.

    Points are centered and scaled to unit RMS radius before the SVD; the
    residual is the RMS algebraic distance in those coordinates.
    """
    P = np.asarray(points, dtype=float)
    m = P.mean(axis=0)
    spread = math.sqrt(np.mean(np.sum((P - m) ** 2, axis=1)))
    if spread <= 1e-12 * max(1.0, np.linalg.norm(m)):
        c = np.array([1.0, 0.0, 1.0, -2 * m[0], -2 * m[1], m @ m])
        return ConicFit(c / np.linalg.norm(c), 0.0, "degenerate", P)
    U = (P - m) / spread
    x, y = U[:, 0], U[:, 1]
    Dm = np.column_stack([x * x, x * y, y * y, x, y, np.ones_like(x)])
    _, s, vh = np.linalg.svd(Dm, full_matrices=False)
    if len(P) < 6 or s[-2] <= 1e-10 * s[0]:
        raise DegenerateInputError("conic fit is rank deficient")
    theta = vh[-1]
    residual = float(np.linalg.norm(Dm @ theta) / math.sqrt(len(P)))
    A, B, C, D, E, F = theta
    Mn = np.array([[A, B / 2, D / 2], [B / 2, C, E / 2], [D / 2, E / 2, F]])
    T = np.array([[1 / spread, 0, -m[0] / spread], [0, 1 / spread, -m[1] / spread], [0, 0, 1]])
    M = T.T @ Mn @ T
    c = np.array([M[0, 0], 2 * M[0, 1], M[1, 1], 2 * M[0, 2], 2 * M[1, 2], M[2, 2]])
    c = c / np.linalg.norm(c)
    return ConicFit(c, residual, _conic_class(theta), P)


def circumcenter_locus(a, b, N: int = 200) -> ConicFit:
    if N < 20:
        raise ValueError("use at least 20 orbits")
    centers = np.array([circumcenter(*tri) for tri in triangular_orbit_family(a, b, N)])
    return fit_conic(centers)


def mirror_hausdorff(points) -> float:
    """Hausdorff distance between a point set and its reflection in the x-axis."""
    P = np.asarray(points, dtype=float)
    Q = P * np.array([1.0, -1.0])
    d = np.linalg.norm(P[:, None, :] - Q[None, :, :], axis=2)
    return float(max(d.min(axis=0).max(), d.min(axis=1).max()))


# --- Birkhoff distributions ----------------------------------------------------

@dataclass
class BisectorData:
    points: np.ndarray
    lines: list            # L_j: direction (classical) or covector (projective)
    hyperplanes: list      # H_j normals (classical) or T_j covectors (projective)


def classical_bisector_hyperplanes(points) -> BisectorData:
    """Interior bisectors L_j of a closed polygon and their normal hyperplanes H_j."""
    P = np.asarray(points, dtype=float)
    k = len(P)
    Ls, Hs = [], []
    for j in range(k):
        a = P[(j - 1) % k] - P[j]
        c = P[(j + 1) % k] - P[j]
        ua, uc = a / np.linalg.norm(a), c / np.linalg.norm(c)
        cross = math.sqrt(max(0.0, 1 - (ua @ uc) ** 2))
        if cross < 1e-12:
            raise DegenerateInputError("collinear triple at vertex %d" % j)
        L = (ua + uc) / np.linalg.norm(ua + uc)
        Ls.append(L)
        Hs.append(L)  # H_j is the hyperplane through p_j normal to L_j
    return BisectorData(P, Ls, Hs)


def tangency_defects(data: BisectorData, normals) -> list[float]:
    """Sine of the angle between each H_j and the boundary tangent hyperplane."""
    out = []
    for h, n in zip(data.hyperplanes, normals):
        n = np.asarray(n, dtype=float)
        n = n / np.linalg.norm(n)
        out.append(float(np.linalg.norm(h - (h @ n) * n)))  # sine, without cancellation
    return out


def _h(p) -> np.ndarray:
    p = np.asarray(p)
    return p if len(p) == 3 else np.append(p, 1.0)


def projective_birkhoff_lines(points, frames) -> BisectorData:
    """T_j making (p_{j-1}p_j, p_jp_{j+1}, L_j, T_j) harmonic.

    points are plane points (affine or homogeneous); frames[j] is a second
    point of L_j (homogeneous allowed).
    """
    P = [normalize(_h(p)) for p in points]
    k = len(P)
    Ls, Ts = [], []
    for j in range(k):
        p = P[j]
        A = np.cross(P[(j - 1) % k], p)
        B = np.cross(p, P[(j + 1) % k])
        if proj_distance(A, B) < 1e-12:
            raise DegenerateInputError("collinear triple at vertex %d" % j)
        L = np.cross(p, normalize(_h(frames[j])))
        if min(proj_distance(L, A), proj_distance(L, B)) < 1e-12:
            raise DegenerateInputError("frame line coincides with a side at vertex %d" % j)
        chart = PencilChart(p)
        z = harmonic_conjugate_azimuth(chart.azimuth(L), chart.azimuth(A), chart.azimuth(B))
        Ls.append(normalize(L))
        Ts.append(chart.line(z))
    return BisectorData(np.array(P), Ls, Ts)


def containment_defects(data: BisectorData, lines) -> list[float]:
    return [proj_distance(t, l) for t, l in zip(data.hyperplanes, lines)]


# --- permitted hyperplanes ----------------------------------------------------

@dataclass
class SurfaceJet:
    """Second-order data of a framed hypersurface at B.

    u: rows form an orthonormal principal basis of T_B S; k: curvatures with
    dn(u_i) = k_i u_i; n: unit normal; nu: frame direction with nu.n = 1;
    dnu[i]: derivative of nu along u_i.
    """

    B: np.ndarray
    u: np.ndarray
    k: np.ndarray
    n: np.ndarray
    nu: np.ndarray
    dnu: np.ndarray


def _unit_normal(axes, x):
    g = x / np.asarray(axes, dtype=float)
    return g / np.linalg.norm(g)


def ellipsoid_jet(axes, B, frame=None, h: float = 1e-5) -> SurfaceJet:
    """Jet of the ellipsoid sum x_j^2/a_j = 1 at B with the outward normal.

    frame(x, n) returns a frame direction; None means the Euclidean normal
    (handled analytically).  Other frames are differentiated numerically.
    """
    axes = np.asarray(axes, dtype=float)
    B = np.asarray(B, dtype=float)
    d = len(axes)
    A = np.diag(1 / axes)
    g = A @ B
    gn = np.linalg.norm(g)
    n = g / gn
    _, _, vh = np.linalg.svd(n[None, :])
    T = vh[1:].T  # d x (d-1), orthonormal tangent basis
    S = T.T @ A @ T / gn
    k, W = np.linalg.eigh(S)
    u = (T @ W).T
    if frame is None:
        return SurfaceJet(B, u, k, n, n.copy(), k[:, None] * u)

    def nu_at(x):
        m = _unit_normal(axes, x)
        w = np.asarray(frame(x, m), dtype=float)
        return w / (w @ m)

    nu = nu_at(B)
    dnu = np.array([(nu_at(B + h * ui) - nu_at(B - h * ui)) / (2 * h) for ui in u])
    return SurfaceJet(B, u, k, n, nu, dnu)


@dataclass
class PermittedHyperplaneReport:
    B: np.ndarray
    xi: np.ndarray
    M: np.ndarray
    V: np.ndarray
    eigenvalues: list
    eigenvectors: list
    hyperplanes: list          # admitted normals eta, ambient coordinates in T_B S
    perturbed: bool = False
    exceptional: bool = False

    @property
    def count(self) -> int:
        return len(self.hyperplanes)


def _rank(m: np.ndarray, tol: float) -> int:
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * max(1.0, s[0])))


def in_exceptional_set(M: np.ndarray, V: np.ndarray, tol: float = 1e-8) -> bool:
    """True iff V lies in Im(M - beta I) for some real eigenvalue beta of M."""
    dim = len(M)
    for beta in np.linalg.eigvals(M):
        if abs(beta.imag) > tol * max(1.0, abs(beta)):
            continue
        R = M - beta.real * np.eye(dim)
        if _rank(np.column_stack([R, V]), tol) == _rank(R, tol):
            return True
    return False


def permitted_hyperplanes(jet: SurfaceJet, xi, ratio: float, tol: float = 1e-8,
                          seed: int = 0, max_perturb: int = 5) -> PermittedHyperplaneReport:
    """Solve M eta + (xi.eta) V = alpha eta, keeping eta with xi.eta != 0.

    xi is a tangent vector at B (ambient coordinates); ratio is E2/E1 from the
    decomposition e = E1 nu + E2 xi of the incident line direction.
    """
    if np.any(np.abs(jet.k) < 1e-12):
        raise GeometryError("second fundamental form is degenerate")
    xi = np.asarray(xi, dtype=float)
    if abs(xi @ jet.n) > 1e-9 * np.linalg.norm(xi):
        raise GeometryError("xi is not tangent")
    u = jet.u
    N = jet.dnu + (jet.k * (u @ jet.nu))[:, None] * jet.nu[None, :]
    M = N @ u.T
    rng = np.random.default_rng(seed)
    perturbed = False
    for attempt in range(max_perturb + 1):
        l = u @ xi
        V = ratio ** 2 * jet.k * l
        if not in_exceptional_set(M, V, tol):
            break
        perturbed = True
        xi = xi + 1e-4 * np.linalg.norm(xi) * (u.T @ rng.standard_normal(len(l)))
    else:
        return PermittedHyperplaneReport(jet.B, xi, M, V, [], [], [], perturbed, True)
    F = M + np.outer(V, l)
    vals, vecs = np.linalg.eig(F)
    lu = l / np.linalg.norm(l)
    eigs, etas, admitted = [], [], []
    for i in range(len(vals)):
        if abs(vals[i].imag) > tol * max(1.0, abs(vals[i])):
            continue
        eta = np.real(vecs[:, i] / vecs[np.argmax(np.abs(vecs[:, i])), i])
        eta = eta / np.linalg.norm(eta)
        eigs.append(float(vals[i].real))
        etas.append(eta)
        if abs(lu @ eta) > tol:
            admitted.append(u.T @ eta)
    if len(admitted) > len(l):
        raise NumericalError("more permitted hyperplanes than the dimension allows")
    return PermittedHyperplaneReport(jet.B, xi, M, V, eigs, etas, admitted, perturbed, False)


def decompose_direction(jet: SurfaceJet, e) -> tuple[np.ndarray, float]:
    """(xi, E2/E1) with e = E1 nu + E2 xi and |xi| = 1."""
    e = np.asarray(e, dtype=float)
    E1 = e @ jet.n
    if abs(E1) < 1e-12 * np.linalg.norm(e):
        raise GeometryError("line is tangent to the surface")
    w = e - E1 * jet.nu
    E2 = np.linalg.norm(w)
    if E2 == 0:
        raise GeometryError("line is the frame line; xi undefined")
    return w / E2, E2 / E1


def chasles_hyperplanes(axes, B, e, k=None) -> tuple[list, list, list]:
    """Normals in T_B S of T_A U for the confocal quadrics U tangent to B + t e.

    Returns (parameters, projected normals, full normals at tangency).
    """
    axes = np.asarray(axes, dtype=float)
    n = _unit_normal(axes, np.asarray(B, dtype=float))
    lams = tangency_parameters(B, e, axes, k)
    proj, full = [], []
    for lam in lams:
        _, g = tangency_point(B, e, axes, lam, k)
        full.append(g / np.linalg.norm(g))
        t = g - (g @ n) * n
        proj.append(t / np.linalg.norm(t))
    return lams, proj, full


def match_hyperplanes(etas, others) -> float:
    """Worst projective distance pairing each eta with its nearest other."""
    if len(etas) != len(others):
        return math.inf
    return max((min(proj_distance(a, b) for b in others) for a in etas), default=0.0)


# --- Chasles invariance ---------------------------------------------------------

@dataclass
class ChaslesReport:
    parameters: list = field(default_factory=list)
    max_drift: float = 0.0
    orthogonality: float = 0.0
    counts: set = field(default_factory=set)
    light_like: list = field(default_factory=list)


def is_light_like(metric: PseudoMetric, v, tol: float = 1e-10) -> bool:
    v = np.asarray(v, dtype=float)
    return abs(metric.form(v)) < tol * (v @ v)


def chasles_invariance(axes, k: int | None, p1, p2, bounces: int) -> ChaslesReport:
    """Tangency parameters of every chord of a (pseudo-)Euclidean orbit.

    The boundary is sum x_j^2/a_j = 1; the metric has k plus signs and the
    family is the matching pseudo-confocal one.
    """
    axes = np.asarray(axes, dtype=float)
    d = len(axes)
    k = d if k is None else k
    metric = PseudoMetric(k, d - k)
    B = FramedBoundary(ellipsoid(axes), MetricFrame(metric))
    orbit = iterate_orbit(B, p1, p2, bounces)
    rep = ChaslesReport()
    Ginv = np.linalg.inv(metric.gram)
    first = None
    for i in range(len(orbit.points) - 1):
        x, y = orbit.points[i], orbit.points[i + 1]
        v = y - x
        if is_light_like(metric, v):
            rep.light_like.append(i)
            raise GeometryError("light-like chord at bounce %d" % i)
        lams = tangency_parameters(x, v, axes, k)
        rep.parameters.append(lams)
        rep.counts.add(len(lams))
        if first is None:
            first = lams
        elif len(lams) == len(first):
            rep.max_drift = max(rep.max_drift, max(abs(p - q) / max(1.0, abs(q)) for p, q in zip(lams, first)))
        else:
            rep.max_drift = math.inf
        gs = [tangency_point(x, v, axes, lam, k)[1] for lam in lams]
        for s in range(len(gs)):
            for t in range(s + 1, len(gs)):
                c = abs(gs[s] @ Ginv @ gs[t]) / (np.linalg.norm(gs[s]) * np.linalg.norm(gs[t]))
                rep.orthogonality = max(rep.orthogonality, c)
    return rep
