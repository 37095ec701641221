"""Homogeneous projective geometry over the real and complex numbers.

Points and hyperplanes are coordinate vectors up to scale.  Lines in the
plane are covectors; in higher dimension a line is the span of two points.
Hyperplanes in any dimension are plain covector arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Number

import numpy as np

from .errors import DegenerateInputError, GeometryError, SingularMemberError

TOL = 1e-10

I_POINT = np.array([1.0, 1j, 0.0])
J_POINT = np.array([1.0, -1j, 0.0])
LINE_AT_INFINITY = np.array([0.0, 0.0, 1.0])


def _array(x) -> np.ndarray:
    if isinstance(x, HomogeneousPoint):
        return x.coords
    if isinstance(x, ProjectiveLine) and x.dim == 2:
        return x.covector
    a = np.asarray(x)
    if np.iscomplexobj(a):
        return a.astype(complex)
    return a.astype(float)


def normalize(v) -> np.ndarray:
    """Scale so that the max-magnitude coordinate equals 1."""
    v = _array(v)
    k = int(np.argmax(np.abs(v)))
    if np.abs(v[k]) == 0:
        raise DegenerateInputError("zero vector has no projective class")
    out = v / v[k]
    if np.iscomplexobj(out) and np.all(np.abs(out.imag) <= 1e-15):
        out = out.real.copy()
    return out


def proj_distance(u, v) -> float:
    """Sine of the Hermitian angle between two coordinate vectors.

    Zero iff u and v are proportional; scale-free and bounded by 1.
    """
    u = _array(u)
    v = _array(v)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise DegenerateInputError("zero vector")
    w = np.outer(u, v) - np.outer(v, u)
    return float(np.linalg.norm(w) / (math.sqrt(2.0) * nu * nv))


def proj_equal(u, v, tol: float = TOL) -> bool:
    """2x2 minors of the normalized coordinates are all below tol."""
    a, b = normalize(u), normalize(v)
    return bool(np.max(np.abs(np.outer(a, b) - np.outer(b, a))) < tol)


def is_real_vector(v, tol: float = TOL) -> bool:
    v = normalize(v)
    return not np.iscomplexobj(v) or bool(np.max(np.abs(v.imag)) < tol)


class HomogeneousPoint:
    """A point of P^d, stored normalized; equality is projective."""

    __slots__ = ("coords",)

    def __init__(self, *coords):
        if len(coords) == 1 and np.ndim(coords[0]) == 1:
            coords = coords[0]
        c = normalize(np.asarray(coords))
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def __setattr__(self, name, value):
        raise AttributeError("HomogeneousPoint is immutable")

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def is_finite(self, tol: float = TOL) -> bool:
        return bool(abs(self.coords[-1]) > tol)

    def affine(self) -> np.ndarray:
        if not self.is_finite():
            raise GeometryError("point at infinity has no affine coordinates")
        return self.coords[:-1] / self.coords[-1]

    def is_real(self, tol: float = TOL) -> bool:
        return is_real_vector(self.coords, tol)

    def __eq__(self, other):
        if not isinstance(other, HomogeneousPoint):
            return NotImplemented
        return len(self.coords) == len(other.coords) and proj_equal(self.coords, other.coords)

    __hash__ = None

    def __repr__(self):
        return "HomogeneousPoint(%s)" % ", ".join(repr(complex(c) if np.iscomplexobj(c) else float(c))
                                                 for c in self.coords)


def affine_point(*xs) -> HomogeneousPoint:
    return HomogeneousPoint(*xs, 1.0)


def direction_point(*vs) -> HomogeneousPoint:
    """The point at infinity in direction vs."""
    return HomogeneousPoint(*vs, 0.0)


def _null_space(rows: np.ndarray, k: int) -> np.ndarray:
    """k vectors x with rows @ x = 0 (bilinear, not Hermitian)."""
    _, _, vh = np.linalg.svd(np.atleast_2d(rows))
    return np.conj(vh[-k:])


class ProjectiveLine:
    """A projective line; in the plane it is also a covector."""

    __slots__ = ("points", "_cov")

    def __init__(self, points: np.ndarray, covector: np.ndarray | None = None):
        pts = np.array([normalize(p) for p in points])
        if pts.shape[0] != 2:
            raise GeometryError("a line is spanned by two points")
        if proj_distance(pts[0], pts[1]) < TOL:
            raise DegenerateInputError("span points coincide")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_cov", covector)

    def __setattr__(self, name, value):
        raise AttributeError("ProjectiveLine is immutable")

    @classmethod
    def through(cls, p, q) -> "ProjectiveLine":
        return cls(np.array([_array(p), _array(q)]))

    @classmethod
    def from_covector(cls, c) -> "ProjectiveLine":
        c = normalize(c)
        if len(c) != 3:
            raise GeometryError("covectors describe lines only in the plane")
        pts = _null_space(c[None, :], 2)
        c.setflags(write=False)
        return cls(pts, c)

    @property
    def dim(self) -> int:
        return self.points.shape[1] - 1

    @property
    def covector(self) -> np.ndarray:
        if self.dim != 2:
            raise GeometryError("covector only defined for plane lines")
        if self._cov is None:
            c = normalize(np.cross(self.points[0], self.points[1]))
            c.setflags(write=False)
            object.__setattr__(self, "_cov", c)
        return self._cov

    def contains(self, p, tol: float = 1e-9) -> bool:
        x = _array(p)
        m = np.vstack([self.points, normalize(x)])
        s = np.linalg.svd(m, compute_uv=False)
        return bool(s[2] < tol * s[0])

    def __eq__(self, other):
        if not isinstance(other, ProjectiveLine):
            return NotImplemented
        if self.dim != other.dim:
            return False
        if self.dim == 2:
            return proj_equal(self.covector, other.covector)
        return all(self.contains(p, TOL) for p in other.points)

    __hash__ = None

    def __repr__(self):
        if self.dim == 2:
            return "ProjectiveLine(covector=%r)" % (self.covector.tolist(),)
        return "ProjectiveLine(points=%r)" % (self.points.tolist(),)


def join(p, q) -> ProjectiveLine:
    return ProjectiveLine.through(p, q)


def meet(l1, l2) -> HomogeneousPoint:
    """Intersection of two plane lines."""
    c = np.cross(_array(l1), _array(l2))
    if np.linalg.norm(c) < TOL * np.linalg.norm(_array(l1)) * np.linalg.norm(_array(l2)):
        raise DegenerateInputError("lines coincide")
    return HomogeneousPoint(c)


def line_covector(p, q) -> np.ndarray:
    """Covector of the plane line through p and q, unnormalized."""
    return np.cross(_array(p), _array(q))


# --- azimuths and cross-ratio ------------------------------------------------

@dataclass(frozen=True)
class Azimuth:
    """Homogeneous pair (u:v); value u/v, infinity when v = 0."""

    u: complex
    v: complex
    chart: object = field(default=None, compare=False)

    @classmethod
    def of(cls, z, chart=None) -> "Azimuth":
        if isinstance(z, Azimuth):
            return z
        if isinstance(z, Number) and not isinstance(z, complex) and math.isinf(z):
            return cls(1.0, 0.0, chart)
        return cls(z, 1.0, chart)

    @property
    def pair(self) -> np.ndarray:
        return np.array([self.u, self.v])

    def is_infinite(self, tol: float = TOL) -> bool:
        return abs(self.v) <= tol * abs(self.u)

    @property
    def value(self):
        if self.is_infinite(0.0):
            return math.inf
        z = self.u / self.v
        if isinstance(z, complex) and z.imag == 0:
            return z.real
        return z

    def same_as(self, other: "Azimuth", tol: float = TOL) -> bool:
        return proj_distance(self.pair, Azimuth.of(other).pair) < tol


class PencilChart:
    """Coordinates on the pencil of plane lines through a point.

    A line through p is written u*e1 + v*e2; its azimuth is (u:v).
    """

    def __init__(self, p, e1=None, e2=None):
        self.p = normalize(p)
        if e1 is None:
            e1, e2 = _null_space(self.p[None, :], 2)
        self.e1 = _array(e1)
        self.e2 = _array(e2)
        for e in (self.e1, self.e2):
            if abs(e @ self.p) > 1e-9 * np.linalg.norm(e):
                raise GeometryError("chart basis line does not pass through the base point")

    @classmethod
    def slopes(cls, x0: float, y0: float) -> "PencilChart":
        """Chart in which the azimuth of a line is its affine slope dy/dx."""
        return cls([x0, y0, 1.0], [1.0, 0.0, -x0], [0.0, -1.0, y0])

    def azimuth(self, line) -> Azimuth:
        c = _array(line)
        basis = np.vstack([self.e1, self.e2]).T
        coef, *_ = np.linalg.lstsq(basis.astype(complex), c.astype(complex), rcond=None)
        if np.linalg.norm(basis @ coef - c) > 1e-8 * np.linalg.norm(c):
            raise GeometryError("line does not pass through the chart base point")
        coef = normalize(coef)
        return Azimuth(coef[0], coef[1], self)

    def line(self, z) -> np.ndarray:
        a = Azimuth.of(z)
        return normalize(a.u * self.e1 + a.v * self.e2)


def _scalar_pair(x) -> np.ndarray:
    if isinstance(x, Azimuth):
        return x.pair
    if isinstance(x, Number):
        if not isinstance(x, complex) and math.isinf(x):
            return np.array([1.0, 0.0])
        return np.array([x, 1.0])
    return _array(x)


def _pairs_on_span(vectors) -> np.ndarray:
    """Coordinates of rank-2 vectors in an orthonormal basis of their span."""
    m = np.array([_scalar_pair(v) for v in vectors])
    if m.shape[1] == 2:
        return m
    m = np.array([normalize(r) for r in m])
    _, s, vh = np.linalg.svd(m)
    if s[2] > 1e-9 * s[0]:
        raise GeometryError("inputs do not lie on one line (or one pencil)")
    return m @ np.conj(vh[:2]).T


def _bracket(x, y):
    return x[0] * y[1] - x[1] * y[0]


def _clean(z):
    if isinstance(z, complex) or np.iscomplexobj(z):
        z = complex(z)
        if abs(z.imag) <= 1e-14 * max(1.0, abs(z.real)):
            return z.real
        return z
    return float(z)


def cross_ratio(p1, p2, p3, p4):
    """h(p4) for the projective map h with h(p1)=inf, h(p2)=0, h(p3)=1.

    Inputs are collinear homogeneous points, plane covectors of concurrent
    lines, Azimuths, or scalars on the affine line (math.inf allowed).
    """
    z = _pairs_on_span([p1, p2, p3, p4])
    for i in range(4):
        for j in range(i + 1, 4):
            if proj_distance(z[i], z[j]) < TOL:
                raise DegenerateInputError("cross-ratio of coincident points")
    num = _bracket(z[3], z[1]) * _bracket(z[2], z[0])
    den = _bracket(z[3], z[0]) * _bracket(z[2], z[1])
    if den == 0:
        return math.inf
    return _clean(num / den)


def involution_matrix(z3, z4) -> np.ndarray:
    """2x2 matrix of the involution fixing z3 and z4, acting on (u:v)."""
    u3, v3 = _scalar_pair(z3)
    u4, v4 = _scalar_pair(z4)
    s = u3 * v4 + u4 * v3
    return np.array([[s, -2 * u3 * u4], [2 * v3 * v4, -s]])


# a fixed conditioning rotation keeps the output deterministic
_CHART_TURN = np.array([[math.cos(0.7), -math.sin(0.7)], [math.sin(0.7), math.cos(0.7)]])


def harmonic_conjugate_azimuth(z, z3, z4) -> Azimuth:
    """Image of z under the involution of the pencil fixing z3 and z4."""
    chart = z.chart if isinstance(z, Azimuth) else None
    w, w3, w4 = (normalize(_scalar_pair(x)) for x in (z, z3, z4))
    if proj_distance(w3, w4) < TOL:
        raise DegenerateInputError("fixed azimuths coincide")
    if min(abs(w3[1]), abs(w4[1])) < 1e-3:
        r = _CHART_TURN
        m = np.linalg.solve(r, involution_matrix(r @ w3, r @ w4) @ r)
    else:
        m = involution_matrix(w3, w4)
    out = normalize(m @ w)
    return Azimuth(_clean(out[0]), _clean(out[1]), chart)


def harmonic_residual(l1, l2, l3, l4) -> float:
    """Scale-free distance of (l1, l2, l3, l4) from being harmonic."""
    z = _pairs_on_span([l1, l2, l3, l4])
    if proj_distance(z[2], z[3]) < TOL:
        raise DegenerateInputError("third and fourth lines coincide")
    w = involution_matrix(z[2], z[3]) @ z[0]
    return proj_distance(w, z[1])


def is_harmonic(l1, l2, l3, l4, tol: float = 1e-9) -> bool:
    """True iff the involution fixing l3, l4 swaps l1 and l2.

    Accepts concurrent plane lines (ProjectiveLine or covectors), Azimuths or
    scalars.  The predicate is closed under the symmetries of harmonic sets.
    """
    return harmonic_residual(l1, l2, l3, l4) < tol


# --- quadrics, polarity, pencils -----------------------------------------------

class Quadric:
    """Symmetric matrix up to scale; normalized to max |entry| = 1."""

    __slots__ = ("matrix", "rank")

    def __init__(self, matrix, tol: float = TOL):
        m = _array(matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise GeometryError("quadric matrix must be square")
        scale = np.max(np.abs(m))
        if scale == 0:
            raise DegenerateInputError("zero quadric")
        m = m / scale
        if np.max(np.abs(m - m.T)) > 1e-9:
            raise GeometryError("quadric matrix is not symmetric")
        m = (m + m.T) / 2
        if np.iscomplexobj(m) and np.max(np.abs(m.imag)) == 0:
            m = m.real.copy()
        m.setflags(write=False)
        s = np.linalg.svd(m, compute_uv=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "rank", int(np.sum(s > tol * s[0])))

    def __setattr__(self, name, value):
        raise AttributeError("Quadric is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0] - 1

    @property
    def nondegenerate(self) -> bool:
        return self.rank == self.dim + 1

    def __call__(self, p, q=None):
        x = _array(p)
        y = x if q is None else _array(q)
        return x @ self.matrix @ y

    def contains(self, p, tol: float = 1e-9) -> bool:
        x = normalize(p)
        return bool(abs(self(x)) < tol)

    def proportional(self, other: "Quadric", tol: float = 1e-9) -> bool:
        return proj_distance(self.matrix.ravel(), other.matrix.ravel()) < tol

    def __repr__(self):
        return "Quadric(%r)" % (self.matrix.tolist(),)


def _require_nondegenerate(Q: Quadric):
    if not Q.nondegenerate:
        raise DegenerateInputError("quadric is degenerate (rank %d)" % Q.rank)


def polar(p, Q: Quadric) -> np.ndarray:
    """Covector of the polar hyperplane Q p."""
    _require_nondegenerate(Q)
    return normalize(Q.matrix @ _array(p))


def pole(H, Q: Quadric) -> HomogeneousPoint:
    _require_nondegenerate(Q)
    return HomogeneousPoint(np.linalg.solve(Q.matrix, _array(H)))


def dual_quadric(Q: Quadric) -> Quadric:
    _require_nondegenerate(Q)
    return Quadric(np.linalg.inv(Q.matrix))


@dataclass(frozen=True)
class Pencil:
    """Line in the space of quadrics, either directly or through duals.

    In confocal mode the generators are the dual forms d1, d2 and members are
    the duals of their combinations.  The second dual generator may itself be
    degenerate (for example the dual Euclidean form diag(1, 1, 0)).
    """

    d1: np.ndarray
    d2: np.ndarray
    mode: str = "direct"

    def __post_init__(self):
        if self.mode not in ("direct", "confocal"):
            raise GeometryError("pencil mode is 'direct' or 'confocal'")
        if proj_distance(np.ravel(self.d1), np.ravel(self.d2)) < TOL:
            raise DegenerateInputError("pencil generators are proportional")

    @classmethod
    def direct(cls, q1: Quadric, q2: Quadric) -> "Pencil":
        return cls(q1.matrix, q2.matrix, "direct")

    @classmethod
    def confocal(cls, q1: Quadric, q2: Quadric) -> "Pencil":
        return cls(dual_quadric(q1).matrix, dual_quadric(q2).matrix, "confocal")

    @classmethod
    def from_duals(cls, d1, d2) -> "Pencil":
        return cls(_array(d1), _array(d2), "confocal")

    def member(self, lam, mu) -> Quadric:
        if lam == 0 and mu == 0:
            raise DegenerateInputError("(0, 0) is not a pencil parameter")
        m = complex(lam) * self.d1 + complex(mu) * self.d2
        if not np.iscomplexobj(np.asarray(lam)) and not np.iscomplexobj(np.asarray(mu)):
            m = m.real
        if self.mode == "direct":
            return Quadric(m)
        d = Quadric(m)
        if not d.nondegenerate:
            raise SingularMemberError("dual combination is degenerate")
        return Quadric(np.linalg.inv(d.matrix))


def confocal_family(a, b) -> Pencil:
    """Confocal pencil of x^2/a + y^2/b = 1; member(1, lam) is C_lam."""
    return Pencil.from_duals(np.diag([float(a), float(b), -1.0]), np.diag([-1.0, -1.0, 0.0]))


def confocal_conic(a, b, lam) -> Quadric:
    """x^2/(a - lam) + y^2/(b - lam) = 1."""
    if lam == a or lam == b:
        raise SingularMemberError("lambda = a or b gives a degenerate member")
    return Quadric(np.diag([1.0 / float(a - lam), 1.0 / float(b - lam), -1.0]))


# --- isotropy and foci -------------------------------------------------------

def classify_line_isotropy(line, tol: float = TOL) -> str:
    c = normalize(_array(line))
    if abs(c @ I_POINT) < tol or abs(c @ J_POINT) < tol:
        return "isotropic"
    return "non-isotropic"


def binary_quadratic_roots(A, B, C) -> list[np.ndarray]:
    """The two (s:t) solving A s^2 + 2 B s t + C t^2 = 0."""
    A, B, C = complex(A), complex(B), complex(C)
    scale = max(abs(A), abs(B), abs(C))
    if scale == 0:
        raise DegenerateInputError("binary form vanishes identically")
    A, B, C = A / scale, B / scale, C / scale
    root = np.sqrt(B * B - A * C)
    # choose the sign avoiding cancellation
    q = -(B + root) if abs(B + root) >= abs(B - root) else -(B - root)
    if abs(q) < 1e-300:
        # B = 0 and A C = 0
        if abs(A) >= abs(C):
            return [np.array([0.0, 1.0 + 0j]), np.array([0.0, 1.0 + 0j])]
        return [np.array([1.0 + 0j, 0.0]), np.array([1.0 + 0j, 0.0])]
    return [np.array([q, A]), np.array([C, q])]


@dataclass(frozen=True)
class ConicPredicates:
    is_circle: bool
    complex_foci: tuple
    isotropic_tangents: tuple


def _isotropic_tangents(Dm: np.ndarray, point: np.ndarray) -> list[np.ndarray]:
    # lines through an isotropic point are s*e + t*(0, 0, 1)
    e = np.array([-point[1], point[0], 0.0])
    f = np.array([0.0, 0.0, 1.0])
    roots = binary_quadratic_roots(e @ Dm @ e, e @ Dm @ f, f @ Dm @ f)
    return [normalize(s * e + t * f) for s, t in roots]


def _focus_key(p: HomogeneousPoint):
    c = p.coords
    real = p.is_real(1e-9)
    if abs(c[-1]) > 1e-12:
        x = c[:-1] / c[-1]
    else:
        x = c[:-1]
    x = np.asarray(x, dtype=complex)
    return (0 if real else 1, round(x[0].real, 9), round(x[1].real, 9), round(x[0].imag, 9), round(x[1].imag, 9))


def conic_predicates(C: Quadric) -> ConicPredicates:
    if C.dim != 2:
        raise GeometryError("conic predicates need a plane conic")
    _require_nondegenerate(C)
    m = C.matrix
    is_circle = bool(abs(I_POINT @ m @ I_POINT) < 1e-9)
    Dm = np.linalg.inv(m)
    ti = _isotropic_tangents(Dm, I_POINT)
    tj = _isotropic_tangents(Dm, J_POINT)
    foci = []
    for li in ti:
        for lj in tj:
            x = np.cross(li, lj)
            if np.linalg.norm(x) < 1e-12:
                continue
            foci.append(HomogeneousPoint(x))
    foci.sort(key=_focus_key)
    return ConicPredicates(is_circle, tuple(foci), tuple(ti + tj))


# --- serialization -----------------------------------------------------------

def encode(x):
    """JSON-ready nested lists; complex scalars become [re, im] pairs."""
    if isinstance(x, HomogeneousPoint):
        x = x.coords
    elif isinstance(x, Quadric):
        x = x.matrix
    elif isinstance(x, ProjectiveLine):
        x = x.covector if x.dim == 2 else x.points
    a = np.asarray(x)
    if np.iscomplexobj(a):
        return np.stack([a.real, a.imag], axis=-1).tolist()
    return a.astype(float).tolist()


def decode(data, complex_pairs: bool = False) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if complex_pairs:
        return a[..., 0] + 1j * a[..., 1]
    return a
