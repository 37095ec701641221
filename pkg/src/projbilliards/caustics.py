"""Caustic polynomials of conic billiards and the Poncelet closure test.

The base conic is x^2/a + y^2/b = 1 and its confocal family is
x^2/(a - lam) + y^2/(b - lam) = 1.  Polynomials are built exactly over the
rationals; only root finding is done in floating point.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .errors import DegenerateInputError, GeometryError, TransversalityError
from .projcore import (Quadric, _array, binary_quadratic_roots, normalize,
                       proj_distance)
from .ratpoly import RationalPolynomial, bareiss_det, roots_with_multiplicity, simple_roots

REAL_TOL = 1e-9


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


@lru_cache(maxsize=None)
def sqrt_series_coeff(k: int) -> Fraction:
    """Taylor coefficient of t^k in sqrt(1 + t)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return Fraction((-1) ** (k + 1) * comb(2 * k, k), 4 ** k * (2 * k - 1))


def cayley_b_coeff(k: int, a, b) -> RationalPolynomial:
    """B_k(lam): coefficient of t^k in sqrt((1 + (a-lam)/a t)(1 + (b-lam)/b t)(1 + t))."""
    a, b = _q(a), _q(b)
    if a == 0 or b == 0:
        raise DegenerateInputError("a and b must be nonzero")
    return _b_coeffs(k, a, b)[k]


@lru_cache(maxsize=256)
def _b_coeffs(kmax: int, a: Fraction, b: Fraction) -> tuple:
    alpha = RationalPolynomial([1, Fraction(-1) / a])  # (a - lam)/a
    beta = RationalPolynomial([1, Fraction(-1) / b])
    apow = [RationalPolynomial([1])]
    bpow = [RationalPolynomial([1])]
    for _ in range(kmax):
        apow.append(apow[-1] * alpha)
        bpow.append(bpow[-1] * beta)
    c = [sqrt_series_coeff(i) for i in range(kmax + 1)]
    out = []
    for k in range(kmax + 1):
        acc = RationalPolynomial()
        for u in range(k + 1):
            for v in range(k - u + 1):
                w = k - u - v
                acc = acc + (apow[u] * bpow[v]) * (c[u] * c[v] * c[w])
        out.append(acc)
    return tuple(out)


def _check_n(n: int):
    if int(n) != n or n < 3:
        raise ValueError("period n must be an integer >= 3")


def caustic_polynomial(n: int, a, b) -> RationalPolynomial:
    """B^n(lam): Cayley determinant whose roots are the n-caustic parameters."""
    _check_n(n)
    a, b = _q(a), _q(b)
    if a == 0 or b == 0:
        raise DegenerateInputError("a and b must be nonzero")
    m = n // 2
    if n % 2:
        size, shift = m, 2
    else:
        size, shift = m - 1, 3
    B = _b_coeffs(2 * size + shift - 2, a, b)
    mat = [[B[i + j + shift] for j in range(size)] for i in range(size)]
    return bareiss_det(mat)


def normalization_factor(n: int, a, b) -> Fraction:
    a, b = _q(a), _q(b)
    m = n // 2
    if n % 2:
        return (-1) ** m * Fraction(2) ** (m * (2 * m + 1)) * (a * b) ** (m * (m + 1))
    return Fraction((-1) ** (m + 1), m) * Fraction(2) ** ((m - 1) * (2 * m + 1)) * (a * b) ** ((m - 1) * (m + 1))


def normalized_caustic_polynomial(n: int, a, b) -> RationalPolynomial:
    return caustic_polynomial(n, a, b) * normalization_factor(n, a, b)


def expected_degree(n: int, circle: bool = False) -> int:
    if circle:
        return (n - 1) // 2 if n % 2 else n // 2 - 1
    return (n * n - 1) // 4 if n % 2 else n * n // 4 - 1


# --- roots and classification ------------------------------------------------

def classify_root(lam, a, b) -> str:
    """ellipse, hyperbola, strictly-complex or excluded.

    Real parameters with a - lam < 0 and b - lam < 0 give conics without real
    points; they are reported as strictly-complex along with non-real ones.
    """
    a, b = float(a), float(b)
    lam = complex(lam)
    scale = max(1.0, abs(lam))
    if abs(lam.imag) > REAL_TOL * scale:
        return "strictly-complex"
    x = lam.real
    for t in (0.0, a, b):
        if abs(x - t) <= REAL_TOL * max(1.0, abs(t)):
            return "excluded"
    if a - x > 0 and b - x > 0:
        return "ellipse"
    if (a - x) * (b - x) < 0:
        return "hyperbola"
    return "strictly-complex"


@dataclass
class CausticRoot:
    value: complex
    multiplicity: int
    cls: str
    poncelet: dict | None = None


@dataclass
class CausticReport:
    n: int
    a: Fraction
    b: Fraction
    polynomial: RationalPolynomial
    roots: list = field(default_factory=list)

    @property
    def degree(self) -> int:
        return self.polynomial.degree

    def real_roots(self, cls: str | None = None) -> list[float]:
        return [r.value.real for r in self.roots
                if abs(r.value.imag) <= REAL_TOL * max(1, abs(r.value)) and (cls is None or r.cls == cls)]


def n_caustics(n: int, a, b, check_poncelet: bool = False, starts: int = 10, seed: int = 0) -> CausticReport:
    poly = normalized_caustic_polynomial(n, a, b)
    rep = CausticReport(n, _q(a), _q(b), poly)
    for z, mult in roots_with_multiplicity(poly):
        if abs(z.imag) <= REAL_TOL * max(1.0, abs(z)):
            z = complex(z.real, 0.0)
        root = CausticRoot(z, mult, classify_root(z, a, b))
        if check_poncelet and root.cls in ("ellipse", "hyperbola") and float(a) > 0 and float(b) > 0:
            C = Quadric(np.diag([1 / float(a), 1 / float(b), -1.0]))
            D = Quadric(np.diag([1 / (float(a) - z.real), 1 / (float(b) - z.real), -1.0]))
            pr = poncelet_closure(C, D, n, starts, seed=seed)
            root.poncelet = {"closes": pr.closes, "max_residual": pr.max_residual,
                             "rotation_numbers": pr.rotation_numbers}
        rep.roots.append(root)
    return rep


def three_caustics_closed_form(a, b) -> tuple[float, float]:
    """(lam_plus, lam_minus) for the 3-caustics.

    Evaluated in the algebraically equivalent forms that avoid cancellation:
    (a + b - 2s)(a + b + 2s) = -3 (a - b)^2 with s^2 = a^2 - ab + b^2.
    """
    a, b = float(a), float(b)
    if a == b:
        raise DegenerateInputError("closed form needs a != b")
    s = math.sqrt(a * a - a * b + b * b)
    d2 = (a - b) ** 2
    plus = -a * b * (a + b + 2 * s) / d2
    small = a + b - 2 * s
    if abs(small) < 0.5 * abs(a + b + 2 * s):
        minus = 3 * a * b / (a + b + 2 * s)
    else:
        minus = -a * b * small / d2
    return plus, minus


def four_caustics_closed_form(a, b) -> tuple:
    """(lam1, lam2, lam3) = (ab/(b-a), ab/(a+b), ab/(a-b)); exact for rationals."""
    exact = all(isinstance(x, (int, Fraction)) for x in (a, b))
    if exact:
        a, b = _q(a), _q(b)
    else:
        a, b = float(a), float(b)
    if a == b or a == -b:
        raise DegenerateInputError("closed form needs a != b and a != -b")
    return a * b / (b - a), a * b / (a + b), a * b / (a - b)


# --- Joachimsthal and tangency -------------------------------------------------

def _q2(v, w=None):
    w = v if w is None else w
    return v[0] * w[0] + v[1] * w[1]


def joachimsthal(p, v, a, b, tol: float = 1e-8):
    """P(p, v) = (x vx/a + y vy/b)^2 / q(v), complex bilinear q."""
    p = _array(p)
    v = _array(v)
    a, b = float(a), float(b)
    if abs(p[0] ** 2 / a + p[1] ** 2 / b - 1) > tol:
        raise GeometryError("point is not on the conic")
    qv = _q2(v)
    if abs(qv) <= 1e-12 * float(np.vdot(v, v).real):
        raise GeometryError("isotropic direction")
    val = (p[0] * v[0] / a + p[1] * v[1] / b) ** 2 / qv
    if np.iscomplexobj(val):
        return complex(val)
    return float(val)


def tangency_parameter(line, a, b):
    """The lam with the plane line tangent to the confocal conic C_lam."""
    al, be, ga = _array(line)
    den = al * al + be * be
    num = float(a) * al * al + float(b) * be * be - ga * ga
    if abs(den) <= 1e-14 * float(np.vdot([al, be, ga], [al, be, ga]).real):
        raise DegenerateInputError("isotropic line: no finite tangency parameter")
    val = num / den
    return complex(val) if np.iscomplexobj(val) else float(val)


def _denominators(axes, k):
    axes = [float(x) for x in axes]
    d = len(axes)
    k = d if k is None else k
    P = np.polynomial.Polynomial
    return [P([x, -1.0]) if j < k else P([x, 1.0]) for j, x in enumerate(axes)]


def tangency_polynomial(x0, v, axes, k=None) -> np.polynomial.Polynomial:
    """Denominator-cleared tangency discriminant of the line x0 + t v.

    The family is sum_{j<k} x_j^2/(a_j - lam) + sum_{j>=k} x_j^2/(a_j + lam) = 1.
    """
    x0 = np.asarray(x0, dtype=float)
    v = np.asarray(v, dtype=float)
    D = _denominators(axes, k)
    d = len(D)
    P = np.polynomial.Polynomial
    acc = P([0.0])
    for i in range(d):
        term = P([v[i] ** 2])
        for j in range(d):
            if j != i:
                term = term * D[j]
        acc = acc + term
    for i in range(d):
        for j in range(i + 1, d):
            w = x0[i] * v[j] - x0[j] * v[i]
            term = P([w * w])
            for m in range(d):
                if m not in (i, j):
                    term = term * D[m]
            acc = acc - term
    return acc


def tangency_parameters(x0, v, axes, k=None, real_only: bool = True) -> list:
    """Parameters of the (pseudo-)confocal quadrics tangent to x0 + t v."""
    poly = tangency_polynomial(x0, v, axes, k)
    c = poly.coef
    scale = np.max(np.abs(c)) if len(c) else 0.0
    if scale == 0 or np.all(np.abs(c) <= 1e-14 * max(1.0, float(np.linalg.norm(v)) ** 2)):
        raise DegenerateInputError("line is an asymptote of the family")
    c = c.copy()
    while len(c) > 1 and abs(c[-1]) <= 1e-14 * scale:
        c = c[:-1]
    roots = simple_roots(c) if len(c) > 1 else []
    if real_only:
        out = sorted(z.real for z in roots if abs(z.imag) <= 1e-9 * max(1.0, abs(z)))
        return out
    return sorted(roots, key=lambda z: (z.real, z.imag))


def tangency_point(x0, v, axes, lam, k=None):
    """Point where x0 + t v touches the family member lam, and the member's normal."""
    x0 = np.asarray(x0, dtype=float)
    v = np.asarray(v, dtype=float)
    D = np.array([p(lam) for p in _denominators(axes, k)])
    A = np.sum(v * v / D)
    B = np.sum(x0 * v / D)
    t = -B / A
    x = x0 + t * v
    return x, x / D


# --- Poncelet ------------------------------------------------------------------

def _conic_matrix(C) -> np.ndarray:
    return C.matrix if isinstance(C, Quadric) else _array(C)


def tangent_lines_through(p, Dm: np.ndarray) -> list[np.ndarray]:
    """The two covectors through p tangent to the conic with matrix Dm."""
    p = normalize(np.asarray(p, dtype=complex))
    # basis of the pencil at p, orthonormal in the Hermitian sense
    _, _, vh = np.linalg.svd(p[None, :])
    e1, e2 = np.conj(vh[1]), np.conj(vh[2])
    Di = np.linalg.inv(Dm)
    roots = binary_quadratic_roots(e1 @ Di @ e1, e1 @ Di @ e2, e2 @ Di @ e2)
    return [normalize(s * e1 + t * e2) for s, t in roots]


def second_intersection(Cm: np.ndarray, p, line) -> np.ndarray:
    """The other point of the conic Cm on a line through its point p."""
    p = np.asarray(p, dtype=complex)
    line = np.asarray(line, dtype=complex)
    r = np.cross(line, np.conj(p))
    x = (r @ Cm @ r) * p - 2 * (p @ Cm @ r) * r
    if np.linalg.norm(x) < 1e-14 * np.linalg.norm(p) * np.linalg.norm(r) ** 2:
        raise TransversalityError("line is tangent to the conic at the given point")
    return normalize(x)


def poncelet_chain(C, D, p0, steps: int, first: int = 0) -> list[np.ndarray]:
    """Vertices p0, p1, ... of the Poncelet chain inscribed in C around D."""
    Cm, Dm = _conic_matrix(C), _conic_matrix(D)
    pts = [normalize(np.asarray(p0, dtype=complex))]
    incoming = None
    for _ in range(steps):
        cands = tangent_lines_through(pts[-1], Dm)
        if incoming is None:
            line = cands[first]
        else:
            line = max(cands, key=lambda c: proj_distance(c, incoming))
        pts.append(second_intersection(Cm, pts[-1], line))
        incoming = line
    return pts


def _conic_start_points(Cm: np.ndarray, count: int, rng) -> list[np.ndarray]:
    # intersect C with lines through its center (real points for ellipses)
    center = np.linalg.solve(Cm, np.array([0.0, 0.0, 1.0]))
    out = []
    for _ in range(count):
        th = rng.uniform(0, math.pi)
        d = np.array([math.cos(th), math.sin(th), 0.0])
        (s, t), _ = binary_quadratic_roots(center @ Cm @ center, center @ Cm @ d, d @ Cm @ d)
        out.append(normalize(s * center.astype(complex) + t * d))
    return out


def _ellipse_axes(Cm: np.ndarray):
    m = np.real_if_close(Cm)
    if np.iscomplexobj(m) or np.max(np.abs(m - np.diag(np.diag(m)))) > 0:
        return None
    d = np.diag(m)
    if d[2] == 0:
        return None
    a, b = -d[2] / d[0], -d[2] / d[1]
    if a > 0 and b > 0:
        return a, b
    return None


def rotation_number(points, a, b) -> float | None:
    """Turns of the closed real chain divided by the number of steps."""
    ths = []
    for p in points:
        if np.max(np.abs(np.imag(p))) > 1e-9 or abs(p[2]) < 1e-12:
            return None
        x, y = (np.real(p[:2]) / np.real(p[2]))
        ths.append(math.atan2(y / math.sqrt(b), x / math.sqrt(a)))
    total = sum((ths[i + 1] - ths[i]) % (2 * math.pi) for i in range(len(ths) - 1))
    steps = len(ths) - 1
    turns = total / (2 * math.pi)
    return min(turns, steps - turns) / steps


@dataclass
class PonceletReport:
    n: int
    closes: bool
    max_residual: float
    residuals: list
    porism_consistent: bool
    rotation_numbers: list


def poncelet_closure(C, D, n: int, starts=10, tol: float = 1e-7, seed: int = 0) -> PonceletReport:
    """Run the Poncelet chain n steps from each start and test closure.

    Arithmetic is complex throughout, so starts inside D (complex tangents)
    need no special path.
    """
    Cm, Dm = _conic_matrix(C), _conic_matrix(D)
    if isinstance(starts, int):
        starts = _conic_start_points(Cm, starts, np.random.default_rng(seed))
    res = []
    rots = []
    axes = _ellipse_axes(Cm)
    for p0 in starts:
        if abs(normalize(p0) @ Cm @ normalize(p0)) > 1e-8:
            raise GeometryError("start point is not on C")
        chain = poncelet_chain(Cm, Dm, p0, n)
        res.append(proj_distance(chain[0], chain[-1]))
        rots.append(rotation_number(chain, *axes) if axes and res[-1] < tol else None)
    flags = [r < tol for r in res]
    return PonceletReport(n, all(flags), max(res), res, all(flags) or not any(flags), rots)


def converse_joachimsthal_check(p, v1, v2, a, b, tol: float = 1e-9) -> str:
    """same-line, mirror-pair or neither for two directions with equal P."""
    p1 = joachimsthal(p, v1, a, b)
    p2 = joachimsthal(p, v2, a, b)
    if abs(p1 - p2) > tol * max(1.0, abs(p1)):
        raise GeometryError("Joachimsthal values differ")
    v1 = np.asarray(v1, dtype=complex)
    v2 = np.asarray(v2, dtype=complex)
    p = np.asarray(p, dtype=complex)
    t = np.array([-p[1] / float(b), p[0] / float(a)])
    qt = _q2(t)
    if abs(qt) <= 1e-12 * float(np.vdot(t, t).real):
        raise GeometryError("tangent line is isotropic")
    if proj_distance(v1, v2) < 1e-8:
        return "same-line"
    m = 2 * _q2(v1, t) / qt * t - v1
    if proj_distance(m, v2) < 1e-8:
        return "mirror-pair"
    return "neither"
