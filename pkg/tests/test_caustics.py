import math
from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from projbilliards.caustics import (
    caustic_polynomial, cayley_b_coeff, classify_root, converse_joachimsthal_check,
    expected_degree, four_caustics_closed_form, joachimsthal, n_caustics,
    normalized_caustic_polynomial, poncelet_closure, sqrt_series_coeff,
    tangency_parameter, tangency_parameters, tangency_point, three_caustics_closed_form)
from projbilliards.errors import DegenerateInputError, GeometryError
from projbilliards.projcore import Quadric
from projbilliards.ratpoly import RationalPolynomial, bareiss_det, roots_with_multiplicity, simple_roots
from projbilliards.reflect import complex_mirror_direction, ellipse, iterate_orbit, metric_frame

X = sp.Symbol("X")


def rand_rationals(seed, count):
    """Random positive rational pairs whose ratio is not of small height.

    Small-height ratios are special: a/b = 2 makes lam = a a root for n = 4,
    and a/b = 4/3 does the same for n = 6.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        a = Fraction(int(rng.integers(1, 60)), int(rng.integers(1, 13)))
        b = Fraction(int(rng.integers(1, 60)), int(rng.integers(1, 13)))
        r = a / b
        if max(r.numerator, r.denominator) > 6:
            out.append((a, b))
    return out


# --- rational polynomials ---------------------------------------------------

def test_ratpoly_arithmetic():
    p = RationalPolynomial([1, 2, 1])  # (1 + X)^2
    q = RationalPolynomial([1, 1])
    assert p.exact_div(q) == q
    assert str(RationalPolynomial([-12, 12, 1])) == "X^2 + 12*X - 12"
    assert p(Fraction(1, 2)) == Fraction(9, 4)
    assert p.derivative() == RationalPolynomial([2, 2])
    assert (q ** 3).coeffs == (1, 3, 3, 1)
    with pytest.raises(ArithmeticError):
        p.exact_div(RationalPolynomial([0, 1]))


def test_squarefree_decomposition():
    x = RationalPolynomial([0, 1])
    f = (x - 1) * (x - 2) ** 2 * (x + 3) ** 3
    parts = {m: g for g, m in f.squarefree_decomposition()}
    assert parts[1] == x - 1
    assert parts[2] == x - 2
    assert parts[3] == x + 3
    roots = roots_with_multiplicity(f)
    assert sorted((round(z.real, 8), m) for z, m in roots) == [(-3, 3), (1, 1), (2, 2)]


def test_bareiss_against_sympy():
    rng = np.random.default_rng(2)
    for n in (1, 2, 3, 4):
        M = [[RationalPolynomial([int(c) for c in rng.integers(-4, 5, 3)]) for _ in range(n)] for _ in range(n)]
        S = sp.Matrix(n, n, lambda i, j: sum(int(c) * X ** k for k, c in enumerate(M[i][j].coeffs)))
        ref = sp.Poly(sp.expand(S.det()), X).all_coeffs()[::-1] if n else [1]
        got = bareiss_det(M)
        assert [Fraction(int(c)) for c in ref] == list(got.coeffs) or (got.is_zero() and all(c == 0 for c in ref))


def test_simple_roots_backward_error():
    c = np.array([-6.0, 11.0, -6.0, 1.0])
    assert sorted(z.real for z in simple_roots(c)) == pytest.approx([1, 2, 3])
    # huge dynamic range is handled by the rescaling retry
    c = np.poly1d([1e6, 1, 1e-6], r=True).coeffs[::-1]
    assert sorted(z.real for z in simple_roots(c)) == pytest.approx([1e-6, 1, 1e6], rel=1e-9)


# --- series coefficients ----------------------------------------------------

def test_sqrt_series_coeffs():
    assert [sqrt_series_coeff(k) for k in range(4)] == [1, Fraction(1, 2), Fraction(-1, 8), Fraction(1, 16)]
    ref = sp.series(sp.sqrt(1 + X), X, 0, 15).removeO()
    for k in range(15):
        assert sqrt_series_coeff(k) == Fraction(str(ref.coeff(X, k)))
    c = [sqrt_series_coeff(k) for k in range(12)]
    for w in range(12):
        assert sum(c[u] * c[w - u] for u in range(w + 1)) == (1 if w <= 1 else 0)


def test_cayley_coefficients():
    assert cayley_b_coeff(0, 2, 1) == RationalPolynomial([1])
    assert cayley_b_coeff(1, 2, 1)(Fraction(0)) == Fraction(3, 2)
    assert cayley_b_coeff(2, 2, 1)(Fraction(0)) == Fraction(3, 8)
    assert cayley_b_coeff(3, 5, 7).degree <= 3


def test_cayley_generating_series():
    t = sp.Symbol("t")
    for a, b in rand_rationals(7, 3):
        lam = Fraction(int(np.random.default_rng(int(a.numerator)).integers(-9, 9)), 5)
        A, B, L = sp.Rational(a.numerator, a.denominator), sp.Rational(b.numerator, b.denominator), sp.Rational(lam.numerator, lam.denominator)
        f = sp.sqrt((1 + (A - L) / A * t) * (1 + (B - L) / B * t) * (1 + t))
        ser = sp.series(f, t, 0, 13).removeO()
        for k in range(13):
            assert cayley_b_coeff(k, a, b)(lam) == Fraction(str(sp.nsimplify(ser.coeff(t, k))))


def test_circle_collapse_is_linear():
    # for a = b each B_k is affine in x = (a - lam)/a:  B_k = c_k + c_{k-1} x
    a = Fraction(3)
    for k in range(1, 8):
        Bk = cayley_b_coeff(k, a, a)
        assert Bk.degree <= 1
        for lam in (Fraction(1, 3), Fraction(-2), Fraction(5, 7)):
            x = (a - lam) / a
            assert Bk(lam) == sqrt_series_coeff(k) + sqrt_series_coeff(k - 1) * x


# --- caustic polynomials ----------------------------------------------------

def printed(n, a, b):
    """Explicit normalized polynomials for n = 3, 4, 5 (ascending coefficients)."""
    ab = a * b
    d2 = (a - b) ** 2
    if n == 3:
        return [-3 * ab ** 2, 2 * ab * (a + b), d2]
    if n == 4:
        return [ab ** 3, -ab ** 2 * (a + b), -ab * d2, (a + b) * d2]
    if n == 5:
        return [5 * ab ** 6, -10 * ab ** 5 * (a + b), -ab ** 4 * (9 * a * a - 34 * ab + 9 * b * b),
                36 * ab ** 3 * (a + b) * d2, -ab ** 2 * (29 * a * a + 54 * ab + 29 * b * b) * d2,
                2 * ab * (3 * a + b) * (a + 3 * b) * (a + b) * d2, d2 ** 3]
    raise ValueError(n)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_normalized_matches_explicit(n):
    for a, b in rand_rationals(n, 20):
        assert normalized_caustic_polynomial(n, a, b) == RationalPolynomial(printed(n, a, b))


def test_fixture_polynomials():
    assert str(normalized_caustic_polynomial(3, 2, 1)) == "X^2 + 12*X - 12"
    assert normalized_caustic_polynomial(4, 3, 1).integer_coefficients() == [27, -36, -12, 16]


@pytest.mark.parametrize("n", range(3, 9))
def test_degree_law(n):
    for a, b in rand_rationals(100 + n, 4):
        assert caustic_polynomial(n, a, b).degree == expected_degree(n)
    assert caustic_polynomial(n, 3, 3).degree == expected_degree(n, circle=True)


def test_small_height_ratio_is_special():
    assert caustic_polynomial(6, 1, Fraction(3, 4))(Fraction(1)) == 0
    assert caustic_polynomial(4, 2, 1)(Fraction(2)) == 0


def test_a_b_not_roots():
    for n in range(3, 7):
        for a, b in rand_rationals(200 + n, 5):
            p = caustic_polynomial(n, a, b)
            assert p(a) != 0 and p(b) != 0


def test_n3_roots_and_classes():
    rep = n_caustics(3, 2, 1)
    vals = sorted(r.value.real for r in rep.roots)
    assert vals == pytest.approx([-2 * (3 + 2 * math.sqrt(3)), -2 * (3 - 2 * math.sqrt(3))], rel=1e-12)
    assert [r.cls for r in rep.roots] == ["ellipse", "ellipse"]
    plus, minus = three_caustics_closed_form(2, 1)
    assert plus * minus < 0 and 0 < minus < 1


def test_n4_fixture_classes():
    rep = n_caustics(4, 3, 1)
    assert [(round(r.value.real, 12), r.cls) for r in rep.roots] == [
        (-1.5, "ellipse"), (0.75, "ellipse"), (1.5, "hyperbola")]
    assert four_caustics_closed_form(3, 1) == (Fraction(-3, 2), Fraction(3, 4), Fraction(3, 2))


def test_closed_form_errors():
    with pytest.raises(DegenerateInputError):
        three_caustics_closed_form(2, 2)
    with pytest.raises(DegenerateInputError):
        four_caustics_closed_form(2, -2)


def test_classify_root():
    assert classify_root(0.5, 2, 1) == "ellipse"
    assert classify_root(1.5, 2, 1) == "hyperbola"
    assert classify_root(3.0, 2, 1) == "strictly-complex"
    assert classify_root(1 + 1j, 2, 1) == "strictly-complex"
    assert [classify_root(x, 2, 1) for x in (0, 1, 2)] == ["excluded"] * 3


def test_circle_degree_example():
    assert n_caustics(5, 1, 1).degree == 2


# --- Joachimsthal ------------------------------------------------------------

def test_joachimsthal_circle_example():
    v = np.array([-1.5, math.sqrt(3) / 2])
    assert joachimsthal([1, 0], v, 1, 1) == pytest.approx(0.75)
    assert joachimsthal([1, 0], (2 - 3j) * v, 1, 1) == pytest.approx(0.75)
    with pytest.raises(GeometryError):
        joachimsthal([1, 0], [1, 1j], 1, 1)
    with pytest.raises(GeometryError):
        joachimsthal([2, 0], v, 1, 1)


def test_tangency_parameter_examples():
    assert tangency_parameter([1, 0, -0.5], 1, 0.75) == pytest.approx(0.75)
    # tangent to the base conic at (1, 0): x = 1
    assert tangency_parameter([1, 0, -1], 1, 0.5) == pytest.approx(0.0)


def test_joachimsthal_along_orbit():
    a, b = 2.0, 1.0
    B = metric_frame(ellipse(a, b))
    p1 = np.array([math.sqrt(2) * math.cos(0.4), math.sin(0.4)])
    p2 = ellipse(a, b).intersect(p1, np.array([-1.0, 0.17]))
    orb = iterate_orbit(B, p1, p2, 50)
    vals = []
    for x, y in zip(orb.points[:-1], orb.points[1:]):
        P = joachimsthal(y, y - x, a, b)
        vals.append(P)
        line = np.cross(np.append(x, 1), np.append(y, 1))
        assert tangency_parameter(line, a, b) == pytest.approx(a * b * P, abs=1e-10)
    assert max(vals) - min(vals) < 1e-10


def test_tangency_3d_orthogonal():
    axes = np.array([3.0, 2.0, 1.0])
    x0 = np.array([2.0, 1.5, 0.7])
    v = np.array([-0.8, -0.3, 0.2])
    lams = tangency_parameters(x0, v, axes)
    assert len(lams) == 2
    g = [tangency_point(x0, v, axes, l)[1] for l in lams]
    assert abs(g[0] @ g[1]) / (np.linalg.norm(g[0]) * np.linalg.norm(g[1])) < 1e-8


def test_converse_joachimsthal():
    p = np.array([math.sqrt(2) * math.cos(0.3), math.sin(0.3)])
    v = np.array([-1.0, 0.4 + 0.2j])
    t = np.array([-p[1], p[0] / 2])
    assert converse_joachimsthal_check(p, v, v, 2, 1) == "same-line"
    assert converse_joachimsthal_check(p, v, complex_mirror_direction(v, t), 2, 1) == "mirror-pair"
    with pytest.raises(GeometryError):
        converse_joachimsthal_check(p, v, np.array([1.0, 5.0]), 2, 1)


# --- Poncelet ------------------------------------------------------------------

def test_poncelet_circles():
    C = Quadric(np.diag([1.0, 1.0, -1.0]))
    D = Quadric(np.diag([4.0, 4.0, -1.0]))
    assert poncelet_closure(C, D, 3).closes
    r = poncelet_closure(C, D, 3)
    assert r.max_residual < 1e-10
    assert not poncelet_closure(C, D, 4).closes


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_poncelet_on_real_roots(n):
    rep = n_caustics(n, 2, 1, check_poncelet=True)
    for r in rep.roots:
        if r.poncelet is not None:
            assert r.poncelet["closes"]
            assert r.poncelet["max_residual"] < 1e-7
