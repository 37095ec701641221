import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from projbilliards.errors import DegenerateInputError, GeometryError, SingularMemberError
from projbilliards.projcore import (
    Azimuth, HomogeneousPoint, PencilChart, ProjectiveLine, Quadric, affine_point,
    classify_line_isotropy, confocal_conic, confocal_family, conic_predicates, cross_ratio,
    decode, dual_quadric, encode, harmonic_conjugate_azimuth, is_harmonic, join, meet,
    normalize, polar, pole, proj_distance)

finite = st.floats(-50, 50, allow_nan=False)


def test_point_normalization_and_equality():
    p = HomogeneousPoint(2.0, -4.0, 1.0)
    assert np.max(np.abs(p.coords)) == pytest.approx(1.0)
    assert p == HomogeneousPoint(-1.0, 2.0, -0.5)
    assert p != HomogeneousPoint(1.0, 2.0, 1.0)
    with pytest.raises(DegenerateInputError):
        HomogeneousPoint(0, 0, 0)


def test_join_meet():
    l1 = join(affine_point(0, 0), affine_point(1, 1))
    l2 = join(affine_point(1, 0), affine_point(0, 1))
    x = meet(l1, l2)
    assert np.allclose(x.affine(), [0.5, 0.5])
    assert l1.contains(affine_point(3, 3))


@pytest.mark.parametrize("x", [-3.0, 0.25, 7.0])
def test_cross_ratio_normal_form(x):
    assert cross_ratio(math.inf, 0, 1, x) == pytest.approx(x)


def test_cross_ratio_values():
    assert cross_ratio(math.inf, 0, 1, -1) == pytest.approx(-1)
    # h(z) = (2 - z)/z sends 0, 2, 1 to inf, 0, 1
    assert cross_ratio(0, 2, 1, 4) == pytest.approx(-0.5)


def test_cross_ratio_errors():
    with pytest.raises(DegenerateInputError):
        cross_ratio(0, 0, 1, 2)
    pts = [np.array([0, 0, 1.0]), np.array([1, 0, 1.0]), np.array([2, 0, 1.0]), np.array([0, 1, 1.0])]
    with pytest.raises(GeometryError):
        cross_ratio(*pts)


@settings(max_examples=100, deadline=None)
@given(st.lists(finite, min_size=4, max_size=4, unique=True), st.integers(0, 10_000))
def test_cross_ratio_projective_invariance(xs, seed):
    xs = sorted(xs)
    if min(np.diff(xs)) < 1e-2:
        return
    pts = [np.array([x, 2 * x + 1, 1.0]) for x in xs]
    H = np.random.default_rng(seed).standard_normal((3, 3))
    if abs(np.linalg.det(H)) < 1e-2:
        return
    c0 = cross_ratio(*pts)
    c1 = cross_ratio(*[H @ p for p in pts])
    assert abs(c0 - c1) <= 1e-8 * max(1.0, abs(c0))


def test_harmonic_examples():
    assert is_harmonic(1, -1, 0, math.inf)
    assert not is_harmonic(0, 2, 1, 4)
    assert not is_harmonic(3, 3, 0, math.inf)
    assert is_harmonic(0, 0, 0, math.inf)  # l1 = l2 = l3 is allowed


def test_harmonic_conjugate_examples():
    assert harmonic_conjugate_azimuth(5.0, 0, math.inf).value == pytest.approx(-5.0)
    assert harmonic_conjugate_azimuth(1, 0, 2).is_infinite()
    assert harmonic_conjugate_azimuth(0, 1, -1).is_infinite()
    with pytest.raises(DegenerateInputError):
        harmonic_conjugate_azimuth(1, 2, 2)


def test_harmonic_conjugate_involution_random():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        z, z3, z4 = rng.standard_normal(3) * 5
        if abs(z3 - z4) < 1e-3:
            continue
        w = harmonic_conjugate_azimuth(z, z3, z4)
        back = harmonic_conjugate_azimuth(w, z3, z4)
        assert proj_distance(back.pair, [z, 1.0]) < 1e-9
        assert harmonic_conjugate_azimuth(z3, z3, z4).same_as(Azimuth.of(z3), 1e-9)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-20, 20, allow_nan=False), min_size=3, max_size=3))
def test_harmonic_permutations(v):
    z, z3, z4 = v
    if min(abs(z3 - z4), abs(z - z3), abs(z - z4)) < 1e-2:
        return
    w = harmonic_conjugate_azimuth(z, z3, z4)
    quad = [Azimuth.of(z), w, Azimuth.of(z3), Azimuth.of(z4)]
    a, b, c, d = quad
    for q in ([a, b, c, d], [b, a, c, d], [a, b, d, c], [c, d, a, b]):
        assert is_harmonic(*q, tol=1e-8)


def test_harmonic_on_lines_through_point():
    p = np.array([1.0, 2.0, 1.0])
    chart = PencilChart.slopes(1.0, 2.0)
    lines = [chart.line(z) for z in (1.0, -1.0, 0.0, math.inf)]
    assert is_harmonic(*lines)
    assert all(abs(l @ p) < 1e-12 for l in lines)


def test_polarity():
    circle = Quadric(np.diag([1.0, 1.0, -1.0]))
    assert proj_distance(polar([0, 0, 1.0], circle), [0, 0, 1]) < 1e-12
    assert proj_distance(polar([1.0, 0, 1.0], circle), [1, 0, -1]) < 1e-12
    ell = Quadric(np.diag([1 / 2, 1.0, -1.0]))
    assert pole([0, 0, 1.0], ell) == HomogeneousPoint(0, 0, 1)
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = rng.standard_normal(3)
        assert pole(polar(p, ell), ell) == HomogeneousPoint(*p)


def test_dual_quadric():
    a, b = 3.0, 2.0
    d = dual_quadric(Quadric(np.diag([1 / a, 1 / b, -1.0])))
    assert d.proportional(Quadric(np.diag([a, b, -1.0])))
    assert dual_quadric(Quadric(np.eye(3))).proportional(Quadric(np.eye(3)))
    rng = np.random.default_rng(1)
    m = rng.standard_normal((3, 3))
    Q = Quadric(m + m.T)
    assert dual_quadric(dual_quadric(Q)).proportional(Q)
    with pytest.raises(DegenerateInputError):
        dual_quadric(Quadric(np.diag([1.0, 1.0, 0.0])))


def test_confocal_members():
    fam = confocal_family(2, 1)
    assert fam.member(1, 0.5).proportional(Quadric(np.diag([1 / 1.5, 1 / 0.5, -1.0])))
    assert fam.member(1, 0).proportional(Quadric(np.diag([0.5, 1.0, -1.0])))
    with pytest.raises(SingularMemberError):
        fam.member(1, 2)
    rng = np.random.default_rng(5)
    for _ in range(20):
        a, b = rng.integers(1, 30, 2) / rng.integers(1, 9, 2)
        lam = rng.integers(-40, 40) / 7
        if lam in (a, b):
            continue
        assert confocal_family(a, b).member(1, lam).proportional(confocal_conic(a, b, lam))


def test_isotropy():
    assert classify_line_isotropy(np.cross([0, 0, 1.0], [1, 1j, 0])) == "isotropic"
    assert classify_line_isotropy([0, 0, 1.0]) == "isotropic"
    assert classify_line_isotropy([1.0, 2.0, 3.0]) == "non-isotropic"


def test_conic_predicates():
    assert conic_predicates(Quadric(np.diag([1.0, 1.0, -1.0]))).is_circle
    cp = conic_predicates(Quadric(np.diag([0.5, 1.0, -1.0])))
    assert not cp.is_circle
    real = sorted(f.affine().real[0] for f in cp.complex_foci if f.is_real(1e-9) and f.is_finite())
    assert real == pytest.approx([-1.0, 1.0])
    cc = conic_predicates(Quadric(np.diag([1 / 3, 1 / 3, -1.0])))
    for f in cc.complex_foci:
        if f.is_finite():
            assert np.allclose(f.affine(), 0, atol=1e-9)


def test_lines_in_higher_dimension():
    l = ProjectiveLine.through([1.0, 0, 0, 1], [0, 1.0, 0, 1])
    assert l.contains([0.5, 0.5, 0, 1])
    assert not l.contains([0, 0, 1.0, 1])


def test_encode_roundtrip():
    v = np.array([1 + 2j, 0.5, -1j])
    assert np.allclose(decode(encode(v), complex_pairs=True), v)
    assert encode(np.array([1.0, 2.0])) == [1.0, 2.0]
