import math

import numpy as np
import pytest

from projbilliards import analysis as an
from projbilliards.caustics import joachimsthal
from projbilliards.errors import DegenerateInputError, GeometryError
from projbilliards.polyref import right_spherical, virtual_orbit
from projbilliards.reflect import ellipse, ellipsoid, iterate_orbit, metric_frame


def test_circumcenter_examples():
    assert np.allclose(an.circumcenter((0, 0), (2, 0), (0, 2)), [1, 1])
    assert np.allclose(an.circumcenter((1, 0), (-1, 0), (0, 1)), [0, 0])
    with pytest.raises(DegenerateInputError):
        an.circumcenter((0, 0), (1, 1), (2, 2))


def test_triangular_caustic_value():
    # root of X^2 + 12 X - 12 in (0, 1)
    assert an.triangular_caustic(2, 1) == pytest.approx(-6 + 4 * math.sqrt(3), rel=1e-12)
    assert an.triangular_caustic(1, 1) == 0.75


def test_isosceles_orbit_from_major_vertex():
    a, b = 2.0, 1.0
    lam = an.triangular_caustic(a, b)
    tri = an.triangular_orbit_family(a, b, 4)[0]
    assert np.allclose(tri[0], [math.sqrt(a), 0])
    # the other two vertices are mirror images
    assert np.allclose(tri[1], tri[2] * [1, -1], atol=1e-12)
    # each side touches the caustic
    for i in range(3):
        p, q = tri[i], tri[(i + 1) % 3]
        assert joachimsthal(p, q - p, a, b) * a * b == pytest.approx(lam, rel=1e-10)


@pytest.mark.parametrize("ratio", [1.2, 1.5, 2.0, 3.0, 5.0])
def test_circumcenter_locus_is_ellipse(ratio):
    fit = an.circumcenter_locus(ratio, 1.0, 200)
    assert fit.cls == "ellipse"
    assert fit.residual < 1e-8
    A, B, C, D, E, F = fit.coefficients
    assert abs(B) < 1e-8 and abs(E) < 1e-8
    assert an.mirror_hausdorff(fit.points) < 1e-8


def test_circle_locus_is_a_point():
    fit = an.circumcenter_locus(1.0, 1.0, 50)
    assert fit.cls == "degenerate"
    assert np.allclose(fit.points, 0, atol=1e-12)


def test_fit_conic_known_ellipse():
    t = np.linspace(0, 2 * math.pi, 30, endpoint=False)
    P = np.column_stack([1 + 2 * np.cos(t), -1 + np.sin(t)])
    fit = an.fit_conic(P)
    c = fit.coefficients / fit.coefficients[0]
    # (x-1)^2/4 + (y+1)^2 = 1  ->  x^2 + 4y^2 - 2x + 8y + 1 = 0
    assert np.allclose(c, [1, 0, 4, -2, 8, 1], atol=1e-9)
    H = np.column_stack([np.cosh(t / 3), np.sinh(t / 3)])
    assert an.fit_conic(H).cls == "hyperbola"
    with pytest.raises(DegenerateInputError):
        an.fit_conic(P[:5])


# --- classical Birkhoff distribution ------------------------------------------

@pytest.mark.parametrize("k", [3, 4])
def test_bisectors_regular_in_circle(k):
    t = 0.4 + 2 * math.pi * np.arange(k) / k
    P = np.column_stack([np.cos(t), np.sin(t)])
    data = an.classical_bisector_hyperplanes(P)
    assert max(an.tangency_defects(data, P)) < 1e-12


def test_bisector_collinear():
    with pytest.raises(DegenerateInputError):
        an.classical_bisector_hyperplanes([(0, 0), (1, 0), (2, 0), (1, 1)])


def test_bisectors_on_reflect_orbits():
    a, b = 2.0, 1.0
    surf = ellipse(a, b)
    B = metric_frame(surf)
    for tri in an.triangular_orbit_family(a, b, 10):
        orb = iterate_orbit(B, tri[0], tri[1], 3)
        assert orb.periodic and orb.period == 3
        pts = np.array(orb.points[:3])
        data = an.classical_bisector_hyperplanes(pts)
        assert max(an.tangency_defects(data, [surf.normal(p) for p in pts])) < 1e-9
    rng = np.random.default_rng(0)
    for _ in range(20):
        th = np.sort(rng.uniform(0, 2 * math.pi, 3))
        pts = np.column_stack([math.sqrt(a) * np.cos(th), math.sqrt(b) * np.sin(th)])
        data = an.classical_bisector_hyperplanes(pts)
        assert max(an.tangency_defects(data, [surf.normal(p) for p in pts])) > 1e-4


# --- projective Birkhoff distribution -----------------------------------------

def test_projective_birkhoff_right_spherical():
    B = right_spherical((0, 0), (1, 0), (0, 1))
    rng = np.random.default_rng(1)
    for _ in range(10):
        s, t = rng.uniform(0.1, 0.9, 2)
        orb = virtual_orbit(B, (s, 0), (1 - t, t), 3)
        pts = orb.points[:3]
        frames = [B.frame_point(e) for e in orb.edges[:3]]
        data = an.projective_birkhoff_lines(pts, frames)
        assert max(an.containment_defects(data, [B.edge(e) for e in orb.edges[:3]])) < 1e-9
    pts = [p.copy() for p in pts]
    pts[1] = pts[1] + np.array([0.02, -0.01, 0.0])
    data = an.projective_birkhoff_lines(pts, frames)
    assert max(an.containment_defects(data, [B.edge(e) for e in orb.edges[:3]])) > 1e-4


def test_projective_birkhoff_euclidean_frame():
    rng = np.random.default_rng(2)
    for _ in range(20):
        P = rng.standard_normal((3, 2))
        cl = an.classical_bisector_hyperplanes(P)
        frames = [np.append(L, 0.0) for L in cl.lines]
        pr = an.projective_birkhoff_lines(P, frames)
        for H, T in zip(cl.hyperplanes, pr.hyperplanes):
            # T as a covector has normal (T0, T1), which must be the bisector
            n = T[:2] / np.linalg.norm(T[:2])
            assert 1 - abs(n @ H) < 1e-12


def test_projective_birkhoff_errors():
    with pytest.raises(DegenerateInputError):
        an.projective_birkhoff_lines([(0, 0), (1, 0), (2, 0)], [(0, 1)] * 3)
    with pytest.raises(DegenerateInputError):
        an.projective_birkhoff_lines([(0, 0), (1, 0), (0, 1)], [(1, 1), (0, 0), (0.5, 0.5)])


# --- permitted hyperplanes ----------------------------------------------------

def sample(axes, rng):
    x = rng.standard_normal(len(axes))
    x = x / math.sqrt(np.sum(x * x / axes))
    jet = an.ellipsoid_jet(axes, x)
    e = rng.standard_normal(len(axes))
    return x, (-e if e @ jet.n > 0 else e), jet


def test_sphere_single_hyperplane():
    axes = np.array([2.0, 2.0, 2.0])
    rng = np.random.default_rng(3)
    for _ in range(20):
        x, e, jet = sample(axes, rng)
        assert np.allclose(jet.k, 1 / math.sqrt(2))
        xi, r = an.decompose_direction(jet, e)
        rep = an.permitted_hyperplanes(jet, xi, r)
        assert rep.count == 1
        assert 1 - abs(rep.hyperplanes[0] @ rep.xi) < 1e-12


def test_ellipsoid_two_hyperplanes_match_chasles():
    axes = np.array([3.0, 2.0, 1.0])
    rng = np.random.default_rng(4)
    for _ in range(30):
        x, e, jet = sample(axes, rng)
        xi, r = an.decompose_direction(jet, e)
        rep = an.permitted_hyperplanes(jet, xi, r)
        if rep.exceptional:
            continue
        assert rep.count == 2
        lams, proj, full = an.chasles_hyperplanes(axes, x, e)
        assert an.match_hyperplanes(rep.hyperplanes, proj) < 1e-8
        assert abs(full[0] @ full[1]) < 1e-8


def test_normal_sign_flip_invariance():
    axes = np.array([3.0, 2.0, 1.0])
    rng = np.random.default_rng(5)
    x, e, jet = sample(axes, rng)
    xi, r = an.decompose_direction(jet, e)
    rep = an.permitted_hyperplanes(jet, xi, r)
    flipped = an.SurfaceJet(jet.B, jet.u, -jet.k, -jet.n, -jet.nu, -jet.dnu)
    rep2 = an.permitted_hyperplanes(flipped, xi, r)
    assert np.allclose(rep2.M, -rep.M)
    assert an.match_hyperplanes(rep.hyperplanes, rep2.hyperplanes) < 1e-12


def test_exceptional_direction_is_perturbed():
    axes = np.array([3.0, 2.0, 1.0])
    jet = an.ellipsoid_jet(axes, np.array([0.0, 0.0, 1.0]))
    assert an.in_exceptional_set(np.diag(jet.k), jet.k[0] * np.array([1.0, 0.0]))
    rep = an.permitted_hyperplanes(jet, jet.u[0], 0.7)
    assert rep.perturbed and not rep.exceptional
    assert rep.count <= 2


def test_permitted_errors():
    jet = an.ellipsoid_jet([3.0, 2.0, 1.0], np.array([0.0, 0.0, 1.0]))
    with pytest.raises(GeometryError):
        an.permitted_hyperplanes(jet, jet.n, 1.0)
    flat = an.SurfaceJet(jet.B, jet.u, np.array([0.0, 1.0]), jet.n, jet.nu, jet.dnu)
    with pytest.raises(GeometryError):
        an.permitted_hyperplanes(flat, jet.u[0], 1.0)


def test_numeric_frame_jet_agrees_with_analytic():
    axes = np.array([3.0, 2.0, 1.0])
    B = np.array([1.0, 0.5, 0.0])
    B = B / math.sqrt(np.sum(B * B / axes))
    exact = an.ellipsoid_jet(axes, B)
    numeric = an.ellipsoid_jet(axes, B, frame=lambda x, n: n)
    assert np.allclose(exact.dnu, numeric.dnu, atol=1e-8)


# --- Chasles ------------------------------------------------------------------

def test_chasles_euclidean_plane_matches_joachimsthal():
    a, b = 2.0, 1.0
    p1 = np.array([math.sqrt(2), 0.0])
    p2 = ellipse(a, b).intersect(p1, np.array([-1.0, 0.4]))
    rep = an.chasles_invariance([a, b], None, p1, p2, 50)
    assert rep.counts == {1} and rep.max_drift < 1e-8
    assert rep.parameters[0][0] == pytest.approx(a * b * joachimsthal(p1, p2 - p1, a, b), rel=1e-10)


def test_chasles_minkowski():
    a, b = 2.0, 1.0
    p1 = np.array([math.sqrt(2) * math.cos(0.3), math.sin(0.3)])
    p2 = ellipse(a, b).intersect(p1, np.array([-1.0, 0.3]))
    rep = an.chasles_invariance([a, b], 1, p1, p2, 50)
    assert rep.counts == {1}
    assert rep.max_drift < 1e-8


def test_chasles_3d():
    axes = np.array([3.0, 2.0, 1.0])
    p1 = np.array([1.0, 0.5, 0.3])
    p1 = p1 / math.sqrt(np.sum(p1 * p1 / axes))
    p2 = ellipsoid(axes).intersect(p1, np.array([-1.0, 0.3, -0.5]))
    rep = an.chasles_invariance(axes, None, p1, p2, 50)
    assert rep.counts == {2}
    assert rep.max_drift < 1e-8 and rep.orthogonality < 1e-8


def test_chasles_light_like_rejected():
    p1 = np.array([math.sqrt(2), 0.0])
    p2 = ellipse(2.0, 1.0).intersect(p1, np.array([-1.0, 1.0]))
    with pytest.raises(GeometryError):
        an.chasles_invariance([2.0, 1.0], 1, p1, p2, 5)
