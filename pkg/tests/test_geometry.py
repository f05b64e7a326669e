"""Geometric toolbox tests.

Closed-form values cover the box/simplex cases; shapely (polygon buffering)
and scipy's HalfspaceIntersection serve as independent oracles for dilated
areas, dilated centroids, and vertex enumeration on random polytopes.
"""

import numpy as np
import pytest
from scipy.spatial import HalfspaceIntersection
from shapely.geometry import Point as ShapelyPoint, Polygon

from cutplane import geometry
from cutplane.errors import DimensionTooLarge, LPInfeasible
from cutplane.geometry import Polytope
from cutplane.rng import RngStream


def shapely_polygon(K):
    """Shapely polygon from a 2-D polytope's vertices (ccw hull order)."""
    V = K.vertices
    c = V.mean(axis=0)
    order = np.argsort(np.arctan2(V[:, 1] - c[1], V[:, 0] - c[0]))
    return Polygon(V[order])


# -- width ------------------------------------------------------------------


def test_width_cube_axis(cube2):
    assert geometry.width(cube2, [1.0, 0.0]) == pytest.approx(2.0)


def test_width_ball_approx_any_direction():
    # outer approximation with 2 d^2 = 8 tangent facets: the width is at
    # least 2 and overshoots by at most the corner secant factor sec(pi/8)
    K = Polytope.unit_ball(2)
    gen = RngStream(3, 0).generator()
    hi = 2.0 / np.cos(np.pi / 8)
    for _ in range(10):
        u = gen.standard_normal(2)
        w = geometry.width(K, u)
        assert 2.0 - 1e-9 <= w <= hi + 1e-9


def test_width_simplex_diagonal(triangle):
    u = np.array([1.0, 1.0]) / np.sqrt(2.0)
    assert geometry.width(triangle, u) == pytest.approx(1.0 / np.sqrt(2.0))


def test_width_nonnegative_random():
    for i in range(5):
        K = geometry.random_polytope(3, RngStream(10, i))
        u = RngStream(11, i).generator().standard_normal(3)
        assert geometry.width(K, u) >= 0.0


# -- projection / membership -----------------------------------------------


def test_project_cube_face(cube2):
    assert geometry.project(cube2, [3.0, 0.0]) == pytest.approx([1.0, 0.0])


def test_project_interior_point_is_fixed(cube2):
    x = np.array([0.3, -0.7])
    assert geometry.project(cube2, x) is x


def test_project_halfplane_in_box():
    K = Polytope.box([-1, -1], [1, 1]).with_cut([1.0, 0.0], 0.0)
    assert geometry.project(K, [-2.0, 0.5]) == pytest.approx([0.0, 0.5])


def test_member_dilated_face_and_corner(cube2):
    assert geometry.member_dilated(cube2, 0.5, [1.4, 0.0])
    assert not geometry.member_dilated(cube2, 0.5, [1.6, 0.0])
    # corner distance sqrt(2)*0.4 ~ 0.566 > 0.5
    assert not geometry.member_dilated(cube2, 0.5, [1.4, 1.4])


def test_distance_batch_matches_pointwise_projection_3d():
    for seed in range(3):
        K = geometry.random_polytope(3, RngStream(5, seed))
        X = RngStream(6, seed).generator().uniform(-2.5, 2.5, size=(200, 3))
        d_batch = geometry._dist_batch(K, X)
        for x, dd in zip(X, d_batch):
            ref = 0.0 if K.contains(x) else \
                np.linalg.norm(x - geometry.project(K, x))
            assert dd == pytest.approx(ref, abs=1e-9)


def test_dilated_membership_agrees_with_shapely_buffer():
    for seed in range(3):
        K = geometry.random_polytope(2, RngStream(21, seed))
        poly = shapely_polygon(K)
        gen = RngStream(22, seed).generator()
        X = gen.uniform(-2.0, 2.0, size=(500, 2))
        for r in (0.05, 0.4):
            buffered = poly.buffer(r, quad_segs=64)
            mine = geometry.member_dilated_batch(K, r, X, tol=0.0)
            for x, m in zip(X, mine):
                ref = buffered.distance(ShapelyPoint(x)) <= 1e-9
                if m != ref:
                    # disagreement allowed only within tolerance of the rim
                    assert abs(poly.exterior.distance(ShapelyPoint(x)) - r) \
                        < 1e-6


# -- vertex enumeration -----------------------------------------------------


@pytest.mark.parametrize("d", [2, 3])
def test_vertices_match_scipy_halfspace_intersection(d):
    for seed in range(4):
        K = geometry.random_polytope(d, RngStream(31, 10 * d + seed))
        # scipy wants A x + b <= 0; ours is A x >= b
        hs = np.hstack([-K.A, K.b[:, None]])
        ref = HalfspaceIntersection(hs, K.witness).intersections
        ref = np.unique(np.round(ref, 7), axis=0)
        mine = np.unique(np.round(K.vertices, 7), axis=0)
        assert len(mine) == len(ref)
        assert np.allclose(mine, ref, atol=1e-6)


# -- sampling and centroids ------------------------------------------------


def test_sample_cube_mean_near_center(cube2):
    X = geometry.sample_dilated(cube2, 0.0, 10_000, RngStream(40, 0))
    assert np.max(np.abs(X.mean(axis=0))) < 0.05


def test_sample_dilated_cube_stays_in_dilation(cube2):
    X = geometry.sample_dilated(cube2, 1.0, 4000, RngStream(41, 0))
    assert np.all(geometry.member_dilated_batch(cube2, 1.0, X))
    assert np.max(np.abs(X.mean(axis=0))) < 0.05


def test_sample_triangle_mean_near_centroid(triangle):
    X = geometry.sample_dilated(triangle, 0.0, 10_000, RngStream(42, 0))
    assert np.max(np.abs(X.mean(axis=0) - 1.0 / 3.0)) < 0.05


def test_sampling_is_deterministic(triangle):
    a = geometry.sample_dilated(triangle, 0.1, 500, RngStream(43, 0))
    b = geometry.sample_dilated(triangle, 0.1, 500, RngStream(43, 0))
    assert np.array_equal(a, b)


def test_centroid_symmetric_body_hits_center(cube2):
    # 4 SE band: the SE is chain-based and honest, so 3 SE flakes ~1% of
    # the time across the four coordinate/radius combinations tested here
    for r in (0.0, 0.5):
        est = geometry.centroid_dilated(cube2, r, 8192, RngStream(44, int(r)))
        assert np.all(np.abs(est.point) <= 4.0 * est.se + 1e-12)


def test_centroid_se_is_calibrated(cube2):
    zs = []
    for sid in range(8):
        est = geometry.centroid_dilated(cube2, 0.0, 8192, RngStream(44, sid))
        zs.extend(est.point / est.se)
    zs = np.abs(zs)
    assert np.max(zs) < 5.0
    assert np.mean(zs) < 2.0         # honest SE: |z| averages ~0.8


def test_centroid_drifts_to_steiner_point(triangle):
    near = geometry.centroid_dilated(triangle, 0.0, 262144, RngStream(45, 0),
                                     chains=8192)
    far = geometry.centroid_dilated(triangle, 2.0, 262144, RngStream(45, 1),
                                    chains=8192)
    gap = np.linalg.norm(far.point - near.point)
    joint_se = np.linalg.norm(near.se) + np.linalg.norm(far.se)
    assert gap > 5.0 * joint_se


def test_centroid_matches_shapely_buffer_centroid():
    for seed in range(3):
        K = geometry.random_polytope(2, RngStream(46, seed))
        poly = shapely_polygon(K)
        for r in (0.0, 0.5):
            est = geometry.centroid_dilated(K, r, 16384,
                                            RngStream(47, 10 * seed + int(r)))
            ref = poly.buffer(r, quad_segs=128).centroid if r > 0 \
                else poly.centroid
            err = np.linalg.norm(est.point - [ref.x, ref.y])
            assert err < 4.0 * np.linalg.norm(est.se) + 0.01


# -- volumes ----------------------------------------------------------------


def test_volume_cube(cube2):
    est = geometry.volume_dilated(cube2, 0.0, 100_000, RngStream(50, 0))
    assert est.value == pytest.approx(4.0, rel=0.02)


def test_volume_cube_dilated_steiner_formula(cube2):
    est = geometry.volume_dilated(cube2, 1.0, 100_000, RngStream(50, 1))
    assert est.value == pytest.approx(12.0 + np.pi, rel=0.02)


def test_volume_thin_slab_limit_is_disc():
    eps = 1e-4
    K = Polytope.box([-eps, -eps], [eps, eps])
    est = geometry.volume_dilated(K, 1.0, 200_000, RngStream(50, 2))
    assert est.value == pytest.approx(np.pi, rel=0.05)


def test_volume_matches_shapely_buffer_area():
    for seed in range(3):
        K = geometry.random_polytope(2, RngStream(51, seed))
        poly = shapely_polygon(K)
        for r in (0.0, 0.3):
            est = geometry.volume_dilated(K, r, 100_000,
                                          RngStream(52, 10 * seed + int(10 * r)))
            ref = poly.buffer(r, quad_segs=128).area if r > 0 else poly.area
            assert est.value == pytest.approx(ref, abs=3.5 * est.se + 1e-3)


def test_volume_rejects_large_dimension():
    K = Polytope.unit_ball(5)
    with pytest.raises(DimensionTooLarge):
        geometry.volume_dilated(K, 0.0, 10, RngStream(53, 0))


# -- inscribed ellipsoid ----------------------------------------------------


def test_john_cube_is_unit_disc(cube2):
    E = geometry.john_ellipsoid(cube2)
    assert E.center == pytest.approx([0.0, 0.0], abs=1e-5)
    assert E.shape == pytest.approx(np.eye(2), abs=1e-4)


def test_john_box_semi_axes():
    K = Polytope.box([-2.0, -1.0], [2.0, 1.0])
    E = geometry.john_ellipsoid(K)
    eigvals = np.sort(np.linalg.eigvalsh(E.shape))
    assert np.sqrt(eigvals) == pytest.approx([1.0, 2.0], abs=1e-3)


def test_john_triangle_containments():
    A = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])
    b = np.array([0.0, 0.0, -3.0])
    K = Polytope(A, b, bounding_radius=3.0 * np.sqrt(2.0))
    eps = 1e-6
    E = geometry.john_ellipsoid(K, eps)
    assert K.contains(E.center)
    # E inside K: for each facet, <a, c> - b >= ||shape^{1/2} a||
    L = np.linalg.cholesky(E.shape)
    for a, off in zip(K.A, K.b):
        assert float(a @ E.center) - off >= np.linalg.norm(L.T @ a) - 1e-6
    # K inside the d(1+eps)-dilation of E about its center
    W = E.whitening()
    factor = K.dim * (1.0 + eps)
    for v in K.vertices:
        assert np.linalg.norm(W @ (v - E.center)) <= factor + 1e-6


# -- curvature path ---------------------------------------------------------


def test_curvature_path_degenerates_for_ball():
    # path of a ball is a single point; residual spread is MC noise at the
    # largest grid radius (~8R), observed ~0.1 at this budget
    K = Polytope.unit_ball(2)
    disc = geometry.discretize_curvature_path(K, 8, 256, RngStream(60, 0))
    assert np.max(np.abs(disc.points)) < 0.15
    assert disc.transformed_length < 0.3 * 4 * K.dim ** 3


def test_curvature_path_symmetric_body_stays_centered(cube2):
    disc = geometry.discretize_curvature_path(cube2, 8, 256, RngStream(60, 1))
    assert np.max(np.abs(disc.points)) < 0.15


def test_curvature_path_triangle_endpoints(triangle):
    disc = geometry.discretize_curvature_path(triangle, 8, 512,
                                              RngStream(60, 2))
    assert disc.points[0] == pytest.approx([1 / 3, 1 / 3], abs=0.05)
    # far end approaches the Steiner point; shapely's buffered centroid at
    # the grid's largest radius is the reference
    poly = shapely_polygon(triangle)
    r_far = disc.traced_radii[-1]
    ref = poly.buffer(r_far, quad_segs=256).centroid
    assert disc.points[-1] == pytest.approx([ref.x, ref.y], abs=0.05)
    # points all lie in the source triangle
    assert np.all(geometry.member_dilated_batch(triangle, 0.0, disc.points,
                                                tol=1e-6))


def test_curvature_path_radii_increase(triangle):
    disc = geometry.discretize_curvature_path(triangle, 8, 128,
                                              RngStream(60, 3))
    assert disc.radii[0] == 0.0
    assert np.all(np.diff(disc.radii) > 0.0)
    assert disc.pieces == 8
    assert len(disc.points) == 9


# -- cuts, pruning, degeneracy ---------------------------------------------


def test_with_cut_keeps_feasible_side(cube2):
    K = cube2.with_cut([1.0, 0.0], 0.0)
    assert K.contains([0.5, 0.0])
    assert not K.contains([-0.5, 0.0])


def test_cut_removing_everything_raises(cube2):
    with pytest.raises(LPInfeasible):
        cube2.with_cut([1.0, 0.0], 5.0)


def test_opposite_cuts_freeze_degenerate_slab(cube2):
    # a zero-width slab has no interior slack, which triggers the freeze
    K = cube2.with_cut([1.0, 0.0], 0.2).with_cut([-1.0, 0.0], -0.2)
    assert K.frozen
    assert K.witness[0] == pytest.approx(0.2, abs=1e-6)
    assert abs(K.witness[1]) <= 1.0 + 1e-9
    # frozen sets absorb further cuts
    assert K.with_cut([1.0, 0.0], 0.9) is K


def test_pruning_preserves_vertex_set():
    gen = RngStream(70, 0).generator()
    K = Polytope.unit_ball(2)
    for _ in range(40):
        u = gen.standard_normal(2)
        u /= np.linalg.norm(u)
        K = K.with_cut(u, float(u @ K.witness) - gen.uniform(0.05, 0.3))
    before = np.unique(np.round(K.vertices, 8), axis=0)
    P = K.pruned_fast()
    assert P.n_halfspaces <= K.n_halfspaces
    after = np.unique(np.round(P.vertices, 8), axis=0)
    assert len(before) == len(after)
    assert np.allclose(before, after, atol=1e-7)


def test_tightened_shrinks_bounding_radius(triangle):
    T = geometry.tightened(triangle)
    assert T.bounding_radius <= triangle.bounding_radius
    assert np.array_equal(T.A, triangle.A)
