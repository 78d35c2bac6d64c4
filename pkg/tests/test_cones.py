import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import nnls as scipy_nnls

from arrlab import cones as cn
from arrlab.arrangement import enumerate_regions, essentialize, region_cone
from arrlab.cones import (
    Cone,
    classify_projection,
    estimate_volumes_mc,
    exact_volumes_rank2,
    normal_cone_fraction,
    normal_cone_solid_angle,
    project_point,
    project_point_exact,
)
from arrlab.errors import ConvergenceFailure, NotRank2
from arrlab.generators import boolean, braid, threelines
from arrlab.zonotope import zonotope_vertices

from .instances import random_cone, random_pairs, random_point

QUADRANT = Cone.from_exact([(1, 0), (0, 1)])


def within(est, expected, sigmas=3.0):
    return all(abs(v - e) <= sigmas * s + 1e-12 for v, e, s in zip(est.nu, expected, est.stderr))


def sixty_degree_cone():
    ess = essentialize(braid(3))
    region = enumerate_regions(ess.arrangement)[0]
    exact = region_cone(ess.arrangement, region)
    sgn = np.array([1.0 if c == "+" else -1.0 for c in region.signs])[:, None]
    return Cone.from_float(ess.isometric_normals() * sgn, facets=exact.facets)


# --- single projections -----------------------------------------------------------


@pytest.mark.parametrize(
    "z,expected,k",
    [((-1, -1), (0, 0), 0), ((1, 1), (1, 1), 2), ((-1, 2), (0, 2), 1)],
)
def test_quadrant_projection(z, expected, k):
    res = project_point(QUADRANT, z)
    assert np.allclose(res.point, expected, atol=1e-12)
    assert res.face_dim == k == classify_projection(QUADRANT, z)
    exact = project_point_exact(QUADRANT, z)
    assert exact.point == tuple(F(x) for x in expected)
    assert exact.face_dim == k


def test_threelines_region_projects_onto_axis():
    tl = threelines()
    cone = region_cone(tl, "+++")
    exact = project_point_exact(cone, (-3, 1))
    assert exact.point == (0, 1)
    assert exact.tight_set == frozenset({0})
    assert exact.face_dim == 1
    assert np.allclose(project_point(cone, (-3, 1)).point, (0, 1), atol=1e-12)


def test_empty_cone_is_whole_space():
    cone = Cone.from_exact([], dim=2)
    res = project_point(cone, (3, -4))
    assert res.face_dim == 2 and np.allclose(res.point, (3, -4))


def test_nnls_iteration_cap():
    G = -np.eye(3)
    with pytest.raises(ConvergenceFailure):
        cn.nnls(G, np.array([-1.0, -2.0, -3.0]), maxiter=1)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_nnls_satisfies_kkt_and_beats_scipy(seed):
    rng = np.random.default_rng(seed)
    d, m = rng.integers(1, 5), rng.integers(1, 7)
    G = rng.integers(-5, 6, size=(d, m)).astype(float)
    z = rng.normal(size=d) * 3
    x = cn.nnls(G, z)
    grad = G.T @ (z - G @ x)
    eps = 1e-9 * (1 + np.linalg.norm(z)) * (1 + np.abs(G).max())
    assert (x >= 0).all()
    assert (grad <= eps).all()
    assert (np.abs(grad[x > 0]) <= eps).all()
    # scipy's solver is not always optimal, so only require we are no worse
    ref, _ = scipy_nnls(G, z)
    assert np.linalg.norm(G @ x - z) <= np.linalg.norm(G @ ref - z) + 1e-9


def check_pair(cone, z):
    zf = np.array([float(x) for x in z])
    res = project_point(cone, zf)
    ex = project_point_exact(cone, z)
    y_ex = np.array([float(x) for x in ex.point])
    nz = np.linalg.norm(zf)
    assert np.max(np.abs(res.point - y_ex), initial=0.0) <= 1e-9
    assert np.linalg.norm(res.point + res.residual - zf) <= 1e-9 * (1 + nz)
    assert abs(res.point @ res.residual) <= 1e-9 * (1 + nz**2)
    assert (cone.rows @ res.point >= -1e-9 * (1 + nz)).all()
    # residual lies in the polar: a nonnegative combination of the negated rows
    _, dist = scipy_nnls(-cone.rows.T, res.residual)
    assert dist <= 1e-9 * (1 + nz)
    # exact side: Moreau holds with zero error
    assert sum(a * b for a, b in zip(ex.point, ex.residual)) == 0
    assert ex.face_dim == res.face_dim


@pytest.mark.parametrize("seed", range(5))
def test_float_matches_exact_oracle(seed):
    for cone, z in random_pairs(40, seed):
        check_pair(cone, z)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_projection_idempotent_and_scale_invariant(seed):
    rng = random.Random(seed)
    d = rng.randint(1, 4)
    cone = random_cone(rng, d, rng.randint(1, 6))
    z = np.array([float(x) for x in random_point(rng, d)])
    y = project_point(cone, z).point
    assert np.allclose(project_point(cone, y).point, y, atol=1e-9)
    for c in (0.01, 7.0, 1e4):
        assert np.allclose(project_point(cone, c * z).point, c * y, atol=1e-9 * (1 + c * np.linalg.norm(z)))
        assert classify_projection(cone, c * z) == classify_projection(cone, z)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_inside_and_polar_points(seed):
    rng = random.Random(seed)
    d = rng.randint(1, 4)
    cone = random_cone(rng, d, rng.randint(1, 6))
    weights = np.array([rng.random() for _ in range(cone.m)])
    inside = cone.witness * rng.uniform(0.1, 3)
    assert np.allclose(project_point(cone, inside).point, inside, atol=1e-9)
    assert classify_projection(cone, inside) == d
    polar = cone.polar_generators.T @ weights
    assert np.allclose(project_point(cone, polar).point, 0, atol=1e-9 * (1 + np.linalg.norm(polar)))


def test_batched_projection_matches_single():
    rng = random.Random(11)
    for _ in range(20):
        d = rng.randint(2, 4)
        cone = random_cone(rng, d, rng.randint(2, 6))
        Z = cn.sample_directions(d, 200, seed=rng.randint(0, 100))
        Y = cn.project_points(cone, Z)
        for z, y in zip(Z, Y):
            assert np.allclose(project_point(cone, z).point, y, atol=1e-9)


# --- exact planar volumes -------------------------------------------------------


def test_rank2_examples():
    assert exact_volumes_rank2(QUADRANT) == pytest.approx([0.25, 0.5, 0.25], abs=1e-12)
    assert exact_volumes_rank2(sixty_degree_cone()) == pytest.approx([1 / 3, 0.5, 1 / 6], abs=1e-12)
    half = Cone.from_exact([(0, 1)])
    assert exact_volumes_rank2(half) == [0.0, 0.5, 0.5]
    assert exact_volumes_rank2(Cone.from_exact([], dim=3)) == [0.0, 0.0, 0.0, 1.0]


def test_rank2_with_lineality():
    arr = braid(3)
    for region in enumerate_regions(arr):
        nu = exact_volumes_rank2(region_cone(arr, region))
        assert nu == pytest.approx([0.0, 1 / 3, 0.5, 1 / 6], abs=1e-12)


def test_rank2_rejects_rank3():
    with pytest.raises(NotRank2):
        exact_volumes_rank2(region_cone(boolean(3), "+++"))


def test_rank2_threelines_regions_sum():
    tl = threelines()
    total = np.sum([exact_volumes_rank2(region_cone(tl, r)) for r in enumerate_regions(tl)], axis=0)
    assert total == pytest.approx([2, 3, 1], abs=1e-9)


# --- Monte Carlo --------------------------------------------------------------------


def test_mc_quadrant():
    est = estimate_volumes_mc(QUADRANT, 10**6, seed=1)
    assert within(est, [0.25, 0.5, 0.25])
    assert sum(est.counts) == est.samples == 10**6
    assert sum(est.nu) == pytest.approx(1.0, abs=1e-15)


def test_mc_sixty_degree_region():
    est = estimate_volumes_mc(sixty_degree_cone(), 10**6, seed=2)
    assert within(est, [1 / 3, 0.5, 1 / 6])


def test_mc_half_plane():
    est = estimate_volumes_mc(Cone.from_exact([(1, 1)]), 10**6, seed=3)
    assert est.counts[0] == 0
    assert within(est, [0.0, 0.5, 0.5])


def test_mc_octant_profile():
    est = estimate_volumes_mc(region_cone(boolean(3), "+-+"), 200_000, seed=4)
    assert within(est, [1 / 8, 3 / 8, 3 / 8, 1 / 8])


def test_mc_deterministic_across_workers():
    cone = region_cone(threelines(), "+-+")
    n = 3 * cn.BLOCK + 17
    a = estimate_volumes_mc(cone, n, seed=9, workers=1)
    b = estimate_volumes_mc(cone, n, seed=9, workers=4)
    assert a == b
    c = estimate_volumes_mc(cone, n, seed=10, workers=1)
    assert c.counts != a.counts


def test_sample_directions_prefix_stable():
    a = cn.sample_directions(3, 1000, seed=5)
    b = cn.sample_directions(3, cn.BLOCK + 5, seed=5)
    assert np.array_equal(a, b[:1000])
    assert np.allclose(np.linalg.norm(b, axis=1), 1.0)
    assert not np.array_equal(a, cn.sample_directions(3, 1000, seed=5, stream=1))


def test_full_dimensional_fraction_equals_membership():
    cone = region_cone(boolean(3), "++-")
    n = 100_000
    est = estimate_volumes_mc(cone, n, seed=12)
    Z = cn.sample_directions(3, n, seed=12)
    inside = int((Z @ cone.rows.T > 0).all(axis=1).sum())
    assert abs(est.counts[3] - inside) <= 2  # only measure-zero boundary cases may differ


# --- zonotope vertex cones --------------------------------------------------------------


def test_normal_cone_square_corner():
    b2 = boolean(2)
    zono = zonotope_vertices(b2, enumerate_regions(b2))
    est = normal_cone_solid_angle(zono, "++", 10**6, seed=1)
    assert abs(est.nu[1] - 0.25) <= 3 * est.stderr[1]


def test_normal_cones_sum_to_vertex_angle_sum():
    tl = threelines()
    regions = enumerate_regions(tl)
    zono = zonotope_vertices(tl, regions)
    ests = [normal_cone_solid_angle(zono, r, 200_000, seed=3, stream=j) for j, r in enumerate(regions)]
    total = sum(e.nu[1] for e in ests)
    se = np.sqrt(sum(e.stderr[1] ** 2 for e in ests))
    assert abs(total - 2) <= 4 * se


def test_normal_cone_matches_region_nu0():
    b3 = boolean(3)
    zono = zonotope_vertices(b3, enumerate_regions(b3))
    for signs in ("+++", "-+-"):
        a = normal_cone_solid_angle(zono, signs, 100_000, seed=8)
        b = estimate_volumes_mc(region_cone(b3, signs), 100_000, seed=8)
        assert a.counts[1] == b.counts[0]


def test_normal_cone_negation_seed_paired():
    tl = threelines()
    for r in enumerate_regions(tl):
        rays = region_cone(tl, r).extreme_rays()
        neg_rays = region_cone(tl, -r).extreme_rays()
        Z = cn.sample_directions(2, 50_000, seed=4)
        assert normal_cone_fraction(rays, Z) == normal_cone_fraction(neg_rays, -Z)
