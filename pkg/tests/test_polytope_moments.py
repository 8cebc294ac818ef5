import math

import numpy as np
import pytest

from isoconst import bodies
from isoconst.distributions import DistributionSpec, sample_matrix
from isoconst.errors import ApexOnBoundary, NumericallySingular
from isoconst.hull import convex_hull, symmetric_hull, transform
from isoconst.oracle import cone_mc, rejection_mc
from isoconst.polytope_moments import (
    barycenter,
    cone_decomposition,
    covariance,
    moment_matrix,
    second_moment_scalar,
    summarize,
    volume,
)


def gaussian_hull(rows, cols, seed, symmetric=False):
    pts = sample_matrix(DistributionSpec.GAUSSIAN, rows, cols, seed).data
    return (symmetric_hull(pts) if symmetric else convex_hull(pts)), pts


def test_cone_decomposition_cube_and_cross():
    cube = bodies.cube(3)
    np.testing.assert_allclose(cone_decomposition(cube, np.zeros(3)), 1.0)
    cross = bodies.cross_polytope(4)
    np.testing.assert_allclose(cone_decomposition(cross, np.zeros(4)), 0.5)


def test_cone_decomposition_triangle_by_hand():
    tri = convex_hull(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    heights = cone_decomposition(tri, np.array([1.0 / 3.0, 1.0 / 3.0]))
    # the hypotenuse facet sits at distance (1 - 2/3)/sqrt(2), the axes at 1/3
    assert sorted(np.round(heights, 12)) == pytest.approx(
        sorted([1.0 / 3.0, 1.0 / 3.0, (1.0 - 2.0 / 3.0) / math.sqrt(2)])
    )


def test_apex_on_boundary():
    cube = bodies.cube(2)
    with pytest.raises(ApexOnBoundary):
        cone_decomposition(cube, np.array([1.0, 0.0]))


@pytest.mark.parametrize("n", [1, 2, 3, 5, 7])
def test_volume_closed_forms(n):
    assert volume(bodies.cube(n), np.zeros(n)) == pytest.approx(2.0**n, rel=1e-12)
    assert volume(bodies.cross_polytope(n), np.zeros(n)) == pytest.approx(
        2.0**n / math.factorial(n), rel=1e-12
    )


def test_volume_apex_independence():
    poly, _ = gaussian_hull(20, 4, seed=2)
    apexes = [barycenter(poly), poly.vertices.mean(axis=0)]
    vols = [volume(poly, a) for a in apexes]
    assert vols[0] == pytest.approx(vols[1], rel=1e-9)


def test_volume_against_rejection_oracle():
    poly, _ = gaussian_hull(15, 3, seed=7)
    est = rejection_mc(poly, 10**6, seed=1)
    exact = volume(poly)
    assert abs(exact - est.volume_est) < 4 * est.volume_se


def test_second_moment_cube_and_segment():
    for n in (2, 3, 6):
        assert second_moment_scalar(bodies.cube(n), np.zeros(n)) == pytest.approx(n / 3.0)
    seg = convex_hull(np.array([[-1.0], [1.0]]))
    assert second_moment_scalar(seg, np.zeros(1)) == pytest.approx(1.0 / 3.0)


def test_second_moment_against_cone_sampler():
    poly, _ = gaussian_hull(32, 4, seed=9, symmetric=True)
    est = cone_mc(poly, np.zeros(4), 10**6, seed=3)
    exact = second_moment_scalar(poly, np.zeros(4))
    assert abs(exact - est.second_moment_est) < 4 * est.second_moment_se


def test_moment_matrix_cube_identity():
    for n in (2, 4):
        np.testing.assert_allclose(
            moment_matrix(bodies.cube(n), np.zeros(n)), np.eye(n) / 3.0, atol=1e-12
        )


def test_moment_matrix_cross_polytope():
    n = 3
    m = moment_matrix(bodies.cross_polytope(n), np.zeros(n))
    want = 2.0 / ((n + 1) * (n + 2)) * np.eye(n)
    np.testing.assert_allclose(m, want, atol=1e-12)
    est = rejection_mc(bodies.cross_polytope(n), 4 * 10**5, seed=5)
    np.testing.assert_array_less(
        np.abs(m - est.second_moment_matrix_est),
        4 * est.second_moment_matrix_se + 1e-12,
    )


def test_moment_matrix_symmetry_under_negation():
    poly, _ = gaussian_hull(16, 3, seed=4, symmetric=True)
    m = moment_matrix(poly, np.zeros(3))
    np.testing.assert_allclose(m, m.T, atol=1e-12)
    flipped = moment_matrix(transform(poly, -np.eye(3)), np.zeros(3))
    np.testing.assert_allclose(m, flipped, atol=1e-10)


def test_barycenter_symmetric_and_shifted_cube():
    poly, _ = gaussian_hull(12, 3, seed=11, symmetric=True)
    np.testing.assert_allclose(barycenter(poly), 0.0, atol=1e-10)
    shifted = transform(bodies.cube(3), np.eye(3), np.ones(3))  # [0, 2]^3
    np.testing.assert_allclose(barycenter(shifted), 1.0, atol=1e-12)


def test_barycenter_against_rejection_oracle():
    poly, _ = gaussian_hull(15, 3, seed=13)
    est = rejection_mc(poly, 10**6, seed=2)
    np.testing.assert_array_less(
        np.abs(barycenter(poly) - est.mean_est), 4 * est.mean_se
    )


def test_covariance_translation_invariance():
    poly, _ = gaussian_hull(18, 3, seed=17)
    cov = covariance(poly)
    moved = transform(poly, np.eye(3), np.array([3.0, -2.0, 0.5]))
    np.testing.assert_allclose(cov, covariance(moved), atol=1e-10)


def test_covariance_linear_image():
    rng = np.random.default_rng(23)
    poly, _ = gaussian_hull(14, 4, seed=19)
    cov = covariance(poly)
    a = rng.normal(size=(4, 4)) + 2.0 * np.eye(4)
    mapped = transform(poly, a)
    np.testing.assert_allclose(covariance(mapped), a @ cov @ a.T, rtol=1e-8, atol=1e-10)


def test_covariance_numerically_singular():
    flat = transform(bodies.cube(3), np.diag([1.0, 1.0, 1e-7]))
    with pytest.raises(NumericallySingular):
        covariance(flat)


def test_summary_invariants():
    poly, pts = gaussian_hull(24, 4, seed=29)
    s = summarize(poly, apex=pts.mean(axis=0))
    # trace identity
    assert np.trace(s.moment_matrix) == pytest.approx(s.second_moment_scalar, rel=1e-10)
    # covariance shift identity
    d = s.barycenter - s.apex
    np.testing.assert_allclose(
        s.covariance, s.moment_matrix - np.outer(d, d), atol=1e-10
    )
    eig = np.linalg.eigvalsh(s.covariance)
    assert eig[0] > 0


def test_apex_independence_of_summary():
    poly, _ = gaussian_hull(20, 3, seed=31)
    a1 = poly.vertices.mean(axis=0)
    a2 = barycenter(poly)
    s1, s2 = summarize(poly, a1), summarize(poly, a2)
    assert s1.volume == pytest.approx(s2.volume, rel=1e-9)
    np.testing.assert_allclose(s1.barycenter, s2.barycenter, atol=1e-9)
    np.testing.assert_allclose(s1.covariance, s2.covariance, rtol=1e-9, atol=1e-12)


def test_boundary_identity_for_symmetric_bodies():
    # n * vol equals the facet sum both through heights and raw offsets
    poly, _ = gaussian_hull(20, 3, seed=37, symmetric=True)
    from isoconst.simplex_geometry import facet_volumes

    areas = facet_volumes(poly.facet_points())
    vol = volume(poly, np.zeros(3))
    assert float(poly.offsets @ areas) / 3.0 == pytest.approx(vol, rel=1e-10)
    heights = cone_decomposition(poly, np.zeros(3))
    assert float(heights @ areas) == pytest.approx(3.0 * vol, rel=1e-12)


def test_oracle_equivalence_batch():
    # twenty seeded gaussian polytopes at (n=3, N=12)
    for seed in range(3):
        poly, _ = gaussian_hull(13, 3, seed=100 + seed)
        est = rejection_mc(poly, 2 * 10**5, seed=seed)
        assert abs(volume(poly) - est.volume_est) < 4 * est.volume_se


def test_moment_summary_json_round_trip():
    from isoconst.polytope_moments import MomentSummary

    poly, _ = gaussian_hull(12, 3, seed=41)
    s = summarize(poly)
    back = MomentSummary.from_dict(s.to_dict())
    assert back.volume == s.volume
    np.testing.assert_array_equal(back.covariance, s.covariance)
    np.testing.assert_array_equal(back.moment_matrix, s.moment_matrix)
