import math

import numpy as np
import pytest

from helpers import chord_length, section_area_3d, variational_isotropic_min
from isoconst import bodies
from isoconst.distributions import DistributionSpec, sample_matrix
from isoconst.errors import NotVolumePreserving, NumericallySingular
from isoconst.hull import convex_hull, transform
from isoconst.isotropic import (
    functional_value,
    isotropic_constant,
    random_volume_preserving_map,
)
from isoconst.polytope_moments import covariance, summarize

L_CUBE = 1.0 / math.sqrt(12.0)


def gaussian_hull(rows, cols, seed):
    return convex_hull(sample_matrix(DistributionSpec.GAUSSIAN, rows, cols, seed).data)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_cube_constant(n):
    res = isotropic_constant(bodies.cube(n))
    assert res.l_constant == pytest.approx(L_CUBE, abs=1e-10)


def test_affine_images_of_cube_share_the_constant():
    rng = np.random.default_rng(7)
    cube = bodies.cube(4)
    for _ in range(10):
        a = rng.normal(size=(4, 4)) + 2.0 * np.eye(4)
        image = transform(cube, a, rng.normal(size=4))
        assert isotropic_constant(image).l_constant == pytest.approx(L_CUBE, abs=1e-8)


def test_regular_simplex_against_variational_oracle():
    poly = bodies.regular_simplex(3)
    s = summarize(poly)
    res = isotropic_constant(poly, s)
    oracle_min = variational_isotropic_min(
        s.covariance, s.volume, np.random.default_rng(99), n_maps=10**4
    )
    assert 3.0 * res.l_constant**2 == pytest.approx(oracle_min, abs=1e-4)


def test_functional_value_identity_on_unit_cube():
    n = 3
    unit_cube = transform(bodies.cube(n), 0.5 * np.eye(n))  # volume 1, centered
    value = functional_value(unit_cube, np.eye(n))
    assert value == pytest.approx(n / 12.0, rel=1e-12)


def test_whitening_map_attains_the_infimum():
    poly = gaussian_hull(20, 4, seed=3)
    res = isotropic_constant(poly)
    attained = functional_value(poly, res.linear_map, res.translation)
    assert attained == pytest.approx(4.0 * res.l_constant**2, abs=1e-9)


def test_whitening_map_properties():
    poly = gaussian_hull(25, 5, seed=4)
    res = isotropic_constant(poly)
    assert abs(abs(np.linalg.det(res.linear_map)) - 1.0) < 1e-9
    mapped = transform(poly, res.linear_map, res.translation)
    cov = covariance(mapped)
    lam = np.trace(cov) / poly.dim
    off = cov - lam * np.eye(poly.dim)
    assert np.abs(off).max() / lam < 1e-8


def test_rotation_leaves_functional_unchanged_on_symmetric_body():
    from isoconst.hull import symmetric_hull

    pts = sample_matrix(DistributionSpec.GAUSSIAN, 12, 3, seed=5).data
    poly = symmetric_hull(pts)
    q, _ = np.linalg.qr(np.random.default_rng(6).normal(size=(3, 3)))
    base = functional_value(poly, np.eye(3))
    rotated = functional_value(poly, q)
    assert rotated == pytest.approx(base, rel=1e-10)


def test_variational_inequality_random_maps():
    rng = np.random.default_rng(11)
    for seed in (21, 22, 23):
        poly = gaussian_hull(14, 3, seed=seed)
        res = isotropic_constant(poly)
        floor = 3.0 * res.l_constant**2 - 1e-9
        for _ in range(30):
            a, b = random_volume_preserving_map(3, rng)
            assert functional_value(poly, a, b) >= floor


def test_affine_invariance_with_rehulling():
    rng = np.random.default_rng(13)
    base_pts = sample_matrix(DistributionSpec.GAUSSIAN, 18, 4, seed=8).data
    values = []
    for _ in range(10):
        a = rng.normal(size=(4, 4)) + 2.0 * np.eye(4)
        b = rng.normal(size=4)
        values.append(isotropic_constant(convex_hull(base_pts @ a.T + b)).l_constant)
    values = np.asarray(values)
    assert (values.max() - values.min()) / values.min() < 1e-7


def test_not_volume_preserving_rejected():
    with pytest.raises(NotVolumePreserving):
        functional_value(bodies.cube(3), 2.0 * np.eye(3))


def test_singular_covariance_rejected():
    squashed = transform(bodies.cube(3), np.diag([1.0, 1.0, 1e-7]))
    with pytest.raises(NumericallySingular):
        isotropic_constant(squashed)


def test_log_det_cov_value():
    res = isotropic_constant(bodies.cube(4))
    assert res.log_det_cov == pytest.approx(4 * math.log(1.0 / 3.0), abs=1e-12)


@pytest.mark.parametrize(
    "make_poly",
    [
        lambda: bodies.cube(2),
        lambda: bodies.regular_simplex(2),
        lambda: gaussian_hull(9, 2, seed=31),
    ],
)
def test_slicing_band_2d(make_poly):
    poly = make_poly()
    res = isotropic_constant(poly)
    iso = transform(poly, res.linear_map, res.translation)
    s = summarize(iso)
    unit = transform(iso, np.eye(2) / s.volume ** (1.0 / 2))
    rng = np.random.default_rng(3)
    best = 0.0
    b = summarize(unit).barycenter
    for _ in range(1000):
        theta = rng.standard_normal(2)
        theta /= np.linalg.norm(theta)
        u = np.array([-theta[1], theta[0]])
        best = max(best, chord_length(unit, b, u))
    assert 0.2 < best * res.l_constant < 0.7


@pytest.mark.parametrize(
    "make_poly",
    [lambda: bodies.cube(3), lambda: gaussian_hull(12, 3, seed=37)],
)
def test_slicing_band_3d(make_poly):
    poly = make_poly()
    res = isotropic_constant(poly)
    iso = transform(poly, res.linear_map, res.translation)
    s = summarize(iso)
    unit = transform(iso, np.eye(3) / s.volume ** (1.0 / 3))
    rng = np.random.default_rng(5)
    b = summarize(unit).barycenter
    best = 0.0
    for _ in range(1000):
        theta = rng.standard_normal(3)
        best = max(best, section_area_3d(unit, b, theta))
    assert 0.2 < best * res.l_constant < 0.7
