"""The isotropic constant and its defining variational functional.

For a body K with volume v and covariance C, centering at the barycenter
and whitening by det(C)^{1/2n} C^{-1/2} is volume-preserving and realizes
the infimum of vol^{-(1+2/n)} ∫ |Tx|^2 dx over volume-preserving affine
maps, giving the closed form  L^2 = det(C)^{1/n} / v^{2/n}.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import hull as _hull
from . import polytope_moments as _pm
from .errors import NotVolumePreserving, NumericallySingular

_DET_TOL = 1e-9


@dataclass(frozen=True)
class IsotropicResult:
    """Isotropic constant plus the whitening map x -> A(x - barycenter)
    that attains it (stored as linear part and translation)."""

    l_constant: float
    linear_map: np.ndarray
    translation: np.ndarray
    log_det_cov: float

    def apply(self, points):
        return np.asarray(points, dtype=float) @ self.linear_map.T + self.translation


def isotropic_constant(poly, summary=None):
    """Closed-form L and the volume-preserving map to isotropic position."""
    if summary is None:
        summary = _pm.summarize(poly)
    n = poly.dim
    cov = summary.covariance
    eig, vec = np.linalg.eigh(cov)
    if eig[0] <= 1e-12 * max(eig[-1], 0.0):
        raise NumericallySingular(
            f"covariance is numerically singular (eigenvalues {eig[0]:.3e}..{eig[-1]:.3e})"
        )
    log_det = float(np.log(eig).sum())
    l_sq = math.exp(log_det / n) / summary.volume ** (2.0 / n)
    scale = math.exp(log_det / (2.0 * n))
    linear = scale * (vec * (1.0 / np.sqrt(eig))) @ vec.T
    return IsotropicResult(
        l_constant=math.sqrt(l_sq),
        linear_map=linear,
        translation=-linear @ summary.barycenter,
        log_det_cov=log_det,
    )


def functional_value(poly, linear, translation=None):
    """vol^{-(1+2/n)} ∫ |A x + b|^2 dx for a volume-preserving (A, b),
    evaluated exactly on the mapped body."""
    a = np.asarray(linear, dtype=float)
    det = np.linalg.det(a)
    if abs(abs(det) - 1.0) > _DET_TOL:
        raise NotVolumePreserving(f"|det| = {abs(det)!r} is not 1 at tolerance {_DET_TOL}")
    image = _hull.transform(poly, a, translation)
    s = _pm.summarize(image)
    n = poly.dim
    second_moment_at_origin = float(np.trace(s.covariance) + s.barycenter @ s.barycenter)
    return s.volume ** (-2.0 / n) * second_moment_at_origin


def random_volume_preserving_map(dim, rng, translation_scale=1.0):
    """A random special-linear matrix (gaussian matrix with determinant
    renormalized to +/-1) and a gaussian translation."""
    while True:
        g = rng.standard_normal((dim, dim))
        det = np.linalg.det(g)
        if abs(det) > 1e-8:
            break
    a = g / abs(det) ** (1.0 / dim)
    b = translation_scale * rng.standard_normal(dim)
    return a, b
