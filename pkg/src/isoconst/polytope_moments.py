"""Exact volume, barycenter and second moments of simplicial polytopes.

Everything reduces to the cone decomposition about an interior apex a:
writing d_F for the distance from a to the hyperplane of facet F,

    vol = (1/n) sum_F d_F vol(F),
    ∫ (x-a)(x-a)^T dx = sum_F d_F/(n+2) ∫_F (y-a)(y-a)^T dσ(y),

with the facet integrals in closed form from the simplex moment formula.
Facet sums are accumulated with compensated (fsum-based) reductions.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import hull as _hull
from .errors import ApexOnBoundary, NumericallySingular
from .simplex_geometry import facet_volumes

_APEX_RTOL = 1e-12
_CHUNK = 8_192


@dataclass(frozen=True)
class MomentSummary:
    """All exact scalar and matrix moments of one polytope.

    `moment_matrix` and `second_moment_scalar` are taken about `apex`
    and normalized by volume; `covariance` is the moment matrix about
    the true barycenter.
    """

    volume: float
    barycenter: np.ndarray
    apex: np.ndarray
    second_moment_scalar: float
    moment_matrix: np.ndarray
    covariance: np.ndarray

    def second_moment_about(self, ref):
        """(1/vol) ∫ |x - ref|^2 dx via the covariance shift identity."""
        d = self.barycenter - np.asarray(ref, dtype=float)
        return float(np.trace(self.covariance) + d @ d)

    def moment_matrix_about(self, ref):
        d = self.barycenter - np.asarray(ref, dtype=float)
        return self.covariance + np.outer(d, d)

    def to_dict(self):
        return {
            "volume": self.volume,
            "barycenter": self.barycenter.tolist(),
            "apex": self.apex.tolist(),
            "second_moment_scalar": self.second_moment_scalar,
            "moment_matrix": self.moment_matrix.ravel().tolist(),
            "covariance": self.covariance.ravel().tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        bary = np.asarray(d["barycenter"], dtype=float)
        n = len(bary)
        return cls(
            volume=float(d["volume"]),
            barycenter=bary,
            apex=np.asarray(d["apex"], dtype=float),
            second_moment_scalar=float(d["second_moment_scalar"]),
            moment_matrix=np.asarray(d["moment_matrix"], dtype=float).reshape(n, n),
            covariance=np.asarray(d["covariance"], dtype=float).reshape(n, n),
        )


def _fsum(values):
    return math.fsum(values.tolist())


def _fsum_stack(partials):
    """Exact fsum of a list of equal-shaped partial sums, elementwise."""
    stack = np.stack(partials)
    if stack.ndim == 1:
        return math.fsum(stack.tolist())
    flat = stack.reshape(len(partials), -1)
    out = np.array([math.fsum(flat[:, j].tolist()) for j in range(flat.shape[1])])
    return out.reshape(stack.shape[1:])


def default_apex(poly):
    """0 for symmetric hulls, else the generating-point average, with the
    Chebyshev center as fallback when that point is not strictly interior."""
    candidates = []
    if poly.symmetric:
        candidates.append(np.zeros(poly.dim))
    candidates.append(poly.vertices.mean(axis=0))
    tol = _APEX_RTOL * poly.scale()
    for apex in candidates:
        if (poly.offsets - poly.normals @ apex).min() > tol:
            return apex
    return _hull.chebyshev_center(poly)


def cone_decomposition(poly, apex):
    """Heights d(apex, aff F) for every facet; heights[i] belongs to
    facet i.  Raises ApexOnBoundary unless the apex is strictly interior."""
    apex = np.asarray(apex, dtype=float)
    heights = poly.offsets - poly.normals @ apex
    if heights.min() <= _APEX_RTOL * poly.scale():
        raise ApexOnBoundary(
            f"apex is not strictly interior (min height {heights.min():.3e})"
        )
    return heights


def _core(poly, apex, fp=None, areas=None):
    """One pass of the cone decomposition: volume, barycenter, and the
    volume-normalized scalar/matrix second moments about the apex.

    Streams the facet list in chunks (pairwise sums inside a chunk,
    exact fsum across chunk partials) so large hulls stay cache-resident.
    """
    n = poly.dim
    apex = np.asarray(apex, dtype=float)
    heights = cone_decomposition(poly, apex)
    if fp is None:
        fp = poly.facet_points()
    if areas is None:
        areas = facet_volumes(fp)

    l, m, _ = fp.shape
    base = heights * areas  # n * cone volumes
    vol = _fsum(base) / n
    if vol <= 0:
        raise ApexOnBoundary("polytope has no volume")

    coeff = base / (m * (m + 1) * (n + 2))
    p_bary, p_msq, p_mat = [], [], []
    for lo in range(0, l, _CHUNK):
        sl = slice(lo, lo + _CHUNK)
        w = fp[sl] - apex  # (k, m, n)
        s = w.sum(axis=1)  # (k, n)
        p_bary.append(base[sl] @ s)
        sq = (w * w).sum(axis=(1, 2)) + (s * s).sum(axis=1)
        p_msq.append(float(coeff[sl] @ sq))
        mats = np.matmul(w.transpose(0, 2, 1), w) + s[:, :, None] * s[:, None, :]
        p_mat.append(np.tensordot(coeff[sl], mats, axes=(0, 0)))

    # cones have volume d*area/n and centroid apex + n/(n+1)*(facet centroid - apex)
    bary = apex + _fsum_stack(p_bary) / (m * (n + 1) * vol)
    msq = float(_fsum_stack(p_msq)) / vol
    mmat = _fsum_stack(p_mat) / vol
    return vol, bary, msq, mmat, fp, areas


def volume(poly, apex=None):
    """Exact n-volume via the cone decomposition (apex-independent)."""
    apex = default_apex(poly) if apex is None else np.asarray(apex, dtype=float)
    n = poly.dim
    heights = cone_decomposition(poly, apex)
    areas = facet_volumes(poly.facet_points())
    return _fsum(heights * areas) / n


def barycenter(poly):
    """Exact barycenter (independent of the decomposition apex)."""
    apex = default_apex(poly)
    _, bary, _, _, _, _ = _core(poly, apex)
    return bary


def second_moment_scalar(poly, apex=None):
    """(1/vol) ∫ |x - apex|^2 dx."""
    apex = default_apex(poly) if apex is None else apex
    _, _, msq, _, _, _ = _core(poly, apex)
    return msq


def moment_matrix(poly, apex=None):
    """(1/vol) ∫ (x - apex)(x - apex)^T dx."""
    apex = default_apex(poly) if apex is None else apex
    _, _, _, mmat, _, _ = _core(poly, apex)
    return mmat


def covariance(poly):
    """Moment matrix about the exact barycenter; raises
    NumericallySingular when the smallest eigenvalue collapses."""
    cov = summarize(poly).covariance
    _check_spd(cov)
    return cov


def _check_spd(cov):
    eig = np.linalg.eigvalsh(cov)
    if eig[0] <= 1e-12 * max(eig[-1], 0.0):
        raise NumericallySingular(
            f"covariance is numerically singular (eigenvalues {eig[0]:.3e}..{eig[-1]:.3e})"
        )


def summarize(poly, apex=None):
    """Volume, barycenter, second moments about the apex, and covariance,
    sharing one facet-geometry pass."""
    apex = default_apex(poly) if apex is None else np.asarray(apex, dtype=float)
    vol, bary, msq, mmat, fp, areas = _core(poly, apex)
    _, _, _, cov, _, _ = _core(poly, bary, fp=fp, areas=areas)
    return MomentSummary(
        volume=vol,
        barycenter=bary,
        apex=apex,
        second_moment_scalar=msq,
        moment_matrix=mmat,
        covariance=cov,
    )


def facet_second_moments(poly, ref):
    """Per facet, (1/vol F) ∫_F |x - ref|^2 dσ, in facet order.

    This is the quantity bounded facet-by-facet in the concentration
    experiments; it only depends on the facet's vertices.
    """
    ref = np.asarray(ref, dtype=float)
    fp = poly.facet_points()
    m = fp.shape[1]
    out = np.empty(fp.shape[0])
    for lo in range(0, fp.shape[0], _CHUNK):
        sl = slice(lo, lo + _CHUNK)
        w = fp[sl] - ref
        s = w.sum(axis=1)
        out[sl] = (w * w).sum(axis=(1, 2)) + (s * s).sum(axis=1)
    return out / (m * (m + 1))
