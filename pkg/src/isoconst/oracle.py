"""Independent Monte Carlo estimators used to validate the exact pipeline.

Two routes: bounding-box rejection (low dimension only), and an exact
uniform sampler that never rejects, built on the cone decomposition --
pick a facet cone with probability proportional to its volume, a point of
the facet simplex from normalized exponential weights, and a radial
coordinate with density n t^{n-1}.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import hull as _hull
from . import polytope_moments as _pm
from .errors import TooFewAccepted
from .simplex_geometry import facet_volumes

REJECTION_MAX_DIM = 6
_MIN_ACCEPTED = 10**3
_CHUNK = 65_536


@dataclass(frozen=True)
class MomentEstimate:
    """MC estimates with standard errors; moments are about `ref`."""

    method: str
    volume_est: float
    volume_se: float
    mean_est: np.ndarray
    mean_se: np.ndarray
    second_moment_est: float
    second_moment_se: float
    second_moment_matrix_est: np.ndarray
    second_moment_matrix_se: np.ndarray
    ref: np.ndarray
    samples_used: int

    def to_dict(self):
        return {
            "method": self.method,
            "volume_est": self.volume_est,
            "volume_se": self.volume_se,
            "mean_est": self.mean_est.tolist(),
            "mean_se": self.mean_se.tolist(),
            "second_moment_est": self.second_moment_est,
            "second_moment_se": self.second_moment_se,
            "second_moment_matrix_est": self.second_moment_matrix_est.ravel().tolist(),
            "second_moment_matrix_se": self.second_moment_matrix_se.ravel().tolist(),
            "ref": self.ref.tolist(),
            "samples_used": self.samples_used,
        }


def _rng(seed):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed) & (2**64 - 1), 0x04AC1E])))


def _point_moments(points, ref, volume_est, volume_se, method):
    k = len(points)
    d = points - ref
    mean = points.mean(axis=0)
    mean_se = points.std(axis=0, ddof=1) / math.sqrt(k)
    sq = np.einsum("ij,ij->i", d, d)
    msq = float(sq.mean())
    msq_se = float(sq.std(ddof=1)) / math.sqrt(k)
    outer = np.einsum("ij,ik->ijk", d, d)
    mat = outer.mean(axis=0)
    mat_se = outer.std(axis=0, ddof=1) / math.sqrt(k)
    return MomentEstimate(
        method=method,
        volume_est=volume_est,
        volume_se=volume_se,
        mean_est=mean,
        mean_se=mean_se,
        second_moment_est=msq,
        second_moment_se=msq_se,
        second_moment_matrix_est=mat,
        second_moment_matrix_se=mat_se,
        ref=np.asarray(ref, dtype=float),
        samples_used=k,
    )


def rejection_mc(poly, proposals, seed, ref=None):
    """Uniform proposals in the vertex bounding box filtered by
    containment; volume from the acceptance rate (binomial se), moments
    from the accepted points (delta-method se)."""
    if poly.dim > REJECTION_MAX_DIM:
        raise ValueError(
            f"rejection sampling is limited to dim <= {REJECTION_MAX_DIM} (got {poly.dim})"
        )
    proposals = int(proposals)
    ref = np.zeros(poly.dim) if ref is None else np.asarray(ref, dtype=float)
    lo = poly.vertices.min(axis=0)
    hi = poly.vertices.max(axis=0)
    box_volume = float(np.prod(hi - lo))
    rng = _rng(seed)

    accepted = []
    n_acc = 0
    for start in range(0, proposals, _CHUNK):
        count = min(_CHUNK, proposals - start)
        pts = rng.uniform(lo, hi, size=(count, poly.dim))
        keep = _hull.contains(poly, pts)
        if keep.any():
            accepted.append(pts[keep])
            n_acc += int(keep.sum())
    if n_acc < _MIN_ACCEPTED:
        raise TooFewAccepted(
            f"only {n_acc} of {proposals} proposals accepted; dimension too high for rejection"
        )
    points = np.vstack(accepted)
    p = n_acc / proposals
    volume_est = box_volume * p
    volume_se = box_volume * math.sqrt(p * (1.0 - p) / proposals)
    return _point_moments(points, ref, volume_est, volume_se, "rejection")


def sample_uniform(poly, apex, count, seed, return_facets=False):
    """Exact uniform samples from the polytope via cone decomposition.

    Works in any supported dimension and never rejects; every returned
    point satisfies the facet inequalities up to tolerance.
    """
    apex = np.asarray(apex, dtype=float)
    count = int(count)
    n = poly.dim
    heights = _pm.cone_decomposition(poly, apex)
    areas = facet_volumes(poly.facet_points())
    cone_vols = heights * areas / n
    probs = cone_vols / cone_vols.sum()
    rng = _rng(seed)

    out = np.empty((count, n))
    facet_ids = np.empty(count, dtype=np.intp)
    fp = poly.facet_points()
    m = fp.shape[1]
    for start in range(0, count, _CHUNK):
        k = min(_CHUNK, count - start)
        ids = rng.choice(len(probs), size=k, p=probs)
        weights = rng.standard_exponential((k, m))
        weights /= weights.sum(axis=1, keepdims=True)
        y = np.einsum("km,kmd->kd", weights, fp[ids])
        t = rng.random(k) ** (1.0 / n)
        out[start : start + k] = apex + t[:, None] * (y - apex)
        facet_ids[start : start + k] = ids
    if return_facets:
        return out, facet_ids
    return out


def cone_mc(poly, apex, count, seed, ref=None):
    """MomentEstimate from `sample_uniform` draws.

    The volume is known exactly from the decomposition (se 0); the mean
    and second moments are genuine MC estimates.
    """
    ref = np.zeros(poly.dim) if ref is None else np.asarray(ref, dtype=float)
    points = sample_uniform(poly, apex, count, seed)
    vol = _pm.volume(poly, apex)
    return _point_moments(points, ref, vol, 0.0, "cone")
