"""Independent oracles used to validate the exact pipeline.

Everything here deliberately avoids the code paths it checks: volumes
via Cayley-Menger determinants, surface moments via Dirichlet Monte
Carlo, support values via brute-force maxima over the raw points,
central sections via direct clipping, and the isotropic infimum via
random search plus coordinate descent on the defining functional.
"""

import math

import numpy as np


def cayley_menger_volume(vertices):
    """Simplex volume from the bordered squared-distance determinant."""
    v = np.asarray(vertices, dtype=float)
    m = v.shape[0]
    k = m - 1
    d2 = ((v[:, None, :] - v[None, :, :]) ** 2).sum(axis=2)
    cm = np.ones((m + 1, m + 1))
    cm[0, 0] = 0.0
    cm[1:, 1:] = d2
    det = np.linalg.det(cm)
    coeff = ((-1.0) ** (m)) / (2.0**k * math.factorial(k) ** 2)
    return math.sqrt(max(coeff * det, 0.0))


def mc_simplex_surface_moment(vertices, ref, samples, rng):
    """MC estimate (value, stderr) of (1/vol) ∫ |x-ref|^2 dσ over a simplex."""
    v = np.asarray(vertices, dtype=float)
    m = v.shape[0]
    w = rng.standard_exponential((samples, m))
    w /= w.sum(axis=1, keepdims=True)
    x = w @ v - np.asarray(ref, dtype=float)
    sq = np.einsum("ij,ij->i", x, x)
    return float(sq.mean()), float(sq.std(ddof=1)) / math.sqrt(samples)


def brute_support(points, directions):
    """max_i <p_i, u> over the raw input points, one value per direction."""
    return (np.atleast_2d(directions) @ np.asarray(points, dtype=float).T).max(axis=1)


def chord_length(poly, point, direction):
    """1-D measure of the section of a 2-D polytope by the line
    point + t * direction."""
    nu = poly.normals @ np.asarray(direction, dtype=float)
    slack = poly.offsets - poly.normals @ np.asarray(point, dtype=float)
    t_hi = min((s / d) for s, d in zip(slack, nu) if d > 1e-12)
    t_lo = max((s / d) for s, d in zip(slack, nu) if d < -1e-12)
    return max(t_hi - t_lo, 0.0)


def section_area_3d(poly, point, normal):
    """Exact area of the section of a 3-D polytope by the plane through
    `point` with the given normal: clip every polytope edge, then take
    the convex polygon spanned by the crossing points."""
    theta = np.asarray(normal, dtype=float)
    theta = theta / np.linalg.norm(theta)
    signed = (poly.vertices - point) @ theta
    scale = max(1.0, float(np.abs(poly.vertices).max()))
    tol = 1e-12 * scale

    edges = set()
    for row in poly.facet_vertex_ids:
        ids = sorted(int(i) for i in row)
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                edges.add((ids[a], ids[b]))

    pts = []
    for a, b in edges:
        sa, sb = signed[a], signed[b]
        if abs(sa) <= tol:
            pts.append(poly.vertices[a])
        if abs(sb) <= tol:
            pts.append(poly.vertices[b])
        if sa * sb < -tol * tol:
            lam = sa / (sa - sb)
            pts.append(poly.vertices[a] + lam * (poly.vertices[b] - poly.vertices[a]))
    if len(pts) < 3:
        return 0.0
    pts = np.asarray(pts)
    # orthonormal basis of the plane
    u = np.eye(3)[np.argmin(np.abs(theta))]
    e1 = np.cross(theta, u)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(theta, e1)
    xy = np.column_stack([(pts - point) @ e1, (pts - point) @ e2])
    center = xy.mean(axis=0)
    order = np.argsort(np.arctan2(xy[:, 1] - center[1], xy[:, 0] - center[0]))
    xy = xy[order]
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def variational_isotropic_min(covariance, volume, rng, n_maps=10**4, descent_rounds=60):
    """Brute-force minimum of the isotropic functional
    vol^{-2/n} tr(A C A^T) over |det A| = 1: random special-linear search
    refined by coordinate descent with determinant renormalization."""
    cov = np.asarray(covariance, dtype=float)
    n = cov.shape[0]
    norm = volume ** (-2.0 / n)

    def value(a):
        return norm * float(np.trace(a @ cov @ a.T))

    def renorm(a):
        det = abs(np.linalg.det(a))
        return a / det ** (1.0 / n)

    best = np.eye(n)
    best_val = value(best)
    for _ in range(n_maps):
        a = renorm(rng.standard_normal((n, n)))
        v = value(a)
        if v < best_val:
            best, best_val = a, v

    step = 0.25
    for _ in range(descent_rounds):
        improved = False
        for i in range(n):
            for j in range(n):
                for sign in (1.0, -1.0):
                    trial = best.copy()
                    trial[i, j] += sign * step
                    trial = renorm(trial)
                    v = value(trial)
                    if v < best_val - 1e-15:
                        best, best_val = trial, v
                        improved = True
        if not improved:
            step *= 0.5
            if step < 1e-7:
                break
    return best_val


def rademacher_mean_tail(m, t):
    """Exact P(|mean of m Rademacher signs| > t) via the binomial law."""
    from scipy.stats import binom

    # mean > t  <=>  #(+1) > m(1+t)/2, and sf(floor(x)) = P(B > x)
    k = math.floor(m * (1.0 + t) / 2.0)
    return 2.0 * float(binom.sf(k, m, 0.5))
