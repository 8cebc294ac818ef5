"""Convex hulls in R^n as simplicial facet complexes.

Facets carry unit outward normals and offsets (<normal, y> = offset on
the facet's hyperplane).  Builders reject point sets whose hull is not
full-dimensional; by default they also reject inputs where more than n
points fall on one facet hyperplane, since those make the facet structure
ambiguous.  Lattice-valued laws legitimately produce such hulls, so
`coplanar="triangulate"` accepts qhull's triangulation of the merged
facets instead (moment integrals over a triangulated facet are still
exact).
"""

import json
import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull as _Qhull
from scipy.spatial import QhullError

from .errors import CenterOutside, DegenerateInput, FacetBudgetExceeded
from .simplex_geometry import facet_volumes

MAX_DIM = 10
DEFAULT_FACET_BUDGET = 2_000_000

# relative tolerance for on-hyperplane / containment tests
COPLANAR_RTOL = 1e-9


@dataclass(frozen=True)
class Facet:
    """One (n-1)-simplex facet: vertex indices, unit outward normal, offset."""

    vertex_ids: np.ndarray
    normal: np.ndarray
    offset: float


@dataclass(frozen=True, eq=False)
class Polytope:
    """A simplicial facet complex together with its generating points.

    `vertices` holds every generating point (points interior to the hull
    are simply never referenced by a facet).  Facet data is stored as
    flat arrays: row i of `facet_vertex_ids`, `normals`, `offsets`
    describes facet i.
    """

    dim: int
    vertices: np.ndarray
    facet_vertex_ids: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    symmetric: bool = False

    @property
    def n_facets(self):
        return self.facet_vertex_ids.shape[0]

    @property
    def facets(self):
        return [
            Facet(self.facet_vertex_ids[i], self.normals[i], float(self.offsets[i]))
            for i in range(self.n_facets)
        ]

    def facet_points(self):
        """Facet vertex coordinates as an (n_facets, dim, dim) array."""
        return self.vertices[self.facet_vertex_ids]

    def scale(self):
        return max(1.0, float(np.abs(self.vertices).max()))

    def to_dict(self):
        return {
            "dim": self.dim,
            "vertices": self.vertices.tolist(),
            "facets": [
                {
                    "vertex_ids": self.facet_vertex_ids[i].tolist(),
                    "normal": self.normals[i].tolist(),
                    "offset": float(self.offsets[i]),
                }
                for i in range(self.n_facets)
            ],
            "symmetric": bool(self.symmetric),
        }

    @classmethod
    def from_dict(cls, d):
        facets = d["facets"]
        return cls(
            dim=int(d["dim"]),
            vertices=np.asarray(d["vertices"], dtype=float),
            facet_vertex_ids=np.asarray([f["vertex_ids"] for f in facets], dtype=np.intp),
            normals=np.asarray([f["normal"] for f in facets], dtype=float),
            offsets=np.asarray([f["offset"] for f in facets], dtype=float),
            symmetric=bool(d.get("symmetric", False)),
        )

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _as_points(points):
    data = getattr(points, "data", points)
    pts = np.asarray(data, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be a 2-D array")
    if not np.isfinite(pts).all():
        raise ValueError("points contain non-finite entries")
    return pts


def _point_scale(pts):
    return max(1.0, float(np.abs(pts).max()))


def _hull_1d(pts, symmetric):
    vals = pts[:, 0]
    hi, lo = int(np.argmax(vals)), int(np.argmin(vals))
    if vals[hi] - vals[lo] <= COPLANAR_RTOL * _point_scale(pts):
        raise DegenerateInput("all points coincide on the line")
    return Polytope(
        dim=1,
        vertices=pts.copy(),
        facet_vertex_ids=np.array([[hi], [lo]], dtype=np.intp),
        normals=np.array([[1.0], [-1.0]]),
        offsets=np.array([vals[hi], -vals[lo]]),
        symmetric=symmetric,
    )


def _assemble(pts, vertex_ids, normals, symmetric):
    """Recompute offsets from facet vertices and force outward orientation."""
    norms = np.linalg.norm(normals, axis=1)
    normals = normals / norms[:, None]
    offsets = np.einsum("fd,fvd->fv", normals, pts[vertex_ids]).mean(axis=1)
    interior = pts.mean(axis=0)
    flip = normals @ interior > offsets
    normals[flip] *= -1.0
    offsets[flip] *= -1.0
    return Polytope(
        dim=pts.shape[1],
        vertices=pts.copy(),
        facet_vertex_ids=np.asarray(vertex_ids, dtype=np.intp),
        normals=normals,
        offsets=offsets,
        symmetric=symmetric,
    )


def _coplanar_counts(pts, poly, chunk=262_144):
    """Per facet, how many input points sit on its hyperplane."""
    tol = COPLANAR_RTOL * _point_scale(pts)
    counts = np.empty(poly.n_facets, dtype=np.intp)
    step = max(1, chunk // max(len(pts), 1))
    for start in range(0, poly.n_facets, step):
        sl = slice(start, start + step)
        d = np.abs(pts @ poly.normals[sl].T - poly.offsets[sl])
        counts[sl] = (d <= tol).sum(axis=0)
    return counts


def _drop_flat_facets(poly):
    vols = facet_volumes(poly.facet_points())
    keep = vols > _flat_cut(vols)
    if keep.all():
        return poly
    return Polytope(
        dim=poly.dim,
        vertices=poly.vertices,
        facet_vertex_ids=poly.facet_vertex_ids[keep],
        normals=poly.normals[keep],
        offsets=poly.offsets[keep],
        symmetric=poly.symmetric,
    )


def _flat_cut(vols):
    top = float(vols.max()) if len(vols) else 0.0
    return 1e-12 * max(top, 1e-300)


def convex_hull(points, facet_budget=DEFAULT_FACET_BUDGET, coplanar="error", _symmetric=False):
    """Facet complex of conv(points) for an (m, n) point array.

    Raises DegenerateInput when the points are not full-dimensional at
    tolerance, or (with coplanar="error") when more than n points lie on
    a single facet hyperplane.  coplanar="triangulate" keeps qhull's
    triangulation of merged facets and discards its zero-area pieces.
    """
    if coplanar not in ("error", "triangulate"):
        raise ValueError(f"coplanar must be 'error' or 'triangulate', got {coplanar!r}")
    pts = _as_points(points)
    m, n = pts.shape
    if n > MAX_DIM:
        raise ValueError(f"dimension {n} exceeds the supported maximum {MAX_DIM}")
    if m < n + 1:
        raise DegenerateInput(f"{m} points cannot span R^{n}")
    if n == 1:
        return _hull_1d(pts, _symmetric)

    sv = np.linalg.svd(pts - pts.mean(axis=0), compute_uv=False)
    if sv[n - 1] <= COPLANAR_RTOL * max(sv[0], 1.0):
        raise DegenerateInput(
            f"points have affine rank < {n} (smallest singular value {sv[n - 1]:.3e})"
        )

    try:
        qh = _Qhull(pts)
    except QhullError as exc:
        raise DegenerateInput(f"hull construction failed: {exc}") from exc

    if len(qh.simplices) > facet_budget:
        raise FacetBudgetExceeded(
            f"{len(qh.simplices)} facets exceed the budget of {facet_budget}"
        )

    poly = _assemble(pts, qh.simplices, qh.equations[:, :n].copy(), _symmetric)

    counts = _coplanar_counts(pts, poly)
    if counts.max() > n:
        if coplanar == "error":
            raise DegenerateInput(
                f"{int(counts.max())} points lie on one facet hyperplane (> {n})"
            )
        poly = _drop_flat_facets(poly)
    return poly


def symmetric_hull(points, facet_budget=DEFAULT_FACET_BUDGET, coplanar="error"):
    """Hull of {+/- p : p in points}, built over the explicit 2N-point set."""
    pts = _as_points(points)
    doubled = np.vstack([pts, -pts])
    return convex_hull(doubled, facet_budget=facet_budget, coplanar=coplanar, _symmetric=True)


def contains(poly, x, tol=None):
    """True iff x satisfies every facet inequality up to tolerance.

    Accepts a single n-vector or a (k, n) batch; the batch form returns a
    boolean array.
    """
    if tol is None:
        tol = COPLANAR_RTOL * poly.scale()
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x[None, :] if single else x
    if pts.shape[1] != poly.dim:
        raise ValueError(f"point dimension {pts.shape[1]} != polytope dim {poly.dim}")
    ok = (pts @ poly.normals.T <= poly.offsets + tol).all(axis=1)
    return bool(ok[0]) if single else ok


def inradius(poly, center):
    """Distance from center to the nearest facet hyperplane.

    The ball of this radius about the center is contained in the
    polytope; raises CenterOutside when the center is not inside.
    """
    center = np.asarray(center, dtype=float)
    if not contains(poly, center):
        raise CenterOutside("inradius center lies outside the polytope")
    return float((poly.offsets - poly.normals @ center).min())


def chebyshev_center(poly):
    """Deepest interior point: maximizes the inradius over the center.

    Solved as the linear program max r s.t. <normal_F, x> + r <= offset_F.
    """
    n = poly.dim
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_ub = np.hstack([poly.normals, np.ones((poly.n_facets, 1))])
    res = linprog(c, A_ub=a_ub, b_ub=poly.offsets, bounds=[(None, None)] * (n + 1))
    if not res.success or res.x[-1] <= 0:
        raise DegenerateInput("polytope has no interior point (empty or flat)")
    return res.x[:n]


def transform(poly, linear, translation=None):
    """Image of the polytope under x -> A x + b for invertible A.

    Facet combinatorics are preserved; normals map along A^{-T} and
    offsets are recomputed from the mapped facet vertices.
    """
    a = np.asarray(linear, dtype=float)
    if a.shape != (poly.dim, poly.dim):
        raise ValueError(f"linear part must be {poly.dim} x {poly.dim}")
    b = np.zeros(poly.dim) if translation is None else np.asarray(translation, dtype=float)
    verts = poly.vertices @ a.T + b
    normals = np.linalg.solve(a.T, poly.normals.T).T
    still_symmetric = poly.symmetric and not b.any()
    out = _assemble(verts, poly.facet_vertex_ids, normals, still_symmetric)
    return out


@dataclass(frozen=True)
class HullDiagnostics:
    """Worst-case violation magnitudes for a facet complex."""

    max_point_violation: float
    max_normal_norm_error: float
    max_on_plane_error: float
    min_relative_facet_volume: float
    ridge_defects: int
    symmetric_pairing_defects: int
    facet_count_ok: bool
    tolerance: float

    @property
    def passed(self):
        return (
            self.max_point_violation <= self.tolerance
            and self.max_normal_norm_error <= 1e-12
            and self.max_on_plane_error <= self.tolerance
            and self.ridge_defects == 0
            and self.symmetric_pairing_defects == 0
            and self.facet_count_ok
        )

    def to_dict(self):
        return {
            "max_point_violation": self.max_point_violation,
            "max_normal_norm_error": self.max_normal_norm_error,
            "max_on_plane_error": self.max_on_plane_error,
            "min_relative_facet_volume": self.min_relative_facet_volume,
            "ridge_defects": self.ridge_defects,
            "symmetric_pairing_defects": self.symmetric_pairing_defects,
            "facet_count_ok": self.facet_count_ok,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _ridge_defects(poly):
    if poly.dim < 2:
        return 0
    counts = Counter()
    for row in poly.facet_vertex_ids:
        for ridge in combinations(sorted(int(v) for v in row), poly.dim - 1):
            counts[ridge] += 1
    return sum(1 for c in counts.values() if c != 2)


def _pairing_defects(poly):
    keys = {tuple(np.round(nrm, 8)) for nrm in poly.normals}
    return sum(1 for k in keys if tuple(-x for x in k) not in keys)


def validate_polytope(poly, points=None):
    """Diagnostic report: containment, supporting facets, unit normals,
    affine independence, ridge pairing and (when flagged) central symmetry."""
    pts = poly.vertices if points is None else _as_points(points)
    tol = COPLANAR_RTOL * max(_point_scale(pts), poly.scale())

    violation = float((pts @ poly.normals.T - poly.offsets).max())
    norm_err = float(np.abs(np.linalg.norm(poly.normals, axis=1) - 1.0).max())
    fp = poly.facet_points()
    on_plane = float(
        np.abs(np.einsum("fd,fvd->fv", poly.normals, fp) - poly.offsets[:, None]).max()
    )
    vols = facet_volumes(fp)
    rel_vol = float(vols.min() / max(vols.max(), 1e-300))

    pairing = _pairing_defects(poly) if poly.symmetric else 0

    count_ok = True
    if poly.symmetric and poly.dim >= 1:
        n_gen = len(pts) // 2 if points is None else len(pts)
        n_gen = max(n_gen, poly.dim)
        count_ok = math.log(max(poly.n_facets, 1)) <= poly.dim * math.log(
            2 * math.e * n_gen / poly.dim
        )

    return HullDiagnostics(
        max_point_violation=max(violation, 0.0),
        max_normal_norm_error=norm_err,
        max_on_plane_error=on_plane,
        min_relative_facet_volume=rel_vol,
        ridge_defects=_ridge_defects(poly),
        symmetric_pairing_defects=pairing,
        facet_count_ok=count_ok,
        tolerance=tol,
    )


def support_function(poly, directions):
    """max_x <x, u> over the polytope for each row u of `directions`."""
    u = np.atleast_2d(np.asarray(directions, dtype=float))
    hull_ids = np.unique(poly.facet_vertex_ids)
    return (u @ poly.vertices[hull_ids].T).max(axis=1)
