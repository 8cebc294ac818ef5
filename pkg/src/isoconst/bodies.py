"""Reference bodies with closed-form volume, covariance and isotropic
constant, built directly as simplicial facet complexes (their facets are
not in general position, so they cannot go through the hull builder)."""

import math
from itertools import permutations, product

import numpy as np

from .hull import MAX_DIM, Polytope, convex_hull


def cube(n, half_width=1.0):
    """[-h, h]^n with each of the 2n cube facets Freudenthal-triangulated
    into (n-1)! simplices."""
    n = int(n)
    if not 1 <= n <= MAX_DIM:
        raise ValueError(f"dimension must be in 1..{MAX_DIM}")
    h = float(half_width)
    corners = np.array(list(product((-1.0, 1.0), repeat=n))) * h
    if n == 1:
        return Polytope(
            dim=1,
            vertices=corners.copy(),
            facet_vertex_ids=np.array([[1], [0]], dtype=np.intp),
            normals=np.array([[1.0], [-1.0]]),
            offsets=np.array([h, h]),
            symmetric=True,
        )

    # Freudenthal chains of the (n-1)-cube as bit masks: chain t of a
    # permutation sets the bits of its first t axes.
    k = n - 1
    orders = np.array(list(permutations(range(k))), dtype=np.intp)  # (k!, k)
    onehot = np.zeros((len(orders), k, k))
    rows = np.repeat(np.arange(len(orders)), k)
    onehot[rows, np.tile(np.arange(k), len(orders)), orders.ravel()] = 1.0
    bits = np.concatenate(
        [np.zeros((len(orders), 1, k)), np.cumsum(onehot, axis=1)], axis=1
    )  # (k!, n, k) in {0, 1}

    # corner index of product((-1, 1), repeat=n): axis a contributes 2^(n-1-a)
    weight = 2.0 ** (n - 1 - np.arange(n))
    vertex_ids = []
    normals = []
    for axis in range(n):
        rest = [a for a in range(n) if a != axis]
        for sign in (-1.0, 1.0):
            ids = bits @ weight[rest]
            if sign > 0:
                ids = ids + weight[axis]
            vertex_ids.append(ids)
            nrm = np.zeros(n)
            nrm[axis] = sign
            normals.append(np.tile(nrm, (len(orders), 1)))
    return Polytope(
        dim=n,
        vertices=corners.copy(),
        facet_vertex_ids=np.concatenate(vertex_ids).astype(np.intp),
        normals=np.concatenate(normals),
        offsets=np.full(2 * n * math.factorial(n - 1), h),
        symmetric=True,
    )


def cross_polytope(n, radius=1.0):
    """conv{+/- r e_i}: 2^n simplicial facets, one per sign pattern."""
    n = int(n)
    if not 1 <= n <= MAX_DIM:
        raise ValueError(f"dimension must be in 1..{MAX_DIM}")
    r = float(radius)
    verts = np.vstack([r * np.eye(n), -r * np.eye(n)])
    vertex_ids = []
    normals = []
    for signs in product((1.0, -1.0), repeat=n):
        ids = [i if s > 0 else n + i for i, s in enumerate(signs)]
        vertex_ids.append(ids)
        normals.append(np.asarray(signs) / math.sqrt(n))
    return Polytope(
        dim=n,
        vertices=verts,
        facet_vertex_ids=np.asarray(vertex_ids, dtype=np.intp),
        normals=np.asarray(normals),
        offsets=np.full(2**n, r / math.sqrt(n)),
        symmetric=True,
    )


def regular_simplex(n):
    """A regular n-simplex in R^n with side length sqrt(2).

    Vertices are e_1..e_n plus (1 - sqrt(n+1))/n * (1,..,1); its volume
    is sqrt(n+1)/n!.
    """
    n = int(n)
    if not 1 <= n <= MAX_DIM:
        raise ValueError(f"dimension must be in 1..{MAX_DIM}")
    verts = np.vstack([np.eye(n), np.full(n, (1.0 - math.sqrt(n + 1.0)) / n)])
    return convex_hull(verts)


REFERENCE_BODIES = {
    "cube": cube,
    "cross-polytope": cross_polytope,
    "simplex": regular_simplex,
}


def reference_body(name, dim):
    try:
        builder = REFERENCE_BODIES[name]
    except KeyError:
        known = ", ".join(sorted(REFERENCE_BODIES))
        raise ValueError(f"unknown body {name!r} (known: {known})") from None
    return builder(dim)
