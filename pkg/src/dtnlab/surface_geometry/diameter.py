"""
Intrinsic diameter of a closed surface of revolution by mesh shortest paths.

Folding ``theta -> |theta|`` and ``theta -> 2 pi - theta`` does not increase
length, so every distance is realized inside the half domain
``theta in [0, pi]``, and by rotation one endpoint may be put on ``theta = 0``.
The half domain is meshed on a grid (meridian samples x angles), every node is
joined to neighbours along a coprime stencil of radius 3, and Dijkstra runs
from strided sources on the ``theta = 0`` meridian.

Edges are straight in grid-index space; their length is measured on the
surface through a finer meridian sub-grid, so every graph path is an actual
surface curve and mesh distances approach geodesic distance from above.
"""

from __future__ import annotations

import math
from math import gcd

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from ..errors import DomainError

STENCIL_RADIUS = 3
SUBDIVISION = 4
MAX_SOURCES = 32


def _stencil(radius=STENCIL_RADIUS):
    out = []
    for di in range(0, radius + 1):
        for dj in range(-radius, radius + 1):
            if (di, dj) == (0, 0) or gcd(di, abs(dj)) != 1:
                continue
            if di == 0 and dj < 0:
                continue
            out.append((di, dj))
    return out


def meridian_samples(surface, count):
    """``count + 1`` arclength positions equidistributing arclength plus turning."""
    smp = surface.samples
    length = surface.length
    s = np.concatenate([[0.0], smp.s, [length]])
    turn_density = np.abs(smp.kappa_mu) * smp.weight
    turning = np.concatenate([[0.0], np.cumsum(turn_density)])
    turning = np.append(turning, turning[-1])
    monitor = s / length + turning / max(turning[-1], 1e-300)
    targets = np.linspace(0.0, monitor[-1], count + 1)
    out = np.interp(targets, monitor, s)
    out[0], out[-1] = 0.0, length
    return out


def _profile_radius(surface, s):
    piece, p = surface.profile.locate(s)
    rho = np.empty_like(p)
    for idx in np.unique(piece):
        sel = piece == idx
        rho[sel] = surface.profile.position(int(idx), p[sel])[1]
    return np.abs(rho)


def _edge_lengths(s_fine, rho_fine, n_s, dtheta, di, dj):
    """Surface length of the edge from meridian node ``i`` to ``i + di`` (angular step ``dj``)."""
    if di == 0:
        return rho_fine[:: SUBDIVISION][: n_s + 1] * abs(dj) * dtheta
    sub = SUBDIVISION * di
    count = n_s + 1 - di
    idx = SUBDIVISION * np.arange(count)[:, None] + np.arange(sub + 1)[None, :]
    ds = np.diff(s_fine[idx], axis=1)
    rho_mid = 0.5 * (rho_fine[idx][:, 1:] + rho_fine[idx][:, :-1])
    dth = abs(dj) * dtheta / sub
    return np.sum(np.sqrt(ds**2 + (rho_mid * dth) ** 2), axis=1)


def mesh_distances(surface, mesh_resolution=256, sources=None):
    """Mesh distances from meridian sources; returns ``(source_rows, distances, s_nodes)``."""
    if not surface.closed:
        raise DomainError("intrinsic diameter needs a closed surface")
    n_s = int(mesh_resolution)
    n_t = max(2, n_s // 2)
    s_fine = meridian_samples(surface, SUBDIVISION * n_s)
    rho_fine = _profile_radius(surface, s_fine)
    rho_fine[0] = rho_fine[-1] = 0.0
    dtheta = math.pi / n_t

    # node ids; each pole row collapses to one vertex
    ids = np.arange((n_s + 1) * (n_t + 1)).reshape(n_s + 1, n_t + 1)
    ids[0, :] = ids[0, 0]
    ids[-1, :] = ids[-1, 0]

    rows, cols, vals = [], [], []
    for di, dj in _stencil():
        lengths = _edge_lengths(s_fine, rho_fine, n_s, dtheta, di, dj)
        i = np.arange(n_s + 1 - di)
        j0 = max(0, -dj)
        j1 = min(n_t, n_t - dj)
        j = np.arange(j0, j1 + 1)
        if j.size == 0:
            continue
        a = ids[i[:, None], j[None, :]]
        b = ids[i[:, None] + di, j[None, :] + dj]
        rows.append(a.ravel())
        cols.append(b.ravel())
        vals.append(np.repeat(lengths, j.size))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    keep = rows != cols
    rows, cols, vals = rows[keep], cols[keep], vals[keep]
    lo, hi = np.minimum(rows, cols), np.maximum(rows, cols)
    # duplicates (from collapsed poles) keep their shortest length
    order = np.lexsort((vals, hi, lo))
    lo, hi, vals = lo[order], hi[order], vals[order]
    first = np.ones(lo.size, bool)
    first[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
    lo, hi, vals = lo[first], hi[first], np.maximum(vals[first], 1e-300)
    size = ids.size
    graph = coo_matrix((vals, (lo, hi)), shape=(size, size)).tocsr()

    if sources is None:
        stride = max(1, n_s // MAX_SOURCES)
        sources = np.unique(np.concatenate([np.arange(0, n_s + 1, stride), [n_s]]))
    src_ids = ids[np.asarray(sources), 0]
    dist = dijkstra(graph, directed=False, indices=src_ids)
    used = np.unique(ids)
    return np.asarray(sources), dist[:, used], s_fine[::SUBDIVISION]


def intrinsic_diameter(surface, mesh_resolution=256):
    """Geodesic diameter from mesh shortest paths (an upper estimate that decreases under refinement)."""
    _, dist, _ = mesh_distances(surface, mesh_resolution)
    finite = dist[np.isfinite(dist)]
    return float(np.max(finite))


def diameter_with_error(surface, mesh_resolution=256):
    """Diameter at ``mesh_resolution`` and the change from half that resolution."""
    fine = intrinsic_diameter(surface, mesh_resolution)
    coarse = intrinsic_diameter(surface, max(8, mesh_resolution // 2))
    return fine, abs(coarse - fine)
