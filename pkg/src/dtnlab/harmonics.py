"""
Real spherical harmonics on S^1 and S^2 and quadrature rules on spheres and balls.

Harmonics are L^2-orthonormal with respect to the standard surface measure.
Order labels follow the usual real convention: for degree ``k`` the label
``m`` runs over ``-k..k`` on S^2, and over ``{-k, k}`` on S^1 (``-k`` is the
sine mode, ``+k`` the cosine mode, ``0`` the constant).

The Laplacian is the positive one, so the degree-``k`` eigenvalue is
``k (k + n - 2)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gamma, roots_jacobi, sph_harm_y

from .errors import DomainError

__all__ = [
    "HarmonicIndex",
    "QuadratureRule",
    "harmonic_basis",
    "degree_count",
    "eval_basis",
    "eval_solid",
    "laplace_eigenvalue",
    "quadrature",
    "sphere_area",
    "ball_volume",
]

SUPPORTED_DIMS = (2, 3)
_SPHERE_TOL = 1e-12


def _check_dim(n):
    if n not in SUPPORTED_DIMS:
        raise DomainError(f"ambient dimension n={n} is not supported (expected 2 or 3)")


def sphere_area(n):
    """Surface measure of the unit sphere S^{n-1}."""
    return 2.0 * math.pi ** (n / 2) / gamma(n / 2)


def ball_volume(n):
    """Volume of the unit ball B^n."""
    return sphere_area(n) / n


@dataclass(frozen=True, order=True)
class HarmonicIndex:
    """Index ``(n, k, m)`` of a real spherical harmonic on S^{n-1}."""

    n: int
    k: int
    m: int = 0

    def __post_init__(self):
        _check_dim(self.n)
        if self.k < 0:
            raise DomainError(f"degree must be nonnegative, got k={self.k}")
        if self.n == 2:
            legal = {0} if self.k == 0 else {-self.k, self.k}
        else:
            legal = set(range(-self.k, self.k + 1))
        if self.m not in legal:
            raise DomainError(f"order m={self.m} is not legal for n={self.n}, k={self.k}")

    @property
    def eigenvalue(self):
        return laplace_eigenvalue(self)

    def label(self):
        return f"{self.k},{self.m}"


def degree_count(n, k):
    """Number of independent real harmonics of degree ``k`` on S^{n-1}."""
    _check_dim(n)
    if n == 2:
        return 1 if k == 0 else 2
    return 2 * k + 1


def harmonic_basis(n, K):
    """Degree-major, order-ascending list of all indices with degree <= K."""
    _check_dim(n)
    basis = []
    for k in range(K + 1):
        if n == 2:
            basis.extend(HarmonicIndex(2, k, m) for m in ((0,) if k == 0 else (-k, k)))
        else:
            basis.extend(HarmonicIndex(3, k, m) for m in range(-k, k + 1))
    return basis


def laplace_eigenvalue(idx):
    """Eigenvalue ``k (k + n - 2)`` of the positive Laplacian on S^{n-1}."""
    return float(idx.k * (idx.k + idx.n - 2))


def _as_points(p, n):
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != n:
        raise DomainError(f"points must have trailing dimension {n}, got shape {p.shape}")
    return p


def eval_basis(idx, p):
    """Evaluate the orthonormal real harmonic ``idx`` at unit-sphere points.

    Parameters
    ----------
    idx : HarmonicIndex
    p : array_like, shape (..., n)
        Points on the unit sphere; ``|p| = 1`` is enforced to 1e-12.

    Returns
    -------
    ndarray of shape ``p.shape[:-1]``
    """
    p = _as_points(p, idx.n)
    radius = np.linalg.norm(p, axis=-1)
    if np.any(np.abs(radius - 1.0) > _SPHERE_TOL):
        raise DomainError("eval_basis requires points on the unit sphere")
    return _eval_direction(idx, p)


def _eval_direction(idx, p):
    # p assumed unit length
    if idx.n == 2:
        theta = np.arctan2(p[..., 1], p[..., 0])
        if idx.k == 0:
            return np.full(theta.shape, 1.0 / math.sqrt(2.0 * math.pi))
        if idx.m > 0:
            return np.cos(idx.k * theta) / math.sqrt(math.pi)
        return np.sin(idx.k * theta) / math.sqrt(math.pi)
    polar = np.arccos(np.clip(p[..., 2], -1.0, 1.0))
    azimuth = np.arctan2(p[..., 1], p[..., 0])
    k, m = idx.k, idx.m
    ylm = sph_harm_y(k, abs(m), polar, azimuth)
    if m == 0:
        return ylm.real
    # (-1)^m cancels the Condon-Shortley phase carried by sph_harm_y
    sign = -1.0 if m % 2 else 1.0
    if m > 0:
        return math.sqrt(2.0) * sign * ylm.real
    return math.sqrt(2.0) * sign * ylm.imag


def eval_solid(idx, x):
    """Solid harmonic ``|x|^k Y(x/|x|)``, the harmonic extension of ``Y`` into the ball."""
    x = _as_points(x, idx.n)
    r = np.linalg.norm(x, axis=-1)
    if idx.k == 0:
        return np.full(r.shape, 1.0 / math.sqrt(sphere_area(idx.n)))
    safe = np.where(r > 0, r, 1.0)
    direction = x / safe[..., None]
    direction = np.where((r > 0)[..., None], direction, _unit_e1(idx.n))
    return r**idx.k * _eval_direction(idx, direction)


def _unit_e1(n):
    e = np.zeros(n)
    e[0] = 1.0
    return e


@dataclass(frozen=True)
class QuadratureRule:
    """Product quadrature rule on S^{n-1} or B^n.

    ``nodes``/``weights`` are the flattened rule. For ball rules the radial
    and angular factors are kept as well, node ``i * len(angular) + j``
    sitting at ``radii[i] * directions[j]``.
    """

    domain: str
    n: int
    level: int
    exactness: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    directions: np.ndarray = field(repr=False)
    direction_weights: np.ndarray = field(repr=False)
    radii: np.ndarray | None = field(default=None, repr=False)
    radial_weights: np.ndarray | None = field(default=None, repr=False)

    def integrate(self, values):
        return float(np.dot(self.weights, values))

    def to_dict(self):
        return {
            "domain": self.domain,
            "n": self.n,
            "level": self.level,
            "exactness": self.exactness,
            "nodes": self.nodes.tolist(),
            "weights": self.weights.tolist(),
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


@lru_cache(maxsize=64)
def _sphere_factor(n, level):
    # exact for spherical polynomials of degree <= 2 * level + 1
    n_phi = 2 * level + 2
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    if n == 2:
        dirs = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        return dirs, np.full(n_phi, 2.0 * np.pi / n_phi)
    z, wz = np.polynomial.legendre.leggauss(level + 1)
    s = np.sqrt(1.0 - z**2)
    dirs = np.stack(
        [
            np.outer(s, np.cos(phi)).ravel(),
            np.outer(s, np.sin(phi)).ravel(),
            np.repeat(z, n_phi),
        ],
        axis=-1,
    )
    return dirs, np.repeat(wz, n_phi) * (2.0 * np.pi / n_phi)


@lru_cache(maxsize=64)
def _radial_factor(n, radial_level):
    # Gauss-Jacobi on [0, 1] with weight r^(n-1): exact for r-polynomials of degree <= 2 * level + 1
    x, w = roots_jacobi(radial_level + 1, 0.0, float(n - 1))
    r = 0.5 * (x + 1.0)
    return r, w * 0.5**n


def quadrature(domain, n, level, radial_level=None):
    """Build a product quadrature rule.

    Parameters
    ----------
    domain : {"sphere", "ball"}
    n : int
        Ambient dimension (2 or 3).
    level : int
        Positive refinement level. The angular factor integrates spherical
        polynomials of degree ``2 * level + 1`` exactly; so does the radial
        factor in ``r`` (after the ``r^{n-1}`` Jacobian).
    radial_level : int, optional
        Independent radial level for ball rules (defaults to ``level``).

    Returns
    -------
    QuadratureRule
    """
    _check_dim(n)
    if level < 1:
        raise DomainError(f"quadrature level must be positive, got {level}")
    dirs, dw = _sphere_factor(n, int(level))
    exactness = 2 * int(level) + 1
    if domain == "sphere":
        return QuadratureRule("sphere", n, int(level), exactness, dirs, dw, dirs, dw)
    if domain != "ball":
        raise DomainError(f"unknown quadrature domain {domain!r}")
    rl = int(level if radial_level is None else radial_level)
    if rl < 1:
        raise DomainError(f"radial level must be positive, got {rl}")
    r, rw = _radial_factor(n, rl)
    nodes = (r[:, None, None] * dirs[None, :, :]).reshape(-1, n)
    weights = np.outer(rw, dw).ravel()
    return QuadratureRule(
        "ball", n, int(level), min(exactness, 2 * rl + 1), nodes, weights, dirs, dw, r, rw
    )
