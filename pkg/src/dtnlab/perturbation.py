"""
Linearized DtN matrix elements and commutator diagnostics on the unit ball.

At ``q = 0`` the derivative of ``Lambda_{t q'}`` is given by Green's formula,

    <Lambda' Y_alpha, Y_beta> = int_{B^n} q' (r^{k_alpha} Y_alpha)(r^{k_beta} Y_beta) dV,

so solid harmonics serve directly as the harmonic extensions and no interior
solve is needed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import BarycentricInterpolator
from scipy.spatial.transform import Rotation

from .ball_dtn import SpectralOperator
from .errors import DomainError, QuadratureWarning
from .harmonics import eval_basis, eval_solid, harmonic_basis, quadrature, sphere_area
from .radial_schrodinger import RadialPotential, parse_radial

__all__ = [
    "BallPotential",
    "CommutatorReport",
    "RotationAverage",
    "parse_ball",
    "perturbative_dtn_matrix",
    "adaptive_rule",
    "refinement_shift",
    "commutator_report",
    "radial_projection",
    "radial_deficit",
    "haar_rotations",
    "rotation_average",
    "rotation_identity_residual",
    "harmonic_moment",
]

CONVERGENCE_TOL = 1e-8


@dataclass(frozen=True)
class BallPotential:
    """A (not necessarily radial) potential on B^n, evaluated on point arrays of shape (..., n)."""

    func: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    smoothness: str = "smooth"
    support_radius: float | None = None
    label: str = "custom"
    polynomial_degree: int | None = None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self.func(x), dtype=float), x.shape[:-1])

    @classmethod
    def from_radial(cls, radial):
        return cls(
            lambda x: radial(np.linalg.norm(x, axis=-1)),
            radial.smoothness,
            radial.support_radius,
            f"radial:{radial.label}",
        )

    @classmethod
    def monomial(cls, exponents):
        exps = tuple(int(e) for e in exponents)
        if any(e < 0 for e in exps):
            raise DomainError("monomial exponents must be nonnegative")

        def func(x):
            out = np.ones(x.shape[:-1])
            for axis, e in enumerate(exps):
                if e:
                    out = out * x[..., axis] ** e
            return out

        return cls(func, "analytic", None, "monomial:" + ",".join(map(str, exps)), sum(exps))

    def __mul__(self, other):
        support = _min_support(self.support_radius, other.support_radius)
        degree = None
        if self.polynomial_degree is not None and other.polynomial_degree is not None:
            degree = self.polynomial_degree + other.polynomial_degree
        return BallPotential(
            lambda x: self(x) * other(x), "smooth", support, f"{self.label} x {other.label}", degree
        )

    def __add__(self, other):
        support = None
        if self.support_radius is not None and other.support_radius is not None:
            support = max(self.support_radius, other.support_radius)
        degree = None
        if self.polynomial_degree is not None and other.polynomial_degree is not None:
            degree = max(self.polynomial_degree, other.polynomial_degree)
        return BallPotential(
            lambda x: self(x) + other(x), "smooth", support, f"{self.label} + {other.label}", degree
        )

    def scaled(self, factor):
        return BallPotential(
            lambda x: factor * self(x),
            self.smoothness,
            self.support_radius,
            f"{factor!r}*({self.label})",
            self.polynomial_degree,
        )


def _min_support(a, b):
    vals = [v for v in (a, b) if v is not None]
    return min(vals) if vals else None


def _split_top(text, sep):
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif depth == 0 and text.startswith(sep, i):
            parts.append(text[start:i])
            start = i + len(sep)
    parts.append(text[start:])
    return [p.strip() for p in parts if p.strip()]


def parse_ball(spec, n=3):
    """Build a :class:`BallPotential` from the mini-language.

    ``radial:<radial-spec>``   any :func:`parse_radial` family
    ``monomial:i,j[,k]``       coordinate monomial ``x^i y^j z^k``
    ``bump:r0,w``              radial bump (shorthand for ``radial:bump:r0,w``)
    ``A x B``                  pointwise product (``*`` also accepted)
    ``sum:[A;B;...]``          pointwise sum
    """
    spec = spec.strip()
    if spec.startswith("sum:"):
        body = spec[4:].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise DomainError("sum expects a bracketed list: sum:[A;B]")
        terms = _split_top(body[1:-1], ";")
        if not terms:
            raise DomainError("sum of no terms")
        out = parse_ball(terms[0], n)
        for term in terms[1:]:
            out = out + parse_ball(term, n)
        return out
    factors = _split_top(spec.replace(" * ", " x "), " x ")
    if len(factors) > 1:
        out = parse_ball(factors[0], n)
        for fac in factors[1:]:
            out = out * parse_ball(fac, n)
        return out
    family, _, params = spec.partition(":")
    family = family.strip().lower()
    if family == "radial":
        return BallPotential.from_radial(parse_radial(params))
    if family == "bump":
        return BallPotential.from_radial(parse_radial(spec))
    if family == "monomial":
        try:
            exps = [int(v) for v in params.split(",")]
        except ValueError as exc:
            raise DomainError(f"bad monomial exponents {params!r}") from exc
        if len(exps) != n:
            raise DomainError(f"monomial needs {n} exponents for n={n}")
        return BallPotential.monomial(exps)
    raise DomainError(f"unknown ball potential family {family!r}")


def _as_ball(q):
    return q.as_ball_potential() if isinstance(q, RadialPotential) else q


def _assemble(q, n, K, rule):
    if rule.domain != "ball" or rule.n != n:
        raise DomainError("perturbative assembly needs a ball rule of matching dimension")
    basis = harmonic_basis(n, K)
    degrees = np.array([idx.k for idx in basis])
    ang = np.stack([eval_basis(idx, rule.directions) for idx in basis], axis=1)
    values = _as_ball(q)(rule.nodes).reshape(len(rule.radii), len(rule.directions))
    matrix = np.zeros((len(basis), len(basis)))
    power = degrees[:, None] + degrees[None, :]
    for r, rw, row in zip(rule.radii, rule.radial_weights, values):
        if not np.any(row):
            continue
        block = ang.T @ ((row * rule.direction_weights)[:, None] * ang)
        matrix += rw * r**power * block
    return SpectralOperator(n, K, tuple(basis), matrix)


def perturbative_dtn_matrix(q, n, K, rule, check=True):
    """Section of ``Lambda'`` for the potential derivative ``q'`` on degrees <= K.

    Parameters
    ----------
    q : BallPotential or RadialPotential
    n, K : int
    rule : QuadratureRule
        Ball rule. For polynomial ``q'`` its exactness should reach
        ``2K + deg q'``; for smooth ``q'`` refine until stable.
    check : bool
        Re-assemble on a refined rule (four angular levels up, radial order
        doubled) and emit a :class:`QuadratureWarning` if any entry moves by
        more than 1e-8.
    """
    op = _assemble(q, n, K, rule)
    if check:
        shift = refinement_shift(q, n, K, rule, op)
        if shift > CONVERGENCE_TOL:
            warnings.warn(
                f"matrix entries moved by {shift:.3e} under rule refinement; "
                f"level {rule.level} is too coarse for K={K}",
                QuadratureWarning,
                stacklevel=2,
            )
    return op


def _refined(rule):
    return quadrature("ball", rule.n, rule.level + 4, radial_level=2 * len(rule.radii) - 1)


def refinement_shift(q, n, K, rule, op=None):
    """Max entry change of the section when the rule is refined."""
    op = _assemble(q, n, K, rule) if op is None else op
    return float(np.max(np.abs(_assemble(q, n, K, _refined(rule)).matrix - op.matrix)))


def adaptive_rule(q, n, K, level=None, radial_level=None, max_radial=2048):
    """Ball rule for ``perturbative_dtn_matrix`` refined until entries are stable to 1e-8.

    The angular level starts at ``K + 4`` plus the polynomial degree of ``q``
    when known (``max(8, K + 6)`` otherwise); the radial order doubles until the
    refinement shift drops below the tolerance or ``max_radial`` is reached.
    """
    q = _as_ball(q)
    if level is None:
        deg = q.polynomial_degree
        level = K + 4 + deg if deg is not None else max(8, K + 6)
    rl = max(level, 32) if radial_level is None else radial_level
    while True:
        rule = quadrature("ball", n, level, radial_level=rl)
        if refinement_shift(q, n, K, rule) <= CONVERGENCE_TOL or 2 * rl > max_radial:
            return rule
        rl = 2 * rl + 1


@dataclass(frozen=True)
class CommutatorReport:
    """``[Lambda', Delta]`` section together with its size in the H^1 -> L^2 norm."""

    M: SpectralOperator = field(repr=False)
    C: np.ndarray = field(repr=False)
    h1_l2_norm: float
    max_entry: float

    def to_dict(self):
        return {
            "basis": [[idx.k, idx.m] for idx in self.M.basis],
            "K": self.M.K,
            "M": self.M.matrix.tolist(),
            "C": self.C.tolist(),
            "h1_l2_norm": self.h1_l2_norm,
            "max_entry": self.max_entry,
        }


def commutator_report(M):
    """Entries ``C[b, a] = (lam_a - lam_b) M[b, a]`` and ``||C (1 + Delta)^{-1/2}||_2``."""
    lam = M.laplace_eigenvalues
    C = M.matrix * (lam[None, :] - lam[:, None])
    scaled = C / np.sqrt(1.0 + lam)[None, :]
    norm = float(np.linalg.norm(scaled, 2)) if C.size else 0.0
    return CommutatorReport(M, C, norm, float(np.max(np.abs(C), initial=0.0)))


def _sphere_average(q, radii, rule):
    area = sphere_area(rule.n)
    pts = radii[:, None, None] * rule.directions[None, :, :]
    return q(pts) @ rule.direction_weights / area


def radial_projection(q, n, rule, points=65):
    """Radial projection ``P q`` as a sampled profile.

    ``P q (r)`` is the mean of ``q`` over the sphere of radius ``r``, which
    coincides with the Haar average over SO(n). Samples sit at Chebyshev
    points of ``[0, 1]`` and are interpolated barycentrically.
    """
    if rule.n != n:
        raise DomainError("rule dimension does not match n")
    q = _as_ball(q)
    r = 0.5 * (1.0 - np.cos(np.pi * np.arange(points) / (points - 1)))
    values = _sphere_average(q, r, rule)
    interp = BarycentricInterpolator(r, values)
    return RadialPotential(interp, "sampled", q.support_radius, f"P[{q.label}]")


def _projection_on_rule(q, rule):
    return np.repeat(_sphere_average(q, rule.radii, rule), len(rule.directions))


def radial_deficit(q, n, rule):
    """``||q - P q||_2`` over the ball, with ``P q`` taken on the rule's own spheres."""
    q = _as_ball(q)
    diff = q(rule.nodes) - _projection_on_rule(q, rule)
    return math.sqrt(max(rule.integrate(diff**2), 0.0))


def haar_rotations(n, count, rng):
    """``count`` Haar-distributed rotations of R^n as an array (count, n, n)."""
    if n == 3:
        return Rotation.random(count, random_state=rng).as_matrix()
    if n == 2:
        theta = rng.uniform(0.0, 2.0 * np.pi, size=count)
        c, s = np.cos(theta), np.sin(theta)
        return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], axis=-2)
    raise DomainError(f"unsupported dimension {n}")


@dataclass(frozen=True)
class RotationAverage:
    """Monte-Carlo estimate of ``int ||q - q o R||^2 dH`` against ``2 ||q - P q||^2``."""

    mean: float
    stderr: float
    target: float
    samples: int

    @property
    def residual(self):
        return self.mean - self.target


def rotation_average(q, n, rotations, rule, seed=0):
    if rotations < 1:
        raise DomainError("need at least one rotation sample")
    q = _as_ball(q)
    rng = np.random.default_rng(seed)
    mats = haar_rotations(n, rotations, rng)
    base = q(rule.nodes)
    rotated = q(np.einsum("sij,pj->spi", mats, rule.nodes))
    sq = ((base[None, :] - rotated) ** 2) @ rule.weights
    deficit = base - _projection_on_rule(q, rule)
    target = 2.0 * rule.integrate(deficit**2)
    stderr = float(np.std(sq, ddof=1) / math.sqrt(rotations)) if rotations > 1 else float("nan")
    return RotationAverage(float(np.mean(sq)), stderr, float(target), rotations)


def rotation_identity_residual(q, n, rotations, rule, seed=0):
    """Haar-sampled ``mean ||q - q o R||^2`` minus ``2 ||q - P q||^2``."""
    return rotation_average(q, n, rotations, rule, seed).residual


def harmonic_moment(q, u, v, rule):
    """``int_{B^n} q u v`` for solid harmonics ``u = r^k Y_u``, ``v = r^l Y_v``."""
    q = _as_ball(q)
    vals = q(rule.nodes) * eval_solid(u, rule.nodes) * eval_solid(v, rule.nodes)
    return rule.integrate(vals)
