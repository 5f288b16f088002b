"""
Profile curves of surfaces of revolution about the x-axis.

A profile is a chain of smooth pieces ``p -> (x(p), rho(p))``. Every piece
returns exact parameter derivatives up to third order (its *jet*), from which
curvatures and their arclength derivatives follow without differencing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
import sympy as sp

from ..errors import DomainError

GL_ORDER = 8
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GL_ORDER)
_GL16_NODES, _GL16_WEIGHTS = np.polynomial.legendre.leggauss(16)


# --------------------------------------------------------------------------
# smooth step

_CDF_NODES, _CDF_WEIGHTS = np.polynomial.legendre.leggauss(80)


@lru_cache(maxsize=1)
def _bump_derivatives():
    u = sp.symbols("u", real=True)
    beta = sp.exp(-1 / (1 - u**2))
    return [sp.lambdify(u, sp.diff(beta, u, k), "numpy") for k in range(3)]


def _bump_jet(u, order):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    if np.any(inside):
        out[inside] = _bump_derivatives()[order](u[inside])
    return out


@lru_cache(maxsize=1)
def _bump_mass():
    nodes, weights = np.polynomial.legendre.leggauss(200)
    return float(weights @ _bump_jet(nodes, 0))


def smooth_step(x, center=0.0, width=1.0, order=3):
    """C^infinity step rising from 0 to 1 across ``[center - width/2, center + width/2]``.

    Built as the normalized integral of ``exp(-1/(1 - u^2))``; the CDF is
    evaluated with 80-point Gauss-Legendre. Returns the values and the first
    ``order`` derivatives, stacked along axis 0.
    """
    x = np.asarray(x, dtype=float)
    scale = 2.0 / width
    u = np.clip(scale * (x - center), -1.0, 1.0)
    half = 0.5 * (u + 1.0)
    pts = -1.0 + half[..., None] * (_CDF_NODES + 1.0)
    cdf = np.sum(_CDF_WEIGHTS * half[..., None] * _bump_jet(pts, 0), axis=-1) / _bump_mass()
    cdf = np.where(u >= 1.0, 1.0, np.clip(cdf, 0.0, 1.0))
    jet = [cdf]
    for k in range(1, order + 1):
        jet.append(scale**k * _bump_jet(u, k - 1) / _bump_mass())
    return np.stack(jet)


# --------------------------------------------------------------------------
# pieces


def _stack_jet(xs, rs):
    return np.stack([np.stack([a, b]) for a, b in zip(xs, rs)])


@dataclass(frozen=True)
class CircleArc:
    """``x = center - R cos(p)``, ``rho = R sin(p)`` for ``p`` in ``[p0, p1]``."""

    center: float
    radius: float
    p0: float
    p1: float
    panels: int
    region: str = "cap"

    def jet(self, p, order=3):
        c, s = np.cos(p), np.sin(p)
        R = self.radius
        return _stack_jet(
            [self.center - R * c, R * s, R * c, -R * s],
            [R * s, R * c, -R * s, -R * c],
        )


@dataclass(frozen=True)
class EllipseArc:
    """``x = -A cos(p)``, ``rho = B sin(p)``: half of a meridian ellipse."""

    axial: float
    equatorial: float
    p0: float
    p1: float
    panels: int
    region: str = "ellipse"

    def jet(self, p, order=3):
        c, s = np.cos(p), np.sin(p)
        A, B = self.axial, self.equatorial
        return _stack_jet([-A * c, A * s, A * c, -A * s], [B * s, B * c, -B * s, -B * c])


@dataclass(frozen=True)
class Segment:
    """Straight meridian ``rho = R`` (a cylinder)."""

    radius: float
    p0: float
    p1: float
    panels: int
    region: str = "cylinder"

    def jet(self, p, order=3):
        z = np.zeros_like(p)
        return _stack_jet([p, np.ones_like(p), z, z], [np.full_like(p, self.radius), z, z, z])


@dataclass(frozen=True)
class GraphPiece:
    """``rho = g(x)`` over ``[p0, p1]``, with ``g`` returning its own 4-jet.

    With ``mirror`` set, the piece is the reflection ``x -> mirror - x`` of the
    graph, parametrized left to right.
    """

    func: object = field(repr=False)
    p0: float
    p1: float
    panels: int
    region: str = "blend"
    mirror: float | None = None

    def jet(self, p, order=3):
        p = np.asarray(p, dtype=float)
        if self.mirror is None:
            g = self.func(p)
        else:
            g = self.func(self.mirror - p) * np.array([1.0, -1.0, 1.0, -1.0])[:, None]
        one, zero = np.ones_like(p), np.zeros_like(p)
        return _stack_jet([p, one, zero, zero], list(g))


class Roulette:
    """Path of a focus of the ellipse with semi-axes ``(1/2, eps/2)`` rolled along the x-axis.

    With contact at the ellipse point of parameter ``t``, the rolled distance
    ``sigma(t)`` solves the contact ODE ``sigma' = |ellipse'(t)|`` and the
    focus sits at

        X = sigma + c sin t (c cos t + a) / S,   Y = b (a + c cos t) / S,

    where ``S = sqrt(b^2 cos^2 t + a^2 sin^2 t)`` and ``c^2 = a^2 - b^2``.
    The bulge (``Y = a + c``) is at ``t = 0``, ``x = 0``; the neck (``Y = a - c``)
    at ``t = pi``. The result is an undulary with mean curvature ``1/(2a) = 1``.
    """

    def __init__(self, eps, t_span=(-1.0, 2.0 * math.pi)):
        if not 0.0 < eps < 1.0:
            raise DomainError(f"ellipse minor axis must lie in (0, 1), got {eps}")
        self.eps = float(eps)
        self.a = 0.5
        self.b = 0.5 * self.eps
        self.c = math.sqrt(self.a**2 - self.b**2)
        t = sp.symbols("t", real=True)
        a, b, c = sp.Float(self.a, 30), sp.Float(self.b, 30), sp.Float(self.c, 30)
        S = sp.sqrt(b**2 * sp.cos(t) ** 2 + a**2 * sp.sin(t) ** 2)
        gx = c * sp.sin(t) * (c * sp.cos(t) + a) / S
        gy = b * (a + c * sp.cos(t)) / S
        self._speed = sp.lambdify(t, S, "numpy")
        self._x_jet = [
            sp.lambdify(t, sp.diff(gx, t, k) + (sp.diff(S, t, k - 1) if k else 0), "numpy")
            for k in range(4)
        ]
        self._y_jet = [sp.lambdify(t, sp.diff(gy, t, k), "numpy") for k in range(4)]
        self._span = (min(t_span[0], -1.0), max(t_span[1], 1.0))
        self._sigma = self._roll(*self._span)
        self.period = float(self.sigma(2.0 * math.pi))

    def _roll(self, lo, hi):
        # The contact ODE sigma' = S(t) has a t-only right-hand side, so it is
        # integrated cell by cell with Gauss-Legendre; the table is then exact
        # to roundoff, which keeps sigma smooth under finite differencing.
        grid = np.linspace(lo, hi, int(math.ceil((hi - lo) / 0.01)) + 1)
        a, b = grid[:-1], grid[1:]
        half = 0.5 * (b - a)
        pts = a[:, None] + half[:, None] * (_GL16_NODES + 1.0)
        cells = half * (self._speed(pts) @ _GL16_WEIGHTS)
        table = np.concatenate([[0.0], np.cumsum(cells)])
        k0 = int(np.argmin(np.abs(grid)))
        table -= table[k0] + self._partial(np.array([grid[k0]]), np.array([0.0]))[0]
        return grid, table

    def _partial(self, base, t):
        half = 0.5 * (t - base)
        pts = base[..., None] + half[..., None] * (_GL_NODES + 1.0)
        return half * (self._speed(pts) @ _GL_WEIGHTS)

    def sigma(self, t):
        """Rolled distance ``sigma(t)`` with ``sigma(0) = 0``."""
        t = np.asarray(t, dtype=float)
        lo, hi = self._span
        if np.any(t < lo - 1e-12) or np.any(t > hi + 1e-12):
            raise DomainError("roulette evaluated outside its rolled range")
        grid, table = self._sigma
        k = np.clip(np.rint((t - grid[0]) / (grid[1] - grid[0])).astype(int), 0, len(grid) - 1)
        return table[k] + self._partial(grid[k], t)

    def x_jet(self, t, order=3):
        t = np.asarray(t, dtype=float)
        out = [self.sigma(t) + self._x_jet[0](t)]
        out += [np.broadcast_to(self._x_jet[k](t), t.shape) for k in range(1, order + 1)]
        return np.stack(out)

    def y_jet(self, t, order=3):
        t = np.asarray(t, dtype=float)
        return np.stack([np.broadcast_to(self._y_jet[k](t), t.shape) for k in range(order + 1)])

    def invert(self, x):
        """Parameter ``t`` with ``X(t) = x`` (the focus path is a graph over x)."""
        x = np.asarray(x, dtype=float)
        grid = self._inverse_table
        t = np.interp(x, grid[1], grid[0])
        for _ in range(30):
            jet = self.x_jet(t, 1)
            step = (jet[0] - x) / jet[1]
            t = t - step
            if np.all(np.abs(step) < 1e-15):
                break
        return t

    @cached_property
    def _inverse_table(self):
        t = np.linspace(*self._span, 40001)
        return np.stack([t, self.x_jet(t, 0)[0]])

    def graph_jet(self, x):
        """``u_eps(x)`` and its first three x-derivatives."""
        t = self.invert(x)
        X = self.x_jet(t)
        Y = self.y_jet(t)
        t1 = 1.0 / X[1]
        t2 = -X[2] / X[1] ** 3
        t3 = (3.0 * X[2] ** 2 - X[1] * X[3]) / X[1] ** 5
        return np.stack(
            [
                Y[0],
                Y[1] * t1,
                Y[2] * t1**2 + Y[1] * t2,
                Y[3] * t1**3 + 3.0 * Y[2] * t1 * t2 + Y[1] * t3,
            ]
        )


@dataclass(frozen=True)
class RouletteArc:
    roulette: Roulette = field(repr=False)
    p0: float
    p1: float
    panels: int
    region: str = "delaunay"

    def jet(self, p, order=3):
        p = np.asarray(p, dtype=float)
        rl = self.roulette
        return np.stack([np.stack([x, y]) for x, y in zip(rl.x_jet(p, order), rl.y_jet(p, order))])


# --------------------------------------------------------------------------
# curvature from a jet


def curvature_from_jet(jet):
    """Arclength quantities from a parameter jet of shape (4, 2, m).

    Returns ``v, x_s, rho_s, kappa_mu, kappa_pi, dkappa_mu, dkappa_pi`` where the
    last two are arclength derivatives; ``dkappa_pi`` uses the Codazzi relation
    ``kappa_pi' = rho_s (kappa_mu - kappa_pi) / rho``. On the axis the limiting
    value ``kappa_pi = kappa_mu`` is used.
    """
    (x0, r0), (x1, r1), (x2, r2), (x3, r3) = jet
    v = np.hypot(x1, r1)
    num = r1 * x2 - x1 * r2
    k_mu = num / v**3
    dv = (x1 * x2 + r1 * r2) / v
    dk_mu = ((r1 * x3 - x1 * r3) / v**3 - 3.0 * num * dv / v**4) / v
    on_axis = np.abs(r0) <= 1e-13 * np.maximum(np.abs(x0), 1.0)
    safe = np.where(on_axis, 1.0, r0)
    k_pi = np.where(on_axis, k_mu, x1 / (v * safe))
    rho_s = r1 / v
    dk_pi = np.where(on_axis, 0.0, rho_s * (k_mu - k_pi) / safe)
    return v, x1 / v, rho_s, k_mu, k_pi, dk_mu, dk_pi


# --------------------------------------------------------------------------
# sampled profile


@dataclass(frozen=True)
class ProfileSamples:
    """Gauss-Legendre panel samples of a profile; ``weight`` integrates in arclength."""

    p: np.ndarray
    piece: np.ndarray
    region: np.ndarray
    weight: np.ndarray
    s: np.ndarray
    x: np.ndarray
    rho: np.ndarray
    x_s: np.ndarray
    rho_s: np.ndarray
    kappa_mu: np.ndarray
    kappa_pi: np.ndarray
    dkappa_mu: np.ndarray
    dkappa_pi: np.ndarray
    panel_start_s: np.ndarray = field(repr=False)
    panel_bounds: np.ndarray = field(repr=False)
    panel_piece: np.ndarray = field(repr=False)

    @property
    def H(self):
        return 0.5 * (self.kappa_mu + self.kappa_pi)

    @property
    def K(self):
        return self.kappa_mu * self.kappa_pi

    @property
    def area_weight(self):
        return 2.0 * np.pi * self.rho * self.weight

    def mask(self, region):
        return self.region == region


@dataclass(frozen=True)
class ProfileCurve:
    """Chain of pieces, uniformly scaled by ``scale``."""

    pieces: tuple
    scale: float = 1.0

    def scaled(self, factor):
        if factor <= 0:
            raise DomainError("scale factor must be positive")
        return ProfileCurve(self.pieces, self.scale * factor)

    def jet(self, index, p, order=3):
        """Scaled parameter jet of one piece, shape (order + 1, 2, len(p))."""
        return self.scale * self.pieces[index].jet(np.asarray(p, dtype=float), order)[: order + 1]

    def position(self, index, p):
        return self.jet(index, p, 0)[0]

    @cached_property
    def samples(self):
        return _sample(self)

    @property
    def length(self):
        smp = self.samples
        return float(np.sum(smp.weight))

    def locate(self, s):
        """Piece index and parameter for arclength positions ``s``."""
        smp = self.samples
        s = np.atleast_1d(np.asarray(s, dtype=float))
        total = self.length
        if np.any(s < -1e-12 * total) or np.any(s > total * (1 + 1e-12)):
            raise DomainError("arclength outside the profile")
        s = np.clip(s, 0.0, total)
        panel = np.clip(np.searchsorted(smp.panel_start_s, s, side="right") - 1, 0, len(smp.panel_start_s) - 1)
        a, b = smp.panel_bounds[panel].T
        piece = smp.panel_piece[panel]
        target = s - smp.panel_start_s[panel]
        p = a + (b - a) * 0.5
        span = b - a
        lengths = smp.panel_start_s[1:] - smp.panel_start_s[:-1]
        lengths = np.append(lengths, total - smp.panel_start_s[-1])
        p = a + span * np.clip(target / np.where(lengths[panel] > 0, lengths[panel], 1.0), 0.0, 1.0)
        for _ in range(50):
            resid = self._arc_integral(piece, a, p) - target
            speed = np.empty_like(p)
            for idx in np.unique(piece):
                sel = piece == idx
                d1 = self.jet(int(idx), p[sel], 1)[1]
                speed[sel] = np.hypot(d1[0], d1[1])
            step = resid / np.where(speed > 0, speed, 1.0)
            p = np.clip(p - step, a, b)
            if np.all(np.abs(step) <= 1e-13 * np.abs(span)):
                break
        return piece, p

    def _arc_integral(self, piece, a, p):
        out = np.empty_like(p)
        for idx in np.unique(piece):
            sel = piece == idx
            lo, hi = a[sel], p[sel]
            half = 0.5 * (hi - lo)
            pts = lo[:, None] + half[:, None] * (_GL_NODES + 1.0)
            jet = self.jet(int(idx), pts.ravel(), 1)
            v = np.hypot(jet[1, 0], jet[1, 1]).reshape(pts.shape)
            out[sel] = half * (v @ _GL_WEIGHTS)
        return out


def _sample(curve):
    ps, pieces, regions, weights, s_at, jets = [], [], [], [], [], []
    panel_start, panel_bounds, panel_piece = [], [], []
    offset = 0.0
    for index, piece in enumerate(curve.pieces):
        edges = np.linspace(piece.p0, piece.p1, piece.panels + 1)
        a, b = edges[:-1], edges[1:]
        half = 0.5 * (b - a)
        nodes = (a[:, None] + half[:, None] * (_GL_NODES + 1.0)).ravel()
        jet = curve.jet(index, nodes)
        v = np.hypot(jet[1, 0], jet[1, 1])
        w = (half[:, None] * _GL_WEIGHTS).ravel() * v
        panel_len = w.reshape(-1, GL_ORDER).sum(axis=1)
        starts = offset + np.concatenate([[0.0], np.cumsum(panel_len)[:-1]])
        local = curve._arc_integral(np.full(nodes.shape, index), np.repeat(a, GL_ORDER), nodes)
        s_at.append(np.repeat(starts, GL_ORDER) + local)
        offset += float(panel_len.sum())
        ps.append(nodes)
        pieces.append(np.full(nodes.shape, index))
        regions.append(np.full(nodes.shape, piece.region, dtype=object))
        weights.append(w)
        jets.append(jet)
        panel_start.append(starts)
        panel_bounds.append(np.stack([a, b], axis=1))
        panel_piece.append(np.full(a.shape, index))
    jet = np.concatenate(jets, axis=-1)
    v, x_s, rho_s, k_mu, k_pi, dk_mu, dk_pi = curvature_from_jet(jet)
    return ProfileSamples(
        p=np.concatenate(ps),
        piece=np.concatenate(pieces),
        region=np.concatenate(regions),
        weight=np.concatenate(weights),
        s=np.concatenate(s_at),
        x=jet[0, 0],
        rho=jet[0, 1],
        x_s=x_s,
        rho_s=rho_s,
        kappa_mu=k_mu,
        kappa_pi=k_pi,
        dkappa_mu=dk_mu,
        dkappa_pi=dk_pi,
        panel_start_s=np.concatenate(panel_start),
        panel_bounds=np.concatenate(panel_bounds),
        panel_piece=np.concatenate(panel_piece),
    )
