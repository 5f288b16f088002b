"""Closed (and open) surfaces of revolution and the standard test family."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..errors import DomainError, RefinementError
from .profile import (
    GL_ORDER,
    CircleArc,
    EllipseArc,
    GraphPiece,
    ProfileCurve,
    Roulette,
    RouletteArc,
    Segment,
    smooth_step,
)

AXIS_TOL = 1e-10


@dataclass(frozen=True)
class RevolutionSurface:
    """Surface swept by a profile curve about the x-axis.

    ``closed`` surfaces have both profile endpoints on the axis, meeting it
    orthogonally. Curvature data live on ``samples`` (Gauss-Legendre panel
    nodes along the meridian); integrals over the surface use the area
    element ``2 pi rho ds``.
    """

    profile: ProfileCurve
    closed: bool = True
    label: str = "surface"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.closed:
            first, last = self.profile.pieces[0], self.profile.pieces[-1]
            ends = [self.profile.jet(0, np.array([first.p0]))[:, :, 0],
                    self.profile.jet(len(self.profile.pieces) - 1, np.array([last.p1]))[:, :, 0]]
            for jet in ends:
                size = max(abs(jet[0, 0]), 1.0) * self.profile.scale
                if abs(jet[0, 1]) > AXIS_TOL * size:
                    raise DomainError("closed profile must end on the axis")
                if abs(jet[1, 0]) > 1e-8 * math.hypot(*jet[1]):
                    raise DomainError("profile must meet the axis orthogonally")

    @property
    def samples(self):
        return self.profile.samples

    @cached_property
    def area(self):
        return float(np.sum(self.samples.area_weight))

    @property
    def length(self):
        """Meridian length."""
        return self.profile.length

    def integrate(self, values):
        """``int f dA`` for per-sample values ``f``."""
        return float(np.dot(self.samples.area_weight, values))

    def scaled(self, factor):
        return RevolutionSurface(self.profile.scaled(factor), self.closed, self.label, dict(self.meta))

    def normalized(self, area=4.0 * math.pi):
        """Uniformly rescaled copy with the given total area."""
        return self.scaled(math.sqrt(area / self.area))

    def region_mask(self, region):
        return self.samples.mask(region)


def _panels(nodes):
    return max(1, int(math.ceil(nodes / GL_ORDER)))


def sphere_surface(resolution=256, radius=1.0):
    """Round sphere; ``resolution`` Gauss nodes along the meridian."""
    if resolution < GL_ORDER:
        raise DomainError(f"resolution must be at least {GL_ORDER}")
    arc = CircleArc(0.0, radius, 0.0, math.pi, _panels(resolution), "cap")
    return RevolutionSurface(ProfileCurve((arc,)), True, f"sphere(R={radius})")


def ellipsoid_surface(equatorial=1.0, axial=1.2, resolution=512):
    """Ellipsoid of revolution with semi-axes ``(equatorial, equatorial, axial)``."""
    if equatorial <= 0 or axial <= 0:
        raise DomainError("semi-axes must be positive")
    arc = EllipseArc(axial, equatorial, 0.0, math.pi, _panels(resolution), "ellipse")
    return RevolutionSurface(
        ProfileCurve((arc,)), True, f"ellipsoid({equatorial},{equatorial},{axial})"
    )


def cylinder_surface(radius=1.0, length=2.0, resolution=64):
    """Open cylinder segment ``rho = R`` over ``x`` in ``[0, length]``."""
    seg = Segment(radius, 0.0, length, _panels(resolution), "cylinder")
    return RevolutionSurface(ProfileCurve((seg,)), False, f"cylinder(R={radius})")


def min_delaunay_resolution(eps):
    """Smallest accepted nodes-per-period for the undulary of parameter ``eps``.

    Near a neck the profile turns on a parameter scale of about ``eps``; asking
    for at least five nodes across it gives ``10 pi / eps`` per period.
    """
    return int(math.ceil(10.0 * math.pi / eps))


def capped_delaunay(eps, blend=(0.0, 1.0), resolution=None, periods=3):
    """Unit sphere blended into an undulary, capped at both ends.

    Left to right: a unit-circle cap, a blend ``(1 - phi) u_0 + phi u_eps`` over
    ``[center - width/2, center + width/2]`` with ``u_0 = sqrt(1 - x^2)``,
    ``periods`` full periods of the undulary ``u_eps``, and the mirror-image
    blend and cap. The surface is symmetric about the middle of the
    undulary and tends to a chain of ``periods + 1`` unit spheres as
    ``eps -> 0``.

    Parameters
    ----------
    eps : float
        Minor axis of the rolled ellipse (major axis 1), in ``(0, 1)``.
    blend : (center, width)
    resolution : int, optional
        Gauss nodes per undulary period; defaults to twice the minimum.
    periods : int

    Raises
    ------
    RefinementError
        If ``resolution`` cannot resolve the neck.
    """
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    if periods < 1:
        raise DomainError("need at least one undulary period")
    minimum = min_delaunay_resolution(eps)
    if resolution is None:
        resolution = 2 * minimum
    if resolution < minimum:
        raise RefinementError(
            f"resolution {resolution} per period cannot resolve the neck at eps={eps}; "
            f"need at least {minimum}"
        )
    center, width = blend
    lo, hi = center - 0.5 * width, center + 0.5 * width
    rl = Roulette(eps, t_span=(-math.pi, 2.0 * math.pi * periods + math.pi))
    if not (-1.0 < lo and hi < 0.5 * rl.period - 0.1 and width > 0):
        raise DomainError(f"blend window [{lo}, {hi}] must sit inside the first bulge")
    x_end = periods * rl.period

    def u0(x):
        r = np.sqrt(1.0 - x**2)
        return np.stack([r, -x / r, -1.0 / r**3, -3.0 * x / r**5])

    def blended(x):
        ue = rl.graph_jet(x)
        base = u0(x)
        phi = smooth_step(x, center, width)
        diff = ue - base
        out = base.copy()
        for k in range(4):
            out[k] += sum(math.comb(k, j) * phi[j] * diff[k - j] for j in range(k + 1))
        return out

    per_unit = resolution / rl.period
    theta_lo = math.acos(-lo)
    t_lo, t_hi = float(rl.invert(np.array(hi))), 2.0 * math.pi * periods - float(rl.invert(np.array(hi)))
    cap_nodes = max(4 * GL_ORDER, resolution * theta_lo / (2.0 * math.pi))
    blend_nodes = max(8 * GL_ORDER, per_unit * width * 4)
    pieces = (
        CircleArc(0.0, 1.0, 0.0, theta_lo, _panels(cap_nodes), "cap"),
        GraphPiece(blended, lo, hi, _panels(blend_nodes), "blend"),
        RouletteArc(rl, t_lo, t_hi, _panels(resolution * (t_hi - t_lo) / (2.0 * math.pi)), "delaunay"),
        GraphPiece(blended, x_end - hi, x_end - lo, _panels(blend_nodes), "blend", mirror=x_end),
        CircleArc(x_end, 1.0, math.pi - theta_lo, math.pi, _panels(cap_nodes), "cap"),
    )
    meta = {
        "eps": eps,
        "blend": [center, width],
        "periods": periods,
        "resolution": resolution,
        "period": rl.period,
        "neck_radius": rl.a - rl.c,
    }
    return RevolutionSurface(ProfileCurve(pieces), True, f"capped_delaunay(eps={eps})", meta)
