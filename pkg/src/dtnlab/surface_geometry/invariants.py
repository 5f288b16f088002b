"""
Curvature invariants of surfaces of revolution.

In the orthonormal frame (meridian ``e1``, parallel ``e2``) the second
fundamental form is ``diag(kappa_mu, kappa_pi)`` and its covariant derivative
has exactly three independent nonzero components,

    (nabla_1 II)_11 = kappa_mu',   (nabla_1 II)_22 = (nabla_2 II)_12 = (nabla_2 II)_21 = kappa_pi',

the last equalities being Codazzi (``kappa_pi' = rho' (kappa_mu - kappa_pi)/rho``).
So ``|nabla II|^2 = kappa_mu'^2 + 3 kappa_pi'^2``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from ..errors import ConsistencyError, DomainError
from .profile import curvature_from_jet

FD_STEP = 2e-3
CONSISTENCY_RTOL = 0.01


@dataclass(frozen=True)
class FundamentalData:
    kappa_mu: np.ndarray
    kappa_pi: np.ndarray
    H: np.ndarray
    K: np.ndarray


def fundamental_data(surface, s):
    """Principal curvatures, mean and Gauss curvature at arclength positions ``s``."""
    piece, p = surface.profile.locate(s)
    k_mu = np.empty_like(p)
    k_pi = np.empty_like(p)
    for idx in np.unique(piece):
        sel = piece == idx
        _, _, _, k_mu[sel], k_pi[sel], _, _ = curvature_from_jet(surface.profile.jet(int(idx), p[sel]))
    return FundamentalData(k_mu, k_pi, 0.5 * (k_mu + k_pi), k_mu * k_pi)


def grad_II_norm(surface):
    """Per-sample ``|nabla II|`` from the frame formulas."""
    smp = surface.samples
    return np.sqrt(smp.dkappa_mu**2 + 3.0 * smp.dkappa_pi**2)


def grad_H(surface):
    """Per-sample meridian derivative of ``H`` (the only component of ``nabla H``)."""
    smp = surface.samples
    return 0.5 * (smp.dkappa_mu + smp.dkappa_pi)


# --------------------------------------------------------------------------
# finite-difference oracle in coordinates (p, theta)


def _embed(profile, index, p, theta):
    pos = profile.position(index, p)
    return np.stack([pos[0], pos[1] * np.cos(theta), pos[1] * np.sin(theta)], axis=-1)


def _first_second(profile, index, p, theta, hp, ht):
    """Metric and second fundamental form at (p, theta) by central differences of the embedding."""
    def X(i, j):
        return _embed(profile, index, p + i * hp, theta + j * ht)

    c = X(0, 0)
    xp = (X(1, 0) - X(-1, 0)) / (2 * hp)[..., None]
    xt = (X(0, 1) - X(0, -1)) / (2 * ht)
    xpp = (X(1, 0) - 2 * c + X(-1, 0)) / (hp**2)[..., None]
    xtt = (X(0, 1) - 2 * c + X(0, -1)) / ht**2
    xpt = (X(1, 1) - X(1, -1) - X(-1, 1) + X(-1, -1)) / (4 * hp * ht)[..., None]
    normal = np.cross(xp, xt)
    normal /= np.linalg.norm(normal, axis=-1, keepdims=True)
    g = np.empty(p.shape + (2, 2))
    g[..., 0, 0] = np.sum(xp * xp, -1)
    g[..., 0, 1] = g[..., 1, 0] = np.sum(xp * xt, -1)
    g[..., 1, 1] = np.sum(xt * xt, -1)
    b = np.empty_like(g)
    b[..., 0, 0] = np.sum(xpp * normal, -1)
    b[..., 0, 1] = b[..., 1, 0] = np.sum(xpt * normal, -1)
    b[..., 1, 1] = np.sum(xtt * normal, -1)
    return g, b


def _fd_steps(surface):
    smp = surface.samples
    jet_speed = np.empty_like(smp.p)
    for idx in np.unique(smp.piece):
        sel = smp.piece == idx
        d1 = surface.profile.jet(int(idx), smp.p[sel], 1)[1]
        jet_speed[sel] = np.hypot(d1[0], d1[1])
    curv = np.abs(smp.kappa_mu) + np.abs(smp.kappa_pi)
    # parameter length over which the geometry turns appreciably
    local = 1.0 / (jet_speed * np.maximum(curv, 1e-300))
    return FD_STEP * np.minimum(local, 1.0)


def fd_covariant_derivative(surface, theta=0.0):
    """Finite-difference ``nabla II`` at every sample, in coordinates ``(p, theta)``.

    Returns ``(g, II, nablaII)`` with ``nablaII[..., c, a, b] = (nabla_c II)_ab``.
    Everything is computed from embedding positions only: metric, unit normal,
    second fundamental form, Christoffel symbols and the covariant derivative.
    """
    smp = surface.samples
    hp_all = _fd_steps(surface)
    n = len(smp.p)
    g0 = np.empty((n, 2, 2))
    b0 = np.empty((n, 2, 2))
    dg = np.empty((n, 2, 2, 2))
    db = np.empty((n, 2, 2, 2))
    ht = FD_STEP
    for idx in np.unique(smp.piece):
        sel = smp.piece == idx
        p, hp = smp.p[sel], hp_all[sel]
        th = np.full_like(p, theta)
        g0[sel], b0[sel] = _first_second(surface.profile, int(idx), p, th, hp, ht)
        gpp, bpp = _first_second(surface.profile, int(idx), p + hp, th, hp, ht)
        gpm, bpm = _first_second(surface.profile, int(idx), p - hp, th, hp, ht)
        gtp, btp = _first_second(surface.profile, int(idx), p, th + ht, hp, ht)
        gtm, btm = _first_second(surface.profile, int(idx), p, th - ht, hp, ht)
        dg[sel, 0] = (gpp - gpm) / (2 * hp)[:, None, None]
        dg[sel, 1] = (gtp - gtm) / (2 * ht)
        db[sel, 0] = (bpp - bpm) / (2 * hp)[:, None, None]
        db[sel, 1] = (btp - btm) / (2 * ht)
    ginv = np.linalg.inv(g0)
    # Gamma[k, i, j] = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
    lower = 0.5 * (
        np.einsum("nijl->nijl", dg)
        + np.einsum("njil->nijl", dg)
        - np.einsum("nlij->nijl", dg)
    )
    gamma = np.einsum("nkl,nijl->nkij", ginv, lower)
    nabla = (
        db
        - np.einsum("ndca,ndb->ncab", gamma, b0)
        - np.einsum("ndcb,nad->ncab", gamma, b0)
    )
    return g0, b0, nabla


def _graph_heights(surface, index, p0, h, offsets):
    """Heights ``f(u, w)`` of the surface over its tangent plane at ``(p0, theta=0)``.

    ``u`` runs along the meridian tangent and ``w`` along the parallel. A point
    of the normal line over ``(u, w)`` lies on the surface iff its axial and
    radial coordinates lie on the profile, which gives two equations in the
    profile parameter and the height, solved by Newton.
    """
    prof = surface.profile
    jet = prof.jet(index, p0, 1)
    x0, r0 = jet[0]
    v = np.hypot(*jet[1])
    xs, rs = jet[1] / v
    heights = {}
    for i, j in offsets:
        u, w = i * h, j * h
        p = p0 + u / v
        f = np.zeros_like(p0)
        for _ in range(25):
            # point = X0 + u T + w E + f N, T = (xs, rs, 0), E = (0, 0, 1), N = (-rs, xs, 0)
            px = x0 + u * xs - f * rs
            py = r0 + u * rs + f * xs
            r = np.hypot(py, w)
            pj = prof.jet(index, p, 1)
            F1 = pj[0, 0] - px
            F2 = pj[0, 1] - r
            dr = py * xs / r
            a, b, c, d = pj[1, 0], rs, pj[1, 1], -dr
            det = a * d - b * c
            dp = (F1 * d - b * F2) / det
            df = (a * F2 - c * F1) / det
            p, f = p - dp, f - df
            if np.all(np.abs(dp) * v + np.abs(df) <= 1e-15 * (np.abs(x0) + np.abs(r0)) + 1e-13 * h):
                break
        heights[i, j] = f
    return heights


def fd_graph_derivatives(surface):
    """Second and third derivatives of the tangent-plane height function at each sample.

    At the base point the Christoffel symbols of graph coordinates vanish, so
    ``II_ij = f_ij`` and ``(nabla_k II)_ij = f_ijk`` in the orthonormal frame
    (meridian, parallel). Returns ``(f2, f3)`` with shapes (m, 2, 2) and
    (m, 2, 2, 2).
    """
    smp = surface.samples
    hp = _fd_steps(surface)
    offsets = [(i, j) for i in range(-2, 3) for j in range(-2, 3)]
    m = len(smp.p)
    f2 = np.empty((m, 2, 2))
    f3 = np.empty((m, 2, 2, 2))
    for idx in np.unique(smp.piece):
        sel = smp.piece == idx
        p0 = smp.p[sel]
        jet = surface.profile.jet(int(idx), p0)
        h = hp[sel] * np.hypot(*jet[1])  # parameter step -> length
        F = _graph_heights(surface, int(idx), p0, h, offsets)

        fuu = (F[1, 0] - 2 * F[0, 0] + F[-1, 0]) / h**2
        fww = (F[0, 1] - 2 * F[0, 0] + F[0, -1]) / h**2
        fuw = (F[1, 1] - F[1, -1] - F[-1, 1] + F[-1, -1]) / (4 * h**2)
        fuuu = (F[2, 0] - 2 * F[1, 0] + 2 * F[-1, 0] - F[-2, 0]) / (2 * h**3)
        fwww = (F[0, 2] - 2 * F[0, 1] + 2 * F[0, -1] - F[0, -2]) / (2 * h**3)
        fuuw = ((F[1, 1] - 2 * F[0, 1] + F[-1, 1]) - (F[1, -1] - 2 * F[0, -1] + F[-1, -1])) / (2 * h**3)
        fuww = ((F[1, 1] - 2 * F[1, 0] + F[1, -1]) - (F[-1, 1] - 2 * F[-1, 0] + F[-1, -1])) / (2 * h**3)
        f2[sel] = np.stack([np.stack([fuu, fuw], -1), np.stack([fuw, fww], -1)], -2)
        f3[sel, 0, 0, 0] = fuuu
        f3[sel, 1, 1, 1] = fwww
        f3[sel, 0, 0, 1] = f3[sel, 0, 1, 0] = f3[sel, 1, 0, 0] = fuuw
        f3[sel, 0, 1, 1] = f3[sel, 1, 0, 1] = f3[sel, 1, 1, 0] = fuww
    return f2, f3


def fd_grad_II_norm(surface):
    """Per-sample ``|nabla II|`` from finite differences of the embedding."""
    _, f3 = fd_graph_derivatives(surface)
    return np.sqrt(np.sum(f3**2, axis=(1, 2, 3)))


def fd_principal_curvatures(surface):
    """Per-sample principal curvatures (ascending) from finite differences of the embedding."""
    f2, _ = fd_graph_derivatives(surface)
    return np.linalg.eigvalsh(f2)


def fd_umbilical_deficit(surface):
    k = fd_principal_curvatures(surface)
    pointwise = np.abs(k[:, 1] - k[:, 0]) / math.sqrt(2.0)
    return UmbilicalDeficit(float(np.max(pointwise)), math.sqrt(surface.integrate(pointwise**2)))


def _curvature_scale(surface):
    smp = surface.samples
    return float(np.max(np.abs(smp.kappa_mu) + np.abs(smp.kappa_pi)))


def sup_grad_II(surface, check=True):
    """``sup |nabla II|`` over the meridian samples.

    With ``check`` the value is recomputed from finite differences of the
    embedding (general-coordinate Christoffel symbols) and a disagreement above
    1% raises :class:`ConsistencyError`.
    """
    value = float(np.max(grad_II_norm(surface)))
    if check:
        other = float(np.max(fd_grad_II_norm(surface)))
        floor = 1e-6 * _curvature_scale(surface) ** 2
        if abs(value - other) > CONSISTENCY_RTOL * max(value, other) + floor:
            raise ConsistencyError(
                f"sup |nabla II|: frame formulas give {value:.6e}, finite differences {other:.6e}"
            )
    return value


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class UmbilicalDeficit:
    sup: float
    l2: float


def umbilical_deficit(surface):
    """Sup and L^2 norms of ``II - H Id``, whose pointwise size is ``|kappa_mu - kappa_pi|/sqrt 2``."""
    smp = surface.samples
    pointwise = np.abs(smp.kappa_mu - smp.kappa_pi) / math.sqrt(2.0)
    return UmbilicalDeficit(float(np.max(pointwise)), math.sqrt(surface.integrate(pointwise**2)))


def symbol_values(dk_mu, dk_pi, psi):
    """Commutator symbol at unit covector ``(cos psi, sin psi)`` in the principal frame.

    ``sum_i xi_i (II_{jk,i} xi_j xi_k - 2 H_{,i})``, which for revolution
    surfaces equals ``cos psi ((3 kappa_pi' - kappa_mu') sin^2 psi - kappa_pi')``.
    """
    c, s = np.cos(psi), np.sin(psi)
    return c * ((3.0 * dk_pi - dk_mu) * s**2 - dk_pi)


def _symbol_sup_pointwise(dk_mu, dk_pi):
    # maximize (1 - u)(A u - B)^2 over u = sin^2 psi in [0, 1]
    A = 3.0 * dk_pi - dk_mu
    B = dk_pi
    best = B**2
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(A != 0, (2.0 * A + B) / (3.0 * A), 0.0)
    u = np.clip(u, 0.0, 1.0)
    best = np.maximum(best, (1.0 - u) * (A * u - B) ** 2)
    return np.sqrt(best)


def commutator_symbol_sup(surface):
    """Sup over the surface and unit covectors of the commutator principal symbol."""
    smp = surface.samples
    return float(np.max(_symbol_sup_pointwise(smp.dkappa_mu, smp.dkappa_pi)))


@lru_cache(maxsize=1)
def symbol_norm_constant(grid=20001):
    """Smallest ``C`` with ``|symbol(xi)| <= C |T|`` over symmetric 3-tensors ``T`` on R^2.

    For each unit ``xi`` the symbol is a linear functional ``L(xi) . T`` of the
    four independent components ``(T111, T112, T122, T222)``, whose Frobenius
    multiplicities are ``(1, 3, 3, 1)``; the dual norm is maximized by brute
    force over a dense grid of directions.
    """
    psi = np.linspace(0.0, 2.0 * np.pi, grid)
    c, s = np.cos(psi), np.sin(psi)
    L = np.stack([c**3 - c, 3 * c**2 * s - s, 3 * c * s**2 - c, s**3 - s])
    mult = np.array([1.0, 3.0, 3.0, 1.0])[:, None]
    return float(np.sqrt(np.max(np.sum(L**2 / mult, axis=0))))


def sup_grad_H(surface, region=None):
    values = np.abs(grad_H(surface))
    if region is not None:
        values = values[surface.region_mask(region)]
        if values.size == 0:
            raise DomainError(f"surface has no {region!r} region")
    return float(np.max(values))


def H_stddev(surface, region=None):
    """Area-weighted standard deviation of ``H`` (optionally on one region)."""
    smp = surface.samples
    mask = np.ones(len(smp.p), bool) if region is None else surface.region_mask(region)
    if not np.any(mask):
        raise DomainError(f"surface has no {region!r} region")
    w = smp.area_weight[mask]
    H = smp.H[mask]
    mean = np.average(H, weights=w)
    return float(math.sqrt(np.average((H - mean) ** 2, weights=w)))


def gauss_bonnet(surface):
    """``int K dA``; equals ``4 pi`` on closed genus-zero surfaces."""
    return surface.integrate(surface.samples.K)


@dataclass(frozen=True)
class ToppingReport:
    diameter: float
    bound: float
    satisfied: bool


def topping_report(surface, diameter=None, mesh_resolution=256):
    """Both sides of ``d <= (32/pi) int |H| dA``."""
    from .diameter import intrinsic_diameter

    if not surface.closed:
        raise DomainError("Topping's inequality needs a closed surface")
    d = intrinsic_diameter(surface, mesh_resolution) if diameter is None else diameter
    bound = 32.0 / math.pi * surface.integrate(np.abs(surface.samples.H))
    return ToppingReport(float(d), float(bound), bool(d <= bound))


@dataclass(frozen=True)
class UmbilicChain:
    """Pole-anchored bound ``|II - H Id| <= sqrt(2/3) sup|nabla II| d`` and its inputs."""

    deficit: float
    bound: float
    sup_grad_II: float
    diameter: float
    in_small_regime: bool

    @property
    def holds(self):
        return self.deficit <= self.bound * (1 + 1e-9) + 1e-12


def nearly_umbilical_chain(surface, diameter, grad_ii=None):
    """Check the umbilic-anchoring chain on a closed revolution surface.

    Poles are umbilic, and along a meridian
    ``|d/ds (kappa_mu - kappa_pi)|/sqrt 2 <= sqrt(2/3) |nabla II|``; every
    point is within meridian distance ``d`` of a pole. ``in_small_regime``
    reports whether ``3 sup|nabla II| d < 1/2``.
    """
    g = sup_grad_II(surface, check=False) if grad_ii is None else grad_ii
    deficit = umbilical_deficit(surface).sup
    return UmbilicChain(deficit, math.sqrt(2.0 / 3.0) * g * diameter, g, diameter, 3 * g * diameter < 0.5)


def geometry_report(surface, mesh_resolution=256, check=True):
    """Summary dictionary: area, diameter, sup_grad_II, deficits, Topping sides, symbol sup."""
    from .diameter import intrinsic_diameter

    d = intrinsic_diameter(surface, mesh_resolution)
    top = topping_report(surface, diameter=d)
    deficit = umbilical_deficit(surface)
    return {
        "area": surface.area,
        "diameter": d,
        "sup_grad_II": sup_grad_II(surface, check=check),
        "umbilical_deficit": asdict(deficit),
        "topping_lhs": top.diameter,
        "topping_rhs": top.bound,
        "symbol_sup": commutator_symbol_sup(surface),
        "gauss_bonnet": gauss_bonnet(surface),
    }
