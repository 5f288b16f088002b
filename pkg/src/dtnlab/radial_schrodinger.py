"""
Schrodinger DtN maps for radial potentials.

For ``(Delta + q) u = 0`` in the unit ball with the positive Laplacian, the
ansatz ``u = f(r) Y_k`` separates into

    f'' + (n - 1)/r f' - k (k + n - 2)/r^2 f = q f,

whose regular solution behaves like ``r^k`` at the origin. The DtN map acts on
degree-``k`` harmonics by ``mu_k = f'(1) / f(1)``.

The solver writes ``f = r^k g`` and integrates

    g'' + (2k + n - 1)/r g' = q g,    g(0) = 1, g'(0) = 0,

from a small launch radius, where ``g`` is seeded from its Frobenius series.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .ball_dtn import SpectralOperator
from .errors import DirichletEigenvalueError, DomainError

__all__ = [
    "RadialPotential",
    "RadialSolution",
    "parse_radial",
    "solve_radial_mode",
    "dtn_radial",
    "symbol_table",
    "symbol_table_csv",
    "ball_symbol",
    "conformal_to_potential",
]

LAUNCH_RADIUS = 1e-3
SERIES_ORDER = 12
DEFAULT_RTOL = 1e-12


@dataclass(frozen=True)
class RadialPotential:
    """A potential ``q(|x|)`` on the unit ball, given by its radial profile."""

    profile: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    smoothness: str = "smooth"
    support_radius: float | None = None
    label: str = "custom"

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        values = np.asarray(self.profile(r), dtype=float)
        values = np.broadcast_to(values, r.shape).copy()
        if self.support_radius is not None:
            values[r > self.support_radius] = 0.0
        return values

    def scaled(self, factor):
        profile = self.profile
        return RadialPotential(
            lambda r: factor * np.asarray(profile(r), dtype=float),
            self.smoothness,
            self.support_radius,
            f"{factor!r}*({self.label})",
        )

    def taylor(self, order, width=0.05):
        """Power-series coefficients of the profile at ``r = 0`` (Chebyshev fit on ``[0, width]``)."""
        fit = Chebyshev.interpolate(self, order, domain=[0.0, width])
        coef = fit.convert(kind=Polynomial).coef
        out = np.zeros(order + 1)
        out[: len(coef)] = coef
        return out

    def as_ball_potential(self):
        from .perturbation import BallPotential

        return BallPotential.from_radial(self)


def _bump(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out


def _floats(text, counts, family):
    try:
        vals = [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError as exc:
        raise DomainError(f"could not parse parameters {text!r} for {family}") from exc
    if len(vals) not in counts:
        raise DomainError(f"{family} expects {' or '.join(map(str, counts))} parameters, got {len(vals)}")
    return vals


def parse_radial(spec):
    """Build a :class:`RadialPotential` from the mini-language.

    ``const:c``            constant ``c``
    ``well:a,p``           ``a (1 - r^2)^p``
    ``bump:a,r0,w``        ``a * exp(1 - 1/(1 - ((r - r0)/w)^2))`` on ``|r - r0| < w``
    ``bump:r0,w``          same with ``a = 1``
    ``tablefile:<path>``   CSV of ``r,value`` rows, cubic-spline interpolated
    """
    family, _, params = spec.strip().partition(":")
    family = family.strip().lower()
    if family == "const":
        (c,) = _floats(params, (1,), family)
        return RadialPotential(lambda r: np.full(np.shape(r), c), "analytic", None, spec)
    if family == "well":
        a, p = _floats(params, (2,), family)
        if p < 0:
            raise DomainError("well exponent must be nonnegative")
        return RadialPotential(lambda r: a * (1.0 - np.asarray(r) ** 2) ** p, "smooth", None, spec)
    if family == "bump":
        vals = _floats(params, (2, 3), family)
        a, r0, w = (1.0, *vals) if len(vals) == 2 else vals
        if w <= 0:
            raise DomainError("bump width must be positive")
        support = r0 + w if r0 + w < 1.0 else None
        return RadialPotential(lambda r: a * _bump((np.asarray(r) - r0) / w), "smooth", support, spec)
    if family == "tablefile":
        return _table_potential(params.strip(), spec)
    raise DomainError(f"unknown radial potential family {family!r}")


def _table_potential(path, spec):
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                continue  # header line
    if len(rows) < 4:
        raise DomainError(f"table {path!r} needs at least four numeric rows")
    r, v = np.array(sorted(rows)).T
    spline = CubicSpline(r, v)
    return RadialPotential(spline, "continuous", None, spec)


@dataclass(frozen=True)
class RadialSolution:
    """Regular solution of the degree-``k`` radial equation and its DtN eigenvalue."""

    n: int
    k: int
    r: np.ndarray = field(repr=False)
    f: np.ndarray = field(repr=False)
    df: np.ndarray = field(repr=False)
    mu: float


def _series(q_taylor, n, k, order):
    # f = r^k sum a_j r^j ; a_j j (2k + j + n - 2) = sum_i q_i a_{j-2-i}
    a = np.zeros(order + 1)
    a[0] = 1.0
    for j in range(2, order + 1):
        acc = sum(q_taylor[i] * a[j - 2 - i] for i in range(0, j - 1) if i < len(q_taylor))
        a[j] = acc / (j * (2 * k + j + n - 2))
    return a


def _integrate_mode(q, n, k, rtol, launch, order, leading=1.0, method="DOP853"):
    a = _series(q.taylor(max(order - 2, 0)), n, k, order) * leading
    powers = np.arange(order + 1)
    g0 = np.polyval(a[::-1], launch)
    dg0 = np.polyval((powers[1:] * a[1:])[::-1], launch)
    drift = 2 * k + n - 1

    def rhs(r, y):
        return [y[1], float(q(np.array([r]))[0]) * y[0] - drift / r * y[1]]

    sol = solve_ivp(
        rhs,
        (launch, 1.0),
        [g0, dg0],
        method=method,
        rtol=rtol,
        atol=rtol * 1e-3 * abs(leading),
        dense_output=True,
    )
    if not sol.success:
        raise RuntimeError(f"radial integration failed for k={k}: {sol.message}")
    return sol


def solve_radial_mode(
    q,
    n,
    k,
    rtol=DEFAULT_RTOL,
    launch=LAUNCH_RADIUS,
    series_order=SERIES_ORDER,
    samples=201,
    method="DOP853",
):
    """Regular solution of the degree-``k`` radial Schrodinger equation.

    Parameters
    ----------
    q : RadialPotential
    n : int
        Ambient dimension.
    k : int
        Harmonic degree.
    rtol : float
        Relative tolerance of the ODE integration.
    launch : float
        Radius where the Frobenius series hands over to the integrator.
    series_order : int
        Truncation order of the Frobenius series.
    samples : int
        Number of radial samples stored in the result.

    Raises
    ------
    DirichletEigenvalueError
        If ``|f(1)| < 1e-10 max |f|``, i.e. zero is a Dirichlet eigenvalue.
    """
    if k < 0:
        raise DomainError(f"degree must be nonnegative, got {k}")
    sol = _integrate_mode(q, n, k, rtol, launch, series_order, method=method)
    r = np.concatenate([[0.0], np.linspace(launch, 1.0, samples - 1)])
    g = np.empty_like(r)
    dg = np.empty_like(r)
    g[0], dg[0] = 1.0, 0.0
    g[1:], dg[1:] = sol.sol(r[1:])
    f = r**k * g
    df = k * r ** max(k - 1, 0) * g + r**k * dg if k > 0 else dg
    g1, dg1 = sol.y[0, -1], sol.y[1, -1]
    if abs(g1) < 1e-10 * np.max(np.abs(f)):
        raise DirichletEigenvalueError(
            f"f(1) vanishes for degree {k}: 0 is a Dirichlet eigenvalue of Delta + q", degree=k
        )
    return RadialSolution(n, k, r, f, df, float(k + dg1 / g1))


def dtn_radial(q, n, K, rtol=DEFAULT_RTOL, **kwargs):
    """Diagonal DtN section of ``Delta + q`` for a radial potential, degrees <= K."""
    mus = {}
    for k in range(K + 1):
        try:
            mus[k] = solve_radial_mode(q, n, k, rtol=rtol, **kwargs).mu
        except DirichletEigenvalueError as exc:
            raise DirichletEigenvalueError(f"degree {k}: {exc}", degree=k) from exc
    return SpectralOperator.from_diagonal(n, K, mus)


def symbol_table(q, n, K, rtol=DEFAULT_RTOL):
    """Pairs ``(k (k + n - 2), mu_k)``: the function ``f`` with ``Lambda_q = f(Delta)``."""
    op = dtn_radial(q, n, K, rtol=rtol)
    out = []
    for k, (start, _) in op.blocks.items():
        out.append((float(k * (k + n - 2)), float(op.matrix[start, start])))
    return out


def symbol_table_csv(table, path=None):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "laplace_eigenvalue", "mu"])
    for k, (lam, mu) in enumerate(table):
        writer.writerow([k, repr(lam), repr(mu)])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def ball_symbol(lam, n):
    """The free-ball symbol: the nonnegative root of ``mu^2 + (n - 2) mu = lam``."""
    lam = np.asarray(lam, dtype=float)
    return 0.5 * (-(n - 2) + np.sqrt((n - 2) ** 2 + 4.0 * lam))


def conformal_to_potential(phi, n, points=4001):
    """Schrodinger potential of the conformal metric ``e^{2 phi} g_std`` on B^n.

    With conductivity ``gamma = e^{(n-2) phi}`` and ``w = sqrt(gamma)``,
    ``q = (w'' + (n - 1)/r w') / w`` (Euclidean Laplacian of ``w`` over ``w``),
    evaluated by second-order finite differences on a uniform radial grid and
    spline-interpolated. Truncation error is ``O(h^2)`` with ``h = 1/(points-1)``:
    about 1e-6 relative for smooth factors at the default grid.

    Parameters
    ----------
    phi : callable
        Radial conformal factor ``phi(r)``; should vanish near ``r = 1``.
    n : int
    points : int
    """
    r = np.linspace(0.0, 1.0, points)
    h = r[1] - r[0]
    w = np.exp(0.5 * (n - 2) * np.asarray(phi(r), dtype=float))
    dw = np.gradient(w, h, edge_order=2)
    d2w = np.gradient(dw, h, edge_order=2)
    lap = np.empty_like(w)
    lap[1:] = d2w[1:] + (n - 1) / r[1:] * dw[1:]
    lap[0] = n * d2w[0]  # (n-1) w'/r -> (n-1) w''(0)
    q = lap / w
    spline = CubicSpline(r, q)
    return RadialPotential(spline, "finite-difference", None, f"conformal(n={n})")
