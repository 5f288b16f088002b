"""
Gohberg's lemma on the circle.

A degree-0 symbol on S^1 is a pair of periodic functions ``a_+(x)``,
``a_-(x)`` (its values on the two rays ``xi > 0`` and ``xi < 0``). On the
``N``-point grid it is quantized as

    (A u)(x) = sum_xi e^{i x xi} a(x, sgn xi) u_hat(xi),

i.e. ``A = sum_pm diag(a_pm) F^* Pi_pm F`` with ``Pi_pm`` the frequency
projections and the zero mode assigned to the ``+`` branch. Order-``k``
symbols ``a(x, xi) |xi|^k`` are reduced to order 0 by composing with the
isometry ``(1 + Delta)^{-k/2}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.linalg import circulant
from scipy.sparse.linalg import LinearOperator, svds

from .errors import DomainError

__all__ = [
    "CircleSymbol",
    "QuantizedOperator",
    "GohbergGap",
    "parse_symbol",
    "quantize",
    "operator_norm",
    "gohberg_gap",
    "essential_upper_bounds",
    "oscillatory_residual",
    "order_k_gap",
    "resolution_tol",
    "smooth_bump",
    "gohberg_report",
]

DENSE_LIMIT = 1024
SUP_GRID = 1 << 16


@dataclass(frozen=True)
class CircleSymbol:
    """Two branches as real Fourier coefficients ``c0, c1, s1, c2, s2, ...`` (complex allowed)."""

    plus: tuple
    minus: tuple
    order: int = 0
    label: str = "custom"

    def __post_init__(self):
        if self.order < 0:
            raise DomainError("symbol order must be nonnegative")
        if not self.plus or not self.minus:
            raise DomainError("each branch needs at least a constant term")

    @classmethod
    def constant(cls, c, order=0):
        return cls((c,), (c,), order, f"const:{c}")

    @staticmethod
    def _eval(coeffs, x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, complex(coeffs[0]))
        for k in range(1, (len(coeffs) + 1) // 2 + 1):
            ci = 2 * k - 1
            if ci < len(coeffs):
                out = out + coeffs[ci] * np.cos(k * x)
            if ci + 1 < len(coeffs):
                out = out + coeffs[ci + 1] * np.sin(k * x)
        return out

    def branch(self, sign, x):
        return self._eval(self.plus if sign > 0 else self.minus, x)

    @property
    def is_real(self):
        return all(complex(c).imag == 0 for c in self.plus + self.minus)

    def sup(self):
        """``max |a|`` over both branches on a dense grid."""
        x = 2.0 * np.pi * np.arange(SUP_GRID) / SUP_GRID
        return float(max(np.max(np.abs(self.branch(1, x))), np.max(np.abs(self.branch(-1, x)))))

    def second_derivative_bound(self):
        """``sum k^2 (|c_k| + |s_k|)`` over both branches: bounds ``|a_pm''|``."""
        def bound(coeffs):
            return sum(((i + 1) // 2) ** 2 * abs(complex(c)) for i, c in enumerate(coeffs) if i)

        return max(bound(self.plus), bound(self.minus))

    def conj(self):
        return CircleSymbol(
            tuple(complex(c).conjugate() for c in self.plus),
            tuple(complex(c).conjugate() for c in self.minus),
            self.order,
            f"conj({self.label})",
        )

    def __add__(self, other):
        if self.order != other.order:
            raise DomainError("cannot add symbols of different order")

        def add(a, b):
            n = max(len(a), len(b))
            a = tuple(a) + (0,) * (n - len(a))
            b = tuple(b) + (0,) * (n - len(b))
            return tuple(x + y for x, y in zip(a, b))

        return CircleSymbol(add(self.plus, other.plus), add(self.minus, other.minus), self.order,
                            f"{self.label}+{other.label}")


def _coeffs(text):
    try:
        vals = [complex(v.strip().replace("i", "j")) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise DomainError(f"bad Fourier coefficients {text!r}") from exc
    if not vals:
        raise DomainError("empty coefficient list")
    return tuple(v.real if v.imag == 0 else v for v in vals)


def parse_symbol(spec):
    """``branch+:c0,c1,s1,...;branch-:...;order:k``.

    A missing branch copies the other one; ``order`` defaults to 0.
    """
    parts = {}
    for chunk in spec.split(";"):
        if not chunk.strip():
            continue
        key, sep, val = chunk.partition(":")
        if not sep:
            raise DomainError(f"malformed symbol component {chunk!r}")
        parts[key.strip().lower()] = val.strip()
    unknown = set(parts) - {"branch+", "branch-", "order"}
    if unknown:
        raise DomainError(f"unknown symbol keys {sorted(unknown)}")
    if "branch+" not in parts and "branch-" not in parts:
        raise DomainError("symbol needs branch+ or branch-")
    plus = _coeffs(parts.get("branch+", parts.get("branch-")))
    minus = _coeffs(parts.get("branch-", parts.get("branch+")))
    try:
        order = int(parts.get("order", "0"))
    except ValueError as exc:
        raise DomainError("order must be an integer") from exc
    return CircleSymbol(plus, minus, order, spec)


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class QuantizedOperator:
    N: int
    matrix: np.ndarray = field(repr=False)

    @property
    def grid(self):
        return 2.0 * np.pi * np.arange(self.N) / self.N

    def apply(self, u):
        return self.matrix @ u


def _check_N(N):
    if N < 16 or N & (N - 1):
        raise DomainError(f"grid size must be a power of two >= 16, got {N}")


def frequencies(N):
    return np.fft.fftfreq(N, 1.0 / N)


def _multiplier_circulant(mult):
    # matrix of F^* diag(mult) F with the unitary DFT
    return circulant(np.fft.ifft(mult))


def quantize(a, N, multiplier=None, zero_mode="plus"):
    """Dense matrix of ``Op(a |xi|^k)`` (times an optional extra multiplier) on the N-grid.

    ``zero_mode`` selects which branch acts on the ``xi = 0`` mode.
    """
    _check_N(N)
    xi = frequencies(N)
    x = 2.0 * np.pi * np.arange(N) / N
    plus = xi > 0 if zero_mode == "minus" else xi >= 0
    weight = np.abs(xi) ** a.order if a.order else np.ones(N)
    if multiplier is not None:
        weight = weight * multiplier
    A = a.branch(1, x)[:, None] * _multiplier_circulant(plus * weight)
    A += a.branch(-1, x)[:, None] * _multiplier_circulant(~plus * weight)
    return QuantizedOperator(N, A)


def bessel_multiplier(N, k):
    """``(1 + xi^2)^{-k/2}``: the isometry ``H^k -> L^2``."""
    return (1.0 + frequencies(N) ** 2) ** (-0.5 * k)


def operator_norm(matrix):
    """Largest singular value; dense SVD up to N = 1024, Lanczos (ARPACK) above."""
    if matrix.shape[0] <= DENSE_LIMIT:
        return float(np.linalg.norm(matrix, 2))
    op = LinearOperator(matrix.shape, matvec=lambda v: matrix @ v, rmatvec=lambda v: matrix.conj().T @ v,
                        dtype=matrix.dtype)
    return float(svds(op, k=1, return_singular_vectors=False, tol=1e-12)[0])


def resolution_tol(a, N, m=None):
    """Expected finite-grid deficit of ``||A||`` below ``||a||_inf``.

    A wave packet that realizes ``|a|`` near its maximum must be localized in
    ``x`` on a grid of spacing ``2 pi / N``; the lost amount scales like
    ``max |a''| (4 pi / N)^2 / 2``. For order ``k`` the multiplier
    ``|xi|^k (1 + xi^2)^{-k/2}`` only reaches ``(N/2)^k / (1 + N^2/4)^{k/2}``.

    With ``m`` the packet is confined to the band ``m < |xi| <= N/2`` (the
    essential bound of :func:`essential_upper_bounds`), so the localization
    term uses the band width ``N - 2m`` in place of ``N``.
    """
    sup = a.sup()
    band = N if m is None else N - 2 * int(m)
    if band <= 0:
        raise DomainError("m must be below N/2")
    tol = a.second_derivative_bound() * (4.0 * math.pi / band) ** 2 / 2.0 + 1e-8 * max(sup, 1.0)
    if a.order:
        half = N / 2.0
        tol += sup * (1.0 - half**a.order / (1.0 + half**2) ** (a.order / 2.0))
    return tol


@dataclass(frozen=True)
class GohbergGap:
    sup_a: float
    op_norm: float
    gap: float
    tol: float

    @property
    def holds(self):
        return self.gap >= -self.tol


def gohberg_gap(a, N):
    """``(||a||_inf, ||A||_2, ||A||_2 - ||a||_inf)`` for an order-0 symbol."""
    if a.order != 0:
        raise DomainError("gohberg_gap needs an order-0 symbol; use order_k_gap")
    sup = a.sup()
    norm = operator_norm(quantize(a, N).matrix)
    return GohbergGap(sup, norm, norm - sup, resolution_tol(a, N))


def essential_upper_bounds(a, N, m_list):
    """``||A - K_m||_2`` for the finite-rank ``K_m = A P_m + P_m A - P_m A P_m``.

    ``P_m`` projects onto frequencies ``|xi| <= m``, so ``A - K_m = (1 - P_m) A (1 - P_m)``.
    """
    m_list = [int(m) for m in m_list]
    if any(b <= a_ for a_, b in zip(m_list, m_list[1:])):
        raise DomainError("m_list must be strictly increasing")
    if any(m < 0 or m >= N // 2 for m in m_list):
        raise DomainError("each m must satisfy 0 <= m < N/2")
    A = quantize(a, N, bessel_multiplier(N, a.order) if a.order else None).matrix
    xi = frequencies(N)
    out = []
    for m in m_list:
        Q = _multiplier_circulant((np.abs(xi) > m).astype(float))
        out.append(operator_norm(Q @ A @ Q))
    return out


def smooth_bump(x, center=math.pi, width=1.5):
    """C_c^infinity bump ``exp(1 - 1/(1 - t^2))``, ``t = (x - center)/width``; not band-limited."""
    t = (np.asarray(x, dtype=float) - center) / width
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out


def oscillatory_residual(a, lam, xi0=1, N=512, f=smooth_bump, return_parts=False):
    """``||A u - a(., xi0) u|| / ||u||`` for ``u = e^{i lam xi0 x} f(x)``.

    Raises
    ------
    DomainError
        If ``lam`` exceeds ``N/4`` (the oscillation is not resolved).
    """
    if a.order != 0:
        raise DomainError("oscillatory residual is defined for order-0 symbols")
    if xi0 not in (1, -1):
        raise DomainError("xi0 must be +1 or -1")
    if lam <= 0 or lam != int(lam):
        raise DomainError("lambda must be a positive integer")
    if lam > N // 4:
        raise DomainError(f"lambda={lam} exceeds the resolvable range N/4={N // 4}")
    op = quantize(a, N)
    x = op.grid
    u = np.exp(1j * lam * xi0 * x) * f(x)
    Au = op.apply(u)
    au = a.branch(xi0, x) * u
    nu = np.linalg.norm(u)
    res = float(np.linalg.norm(Au - au) / nu)
    if return_parts:
        return res, float(np.linalg.norm(Au) / nu), float(np.linalg.norm(au) / nu)
    return res


def order_k_gap(a, N):
    """``||a||_inf - ||Op(a |xi|^k) (1 + xi^2)^{-k/2}||_2``; at most ``resolution_tol`` by the lemma.

    For ``k = 0`` this is ``-gohberg_gap(a, N).gap``.
    """
    B = quantize(a, N, bessel_multiplier(N, a.order)).matrix
    return a.sup() - operator_norm(B)


def gohberg_report(a, N, m_list=(4, 16, 64), lambdas=(16, 32, 64, 128)):
    """JSON-ready summary ``{N, sup_a, op_norm, gap, tol, essential_bounds, essential_tols, residuals}``."""
    if a.order:
        sup = a.sup()
        gap = -order_k_gap(a, N)
        norm = sup + gap
        tol = resolution_tol(a, N)
        residuals = []
    else:
        g = gohberg_gap(a, N)
        sup, norm, gap, tol = g.sup_a, g.op_norm, g.gap, g.tol
        residuals = [{"lambda": int(l), "residual": oscillatory_residual(a, l, N=N)} for l in lambdas if l <= N // 4]
    m_list = [m for m in m_list if m < N // 2]
    return {
        "symbol": a.label,
        "order": a.order,
        "N": N,
        "sup_a": sup,
        "op_norm": norm,
        "gap": gap,
        "tol": tol,
        "essential_bounds": essential_upper_bounds(a, N, m_list),
        "essential_tols": [resolution_tol(a, N, m) for m in m_list],
        "m_list": m_list,
        "residuals": residuals,
    }
