"""
Finite sections of operators on the truncated harmonic basis, and the exact
Dirichlet-to-Neumann map of the unit ball.

On the unit ball the harmonic extension of ``Y_k`` is ``r^k Y_k``, so the DtN
map acts by ``k`` on degree-``k`` harmonics while the boundary Laplacian acts
by ``k (k + n - 2)``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .harmonics import HarmonicIndex, harmonic_basis, laplace_eigenvalue

__all__ = [
    "SpectralOperator",
    "dtn_ball",
    "boundary_laplacian",
    "ball_identity_residual",
    "commutator",
]


@dataclass(frozen=True)
class SpectralOperator:
    """Dense matrix ``M[beta, alpha] = <Op Y_alpha, Y_beta>`` on a degree-ordered basis."""

    n: int
    K: int
    basis: tuple[HarmonicIndex, ...]
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        size = len(self.basis)
        if self.matrix.shape != (size, size):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match basis size {size}")
        degrees = [idx.k for idx in self.basis]
        if degrees != sorted(degrees):
            raise ValueError("basis must be ordered by degree")
        self.matrix.setflags(write=False)

    @classmethod
    def from_diagonal(cls, n, K, values_by_degree):
        basis = tuple(harmonic_basis(n, K))
        diag = np.array([values_by_degree[idx.k] for idx in basis], dtype=float)
        return cls(n, K, basis, np.diag(diag))

    @property
    def size(self):
        return len(self.basis)

    @property
    def degrees(self):
        return np.array([idx.k for idx in self.basis])

    @property
    def laplace_eigenvalues(self):
        return np.array([laplace_eigenvalue(idx) for idx in self.basis])

    @property
    def blocks(self):
        """``{k: (start, end)}`` offsets of each degree block."""
        out = {}
        for pos, idx in enumerate(self.basis):
            start, _ = out.get(idx.k, (pos, pos))
            out[idx.k] = (start, pos + 1)
        return out

    def block(self, k, l=None):
        l = k if l is None else l
        (a, b), (c, d) = self.blocks[k], self.blocks[l]
        return self.matrix[a:b, c:d]

    def asymmetry(self):
        return float(np.max(np.abs(self.matrix - self.matrix.T), initial=0.0))

    def with_matrix(self, matrix):
        return SpectralOperator(self.n, self.K, self.basis, np.array(matrix, dtype=float))

    def __sub__(self, other):
        _check_compatible(self, other)
        return self.with_matrix(self.matrix - other.matrix)

    def __add__(self, other):
        _check_compatible(self, other)
        return self.with_matrix(self.matrix + other.matrix)

    def scaled(self, factor):
        return self.with_matrix(factor * self.matrix)

    def to_dict(self):
        return {
            "n": self.n,
            "K": self.K,
            "basis": [[idx.k, idx.m] for idx in self.basis],
            "blocks": {str(k): list(v) for k, v in self.blocks.items()},
            "matrix": self.matrix.tolist(),
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    def to_csv(self, path=None, tol=0.0):
        """Sparse ``row,col,value`` listing of entries with ``|value| > tol``."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["row", "col", "value"])
        rows, cols = np.nonzero(np.abs(self.matrix) > tol)
        for i, j in zip(rows, cols):
            writer.writerow([int(i), int(j), repr(float(self.matrix[i, j]))])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text


def _check_compatible(a, b):
    if a.basis != b.basis:
        raise ValueError("operators live on different bases")


def commutator(a, b):
    """Matrix commutator ``[A, B] = AB - BA`` of two sections on the same basis."""
    _check_compatible(a, b)
    return a.matrix @ b.matrix - b.matrix @ a.matrix


def dtn_ball(n, K):
    """DtN map of the unit ball B^n truncated to degrees <= K."""
    return SpectralOperator.from_diagonal(n, K, {k: float(k) for k in range(K + 1)})


def boundary_laplacian(n, K):
    """Positive Laplacian of S^{n-1} truncated to degrees <= K."""
    return SpectralOperator.from_diagonal(
        n, K, {k: float(k * (k + n - 2)) for k in range(K + 1)}
    )


def ball_identity_residual(n, K, dtn=None):
    """Max-norm of ``Lambda^2 + (n - 2) Lambda - Delta`` on the truncated basis.

    ``dtn`` defaults to the exact ball map; pass a perturbed section to probe
    the sensitivity of the residual.
    """
    lam = dtn_ball(n, K) if dtn is None else dtn
    lap = boundary_laplacian(n, K)
    _check_compatible(lam, lap)
    residual = lam.matrix @ lam.matrix + (n - 2) * lam.matrix - lap.matrix
    return float(np.max(np.abs(residual)))
