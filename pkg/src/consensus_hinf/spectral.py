"""Laplacian spectra, algebraic connectivity, and the orthogonal reduction.

The Laplacian of a connected undirected graph has a simple zero eigenvalue
with eigenvector 1_n; the remaining eigenvalues are positive.  ``reduction``
rotates the consensus direction into the last coordinate, exposing the
positive-definite block that carries all disturbance-to-error dynamics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DisconnectedGraphError, NumericError
from .graphs import FamilyKind, Graph, GraphFamily

# Zero-eigenvalue tolerance is relative to the spectral radius so the
# connectivity test is scale-free.
ZERO_TOL_FACTOR = 1e-9


def laplacian(g: Graph) -> np.ndarray:
    """Graph Laplacian L = diag(row sums) - A; rows sum to zero."""
    deg = g.adjacency.sum(axis=1)
    return np.diag(deg) - g.adjacency


def mean_projector(n: int) -> np.ndarray:
    """Projector removing the per-agent mean: (n-1)/n on, -1/n off diagonal."""
    return np.eye(n) - np.full((n, n), 1.0 / n)


@dataclass(frozen=True)
class Spectrum:
    """Sorted Laplacian eigenvalues with the connectivity verdict.

    ``lambda2`` is the algebraic connectivity (minimum non-zero eigenvalue),
    defined only when the graph is connected.  ``gamma`` holds the trailing
    n-1 eigenvalues.
    """

    eigenvalues: np.ndarray
    lambda2: float | None
    connected: bool
    gamma: np.ndarray
    tol: float

    def to_json(self) -> dict:
        return {
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "lambda2": self.lambda2,
            "connected": self.connected,
        }


def spectrum(g: Graph) -> Spectrum:
    """Eigenvalues of the symmetric Laplacian, ascending, plus connectivity."""
    lap = laplacian(g)
    try:
        eig = np.linalg.eigvalsh(lap)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"eigensolver did not converge (n={g.n}, "
            f"max|L|={np.abs(lap).max():.3e})"
        ) from exc
    tol = ZERO_TOL_FACTOR * max(1.0, float(eig[-1]))
    if abs(float(eig[0])) > tol:
        raise NumericError(
            f"Laplacian lacks its zero eigenvalue: lambda1={eig[0]:.3e}, tol={tol:.3e}"
        )
    connected = bool(eig[1] > tol)
    eig = eig.copy()
    eig.setflags(write=False)
    gamma = eig[1:]
    return Spectrum(
        eigenvalues=eig,
        lambda2=float(eig[1]) if connected else None,
        connected=connected,
        gamma=gamma,
        tol=tol,
    )


def closed_form_lambda2(family: GraphFamily) -> float:
    """Analytic algebraic connectivity for the named families.

    Ring lattices have a closed form for k in {1, 2, 3} only; fall back to
    ``spectrum`` for other radii.
    """
    n = family.n
    if family.kind is FamilyKind.COMPLETE:
        return float(n)
    if family.kind is FamilyKind.STAR:
        return 2.0 if n == 2 else 1.0
    if family.kind is FamilyKind.PATH:
        return 4.0 * math.sin(math.pi / (2 * n)) ** 2
    if family.k not in (1, 2, 3):
        raise ValueError(
            f"no closed form for ring lattice k={family.k}; use spectrum()"
        )
    m = 2 * family.k + 1
    return m - math.sin(m * math.pi / n) / math.sin(math.pi / n)


def completion_basis(n: int) -> np.ndarray:
    """Orthogonal Q with last column 1_n/sqrt(n).

    Built as the Householder reflector that swaps e_n with the normalized
    all-ones vector; any orthonormal completion works since downstream
    quantities are basis-independent.
    """
    v = np.full(n, 1.0 / math.sqrt(n))
    u = v - np.eye(n)[:, -1]
    q = np.eye(n) - 2.0 * np.outer(u, u) / (u @ u)
    return q


@dataclass(frozen=True)
class Reduction:
    """Orthogonal reduction of the Laplacian.

    ``Q^T L Q`` is block diagonal ``[lbar1, 0]`` with ``lbar1`` symmetric
    positive definite when the graph is connected; its spectrum equals the
    non-zero Laplacian eigenvalues.
    """

    Q: np.ndarray
    lbar1: np.ndarray


def reduction(g: Graph) -> Reduction:
    spec = spectrum(g)
    if not spec.connected:
        raise DisconnectedGraphError("reduction requires a connected graph")
    q = completion_basis(g.n)
    lbar = q.T @ laplacian(g) @ q
    return Reduction(Q=q, lbar1=lbar[:-1, :-1])
