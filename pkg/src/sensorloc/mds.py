"""Classic metric multidimensional scaling and the full relative-map pipeline.

The embedding step double-centers the squared-distance estimates,
diagonalizes the resulting Gram matrix, and keeps the top eigenpairs:
``coords = V_d * sqrt(clamp(lambda_d, 0))``.  Applied to exact squared
distances this recovers the configuration up to a rigid motion.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .network import CONNECTIVITY, MeasurementGraph
from .paths import all_pairs_estimates, squared_distance_matrix


class EigenConvergenceError(RuntimeError):
    """The symmetric eigensolver failed to converge."""


class DegenerateEmbeddingWarning(UserWarning):
    """Fewer positive eigenvalues than requested embedding dimensions."""


@dataclass
class SpectralDecomposition:
    """Eigenvalues in descending order with orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def _require_symmetric(a: np.ndarray, tol: float) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if float(np.abs(a - a.T).max(initial=0.0)) > tol * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    return (a + a.T) / 2.0


def double_center(squared: np.ndarray) -> np.ndarray:
    """Apply the centering projector on both sides: -(1/2) L M L.

    The input diagonal is forced to zero first; the output annihilates
    the all-ones vector (rows and columns sum to zero).
    """
    m = _require_symmetric(squared, 1e-9).copy()
    np.fill_diagonal(m, 0.0)
    row = m.mean(axis=1, keepdims=True)
    col = m.mean(axis=0, keepdims=True)
    centered = -0.5 * (m - row - col + m.mean())
    return (centered + centered.T) / 2.0


def symmetric_eigen(a: np.ndarray, symmetry_tol: float = 1e-12) -> SpectralDecomposition:
    """Full eigendecomposition of a symmetric matrix, descending order."""
    sym = _require_symmetric(a, symmetry_tol)
    try:
        values, vectors = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(str(exc)) from exc
    return SpectralDecomposition(values=values[::-1].copy(), vectors=vectors[:, ::-1].copy())


def symmetric_eigenvalues(a: np.ndarray, symmetry_tol: float = 1e-12) -> np.ndarray:
    """Eigenvalues only (descending); cheaper when vectors are not needed."""
    sym = _require_symmetric(a, symmetry_tol)
    try:
        values = np.linalg.eigvalsh(sym)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(str(exc)) from exc
    return values[::-1].copy()


def mds_embed(squared: np.ndarray, dim: int) -> np.ndarray:
    """Embed a squared-distance matrix into ``dim`` coordinates.

    Negative eigenvalues among the kept ones (noise makes the centered
    matrix indefinite) are clamped to zero, which keeps the result the
    best positive-semidefinite rank-``dim`` fit; the corresponding output
    columns are zero and a DegenerateEmbeddingWarning is issued.
    """
    squared = np.asarray(squared, dtype=float)
    n = squared.shape[0]
    if dim > n:
        raise ValueError("embedding dimension exceeds the number of points")
    dec = symmetric_eigen(double_center(squared))
    top = dec.values[:dim]
    scale = float(np.abs(dec.values).max(initial=0.0))
    if np.any(top < -1e-12 * max(scale, 1.0)):
        good = int(np.sum(top >= -1e-12 * max(scale, 1.0)))
        warnings.warn(
            f"only {good} of {dim} requested dimensions carry non-negative "
            "spectrum; remaining columns are zero",
            DegenerateEmbeddingWarning,
            stacklevel=2,
        )
    coords = dec.vectors[:, :dim] * np.sqrt(np.maximum(top, 0.0))
    return coords - coords.mean(axis=0)


def mds_map(graph: MeasurementGraph, dim: int) -> np.ndarray:
    """Relative map from connectivity alone: shortest paths, then MDS.

    Requires a connected graph; an unreachable pair raises
    UnreachablePairError.  In connectivity mode path lengths are hop
    counts times R; in range mode they are summed edge measurements.
    """
    table = all_pairs_estimates(graph)
    return mds_embed(squared_distance_matrix(table), dim)


def hop_estimate_kind(graph: MeasurementGraph) -> str:
    return "hops" if graph.mode == CONNECTIVITY else "weighted"
