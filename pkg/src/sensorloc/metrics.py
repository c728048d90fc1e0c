"""Error metrics, alignment transforms, bound radii, spectral checks.

The configuration distance compares centered Gram matrices, so it is
blind to rotations, reflections and translations of either argument;
the bound radii package the admissible-range formulas used throughout
the error envelopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import mds
from .hopterrain import build_lateration
from .network import MeasurementGraph
from .paths import all_pairs_hops


class DegenerateConfigurationError(RuntimeError):
    """The centered estimate does not span the embedding dimension."""


def _center(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x - x.mean(axis=0)


def configuration_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Rigid-invariant distance between two configurations.

    Equals (1/n) * Frobenius norm of the difference of the centered Gram
    matrices, evaluated through a (2d x 2d) trace identity so no n x n
    matrix is ever formed.
    """
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    n, d = x.shape
    u = np.hstack([_center(x), _center(y)])
    # The Gram difference is U diag(+I, -I) U^T; with U = Q T it equals
    # Q (T S T^T) Q^T, so its Frobenius norm is that of the small core.
    # (Going through T instead of U^T U keeps full precision: the trace
    # form squares before subtracting and loses half the digits.)
    _, t = np.linalg.qr(u, mode="reduced")
    sign = np.ones(2 * d)
    sign[d:] = -1.0
    core = (t * sign) @ t.T
    return float(np.linalg.norm(core, "fro")) / n


def optimal_transform_error(x: np.ndarray, y: np.ndarray):
    """Best linear map S aligning the centered estimate onto the truth.

    Returns (S, error) with error = min_S ||center(x) - center(y) S||_F
    divided by sqrt(n).  Raises if the centered estimate is rank
    deficient (no unique alignment).
    """
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    n, d = x.shape
    xc, yc = _center(x), _center(y)
    if np.linalg.matrix_rank(yc) < d:
        raise DegenerateConfigurationError("estimate spans fewer than d dimensions")
    s, *_ = np.linalg.lstsq(yc, xc, rcond=None)
    return s, float(np.linalg.norm(xc - yc @ s)) / math.sqrt(n)


def rmse(x: np.ndarray, y: np.ndarray, mask: np.ndarray | None = None) -> float:
    """Root mean squared per-node position error over the selected nodes."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    if mask is not None:
        x, y = x[mask], y[mask]
    if x.shape[0] == 0:
        raise ValueError("no nodes selected")
    return float(np.sqrt(np.mean(np.sum((x - y) ** 2, axis=1))))


@dataclass(frozen=True)
class BoundSet:
    """Bound radii for a given network size, dimension and alpha."""

    n: int
    dim: int
    alpha: float
    r_tilde: float
    r_mds: float
    r_hop: float
    r_critical: float


def bound_radii(n: int, dim: int, alpha: float = 1.0) -> BoundSet:
    """Evaluate the bound radii; natural logarithm throughout.

    r_tilde / r_mds / r_hop share the base (12 ln n / (alpha (n-2)))^(1/d)
    with constants 2, 32 and 12.  r_critical is the connectivity
    threshold (ln n / (C_d n))^(1/d) with C_2 = pi and C_3 = 4*pi/3 (the
    unit-ball volume; only the planar constant is standard, the 3-d one
    is this toolkit's documented choice).
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if dim not in (2, 3):
        raise ValueError("dimension must be 2 or 3")
    base = (12.0 * math.log(n) / (alpha * (n - 2))) ** (1.0 / dim)
    ball = math.pi if dim == 2 else 4.0 * math.pi / 3.0
    r_critical = (math.log(n) / (ball * n)) ** (1.0 / dim)
    return BoundSet(n, dim, alpha, 2.0 * base, 32.0 * base, 12.0 * base, r_critical)


@dataclass(frozen=True)
class GershgorinBounds:
    centers: np.ndarray
    radii: np.ndarray
    lower: float
    upper: float


def gershgorin_eigen_bounds(a: np.ndarray) -> GershgorinBounds:
    """Disc centers/radii plus global eigenvalue bracket for a square matrix."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    centers = np.diag(a).copy()
    radii = np.sum(np.abs(a), axis=1) - np.abs(centers)
    return GershgorinBounds(centers, radii,
                            float(np.min(centers - radii)),
                            float(np.max(centers + radii)))


def spectral_norm(a: np.ndarray) -> float:
    """Largest singular value, via the symmetric eigensolver."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    if a.shape[0] == a.shape[1] and np.allclose(a, a.T, rtol=0.0, atol=1e-10 * max(1.0, float(np.abs(a).max(initial=0.0)))):
        values = mds.symmetric_eigenvalues((a + a.T) / 2.0)
        return float(np.max(np.abs(values))) if values.size else 0.0
    gram = a @ a.T if a.shape[0] <= a.shape[1] else a.T @ a
    values = mds.symmetric_eigenvalues((gram + gram.T) / 2.0)
    return math.sqrt(max(float(values[0]), 0.0)) if values.size else 0.0


def min_singular_value_centered(positions: np.ndarray) -> float:
    """Smallest singular value of the centered position matrix."""
    xc = _center(positions)
    if xc.shape[0] < xc.shape[1]:
        raise ValueError("need at least as many points as dimensions")
    values = np.linalg.eigvalsh(xc.T @ xc)
    return math.sqrt(max(float(values[0]), 0.0))


@dataclass(frozen=True)
class HopBoundReport:
    pairs_checked: int
    violations: int
    worst_ratio: float


def check_hop_bound(
    graph: MeasurementGraph,
    coords: np.ndarray,
    radio_range: float | None = None,
    alpha: float | None = None,
) -> HopBoundReport:
    """Check hops <= (1 + r_tilde/R) * distance/R + 2 over all pairs.

    ``coords`` are the true positions of every graph node.  Requires a
    connected instance; reports the violation count and the worst
    hops/bound ratio observed.
    """
    coords = np.asarray(coords, dtype=float)
    r = graph.model.radio_range if radio_range is None else radio_range
    a = graph.model.alpha if alpha is None else alpha
    table = all_pairs_hops(graph)
    if not table.reachable.all():
        raise ValueError("hop bound check needs a connected instance")
    n = coords.shape[0]
    i, j = np.triu_indices(n, k=1)
    dist = np.linalg.norm(coords[i] - coords[j], axis=1)
    r_tilde = bound_radii(n, coords.shape[1], a).r_tilde
    bound = (1.0 + r_tilde / r) * dist / r + 2.0
    hops = table.hops[i, j]
    ratios = hops / bound
    return HopBoundReport(
        pairs_checked=int(i.size),
        violations=int(np.sum(hops > bound + 1e-9)),
        worst_ratio=float(ratios.max(initial=0.0)),
    )


def lateration_gram(anchor_positions: np.ndarray) -> np.ndarray:
    """A^T A of the consecutive-difference system for the given anchors."""
    a = build_lateration(anchor_positions).matrix
    return a.T @ a


def lateration_operator_norm(anchor_positions: np.ndarray) -> float:
    """Spectral norm of the least-squares operator (A^T A)^{-1} A^T.

    Equals 1 / sigma_min(A); infinite for singular geometries.
    """
    gram = lateration_gram(anchor_positions)
    lam_min = float(np.linalg.eigvalsh(gram)[0])
    if lam_min <= 0:
        return math.inf
    return 1.0 / math.sqrt(lam_min)
