"""Random geometric measurement graphs with probabilistic detection.

Two nodes at distance z <= R detect each other with probability
``min(1, alpha * (z/R)**(-beta))``; beyond the radio range R they never
do.  Edges carry either the constant 1 (connectivity mode) or the exact
Euclidean distance (range mode).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import cKDTree

from .geometry import AnchorLayout, Seed

CONNECTIVITY = "connectivity"
RANGE = "range"

_DETECT_TAG = "detect"


@dataclass(frozen=True)
class DetectionModel:
    """Radio range and detection-failure parameters (alpha, beta)."""

    radio_range: float
    alpha: float = 1.0
    beta: float = 0.0

    def validate(self, dim: int):
        if self.radio_range <= 0:
            raise ValueError("radio range must be positive")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if not 0 <= self.beta < dim:
            raise ValueError(f"beta must lie in [0, {dim}) for dimension {dim}")


def detection_probability(distance, model: DetectionModel):
    """Probability that a pair at the given distance detects each other.

    Only defined for 0 <= distance <= R; callers must gate on the radio
    range before asking.  Accepts scalars or arrays.
    """
    z = np.asarray(distance, dtype=float)
    r = model.radio_range
    if np.any(z < 0) or np.any(z > r):
        raise ValueError("detection probability is undefined outside [0, R]")
    if model.beta == 0:
        p = np.full_like(z, min(1.0, model.alpha))
    else:
        with np.errstate(divide="ignore"):
            p = np.minimum(1.0, model.alpha * (z / r) ** (-model.beta))
    return float(p) if np.ndim(distance) == 0 else p


@dataclass
class MeasurementGraph:
    """Undirected measurement graph over anchors (ids 0..m-1) then unknowns.

    Edges are stored once with ``edge_i < edge_j`` in lexicographic order.
    """

    n_unknown: int
    n_anchor: int
    mode: str
    model: DetectionModel
    edge_i: np.ndarray
    edge_j: np.ndarray
    weights: np.ndarray
    _adj: sparse.csr_matrix | None = field(default=None, repr=False, compare=False)

    @property
    def n_total(self) -> int:
        return self.n_unknown + self.n_anchor

    @property
    def anchor_ids(self) -> np.ndarray:
        return np.arange(self.n_anchor)

    @property
    def edge_count(self) -> int:
        return self.edge_i.shape[0]

    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric CSR adjacency with edge measurements as weights."""
        if self._adj is None:
            n = self.n_total
            # Exact-zero weights (coincident nodes) would vanish from the
            # sparse structure; nudge them so the edge survives.
            w = np.where(self.weights == 0.0, 1e-300, self.weights)
            rows = np.concatenate([self.edge_i, self.edge_j])
            cols = np.concatenate([self.edge_j, self.edge_i])
            data = np.concatenate([w, w])
            self._adj = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
        return self._adj

    def degrees(self) -> np.ndarray:
        counts = np.zeros(self.n_total, dtype=np.int64)
        np.add.at(counts, self.edge_i, 1)
        np.add.at(counts, self.edge_j, 1)
        return counts


def _candidate_pairs(coords: np.ndarray, radius: float):
    """Index pairs (i<j) within the radius, lexicographically ordered."""
    n = coords.shape[0]
    if radius * radius >= coords.shape[1]:
        # Range covers the whole cube diagonal: every pair qualifies, and
        # triu order is already lexicographic.
        i, j = np.triu_indices(n, k=1)
    else:
        pairs = cKDTree(coords).query_pairs(r=radius, output_type="ndarray")
        if pairs.size == 0:
            return (np.empty(0, dtype=np.int64),) * 2 + (np.empty(0),)
        i = np.minimum(pairs[:, 0], pairs[:, 1])
        j = np.maximum(pairs[:, 0], pairs[:, 1])
        order = np.lexsort((j, i))
        i, j = i[order], j[order]
    dist = np.linalg.norm(coords[i] - coords[j], axis=1)
    keep = dist <= radius  # triu path may include far pairs
    return i[keep], j[keep], dist[keep]


def build_graph(
    positions: np.ndarray,
    model: DetectionModel,
    mode: str,
    seed: Seed,
    anchors: AnchorLayout | None = None,
) -> MeasurementGraph:
    """Sample the measurement graph for the given placement.

    Each pair within the radio range is kept iff a uniform draw keyed by
    the unordered pair id is <= its detection probability, so the edge set
    is order-independent and monotonically coupled in alpha and R.
    """
    if mode not in (CONNECTIVITY, RANGE):
        raise ValueError(f"unknown measurement mode {mode!r}")
    positions = np.asarray(positions, dtype=float)
    dim = positions.shape[1]
    model.validate(dim)

    if anchors is not None:
        coords = np.vstack([anchors.positions, positions])
        n_anchor = anchors.count
    else:
        coords = positions
        n_anchor = 0
    n_total = coords.shape[0]

    i, j, dist = _candidate_pairs(coords, model.radio_range)
    if i.size:
        u = seed.pair_uniforms(i.astype(np.uint64) * np.uint64(n_total) + j.astype(np.uint64), _DETECT_TAG)
        keep = u <= detection_probability(dist, model)
        i, j, dist = i[keep], j[keep], dist[keep]

    weights = dist if mode == RANGE else np.ones(i.shape[0])
    return MeasurementGraph(
        n_unknown=n_total - n_anchor,
        n_anchor=n_anchor,
        mode=mode,
        model=model,
        edge_i=i.astype(np.int64),
        edge_j=j.astype(np.int64),
        weights=np.asarray(weights, dtype=float),
    )


def is_connected(graph: MeasurementGraph):
    """Whether the graph is one component; also returns component labels."""
    if graph.n_total == 0:
        return True, np.empty(0, dtype=np.int64)
    n_comp, labels = csgraph.connected_components(graph.adjacency(), directed=False)
    return n_comp == 1, labels


def save_edge_list(graph: MeasurementGraph, path):
    """Plain-text export: header ``n m mode R alpha beta``, then one
    ``i j measurement`` line per edge (shortest round-trip float format)."""
    with open(path, "w") as fh:
        m = graph.model
        fh.write(f"{graph.n_unknown} {graph.n_anchor} {graph.mode} "
                 f"{m.radio_range!r} {m.alpha!r} {m.beta!r}\n")
        for i, j, w in zip(graph.edge_i, graph.edge_j, graph.weights):
            fh.write(f"{i} {j} {float(w)!r}\n")


def load_edge_list(path) -> MeasurementGraph:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 6:
            raise ValueError("malformed edge-list header")
        n, m, mode = int(header[0]), int(header[1]), header[2]
        model = DetectionModel(float(header[3]), float(header[4]), float(header[5]))
        ii, jj, ww = [], [], []
        for line in fh:
            if not line.strip():
                continue
            a, b, w = line.split()
            ii.append(int(a))
            jj.append(int(b))
            ww.append(float(w))
    return MeasurementGraph(
        n_unknown=n,
        n_anchor=m,
        mode=mode,
        model=model,
        edge_i=np.asarray(ii, dtype=np.int64),
        edge_j=np.asarray(jj, dtype=np.int64),
        weights=np.asarray(ww, dtype=float),
    )
