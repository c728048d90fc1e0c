"""Shortest-path distance estimation over measurement graphs.

Connectivity mode estimates a pair's distance as (hop count) * R; range
mode uses the weighted shortest path over the measured edge lengths.
Unreachable pairs are flagged explicitly instead of carrying sentinel
values downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csgraph

from .network import CONNECTIVITY, RANGE, MeasurementGraph

# Fraction of possible edges above which per-source BFS is replaced by
# level-wise boolean-matrix expansion (BLAS-backed, much faster on the
# near-complete graphs that large radio ranges produce).
_DENSE_EDGE_FRACTION = 0.02


class UnreachablePairError(RuntimeError):
    """A required pair has no connecting path."""

    def __init__(self, i: int, j: int):
        super().__init__(f"no path between nodes {i} and {j}")
        self.pair = (i, j)


@dataclass
class HopDistanceMatrix:
    """Symmetric all-pairs estimates with reachability mask.

    ``hops`` is the integer hop-count matrix (connectivity mode) or None
    (range mode, where estimates come from weighted paths).  Unreachable
    entries of ``estimates`` are 0 and masked out by ``reachable``.
    """

    estimates: np.ndarray
    hops: np.ndarray | None
    reachable: np.ndarray


@dataclass
class AnchorDistanceTable:
    """Per-node shortest-path estimates restricted to anchor columns."""

    anchor_ids: np.ndarray
    estimates: np.ndarray  # (n_total, m)
    hops: np.ndarray | None
    reachable: np.ndarray


def _dense_hops(adj_bool: np.ndarray, sources: np.ndarray | None) -> np.ndarray:
    """Hop counts by repeated frontier expansion; -1 where unreachable."""
    n = adj_bool.shape[0]
    adj_f = adj_bool.astype(np.float32)
    if sources is None:
        frontier = adj_bool.copy()
        reached = adj_bool | np.eye(n, dtype=bool)
        hops = np.where(adj_bool, 1, -1).astype(np.int32)
        np.fill_diagonal(hops, 0)
    else:
        frontier = adj_bool[sources].copy()
        reached = frontier.copy()
        reached[np.arange(len(sources)), sources] = True
        hops = np.where(frontier, 1, -1).astype(np.int32)
        hops[np.arange(len(sources)), sources] = 0
    level = 1
    while frontier.any() and not reached.all():
        level += 1
        grown = frontier.astype(np.float32) @ adj_f > 0
        new = grown & ~reached
        if not new.any():
            break
        hops[new] = level
        reached |= new
        frontier = new
    return hops


def _sparse_hops(graph: MeasurementGraph, sources: np.ndarray | None) -> np.ndarray:
    dist = csgraph.dijkstra(graph.adjacency(), directed=False, unweighted=True,
                            indices=sources)
    hops = np.where(np.isinf(dist), -1, dist).astype(np.int32)
    return hops


def _hop_counts(graph: MeasurementGraph, sources: np.ndarray | None = None) -> np.ndarray:
    n = graph.n_total
    if n > 1 and graph.edge_count / (n * (n - 1) / 2) >= _DENSE_EDGE_FRACTION:
        adj = np.zeros((n, n), dtype=bool)
        adj[graph.edge_i, graph.edge_j] = True
        adj |= adj.T
        return _dense_hops(adj, sources)
    return _sparse_hops(graph, sources)


def all_pairs_hops(graph: MeasurementGraph) -> HopDistanceMatrix:
    """BFS hop counts for every pair; estimates are hops * R."""
    hops = _hop_counts(graph)
    reachable = hops >= 0
    estimates = np.where(reachable, hops, 0).astype(float) * graph.model.radio_range
    return HopDistanceMatrix(estimates=estimates, hops=hops, reachable=reachable)


def all_pairs_weighted(graph: MeasurementGraph) -> HopDistanceMatrix:
    """Weighted shortest paths over the measured edge lengths (range mode)."""
    if graph.mode != RANGE:
        raise ValueError("weighted shortest paths need range-based measurements")
    dist = csgraph.dijkstra(graph.adjacency(), directed=False)
    reachable = np.isfinite(dist)
    return HopDistanceMatrix(
        estimates=np.where(reachable, dist, 0.0),
        hops=None,
        reachable=reachable,
    )


def all_pairs_estimates(graph: MeasurementGraph) -> HopDistanceMatrix:
    """Mode-appropriate all-pairs distance estimates."""
    if graph.mode == CONNECTIVITY:
        return all_pairs_hops(graph)
    return all_pairs_weighted(graph)


def anchor_hops(graph: MeasurementGraph, anchor_ids: np.ndarray | None = None) -> AnchorDistanceTable:
    """Shortest-path estimates from every node to each anchor.

    Matches the corresponding columns of the all-pairs result: BFS hop
    counts times R in connectivity mode, Dijkstra path lengths in range
    mode.
    """
    ids = graph.anchor_ids if anchor_ids is None else np.asarray(anchor_ids)
    if ids.size == 0:
        n = graph.n_total
        empty = np.zeros((n, 0))
        return AnchorDistanceTable(ids, empty, empty.astype(np.int32), empty.astype(bool))
    if graph.mode == CONNECTIVITY:
        hops = _hop_counts(graph, sources=ids).T
        reachable = hops >= 0
        est = np.where(reachable, hops, 0).astype(float) * graph.model.radio_range
        return AnchorDistanceTable(ids, est, hops, reachable)
    dist = csgraph.dijkstra(graph.adjacency(), directed=False, indices=ids).T
    reachable = np.isfinite(dist)
    return AnchorDistanceTable(ids, np.where(reachable, dist, 0.0), None, reachable)


def squared_distance_matrix(table: HopDistanceMatrix) -> np.ndarray:
    """Elementwise square of the estimates; demands full reachability."""
    if not table.reachable.all():
        bad = np.argwhere(~table.reachable)
        i, j = bad[0]
        raise UnreachablePairError(int(i), int(j))
    sq = table.estimates ** 2
    np.fill_diagonal(sq, 0.0)
    return sq


def path_scatter_rows(table: HopDistanceMatrix, coords: np.ndarray):
    """(true distance, estimate) pairs over reachable i<j pairs."""
    n = coords.shape[0]
    i, j = np.triu_indices(n, k=1)
    ok = table.reachable[i, j]
    i, j = i[ok], j[ok]
    true = np.linalg.norm(coords[i] - coords[j], axis=1)
    return true, table.estimates[i, j]


def write_path_scatter_csv(path, true_distances: np.ndarray, estimates: np.ndarray):
    with open(path, "w") as fh:
        fh.write("true_distance,estimate\n")
        for t, e in zip(true_distances, estimates):
            fh.write(f"{float(t)!r},{float(e)!r}\n")
