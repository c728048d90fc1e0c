"""Distributed hop-count localization: beacon flooding plus lateration.

Anchors flood the network with (position, hop count) records; every node
keeps the best record per anchor and re-broadcasts improvements.  The
flood is simulated in synchronous rounds, so its fixed point equals the
BFS distance to each anchor and the round/message counts are exact.
Each node with enough anchor estimates then solves one linearized
least-squares system for its own position.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .geometry import AnchorLayout
from .network import CONNECTIVITY, RANGE, MeasurementGraph
from .paths import anchor_hops


class SingularGeometryError(RuntimeError):
    """Anchor geometry leaves the normal equations ill-conditioned."""


class NodeStatus(IntEnum):
    LOCALIZED = 0
    INSUFFICIENT_ANCHORS = 1
    UNREACHABLE = 2

    @property
    def label(self) -> str:
        return self.name.lower()


@dataclass
class FloodResult:
    """Fixed point of the anchor flood plus protocol accounting.

    ``values[i, k]`` is the hop count (or cumulative path length in range
    mode) from node i to the k-th anchor; unreached entries are inf.  One
    broadcast transmits a single improved record to all neighbours.
    """

    values: np.ndarray
    kind: str  # "hops" or "distance"
    round_count: int
    message_count: int
    round_log: list

    def table(self, node: int, anchor_positions: np.ndarray | None = None) -> dict:
        """Per-node record table: anchor id -> value (or (position, value))."""
        row = self.values[node]
        out = {}
        for k, v in enumerate(row):
            if np.isfinite(v):
                out[k] = (anchor_positions[k], v) if anchor_positions is not None else v
        return out


def _csr_parts(graph: MeasurementGraph):
    adj = graph.adjacency()
    return adj.indptr, adj.indices, adj.data


def _gather_neighbors(indptr, indices, frontier):
    """Concatenated neighbour lists of the frontier nodes (with repeats)."""
    starts = indptr[frontier]
    counts = indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=indices.dtype), np.empty(0, dtype=np.int64)
    base = np.cumsum(counts) - counts
    within = np.arange(total) - np.repeat(base, counts)
    flat = np.repeat(starts, counts) + within
    return indices[flat], flat


def _merge_round_updates(per_anchor: list[list[int]], n_anchor: int):
    """Combine per-anchor improvement counts into global round accounting."""
    depth = max((len(u) for u in per_anchor), default=0)
    updates = [0] * (depth + 1)
    updates[0] = n_anchor  # anchors self-initiate their own record
    for series in per_anchor:
        for r, c in enumerate(series, start=1):
            updates[r] += c
    # Round r broadcasts every record improved in round r-1; the final
    # quiescent round carries broadcasts but produces no updates.
    log = []
    messages = 0
    for r in range(1, depth + 2):
        sent = updates[r - 1]
        got = updates[r] if r < len(updates) else 0
        log.append({"round": r, "updates": got, "messages": sent})
        messages += sent
    round_count = depth + 1 if n_anchor else 0
    return round_count, messages, log if n_anchor else []


def dv_hop_flood(graph: MeasurementGraph, log=None) -> FloodResult:
    """Synchronous hop-count flood from every anchor.

    Final hop counts equal BFS distances; nodes never reached by an
    anchor's flood simply lack that record (inf).
    """
    n, m = graph.n_total, graph.n_anchor
    values = np.full((n, m), np.inf)
    indptr, indices, _ = _csr_parts(graph) if graph.edge_count else (None, None, None)
    per_anchor = []
    for col, a in enumerate(graph.anchor_ids):
        values[a, col] = 0.0
        series = []
        if indptr is None:
            per_anchor.append(series)
            continue
        seen = np.zeros(n, dtype=bool)
        seen[a] = True
        reached = 1
        frontier = np.array([a], dtype=np.int64)
        level = 0
        while frontier.size and reached < n:
            nbrs, _ = _gather_neighbors(indptr, indices, frontier)
            nbrs = np.unique(nbrs)
            new = nbrs[~seen[nbrs]]
            if new.size == 0:
                break
            level += 1
            seen[new] = True
            reached += new.size
            values[new, col] = level
            series.append(int(new.size))
            frontier = new
        per_anchor.append(series)
    rounds, messages, round_log = _merge_round_updates(per_anchor, m)
    _write_round_log(log, round_log)
    return FloodResult(values, "hops", rounds, messages, round_log)


def distance_flood(graph: MeasurementGraph, log=None) -> FloodResult:
    """Synchronous cumulative-distance flood (range mode).

    Same protocol with measured edge lengths accumulated instead of hop
    counts; the fixed point equals the weighted shortest paths.  A node's
    record for an anchor may improve several times, and each improvement
    counts as one broadcast.
    """
    if graph.mode != RANGE:
        raise ValueError("distance flood needs range-based measurements")
    n, m = graph.n_total, graph.n_anchor
    values = np.full((n, m), np.inf)
    indptr, indices, data = _csr_parts(graph) if graph.edge_count else (None, None, None)
    per_anchor = []
    for col, a in enumerate(graph.anchor_ids):
        values[a, col] = 0.0
        series = []
        if indptr is None:
            per_anchor.append(series)
            continue
        dist = values[:, col]
        frontier = np.array([a], dtype=np.int64)
        while frontier.size:
            nbrs, flat = _gather_neighbors(indptr, indices, frontier)
            counts = indptr[frontier + 1] - indptr[frontier]
            cand = np.repeat(dist[frontier], counts) + data[flat]
            best = np.full(n, np.inf)
            np.minimum.at(best, nbrs, cand)
            improved = best < dist
            if not improved.any():
                break
            dist[improved] = best[improved]
            series.append(int(improved.sum()))
            frontier = np.flatnonzero(improved)
        per_anchor.append(series)
    rounds, messages, round_log = _merge_round_updates(per_anchor, m)
    _write_round_log(log, round_log)
    return FloodResult(values, "distance", rounds, messages, round_log)


def _write_round_log(log, round_log):
    if log is None:
        return
    if isinstance(log, (str, bytes)) or hasattr(log, "__fspath__"):
        with open(log, "w") as fh:
            for rec in round_log:
                fh.write(json.dumps(rec) + "\n")
    else:
        for rec in round_log:
            log.write(json.dumps(rec) + "\n")


@dataclass
class LaterationSystem:
    """Linearized anchor system shared by every unknown node.

    Row k of ``matrix`` is 2*(x_k - x_{k+1}) over consecutive anchors;
    the right-hand side for a node plugs in its squared distance
    estimates to the same anchors, in the same order.
    """

    matrix: np.ndarray
    anchor_positions: np.ndarray

    def rhs(self, estimates: np.ndarray) -> np.ndarray:
        est = np.asarray(estimates, dtype=float)
        sq_norm = np.sum(self.anchor_positions**2, axis=1)
        sq_est = est**2
        return (sq_norm[:-1] - sq_norm[1:]) + (sq_est[..., 1:] - sq_est[..., :-1])


def build_lateration(anchor_positions: np.ndarray | AnchorLayout) -> LaterationSystem:
    """Consecutive-difference linearization of the circle equations."""
    if isinstance(anchor_positions, AnchorLayout):
        anchor_positions = anchor_positions.positions
    pos = np.asarray(anchor_positions, dtype=float)
    dim = pos.shape[1]
    if pos.shape[0] < dim + 1:
        raise ValueError(f"need at least {dim + 1} anchors, got {pos.shape[0]}")
    return LaterationSystem(matrix=2.0 * (pos[:-1] - pos[1:]), anchor_positions=pos)


def solve_least_squares(matrix: np.ndarray, rhs: np.ndarray, cond_limit: float = 1e8) -> np.ndarray:
    """Normal-equations solve: (A^T A)^{-1} A^T b, with a condition guard.

    ``rhs`` may be a single vector or a batch with the system dimension
    last; the solution has the same leading shape.
    """
    a = np.asarray(matrix, dtype=float)
    gram = a.T @ a
    eigs = np.linalg.eigvalsh(gram)
    if eigs[0] <= 0 or eigs[-1] / eigs[0] > cond_limit:
        raise SingularGeometryError(
            f"anchor geometry is singular or ill-conditioned (cond~{eigs[-1] / max(eigs[0], 1e-300):.2e})"
        )
    proj = np.linalg.inv(gram) @ a.T
    return np.asarray(rhs, dtype=float) @ proj.T


@dataclass
class LocalizationResult:
    """Estimated positions for the unknown nodes plus per-node status.

    Row i corresponds to graph node ``n_anchor + i``.  Non-localized rows
    are NaN and carry no numeric claim.
    """

    estimates: np.ndarray
    status: np.ndarray
    round_count: int
    message_count: int

    @property
    def localized(self) -> np.ndarray:
        return self.status == NodeStatus.LOCALIZED

    @property
    def localized_fraction(self) -> float:
        return float(self.localized.mean()) if self.status.size else 0.0


def average_hop_distance(flood: FloodResult, anchor_positions: np.ndarray) -> float:
    """Mean true anchor-anchor distance per hop, over reachable anchor pairs."""
    m = anchor_positions.shape[0]
    ratios = []
    for a in range(m):
        for b in range(a + 1, m):
            hops = flood.values[b, a]  # anchors occupy graph ids 0..m-1
            if np.isfinite(hops) and hops > 0:
                ratios.append(float(np.linalg.norm(anchor_positions[a] - anchor_positions[b])) / hops)
    if not ratios:
        raise ValueError("no anchor pair is mutually reachable; average hop distance undefined")
    return float(np.mean(ratios))


def hop_terrain(
    graph: MeasurementGraph,
    anchors: np.ndarray | AnchorLayout,
    use_average_hop_distance: bool = False,
    log=None,
) -> LocalizationResult:
    """Flood, convert records to distance estimates, laterate per node.

    Connectivity mode estimates distances as hop count times R (or times
    the anchor-derived average hop distance when requested); range mode
    floods cumulative measured distances.  Nodes reached by fewer than
    d+1 anchors are reported, not silently dropped.
    """
    if isinstance(anchors, AnchorLayout):
        anchors = anchors.positions
    anchors = np.asarray(anchors, dtype=float)
    m, dim = anchors.shape
    if m != graph.n_anchor:
        raise ValueError("anchor position count does not match the graph")

    if graph.mode == CONNECTIVITY:
        flood = dv_hop_flood(graph, log=log)
        scale = average_hop_distance(flood, anchors) if use_average_hop_distance else graph.model.radio_range
        estimates_to_anchors = flood.values * scale
    else:
        if use_average_hop_distance:
            raise ValueError("average hop distance applies to connectivity mode only")
        flood = distance_flood(graph, log=log)
        estimates_to_anchors = flood.values

    n = graph.n_unknown
    node_est = estimates_to_anchors[m:, :]
    known = np.isfinite(node_est)
    known_count = known.sum(axis=1)

    status = np.full(n, NodeStatus.INSUFFICIENT_ANCHORS, dtype=np.int8)
    status[known_count == 0] = NodeStatus.UNREACHABLE
    solvable = known_count >= dim + 1
    coords = np.full((n, dim), np.nan)

    if solvable.any():
        rows = np.flatnonzero(solvable)
        patterns, inverse = np.unique(known[rows], axis=0, return_inverse=True)
        for p_idx in range(patterns.shape[0]):
            ids = np.flatnonzero(patterns[p_idx])
            members = rows[inverse == p_idx]
            system = build_lateration(anchors[ids])
            b = system.rhs(node_est[np.ix_(members, ids)])
            coords[members] = solve_least_squares(system.matrix, b)
        status[rows] = NodeStatus.LOCALIZED
    return LocalizationResult(coords, status, flood.round_count, flood.message_count)


def export_localization_csv(result: LocalizationResult, path, true_positions: np.ndarray | None = None):
    """CSV dump: node_id,status,x,y[,z],error (error blank without truth)."""
    dim = result.estimates.shape[1]
    axes = ["x", "y", "z"][:dim]
    with open(path, "w") as fh:
        fh.write("node_id,status," + ",".join(axes) + ",error\n")
        for i in range(result.estimates.shape[0]):
            st = NodeStatus(result.status[i]).label
            if result.status[i] == NodeStatus.LOCALIZED:
                coords = ",".join(repr(float(v)) for v in result.estimates[i])
                err = (
                    repr(float(np.linalg.norm(true_positions[i] - result.estimates[i])))
                    if true_positions is not None
                    else ""
                )
            else:
                coords = "," * (dim - 1)
                err = ""
            fh.write(f"{i},{st},{coords},{err}\n")
