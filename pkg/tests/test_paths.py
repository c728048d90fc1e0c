import numpy as np
import pytest

from oracles import adjacency_sets, bfs_levels, pairwise_distances
from sensorloc.geometry import Seed, place_uniform
from sensorloc.network import CONNECTIVITY, RANGE, DetectionModel, MeasurementGraph, build_graph
from sensorloc.paths import (
    UnreachablePairError,
    all_pairs_hops,
    all_pairs_weighted,
    anchor_hops,
    path_scatter_rows,
    squared_distance_matrix,
    write_path_scatter_csv,
)
from sensorloc.paths import _dense_hops  # cross-check of the two BFS backends


def graph_from_edges(n, edges, mode=CONNECTIVITY, radio=1.0, n_anchor=0, weights=None):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    w = np.ones(len(edges)) if weights is None else np.asarray(weights, dtype=float)
    return MeasurementGraph(
        n_unknown=n - n_anchor,
        n_anchor=n_anchor,
        mode=mode,
        model=DetectionModel(radio),
        edge_i=edges[:, 0],
        edge_j=edges[:, 1],
        weights=w,
    )


def test_path_graph_hops():
    g = graph_from_edges(3, [(0, 1), (1, 2)], radio=0.5)
    table = all_pairs_hops(g)
    assert table.hops[0, 2] == 2
    assert table.estimates[0, 2] == pytest.approx(1.0)  # 2 * R
    assert table.hops[0, 1] == 1
    assert np.all(np.diag(table.hops) == 0)
    assert table.reachable.all()


def test_disconnected_pairs_flagged():
    g = graph_from_edges(4, [(0, 1)], radio=0.5)
    table = all_pairs_hops(g)
    assert not table.reachable[0, 2]
    assert not table.reachable[2, 3]
    assert table.reachable[0, 1]


def test_hops_match_textbook_bfs():
    seed = Seed(31)
    coords = place_uniform(120, 2, seed)
    g = build_graph(coords, DetectionModel(0.16, 0.8, 0.0), CONNECTIVITY, seed)
    table = all_pairs_hops(g)
    adj = adjacency_sets(g.n_total, g.edge_i, g.edge_j)
    for source in (0, 17, 119):
        assert table.hops[source].tolist() == bfs_levels(g.n_total, adj, source)


def test_dense_and_sparse_backends_agree():
    seed = Seed(32)
    coords = place_uniform(150, 2, seed)
    g = build_graph(coords, DetectionModel(0.2), CONNECTIVITY, seed)
    from sensorloc import paths as paths_module

    adj = np.zeros((g.n_total, g.n_total), dtype=bool)
    adj[g.edge_i, g.edge_j] = True
    adj |= adj.T
    dense = _dense_hops(adj, None)
    sparse = paths_module._sparse_hops(g, None)
    assert np.array_equal(dense, sparse)


def test_weighted_triangle_hand_case():
    g = graph_from_edges(3, [(0, 1), (1, 2), (0, 2)], mode=RANGE, weights=[1.0, 1.0, 3.0])
    table = all_pairs_weighted(g)
    assert table.estimates[0, 2] == pytest.approx(2.0)
    assert table.estimates[0, 1] == pytest.approx(1.0)
    assert table.hops is None


def test_weighted_single_edge():
    g = graph_from_edges(2, [(0, 1)], mode=RANGE, weights=[0.37])
    assert all_pairs_weighted(g).estimates[0, 1] == pytest.approx(0.37)


def test_weighted_requires_range_mode():
    g = graph_from_edges(2, [(0, 1)])
    with pytest.raises(ValueError):
        all_pairs_weighted(g)


def test_path_estimates_dominate_chord():
    seed = Seed(33)
    coords = place_uniform(90, 2, seed)
    g = build_graph(coords, DetectionModel(0.25), RANGE, seed)
    table = all_pairs_weighted(g)
    dist = pairwise_distances(coords)
    ok = table.reachable
    assert np.all(table.estimates[ok] >= dist[ok] - 1e-12)
    # connectivity estimates (hops * R) dominate the chord as well
    gc = build_graph(coords, DetectionModel(0.25), CONNECTIVITY, seed)
    tc = all_pairs_hops(gc)
    assert np.all(tc.estimates[tc.reachable] >= dist[tc.reachable] - 1e-12)


def test_triangle_inequality_of_path_metric():
    seed = Seed(34)
    coords = place_uniform(40, 2, seed)
    g = build_graph(coords, DetectionModel(0.35), CONNECTIVITY, seed)
    table = all_pairs_hops(g)
    if not table.reachable.all():
        pytest.skip("disconnected draw")
    est = table.estimates
    n = est.shape[0]
    for k in range(0, n, 7):
        assert np.all(est <= est[:, [k]] + est[[k], :] + 1e-9)


def test_squared_matrix_trivial_and_oracle():
    g = graph_from_edges(3, [(0, 1), (1, 2)], radio=0.5)
    sq = squared_distance_matrix(all_pairs_hops(g))
    assert sq[0, 2] == pytest.approx(1.0)  # (2R)^2 with R=0.5
    assert np.all(np.diag(sq) == 0)

    rng = np.random.default_rng(0)
    est = rng.random((10, 10))
    est = (est + est.T) / 2
    np.fill_diagonal(est, 0.0)
    from sensorloc.paths import HopDistanceMatrix

    table = HopDistanceMatrix(estimates=est, hops=None, reachable=np.ones((10, 10), dtype=bool))
    brute = np.array([[est[i, j] ** 2 for j in range(10)] for i in range(10)])
    np.fill_diagonal(brute, 0.0)
    assert np.allclose(squared_distance_matrix(table), brute)


def test_squared_matrix_names_unreachable_pair():
    g = graph_from_edges(3, [(0, 1)], radio=0.5)
    with pytest.raises(UnreachablePairError) as err:
        squared_distance_matrix(all_pairs_hops(g))
    assert err.value.pair in {(0, 2), (2, 0), (1, 2), (2, 1)}


def test_anchor_table_matches_all_pairs_columns():
    seed = Seed(35)
    coords = place_uniform(50, 2, seed)
    from sensorloc.geometry import UNIT_SIMPLEX, make_anchors

    layout = make_anchors(UNIT_SIMPLEX, 2, 50, seed)
    for mode in (CONNECTIVITY, RANGE):
        g = build_graph(coords, DetectionModel(0.3), mode, seed, anchors=layout)
        table = anchor_hops(g)
        full = all_pairs_hops(g) if mode == CONNECTIVITY else all_pairs_weighted(g)
        assert np.allclose(table.estimates, full.estimates[:, :3])
        assert np.array_equal(table.reachable, full.reachable[:, :3])


def test_node_adjacent_to_anchor_estimates_radio_range():
    g = graph_from_edges(3, [(0, 2), (1, 2)], radio=0.4, n_anchor=2)
    table = anchor_hops(g)
    assert table.estimates[2, 0] == pytest.approx(0.4)
    assert table.estimates[2, 1] == pytest.approx(0.4)


def test_unreached_anchor_rows_flagged():
    # node 3 is isolated; node 2 reaches only anchor 0
    g = graph_from_edges(4, [(0, 2)], radio=0.4, n_anchor=2)
    table = anchor_hops(g)
    assert not table.reachable[3].any()
    assert table.reachable[2, 0] and not table.reachable[2, 1]


def test_scatter_rows_and_csv(tmp_path):
    seed = Seed(36)
    coords = place_uniform(30, 2, seed)
    g = build_graph(coords, DetectionModel(0.4), CONNECTIVITY, seed)
    table = all_pairs_hops(g)
    true_d, est = path_scatter_rows(table, coords)
    assert true_d.shape == est.shape
    assert np.all(est >= true_d - 1e-12)
    out = tmp_path / "scatter.csv"
    write_path_scatter_csv(out, true_d, est)
    lines = out.read_text().splitlines()
    assert lines[0] == "true_distance,estimate"
    assert len(lines) == 1 + len(true_d)
    first_true, first_est = lines[1].split(",")
    assert float(first_true) == true_d[0]
    assert float(first_est) == est[0]
