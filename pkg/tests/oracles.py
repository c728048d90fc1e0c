"""Independent reference implementations used to cross-check the library.

Everything here is deliberately brute force and kept free of the code
paths it validates.
"""

import numpy as np


def pairwise_distances(coords):
    diff = coords[:, None, :] - coords[None, :, :]
    return np.sqrt(np.sum(diff**2, axis=2))


def squared_distances(coords):
    diff = coords[:, None, :] - coords[None, :, :]
    return np.sum(diff**2, axis=2)


def gram_distance(x, y):
    """Direct-formula configuration distance: (1/n)||LXX'L - LYY'L||_F."""
    n = x.shape[0]
    centering = np.eye(n) - np.ones((n, n)) / n
    gx = centering @ x @ x.T @ centering
    gy = centering @ y @ y.T @ centering
    return np.linalg.norm(gx - gy, "fro") / n


def bfs_levels(n, adjacency, source):
    """Textbook BFS over an adjacency-set list; -1 where unreachable."""
    levels = [-1] * n
    levels[source] = 0
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adjacency[u]:
                if levels[v] < 0:
                    levels[v] = levels[u] + 1
                    nxt.append(v)
        frontier = nxt
    return levels


def adjacency_sets(n, edge_i, edge_j):
    adj = [set() for _ in range(n)]
    for a, b in zip(edge_i, edge_j):
        adj[a].add(int(b))
        adj[b].add(int(a))
    return adj


def power_iteration_eigenvalues(a, max_iter=100_000, tol=1e-12):
    """All eigenvalues of a symmetric matrix by power iteration with
    deflation; descending order."""
    work = np.array(a, dtype=float)
    n = work.shape[0]
    rng = np.random.default_rng(12345)
    scale = max(1.0, float(np.abs(work).max()))
    found = []
    for _ in range(n):
        lam, vec = None, None
        for _attempt in range(3):
            v = rng.standard_normal(n)
            v /= np.linalg.norm(v)
            lam_prev = np.inf
            for _it in range(max_iter):
                w = work @ v
                norm_w = np.linalg.norm(w)
                if norm_w < 1e-200:
                    lam, vec = 0.0, v
                    break
                v = w / norm_w
                lam_it = float(v @ work @ v)
                if abs(lam_it - lam_prev) <= tol * max(1.0, abs(lam_it)):
                    if np.linalg.norm(work @ v - lam_it * v) <= 1e-9 * scale:
                        lam, vec = lam_it, v
                        break
                lam_prev = lam_it
            if lam is not None:
                break
        if lam is None:
            lam, vec = float(v @ work @ v), v
        found.append(lam)
        work = work - lam * np.outer(vec, vec)
    return np.sort(np.array(found))[::-1]


def random_rigid_motion(rng, dim):
    """Random orthogonal matrix (possibly a reflection) and shift."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    q = q * np.sign(np.diag(r))
    if rng.random() < 0.5:
        q[:, 0] = -q[:, 0]
    return q, rng.standard_normal(dim)
