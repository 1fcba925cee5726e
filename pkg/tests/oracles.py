"""Independent brute-force oracles shared by the test modules.

None of these import the union-find or tower code they are compared with.
"""

from collections import deque
from itertools import combinations

import numpy as np


def bfs_components(points, dist, K):
    """Canonical partition {point: smallest member} of the K-chain graph, by BFS."""
    points = list(points)
    adj = {p: [] for p in points}
    for p, q in combinations(points, 2):
        if dist(p, q) <= K:
            adj[p].append(q)
            adj[q].append(p)
    label = {}
    for p in points:
        if p in label:
            continue
        comp = [p]
        seen = {p}
        queue = deque([p])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
                    queue.append(y)
        rep = min(comp)
        for x in comp:
            label[x] = rep
    return label


def grid_components(coords: np.ndarray, K: int, norm: str = "l1"):
    """BFS over integer points using a numpy distance matrix (for lattice subsets)."""
    diff = np.abs(coords[:, None, :] - coords[None, :, :])
    d = diff.sum(axis=2) if norm == "l1" else diff.max(axis=2)
    adj = d <= K
    n = len(coords)
    label = -np.ones(n, dtype=np.int64)
    for s in range(n):
        if label[s] >= 0:
            continue
        frontier = np.zeros(n, dtype=bool)
        frontier[s] = True
        comp = frontier.copy()
        while frontier.any():
            frontier = adj[frontier].any(axis=0) & ~comp
            comp |= frontier
        label[comp] = s
    pts = [tuple(int(v) for v in row) for row in coords]
    out = {}
    for idx in set(label.tolist()):
        members = [pts[i] for i in np.flatnonzero(label == idx)]
        rep = min(members)
        for p in members:
            out[p] = rep
    return out


def annulus_oracle(space, K, r, R):
    """Classes of {x : r <= d(ξ, x) <= R} by BFS."""
    pts = [p for p in space.enumerate(R) if space.radius(p) >= r]
    return bfs_components(pts, space.dist, K)


def count_classes(label: dict) -> int:
    return len(set(label.values()))


def neighbor_components(points, neighbors):
    """Canonical partition by BFS along an explicit neighbour function."""
    members = set(points)
    label = {}
    for p in sorted(members):
        if p in label:
            continue
        comp = [p]
        label[p] = p
        queue = deque([p])
        while queue:
            x = queue.popleft()
            for y in neighbors(x):
                if y in members and y not in label:
                    label[y] = p
                    comp.append(y)
                    queue.append(y)
        rep = min(comp)
        for x in comp:
            label[x] = rep
    return label


def count_distinct_subsequences(strings: np.ndarray) -> np.ndarray:
    """Number of distinct subsequences (including the empty one) of each
    row of ``strings`` (equal-length rows over letters 0..3), by listing all
    ``2^n`` index subsets."""
    rows, n = strings.shape
    masks = np.arange(1 << n)
    bits = (masks[:, None] >> np.arange(n)[None, :]) & 1
    # a subset's code: chosen letters (shifted to 1..4) as base-5 digits,
    # the last chosen letter least significant
    after = np.cumsum(bits[:, ::-1], axis=1)[:, ::-1] - bits
    weight = bits * 5 ** after
    out = np.empty(rows, dtype=np.int64)
    for lo in range(0, rows, 1024):
        codes = (strings[lo:lo + 1024] + 1) @ weight.T
        codes.sort(axis=1)
        out[lo:lo + 1024] = 1 + (np.diff(codes, axis=1) != 0).sum(axis=1)
    return out
