"""Exact nearest-neighbor search over 3D point sets.

Two interchangeable backends: a balanced kd-tree and a brute-force distance
matrix.  Both compute squared distances the same way (coordinate differences
squared and summed) and break exact distance ties by the lowest point index,
so their results are bit-identical.
"""

from __future__ import annotations

import numpy as np


def _points(arr, name="points") -> np.ndarray:
    pts = np.asarray(arr, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError(f"{name} must be Nx3, got shape {pts.shape}")
    if pts.shape[0] == 0:
        raise ValueError(f"{name} must be nonempty")
    return pts


def brute_force_nn(points: np.ndarray, queries: np.ndarray):
    """Nearest point index and squared distance per query, O(N*M)."""
    points = _points(points)
    queries = _points(queries, "queries")
    d2 = ((queries[:, None, :] - points[None, :, :]) ** 2).sum(axis=-1)
    idx = np.argmin(d2, axis=1)  # first occurrence wins ties = lowest index
    best = ((queries - points[idx]) ** 2).sum(axis=1)
    return best, idx


class KdTree:
    """Balanced kd-tree with exact queries and lowest-index tie-breaking.

    Nodes are stored in flat arrays; leaves keep the original point indices in
    ascending order so argmin inside a leaf already picks the lowest index.
    """

    def __init__(self, points: np.ndarray, leaf_size: int = 16):
        self.points = _points(points).copy()
        self.leaf_size = max(1, int(leaf_size))
        # node arrays, filled by _build
        self._axis: list[int] = []
        self._split: list[float] = []
        self._left: list[int] = []
        self._right: list[int] = []
        self._leaf_members: list[np.ndarray | None] = []
        self._build(np.arange(self.points.shape[0]))

    def _new_node(self) -> int:
        self._axis.append(-1)
        self._split.append(0.0)
        self._left.append(-1)
        self._right.append(-1)
        self._leaf_members.append(None)
        return len(self._axis) - 1

    def _build(self, member_idx: np.ndarray) -> int:
        node = self._new_node()
        if member_idx.size <= self.leaf_size:
            self._leaf_members[node] = np.sort(member_idx)
            return node
        coords = self.points[member_idx]
        axis = int(np.argmax(coords.max(axis=0) - coords.min(axis=0)))
        order = np.argsort(coords[:, axis], kind="stable")
        mid = member_idx.size // 2
        split_value = float(coords[order[mid], axis])
        self._axis[node] = axis
        self._split[node] = split_value
        left = self._build(member_idx[order[:mid]])
        right = self._build(member_idx[order[mid:]])
        self._left[node] = left
        self._right[node] = right
        return node

    def query(self, queries: np.ndarray):
        """(squared distance, index) of the nearest stored point per query."""
        queries = _points(queries, "queries")
        m = queries.shape[0]
        best_d2 = np.full(m, np.inf)
        best_idx = np.full(m, -1, dtype=np.int64)
        # work stack of (node, query positions); pruning re-checked on pop so
        # deferred far-side visits benefit from tighter bounds found later
        stack: list[tuple[int, np.ndarray, np.ndarray | None]] = [
            (0, np.arange(m), None)
        ]
        while stack:
            node, qpos, bound = stack.pop()
            if bound is not None:
                keep = bound <= best_d2[qpos]
                if not np.any(keep):
                    continue
                qpos = qpos[keep]
            members = self._leaf_members[node]
            if members is not None:
                d2 = ((queries[qpos, None, :] - self.points[None, members, :]) ** 2).sum(-1)
                local = np.argmin(d2, axis=1)
                cand_d2 = d2[np.arange(qpos.size), local]
                cand_idx = members[local]
                better = (cand_d2 < best_d2[qpos]) | (
                    (cand_d2 == best_d2[qpos]) & (cand_idx < best_idx[qpos])
                )
                upd = qpos[better]
                best_d2[upd] = cand_d2[better]
                best_idx[upd] = cand_idx[better]
                continue
            axis, split = self._axis[node], self._split[node]
            qc = queries[qpos, axis]
            near_left = qc < split
            gap2 = (qc - split) ** 2
            for child, is_near in (
                (self._left[node], near_left),
                (self._right[node], ~near_left),
            ):
                near_q = qpos[is_near]
                if near_q.size:
                    stack.append((child, near_q, None))
                far_q = qpos[~is_near]
                if far_q.size:
                    stack.append((child, far_q, gap2[~is_near]))
        return best_d2, best_idx


def nearest_neighbors(points: np.ndarray, queries: np.ndarray, method: str = "kdtree"):
    """Nearest-neighbor (squared distance, index) arrays via either backend."""
    if method == "brute":
        return brute_force_nn(points, queries)
    if method == "kdtree":
        return KdTree(points).query(queries)
    raise ValueError(f"unknown nearest-neighbor method {method!r}")
