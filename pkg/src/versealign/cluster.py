"""Agglomerative clustering over precomputed distances.

Merging follows the Lance-Williams updates for average (default),
complete, and single linkage.  Equal-height candidate pairs are broken
by the lexicographically smallest pair of cluster representatives
(each cluster is represented by its smallest member id), which makes
the tree independent of input order up to leaf relabeling.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import comb
from typing import Sequence

from .distance import DistanceMatrix

__all__ = [
    "Dendrogram",
    "IdMismatchError",
    "KOutOfRangeError",
    "Merge",
    "Partition",
    "adjusted_rand_index",
    "agglomerate",
    "cut",
    "load_partition",
    "partition_from_labels",
    "save_partition",
    "to_newick",
]

LINKAGES = ("average", "complete", "single")


class KOutOfRangeError(ValueError):
    """Requested cluster count does not fit the tree."""


class IdMismatchError(ValueError):
    """Two partitions cover different id sets."""


@dataclass(frozen=True)
class Merge:
    """One agglomeration step; ``node`` is the new cluster's id.

    Leaves are nodes ``0..n-1`` in id-list order; merge ``k`` creates
    node ``n + k``.  ``left``/``right`` are ordered by representative.
    """

    left: int
    right: int
    height: float
    node: int


@dataclass(frozen=True)
class Dendrogram:
    ids: tuple[str, ...]
    merges: tuple[Merge, ...]

    def __post_init__(self) -> None:
        if len(self.merges) != max(len(self.ids) - 1, 0):
            raise ValueError("a tree over n leaves needs exactly n-1 merges")


@dataclass(frozen=True)
class Partition:
    """Cluster index per id; indices are contiguous from 0."""

    ids: tuple[str, ...]
    assignments: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.ids) != len(self.assignments):
            raise ValueError("one assignment per id required")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate ids in partition")
        seen = set(self.assignments)
        if seen != set(range(len(seen))):
            raise ValueError("cluster indices must be contiguous from 0")

    @property
    def n_clusters(self) -> int:
        return len(set(self.assignments))


def agglomerate(matrix: DistanceMatrix, linkage: str = "average") -> Dendrogram:
    if linkage not in LINKAGES:
        raise ValueError(f"unknown linkage {linkage!r}, expected one of {LINKAGES}")
    n = len(matrix.ids)
    if n < 2:
        raise ValueError("need at least 2 ids to cluster")

    # Pairwise dissimilarity between active clusters, keyed by node pair.
    dist: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            dist[(i, j)] = float(matrix.values[i, j])
    size = {i: 1 for i in range(n)}
    rep = {i: matrix.ids[i] for i in range(n)}
    active = set(range(n))

    merges: list[Merge] = []
    for step in range(n - 1):
        best_key: tuple[int, int] | None = None
        best_rank: tuple[float, str, str] | None = None
        for (x, y), d in dist.items():
            rx, ry = rep[x], rep[y]
            pair = (rx, ry) if rx <= ry else (ry, rx)
            rank = (d, pair[0], pair[1])
            if best_rank is None or rank < best_rank:
                best_rank, best_key = rank, (x, y)
        assert best_key is not None and best_rank is not None
        x, y = best_key
        h = best_rank[0]
        if merges and h < merges[-1].height:
            raise AssertionError("merge heights decreased; linkage not monotone")

        new = n + step
        left, right = (x, y) if rep[x] <= rep[y] else (y, x)
        merges.append(Merge(left=left, right=right, height=h, node=new))

        sx, sy = size[x], size[y]
        active.discard(x)
        active.discard(y)
        for k in active:
            dx = dist.pop((min(x, k), max(x, k)))
            dy = dist.pop((min(y, k), max(y, k)))
            if linkage == "average":
                d_new = (sx * dx + sy * dy) / (sx + sy)
            elif linkage == "complete":
                d_new = max(dx, dy)
            else:
                d_new = min(dx, dy)
            dist[(k, new)] = d_new
        del dist[(min(x, y), max(x, y))]
        size[new] = sx + sy
        rep[new] = min(rep[x], rep[y])
        active.add(new)

    return Dendrogram(ids=matrix.ids, merges=tuple(merges))


_SANITIZE = re.compile(r"[^A-Za-z0-9_-]")


def to_newick(dendro: Dendrogram) -> str:
    """Serialize as Newick with midpoint branch lengths.

    A node that merged at height ``h`` sits at elevation ``h / 2``;
    each branch length is the elevation difference to the parent, so a
    two-leaf tree merged at 0.5 renders as ``(a:0.25,b:0.25);``.
    """
    n = len(dendro.ids)
    elevation = {i: 0.0 for i in range(n)}
    children: dict[int, tuple[int, int]] = {}
    for m in dendro.merges:
        elevation[m.node] = m.height / 2.0
        children[m.node] = (m.left, m.right)
    root = dendro.merges[-1].node if dendro.merges else 0

    def emit(node: int, parent_elev: float) -> str:
        length = format(parent_elev - elevation[node], ".9g")
        if node < n:
            name = _SANITIZE.sub("_", dendro.ids[node])
            return f"{name}:{length}"
        left, right = children[node]
        inner = f"({emit(left, elevation[node])},{emit(right, elevation[node])})"
        return f"{inner}:{length}"

    if not dendro.merges:
        name = _SANITIZE.sub("_", dendro.ids[0])
        return f"{name};"
    left, right = children[root]
    body = f"({emit(left, elevation[root])},{emit(right, elevation[root])})"
    return f"{body};"


def cut(dendro: Dendrogram, k: int) -> Partition:
    """Partition into ``k`` clusters by undoing the k-1 highest merges.

    Cluster indices are assigned in order of each cluster's smallest
    contained id.
    """
    n = len(dendro.ids)
    if not 1 <= k <= n:
        raise KOutOfRangeError(f"k = {k} outside [1, {n}]")

    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    node_root: dict[int, int] = {i: i for i in range(n)}
    for m in dendro.merges[: n - k]:
        ra, rb = find(node_root[m.left]), find(node_root[m.right])
        parent[rb] = ra
        node_root[m.node] = ra

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    ordered = sorted(groups.values(), key=lambda g: min(dendro.ids[i] for i in g))
    assignment = [0] * n
    for idx, members in enumerate(ordered):
        for i in members:
            assignment[i] = idx
    return Partition(ids=dendro.ids, assignments=tuple(assignment))


def partition_from_labels(ids: Sequence[str], labels: Sequence[str]) -> Partition:
    """Group equal labels; cluster indices by smallest contained id."""
    if len(ids) != len(labels):
        raise ValueError("one label per id required")
    members: dict[str, list[int]] = {}
    for i, lab in enumerate(labels):
        members.setdefault(lab, []).append(i)
    ordered = sorted(members.values(), key=lambda g: min(ids[i] for i in g))
    assignment = [0] * len(ids)
    for idx, group in enumerate(ordered):
        for i in group:
            assignment[i] = idx
    return Partition(ids=tuple(ids), assignments=tuple(assignment))


def _relabel_map(a: Partition, b: Partition) -> bool:
    """True when the two partitions induce the same grouping."""
    fwd: dict[int, int] = {}
    bwd: dict[int, int] = {}
    order = {id_: i for i, id_ in enumerate(b.ids)}
    for i, id_ in enumerate(a.ids):
        ca, cb = a.assignments[i], b.assignments[order[id_]]
        if fwd.setdefault(ca, cb) != cb or bwd.setdefault(cb, ca) != ca:
            return False
    return True


def adjusted_rand_index(a: Partition, b: Partition) -> float:
    """Chance-corrected pair-counting agreement between two partitions.

    1 means identical groupings, 0 is the chance level, and negative
    values mean worse than chance.  When the correction denominator is
    exactly zero (both all singletons, or both one cluster) the value
    is 1 for identical groupings and 0 otherwise.
    """
    if set(a.ids) != set(b.ids):
        raise IdMismatchError("partitions cover different ids")
    order = {id_: i for i, id_ in enumerate(b.ids)}
    n = len(a.ids)

    contingency: dict[tuple[int, int], int] = {}
    for i, id_ in enumerate(a.ids):
        key = (a.assignments[i], b.assignments[order[id_]])
        contingency[key] = contingency.get(key, 0) + 1

    sum_ij = sum(comb(c, 2) for c in contingency.values())
    rows: dict[int, int] = {}
    cols: dict[int, int] = {}
    for (ra, cb), c in contingency.items():
        rows[ra] = rows.get(ra, 0) + c
        cols[cb] = cols.get(cb, 0) + c
    sum_a = sum(comb(c, 2) for c in rows.values())
    sum_b = sum(comb(c, 2) for c in cols.values())
    pairs = comb(n, 2)

    expected = sum_a * sum_b / pairs if pairs else 0.0
    denom = (sum_a + sum_b) / 2.0 - expected
    if denom == 0.0:
        return 1.0 if _relabel_map(a, b) else 0.0
    return (sum_ij - expected) / denom


def save_partition(partition: Partition, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for id_, c in zip(partition.ids, partition.assignments):
            fh.write(f"{id_}\t{c}\n")


def load_partition(path: str) -> Partition:
    """Read a two-column id/cluster file.  Cluster tokens are arbitrary
    strings; indices are renumbered by smallest contained id."""
    ids: list[str] = []
    labels: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'id<TAB>cluster'")
            ids.append(parts[0])
            labels.append(parts[1])
    if not ids:
        raise ValueError(f"{path}: empty partition file")
    return partition_from_labels(ids, labels)
