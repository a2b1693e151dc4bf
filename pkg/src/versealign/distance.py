"""Normalized alignment distances and all-pairs matrices.

Similarity divides the local alignment score by the self-score of the
shorter string (fewer symbols; ties broken by smaller self-score, then
by lexicographic order of the rendered text).  Diagonal dominance and
positive diagonals in the scheme guarantee the ratio lands in [0, 1]
without clamping, so ``distance = 1 - similarity`` is also in [0, 1].
The result is symmetric and zero on identical strings but makes no
triangle-inequality promise.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .align import local_score, naive_local
from .alphabet import MetronomeString
from .corpus import CorpusRecord
from .scoring import ScoreScheme, default_scheme

__all__ = [
    "DistanceMatrix",
    "DuplicateIdError",
    "EmptyCorpusError",
    "MatrixFormatError",
    "distance_matrix",
    "naive_distance_matrix",
    "naive_pair_distance",
    "pair_distance",
    "pair_similarity",
    "self_score",
]


class DuplicateIdError(ValueError):
    """Two corpus records share an id."""


class EmptyCorpusError(ValueError):
    """Fewer than two records; no pairs to compare."""


class MatrixFormatError(ValueError):
    """A distance matrix file is malformed or inconsistent."""


def self_score(s: MetronomeString, scheme: ScoreScheme) -> int:
    """Score of aligning ``s`` perfectly against itself."""
    m = scheme.matrix
    return int(m[s.codes, s.codes].sum())


def _normalizer(a: MetronomeString, b: MetronomeString, scheme: ScoreScheme) -> int:
    """Self-score of the designated shorter string."""
    if len(a) != len(b):
        shorter = a if len(a) < len(b) else b
        return self_score(shorter, scheme)
    sa, sb = self_score(a, scheme), self_score(b, scheme)
    if sa != sb:
        return min(sa, sb)
    return sa if str(a) <= str(b) else sb


def pair_similarity(a: MetronomeString, b: MetronomeString, scheme: ScoreScheme) -> float:
    return local_score(a, b, scheme) / _normalizer(a, b, scheme)


def pair_distance(a: MetronomeString, b: MetronomeString, scheme: ScoreScheme) -> float:
    return 1.0 - pair_similarity(a, b, scheme)


def naive_pair_distance(a: MetronomeString, b: MetronomeString) -> float:
    """No-indel baseline distance: best window score over the length of
    the shorter string (every window column is worth at most +1)."""
    return 1.0 - naive_local(a, b) / min(len(a), len(b))


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric all-pairs distances aligned with an id list."""

    ids: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.ids)
        if self.values.shape != (n, n):
            raise ValueError(
                f"matrix shape {self.values.shape} does not fit {n} ids"
            )

    def __len__(self) -> int:
        return len(self.ids)

    def index(self, id_: str) -> int:
        try:
            return self.ids.index(id_)
        except ValueError:
            raise KeyError(id_) from None

    def value(self, id_a: str, id_b: str) -> float:
        return float(self.values[self.index(id_a), self.index(id_b)])

    def save_tsv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("id\t" + "\t".join(self.ids) + "\n")
            for i, id_ in enumerate(self.ids):
                row = "\t".join(format(v, ".9g") for v in self.values[i])
                fh.write(f"{id_}\t{row}\n")

    @classmethod
    def load_tsv(cls, path: str) -> "DistanceMatrix":
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        if not lines:
            raise MatrixFormatError(f"{path}: empty file")
        header = lines[0].split("\t")
        if header[:1] != ["id"]:
            raise MatrixFormatError(f"{path}: header must start with 'id'")
        ids = tuple(header[1:])
        n = len(ids)
        if len(set(ids)) != n:
            raise MatrixFormatError(f"{path}: duplicate ids in header")
        if len(lines) - 1 != n:
            raise MatrixFormatError(
                f"{path}: expected {n} rows, found {len(lines) - 1}"
            )
        values = np.zeros((n, n), dtype=np.float64)
        for i, line in enumerate(lines[1:]):
            parts = line.split("\t")
            if len(parts) != n + 1:
                raise MatrixFormatError(f"{path}: row {i + 2} has {len(parts) - 1} values")
            if parts[0] != ids[i]:
                raise MatrixFormatError(
                    f"{path}: row {i + 2} id {parts[0]!r} does not match header {ids[i]!r}"
                )
            try:
                values[i] = [float(p) for p in parts[1:]]
            except ValueError as exc:
                raise MatrixFormatError(f"{path}: row {i + 2}: {exc}") from exc
        if np.any(np.diagonal(values) != 0.0):
            raise MatrixFormatError(f"{path}: nonzero diagonal")
        if np.max(np.abs(values - values.T), initial=0.0) > 1e-9:
            raise MatrixFormatError(f"{path}: matrix is not symmetric within 1e-9")
        return cls(ids=ids, values=values)


def _check_records(records: Sequence[CorpusRecord]) -> None:
    if len(records) < 2:
        raise EmptyCorpusError(f"need at least 2 records, got {len(records)}")
    seen: set[str] = set()
    for rec in records:
        if rec.id in seen:
            raise DuplicateIdError(f"duplicate record id {rec.id!r}")
        seen.add(rec.id)


def _all_pairs(
    records: Sequence[CorpusRecord],
    cell: Callable[[MetronomeString, MetronomeString], float],
    threads: int,
) -> DistanceMatrix:
    """Fill the upper triangle in parallel and mirror it.

    Every cell is a pure function of its two strings, so the result is
    identical for any worker count; workers write disjoint cells.
    """
    _check_records(records)
    n = len(records)
    strings = [rec.metronome for rec in records]
    values = np.zeros((n, n), dtype=np.float64)

    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    cell(strings[pairs[0][0]], strings[pairs[0][1]])  # warm the jit once

    workers = threads if threads > 0 else (os.cpu_count() or 1)
    workers = max(1, min(workers, len(pairs)))

    def fill(block: list[tuple[int, int]]) -> None:
        for i, j in block:
            d = cell(strings[i], strings[j])
            values[i, j] = d
            values[j, i] = d

    if workers == 1:
        fill(pairs)
    else:
        step = (len(pairs) + workers - 1) // workers
        blocks = [pairs[k : k + step] for k in range(0, len(pairs), step)]
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(fill, blocks))

    return DistanceMatrix(ids=tuple(r.id for r in records), values=values)


def distance_matrix(
    records: Sequence[CorpusRecord],
    scheme: ScoreScheme | None = None,
    threads: int = 1,
) -> DistanceMatrix:
    """All-pairs alignment distances.  ``threads <= 0`` means one
    worker per available cpu."""
    scheme = scheme or default_scheme()
    return _all_pairs(records, lambda a, b: pair_distance(a, b, scheme), threads)


def naive_distance_matrix(
    records: Sequence[CorpusRecord],
    threads: int = 1,
) -> DistanceMatrix:
    """All-pairs no-indel baseline distances."""
    return _all_pairs(records, naive_pair_distance, threads)
