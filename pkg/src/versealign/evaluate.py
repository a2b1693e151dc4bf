"""Classification experiments over corpora.

One evaluation run downsamples the corpus to a fixed number of poems
per class (class = the configured label tuple, by default language and
meter), then scores one method:

* the three alignment methods build a distance matrix and classify by
  leave-one-out k-nearest-neighbors over it;
* the n-gram method turns each poem into relative 9-gram frequencies
  over the 500 corpus-wide most frequent 9-grams, projects to 50
  dimensions by truncated SVD, z-scales, and trains a one-vs-rest
  linear SVM by deterministic subgradient descent on an 80/20 split.

Runs repeat ``runs`` times with child seeds spawned from the config
seed, so a report is a pure function of (corpus, config).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .corpus import CorpusRecord
from .distance import (
    DistanceMatrix,
    distance_matrix,
    naive_distance_matrix,
)
from .scoring import ScoreScheme, default_scheme, uniform_scheme

__all__ = [
    "DegenerateSplitError",
    "DimensionMismatchError",
    "DimsTooLargeError",
    "EvalConfig",
    "EvalReport",
    "InsufficientClassError",
    "Method",
    "TooShortError",
    "knn_loo",
    "ngram_features",
    "run_evaluation",
    "stratified_sample",
    "svd_project",
    "svm_train_eval",
    "zscale",
]


class InsufficientClassError(ValueError):
    """A class has fewer records than the requested sample size."""


class DimensionMismatchError(ValueError):
    """Rows, labels, or k do not line up."""


class TooShortError(ValueError):
    """A poem is shorter than the n-gram window."""


class DimsTooLargeError(ValueError):
    """More SVD dimensions requested than the matrix has."""


class DegenerateSplitError(ValueError):
    """The train/test split lost all but one class."""


class Method(Enum):
    METRONOME = "metronome"
    UNIFORM = "uniform"
    NAIVE = "naive"
    NGRAM_SVM = "ngram-svm"


@dataclass(frozen=True)
class EvalConfig:
    method: Method
    per_class: int = 10
    k: int = 7
    runs: int = 50
    seed: int = 0
    class_labels: tuple[str, ...] = ("language", "meter")

    def __post_init__(self) -> None:
        if self.per_class < 1:
            raise ValueError("per_class must be positive")
        if self.k < 1 or self.k % 2 == 0:
            raise ValueError("k must be odd and positive")
        if self.runs < 1:
            raise ValueError("runs must be positive")
        if not self.class_labels:
            raise ValueError("need at least one class label name")


def class_key(record: CorpusRecord, class_labels: Sequence[str]) -> str:
    """The classification target: configured label values joined by
    '/', empty values dropped."""
    parts = [record.labels.get(name, "") for name in class_labels]
    return "/".join(p for p in parts if p)


def stratified_sample(
    records: Sequence[CorpusRecord],
    per_class: int,
    rng: np.random.Generator,
    class_labels: Sequence[str] = ("language", "meter"),
) -> list[CorpusRecord]:
    """Exactly ``per_class`` records from every class, shuffled.

    Classes are visited in sorted key order and sampled without
    replacement, so the outcome depends only on the corpus content,
    ``per_class``, and the generator state.
    """
    groups: dict[str, list[CorpusRecord]] = {}
    for rec in records:
        groups.setdefault(class_key(rec, class_labels), []).append(rec)
    sampled: list[CorpusRecord] = []
    for key in sorted(groups):
        members = groups[key]
        if len(members) < per_class:
            raise InsufficientClassError(
                f"class {key!r} has {len(members)} records, need {per_class}"
            )
        idx = rng.choice(len(members), size=per_class, replace=False)
        sampled.extend(members[i] for i in idx)
    order = rng.permutation(len(sampled))
    return [sampled[i] for i in order]


def knn_loo(
    matrix: DistanceMatrix,
    labels: Sequence[str],
    k: int,
) -> tuple[float, list[str]]:
    """Leave-one-out k-nearest-neighbor accuracy over a distance matrix.

    The held-out sample itself is never a candidate neighbor.  Ties at
    the k-th radius fall to the smaller index; vote ties fall to the
    tied label with the smaller summed distance, then to the
    lexicographically smaller label.
    """
    n = len(matrix.ids)
    if len(labels) != n:
        raise DimensionMismatchError(f"{n} ids but {len(labels)} labels")
    if not 1 <= k <= n - 1:
        raise DimensionMismatchError(f"k = {k} outside [1, {n - 1}]")

    predictions: list[str] = []
    correct = 0
    for i in range(n):
        order = sorted((j for j in range(n) if j != i), key=lambda j: (matrix.values[i, j], j))
        neighbors = order[:k]
        votes = Counter(labels[j] for j in neighbors)
        top = max(votes.values())
        tied = [lab for lab, c in votes.items() if c == top]
        if len(tied) == 1:
            winner = tied[0]
        else:
            sums = {
                lab: sum(matrix.values[i, j] for j in neighbors if labels[j] == lab)
                for lab in tied
            }
            low = min(sums.values())
            winner = min(lab for lab, s in sums.items() if s == low)
        predictions.append(winner)
        if winner == labels[i]:
            correct += 1
    return correct / n, predictions


def ngram_features(
    records: Sequence[CorpusRecord],
    n: int = 9,
    top: int = 500,
) -> tuple[np.ndarray, tuple[str, ...]]:
    """Relative n-gram frequencies over the corpus-wide top vocabulary.

    Each row divides by the poem's total n-gram count, vocabulary hits
    and misses alike, so rows sum to at most 1 and the remainder is the
    out-of-vocabulary mass.  Vocabulary ranking breaks frequency ties
    lexicographically.
    """
    per_poem: list[Counter[str]] = []
    totals: list[int] = []
    corpus_counts: Counter[str] = Counter()
    for rec in records:
        text = str(rec.metronome)
        if len(text) < n:
            raise TooShortError(
                f"record {rec.id!r} has {len(text)} symbols, need at least {n}"
            )
        grams = Counter(text[i : i + n] for i in range(len(text) - n + 1))
        per_poem.append(grams)
        totals.append(sum(grams.values()))
        corpus_counts.update(grams)

    vocab = tuple(
        g for g, _ in sorted(corpus_counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top]
    )
    col = {g: i for i, g in enumerate(vocab)}
    x = np.zeros((len(records), len(vocab)), dtype=np.float64)
    for row, (grams, total) in enumerate(zip(per_poem, totals)):
        for g, c in grams.items():
            j = col.get(g)
            if j is not None:
                x[row, j] = c / total
    return x, vocab


def svd_project(x: np.ndarray, dims: int) -> np.ndarray:
    """Truncated SVD scores (U * s), signs fixed so each right singular
    vector's largest-magnitude component is positive."""
    if dims < 1:
        raise DimsTooLargeError("dims must be positive")
    if dims > min(x.shape):
        raise DimsTooLargeError(
            f"dims = {dims} exceeds min(matrix shape) = {min(x.shape)}"
        )
    u, s, vt = np.linalg.svd(x, full_matrices=False)
    for kcomp in range(vt.shape[0]):
        pivot = int(np.argmax(np.abs(vt[kcomp])))
        if vt[kcomp, pivot] < 0:
            vt[kcomp] = -vt[kcomp]
            u[:, kcomp] = -u[:, kcomp]
    return u[:, :dims] * s[:dims]


def zscale(x: np.ndarray) -> np.ndarray:
    """Columns to mean 0 and (population) sd 1; constant columns to 0."""
    mu = x.mean(axis=0)
    sd = x.std(axis=0)
    safe = np.where(sd == 0.0, 1.0, sd)
    out = (x - mu) / safe
    out[:, sd == 0.0] = 0.0
    return out


_SVM_EPOCHS = 30
_SVM_C = 1.0


def svm_train_eval(
    features: np.ndarray,
    labels: Sequence[str],
    rng: np.random.Generator,
    split: float = 0.8,
) -> tuple[float, list[str], list[str]]:
    """Train one-vs-rest linear SVMs and score the held-out split.

    Training is plain deterministic subgradient descent on the primal
    hinge objective (regularization weight 1/(C n), C = 1, learning
    rate 1/(lambda t), 30 epochs, per-epoch shuffles from ``rng``).  A
    constant column is appended as the bias.  Returns (accuracy, true
    test labels, predicted test labels).
    """
    m = len(labels)
    if features.shape[0] != m:
        raise DimensionMismatchError(f"{features.shape[0]} rows but {m} labels")
    if not 0.0 < split < 1.0:
        raise ValueError("split must be in (0, 1)")

    perm = rng.permutation(m)
    n_train = int(m * split)
    if n_train < 1 or n_train >= m:
        raise DegenerateSplitError(f"split {split} leaves no usable train/test data")
    train_idx, test_idx = perm[:n_train], perm[n_train:]

    y = np.asarray(labels, dtype=object)
    classes = sorted(set(y[train_idx]))
    if len(classes) < 2:
        raise DegenerateSplitError("train split holds fewer than 2 classes")

    x = np.hstack([features, np.ones((m, 1))])
    xtr = x[train_idx]
    lam = 1.0 / (_SVM_C * n_train)

    weights = np.zeros((len(classes), x.shape[1]))
    for c_i, c in enumerate(classes):
        sign = np.where(y[train_idx] == c, 1.0, -1.0)
        w = np.zeros(x.shape[1])
        t = 0
        for _ in range(_SVM_EPOCHS):
            for idx in rng.permutation(n_train):
                t += 1
                eta = 1.0 / (lam * t)
                xi, yi = xtr[idx], sign[idx]
                if yi * float(w @ xi) < 1.0:
                    w = (1.0 - eta * lam) * w + (eta * yi) * xi
                else:
                    w = (1.0 - eta * lam) * w
        weights[c_i] = w

    scores = x[test_idx] @ weights.T
    picks = np.argmax(scores, axis=1)  # first (lexicographically smallest) on ties
    y_pred = [classes[p] for p in picks]
    y_true = list(y[test_idx])
    acc = sum(p == t for p, t in zip(y_pred, y_true)) / len(y_true)
    return acc, y_true, y_pred


_NGRAM_N = 9
_NGRAM_TOP = 500
_SVD_DIMS = 50


@dataclass(frozen=True)
class EvalReport:
    method: str
    config: dict
    accuracies: tuple[float, ...]
    median: float
    confusion: dict[str, dict[str, int]]

    def to_json(self) -> str:
        return json.dumps(
            {
                "method": self.method,
                "config": self.config,
                "accuracies": list(self.accuracies),
                "median": self.median,
                "confusion": self.confusion,
            },
            sort_keys=True,
            indent=2,
        )


def _method_matrix(
    sample: Sequence[CorpusRecord],
    method: Method,
    scheme: ScoreScheme | None,
    threads: int,
) -> DistanceMatrix:
    if method is Method.METRONOME:
        return distance_matrix(sample, scheme or default_scheme(), threads)
    if method is Method.UNIFORM:
        return distance_matrix(sample, uniform_scheme(), threads)
    if method is Method.NAIVE:
        return naive_distance_matrix(sample, threads)
    raise ValueError(f"no distance matrix for method {method}")


def run_evaluation(
    records: Sequence[CorpusRecord],
    config: EvalConfig,
    scheme: ScoreScheme | None = None,
    threads: int = 1,
) -> EvalReport:
    """Repeated stratified evaluation runs; see the module docstring.

    The confusion table accumulates (true, predicted) counts over every
    sample each run evaluated: all samples for the kNN methods, test
    split only for the SVM.
    """
    children = np.random.SeedSequence(config.seed).spawn(config.runs)
    accuracies: list[float] = []
    confusion: dict[str, dict[str, int]] = {}

    for child in children:
        rng = np.random.default_rng(child)
        sample = stratified_sample(records, config.per_class, rng, config.class_labels)
        keys = [class_key(rec, config.class_labels) for rec in sample]

        if config.method is Method.NGRAM_SVM:
            x, _ = ngram_features(sample, _NGRAM_N, _NGRAM_TOP)
            dims = min(_SVD_DIMS, x.shape[0], x.shape[1])
            z = zscale(svd_project(x, dims))
            acc, y_true, y_pred = svm_train_eval(z, keys, rng)
        else:
            matrix = _method_matrix(sample, config.method, scheme, threads)
            acc, y_pred = knn_loo(matrix, keys, config.k)
            y_true = keys

        accuracies.append(acc)
        for t, p in zip(y_true, y_pred):
            confusion.setdefault(t, {})
            confusion[t][p] = confusion[t].get(p, 0) + 1

    cfg = asdict(config)
    cfg["method"] = config.method.value
    cfg["class_labels"] = list(config.class_labels)
    return EvalReport(
        method=config.method.value,
        config=cfg,
        accuracies=tuple(accuracies),
        median=float(np.median(accuracies)),
        confusion=confusion,
    )
