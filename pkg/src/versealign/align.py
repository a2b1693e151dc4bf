"""Local sequence alignment over prosodic symbols.

Three entry points, all returning plain integer scores floored at 0:

* :func:`local_score` - Smith-Waterman with affine gaps (the default
  aligner), or with gaps structurally forbidden via ``allow_gaps=False``
  (the insert/delete transitions simply do not exist in that variant;
  there is no sentinel penalty involved).
* :func:`uniform_local` - the same aligner under the flat +1/-1 scheme.
* :func:`naive_local` - best no-indel window: the two strings slide
  against each other and the best contiguous stretch of +1 per equal
  symbol / -1 per unequal symbol wins.

:func:`local_align` additionally recovers one optimal alignment with a
deterministic tie-break: the end cell is the first best-scoring cell in
row-major order, and during traceback a diagonal step is preferred over
consuming ``a`` (up) which is preferred over consuming ``b`` (left).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .alphabet import MetronomeString
from .scoring import ScoreScheme, uniform_scheme

__all__ = [
    "AlignmentResult",
    "local_align",
    "local_score",
    "naive_local",
    "score_from_columns",
    "uniform_local",
]

_NEG = np.int64(-(1 << 60))


@njit(cache=True, nogil=True)
def _affine_best(a, b, sub, gap_open, gap_extend):  # pragma: no cover - jit
    n = b.shape[0]
    h_up = np.zeros(n + 1, np.int64)
    f_up = np.full(n + 1, _NEG, np.int64)
    best = np.int64(0)
    for i in range(1, a.shape[0] + 1):
        h_cur = np.zeros(n + 1, np.int64)
        e = _NEG
        ca = a[i - 1]
        for j in range(1, n + 1):
            e_open = h_cur[j - 1] + gap_open
            e_ext = e + gap_extend
            e = e_open if e_open >= e_ext else e_ext
            f_open = h_up[j] + gap_open
            f_ext = f_up[j] + gap_extend
            f = f_open if f_open >= f_ext else f_ext
            f_up[j] = f
            v = h_up[j - 1] + sub[ca, b[j - 1]]
            if e > v:
                v = e
            if f > v:
                v = f
            if v < 0:
                v = 0
            h_cur[j] = v
            if v > best:
                best = v
        h_up = h_cur
    return best


@njit(cache=True, nogil=True)
def _nogap_best(a, b, sub):  # pragma: no cover - jit
    n = b.shape[0]
    h_up = np.zeros(n + 1, np.int64)
    best = np.int64(0)
    for i in range(1, a.shape[0] + 1):
        h_cur = np.zeros(n + 1, np.int64)
        ca = a[i - 1]
        for j in range(1, n + 1):
            v = h_up[j - 1] + sub[ca, b[j - 1]]
            if v < 0:
                v = 0
            h_cur[j] = v
            if v > best:
                best = v
        h_up = h_cur
    return best


@njit(cache=True, nogil=True)
def _naive_best(a, b):  # pragma: no cover - jit
    m = a.shape[0]
    n = b.shape[0]
    best = np.int64(0)
    for off in range(-(m - 1), n):
        run = np.int64(0)
        lo = -off if off < 0 else 0
        hi = n - off if n - off < m else m
        for i in range(lo, hi):
            step = 1 if a[i] == b[i + off] else -1
            run += step
            if run < 0:
                run = 0
            if run > best:
                best = run
    return best


def local_score(
    a: MetronomeString,
    b: MetronomeString,
    scheme: ScoreScheme,
    *,
    allow_gaps: bool = True,
) -> int:
    """Best local alignment score of ``a`` against ``b``."""
    if allow_gaps:
        return int(
            _affine_best(
                a.codes,
                b.codes,
                scheme.matrix,
                np.int64(scheme.gap_open),
                np.int64(scheme.gap_extend),
            )
        )
    return int(_nogap_best(a.codes, b.codes, scheme.matrix))


def uniform_local(a: MetronomeString, b: MetronomeString) -> int:
    """Local alignment score under the flat +1/-1 scheme."""
    return local_score(a, b, uniform_scheme())


def naive_local(a: MetronomeString, b: MetronomeString) -> int:
    """Best no-indel window score, floored at 0."""
    return int(_naive_best(a.codes, b.codes))


@dataclass(frozen=True)
class AlignmentResult:
    """Score plus the half-open spans the winning alignment covers.

    ``aligned_columns`` pairs symbol indices of ``a`` and ``b``; a
    ``None`` half marks a gap in that sequence.  A zero score means the
    empty alignment: both spans are ``(0, 0)`` and there are no columns.
    """

    score: int
    span_a: tuple[int, int]
    span_b: tuple[int, int]
    aligned_columns: tuple[tuple[int | None, int | None], ...] | None = None


def score_from_columns(
    columns: tuple[tuple[int | None, int | None], ...],
    a: MetronomeString,
    b: MetronomeString,
    scheme: ScoreScheme,
) -> int:
    """Recompute an alignment score from its columns.

    Gap runs are charged open once and extend per further symbol; a gap
    run on the other side immediately after counts as a new run.
    """
    total = 0
    gap_side: str | None = None
    for ia, ib in columns:
        if ia is not None and ib is not None:
            total += scheme.cell(str(a)[ia], str(b)[ib])
            gap_side = None
        else:
            side = "b" if ib is None else "a"
            total += scheme.gap_extend if side == gap_side else scheme.gap_open
            gap_side = side
    return total


def _dp_matrices(a: np.ndarray, b: np.ndarray, scheme: ScoreScheme, allow_gaps: bool):
    m, n = a.shape[0], b.shape[0]
    sub = scheme.matrix
    go, ge = scheme.gap_open, scheme.gap_extend
    h = np.zeros((m + 1, n + 1), dtype=np.int64)
    e = np.full((m + 1, n + 1), _NEG, dtype=np.int64)
    f = np.full((m + 1, n + 1), _NEG, dtype=np.int64)
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if allow_gaps:
                e[i, j] = max(h[i, j - 1] + go, e[i, j - 1] + ge)
                f[i, j] = max(h[i - 1, j] + go, f[i - 1, j] + ge)
            v = h[i - 1, j - 1] + sub[a[i - 1], b[j - 1]]
            v = max(v, e[i, j], f[i, j], 0)
            h[i, j] = v
    return h, e, f


def local_align(
    a: MetronomeString,
    b: MetronomeString,
    scheme: ScoreScheme,
    *,
    allow_gaps: bool = True,
) -> AlignmentResult:
    """Align locally and recover one optimal alignment.

    This path keeps full dynamic-programming matrices; use
    :func:`local_score` when only the number is needed.
    """
    ca, cb = a.codes, b.codes
    h, e, f = _dp_matrices(ca, cb, scheme, allow_gaps)

    # First best cell in row-major order.
    best = 0
    bi = bj = 0
    m, n = ca.shape[0], cb.shape[0]
    for i in range(m + 1):
        for j in range(n + 1):
            if h[i, j] > best:
                best, bi, bj = int(h[i, j]), i, j

    if best == 0:
        return AlignmentResult(0, (0, 0), (0, 0), ())

    sub = scheme.matrix
    go, ge = scheme.gap_open, scheme.gap_extend
    cols: list[tuple[int | None, int | None]] = []
    i, j = bi, bj
    while h[i, j] != 0:
        v = h[i, j]
        if v == h[i - 1, j - 1] + sub[ca[i - 1], cb[j - 1]]:
            cols.append((i - 1, j - 1))
            i -= 1
            j -= 1
            continue
        if v == f[i, j]:
            # Gap in b: walk up, preferring to close the run.
            while True:
                cols.append((i - 1, None))
                closes = f[i, j] == h[i - 1, j] + go
                i -= 1
                if closes:
                    break
            continue
        if v == e[i, j]:
            while True:
                cols.append((None, j - 1))
                closes = e[i, j] == h[i, j - 1] + go
                j -= 1
                if closes:
                    break
            continue
        raise AssertionError("traceback lost")  # unreachable

    cols.reverse()
    a_idx = [c[0] for c in cols if c[0] is not None]
    b_idx = [c[1] for c in cols if c[1] is not None]
    span_a = (a_idx[0], a_idx[-1] + 1) if a_idx else (0, 0)
    span_b = (b_idx[0], b_idx[-1] + 1) if b_idx else (0, 0)
    return AlignmentResult(best, span_a, span_b, tuple(cols))
