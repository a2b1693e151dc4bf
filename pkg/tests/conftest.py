"""Shared strategies and fixtures for the test suite."""

from __future__ import annotations

import hypothesis.strategies as st
import numpy as np
from hypothesis import settings

from versealign.alphabet import MetronomeString, parse
from versealign.corpus import CorpusRecord
from versealign.scoring import ScoreScheme

settings.register_profile("suite", deadline=None, derandomize=True)
settings.load_profile("suite")

# Which symbols may legally follow each symbol (None = start of string).
# Leading "|" is legal but rare in practice; the strategy starts with a
# syllable so every draw also satisfies the one-syllable minimum.
_AFTER = {
    None: "Sw",
    "S": "Sw.|",
    "w": "Sw.|",
    ".": "Sw",
    "|": "Sw|",
}


@st.composite
def metronome_texts(draw, min_len: int = 1, max_len: int = 8) -> str:
    """Canonical symbol text built by walking the adjacency rules."""
    n = draw(st.integers(min_len, max_len))
    out: list[str] = []
    while len(out) < n:
        choices = _AFTER[out[-1] if out else None]
        out.append(draw(st.sampled_from(choices)))
    return "".join(out)


def metronome_strings(min_len: int = 1, max_len: int = 8) -> st.SearchStrategy:
    return metronome_texts(min_len, max_len).map(parse)


@st.composite
def valid_schemes(draw) -> ScoreScheme:
    """Random scheme satisfying symmetry, positive dominant diagonals,
    and the gap ordering."""
    diag = [draw(st.integers(1, 6)) for _ in range(4)]
    sub = [[0] * 4 for _ in range(4)]
    for i in range(4):
        sub[i][i] = diag[i]
    for i in range(4):
        for j in range(i + 1, 4):
            v = draw(st.integers(-6, min(diag[i], diag[j])))
            sub[i][j] = sub[j][i] = v
    gap_open = draw(st.integers(-6, 0))
    gap_extend = draw(st.integers(gap_open, 0))
    return ScoreScheme(
        substitution=tuple(tuple(row) for row in sub),
        gap_open=gap_open,
        gap_extend=gap_extend,
    )


def make_records(
    texts: list[str],
    ids: list[str] | None = None,
    labels: list[dict[str, str]] | None = None,
) -> list[CorpusRecord]:
    """Corpus records from raw symbol texts, with generated ids."""
    if ids is None:
        ids = [f"p{i}" for i in range(len(texts))]
    if labels is None:
        labels = [{"meter": "none"} for _ in texts]
    return [
        CorpusRecord(id=i, labels=lab, metronome=parse(t))
        for i, lab, t in zip(ids, labels, texts)
    ]


def random_records(
    rng: np.random.Generator,
    count: int,
    max_len: int = 40,
    label: str = "none",
) -> list[CorpusRecord]:
    """Random canonical poems as records, for matrix-level tests."""
    from oracles import random_metronome_text

    return [
        CorpusRecord(
            id=f"r{i}",
            labels={"meter": label},
            metronome=parse(random_metronome_text(rng, max_len)),
        )
        for i in range(count)
    ]
