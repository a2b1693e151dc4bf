"""Synthetic verse corpora drawn from fixed metrical forms.

Every built-in form is a 12-syllable line template: a per-syllable
stress constraint (fixed strong, fixed weak, or a fair coin flip),
a set of forced word breaks, and free zones that are filled with words
drawn i.i.d. from a word-length distribution, the last word truncated
at the zone end.  Poems draw their line count from Poisson(lambda)
with zero redrawn, and end with a trailing line end.

Randomness comes exclusively from a ``numpy.random.Generator`` seeded
by the caller (PCG64 under ``default_rng``), with a fixed draw order:
line count, then per line the free stresses left to right, then word
lengths zone by zone.  Poisson sampling is inversion by sequential
search on a single uniform draw, so a fixed seed reproduces a corpus
byte for byte on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .alphabet import Line, MetronomeString, parse
from .cluster import adjusted_rand_index, agglomerate, cut, partition_from_labels
from .corpus import CorpusRecord
from .distance import distance_matrix
from .scoring import ScoreScheme

__all__ = [
    "DEFAULT_LAMBDA",
    "DEFAULT_WORD_LENGTHS",
    "FORM_NAMES",
    "BenchResult",
    "FormSpec",
    "UnknownFormError",
    "WordLengthDist",
    "ari_benchmark",
    "builtin_form",
    "generate_corpus",
    "generate_line",
    "generate_poem",
]

DEFAULT_LAMBDA = 14.0


class UnknownFormError(ValueError):
    """No built-in form by that name."""


@dataclass(frozen=True)
class WordLengthDist:
    """Probabilities of drawing a 1-, 2-, 3-, or 4-syllable word."""

    probabilities: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        if len(self.probabilities) != 4:
            raise ValueError("need probabilities for word lengths 1..4")
        if any(p < 0 for p in self.probabilities):
            raise ValueError("probabilities may not be negative")
        if abs(sum(self.probabilities) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {sum(self.probabilities)!r}, not 1")

    def sample(self, rng: np.random.Generator) -> int:
        u = float(rng.random())
        acc = 0.0
        for length, p in enumerate(self.probabilities, start=1):
            acc += p
            if u < acc:
                return length
        return 4  # float residue lands on the last bucket


#: Word-length weights 1 : 3 : 1 : 0.25 for lengths 1..4.
DEFAULT_WORD_LENGTHS = WordLengthDist(
    probabilities=(4 / 21, 12 / 21, 4 / 21, 1 / 21)
)


@dataclass(frozen=True)
class FormSpec:
    """One metrical form.

    ``stress_template`` holds, per syllable, ``"S"``, ``"w"``, or
    ``None`` for a free (coin-flip) position.  ``forced_breaks`` are
    1-based syllable positions after which a word break always appears.
    ``free_zones`` are inclusive 1-based spans filled with random
    words; zones never straddle a forced break.
    """

    name: str
    syllables: int
    stress_template: tuple[str | None, ...]
    forced_breaks: frozenset[int]
    free_zones: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.syllables < 1:
            raise ValueError("a form needs at least one syllable")
        if len(self.stress_template) != self.syllables:
            raise ValueError("stress template length must match syllable count")
        if any(t not in ("S", "w", None) for t in self.stress_template):
            raise ValueError("stress template entries must be 'S', 'w', or None")
        for p in self.forced_breaks:
            if not 1 <= p < self.syllables:
                raise ValueError(f"forced break after syllable {p} is outside the line")
        prev_end = 0
        for start, end in self.free_zones:
            if not 1 <= start <= end <= self.syllables:
                raise ValueError(f"zone ({start}, {end}) is outside the line")
            if start <= prev_end:
                raise ValueError("zones overlap or are out of order")
            prev_end = end
            for p in self.forced_breaks:
                if start <= p < end:
                    raise ValueError(
                        f"zone ({start}, {end}) straddles forced break at {p}"
                    )


_IAMBIC = tuple("wS" * 6)
_FREE: tuple[str | None, ...] = (None,) * 12


def _template(fixed: dict[int, str]) -> tuple[str | None, ...]:
    return tuple(fixed.get(i, None) for i in range(1, 13))


_BUILTIN_FORMS: dict[str, FormSpec] = {
    "alex": FormSpec(
        name="alex",
        syllables=12,
        stress_template=_IAMBIC,
        forced_breaks=frozenset({6}),
        free_zones=((1, 6), (7, 12)),
    ),
    "iamb6": FormSpec(
        name="iamb6",
        syllables=12,
        stress_template=_IAMBIC,
        forced_breaks=frozenset(),
        free_zones=((1, 12),),
    ),
    "alexFrench": FormSpec(
        name="alexFrench",
        syllables=12,
        stress_template=_template({6: "S", 12: "S"}),
        forced_breaks=frozenset({6}),
        free_zones=((1, 6), (7, 12)),
    ),
    "alexRomantic": FormSpec(
        name="alexRomantic",
        syllables=12,
        stress_template=_template({4: "S", 8: "S", 12: "S"}),
        forced_breaks=frozenset({4, 8}),
        free_zones=((1, 4), (5, 8), (9, 12)),
    ),
    "syl12": FormSpec(
        name="syl12",
        syllables=12,
        stress_template=_FREE,
        forced_breaks=frozenset(),
        free_zones=((1, 12),),
    ),
}

#: Built-in form names in their fixed emission order.
FORM_NAMES: tuple[str, ...] = tuple(_BUILTIN_FORMS)


def builtin_form(name: str) -> FormSpec:
    try:
        return _BUILTIN_FORMS[name]
    except KeyError:
        raise UnknownFormError(
            f"unknown form {name!r}, expected one of {', '.join(FORM_NAMES)}"
        ) from None


def generate_line(
    form: FormSpec,
    rng: np.random.Generator,
    dist: WordLengthDist = DEFAULT_WORD_LENGTHS,
) -> Line:
    """One line of the form, without its line end."""
    stresses: list[str] = []
    for t in form.stress_template:
        if t is None:
            stresses.append("wS"[int(rng.integers(0, 2))])
        else:
            stresses.append(t)

    breaks = set(form.forced_breaks)
    for start, end in form.free_zones:
        width = end - start + 1
        acc = 0
        while True:
            acc += dist.sample(rng)
            if acc >= width:
                break
            breaks.add(start - 1 + acc)

    parts: list[str] = []
    for pos in range(1, form.syllables + 1):
        parts.append(stresses[pos - 1])
        if pos in breaks and pos < form.syllables:
            parts.append(".")
    return Line("".join(parts))


def _poisson(rng: np.random.Generator, lam: float) -> int:
    """Poisson draw by inversion with sequential search."""
    u = float(rng.random())
    k = 0
    p = math.exp(-lam)
    acc = p
    while u > acc:
        k += 1
        p *= lam / k
        acc += p
        if p == 0.0:  # float tail exhausted; u was astronomically close to 1
            break
    return k


def generate_poem(
    form: FormSpec,
    rng: np.random.Generator,
    lam: float = DEFAULT_LAMBDA,
    dist: WordLengthDist = DEFAULT_WORD_LENGTHS,
) -> MetronomeString:
    """A poem of Poisson(lam) lines (zero redrawn), trailing line end
    included."""
    n_lines = _poisson(rng, lam)
    while n_lines == 0:
        n_lines = _poisson(rng, lam)
    text = "".join(str(generate_line(form, rng, dist)) + "|" for _ in range(n_lines))
    return parse(text)


def generate_corpus(
    forms: Sequence[FormSpec],
    per_form: int,
    rng: np.random.Generator,
    lam: float = DEFAULT_LAMBDA,
    dist: WordLengthDist = DEFAULT_WORD_LENGTHS,
) -> list[CorpusRecord]:
    """``per_form`` poems per form, ids ``{form}_{index}``, labeled
    with their meter.  Draws come from the single stream in form order."""
    records: list[CorpusRecord] = []
    for form in forms:
        for i in range(per_form):
            poem = generate_poem(form, rng, lam, dist)
            records.append(
                CorpusRecord(
                    id=f"{form.name}_{i}",
                    labels={"meter": form.name},
                    metronome=poem,
                )
            )
    return records


@dataclass(frozen=True)
class BenchResult:
    aris: tuple[float, ...]
    median: float


def ari_benchmark(
    forms: Sequence[FormSpec],
    per_form: int,
    runs: int,
    rng: np.random.Generator,
    scheme: ScoreScheme | None = None,
    linkage: str = "average",
    threads: int = 1,
    lam: float = DEFAULT_LAMBDA,
) -> BenchResult:
    """Generate, cluster, score: how well does average-linkage
    clustering of alignment distances recover the true forms?

    Each run gets an independent child generator spawned from ``rng``,
    builds a fresh corpus, cuts the tree at the number of forms, and
    records the adjusted Rand index against the true labels.
    """
    if runs < 1:
        raise ValueError("runs must be positive")
    aris: list[float] = []
    for child in rng.spawn(runs):
        records = generate_corpus(forms, per_form, child, lam)
        matrix = distance_matrix(records, scheme, threads)
        dendro = agglomerate(matrix, linkage)
        found = cut(dendro, len(forms))
        truth = partition_from_labels(
            [r.id for r in records], [r.labels["meter"] for r in records]
        )
        aris.append(adjusted_rand_index(found, truth))
    return BenchResult(aris=tuple(aris), median=float(np.median(aris)))
