"""Integer substitution schemes with affine gap penalties.

A :class:`ScoreScheme` holds a symmetric 4x4 substitution matrix over
the prosodic alphabet plus gap open/extend penalties.  Diagonal
dominance (no row scores higher off the diagonal than on it) together
with positive diagonals is what lets a local alignment score be
normalized into [0, 1] downstream, so both are hard invariants here.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

import numpy as np

from .alphabet import ALPHABET, Symbol

__all__ = [
    "InvariantError",
    "SchemaError",
    "SchemeError",
    "SchemeKind",
    "ScoreScheme",
    "builtin_scheme",
    "default_scheme",
    "load_scheme",
    "loads_scheme",
    "save_scheme",
    "saves_scheme",
    "uniform_scheme",
]

_N = len(ALPHABET)


class SchemeError(ValueError):
    """Base class for scheme construction and serialization problems."""


class SchemaError(SchemeError):
    """Config text does not match the scheme file layout."""


class InvariantError(SchemeError):
    """Numbers parse but violate a scheme invariant."""

    def __init__(self, message: str, cell: str | None = None) -> None:
        super().__init__(message)
        self.cell = cell


class SchemeKind(Enum):
    """The three built-in scoring setups."""

    METRONOME = "metronome"
    UNIFORM = "uniform"
    NAIVE_NO_INDEL = "naive"


def _cell_name(i: int, j: int) -> str:
    return f"{ALPHABET[i]}.{ALPHABET[j]}"


@dataclass(frozen=True)
class ScoreScheme:
    """Substitution matrix (indexed in ``ALPHABET`` order) plus gaps."""

    substitution: tuple[tuple[int, ...], ...]
    gap_open: int
    gap_extend: int

    def __post_init__(self) -> None:
        sub = self.substitution
        if len(sub) != _N or any(len(row) != _N for row in sub):
            raise InvariantError(f"substitution must be {_N}x{_N}")
        for i in range(_N):
            for j in range(_N):
                v = sub[i][j]
                if not isinstance(v, int) or isinstance(v, bool):
                    raise InvariantError(
                        f"substitution {_cell_name(i, j)} = {v!r} is not an integer",
                        cell=_cell_name(i, j),
                    )
        for i in range(_N):
            for j in range(i + 1, _N):
                if sub[i][j] != sub[j][i]:
                    raise InvariantError(
                        f"substitution is not symmetric at {_cell_name(i, j)}: "
                        f"{sub[i][j]} vs {sub[j][i]}",
                        cell=_cell_name(i, j),
                    )
        for i in range(_N):
            if sub[i][i] <= 0:
                raise InvariantError(
                    f"diagonal {_cell_name(i, i)} = {sub[i][i]} must be positive",
                    cell=_cell_name(i, i),
                )
            for j in range(_N):
                if sub[i][j] > sub[i][i]:
                    raise InvariantError(
                        f"substitution {_cell_name(i, j)} = {sub[i][j]} exceeds "
                        f"diagonal {_cell_name(i, i)} = {sub[i][i]} (dominance)",
                        cell=_cell_name(i, j),
                    )
        for name, v in (("open", self.gap_open), ("extend", self.gap_extend)):
            if not isinstance(v, int) or isinstance(v, bool):
                raise InvariantError(f"gap {name} = {v!r} is not an integer")
            if v > 0:
                raise InvariantError(f"gap {name} = {v} must be <= 0")
        if self.gap_extend < self.gap_open:
            raise InvariantError(
                f"gap extend = {self.gap_extend} may not cost more than "
                f"gap open = {self.gap_open}"
            )

    @cached_property
    def matrix(self) -> np.ndarray:
        """Substitution as a read-only ``int64`` array."""
        arr = np.array(self.substitution, dtype=np.int64)
        arr.flags.writeable = False
        return arr

    def sub(self, a: Symbol, b: Symbol) -> int:
        return self.substitution[ALPHABET.index(a.value)][ALPHABET.index(b.value)]

    def cell(self, x: str, y: str) -> int:
        """Substitution score for two symbol characters."""
        return self.substitution[ALPHABET.index(x)][ALPHABET.index(y)]


@lru_cache(maxsize=None)
def default_scheme() -> ScoreScheme:
    """The weighted scheme: line ends anchor hardest, matching breaks
    are worth a little, and a break against a syllable is free."""
    #            S   w   .   |
    sub = (
        (3, -2, 0, -6),  # S
        (-2, 3, 0, -6),  # w
        (0, 0, 2, -6),   # .
        (-6, -6, -6, 6), # |
    )
    return ScoreScheme(substitution=sub, gap_open=-5, gap_extend=-1)


@lru_cache(maxsize=None)
def uniform_scheme() -> ScoreScheme:
    """Flat baseline: +1 match, -1 mismatch, -1 per gap symbol."""
    sub = tuple(
        tuple(1 if i == j else -1 for j in range(_N)) for i in range(_N)
    )
    return ScoreScheme(substitution=sub, gap_open=-1, gap_extend=-1)


def builtin_scheme(kind: SchemeKind) -> ScoreScheme:
    """Substitution scores for a built-in kind.  The no-indel baseline
    shares the uniform matrix; forbidding gaps is the aligner's job,
    not a property of the matrix."""
    if kind is SchemeKind.METRONOME:
        return default_scheme()
    return uniform_scheme()


_UPPER_CELLS = [(i, j) for i in range(_N) for j in range(i, _N)]
_GAP_KEYS = ("open", "extend")


def _parse_cell_key(key: str) -> tuple[int, int]:
    if len(key) == 3 and key[1] == "." and key[0] in ALPHABET and key[2] in ALPHABET:
        return ALPHABET.index(key[0]), ALPHABET.index(key[2])
    raise SchemaError(f"unknown substitution key {key!r}")


def loads_scheme(text: str) -> ScoreScheme:
    """Parse scheme config text.

    The format is two sections of ``key = value`` pairs: a
    ``[substitution]`` section with the ten unique cells written as
    symbol pairs (``S.S = 3``, ``w.| = -6``, ...) and a ``[gaps]``
    section with ``open`` and ``extend``.  Unknown or missing keys are
    errors.
    """
    cp = configparser.ConfigParser(
        interpolation=None, delimiters=("=",), comment_prefixes=("#", ";")
    )
    cp.optionxform = str  # keys are case sensitive: S.w and S.W differ
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise SchemaError(f"malformed scheme config: {exc}") from exc

    sections = set(cp.sections())
    if sections != {"substitution", "gaps"}:
        raise SchemaError(
            "expected exactly [substitution] and [gaps] sections, "
            f"found {sorted(sections)}"
        )

    cells: dict[tuple[int, int], int] = {}
    for key, raw in cp.items("substitution"):
        i, j = _parse_cell_key(key)
        canon = (min(i, j), max(i, j))
        if canon in cells:
            raise SchemaError(f"duplicate substitution cell {key!r}")
        try:
            cells[canon] = int(raw)
        except ValueError as exc:
            raise SchemaError(f"substitution {key!r} = {raw!r} is not an integer") from exc
    missing = [
        _cell_name(i, j) for i, j in _UPPER_CELLS if (i, j) not in cells
    ]
    if missing:
        raise SchemaError(f"missing substitution cells: {', '.join(missing)}")

    gaps: dict[str, int] = {}
    for key, raw in cp.items("gaps"):
        if key not in _GAP_KEYS:
            raise SchemaError(f"unknown gap key {key!r}")
        try:
            gaps[key] = int(raw)
        except ValueError as exc:
            raise SchemaError(f"gap {key!r} = {raw!r} is not an integer") from exc
    for key in _GAP_KEYS:
        if key not in gaps:
            raise SchemaError(f"missing gap key {key!r}")

    sub = tuple(
        tuple(cells[(min(i, j), max(i, j))] for j in range(_N)) for i in range(_N)
    )
    return ScoreScheme(substitution=sub, gap_open=gaps["open"], gap_extend=gaps["extend"])


def saves_scheme(scheme: ScoreScheme) -> str:
    """Render a scheme as config text; exact inverse of :func:`loads_scheme`."""
    out = io.StringIO()
    out.write("[substitution]\n")
    for i, j in _UPPER_CELLS:
        out.write(f"{_cell_name(i, j)} = {scheme.substitution[i][j]}\n")
    out.write("\n[gaps]\n")
    out.write(f"open = {scheme.gap_open}\n")
    out.write(f"extend = {scheme.gap_extend}\n")
    return out.getvalue()


def load_scheme(path: str) -> ScoreScheme:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_scheme(fh.read())


def save_scheme(scheme: ScoreScheme, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(saves_scheme(scheme))
