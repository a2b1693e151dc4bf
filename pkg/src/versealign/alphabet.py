"""Four-symbol prosodic strings: parsing, validation, line splitting.

A metronome string records a poem as one character per prosodic event:
``S`` for a stressed syllable, ``w`` for an unstressed one, ``.`` for a
word break between syllables, and ``|`` for the end of a verse line.
This module turns raw text into validated :class:`MetronomeString`
values and provides the small structural operations the rest of the
package builds on.

Canonical form rules: no run of consecutive word breaks, no word break
touching a line end, no word break at the start of the string, and at
least one syllable somewhere.  A trailing line end is optional in input
but significant: ``"wS"`` and ``"wS|"`` are different strings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

__all__ = [
    "ALPHABET",
    "AlphabetError",
    "CanonicalViolationError",
    "EmptyStringError",
    "InvalidSymbolError",
    "Line",
    "MetronomeString",
    "SYMBOLS",
    "Symbol",
    "canonicalize",
    "parse",
    "render",
    "split_lines",
]


class Symbol(Enum):
    """One prosodic event."""

    STRONG = "S"
    WEAK = "w"
    WORD_BREAK = "."
    LINE_END = "|"

    @property
    def char(self) -> str:
        return self.value


#: Fixed symbol order used for matrix indexing throughout the package.
SYMBOLS: tuple[Symbol, ...] = (
    Symbol.STRONG,
    Symbol.WEAK,
    Symbol.WORD_BREAK,
    Symbol.LINE_END,
)
ALPHABET = "Sw.|"

_CODE_OF = {ch: i for i, ch in enumerate(ALPHABET)}
_SYMBOL_OF = {s.value: s for s in Symbol}

# Byte-value lookup table so strings encode to small integer arrays fast.
_CODE_TABLE = np.zeros(256, dtype=np.uint8)
for _ch, _i in _CODE_OF.items():
    _CODE_TABLE[ord(_ch)] = _i


class AlphabetError(ValueError):
    """Base class for text that cannot become a metronome string."""


class EmptyStringError(AlphabetError):
    """No symbols at all, or no syllable among them."""


class InvalidSymbolError(AlphabetError):
    """A character outside ``S w . |`` (whitespace excepted)."""

    def __init__(self, char: str, offset: int) -> None:
        super().__init__(f"invalid symbol {char!r} at offset {offset}")
        self.char = char
        self.offset = offset


class CanonicalViolationError(AlphabetError):
    """Symbols are legal but their arrangement is not canonical."""

    def __init__(self, message: str, offset: int | None = None) -> None:
        super().__init__(message)
        self.offset = offset


def _scan(text: str) -> str:
    """Strip whitespace and reject out-of-alphabet characters.

    Offsets in errors refer to positions in the original input.
    """
    out: list[str] = []
    for i, ch in enumerate(text):
        if ch.isspace():
            continue
        if ch not in _CODE_OF:
            raise InvalidSymbolError(ch, i)
        out.append(ch)
    return "".join(out)


def _check_canonical(body: str) -> None:
    if not body:
        raise EmptyStringError("empty string")
    if body[0] == ".":
        raise CanonicalViolationError("word break at start of string", 0)
    for i in range(len(body) - 1):
        pair = body[i : i + 2]
        if pair == "..":
            raise CanonicalViolationError(
                f"consecutive word breaks at offset {i}", i
            )
        if pair in (".|", "|."):
            raise CanonicalViolationError(
                f"word break touching line end at offset {i}", i
            )
    if not any(c in "Sw" for c in body):
        raise EmptyStringError("no syllables")


@dataclass(frozen=True)
class MetronomeString:
    """A validated sequence of prosodic symbols.

    ``text`` is the canonical rendering, one character per symbol.
    Instances are immutable and hashable; construct them via
    :func:`parse` or :func:`canonicalize` rather than directly unless
    the text is already known to be canonical.
    """

    text: str

    def __post_init__(self) -> None:
        bad = set(self.text) - set(ALPHABET)
        if bad:
            ch = sorted(bad)[0]
            raise InvalidSymbolError(ch, self.text.index(ch))
        _check_canonical(self.text)

    def __len__(self) -> int:
        return len(self.text)

    def __str__(self) -> str:
        return self.text

    @property
    def symbols(self) -> tuple[Symbol, ...]:
        return tuple(_SYMBOL_OF[c] for c in self.text)

    @property
    def syllable_count(self) -> int:
        return sum(1 for c in self.text if c in "Sw")

    @cached_property
    def codes(self) -> np.ndarray:
        """Symbols as a read-only ``uint8`` array in ``ALPHABET`` order."""
        raw = np.frombuffer(self.text.encode("ascii"), dtype=np.uint8)
        arr = _CODE_TABLE[raw]
        arr.flags.writeable = False
        return arr


@dataclass(frozen=True)
class Line:
    """The symbols of one verse line, line end excluded."""

    text: str

    def __post_init__(self) -> None:
        if "|" in self.text:
            raise CanonicalViolationError("line may not contain a line end")

    def __len__(self) -> int:
        return len(self.text)

    def __str__(self) -> str:
        return self.text

    @property
    def syllable_count(self) -> int:
        return sum(1 for c in self.text if c in "Sw")


def parse(text: str) -> MetronomeString:
    """Parse raw text, ignoring whitespace, into a metronome string.

    Raises :class:`InvalidSymbolError` for characters outside the
    alphabet, :class:`CanonicalViolationError` for non-canonical symbol
    arrangements, and :class:`EmptyStringError` when nothing (or no
    syllable) remains.
    """
    body = _scan(text)
    _check_canonical(body)
    return MetronomeString(body)


def canonicalize(text: str) -> MetronomeString:
    """Parse leniently, repairing canonical violations.

    Runs of word breaks collapse to one; word breaks adjacent to line
    ends or at the start of the string are dropped.  Characters outside
    the alphabet are still errors, as is a result with no syllables.
    """
    body = _scan(text)
    body = re.sub(r"\.{2,}", ".", body)
    body = re.sub(r"\.\|", "|", body)
    body = re.sub(r"\|\.", "|", body)
    body = body.lstrip(".")
    _check_canonical(body)
    return MetronomeString(body)


def render(s: MetronomeString) -> str:
    """The canonical text of ``s``; inverse of :func:`parse`."""
    return s.text


def split_lines(s: MetronomeString) -> list[Line]:
    """Split on line ends.  A trailing line end closes the last line
    rather than opening an empty one."""
    segments = s.text.split("|")
    if segments and segments[-1] == "":
        segments.pop()
    return [Line(seg) for seg in segments]
