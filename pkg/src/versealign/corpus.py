"""Corpus records and JSON-lines serialization.

A corpus file holds one JSON object per line with an ``id``, a flat
``labels`` map of string metadata (language, meter, author, ...), and
the poem's symbols under ``metronome``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .alphabet import AlphabetError, MetronomeString, parse

__all__ = [
    "CorpusFormatError",
    "CorpusRecord",
    "read_corpus",
    "write_corpus",
]

_KNOWN_KEYS = {"id", "labels", "metronome"}


class CorpusFormatError(ValueError):
    """A corpus line is not a well-formed record."""


@dataclass(frozen=True, eq=True)
class CorpusRecord:
    """One poem with its identifier and metadata labels."""

    id: str
    labels: dict[str, str]
    metronome: MetronomeString

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise CorpusFormatError(f"record id must be a non-empty string, got {self.id!r}")
        if any(c in self.id for c in "\t\n\r"):
            raise CorpusFormatError(f"record id {self.id!r} contains tab or newline")
        for k, v in self.labels.items():
            if not isinstance(k, str) or not isinstance(v, str):
                raise CorpusFormatError(
                    f"record {self.id!r}: labels must map strings to strings"
                )


def record_from_obj(obj: object) -> CorpusRecord:
    """Build a record from one decoded JSON value."""
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"record must be a JSON object, got {type(obj).__name__}")
    unknown = set(obj) - _KNOWN_KEYS
    if unknown:
        raise CorpusFormatError(f"unknown record keys: {sorted(unknown)}")
    for key in ("id", "metronome"):
        if key not in obj:
            raise CorpusFormatError(f"record missing {key!r}")
    labels = obj.get("labels", {})
    if not isinstance(labels, dict):
        raise CorpusFormatError("labels must be a JSON object")
    if not isinstance(obj["metronome"], str):
        raise CorpusFormatError("metronome must be a string")
    try:
        metronome = parse(obj["metronome"])
    except AlphabetError as exc:
        raise CorpusFormatError(f"record {obj.get('id')!r}: {exc}") from exc
    return CorpusRecord(id=obj["id"], labels=dict(labels), metronome=metronome)


def read_corpus(path: str) -> list[CorpusRecord]:
    """Read a JSONL corpus file, failing on the first bad record."""
    records: list[CorpusRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            try:
                records.append(record_from_obj(obj))
            except CorpusFormatError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: {exc}") from exc
    return records


def record_to_obj(record: CorpusRecord) -> dict:
    return {
        "id": record.id,
        "labels": dict(record.labels),
        "metronome": str(record.metronome),
    }


def write_corpus(records: list[CorpusRecord], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_obj(rec), ensure_ascii=False))
            fh.write("\n")
