"""Per-file classification, counting, and keyword scanning.

A *word* is a maximal run of ASCII letters, digits, or underscores; every
other character (including non-ASCII and decoding artifacts) is a boundary.
Keyword matching is case-insensitive and whole-word, so a keyword never
matches inside a longer word ("doubled" does not contain the keyword
"double").  Case folding is ASCII-only on purpose: Unicode folding can merge
or split words across the fold and would break boundary stability.

Matching is one pass: the text is lower-cased, split into words, and each
word is looked up in a keyword->category dict, instead of running one regex
per keyword over files that number in the millions.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

from .model import KeywordSet

WORD_RE = re.compile(r"[A-Za-z0-9_]+")

_ASCII_LOWER = str.maketrans(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ", "abcdefghijklmnopqrstuvwxyz"
)


def decode_bytes(data: bytes | str) -> str:
    """Decode lossily; invalid sequences become replacement chars (boundaries)."""
    if isinstance(data, str):
        return data
    return data.decode("utf-8", errors="replace")


def words_of(data: bytes | str) -> list[str]:
    return WORD_RE.findall(decode_bytes(data))


def count_words(data: bytes | str) -> int:
    """Number of maximal [A-Za-z0-9_]+ runs in the text."""
    return len(words_of(data))


def count_loc(data: bytes | str) -> int:
    """Number of lines containing at least one non-whitespace character."""
    text = decode_bytes(data)
    return sum(1 for line in text.splitlines() if line.strip())


class KeywordCounts(NamedTuple):
    types: int
    transcendental: int
    other: int

    def total(self) -> int:
        return self.types + self.transcendental + self.other


def keyword_lookup(ks: KeywordSet) -> dict[str, int]:
    """Map lowercase keyword -> category index (0 types, 1 transc, 2 other)."""
    table: dict[str, int] = {}
    for idx, cat in enumerate(("types", "transcendental", "other")):
        for word in getattr(ks, cat):
            table[word.lower()] = idx
    return table


def scan_keywords(data: bytes | str, ks: KeywordSet | dict[str, int]) -> KeywordCounts:
    """Count keyword occurrences per category, case-insensitive, whole-word."""
    table = ks if isinstance(ks, dict) else keyword_lookup(ks)
    counts = [0, 0, 0]
    text = decode_bytes(data).translate(_ASCII_LOWER)
    for word in WORD_RE.findall(text):
        cat = table.get(word)
        if cat is not None:
            counts[cat] += 1
    return KeywordCounts(*counts)


def file_has_keywords(counts: KeywordCounts) -> bool:
    """Keep a file iff it matched at least one keyword in any category."""
    return counts.total() > 0


# -- language classification ----------------------------------------------


@dataclass(frozen=True)
class Classification:
    language: str
    kind: str  # source | header | declaration


class ExtensionMap:
    """Longest-suffix file classifier, loaded from a JSON data file.

    The JSON maps suffix -> {"language": ..., "kind": ...}; suffixes are
    matched case-insensitively against the basename, longest suffix first,
    so ".d.ts" wins over ".ts".
    """

    def __init__(self, entries: dict[str, dict[str, str]]):
        self._entries = {
            suffix.lower(): Classification(spec["language"], spec.get("kind", "source"))
            for suffix, spec in entries.items()
        }
        self._by_length = sorted(self._entries, key=len, reverse=True)

    @classmethod
    def load(cls, path: str | Path) -> "ExtensionMap":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def classify(self, path: str) -> Classification | None:
        name = path.rsplit("/", 1)[-1].lower()
        for suffix in self._by_length:
            if name.endswith(suffix) and len(name) > len(suffix):
                return self._entries[suffix]
        return None

    def languages(self) -> set[str]:
        return {c.language for c in self._entries.values()}


def classify_file(path: str, extension_map: ExtensionMap) -> Classification | None:
    """Classify by extension; None means the file is excluded from the dataset."""
    return extension_map.classify(path)


# -- keyword set loading -----------------------------------------------------


def load_keyword_set(path: str | Path) -> KeywordSet:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    try:
        return KeywordSet(
            language=raw["language"],
            types=tuple(raw.get("types", ())),
            transcendental=tuple(raw.get("transcendental", ())),
            other=tuple(raw.get("other", ())),
        )
    except (KeyError, TypeError) as e:
        raise ValueError(f"{path}: malformed keyword set ({e})") from None


def load_keyword_dir(path: str | Path) -> dict[str, KeywordSet]:
    """Load every *.json keyword set in a directory, keyed by language.

    A set whose language is "default" is used as the fallback for languages
    without their own file.
    """
    sets: dict[str, KeywordSet] = {}
    directory = Path(path)
    if not directory.is_dir():
        raise FileNotFoundError(f"keyword directory not found: {directory}")
    for file in sorted(directory.glob("*.json")):
        ks = load_keyword_set(file)
        if ks.language in sets:
            raise ValueError(f"duplicate keyword set for language {ks.language!r}")
        sets[ks.language] = ks
    if not sets:
        raise ValueError(f"no keyword sets found in {directory}")
    return sets


class KeywordCatalog:
    """Keyword sets for many languages with an optional default fallback."""

    def __init__(self, sets: dict[str, KeywordSet]):
        self.sets = sets
        self._tables = {lang: keyword_lookup(ks) for lang, ks in sets.items()}

    @classmethod
    def load(cls, path: str | Path) -> "KeywordCatalog":
        return cls(load_keyword_dir(path))

    def table_for(self, language: str) -> dict[str, int] | None:
        table = self._tables.get(language)
        if table is None:
            table = self._tables.get("default")
        return table

    def set_for(self, language: str) -> KeywordSet | None:
        return self.sets.get(language) or self.sets.get("default")

    def languages(self) -> Iterable[str]:
        return self.sets.keys()
