"""Token-level duplicate elimination over the global file pool.

Two files are token-level duplicates when their word-token multisets are
equal, i.e. the files agree up to whitespace, punctuation, and token order.
Tokens keep their original case (keyword scanning is separately
case-insensitive).  The canonical bag encoding is fixed so digests are
stable across implementations:

    token b"\\x00" decimal-multiplicity b"\\x01"  ...

with (token, multiplicity) pairs sorted by token byte value.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .model import FileRecord
from .scanner import words_of

TokenBag = tuple[tuple[str, int], ...]

_DIGESTS: dict[str, Callable[[bytes], "hashlib._Hash"]] = {
    "blake2b": lambda data: hashlib.blake2b(data, digest_size=32),
    "sha256": hashlib.sha256,
}
try:  # pragma: no cover - mirror does not carry blake3; picked up if present
    import blake3  # type: ignore

    _DIGESTS["blake3"] = blake3.blake3
    DEFAULT_DIGEST = "blake3"
except ImportError:
    DEFAULT_DIGEST = "blake2b"


def digest_algorithms() -> list[str]:
    return sorted(_DIGESTS)


def canonical_bag(data: bytes | str) -> TokenBag:
    """Bag-of-words canonical form: sorted (token, multiplicity) pairs."""
    counts = Counter(words_of(data))
    return tuple(sorted(counts.items()))


def encode_bag(bag: TokenBag) -> bytes:
    parts = []
    for token, mult in bag:
        if mult < 1:
            raise ValueError("bag multiplicities must be >= 1")
        parts.append(token.encode("utf-8") + b"\x00" + str(mult).encode() + b"\x01")
    return b"".join(parts)


def bag_digest(bag: TokenBag, algorithm: str = DEFAULT_DIGEST) -> str:
    """256-bit hex digest of the canonical bag encoding."""
    try:
        factory = _DIGESTS[algorithm]
    except KeyError:
        raise ValueError(f"unknown digest algorithm {algorithm!r}") from None
    return factory(encode_bag(bag)).hexdigest()


def file_digest(data: bytes | str, algorithm: str = DEFAULT_DIGEST) -> str:
    return bag_digest(canonical_bag(data), algorithm)


@dataclass
class DedupGroup:
    digest: str
    representative: FileRecord
    duplicate_count: int  # total files sharing the digest, representative included


@dataclass
class DedupResult:
    retained: list[FileRecord]
    groups: dict[str, DedupGroup]
    per_language: dict[str, dict[str, int]] = field(default_factory=dict)

    @property
    def total_files(self) -> int:
        return sum(g.duplicate_count for g in self.groups.values())

    @property
    def duplicate_fraction(self) -> float:
        total = self.total_files
        if total == 0:
            return 0.0
        return (total - len(self.retained)) / total

    def report(self, top: int = 10) -> dict:
        """Duplication statistics in report-JSON form."""
        ranked = sorted(
            self.groups.values(),
            key=lambda g: (-g.duplicate_count, g.digest),
        )
        return {
            "total_files": self.total_files,
            "retained_files": len(self.retained),
            "duplicate_files": self.total_files - len(self.retained),
            "duplicate_fraction": self.duplicate_fraction,
            "per_language": self.per_language,
            "top_duplicated": [
                {
                    "digest": g.digest,
                    "count": g.duplicate_count,
                    "repo_id": g.representative.repo_id,
                    "path": g.representative.path,
                }
                for g in ranked[:top]
                if g.duplicate_count > 1
            ],
        }


def dedup(files: Iterable[FileRecord]) -> DedupResult:
    """Keep exactly one representative per distinct bag digest.

    The representative is the lowest (repo_id, path) in the group, so the
    outcome is independent of input order.  Every record must already carry
    its bag_digest.
    """
    groups: dict[str, DedupGroup] = {}
    lang_totals: dict[str, Counter] = {}
    for rec in files:
        if not rec.bag_digest:
            raise ValueError(f"file {rec.repo_id}:{rec.path} has no bag_digest")
        stats = lang_totals.setdefault(rec.language, Counter())
        stats["files"] += 1
        group = groups.get(rec.bag_digest)
        if group is None:
            groups[rec.bag_digest] = DedupGroup(rec.bag_digest, rec, 1)
        else:
            group.duplicate_count += 1
            current = (group.representative.repo_id, group.representative.path)
            if (rec.repo_id, rec.path) < current:
                group.representative = rec
    retained = [g.representative for g in groups.values()]
    retained.sort(key=lambda r: (r.repo_id, r.path))
    for rec in retained:
        lang_totals.setdefault(rec.language, Counter())["retained"] += 1
    per_language = {
        lang: {
            "files": stats["files"],
            "retained": stats["retained"],
            "duplicates": stats["files"] - stats["retained"],
        }
        for lang, stats in sorted(lang_totals.items())
    }
    return DedupResult(retained=retained, groups=groups, per_language=per_language)
