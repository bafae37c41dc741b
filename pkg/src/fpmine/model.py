"""Shared domain types for the mining pipeline."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields
from datetime import datetime, timezone

_HEX40_RE = re.compile(r"[0-9a-f]{40}$")
_WORDCHAR_RE = re.compile(r"[A-Za-z0-9_]+$")


def parse_utc(value: str | datetime) -> datetime:
    """Parse an ISO-8601 timestamp into an aware UTC datetime."""
    if isinstance(value, datetime):
        dt = value
    else:
        dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_utc(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class RepoStub:
    """A sampled repository id with just enough context to keep or drop it."""

    id: int
    full_name: str
    is_fork: bool

    def __post_init__(self):
        if self.id <= 0:
            raise ValueError(f"repository id must be positive, got {self.id}")
        if self.full_name.count("/") != 1:
            raise ValueError(f"full_name must be 'owner/name', got {self.full_name!r}")


@dataclass(frozen=True)
class ProjectMetadata:
    """Intrinsic repository properties used by the metadata filter.

    `size` is the forge-reported size metric and is treated as an opaque
    number; whether the platform reports lines or kilobytes is up to the
    platform and is compared as-is against the size threshold.
    """

    id: int
    full_name: str
    size: int
    created_at: datetime
    pushed_at: datetime
    stars: int
    open_issues: int
    forks: int
    primary_language: str | None = None

    def __post_init__(self):
        if self.id <= 0:
            raise ValueError("repository id must be positive")
        for name in ("size", "stars", "open_issues", "forks"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        # Note: age (pushed_at - created_at) may legitimately be negative;
        # forge timestamps come from client machines with arbitrary clocks.


@dataclass(frozen=True)
class LanguageInfo:
    """Per-repository language byte map plus the pinned head commit."""

    id: int
    languages: dict[str, int]
    head_commit: str = ""

    def __post_init__(self):
        if self.id <= 0:
            raise ValueError("repository id must be positive")
        for lang, nbytes in self.languages.items():
            if nbytes < 0:
                raise ValueError(f"byte count for {lang!r} must be >= 0")
        if self.head_commit and not _HEX40_RE.match(self.head_commit):
            raise ValueError(
                "head_commit must be empty or 40 lowercase hex characters"
            )


@dataclass(frozen=True)
class FilterThresholds:
    """Metadata filter thresholds; defaults are the retained-population minima."""

    min_loc: int = 50
    min_age_days: int = 60
    require_primary_language: bool = True

    def __post_init__(self):
        if self.min_loc < 0 or self.min_age_days < 0:
            raise ValueError("thresholds must be >= 0")


@dataclass(frozen=True)
class KeywordSet:
    """Per-language keyword configuration in three categories.

    Keywords must be single words (letters, digits, underscore only); boundary
    matching then reduces to whole-word lookup.  A keyword may not repeat
    within a category nor appear in two categories.
    """

    language: str
    types: tuple[str, ...]
    transcendental: tuple[str, ...]
    other: tuple[str, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for cat in ("types", "transcendental", "other"):
            words = getattr(self, cat)
            folded = set()
            for word in words:
                if not word or not _WORDCHAR_RE.match(word):
                    raise ValueError(
                        f"keyword {word!r} in {cat!r} must be nonempty word characters"
                    )
                low = word.lower()
                if low in folded:
                    raise ValueError(f"duplicate keyword {word!r} in {cat!r}")
                if low in seen:
                    raise ValueError(f"keyword {word!r} appears in two categories")
                folded.add(low)
            seen |= folded


@dataclass
class FileRecord:
    """One scanned source file with its keyword profile."""

    repo_id: int
    path: str
    language: str
    kind: str  # source | header | declaration
    loc: int
    words: int
    kw_types: int
    kw_transcendental: int
    kw_other: int
    bag_digest: str = ""  # filled by the dedup step

    def keyword_total(self) -> int:
        return self.kw_types + self.kw_transcendental + self.kw_other


@dataclass
class FunctionRecord:
    """One extracted function with structural metrics."""

    repo_id: int
    path: str
    function_index: int
    name: str | None
    loc: int
    words: int
    arity: int
    numeric_params: int
    loops: int
    loop_depth: int
    conditionals: int
    conditional_depth: int
    calls: int
    call_depth: int
    kw_types: int = 0
    kw_transcendental: int = 0
    kw_other: int = 0
    body: str = ""

    METRIC_FIELDS = (
        "loops",
        "loop_depth",
        "conditionals",
        "conditional_depth",
        "calls",
        "call_depth",
    )

    def __post_init__(self):
        for f in fields(self):
            if f.type == "int" and getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be >= 0")
        for family in ("loop", "conditional", "call"):
            count = getattr(self, family + "s")
            depth = getattr(self, family + "_depth")
            if depth > count:
                raise ValueError(f"{family}_depth {depth} exceeds count {count}")
        if self.numeric_params > self.arity:
            raise ValueError("numeric_params cannot exceed arity")

    def keyword_total(self) -> int:
        return self.kw_types + self.kw_transcendental + self.kw_other


@dataclass(frozen=True)
class ProjectKeywordCount:
    """Number of keyword-bearing files in one project."""

    project_id: int
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("k must be >= 0")


@dataclass(frozen=True)
class SamplePlan:
    """Parameters of the uniform id-sampling step."""

    max_id: int
    target_pages: int
    seed: int = 0

    def __post_init__(self):
        if self.max_id <= 0:
            raise ValueError("max_id must be positive")
        if self.target_pages <= 0:
            raise ValueError("target_pages must be positive")
