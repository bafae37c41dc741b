"""Statistical estimators and report tables.

Sample sizing (Cochran), binomial confidence intervals (Wilson score),
the per-project floating-point probability model, quartile summaries, and
the per-language function table.

Quartiles use linear interpolation between order statistics (the common
"type 7" rule); the convention is pinned here so independent runs agree.
Normal critical values come from Acklam's rational approximation of the
inverse normal CDF (relative error < 1.2e-9), refined with one Halley step,
rather than from external tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .model import ProjectKeywordCount
from .scanner import KeywordCounts, scan_keywords

# Acklam's coefficients for the inverse normal CDF rational approximation.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def inverse_normal_cdf(p: float) -> float:
    """Quantile of the standard normal distribution, accurate to ~1e-15.

    Acklam's rational approximation followed by one Halley refinement step.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        x = ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
             / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    elif p <= 1.0 - _P_LOW:
        q = p - 0.5
        r = q * q
        x = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
             / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))
    else:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        x = -((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
              / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    # Halley step against the exact CDF expressed with erfc.
    err = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
    u = err * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
    return x - u / (1.0 + x * u / 2.0)


def z_critical(confidence: float) -> float:
    """Two-sided normal critical value for a confidence level in (0, 1)."""
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0, 1)")
    return inverse_normal_cdf(0.5 + confidence / 2.0)


@dataclass(frozen=True)
class ConfidenceInterval:
    low: float
    high: float
    confidence: float

    def __post_init__(self):
        if not (0.0 <= self.low <= self.high <= 1.0):
            raise ValueError(f"invalid interval [{self.low}, {self.high}]")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must be in (0, 1)")


@dataclass(frozen=True)
class DistributionSummary:
    min: float
    q1: float
    median: float
    q3: float
    max: float

    def __post_init__(self):
        if not (self.min <= self.q1 <= self.median <= self.q3 <= self.max):
            raise ValueError("summary fields must be nondecreasing")

    @property
    def iqr(self) -> float:
        return self.q3 - self.q1


def cochran_sample_size(confidence: float, margin: float, p: float) -> int:
    """Sample size n0 = ceil(z^2 p(1-p) / margin^2) for a proportion estimate."""
    if not 0.0 < margin < 1.0:
        raise ValueError("margin must be in (0, 1)")
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    z = z_critical(confidence)
    return math.ceil(z * z * p * (1.0 - p) / (margin * margin))


def wilson_interval(successes: int, n: int, confidence: float) -> ConfidenceInterval:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n must be positive")
    if not 0 <= successes <= n:
        raise ValueError("successes must be in [0, n]")
    z = z_critical(confidence)
    phat = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = phat + z2 / (2.0 * n)
    radius = z * math.sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n))
    low = max(0.0, (center - radius) / denom)
    high = min(1.0, (center + radius) / denom)
    return ConfidenceInterval(low, high, confidence)


def project_fp_probability(p: float, k: int) -> float:
    """Probability that a project with k keyword-bearing files has at least
    one true floating-point file, given per-file true-positive rate p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    if k < 0:
        raise ValueError("k must be >= 0")
    return 1.0 - (1.0 - p) ** k


def expected_project_proportion(
    p_interval: ConfidenceInterval,
    counts: Sequence[ProjectKeywordCount],
    total_projects: int,
) -> ConfidenceInterval:
    """Mean of the per-project probability over all projects, evaluated at
    both interval endpoints.  Projects absent from *counts* have k = 0."""
    if total_projects < len(counts):
        raise ValueError("total_projects must cover every counted project")
    if total_projects <= 0:
        raise ValueError("total_projects must be positive")
    low = sum(project_fp_probability(p_interval.low, c.k) for c in counts)
    high = sum(project_fp_probability(p_interval.high, c.k) for c in counts)
    return ConfidenceInterval(
        low / total_projects, high / total_projects, p_interval.confidence
    )


def summarize_distribution(values: Sequence[float]) -> DistributionSummary:
    """Five-number summary with type-7 (linear interpolation) quartiles."""
    if len(values) == 0:
        raise ValueError("values must be nonempty")
    arr = np.asarray(values, dtype=float)
    q = np.quantile(arr, [0.0, 0.25, 0.5, 0.75, 1.0], method="linear")
    return DistributionSummary(*(float(v) for v in q))


def round_sig(x: float, digits: int = 2) -> float:
    """Round to a number of significant digits (for rendered reports only)."""
    if x == 0:
        return 0.0
    exp = math.floor(math.log10(abs(x)))
    return round(x, digits - 1 - exp)


def format_pct(fraction: float, digits: int = 2) -> str:
    """Render a fraction as a percentage at two significant digits."""
    pct = round_sig(fraction * 100.0, digits)
    if pct == int(pct):
        return f"{int(pct)}%"
    return f"{pct:g}%"


# -- function table ----------------------------------------------------------

FUNCTION_TABLE_COLUMNS = (
    "language", "functions",
    "words_med", "words_iqr",
    "params_med", "params_iqr",
    "loops_pct", "loops_med", "loops_iqr",
    "conditionals_pct", "conditionals_med", "conditionals_iqr",
    "calls_pct", "calls_med", "calls_iqr",
    "types_pct", "transcendental_pct", "other_pct",
)


def _med_iqr(values: np.ndarray) -> tuple[float, float]:
    if values.size == 0:
        return 0.0, 0.0
    q1, med, q3 = np.quantile(values, [0.25, 0.5, 0.75], method="linear")
    return float(med), float(q3 - q1)


def function_table(
    records: Iterable[Mapping],
    languages: Sequence[str] | None = None,
) -> list[dict]:
    """Per-language function statistics rows.

    For words and params: median and IQR over all functions.  For loops,
    conditionals and calls: the share of functions using the construct, and
    the median/IQR of its occurrences among those that do.  For each keyword
    category: the share of functions with at least one keyword of it.
    *records* are function-CSV rows (mappings with the metric fields).
    """
    by_lang: dict[str, list[Mapping]] = {}
    for rec in records:
        by_lang.setdefault(str(rec["language"]), []).append(rec)
    if languages is None:
        languages = sorted(by_lang)
    rows = []
    for lang in languages:
        recs = by_lang.get(lang, [])
        if not recs:
            raise ValueError(f"no function records for language {lang!r}")
        n = len(recs)

        def col(name: str) -> np.ndarray:
            return np.array([int(r[name]) for r in recs])

        words_med, words_iqr = _med_iqr(col("words"))
        params_med, params_iqr = _med_iqr(col("arity"))
        row: dict = {
            "language": lang,
            "functions": n,
            "words_med": words_med,
            "words_iqr": words_iqr,
            "params_med": params_med,
            "params_iqr": params_iqr,
        }
        for family in ("loops", "conditionals", "calls"):
            vals = col(family)
            used = vals[vals > 0]
            med, iqr = _med_iqr(used)
            row[f"{family}_pct"] = used.size / n
            row[f"{family}_med"] = med
            row[f"{family}_iqr"] = iqr
        for cat, column in (
            ("types", "kw_types"),
            ("transcendental", "kw_transc"),
            ("other", "kw_other"),
        ):
            vals = col(column)
            row[f"{cat}_pct"] = int((vals > 0).sum()) / n
        rows.append(row)
    return rows


# -- auxiliary keyword sets ---------------------------------------------------


def auxiliary_keyword_report(
    file_texts: Iterable[tuple[str, bytes | str]],
    function_texts: Iterable[tuple[str, bytes | str]],
    extra_sets: Mapping[str, "object"],
) -> dict:
    """Share of files and functions matching each extra keyword set.

    *file_texts* and *function_texts* yield (language, text) pairs;
    *extra_sets* maps a set name to a KeywordSet applied to every language.
    Returns {set_name: {language: {"files": ..., "functions": ...,
    "file_fraction": ..., "function_fraction": ...}}} plus totals.
    """
    if not extra_sets:
        raise ValueError("at least one auxiliary keyword set is required")
    for name, ks in extra_sets.items():
        if not (ks.types or ks.transcendental or ks.other):
            raise ValueError(f"auxiliary keyword set {name!r} is empty")

    file_totals: dict[str, int] = {}
    fn_totals: dict[str, int] = {}
    matches: dict[str, dict[str, dict[str, int]]] = {
        name: {} for name in extra_sets
    }

    def _tally(kind: str, language: str, text, totals: dict[str, int]) -> None:
        totals[language] = totals.get(language, 0) + 1
        for name, ks in extra_sets.items():
            counts: KeywordCounts = scan_keywords(text, ks)
            if counts.total() > 0:
                bucket = matches[name].setdefault(language, {"files": 0, "functions": 0})
                bucket[kind] += 1

    for language, text in file_texts:
        _tally("files", language, text, file_totals)
    for language, text in function_texts:
        _tally("functions", language, text, fn_totals)

    report: dict = {
        "file_totals": dict(sorted(file_totals.items())),
        "function_totals": dict(sorted(fn_totals.items())),
        "sets": {},
    }
    for name in extra_sets:
        per_lang = {}
        langs = sorted(set(file_totals) | set(fn_totals))
        for lang in langs:
            bucket = matches[name].get(lang, {"files": 0, "functions": 0})
            files_n = file_totals.get(lang, 0)
            fns_n = fn_totals.get(lang, 0)
            per_lang[lang] = {
                "files": bucket["files"],
                "functions": bucket["functions"],
                "file_fraction": bucket["files"] / files_n if files_n else 0.0,
                "function_fraction": bucket["functions"] / fns_n if fns_n else 0.0,
            }
        report["sets"][name] = per_lang
    return report
