"""List-quality metrics: similarity, stability, TLD spread, health, flags."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .combine import CombinedList, CrawlResult, FlagSet
from .errors import EmptyInputError
from .snapshots import ProviderSnapshot


@dataclass(frozen=True)
class RboParams:
    """Rank-biased overlap parameters.

    p in (0,1) is the persistence: higher p spreads weight deeper down
    the lists, lower p concentrates it on the best ranks. k is the
    evaluation depth and defaults to the shorter list's length.
    """

    p: float
    k: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must be in (0,1), got {self.p}")
        if self.k is not None and self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


def _names(ranking: object) -> list[str]:
    if isinstance(ranking, ProviderSnapshot):
        return ranking.names()
    if isinstance(ranking, CombinedList):
        return ranking.names()
    return list(ranking)  # type: ignore[arg-type]


def rbo(list_a: object, list_b: object, params: RboParams) -> float:
    """Extrapolated rank-biased overlap of two duplicate-free rankings.

    With X_d the overlap of the depth-d prefixes, returns
    (X_k/k) * p^k + ((1-p)/p) * sum_{d=1..k} (X_d/d) * p^d,
    a value in [0,1]: 1 for identical prefixes, 0 for disjoint ones.
    """
    a = _names(list_a)
    b = _names(list_b)
    if not a or not b:
        raise EmptyInputError("rbo is undefined for empty lists")
    if len(set(a)) != len(a) or len(set(b)) != len(b):
        raise ValueError("rbo requires duplicate-free lists")
    k = params.k if params.k is not None else min(len(a), len(b))
    if k > min(len(a), len(b)):
        raise ValueError(
            f"depth {k} exceeds the shorter list length {min(len(a), len(b))}"
        )
    a = a[:k]
    b = b[:k]
    if a == b:
        return 1.0  # exact by construction; avoids float drift on the series
    p = params.p
    seen_a: set[str] = set()
    seen_b: set[str] = set()
    overlap = 0
    series = 0.0
    weight = 1.0  # p^d, updated incrementally
    x_k = 0
    for d in range(1, k + 1):
        ea, eb = a[d - 1], b[d - 1]
        if ea == eb:
            overlap += 1
        else:
            if ea in seen_b:
                overlap += 1
            if eb in seen_a:
                overlap += 1
            seen_a.add(ea)
            seen_b.add(eb)
        weight *= p
        series += overlap / d * weight
        x_k = overlap
    return (x_k / k) * weight + (1.0 - p) / p * series


def daily_intersection(list_a: object, list_b: object) -> float:
    """Fraction of the first list's domains also present in the second."""
    a = _names(list_a)
    b = _names(list_b)
    if not a:
        raise EmptyInputError("daily intersection is undefined for an empty first list")
    return len(set(a) & set(b)) / len(a)


@dataclass(frozen=True)
class StabilityReport:
    """Day-over-day intersection fractions, labeled by the later date."""

    series: tuple[tuple[dt.date, float], ...]


def stability_series(
    dated: Sequence[tuple[dt.date, ProviderSnapshot | Sequence[str]]],
) -> StabilityReport:
    """Intersection between consecutive days, earlier day as denominator."""
    ordered = sorted(dated, key=lambda pair: pair[0])
    series = []
    for (_, earlier), (later_date, later) in zip(ordered, ordered[1:]):
        series.append((later_date, daily_intersection(earlier, later)))
    return StabilityReport(series=tuple(series))


@dataclass(frozen=True)
class TldRow:
    tld: str
    count: int
    cumulative_fraction: float


def tld_distribution(ranking: ProviderSnapshot | CombinedList) -> list[TldRow]:
    """TLD usage sorted by descending count (ties on TLD name)."""
    counts: dict[str, int] = {}
    tlds = [e.domain.tld for e in ranking.entries]
    for tld in tlds:
        counts[tld] = counts.get(tld, 0) + 1
    total = len(tlds)
    rows: list[TldRow] = []
    cumulative = 0
    for tld, count in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        cumulative += count
        rows.append(TldRow(tld=tld, count=count, cumulative_fraction=cumulative / total))
    return rows


THIN_PAGE_BYTES = 512

_HEALTH_CATEGORIES = (
    "uncrawled",
    "unreachable",
    "status_2xx",
    "status_3xx",
    "status_4xx",
    "status_5xx",
    "thin",
)


def health_summary(
    ranking: object, crawl: Mapping[str, CrawlResult] | Iterable[CrawlResult]
) -> dict[str, int]:
    """Tally responsiveness over a ranking.

    Reachable pages under 512 bytes count as thin in addition to their
    status class; domains absent from the crawl count as uncrawled.
    """
    results = crawl if isinstance(crawl, Mapping) else {c.domain: c for c in crawl}
    counts = {cat: 0 for cat in _HEALTH_CATEGORIES}
    for name in _names(ranking):
        result = results.get(name)
        if result is None:
            counts["uncrawled"] += 1
            continue
        if not result.reachable:
            counts["unreachable"] += 1
            continue
        if result.status is not None and 200 <= result.status < 600:
            counts[f"status_{result.status // 100}xx"] += 1
        if result.body_bytes is not None and result.body_bytes < THIN_PAGE_BYTES:
            counts["thin"] += 1
    return counts


@dataclass(frozen=True)
class FlagCount:
    label: str
    cut: int
    count: int


def flag_summary(
    ranking: object, flag_sets: Sequence[FlagSet], cuts: Sequence[int]
) -> list[FlagCount]:
    """Flagged-domain counts within each top-K subset of the ranking."""
    names = _names(ranking)
    for cut in cuts:
        if cut < 1 or cut > len(names):
            raise ValueError(f"cut {cut} outside 1..{len(names)}")
    rows: list[FlagCount] = []
    for flags in flag_sets:
        for cut in cuts:
            hit = sum(1 for name in names[:cut] if name in flags.domains)
            rows.append(FlagCount(label=flags.label, cut=cut, count=hit))
    return rows
