"""Manipulation-effort estimates for combined and single-provider lists.

Two questions: how good a per-day rank must a domain reach on one
provider to enter a combined top-T (entry threshold), and how many
domains must be promoted past the best-ranked flagged domain to push
every flagged domain out of a top-K subset (displacement cost).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence, Set

from .combine import CombinedList, Method, scorer
from .errors import EmptyInputError


@dataclass(frozen=True)
class ThresholdQuery:
    """Target rank T in a combined list, using D_m days and P_m providers."""

    combined: CombinedList
    target_rank: int
    days_manipulated: int = 1
    providers_manipulated: int = 1

    def __post_init__(self) -> None:
        if not self.combined.entries:
            raise EmptyInputError("combined list is empty")
        if not 1 <= self.target_rank <= len(self.combined.entries):
            raise ValueError(
                f"target_rank must be in 1..{len(self.combined.entries)}, "
                f"got {self.target_rank}"
            )
        config = self.combined.config
        if not 1 <= self.days_manipulated <= config.window_length:
            raise ValueError(
                f"days_manipulated must be in 1..{config.window_length}"
            )
        if not 1 <= self.providers_manipulated <= len(config.providers):
            raise ValueError(
                f"providers_manipulated must be in 1..{len(config.providers)}"
            )


def threshold_rank(
    target_score: float,
    method: Method,
    n_ref: int,
    days: int = 1,
    providers: int = 1,
) -> int | None:
    """Largest per-day rank whose accumulated score still reaches the target.

    Assumes the manipulated domain holds the same rank r on a full-length
    (n_ref) list for every manipulated provider-day, contributing
    providers * days * score(r). Monotone search over r; None when even
    rank 1 falls short.
    """
    score_fn = scorer(method)
    budget = days * providers

    def reaches(rank: int) -> bool:
        return budget * score_fn(rank, n_ref, n_ref) >= target_score

    if not reaches(1):
        return None
    lo, hi = 1, n_ref  # reaches(lo) holds; find the last rank where it does
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if reaches(mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


def entry_threshold(query: ThresholdQuery) -> int | None:
    """Minimal per-day single-list rank to reach the queried combined rank.

    Incumbent scores are taken as fixed; the one-position shift a real
    insertion causes is ignored here and covered by the bracketing tests.
    """
    target_score = query.combined.entries[query.target_rank - 1].score
    config = query.combined.config
    return threshold_rank(
        target_score,
        config.method,
        config.n_ref,
        days=query.days_manipulated,
        providers=query.providers_manipulated,
    )


@dataclass(frozen=True)
class DisplacementQuery:
    """Push all flagged domains out of the top-K of a ranking."""

    ranking: tuple[str, ...]
    flagged: frozenset[str]
    subset_k: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "ranking", tuple(self.ranking))
        object.__setattr__(self, "flagged", frozenset(self.flagged))
        if self.subset_k < 1:
            raise ValueError("subset_k must be >= 1")
        if len(set(self.ranking)) != len(self.ranking):
            raise ValueError("ranking must be duplicate-free")


def displacement_cost(query: DisplacementQuery) -> int:
    """Minimum number of domains promoted from below to displace the flags.

    Promoting c outside domains above the best flagged rank r_min pushes
    every flagged domain down by c, so c = K - r_min + 1 suffices and
    anything less leaves the best flagged domain inside the top K.
    """
    top = query.ranking[: query.subset_k]
    r_min = next(
        (i + 1 for i, name in enumerate(top) if name in query.flagged), None
    )
    if r_min is None:
        return 0
    return query.subset_k - r_min + 1


@dataclass(frozen=True)
class DisplacementProfile:
    rows: tuple[tuple[str, int, int], ...]  # (provider label, cut, cost)
    minima: tuple[tuple[int, int], ...]  # (cut, min cost across providers)


def displacement_profile(
    ranking: Sequence[str],
    flagged_by_provider: Mapping[str, Set[str]],
    cuts: Sequence[int] = (1_000, 10_000, 100_000, 1_000_000),
) -> DisplacementProfile:
    """Displacement cost per (provider label, cut), plus per-cut minima."""
    ranking_t = tuple(ranking)
    rows = []
    minima: dict[int, int] = {}
    for label in sorted(flagged_by_provider):
        flagged = frozenset(flagged_by_provider[label])
        for cut in cuts:
            cost = displacement_cost(
                DisplacementQuery(ranking=ranking_t, flagged=flagged, subset_k=cut)
            )
            rows.append((label, cut, cost))
            if cut not in minima or cost < minima[cut]:
                minima[cut] = cost
    return DisplacementProfile(
        rows=tuple(rows), minima=tuple(sorted(minima.items()))
    )
