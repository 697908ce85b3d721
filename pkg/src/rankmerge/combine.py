"""Combining provider snapshots into a scored, filtered ranking.

Scores are positional: Borda (linearly decreasing points) or Dowdall
(reciprocal-rank points, which matches the Zipf-like shape of web
traffic). Ranks of shorter-than-reference lists are proportionally
stretched to the reference length so every provider-day contributes on
the same score range. Per-domain scores are summed over every
(provider, day) snapshot in the window; a missing snapshot simply
contributes nothing. All operations are pure and deterministic: ties
break on ascending domain name, and summation order is fixed.
"""

from __future__ import annotations

import datetime as dt
import hashlib
from dataclasses import dataclass, field, replace
from enum import Enum
from fnmatch import fnmatchcase
from typing import Callable, Iterable, Mapping, Sequence

from .domains import DomainRecord
from .errors import ConflictError, EmptyInputError, MissingColumnError
from .snapshots import Provider, ProviderSnapshot, RankedEntry

DEFAULT_N_REF = 1_000_000


class Method(str, Enum):
    BORDA = "borda"
    DOWDALL = "dowdall"

    def __str__(self) -> str:
        return self.value


def score_borda(rank: int, list_length: int, n_ref: int) -> float:
    """Linearly decreasing points after rank rescaling.

    The rescaled rank r' = rank * n_ref / list_length stretches a short
    list onto the reference range; the score is n_ref - r', so a
    full-length list yields n_ref - 1, ..., 1, 0 and absent domains
    (implicit score 0) are never beaten by listed ones.
    """
    _check_rank(rank, list_length, n_ref)
    return max(0.0, n_ref - rank * n_ref / list_length)


def score_dowdall(rank: int, list_length: int, n_ref: int) -> float:
    """Reciprocal-rank points after the same rescaling: 1, 1/2, ..., 1/n_ref."""
    _check_rank(rank, list_length, n_ref)
    return 1.0 / (rank * n_ref / list_length)


def _check_rank(rank: int, list_length: int, n_ref: int) -> None:
    if not 1 <= rank <= list_length <= n_ref:
        raise ValueError(
            f"need 1 <= rank <= list_length <= n_ref, got {rank}, {list_length}, {n_ref}"
        )


_SCORERS: dict[Method, Callable[[int, int, int], float]] = {
    Method.BORDA: score_borda,
    Method.DOWDALL: score_dowdall,
}


def scorer(method: Method) -> Callable[[int, int, int], float]:
    return _SCORERS[method]


@dataclass(frozen=True)
class HealthFilter:
    """Thresholds applied against crawl results.

    Domains missing from the crawl are kept or dropped per
    missing_policy; the default keeps them so a partial crawl cannot
    silently empty a list.
    """

    require_reachable: bool = True
    statuses: frozenset[int] | None = frozenset({200})
    min_body_bytes: int | None = 512
    missing_policy: str = "keep"

    def __post_init__(self) -> None:
        if self.missing_policy not in ("keep", "drop"):
            raise ValueError(f"missing_policy must be keep or drop, got {self.missing_policy!r}")
        if self.statuses is not None:
            object.__setattr__(self, "statuses", frozenset(self.statuses))

    def canonical(self) -> str:
        status = (
            "any" if self.statuses is None else "|".join(map(str, sorted(self.statuses)))
        )
        size = "any" if self.min_body_bytes is None else str(self.min_body_bytes)
        return (
            f"reachable={str(self.require_reachable).lower()};status={status};"
            f"min_bytes={size};missing={self.missing_policy}"
        )


@dataclass(frozen=True)
class CrawlResult:
    """Outcome of fetching one domain's root page."""

    domain: str
    reachable: bool
    status: int | None = None
    body_bytes: int | None = None

    def __post_init__(self) -> None:
        if self.status is not None and not self.reachable:
            raise ValueError(f"{self.domain}: status present implies reachable")


@dataclass(frozen=True)
class FlagSet:
    """A labeled set of domain names pinned by the digest of its source."""

    domains: frozenset[str]
    label: str
    source_digest: str

    @classmethod
    def from_bytes(cls, data: bytes, label: str) -> "FlagSet":
        names = set()
        for line in data.decode("utf-8", errors="replace").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            names.add(line.lower())
        return cls(
            domains=frozenset(names),
            label=label,
            source_digest=hashlib.sha256(data).hexdigest(),
        )

    @property
    def reference(self) -> str:
        return f"{self.label}:{self.source_digest[:12]}"


@dataclass(frozen=True)
class CombineConfig:
    """Full recipe for one combined list."""

    providers: frozenset[Provider]
    window_start: dt.date
    window_end: dt.date
    method: Method = Method.DOWDALL
    n_ref: int = DEFAULT_N_REF
    input_truncation: int | tuple[tuple[Provider, int], ...] | None = None
    umbrella_pld_mode: bool = False
    min_providers: int = 1
    min_days: int = 1
    tld_include: frozenset[str] | None = None
    tld_exclude: frozenset[str] | None = None
    pld_dedupe_across_tlds: bool = False
    subdomain_pattern: str | None = None
    health_filter: HealthFilter | None = None
    benign_exclude: str | None = None
    popular_intersect: str | None = None
    output_truncation: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "providers", frozenset(Provider(p) for p in self.providers))
        if not self.providers:
            raise ValueError("providers must be non-empty")
        if self.window_start > self.window_end:
            raise ValueError("window is empty")
        if isinstance(self.input_truncation, Mapping):
            object.__setattr__(
                self,
                "input_truncation",
                tuple(sorted((Provider(p), int(n)) for p, n in self.input_truncation.items())),
            )
        if isinstance(self.input_truncation, int) and self.input_truncation < 1:
            raise ValueError("input_truncation must be positive")
        if isinstance(self.input_truncation, tuple):
            if any(n < 1 for _, n in self.input_truncation):
                raise ValueError("input_truncation must be positive")
        if self.n_ref < 1:
            raise ValueError("n_ref must be positive")
        if self.min_providers < 1 or self.min_days < 1:
            raise ValueError("min_providers and min_days must be >= 1")
        if self.tld_include is not None:
            object.__setattr__(self, "tld_include", frozenset(self.tld_include))
        if self.tld_exclude is not None:
            object.__setattr__(self, "tld_exclude", frozenset(self.tld_exclude))
        if self.tld_include and self.tld_exclude and self.tld_include & self.tld_exclude:
            raise ValueError("tld_include and tld_exclude must be disjoint")
        if self.output_truncation is not None and self.output_truncation < 1:
            raise ValueError("output_truncation must be positive")
        object.__setattr__(self, "method", Method(self.method))

    @property
    def window_length(self) -> int:
        return (self.window_end - self.window_start).days + 1

    def window_dates(self) -> list[dt.date]:
        return [
            self.window_start + dt.timedelta(days=i) for i in range(self.window_length)
        ]

    def truncation_for(self, provider: Provider) -> int | None:
        if self.input_truncation is None:
            return None
        if isinstance(self.input_truncation, int):
            return self.input_truncation
        for p, n in self.input_truncation:
            if p is provider:
                return n
        return None

    def canonical_lines(self) -> list[str]:
        """Fixed-order "config.key: value" lines; hashed into the list id."""
        if self.input_truncation is None:
            trunc = "-"
        elif isinstance(self.input_truncation, int):
            trunc = str(self.input_truncation)
        else:
            trunc = ";".join(f"{p.value}={n}" for p, n in self.input_truncation)

        def names(s: frozenset[str] | None) -> str:
            return ",".join(sorted(s)) if s else "-"

        return [
            f"config.providers: {','.join(sorted(p.value for p in self.providers))}",
            f"config.window: {self.window_start.isoformat()}..{self.window_end.isoformat()}",
            f"config.method: {self.method.value}",
            f"config.n_ref: {self.n_ref}",
            f"config.input_truncation: {trunc}",
            f"config.umbrella_pld_mode: {str(self.umbrella_pld_mode).lower()}",
            f"config.min_providers: {self.min_providers}",
            f"config.min_days: {self.min_days}",
            f"config.tld_include: {names(self.tld_include)}",
            f"config.tld_exclude: {names(self.tld_exclude)}",
            f"config.pld_dedupe_across_tlds: {str(self.pld_dedupe_across_tlds).lower()}",
            f"config.subdomain_pattern: {self.subdomain_pattern or '-'}",
            f"config.health_filter: {self.health_filter.canonical() if self.health_filter else '-'}",
            f"config.benign_exclude: {self.benign_exclude or '-'}",
            f"config.popular_intersect: {self.popular_intersect or '-'}",
            f"config.output_truncation: {self.output_truncation if self.output_truncation else '-'}",
        ]


@dataclass(frozen=True, slots=True)
class ScoredDomain:
    domain: DomainRecord
    score: float
    providers_seen: frozenset[Provider]
    days_seen: int


@dataclass(frozen=True)
class CombinedList:
    """Scored, ordered output with provenance.

    Entries are sorted by score descending with ties broken by ascending
    domain name; the 1-based rank of an entry is its position + 1.
    """

    config: CombineConfig
    input_digests: tuple[tuple[Provider, dt.date, str], ...]
    entries: tuple[ScoredDomain, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def names(self) -> list[str]:
        return [e.domain.name for e in self.entries]

    def to_list_csv(self) -> str:
        """Plain "rank,domain" lines, compatible with the provider CSV shape."""
        return "".join(
            f"{i + 1},{e.domain.name}\n" for i, e in enumerate(self.entries)
        )

    def to_extended_csv(self) -> str:
        lines = ["rank,domain,score,providers_seen,days_seen\n"]
        for i, e in enumerate(self.entries):
            providers = "|".join(sorted(p.value for p in e.providers_seen))
            lines.append(
                f"{i + 1},{e.domain.name},{e.score!r},{providers},{e.days_seen}\n"
            )
        return "".join(lines)


def _sorted_snapshots(snapshots: Iterable[ProviderSnapshot]) -> list[ProviderSnapshot]:
    return sorted(snapshots, key=lambda s: (s.provider.value, s.date))


def combine(
    snapshots: Iterable[ProviderSnapshot],
    config: CombineConfig,
    *,
    truncate_output: bool = True,
) -> CombinedList:
    """Sum positional scores across snapshots and order the result.

    Every snapshot must fall inside config.providers x window, one per
    (provider, date). Per-provider input truncation (and truncation to
    n_ref, which the score range requires) is applied before scoring.
    The min_providers / min_days count filters run before output
    truncation; pipelines that apply further filters pass
    truncate_output=False and truncate at the very end.
    """
    snaps = _sorted_snapshots(snapshots)
    if not snaps:
        raise EmptyInputError("no snapshots to combine")
    seen_keys: set[tuple[Provider, dt.date]] = set()
    for s in snaps:
        key = (s.provider, s.date)
        if key in seen_keys:
            raise ConflictError(
                f"duplicate snapshot for {s.provider.value}/{s.date.isoformat()}"
            )
        seen_keys.add(key)
        if s.provider not in config.providers:
            raise ValueError(f"snapshot provider {s.provider.value} not in config")
        if not config.window_start <= s.date <= config.window_end:
            raise ValueError(
                f"snapshot date {s.date.isoformat()} outside window "
                f"{config.window_start.isoformat()}..{config.window_end.isoformat()}"
            )

    score_fn = scorer(config.method)
    n_ref = config.n_ref
    scores: dict[str, float] = {}
    providers_seen: dict[str, set[Provider]] = {}
    days_seen: dict[str, set[dt.date]] = {}
    records: dict[str, DomainRecord] = {}
    tables: dict[int, list[float]] = {}  # same-length lists share a score table

    for snap in snaps:
        limit = len(snap.entries)
        cut = config.truncation_for(snap.provider)
        if cut is not None:
            limit = min(limit, cut)
        limit = min(limit, n_ref)
        if limit == 0:
            continue
        table = tables.get(limit)
        if table is None:
            table = [score_fn(r, limit, n_ref) for r in range(1, limit + 1)]
            tables[limit] = table
        provider = snap.provider
        date = snap.date
        for idx in range(limit):
            entry = snap.entries[idx]
            name = entry.domain.name
            if name in scores:
                scores[name] += table[idx]
                providers_seen[name].add(provider)
                days_seen[name].add(date)
            else:
                scores[name] = table[idx]
                providers_seen[name] = {provider}
                days_seen[name] = {date}
                records[name] = entry.domain

    min_providers = config.min_providers
    min_days = config.min_days
    entries = [
        ScoredDomain(
            domain=records[name],
            score=scores[name],
            providers_seen=frozenset(providers_seen[name]),
            days_seen=len(days_seen[name]),
        )
        for name in scores
        if len(providers_seen[name]) >= min_providers and len(days_seen[name]) >= min_days
    ]
    entries.sort(key=lambda e: (-e.score, e.domain.name))

    result = CombinedList(
        config=config,
        input_digests=tuple((s.provider, s.date, s.digest) for s in snaps),
        entries=tuple(entries),
    )
    if truncate_output:
        result = apply_output_truncation(result)
    return result


def umbrella_to_pld(snapshot: ProviderSnapshot) -> ProviderSnapshot:
    """Collapse a subdomain-bearing snapshot to pay-level domains.

    Each PLD keeps the best (minimum) rank among its names; the result
    is ordered by that best rank and re-densified. Entries whose name is
    itself a public suffix pass through unchanged.
    """
    if snapshot.provider is not Provider.UMBRELLA:
        raise ValueError(f"expected an umbrella snapshot, got {snapshot.provider.value}")
    kept: list[DomainRecord] = []
    seen: set[str] = set()
    for entry in snapshot.entries:
        rec = entry.domain
        if rec.pld in seen:
            continue
        seen.add(rec.pld)
        if rec.name == rec.pld:
            kept.append(rec)
        else:
            kept.append(DomainRecord(name=rec.pld, pld=rec.pld, tld=rec.tld, is_pld=True))
    return ProviderSnapshot(
        provider=snapshot.provider,
        date=snapshot.date,
        entries=tuple(RankedEntry(i + 1, rec) for i, rec in enumerate(kept)),
    )


def _keep(lst: CombinedList, predicate: Callable[[ScoredDomain], bool]) -> CombinedList:
    return replace(lst, entries=tuple(e for e in lst.entries if predicate(e)))


def apply_domain_filters(lst: CombinedList, config: CombineConfig) -> CombinedList:
    """TLD include/exclude, subdomain selection and cross-TLD PLD dedupe.

    Applied in that order; relative order of surviving entries (and so
    their re-densified ranks) is preserved.
    """
    if config.tld_include is not None:
        include = config.tld_include
        lst = _keep(lst, lambda e: e.domain.tld in include)
    if config.tld_exclude is not None:
        exclude = config.tld_exclude
        lst = _keep(lst, lambda e: e.domain.tld not in exclude)
    if config.subdomain_pattern is not None:
        pattern = config.subdomain_pattern
        label_glob = pattern[:-2] if pattern.endswith(".*") else pattern
        lst = _keep(
            lst, lambda e: fnmatchcase(e.domain.name.split(".", 1)[0], label_glob)
        )
    if config.pld_dedupe_across_tlds:
        seen_stems: set[str] = set()
        kept: list[ScoredDomain] = []
        for e in lst.entries:  # best-ranked member of each stem group comes first
            stem = _pld_stem(e.domain)
            if stem in seen_stems:
                continue
            seen_stems.add(stem)
            kept.append(e)
        lst = replace(lst, entries=tuple(kept))
    return lst


def _pld_stem(record: DomainRecord) -> str:
    """The PLD with its TLD removed: google.com and google.de -> "google"."""
    suffix = "." + record.tld
    if record.pld != record.tld and record.pld.endswith(suffix):
        return record.pld[: -len(suffix)]
    return record.pld


def apply_health_filters(
    lst: CombinedList,
    crawl: Mapping[str, CrawlResult] | Iterable[CrawlResult],
    config: CombineConfig,
) -> CombinedList:
    """Keep domains whose crawl result passes the configured thresholds."""
    hf = config.health_filter
    if hf is None:
        return lst
    results = crawl if isinstance(crawl, Mapping) else {c.domain: c for c in crawl}

    def passes(e: ScoredDomain) -> bool:
        result = results.get(e.domain.name)
        if result is None:
            return hf.missing_policy == "keep"
        if hf.require_reachable and not result.reachable:
            return False
        if hf.statuses is not None and result.status not in hf.statuses:
            return False
        if hf.min_body_bytes is not None and (
            result.body_bytes is None or result.body_bytes < hf.min_body_bytes
        ):
            return False
        return True

    return _keep(lst, passes)


def apply_set_filters(
    lst: CombinedList,
    benign_exclude: FlagSet | None = None,
    popular_intersect: FlagSet | None = None,
) -> CombinedList:
    """Remove flagged domains; optionally keep only popular destinations.

    The popular-destination intersection matches on the full name or its
    PLD, so subdomains of a popular PLD survive.
    """
    if benign_exclude is not None:
        flagged = benign_exclude.domains
        lst = _keep(lst, lambda e: e.domain.name not in flagged)
    if popular_intersect is not None:
        popular = popular_intersect.domains
        lst = _keep(
            lst, lambda e: e.domain.name in popular or e.domain.pld in popular
        )
    return lst


def apply_output_truncation(lst: CombinedList) -> CombinedList:
    if lst.config.output_truncation is None:
        return lst
    return replace(lst, entries=lst.entries[: lst.config.output_truncation])


def build_list(
    snapshots: Iterable[ProviderSnapshot],
    config: CombineConfig,
    *,
    crawl: Mapping[str, CrawlResult] | Iterable[CrawlResult] | None = None,
    benign: FlagSet | None = None,
    popular: FlagSet | None = None,
) -> CombinedList:
    """Run the whole pipeline: combine, filter stages, then truncation last."""
    if config.health_filter is not None and crawl is None:
        raise ValueError("config has a health filter but no crawl results were given")
    snaps = list(snapshots)
    if config.umbrella_pld_mode:
        snaps = [
            umbrella_to_pld(s) if s.provider is Provider.UMBRELLA else s for s in snaps
        ]
    lst = combine(snaps, config, truncate_output=False)
    lst = apply_domain_filters(lst, config)
    if crawl is not None:
        lst = apply_health_filters(lst, crawl, config)
    lst = apply_set_filters(lst, benign_exclude=benign, popular_intersect=popular)
    return apply_output_truncation(lst)


def load_crawl_csv(data: bytes | str) -> dict[str, CrawlResult]:
    """Read "domain,reachable,status,body_bytes" rows (header required)."""
    text = data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split(",")[0].strip().lower() != "domain":
        raise MissingColumnError(
            "crawl file must start with a domain,reachable,status,body_bytes header"
        )
    results: dict[str, CrawlResult] = {}
    for ln in lines[1:]:
        domain, reachable_s, status_s, bytes_s = (part.strip() for part in ln.split(","))
        reachable = reachable_s.lower() in ("true", "1", "yes")
        status = int(status_s) if status_s else None
        body = int(bytes_s) if bytes_s else None
        results[domain.lower()] = CrawlResult(
            domain=domain.lower(), reachable=reachable, status=status, body_bytes=body
        )
    return results
