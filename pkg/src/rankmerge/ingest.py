"""Parsers for the four provider list formats.

Every parser normalizes to the same snapshot shape: entries in file
order with ranks re-densified to 1..n, so downstream scoring sees a
single rank semantics regardless of provider quirks (hidden profiles,
rank gaps, extra columns). Drops are never silent; the ParseReport
accounts for every content line.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass, field

from .domains import DomainRecord, parse_domain
from .errors import MalformedDomainError, MissingColumnError
from .psl import PublicSuffixRules
from .snapshots import Provider, ProviderSnapshot, RankedEntry

DROP_MALFORMED = "malformed-domain"
DROP_HIDDEN = "hidden-profile"
DROP_DUPLICATE = "duplicate"
DROP_BAD_RANK = "bad-rank"

# Quantcast marks ranked-but-anonymous sites with this exact text in the
# domain field; other spellings are treated as (malformed) domains.
_HIDDEN_MARKER = "Hidden profile"


@dataclass
class ParseReport:
    """Accounting for one parsed file.

    accepted + sum(dropped.values()) equals the number of content lines
    (blank, header and comment lines excluded). rank_gaps counts entries
    whose published rank differed from the densified one.
    """

    provider: Provider
    date: dt.date
    accepted: int = 0
    dropped: dict[str, int] = field(default_factory=dict)
    rank_gaps: int = 0

    def drop(self, reason: str) -> None:
        self.dropped[reason] = self.dropped.get(reason, 0) + 1

    @property
    def dropped_total(self) -> int:
        return sum(self.dropped.values())

    def summary(self) -> str:
        parts = [f"accepted={self.accepted}", f"dropped={self.dropped_total}"]
        for reason in sorted(self.dropped):
            parts.append(f"{reason}={self.dropped[reason]}")
        if self.rank_gaps:
            parts.append(f"rank_gaps={self.rank_gaps}")
        return " ".join(parts)


def _as_text(data: bytes | str) -> str:
    if isinstance(data, bytes):
        return data.decode("utf-8", errors="replace")
    return data


def _build(
    rows: list[tuple[str, str]],
    provider: Provider,
    date: dt.date,
    rules: PublicSuffixRules,
    report: ParseReport,
) -> ProviderSnapshot:
    """Validate (rank_token, domain) rows and densify into a snapshot."""
    records: list[DomainRecord] = []
    published: list[int] = []
    seen: set[str] = set()
    for rank_token, raw_domain in rows:
        try:
            rank = int(rank_token)
        except ValueError:
            report.drop(DROP_BAD_RANK)
            continue
        try:
            record = parse_domain(raw_domain, rules)
        except MalformedDomainError:
            report.drop(DROP_MALFORMED)
            continue
        if record.name in seen:
            report.drop(DROP_DUPLICATE)
            continue
        seen.add(record.name)
        records.append(record)
        published.append(rank)
    report.accepted = len(records)
    report.rank_gaps = sum(1 for i, r in enumerate(published) if r != i + 1)
    entries = tuple(RankedEntry(i + 1, rec) for i, rec in enumerate(records))
    return ProviderSnapshot(provider=provider, date=date, entries=entries)


def parse_alexa_umbrella_csv(
    data: bytes | str,
    provider: Provider,
    date: dt.date,
    rules: PublicSuffixRules,
) -> tuple[ProviderSnapshot, ParseReport]:
    """Parse the headerless "rank,domain" format used by Alexa and Umbrella."""
    report = ParseReport(provider=provider, date=date)
    rows: list[tuple[str, str]] = []
    for line in _as_text(data).splitlines():
        line = line.strip()
        if not line:
            continue
        rank_token, _, domain = line.partition(",")
        rows.append((rank_token.strip(), domain.strip()))
    return _build(rows, provider, date, rules, report), report


def parse_majestic_csv(
    data: bytes | str,
    date: dt.date,
    rules: PublicSuffixRules,
) -> tuple[ProviderSnapshot, ParseReport]:
    """Parse the headered Majestic CSV, using GlobalRank and Domain only."""
    report = ParseReport(provider=Provider.MAJESTIC, date=date)
    reader = csv.reader(io.StringIO(_as_text(data)))
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumnError("empty file: no header row") from None
    missing = [col for col in ("GlobalRank", "Domain") if col not in header]
    if missing:
        raise MissingColumnError(f"missing required column(s): {', '.join(missing)}")
    rank_idx = header.index("GlobalRank")
    domain_idx = header.index("Domain")
    width = max(rank_idx, domain_idx)
    rows: list[tuple[str, str]] = []
    for row in reader:
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) <= width:
            report.drop(DROP_BAD_RANK)
            continue
        rows.append((row[rank_idx].strip(), row[domain_idx].strip()))
    return _build(rows, Provider.MAJESTIC, date, rules, report), report


def parse_quantcast(
    data: bytes | str,
    date: dt.date,
    rules: PublicSuffixRules,
) -> tuple[ProviderSnapshot, ParseReport]:
    """Parse the whitespace-separated Quantcast format.

    Comment/header lines start with '#'. Hidden-profile entries (sites
    ranked with the domain withheld) are dropped and counted; the rest
    are re-ranked densely preserving file order.
    """
    report = ParseReport(provider=Provider.QUANTCAST, date=date)
    rows: list[tuple[str, str]] = []
    hidden = 0
    for line in _as_text(data).splitlines():
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split(None, 1)
        rank_token = parts[0]
        domain = parts[1].strip() if len(parts) > 1 else ""
        if domain == _HIDDEN_MARKER:
            hidden += 1
            continue
        rows.append((rank_token, domain))
    snapshot = _build(rows, Provider.QUANTCAST, date, rules, report)
    if hidden:
        report.dropped[DROP_HIDDEN] = hidden
    return snapshot, report
