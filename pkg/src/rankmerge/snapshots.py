"""Ranked-list value types shared by every other module."""

from __future__ import annotations

import datetime as dt
import hashlib
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .domains import DomainRecord
from .errors import InvalidSnapshotError


class Provider(str, Enum):
    ALEXA = "alexa"
    UMBRELLA = "umbrella"
    MAJESTIC = "majestic"
    QUANTCAST = "quantcast"

    def __str__(self) -> str:  # "alexa", not "Provider.ALEXA"
        return self.value


@dataclass(frozen=True, slots=True)
class RankedEntry:
    rank: int
    domain: DomainRecord


def canonical_entry_text(entries: Iterable[RankedEntry]) -> str:
    """Canonical serialization: "rank,name" lines joined by single newlines."""
    return "\n".join(f"{e.rank},{e.domain.name}" for e in entries)


def snapshot_digest(entries: Sequence[RankedEntry]) -> str:
    """Deterministic content hash of the canonical serialization.

    Order-sensitive by construction; the empty sequence hashes the empty
    string and is accepted.
    """
    return hashlib.sha256(canonical_entry_text(entries).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ProviderSnapshot:
    """One provider's ranked list for one download date.

    Ranks must be exactly 1..len(entries) with no duplicate domain names;
    the digest is computed from the canonical serialization at
    construction time.
    """

    provider: Provider
    date: dt.date
    entries: tuple[RankedEntry, ...]
    digest: str = field(init=False)

    def __post_init__(self) -> None:
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        seen: set[str] = set()
        for i, entry in enumerate(entries):
            if entry.rank != i + 1:
                raise InvalidSnapshotError(
                    f"rank {entry.rank} at position {i}: ranks must be dense from 1"
                )
            if entry.domain.name in seen:
                raise InvalidSnapshotError(f"duplicate domain {entry.domain.name!r}")
            seen.add(entry.domain.name)
        object.__setattr__(self, "digest", snapshot_digest(entries))

    def __len__(self) -> int:
        return len(self.entries)

    def names(self) -> list[str]:
        return [e.domain.name for e in self.entries]

    @classmethod
    def from_records(
        cls, provider: Provider, date: dt.date, records: Iterable[DomainRecord]
    ) -> "ProviderSnapshot":
        """Build a snapshot from domain records in rank order."""
        entries = tuple(RankedEntry(i + 1, r) for i, r in enumerate(records))
        return cls(provider=provider, date=date, entries=entries)
