"""Dated on-disk archive of provider snapshots.

Layout: root/<provider>/<YYYY-MM-DD>.csv plus a single index file with
one "provider,date,digest,count" record per line. Many readers may run
concurrently; writes take a lock file and publish atomically via
write-temp-then-rename, so a reader never observes a partial file.
"""

from __future__ import annotations

import datetime as dt
import os
from dataclasses import dataclass
from pathlib import Path

from filelock import FileLock

from .domains import parse_domain
from .errors import ConflictError, CorruptDataError, NotFoundError
from .psl import PublicSuffixRules
from .snapshots import Provider, ProviderSnapshot, RankedEntry, canonical_entry_text

_INDEX_NAME = "index.csv"
_LOCK_NAME = ".writer.lock"


@dataclass(frozen=True)
class IndexEntry:
    provider: Provider
    date: dt.date
    digest: str
    count: int


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


class ArchiveStore:
    def __init__(self, root: str | Path, rules: PublicSuffixRules):
        self.root = Path(root)
        self.rules = rules
        self.root.mkdir(parents=True, exist_ok=True)

    # -- index ---------------------------------------------------------

    @property
    def _index_path(self) -> Path:
        return self.root / _INDEX_NAME

    def index(self) -> dict[tuple[Provider, dt.date], IndexEntry]:
        entries: dict[tuple[Provider, dt.date], IndexEntry] = {}
        if not self._index_path.exists():
            return entries
        for line in self._index_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            provider_s, date_s, digest, count_s = line.split(",")
            entry = IndexEntry(
                provider=Provider(provider_s),
                date=dt.date.fromisoformat(date_s),
                digest=digest,
                count=int(count_s),
            )
            entries[(entry.provider, entry.date)] = entry
        return entries

    def _write_index(self, entries: dict[tuple[Provider, dt.date], IndexEntry]) -> None:
        lines = [
            f"{e.provider.value},{e.date.isoformat()},{e.digest},{e.count}"
            for e in sorted(entries.values(), key=lambda e: (e.provider.value, e.date))
        ]
        _atomic_write(self._index_path, ("\n".join(lines) + "\n").encode("utf-8"))

    def snapshot_path(self, provider: Provider, date: dt.date) -> Path:
        return self.root / provider.value / f"{date.isoformat()}.csv"

    # -- operations ----------------------------------------------------

    def put(self, snapshot: ProviderSnapshot, overwrite: bool = False) -> IndexEntry:
        """Store a snapshot; idempotent for identical content.

        Storing a different snapshot under an existing (provider, date)
        raises ConflictError unless overwrite is set.
        """
        with FileLock(str(self.root / _LOCK_NAME)):
            entries = self.index()
            key = (snapshot.provider, snapshot.date)
            existing = entries.get(key)
            if existing is not None and existing.digest == snapshot.digest:
                return existing
            if existing is not None and not overwrite:
                raise ConflictError(
                    f"{snapshot.provider.value}/{snapshot.date.isoformat()} already "
                    f"archived with digest {existing.digest[:12]}; pass overwrite to replace"
                )
            path = self.snapshot_path(snapshot.provider, snapshot.date)
            path.parent.mkdir(parents=True, exist_ok=True)
            _atomic_write(
                path, (canonical_entry_text(snapshot.entries) + "\n").encode("utf-8")
            )
            entry = IndexEntry(
                provider=snapshot.provider,
                date=snapshot.date,
                digest=snapshot.digest,
                count=len(snapshot.entries),
            )
            entries[key] = entry
            self._write_index(entries)
            return entry

    def get(self, provider: Provider, date: dt.date) -> ProviderSnapshot:
        """Load a snapshot, verifying its digest against the index."""
        entries = self.index()
        entry = entries.get((provider, date))
        if entry is None:
            raise NotFoundError(f"no snapshot for {provider.value}/{date.isoformat()}")
        path = self.snapshot_path(provider, date)
        if not path.exists():
            raise CorruptDataError(
                f"indexed file missing: {path}", mismatches=("file",)
            )
        snapshot = self._read_snapshot(path, provider, date)
        if snapshot.digest != entry.digest:
            raise CorruptDataError(
                f"digest mismatch for {provider.value}/{date.isoformat()}",
                mismatches=("digest",),
            )
        return snapshot

    def _read_snapshot(
        self, path: Path, provider: Provider, date: dt.date
    ) -> ProviderSnapshot:
        records: list[RankedEntry] = []
        for lineno, line in enumerate(
            path.read_text(encoding="utf-8").splitlines(), start=1
        ):
            if not line.strip():
                continue
            rank_s, _, name = line.partition(",")
            try:
                rank = int(rank_s)
            except ValueError:
                raise CorruptDataError(
                    f"{path}:{lineno}: bad rank {rank_s!r}", mismatches=("file",)
                ) from None
            records.append(RankedEntry(rank, parse_domain(name, self.rules)))
        return ProviderSnapshot(provider=provider, date=date, entries=tuple(records))

    def verify(self) -> list[str]:
        """Re-hash every archived file; returns problems (empty when clean)."""
        problems = []
        for (provider, date), entry in sorted(
            self.index().items(), key=lambda kv: (kv[0][0].value, kv[0][1])
        ):
            try:
                self.get(provider, date)
            except (CorruptDataError, NotFoundError) as exc:
                problems.append(f"{provider.value}/{date.isoformat()}: {exc}")
        return problems
