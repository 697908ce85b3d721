"""Independent brute-force oracles used by the test suite.

These deliberately avoid the library's data paths: scores are
materialized into one big (domain, provider, day) table, overlaps are
recomputed from scratch at every depth, and displacement/threshold
results are checked by actually editing rankings and re-running.
"""

from __future__ import annotations

import datetime as dt

from rankmerge import CombineConfig, Method, Provider, ProviderSnapshot
from rankmerge.snapshots import RankedEntry


def combine_oracle(snapshots, config: CombineConfig):
    """Score-table reference for combine().

    Returns [(name, score, providers_seen, days_seen)] in final order.
    Per-domain sums run over cells sorted by (provider, date), the same
    associative order the implementation uses, so float results must be
    bit-identical.
    """
    table: dict[tuple[str, Provider, dt.date], float] = {}
    for snapshot in snapshots:
        limit = len(snapshot.entries)
        cut = config.truncation_for(snapshot.provider)
        if cut is not None and cut < limit:
            limit = cut
        if config.n_ref < limit:
            limit = config.n_ref
        for entry in snapshot.entries[:limit]:
            rescaled = entry.rank * config.n_ref / limit
            if config.method is Method.BORDA:
                cell = max(0.0, config.n_ref - rescaled)
            else:
                cell = 1.0 / rescaled
            table[(entry.domain.name, snapshot.provider, snapshot.date)] = cell

    by_name: dict[str, list[tuple[Provider, dt.date, float]]] = {}
    for (name, provider, date), cell in table.items():
        by_name.setdefault(name, []).append((provider, date, cell))

    rows = []
    for name, cells in by_name.items():
        cells.sort(key=lambda c: (c[0].value, c[1]))
        providers = frozenset(c[0] for c in cells)
        days = len({c[1] for c in cells})
        if len(providers) < config.min_providers or days < config.min_days:
            continue
        score = 0.0
        for _, _, cell in cells:
            score += cell
        rows.append((name, score, providers, days))
    rows.sort(key=lambda row: (-row[1], row[0]))
    if config.output_truncation is not None:
        rows = rows[: config.output_truncation]
    return rows


def rbo_direct(list_a, list_b, p: float, k: int | None = None) -> float:
    """Literal term-by-term evaluation with prefix sets rebuilt per depth."""
    a = list(list_a)
    b = list(list_b)
    if k is None:
        k = min(len(a), len(b))
    a = a[:k]
    b = b[:k]

    def overlap(depth: int) -> int:
        return len(set(a[:depth]) & set(b[:depth]))

    series = sum(overlap(d) / d * p**d for d in range(1, k + 1))
    return overlap(k) / k * p**k + (1 - p) / p * series


def insert_probe(
    snapshot: ProviderSnapshot, probe, rank: int
) -> ProviderSnapshot:
    """Force a domain to the given rank, keeping the list length fixed.

    Everything at or below the insertion point shifts down one and the
    last entry falls off, matching what a rank manipulation does to a
    fixed-size published list.
    """
    records = [e.domain for e in snapshot.entries]
    records.insert(rank - 1, probe)
    records = records[: len(snapshot.entries)]
    return ProviderSnapshot(
        provider=snapshot.provider,
        date=snapshot.date,
        entries=tuple(RankedEntry(i + 1, rec) for i, rec in enumerate(records)),
    )


def displacement_check(ranking, flagged, k: int, promoted: int) -> bool:
    """Simulate promoting `promoted` outside domains above the best flagged
    rank and report whether the top-k is then free of flagged domains."""
    top = list(ranking[:k])
    best = next((i for i, name in enumerate(top) if name in flagged), None)
    if best is None:
        return True
    fresh = [f"promoted-{i}.test" for i in range(promoted)]
    reordered = list(ranking)
    reordered[best:best] = fresh
    return not any(name in flagged for name in reordered[:k])
