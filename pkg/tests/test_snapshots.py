import hashlib

import pytest
from hypothesis import given, strategies as st

from rankmerge import InvalidSnapshotError, Provider, ProviderSnapshot, snapshot_digest
from rankmerge.snapshots import RankedEntry
from tests.conftest import day


def test_digest_is_deterministic(mk):
    entries = tuple(RankedEntry(i + 1, mk(n)) for i, n in enumerate(["a.com", "b.com"]))
    assert snapshot_digest(entries) == snapshot_digest(entries)


def test_digest_changes_with_content(mk):
    a = (RankedEntry(1, mk("a.com")), RankedEntry(2, mk("b.com")))
    b = (RankedEntry(1, mk("a.com")), RankedEntry(2, mk("c.com")))
    assert snapshot_digest(a) != snapshot_digest(b)


def test_empty_sequence_hashes_empty_string():
    assert snapshot_digest(()) == hashlib.sha256(b"").hexdigest()


def test_digest_is_order_sensitive(mk):
    forward = (RankedEntry(1, mk("a.com")), RankedEntry(2, mk("b.com")))
    swapped = (RankedEntry(1, mk("b.com")), RankedEntry(2, mk("a.com")))
    assert snapshot_digest(forward) != snapshot_digest(swapped)


@given(st.lists(st.sampled_from("abcdef"), min_size=2, max_size=6, unique=True))
def test_digest_detects_any_adjacent_swap(mk, letters):
    names = [f"{c}.com" for c in letters]
    records = [mk(n) for n in names]
    base = tuple(RankedEntry(i + 1, r) for i, r in enumerate(records))
    for i in range(len(records) - 1):
        swapped = list(records)
        swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
        other = tuple(RankedEntry(j + 1, r) for j, r in enumerate(swapped))
        assert snapshot_digest(other) != snapshot_digest(base)


def test_snapshot_validates_dense_ranks(mk):
    with pytest.raises(InvalidSnapshotError):
        ProviderSnapshot(
            Provider.ALEXA,
            day(0),
            (RankedEntry(1, mk("a.com")), RankedEntry(3, mk("b.com"))),
        )


def test_snapshot_rejects_duplicates(mk):
    with pytest.raises(InvalidSnapshotError):
        ProviderSnapshot(
            Provider.ALEXA,
            day(0),
            (RankedEntry(1, mk("a.com")), RankedEntry(2, mk("a.com"))),
        )


def test_from_records_assigns_ranks(snap):
    snapshot = snap(Provider.MAJESTIC, day(0), ["x.com", "y.com", "z.com"])
    assert [e.rank for e in snapshot.entries] == [1, 2, 3]
    assert snapshot.names() == ["x.com", "y.com", "z.com"]
    assert snapshot.digest == snapshot_digest(snapshot.entries)
