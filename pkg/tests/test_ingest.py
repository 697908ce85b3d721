import pytest

from rankmerge import (
    MissingColumnError,
    Provider,
    parse_alexa_umbrella_csv,
    parse_majestic_csv,
    parse_quantcast,
)
from rankmerge.ingest import DROP_BAD_RANK, DROP_DUPLICATE, DROP_HIDDEN, DROP_MALFORMED
from rankmerge.snapshots import canonical_entry_text
from tests.conftest import day


class TestAlexaUmbrella:
    def test_clean_file(self, rules):
        snapshot, report = parse_alexa_umbrella_csv(
            "1,google.com\n2,youtube.com\n", Provider.ALEXA, day(0), rules
        )
        assert snapshot.names() == ["google.com", "youtube.com"]
        assert [e.rank for e in snapshot.entries] == [1, 2]
        assert (report.accepted, report.dropped_total) == (2, 0)

    def test_rank_gap_densified_and_reported(self, rules):
        snapshot, report = parse_alexa_umbrella_csv(
            "1,google.com\n3,x.com\n", Provider.ALEXA, day(0), rules
        )
        assert [e.rank for e in snapshot.entries] == [1, 2]
        assert report.rank_gaps == 1

    def test_bad_rank_dropped(self, rules):
        snapshot, report = parse_alexa_umbrella_csv(
            "a,google.com\n", Provider.ALEXA, day(0), rules
        )
        assert len(snapshot) == 0
        assert report.accepted == 0
        assert report.dropped == {DROP_BAD_RANK: 1}

    def test_malformed_and_duplicate_accounting(self, rules):
        data = "1,google.com\n2,bad domain.com\n3,google.com\n4,ok.net\n"
        snapshot, report = parse_alexa_umbrella_csv(data, Provider.UMBRELLA, day(0), rules)
        assert snapshot.names() == ["google.com", "ok.net"]
        assert report.dropped == {DROP_MALFORMED: 1, DROP_DUPLICATE: 1}
        assert report.accepted + report.dropped_total == 4

    def test_umbrella_invalid_but_wellformed_names_kept(self, rules):
        data = "1,google.conm\n2,foo.ec2.internal\n"
        snapshot, report = parse_alexa_umbrella_csv(data, Provider.UMBRELLA, day(0), rules)
        assert snapshot.names() == ["google.conm", "foo.ec2.internal"]
        assert report.dropped_total == 0


MAJESTIC_MINIMAL = "GlobalRank,Domain\n1,google.com\n2,facebook.com\n3,youtube.com\n"
MAJESTIC_FULL = (
    "GlobalRank,TldRank,Domain,TLD,RefSubNets,RefIPs\n"
    "1,1,google.com,com,500000,3000000\n"
    "2,2,facebook.com,com,490000,2900000\n"
    "3,3,youtube.com,com,480000,2800000\n"
)


class TestMajestic:
    def test_uses_named_columns_only(self, rules):
        minimal, _ = parse_majestic_csv(MAJESTIC_MINIMAL, day(0), rules)
        full, _ = parse_majestic_csv(MAJESTIC_FULL, day(0), rules)
        assert minimal.entries == full.entries

    def test_shuffled_columns_same_result(self, rules):
        shuffled = (
            "TLD,Domain,RefSubNets,GlobalRank\n"
            "com,google.com,500000,1\n"
            "com,facebook.com,490000,2\n"
            "com,youtube.com,480000,3\n"
        )
        expected, _ = parse_majestic_csv(MAJESTIC_MINIMAL, day(0), rules)
        got, _ = parse_majestic_csv(shuffled, day(0), rules)
        assert got.entries == expected.entries

    def test_missing_column_is_whole_file_error(self, rules):
        with pytest.raises(MissingColumnError, match="Domain"):
            parse_majestic_csv("GlobalRank,TldRank\n1,1\n", day(0), rules)

    def test_empty_file_is_error(self, rules):
        with pytest.raises(MissingColumnError):
            parse_majestic_csv("", day(0), rules)

    def test_bad_rank_row_dropped(self, rules):
        data = "GlobalRank,Domain\nten,google.com\n2,ok.com\n"
        snapshot, report = parse_majestic_csv(data, day(0), rules)
        assert snapshot.names() == ["ok.com"]
        assert report.dropped == {DROP_BAD_RANK: 1}


class TestQuantcast:
    def test_hidden_profiles_dropped_and_counted(self, rules):
        data = "1 google.com\n2 Hidden profile\n3 imdb.com\n"
        snapshot, report = parse_quantcast(data, day(0), rules)
        assert snapshot.names() == ["google.com", "imdb.com"]
        assert [e.rank for e in snapshot.entries] == [1, 2]
        assert report.dropped[DROP_HIDDEN] == 1

    def test_all_hidden_gives_empty_snapshot(self, rules):
        data = "1 Hidden profile\n2 Hidden profile\n"
        snapshot, report = parse_quantcast(data, day(0), rules)
        assert len(snapshot) == 0
        assert report.accepted == 0
        assert report.dropped == {DROP_HIDDEN: 2}

    def test_comments_skipped(self, rules):
        data = "# Quantcast Top Sites\n1 google.com\n"
        snapshot, report = parse_quantcast(data, day(0), rules)
        assert snapshot.names() == ["google.com"]
        assert report.accepted == 1

    def test_twenty_line_mixed_fixture(self, rules):
        # Hand-parsed expectation: hidden entries vanish, the remainder
        # keeps file order with fresh dense ranks, one bad rank drops.
        lines = []
        expected = []
        for i in range(1, 21):
            if i % 5 == 0:
                lines.append(f"{i} Hidden profile")
            elif i == 7:
                lines.append("seven q7.example")
            else:
                lines.append(f"{i} q{i}.example")
                expected.append(f"q{i}.example")
        snapshot, report = parse_quantcast("\n".join(lines), day(0), rules)
        assert snapshot.names() == expected
        assert [e.rank for e in snapshot.entries] == list(range(1, len(expected) + 1))
        assert report.accepted == 15
        assert report.dropped == {DROP_HIDDEN: 4, DROP_BAD_RANK: 1}
        assert report.accepted + report.dropped_total == 20


def test_roundtrip_parse_serialize_parse(rules):
    fixtures = [
        ("1,google.com\n2,youtube.com\n3,en.wikipedia.org\n", Provider.ALEXA),
        ("5,a.com\n9,b.net\n12,c.org\n", Provider.UMBRELLA),
    ]
    for data, provider in fixtures:
        first, _ = parse_alexa_umbrella_csv(data, provider, day(0), rules)
        canonical = canonical_entry_text(first.entries) + "\n"
        second, _ = parse_alexa_umbrella_csv(canonical, provider, day(0), rules)
        assert second.entries == first.entries
        assert second.digest == first.digest
