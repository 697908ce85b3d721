import hashlib

import pytest

from rankmerge import PublicSuffixRules, default_rules
from tests.conftest import RULES_TEXT


def test_parses_rule_classes(rules):
    assert "com" in rules.exact
    assert "co.uk" in rules.exact
    assert "ck" in rules.wildcards
    assert "www.ck" in rules.exceptions


def test_comments_and_blank_lines_ignored():
    parsed = PublicSuffixRules.from_text("// header\n\ncom\n  \nnet // trailing\n")
    assert parsed.exact == frozenset({"com", "net"})


def test_source_digest_pins_the_file(rules):
    assert rules.source_digest == hashlib.sha256(RULES_TEXT.encode()).hexdigest()
    other = PublicSuffixRules.from_text(RULES_TEXT + "extra\n")
    assert other.source_digest != rules.source_digest


@pytest.mark.parametrize(
    "name,expected",
    [
        ("google.com", "com"),
        ("a.b.co.uk", "co.uk"),
        ("b.co.uk", "co.uk"),
        ("x.y.ck", "y.ck"),  # wildcard *.ck
        ("www.ck", "ck"),  # exception beats the wildcard
        ("sub.www.ck", "ck"),
        ("foo.unknowntld", "unknowntld"),  # implicit last-label rule
        ("project.github.io", "github.io"),
    ],
)
def test_effective_tld(rules, name, expected):
    assert rules.effective_tld(name) == expected


def test_longest_rule_wins():
    layered = PublicSuffixRules.from_text("uk\nco.uk\nx.co.uk\n")
    assert layered.effective_tld("a.x.co.uk") == "x.co.uk"
    assert layered.effective_tld("a.y.co.uk") == "co.uk"


def test_default_rules_load_and_cover_basics():
    bundled = default_rules()
    assert bundled.effective_tld("google.com") == "com"
    assert bundled.effective_tld("bbc.co.uk") == "co.uk"
    assert len(bundled.source_digest) == 64
