import datetime as dt

import pytest
from hypothesis import settings

from rankmerge import Provider, ProviderSnapshot, PublicSuffixRules, parse_domain

settings.register_profile("repo", derandomize=True, max_examples=60)
settings.load_profile("repo")

# Small pinned rule set: plenty for exercising exact, multi-label,
# wildcard and exception behavior without dragging in the full snapshot.
RULES_TEXT = """\
// test rules
com
net
org
example
test
invalid
io
github.io
uk
co.uk
org.uk
ac.uk
jp
co.jp
de
fr
*.ck
!www.ck
"""

D0 = dt.date(2018, 3, 1)


def day(offset: int) -> dt.date:
    return D0 + dt.timedelta(days=offset)


@pytest.fixture(scope="session")
def rules() -> PublicSuffixRules:
    return PublicSuffixRules.from_text(RULES_TEXT)


@pytest.fixture(scope="session")
def mk(rules):
    """Cached domain-record maker (synthetic fixtures reuse names heavily)."""
    cache = {}

    def make(name: str):
        record = cache.get(name)
        if record is None:
            record = cache[name] = parse_domain(name, rules)
        return record

    return make


@pytest.fixture(scope="session")
def snap(mk):
    def make(provider: Provider, date: dt.date, names) -> ProviderSnapshot:
        return ProviderSnapshot.from_records(provider, date, [mk(n) for n in names])

    return make
