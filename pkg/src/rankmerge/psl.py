"""Public-suffix rules: parsing the standard rules file and suffix lookup.

The rules file is the usual one-rule-per-line format: "//" comments,
"*." wildcard rules, "!" exception rules. Lookups never touch the
network; a rules file is loaded once and pinned by its content digest so
any list built from it can be reproduced later.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

_DEFAULT_RESOURCE = "public_suffix_rules.dat"


@dataclass(frozen=True)
class PublicSuffixRules:
    """Parsed suffix rules plus the digest of the file they came from.

    `exact` holds plain rules, `wildcards` holds the part after "*."
    (so rule "*.ck" is stored as "ck"), `exceptions` holds exception
    names without the leading "!".
    """

    exact: frozenset[str]
    wildcards: frozenset[str]
    exceptions: frozenset[str]
    source_digest: str

    @classmethod
    def from_text(cls, text: str) -> "PublicSuffixRules":
        exact: set[str] = set()
        wildcards: set[str] = set()
        exceptions: set[str] = set()
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("//"):
                continue
            rule = line.split()[0].lower()
            if rule.startswith("!"):
                exceptions.add(rule[1:])
            elif rule.startswith("*."):
                wildcards.add(rule[2:])
            else:
                exact.add(rule)
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        return cls(
            exact=frozenset(exact),
            wildcards=frozenset(wildcards),
            exceptions=frozenset(exceptions),
            source_digest=digest,
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "PublicSuffixRules":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    def effective_tld(self, name: str) -> str:
        """Return the effective TLD (public suffix) of a lowercase name.

        Longest matching rule wins; an exception rule beats everything
        and yields the exception minus its leftmost label. A name that
        matches no rule falls back to the implicit "*" rule (the last
        label is the suffix).
        """
        labels = name.split(".")
        n = len(labels)
        for i in range(n):
            if ".".join(labels[i:]) in self.exceptions:
                if i + 1 < n:
                    return ".".join(labels[i + 1 :])
                break  # degenerate single-label exception: fall through
        best = 1
        for i in range(n):
            size = n - i
            if size <= best:
                break
            candidate = ".".join(labels[i:])
            if candidate in self.exact:
                best = size
            elif size >= 2 and ".".join(labels[i + 1 :]) in self.wildcards:
                best = size
        return ".".join(labels[n - best :])


def default_rules() -> PublicSuffixRules:
    """Rules parsed from the snapshot bundled with the package."""
    text = (
        resources.files("rankmerge")
        .joinpath("data", _DEFAULT_RESOURCE)
        .read_text(encoding="utf-8")
    )
    return PublicSuffixRules.from_text(text)
