"""Domain-name semantics: pay-level domain and effective TLD derivation."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedDomainError
from .psl import PublicSuffixRules

# Characters allowed in a (lowercased) label besides non-ASCII IDN bytes,
# which are kept in their as-published form.
_LABEL_CHARS = frozenset("abcdefghijklmnopqrstuvwxyz0123456789-_")


@dataclass(frozen=True, slots=True)
class DomainRecord:
    """A domain name with its derived pay-level domain and effective TLD.

    `is_pld` is true iff the name itself is directly registrable (one
    label beneath its public suffix). Names that are themselves a public
    suffix get pld == name and is_pld == False, and their tld falls back
    to the longest proper-suffix rule (or the last label for single-label
    names, where tld == pld is unavoidable).
    """

    name: str
    pld: str
    tld: str
    is_pld: bool


def parse_domain(raw: str, rules: PublicSuffixRules) -> DomainRecord:
    """Parse and validate a raw domain string into a DomainRecord.

    Lowercases, strips a single trailing dot, and rejects empty labels,
    whitespace and characters outside alphanumerics/hyphen/underscore
    (non-ASCII bytes pass through unchanged). Raises MalformedDomainError
    with the offending position.
    """
    if not raw:
        raise MalformedDomainError(raw, 0, "empty input")
    name = raw.lower()
    if name.endswith(".") and len(name) > 1:
        name = name[:-1]
    for i, ch in enumerate(name):
        if ch == ".":
            continue
        if ch in _LABEL_CHARS or not ch.isascii():
            continue
        reason = "whitespace" if ch.isspace() else f"illegal character {ch!r}"
        raise MalformedDomainError(raw, i, reason)
    pos = 0
    for label in name.split("."):
        if not label:
            raise MalformedDomainError(raw, pos, "empty label")
        pos += len(label) + 1

    suffix = rules.effective_tld(name)
    if suffix == name:
        # The name is itself a public suffix: not registrable.
        labels = name.split(".")
        tld = rules.effective_tld(".".join(labels[1:])) if len(labels) > 1 else name
        return DomainRecord(name=name, pld=name, tld=tld, is_pld=False)
    suffix_labels = suffix.count(".") + 1
    labels = name.split(".")
    pld = ".".join(labels[-(suffix_labels + 1) :])
    return DomainRecord(name=name, pld=pld, tld=suffix, is_pld=(name == pld))
