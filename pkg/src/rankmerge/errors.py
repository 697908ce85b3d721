"""Exception types shared across the package."""

from __future__ import annotations


class RankmergeError(Exception):
    """Base class for all rankmerge errors."""


class MalformedDomainError(RankmergeError, ValueError):
    """A raw domain string failed syntactic validation.

    `position` is the character offset (in the normalized, lowercased
    string) where the problem was detected.
    """

    def __init__(self, raw: str, position: int, reason: str):
        self.raw = raw
        self.position = position
        self.reason = reason
        super().__init__(f"malformed domain {raw!r} at position {position}: {reason}")


class InvalidSnapshotError(RankmergeError, ValueError):
    """Snapshot entries violate the ranked-list invariants."""


class ConflictError(RankmergeError):
    """An existing stored object differs from the one being written."""


class NotFoundError(RankmergeError):
    """Requested object does not exist in the store."""


class MissingColumnError(RankmergeError, ValueError):
    """A CSV input lacks a required column."""


class EmptyInputError(RankmergeError, ValueError):
    """An operation received an empty input where data is required."""


class CorruptDataError(RankmergeError):
    """Stored data failed an integrity check.

    `mismatches` names the fields that diverged (e.g. "output_digest").
    """

    def __init__(self, message: str, mismatches: tuple[str, ...] = ()):
        self.mismatches = mismatches
        super().__init__(message)
