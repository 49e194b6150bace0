"""Error taxonomy shared by the library and the command line tool.

Every error that should abort a command maps onto a process exit code:
2 for unreadable or empty inputs, 3 for bad configuration, 4 for data
that is readable but internally inconsistent. Per-record problems are
signalled with the same classes but handled as skips by the callers.
"""
from __future__ import annotations


class CotscopeError(Exception):
    """Base class for all tool errors."""

    exit_code = 1


class InputError(CotscopeError):
    """Input is missing, unreadable, or empty."""

    exit_code = 2


class ConfigError(CotscopeError):
    """A flag, config file, or parameter combination is invalid."""

    exit_code = 3


class DataError(CotscopeError):
    """Input parsed but violates a consistency rule."""

    exit_code = 4


class SidecarMissing(InputError):
    """No sidecar token-count entry exists for a record."""


class MissingTokenCount(DataError):
    """A record lacks token_count in a mode that requires it."""


class NoFinalAnswer(DataError):
    """A response has no recognizable final-answer segment."""


class DuplicateSample(DataError):
    """The same (problem_id, dataset_id, sample_index) appeared twice."""


class DatasetMismatch(DataError):
    """Records from different datasets were mixed where one was expected."""


class EmptyBaseline(InputError):
    """A baseline run contains no usable records."""


class DomainError(DataError):
    """A value lies outside the domain of a reward formula."""
