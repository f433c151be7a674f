"""Exception types shared across the package."""

from __future__ import annotations


class BankriskError(Exception):
    """Base class for all package errors."""


class UnknownRating(BankriskError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"unknown rating token: {token!r} (expected P, A, or N)")


class UnknownLabel(BankriskError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"unknown class label: {token!r} (expected B or NB)")


class ArityError(BankriskError):
    def __init__(self, n_fields: int):
        self.n_fields = n_fields
        super().__init__(f"expected 6 or 7 comma-separated fields, got {n_fields}")


class LineParseError(BankriskError):
    """A row of an input stream failed to parse; carries the 1-based line number."""

    def __init__(self, line_number: int, cause: BankriskError):
        self.line_number = line_number
        self.cause = cause
        super().__init__(f"line {line_number}: {cause}")


class EmptyDataset(BankriskError):
    pass


class MissingLabel(BankriskError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"record {index} has no class label")


class ZeroVariance(BankriskError):
    pass


class SingleClassTraining(BankriskError):
    pass


class NonFiniteLoss(BankriskError):
    pass


class NegativeGamma(BankriskError):
    pass


class EmptyNode(BankriskError):
    pass


class EmptyClass(BankriskError):
    pass


class InsufficientClassMembers(BankriskError):
    pass


class LengthMismatch(BankriskError):
    pass


class SingleClassInput(BankriskError):
    pass


class SinkWriteError(BankriskError):
    pass


class ArtifactParseError(BankriskError):
    """Model document could not be parsed; message carries the location."""


class UnsupportedVersion(BankriskError):
    def __init__(self, found: int, current: int):
        self.found = found
        self.current = current
        super().__init__(f"artifact format version {found} not supported (current: {current})")


class UnsupportedAlgorithm(BankriskError):
    def __init__(self, tag: str):
        self.tag = tag
        super().__init__(f"unsupported algorithm tag: {tag!r}")


class InvariantViolation(BankriskError):
    pass
