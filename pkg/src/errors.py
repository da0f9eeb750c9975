from __future__ import annotations
from enum import Enum


class ErrorTag(str, Enum):
    DEGENERATE_INPUT = "DEGENERATE_INPUT"
    NOT_A_MODEL = "NOT_A_MODEL"
    INTERNAL_INCONSISTENCY = "INTERNAL_INCONSISTENCY"
    WILD_PRIME = "WILD_PRIME"
    SEARCH_TOO_LARGE = "SEARCH_TOO_LARGE"
    SINGULAR_POINT = "SINGULAR_POINT"
    UNSUPPORTED_RAMIFICATION = "UNSUPPORTED_RAMIFICATION"
    NOT_REGULAR = "NOT_REGULAR"
    VALUATION_MISMATCH = "VALUATION_MISMATCH"
    BAD_PERMUTATION = "BAD_PERMUTATION"
    NOT_APPLICABLE = "NOT_APPLICABLE"
    BAD_ROOT = "BAD_ROOT"


class DomainError(ValueError):
    """A computation refused its input; `tag` says which rule was broken."""

    def __init__(self, tag: ErrorTag, message: str = ""):
        self.tag = tag
        self.message = message or tag.value
        super().__init__(f"{tag.value}: {self.message}")
