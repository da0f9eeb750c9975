from __future__ import annotations
from collections import Counter
from dataclasses import dataclass, replace
from datetime import datetime, timezone

UTC = timezone.utc
from enum import Enum
from typing import Any, Callable, Optional, Sequence

from sqlmodel import Field, SQLModel

from .errors import DomainError, ErrorTag


@dataclass(frozen=True)
class ValencyType:
    """Sorted valencies (a_1, ..., a_n) of the black vertices; degree N = sum a_i."""

    a: tuple[int, ...]

    def __post_init__(self):
        if len(self.a) < 2:
            raise DomainError(ErrorTag.DEGENERATE_INPUT, "a valency type needs n >= 2 entries")
        if any(x < 1 for x in self.a):
            raise DomainError(ErrorTag.DEGENERATE_INPUT, "valencies must be positive")
        if list(self.a) != sorted(self.a):
            raise DomainError(ErrorTag.DEGENERATE_INPUT, f"valencies {self.a} are not sorted")

    @classmethod
    def of(cls, values: Sequence[int]) -> ValencyType:
        return cls(tuple(sorted(int(v) for v in values)))

    @classmethod
    def parse(cls, text: str) -> tuple[ValencyType, bool]:
        """Parse '1,2,3'; the flag tells whether the input was already sorted."""
        try:
            values = [int(v) for v in text.replace(" ", "").strip("()").split(",") if v]
        except ValueError:
            raise DomainError(ErrorTag.DEGENERATE_INPUT, f"cannot parse valency type {text!r}")
        return cls.of(values), values == sorted(values)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def degree(self) -> int:
        return sum(self.a)

    @property
    def multiplicities(self) -> Counter:
        return Counter(self.a)

    def multiplicity(self, value: int) -> int:
        return self.a.count(value)

    def omit(self, i: int) -> tuple[int, ...]:
        return self.a[:i] + self.a[i + 1:]

    def is_generic(self) -> bool:
        return len(set(self.a)) == self.n

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in self.a) + ")"


class ModelKind(str, Enum):
    STANDARD = "standard"
    NORMALIZED = "normalized"
    AI_NORMALIZED = "ai_normalized"
    KUMMER = "kummer"
    CANONICAL = "canonical"
    # root vector of a twisted system, y_j = x^{-1} x_j or x^{-1}(x_j - 1)
    TWISTED = "twisted"


def root_key(x: Any) -> Any:
    key = getattr(x, "sort_key", None)
    return key() if key else x


@dataclass(frozen=True)
class Model:
    """beta(X) = prod (1 - x_i X)^{a_i}, roots kept aligned with exponents."""

    exponents: tuple[int, ...]
    roots: tuple[Any, ...]
    kind: ModelKind = ModelKind.STANDARD
    slot: Optional[int] = None

    def __post_init__(self):
        if len(self.exponents) != len(self.roots):
            raise DomainError(ErrorTag.DEGENERATE_INPUT, "exponents and roots differ in length")

    @property
    def n(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def with_kind(self, kind: ModelKind, slot: Optional[int] = None) -> Model:
        return replace(self, kind=kind, slot=slot)

    def map_roots(self, fn: Callable[[Any], Any], kind: Optional[ModelKind] = None) -> Model:
        return Model(self.exponents, tuple(fn(x) for x in self.roots), kind or self.kind, self.slot)

    def rescale(self, c: Any) -> Model:
        """beta(cX)."""
        return Model(self.exponents, tuple(c * x for x in self.roots), ModelKind.STANDARD)

    def normalize_at(self, i: int) -> Model:
        """beta(x_i^{-1} X): the root at slot i becomes 1."""
        inv = 1 / self.roots[i]
        roots = tuple(x * inv for x in self.roots)
        return Model(self.exponents, roots, ModelKind.NORMALIZED, i)

    def reorder(self, perm: Sequence[int]) -> Model:
        """Slot k of the result is slot perm[k] of self."""
        return Model(
            tuple(self.exponents[j] for j in perm),
            tuple(self.roots[j] for j in perm),
            self.kind,
            None if self.slot is None else list(perm).index(self.slot),
        )

    def sorted_by_exponent(self) -> Model:
        order = sorted(range(self.n), key=lambda i: (self.exponents[i], root_key(self.roots[i])))
        return self.reorder(order)

    def frobenius(self) -> Model:
        return self.map_roots(lambda x: x.frobenius())

    def reduce(self) -> Model:
        """Send every local-ring root to its residue."""
        return self.map_roots(lambda x: x.reduce())

    def key(self) -> tuple:
        """Hashable identity of the polynomial: the sorted (a_i, x_i) pairs."""
        return tuple(sorted((a, root_key(x)) for a, x in zip(self.exponents, self.roots)))

    def has_distinct_roots(self) -> bool:
        return len({root_key(x) for x in self.roots}) == self.n


class CensusRecord(SQLModel, table=True):
    """One swept (n, a, b) of the (1,...,1,a,b) family."""

    id: Optional[int] = Field(default=None, primary_key=True)
    n: int = Field(index=True)
    a: int = Field(index=True)
    b: int = Field(index=True)
    # h-polynomial coefficients, low degree first, as CSV
    hpoly_csv: str = ""
    h_irreducible: bool = Field(default=False, index=True)
    criterion: str = ""
    prime: Optional[int] = None
    created_at: datetime = Field(default_factory=lambda: datetime.now(UTC))

    @property
    def hpoly(self) -> list[int]:
        if not self.hpoly_csv:
            return []
        return [int(c) for c in self.hpoly_csv.split(",")]

    def set_hpoly(self, coeffs: Sequence[int]) -> None:
        self.hpoly_csv = ",".join(str(int(c)) for c in coeffs)
