from __future__ import annotations
from dataclasses import dataclass
from math import factorial, prod

import sympy
from sympy.utilities.iterables import multiset_permutations

from .errors import DomainError, ErrorTag
from .models import ValencyType


@dataclass(frozen=True)
class PlanarTreeClass:
    """A diameter four tree as the cyclic order of black valencies around the central vertex.

    `necklace` is the lexicographically smallest rotation; `aut_order` is the
    order of its rotation symmetry group.
    """

    necklace: tuple[int, ...]
    aut_order: int

    @property
    def n(self) -> int:
        return len(self.necklace)

    @property
    def valency_type(self) -> ValencyType:
        return ValencyType.of(self.necklace)


def canonical_rotation(seq: tuple[int, ...]) -> tuple[int, ...]:
    return min(seq[r:] + seq[:r] for r in range(len(seq)))


def _period(seq: tuple[int, ...]) -> int:
    n = len(seq)
    for d in sympy.divisors(n):
        if seq[d:] + seq[:d] == seq:
            return int(d)
    return n


def enumerate_trees(t: ValencyType) -> list[PlanarTreeClass]:
    first, rest = t.a[0], list(t.a[1:])
    seen: set[tuple[int, ...]] = set()
    # fixing a smallest bead in front loses no necklace
    for perm in multiset_permutations(rest):
        seen.add(canonical_rotation((first, *perm)))
    return [PlanarTreeClass(s, t.n // _period(s)) for s in sorted(seen)]


def _fixed_arrangements(counts: list[int], n: int, g: int) -> int:
    # arrangements fixed by a rotation whose cycles have length n // g
    cycle = n // g
    if any(c % cycle for c in counts):
        return 0
    return factorial(g) // prod(factorial(c // cycle) for c in counts)


def count_trees(t: ValencyType) -> int:
    """Burnside over the cyclic group of order n; no necklace is materialized."""
    n = t.n
    counts = list(t.multiplicities.values())
    total = sum(
        int(sympy.totient(n // g)) * _fixed_arrangements(counts, n, g) for g in sympy.divisors(n)
    )
    return total // n


def normalized_model_count(tree: PlanarTreeClass) -> int:
    return tree.n // tree.aut_order


def ai_normalized_model_count(tree: PlanarTreeClass, i: int) -> int:
    """n(a_i)/m, the models normalized at a vertex of valency a_i."""
    t = tree.valency_type
    if not 0 <= i < t.n:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, f"slot {i} out of range for {t}")
    return t.multiplicity(t.a[i]) // tree.aut_order


def linear_arrangement_count(t: ValencyType) -> int:
    """n!/prod(mult!), equal to the sum of n/m over all trees of the type."""
    return factorial(t.n) // prod(factorial(c) for c in t.multiplicities.values())
