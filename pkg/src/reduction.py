from __future__ import annotations
from collections import Counter, defaultdict
from dataclasses import dataclass, field as dc_field
from enum import Enum
from math import factorial, gcd
from typing import Iterable, Optional, Sequence
import logging

import sympy

from . import config
from .algebra import p_valuation
from .errors import DomainError, ErrorTag
from .models import Model, ValencyType

log = logging.getLogger(__name__)

MAX_SUBSET_N = 20


class DVariant(str, Enum):
    FULL = "full"
    OMIT = "omit"
    PROPER = "proper"


class PrimeKind(str, Enum):
    GOOD = "GOOD"
    AI_REGULAR = "AI_REGULAR"
    REGULAR_AT_INFINITY = "REGULAR_AT_INFINITY"
    WILD_UNCLASSIFIED = "WILD_UNCLASSIFIED"


class Locus(str, Enum):
    ZERO = "zero"
    INFINITY = "infinity"


@dataclass(frozen=True)
class DInvariant:
    variant: DVariant
    slot: Optional[int]
    support: tuple[int, ...]
    value: Optional[int]
    bits: int


def _subset_sums(values: Sequence[int]) -> Counter:
    counts: Counter = Counter({0: 1})
    for a in values:
        step: Counter = Counter()
        for s, c in counts.items():
            step[s + a] += c
        counts.update(step)
    counts[0] -= 1
    return +counts


def d_invariant(t: ValencyType, variant: DVariant = DVariant.FULL, slot: Optional[int] = None) -> DInvariant:
    """Product of the subset sums: all nonempty subsets, those avoiding `slot`, or proper ones."""
    if t.n > MAX_SUBSET_N:
        raise DomainError(ErrorTag.SEARCH_TOO_LARGE, f"2^{t.n} subsets is too many")
    if variant is DVariant.OMIT:
        if slot is None or not 0 <= slot < t.n:
            raise DomainError(ErrorTag.DEGENERATE_INPUT, "OMIT needs a valid slot")
        values = t.omit(slot)
    else:
        values = t.a
    sums = _subset_sums(values)
    if variant is DVariant.PROPER:
        sums[t.degree] -= 1
        sums = +sums
    support = sorted({int(q) for s in sums for q in sympy.primefactors(s)})
    bits = sum(s.bit_length() * c for s, c in sums.items())
    value = None
    if bits <= config.d_bits():
        value = 1
        for s, c in sums.items():
            value *= s**c
    return DInvariant(variant, slot if variant is DVariant.OMIT else None, tuple(support), value, bits)


def h_p(n: int, p: int) -> int:
    """Least h with p^h > n."""
    if n < 1:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "n must be >= 1")
    h = 0
    while p**h <= n:
        h += 1
    return h


@dataclass(frozen=True)
class PrimeClass:
    p: int
    kind: PrimeKind
    regular_slots: tuple[int, ...] = ()
    at_infinity: bool = False


def classify_prime(t: ValencyType, p: int) -> PrimeClass:
    if p not in d_invariant(t).support:
        return PrimeClass(p, PrimeKind.GOOD)
    omitted: dict[int, bool] = {}
    slots = []
    for i, a in enumerate(t.a):
        if a % p:
            continue
        if a not in omitted:
            omitted[a] = p not in d_invariant(t, DVariant.OMIT, i).support
        if omitted[a]:
            slots.append(i)
    at_infinity = t.degree % p == 0 and p not in d_invariant(t, DVariant.PROPER).support
    if slots:
        kind = PrimeKind.AI_REGULAR
    elif at_infinity:
        kind = PrimeKind.REGULAR_AT_INFINITY
    else:
        kind = PrimeKind.WILD_UNCLASSIFIED
    return PrimeClass(p, kind, tuple(slots), at_infinity)


# p-congruence


def p_congruent(
    t1: Sequence[int], t2: Sequence[int], p: int, strict: bool = False
) -> Optional[tuple[int, ...]]:
    """An admissible permutation sigma with t1[i] = t2[sigma(i)] mod p^h, or None."""
    if len(t1) != len(t2):
        return None
    modulus = p ** h_p(len(t1), p)
    sigma = [0] * len(t1)
    if not strict:
        buckets: dict[int, list[int]] = defaultdict(list)
        for j, b in enumerate(t2):
            buckets[b % modulus].append(j)
        for i, a in enumerate(t1):
            bucket = buckets.get(a % modulus)
            if not bucket:
                return None
            sigma[i] = bucket.pop(0)
        return tuple(sigma)
    classes1, classes2 = _classes(t1), _classes(t2)
    pool: dict[tuple[int, int], list[list[int]]] = defaultdict(list)
    for value, idx in classes2:
        pool[(value % modulus, len(idx))].append(idx)
    for value, idx in classes1:
        candidates = pool.get((value % modulus, len(idx)))
        if not candidates:
            return None
        target = candidates.pop(0)
        for i, j in zip(idx, target):
            sigma[i] = j
    return tuple(sigma)


def _classes(values: Sequence[int]) -> list[tuple[int, list[int]]]:
    groups: dict[int, list[int]] = defaultdict(list)
    for i, v in enumerate(values):
        groups[v].append(i)
    return sorted(groups.items())


def is_admissible(t1: Sequence[int], t2: Sequence[int], perm: Sequence[int], p: int) -> bool:
    if sorted(perm) != list(range(len(t2))) or len(t1) != len(t2):
        return False
    modulus = p ** h_p(len(t1), p)
    return all((a - t2[j]) % modulus == 0 for a, j in zip(t1, perm))


def transport_model(model: Model, target: Sequence[int], perm: Sequence[int], p: int) -> Model:
    """Keep the roots, replace each exponent a_i by target[perm[i]]."""
    if not is_admissible(model.exponents, target, perm, p):
        raise DomainError(ErrorTag.BAD_PERMUTATION, f"{tuple(perm)} is not admissible at p = {p}")
    return Model(tuple(target[j] for j in perm), model.roots, model.kind, model.slot)


def small_representative(t: ValencyType, p: int) -> tuple[ValencyType, tuple[int, ...]]:
    """A strictly p-congruent type with small entries, plus perm: small slot -> slot of t."""
    modulus = p ** h_p(t.n, p)
    used: Counter = Counter()
    image: dict[int, int] = {}
    for value in sorted(set(t.a)):
        r = value % modulus or modulus
        image[value] = r + used[r] * modulus
        used[r] += 1
    small = [image[a] for a in t.a]
    order = sorted(range(t.n), key=lambda i: (small[i], i))
    return ValencyType(tuple(small[i] for i in order)), tuple(order)


# ramification


@dataclass(frozen=True)
class RamificationData:
    locus: Locus
    slot: Optional[int]
    e: int
    n0: int
    h: int
    classes: tuple[tuple[int, int], ...]


def combinatorial_ramification_index(
    t: ValencyType, locus: Locus, p: int, slot: Optional[int] = None
) -> RamificationData:
    """e = (n-1)/gcd(n-1, h*n0), with n0 read off the equal-valency classes."""
    cls = classify_prime(t, p)
    n = t.n
    if locus is Locus.ZERO:
        if slot is None or slot not in cls.regular_slots:
            raise DomainError(ErrorTag.NOT_REGULAR, f"{p} is not a_{slot}-regular for {t}")
        h = int(p_valuation(t.a[slot], p))
        sizes = Counter(t.omit(slot))
        n0 = 0
        for size in sizes.values():
            n0 = gcd(n0, size)
    else:
        if not cls.at_infinity:
            raise DomainError(ErrorTag.NOT_REGULAR, f"{p} is not regular at infinity for {t}")
        h = int(p_valuation(t.degree, p))
        sizes = t.multiplicities
        counts = list(sizes.values())
        n0 = 0
        for i, ni in enumerate(counts):
            n0 = gcd(n0, ni * (ni - 1))
            for nj in counts[i + 1:]:
                n0 = gcd(n0, ni * nj)
    e = (n - 1) // gcd(n - 1, h * n0)
    classes = tuple(sorted(sizes.items()))
    return RamificationData(locus, slot if locus is Locus.ZERO else None, e, n0, h, classes)


@dataclass(frozen=True)
class RamificationBounds:
    locus: Locus
    slot: Optional[int]
    lower: int
    upper: int
    totally_determined: bool
    proved: bool
    data: RamificationData


def ramification_bound_report(
    t: ValencyType, p: int, locus: Optional[Locus] = None, slot: Optional[int] = None
) -> RamificationBounds:
    cls = classify_prime(t, p)
    if locus is None:
        if cls.regular_slots:
            locus, slot = Locus.ZERO, slot if slot is not None else cls.regular_slots[-1]
        elif cls.at_infinity:
            locus = Locus.INFINITY
        else:
            raise DomainError(ErrorTag.NOT_REGULAR, f"{p} is neither a_i-regular nor regular at infinity")
    data = combinatorial_ramification_index(t, locus, p, slot)
    upper = (t.n - 1) // gcd(t.n - 1, data.h)
    return RamificationBounds(locus, data.slot, data.e, upper, data.e == upper, p > t.n, data)


def cyclotomic_orbit_count(t: ValencyType, p: int) -> int:
    """(n-1)!/ord_n(p) for generic types p-congruent to (1,...,1)."""
    n = t.n
    if n % p == 0:
        raise DomainError(ErrorTag.NOT_APPLICABLE, f"{p} divides n = {n}")
    if not t.is_generic():
        raise DomainError(ErrorTag.NOT_APPLICABLE, f"{t} has repeated valencies")
    if p_congruent(t.a, (1,) * n, p) is None:
        raise DomainError(ErrorTag.NOT_APPLICABLE, f"{t} is not {p}-congruent to (1,...,1)")
    return factorial(n - 1) // int(sympy.n_order(p, n))


@dataclass
class PrimeReport:
    classification: PrimeClass
    bounds: list[RamificationBounds] = dc_field(default_factory=list)


@dataclass
class ReductionReport:
    valency_type: ValencyType
    d: DInvariant
    d_slots: list[DInvariant]
    d_infinity: DInvariant
    primes: list[PrimeReport]


def reduction_report(t: ValencyType, primes: Optional[Iterable[int]] = None) -> ReductionReport:
    d = d_invariant(t)
    d_slots = [d_invariant(t, DVariant.OMIT, i) for i in range(t.n)]
    d_inf = d_invariant(t, DVariant.PROPER)
    if primes is None:
        candidates = {int(q) for a in (*t.a, t.degree) for q in sympy.primefactors(a)}
    else:
        candidates = set(primes)
    reports = []
    for p in sorted(candidates):
        cls = classify_prime(t, p)
        report = PrimeReport(cls)
        seen_values = set()
        for i in cls.regular_slots:
            if t.a[i] in seen_values:
                continue
            seen_values.add(t.a[i])
            report.bounds.append(ramification_bound_report(t, p, Locus.ZERO, i))
        if cls.at_infinity:
            report.bounds.append(ramification_bound_report(t, p, Locus.INFINITY))
        reports.append(report)
    log.debug("reduction report for %s: %d primes classified", t, len(reports))
    return ReductionReport(t, d, d_slots, d_inf, reports)
