from __future__ import annotations
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from itertools import product
from math import comb, lcm, prod
from typing import Optional, Sequence
import logging

from . import config
from .algebra import is_prime
from .equations import check_conditions, kummer_invariant
from .errors import DomainError, ErrorTag
from .fields import GaloisField, GFElement, galois_field
from .models import Model, ModelKind, ValencyType
from .reduction import small_representative, transport_model
from .trees import linear_arrangement_count

log = logging.getLogger(__name__)

MAX_SEARCH_N = 6


def _validate(t: ValencyType, p: int, k: int) -> None:
    if not is_prime(p):
        raise DomainError(ErrorTag.DEGENERATE_INPUT, f"{p} is not prime")
    if k < 1:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "extension degree must be >= 1")
    if t.n > MAX_SEARCH_N:
        raise DomainError(ErrorTag.SEARCH_TOO_LARGE, f"n = {t.n} exceeds {MAX_SEARCH_N}")
    if p**k > config.search_limit():
        raise DomainError(ErrorTag.SEARCH_TOO_LARGE, f"{p}^{k} exceeds the search limit")
    if (t.n * prod(t.a) * t.degree) % p == 0:
        raise DomainError(ErrorTag.WILD_PRIME, f"{p} divides n * a_1...a_n * N for {t}")


class _System:
    """Raw residuals of the phi system (p > n) or psi system (p <= n) over one field."""

    def __init__(self, F: GaloisField, exponents: Sequence[int]):
        self.F = F
        self.n = len(exponents)
        self.kind = "phi" if F.p > self.n else "psi"
        self.coef = [F.from_int(a) for a in exponents]
        self.binom = [[F.from_int(comb(a, j)) for j in range(self.n)] for a in exponents]

    def residuals(self, xs: Sequence[int], upto: int) -> list[int]:
        F = self.F
        if self.kind == "phi":
            out = []
            powers = list(xs)
            for m in range(1, upto + 1):
                acc = 0
                for c, x in zip(self.coef, powers):
                    acc = F.add(acc, F.mul(c, x))
                out.append(acc)
                powers = [F.mul(x, y) for x, y in zip(powers, xs)]
            return out
        series = [1] + [0] * upto
        for row, x in zip(self.binom, xs):
            factor = [1]
            for j in range(1, upto + 1):
                factor.append(F.mul(row[j] if j < len(row) else F.from_int(0), F.pow(x, j)))
            new = [0] * (upto + 1)
            for i, s in enumerate(series):
                if s:
                    for j in range(upto + 1 - i):
                        if factor[j]:
                            new[i + j] = F.add(new[i + j], F.mul(s, factor[j]))
            series = new
        return series[1:]

    def linear_slot(self, xs: list[int], slot: int) -> int:
        # phi_1 = psi_1 = sum a_i x_i, solved for x_slot
        F = self.F
        acc = 0
        for i, (c, x) in enumerate(zip(self.coef, xs)):
            if i != slot:
                acc = F.add(acc, F.mul(c, x))
        return F.div(F.neg(acc), self.coef[slot])

    def accepts(self, xs: Sequence[int]) -> bool:
        if any(x == 0 for x in xs) or len(set(xs)) != len(xs):
            return False
        return all(r == 0 for r in self.residuals(xs, self.n - 1))


def _solve_n3(system: _System) -> list[tuple[int, ...]]:
    F = system.F
    if F.p == 2:
        return _enumerate(system, list(F.nonzero()))

    def residual(v: int) -> tuple[list[int], int]:
        xs = [v, 0, 1]
        xs[1] = system.linear_slot(xs, 1)
        return xs, system.residuals(xs, 2)[1]

    # the residual is quadratic in v; recover it from three values
    r0, r1, rm = residual(0)[1], residual(1)[1], residual(F.neg(1))[1]
    half = F.inv(2)
    C = r0
    A = F.sub(F.mul(F.add(r1, rm), half), C)
    B = F.mul(F.sub(r1, rm), half)
    if A == 0:
        if B == 0:
            roots = list(F.nonzero()) if C == 0 else []
        else:
            roots = [F.div(F.neg(C), B)]
    else:
        disc = F.sub(F.mul(B, B), F.mul(4 % F.p, F.mul(A, C)))
        sqrts = [0] if disc == 0 else (F.nth_roots(disc, 2))
        two_a = F.mul(2, A)
        roots = sorted({F.div(F.add(F.neg(B), s), two_a) for s in sqrts})
    out = []
    for v in roots:
        xs = residual(v)[0]
        if system.accepts(xs):
            out.append(tuple(xs))
    return out


def _enumerate(system: _System, first_values: Sequence[int]) -> list[tuple[int, ...]]:
    F, n = system.F, system.n
    out = []
    if n == 3:
        for v in first_values:
            xs = [v, 0, 1]
            xs[1] = system.linear_slot(xs, 1)
            if system.accepts(xs):
                out.append(tuple(xs))
        return out
    for head in first_values:
        for middle in product(F.nonzero(), repeat=n - 3):
            xs = [head, *middle, 0, 1]
            xs[n - 2] = system.linear_slot(xs, n - 2)
            if system.accepts(xs):
                out.append(tuple(xs))
    return out


def _search_chunk(p: int, k: int, exponents: tuple[int, ...], chunk: list[int]) -> list[tuple[int, ...]]:
    return _enumerate(_System(galois_field(p, k), exponents), chunk)


def _raw_solutions(F: GaloisField, exponents: tuple[int, ...], threads: int) -> list[tuple[int, ...]]:
    """Root tuples with the last root 1, in encoded form."""
    system = _System(F, exponents)
    n = system.n
    if n == 2:
        xs = [0, 1]
        xs[0] = system.linear_slot(xs, 0)
        return [tuple(xs)] if system.accepts(xs) else []
    if n == 3:
        return _solve_n3(system)
    heads = list(F.nonzero())
    if threads <= 1 or len(heads) < 2:
        return _enumerate(system, heads)
    chunks = [heads[i::threads] for i in range(threads)]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(_search_chunk, [F.p] * threads, [F.k] * threads, [exponents] * threads, chunks)
        merged = [sol for part in parts for sol in part]
    return sorted(set(merged))


def _verify(model: Model, p: int) -> None:
    report = check_conditions(model)
    ok = report.all() if p > model.n else (report.i and report.ii and report.iii)
    if not ok:
        raise DomainError(
            ErrorTag.INTERNAL_INCONSISTENCY, f"solver produced a tuple failing {report.as_dict()}"
        )


def solve_over_fq(t: ValencyType, p: int, k: int = 1, threads: Optional[int] = None) -> list[Model]:
    """Every normalized model of type t with roots in F_{p^k}, sorted by key."""
    _validate(t, p, k)
    F = galois_field(p, k)
    small, perm = small_representative(t, p)
    raw = _raw_solutions(F, small.a, threads or config.threads())
    seen: dict[tuple, Model] = {}
    for xs in raw:
        found = Model(small.a, tuple(GFElement(F, v) for v in xs), ModelKind.NORMALIZED, t.n - 1)
        found = transport_model(found, t.a, perm, p).sorted_by_exponent()
        for j in range(t.n):
            normalized = found.normalize_at(j)
            seen.setdefault(normalized.key(), normalized)
    models = [seen[key] for key in sorted(seen)]
    for m in models:
        _verify(m, p)
    log.debug("type %s over GF(%d^%d): %d normalized models", t, p, k, len(models))
    return models


def splitting_degree(model: Model) -> int:
    return lcm(*(x.degree() for x in model.roots))


def tree_key(model: Model) -> tuple:
    return min(model.normalize_at(j).key() for j in range(model.n))


@dataclass
class TreeData:
    key: tuple
    models: list[Model]
    aut_order: int
    splitting_degree: int
    moduli_degree: int = 0


@dataclass
class OrbitReport:
    valency_type: ValencyType
    p: int
    kmax: int
    k_searched: int
    predicted: int
    complete: bool
    models: list[Model] = dc_field(default_factory=list)
    trees: list[TreeData] = dc_field(default_factory=list)
    frobenius_orbits: list[list[int]] = dc_field(default_factory=list)

    @property
    def orbit_sizes(self) -> list[int]:
        return [len(o) for o in self.frobenius_orbits]


def _group_trees(models: list[Model], n: int) -> list[TreeData]:
    grouped: dict[tuple, list[Model]] = {}
    for m in models:
        grouped.setdefault((splitting_degree(m), tree_key(m)), []).append(m)
    trees = []
    for (degree, key), members in sorted(grouped.items()):
        trees.append(TreeData(key, members, n // len(members), degree))
    return trees


def _frobenius_orbits(trees: list[TreeData]) -> list[list[int]]:
    index = {(tr.splitting_degree, tr.key): i for i, tr in enumerate(trees)}
    orbits: list[list[int]] = []
    assigned: set[int] = set()
    for i, tr in enumerate(trees):
        if i in assigned:
            continue
        orbit = [i]
        current = tr.models[0]
        while True:
            current = current.frobenius()
            j = index.get((tr.splitting_degree, tree_key(current)))
            if j is None:
                raise DomainError(ErrorTag.INTERNAL_INCONSISTENCY, "Frobenius leaves the model set")
            if j == i:
                break
            orbit.append(j)
        for j in orbit:
            assigned.add(j)
            trees[j].moduli_degree = len(orbit)
        orbits.append(sorted(orbit))
    return orbits


def frobenius_closure_check(models: list[Model]) -> bool:
    keys = {(splitting_degree(m), m.key()) for m in models}
    return all((splitting_degree(m), m.frobenius().key()) in keys for m in models)


def orbit_report(
    t: ValencyType, p: int, kmax: Optional[int] = None, threads: Optional[int] = None
) -> OrbitReport:
    """Raise k until the normalized-model count reaches n!/prod(mult!) or kmax is hit."""
    kmax = kmax or config.kmax()
    predicted = linear_arrangement_count(t)
    _validate(t, p, 1)
    models: list[Model] = []
    k_searched = 0
    for k in range(1, kmax + 1):
        if p**k > config.search_limit():
            log.warning("stopping at k = %d: GF(%d^%d) exceeds the search limit", k - 1, p, k)
            break
        fresh = [m for m in solve_over_fq(t, p, k, threads) if splitting_degree(m) == k]
        models.extend(fresh)
        k_searched = k
        if len(models) >= predicted:
            break
    complete = len(models) >= predicted
    if not complete:
        log.warning("orbit report for %s at p = %d is incomplete (%d of %d)", t, p, len(models), predicted)
    if not frobenius_closure_check(models):
        raise DomainError(ErrorTag.INTERNAL_INCONSISTENCY, "model set is not Frobenius stable")
    trees = _group_trees(models, t.n)
    orbits = _frobenius_orbits(trees)
    return OrbitReport(t, p, kmax, k_searched, predicted, complete, models, trees, orbits)


def kummer_models_over_fq(t: ValencyType, p: int, k: int = 1, threads: Optional[int] = None) -> list[Model]:
    """Kummer models (phi_n = 1) with roots in F_{p^k}, from rescaled normalized models."""
    seen: dict[tuple, Model] = {}
    for m in solve_over_fq(t, p, k, threads):
        inv_t = 1 / kummer_invariant(m)
        for c in inv_t.nth_roots(t.n):
            kummer = m.rescale(c).with_kind(ModelKind.KUMMER)
            seen.setdefault(kummer.key(), kummer)
    return [seen[key] for key in sorted(seen)]


def kummer_census(t: ValencyType, p: int, kmax: Optional[int] = None, threads: Optional[int] = None) -> list[Model]:
    """Kummer models over growing extensions, each listed in its own splitting field."""
    kmax = kmax or config.kmax()
    predicted = linear_arrangement_count(t)
    found: list[Model] = []
    for k in range(1, kmax + 1):
        if p**k > config.search_limit():
            break
        found.extend(m for m in kummer_models_over_fq(t, p, k, threads) if splitting_degree(m) == k)
        if len(found) >= predicted:
            break
    return found


@dataclass
class Char2Census:
    exponents: tuple[int, int, int]
    nonempty: bool
    models: list[Model]


def char2_abc_census(a: int, b: int, c: int) -> Char2Census:
    """x + y + z = 0 and xy + yz + zx + sum C(a,2) x^2 = 0 over F_4 with z = 1."""
    if any(v % 2 == 0 or v < 1 for v in (a, b, c)):
        raise DomainError(ErrorTag.WILD_PRIME, "char 2 census needs odd valencies")
    F = galois_field(2, 2)
    A, B, C = (comb(v, 2) % 2 for v in (a, b, c))
    models = []
    for x, y in product(F.nonzero(), repeat=2):
        if len({x, y, 1}) < 3 or F.add(F.add(x, y), 1):
            continue
        quad = F.add(F.add(F.mul(x, y), F.add(x, y)), F.add(F.mul(A, F.mul(x, x)), F.add(F.mul(B, F.mul(y, y)), C)))
        if quad == 0:
            models.append(Model((a, b, c), (GFElement(F, x), GFElement(F, y), F(1)), ModelKind.NORMALIZED, 2))
    return Char2Census((a, b, c), bool(models), models)


def construct_fp_split_model(
    p: int, xs: Sequence[int], u: int
) -> tuple[Model, Optional[ValencyType]]:
    """Exponents a_i = least positive rep of u * prod_{j != i} (1 - x_i / x_j)^{-1} mod p."""
    n = len(xs)
    if not is_prime(p):
        raise DomainError(ErrorTag.DEGENERATE_INPUT, f"{p} is not prime")
    if p <= n:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, f"need p > n, got p = {p}, n = {n}")
    F = galois_field(p, 1)
    roots = [F(x) for x in xs]
    if any(not r for r in roots) or len(set(roots)) != n:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "roots must be distinct and nonzero")
    if u % p == 0:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "u must be a unit mod p")
    exponents = []
    for i, xi in enumerate(roots):
        denom = F(1)
        for j, xj in enumerate(roots):
            if j != i:
                denom = denom * (1 - xi / xj)
        residue = (F(u) / denom).value
        if residue == 0:
            raise DomainError(ErrorTag.DEGENERATE_INPUT, f"residue for slot {i} is zero")
        exponents.append(residue)
    model = Model(tuple(exponents), tuple(roots)).sorted_by_exponent()
    kind = ModelKind.NORMALIZED if any(r == 1 for r in model.roots) else ModelKind.STANDARD
    model = model.with_kind(kind)
    return model, (ValencyType(model.exponents) if n >= 2 else None)
