from __future__ import annotations
from functools import lru_cache
from itertools import product, zip_longest
from typing import Any, Iterable, Sequence
import math

import sympy

from .errors import DomainError, ErrorTag

INFINITY = math.inf
_X = sympy.Symbol("X")


class Polynomial:
    """Dense univariate polynomial, coefficients stored low degree first.

    Coefficients may be ints, Fractions, finite field elements or local ring
    elements; anything with ring operators and a truth value works. Trailing
    zeros are dropped, so the zero polynomial has no coefficients.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Any] = ()):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def monomial(cls, k: int, c: Any = 1) -> Polynomial:
        return cls([c * 0] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int) -> Any:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __add__(self, other: Any) -> Polynomial:
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        return Polynomial(a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0))

    __radd__ = __add__

    def __neg__(self) -> Polynomial:
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other: Any) -> Polynomial:
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        return self + (-other)

    def __rsub__(self, other: Any) -> Polynomial:
        return (-self) + other

    def __mul__(self, other: Any) -> Polynomial:
        if not isinstance(other, Polynomial):
            return Polynomial(c * other for c in self.coeffs)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial()
        out: list[Any] = [None] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                t = x * y
                out[i + j] = t if out[i + j] is None else out[i + j] + t
        zero = a[0] * 0
        return Polynomial(zero if c is None else c for c in out)

    def __rmul__(self, other: Any) -> Polynomial:
        return Polynomial(other * c for c in self.coeffs)

    def __pow__(self, e: int) -> Polynomial:
        if e < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial([self.coeffs[0] ** 0 if self.coeffs else 1])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        if len(self.coeffs) != len(other.coeffs):
            return False
        return all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)!r})"

    def derivative(self) -> Polynomial:
        return Polynomial(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def evaluate(self, x: Any) -> Any:
        acc: Any = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    __call__ = evaluate

    def truncate(self, n: int) -> Polynomial:
        """Keep the terms of degree < n."""
        return Polynomial(self.coeffs[:n])

    def map(self, fn) -> Polynomial:
        return Polynomial(fn(c) for c in self.coeffs)

    def to_sympy(self) -> sympy.Poly:
        if not self.coeffs:
            return sympy.Poly(0, _X)
        return sympy.Poly(list(reversed([int(c) for c in self.coeffs])), _X)

    def pretty(self, var: str = "X") -> str:
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono:
                terms.append(f"{c}*{mono}")
            else:
                terms.append(str(c))
        return " + ".join(terms) if terms else "0"


def poly_valuation_at_zero(f: Polynomial) -> int | float:
    for k, c in enumerate(f.coeffs):
        if c:
            return k
    return INFINITY


def _int_poly(f: Polynomial | Sequence[int]) -> Polynomial:
    return f if isinstance(f, Polynomial) else Polynomial(f)


def discriminant(f: Polynomial | Sequence[int]) -> int:
    f = _int_poly(f)
    if f.degree < 1:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "discriminant of a constant polynomial")
    return int(sympy.discriminant(f.to_sympy()))


def resultant(f: Polynomial | Sequence[int], g: Polynomial | Sequence[int]) -> int:
    return int(sympy.resultant(_int_poly(f).to_sympy(), _int_poly(g).to_sympy()))


def factorize(m: int) -> dict[int, int]:
    if m == 0:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "cannot factor zero")
    return {int(q): int(e) for q, e in sorted(sympy.factorint(abs(m)).items())}


def prime_support(m: int) -> list[int]:
    return list(factorize(m))


def format_factorization(fac: dict[int, int]) -> str:
    if not fac:
        return "1"
    return " * ".join(str(q) if e == 1 else f"{q}^{e}" for q, e in fac.items())


def is_prime(p: int) -> bool:
    return bool(sympy.isprime(p))


def p_valuation(m: int, p: int) -> int | float:
    if m == 0:
        return INFINITY
    return int(sympy.multiplicity(p, abs(m)))


def reduce_mod(f: Polynomial, p: int) -> Polynomial:
    return Polynomial(int(c) % p for c in f.coeffs)


def is_irreducible_mod_p(f: Polynomial | Sequence[int], p: int) -> bool:
    f = reduce_mod(_int_poly(f), p)
    if f.degree < 1:
        return False
    return bool(sympy.Poly(list(reversed(f.coeffs)), _X, modulus=p).is_irreducible)


def is_irreducible_over_q(f: Polynomial | Sequence[int]) -> bool:
    f = _int_poly(f)
    if f.degree < 1:
        return False
    return bool(f.to_sympy().is_irreducible)


@lru_cache(maxsize=None)
def find_irreducible(p: int, k: int) -> Polynomial:
    """First monic irreducible of degree k over F_p, scanning (c_0, ..., c_{k-1}) in lex order."""
    if k < 1:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "extension degree must be >= 1")
    if not is_prime(p):
        raise DomainError(ErrorTag.DEGENERATE_INPUT, f"{p} is not prime")
    if k == 1:
        return Polynomial([0, 1])
    for low in product(range(p), repeat=k):
        if low[0] == 0:
            continue
        candidate = Polynomial(list(low) + [1])
        if is_irreducible_mod_p(candidate, p):
            return candidate
    raise DomainError(ErrorTag.INTERNAL_INCONSISTENCY, f"no irreducible of degree {k} over F_{p}")


def determinant(rows: Sequence[Sequence[Any]]) -> Any:
    """Laplace expansion along the first row; works over any commutative ring."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = None
    for j, entry in enumerate(rows[0]):
        if not entry:
            continue
        minor = [list(row[:j]) + list(row[j + 1:]) for row in rows[1:]]
        term = entry * determinant(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return rows[0][0] * 0 if total is None else total


def vandermonde(xs: Sequence[Any], descending: bool = False) -> Any:
    """prod_{i<j} (x_j - x_i), or prod_{i<j} (x_i - x_j) when descending."""
    acc: Any = 1
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            acc = acc * ((xs[i] - xs[j]) if descending else (xs[j] - xs[i]))
    return acc
