from __future__ import annotations
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd
from typing import Iterator, Optional, Sequence
import logging

import sympy

from . import config
from .algebra import Polynomial, find_irreducible, is_prime
from .errors import DomainError, ErrorTag

log = logging.getLogger(__name__)


class GaloisField:
    """F_{p^k} in the polynomial basis of `find_irreducible(p, k)`.

    Elements are handled as ints: the base-p digits of an int are the
    coefficients c_0, c_1, ... of the residue class. Multiplication goes
    through discrete log tables, addition in extensions through a Zech table.
    Build instances with `galois_field`, which caches them.
    """

    def __init__(self, p: int, k: int = 1):
        if not is_prime(p):
            raise DomainError(ErrorTag.DEGENERATE_INPUT, f"{p} is not prime")
        if k < 1:
            raise DomainError(ErrorTag.DEGENERATE_INPUT, "extension degree must be >= 1")
        self.p = p
        self.k = k
        self.q = p**k
        if k > 1 and self.q > config.search_limit():
            raise DomainError(ErrorTag.SEARCH_TOO_LARGE, f"field of size {p}^{k} is too large")
        self.modulus: Polynomial = find_irreducible(p, k)
        self._low = [int(c) for c in self.modulus.coeffs[:k]]
        self._minus_one_log = (self.q - 1) // 2 if p != 2 else 0

    def __reduce__(self):
        return (galois_field, (self.p, self.k))

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.k})"

    # raw digit arithmetic, used to build the tables

    def digits(self, v: int) -> list[int]:
        out = []
        for _ in range(self.k):
            v, r = divmod(v, self.p)
            out.append(r)
        return out

    def pack(self, digits: Sequence[int]) -> int:
        v = 0
        for c in reversed(list(digits)[: self.k]):
            v = v * self.p + c % self.p
        return v

    def _raw_add(self, u: int, v: int) -> int:
        return self.pack([a + b for a, b in zip(self.digits(u), self.digits(v))])

    def _raw_mul(self, u: int, v: int) -> int:
        p, k = self.p, self.k
        a, b = self.digits(u), self.digits(v)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d] % p
            if c:
                for j in range(k):
                    prod[d - k + j] -= c * self._low[j]
            prod[d] = 0
        return self.pack(prod[:k])

    def _raw_pow(self, u: int, e: int) -> int:
        result, base = 1, u
        while e:
            if e & 1:
                result = self._raw_mul(result, base)
            base = self._raw_mul(base, base)
            e >>= 1
        return result

    @cached_property
    def _tables(self) -> tuple[list[int], list[int], list[Optional[int]]]:
        q1 = self.q - 1
        if self.k == 1:
            g = int(sympy.primitive_root(self.p)) if self.p > 2 else 1
            step = lambda x: x * g % self.p  # noqa: E731
        else:
            factors = sympy.primefactors(q1)
            g = next(
                c
                for c in range(2, self.q)
                if all(self._raw_pow(c, q1 // r) != 1 for r in factors)
            )
            step = lambda x: self._raw_mul(x, g)  # noqa: E731
        exp = [1] * q1
        logs = [0] * self.q
        for i in range(1, q1):
            exp[i] = step(exp[i - 1])
            logs[exp[i]] = i
        zech: list[Optional[int]] = [None] * q1
        if self.k > 1:
            for i in range(q1):
                s = self._raw_add(1, exp[i])
                zech[i] = logs[s] if s else None
        log.debug("built log tables for GF(%d^%d), generator %d", self.p, self.k, g)
        return exp, logs, zech

    # field operations on encoded ints

    def from_int(self, n: int) -> int:
        return n % self.p

    def from_coeffs(self, coeffs: Sequence[int]) -> int:
        return self.pack(coeffs)

    def add(self, u: int, v: int) -> int:
        if self.k == 1:
            return (u + v) % self.p
        if not u:
            return v
        if not v:
            return u
        exp, logs, zech = self._tables
        lu = logs[u]
        z = zech[(logs[v] - lu) % (self.q - 1)]
        return 0 if z is None else exp[(lu + z) % (self.q - 1)]

    def neg(self, u: int) -> int:
        if self.k == 1:
            return -u % self.p
        if not u:
            return 0
        exp, logs, _ = self._tables
        return exp[(logs[u] + self._minus_one_log) % (self.q - 1)]

    def sub(self, u: int, v: int) -> int:
        return self.add(u, self.neg(v))

    def mul(self, u: int, v: int) -> int:
        if self.k == 1:
            return u * v % self.p
        if not u or not v:
            return 0
        exp, logs, _ = self._tables
        return exp[(logs[u] + logs[v]) % (self.q - 1)]

    def inv(self, u: int) -> int:
        if not u:
            raise ZeroDivisionError(f"zero has no inverse in {self!r}")
        if self.k == 1:
            return pow(u, -1, self.p)
        exp, logs, _ = self._tables
        return exp[-logs[u] % (self.q - 1)]

    def div(self, u: int, v: int) -> int:
        return self.mul(u, self.inv(v))

    def pow(self, u: int, e: int) -> int:
        if e == 0:
            return 1
        if not u:
            if e < 0:
                raise ZeroDivisionError("zero to a negative power")
            return 0
        if self.k == 1:
            return pow(u, e, self.p)
        exp, logs, _ = self._tables
        return exp[logs[u] * e % (self.q - 1)]

    def log(self, u: int) -> int:
        if not u:
            raise DomainError(ErrorTag.DEGENERATE_INPUT, "log of zero")
        return self._tables[1][u]

    def frobenius(self, u: int) -> int:
        return self.pow(u, self.p)

    def element_degree(self, u: int) -> int:
        """Degree over F_p of the subfield generated by u."""
        for d in sympy.divisors(self.k):
            if self.pow(u, self.p**d) == u:
                return int(d)
        return self.k

    def multiplicative_order(self, u: int) -> int:
        q1 = self.q - 1
        return q1 // gcd(self.log(u), q1)

    def nth_roots(self, u: int, n: int) -> list[int]:
        """All y with y^n = u, sorted by encoding; empty when u is not an n-th power here."""
        if not u:
            raise DomainError(ErrorTag.DEGENERATE_INPUT, "n-th root of zero")
        if n < 1:
            raise DomainError(ErrorTag.DEGENERATE_INPUT, "root index must be positive")
        q1 = self.q - 1
        lu = self.log(u)
        g = gcd(n, q1)
        if lu % g:
            return []
        step = q1 // g
        s0 = (lu // g) * pow(n // g, -1, step) % step if step > 1 else 0
        exp = self._tables[0]
        return sorted(exp[(s0 + t * step) % q1] for t in range(g))

    def elements(self) -> range:
        return range(self.q)

    def nonzero(self) -> range:
        return range(1, self.q)

    def gen(self) -> GFElement:
        """Class of the basis variable (0 in the prime field, where the modulus is X)."""
        return GFElement(self, self.p if self.k > 1 else 0)

    def __call__(self, value: int | Fraction | GFElement) -> GFElement:
        if isinstance(value, GFElement):
            return value
        return GFElement(self, _coerce_scalar(self, value))


def _coerce_scalar(field: GaloisField, value: int | Fraction) -> int:
    if isinstance(value, Fraction):
        if value.denominator % field.p == 0:
            raise ZeroDivisionError(f"{value} has no image in {field!r}")
        return field.mul(field.from_int(value.numerator), field.inv(field.from_int(value.denominator)))
    return field.from_int(int(value))


class GFElement:
    __slots__ = ("field", "value")

    def __init__(self, field: GaloisField, value: int):
        self.field = field
        self.value = value

    def _other(self, other) -> Optional[int]:
        if isinstance(other, GFElement):
            if other.field.q != self.field.q or other.field.p != self.field.p:
                raise TypeError(f"mixing {self.field!r} and {other.field!r}")
            return other.value
        if isinstance(other, (int, Fraction)):
            return _coerce_scalar(self.field, other)
        return None

    def _new(self, v: int) -> GFElement:
        return GFElement(self.field, v)

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else self._new(self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else self._new(self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else self._new(self.field.sub(o, self.value))

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else self._new(self.field.mul(self.value, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else self._new(self.field.div(self.value, o))

    def __rtruediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else self._new(self.field.div(o, self.value))

    def __neg__(self):
        return self._new(self.field.neg(self.value))

    def __pow__(self, e: int):
        return self._new(self.field.pow(self.value, e))

    def __eq__(self, other) -> bool:
        try:
            o = self._other(other)
        except (TypeError, ZeroDivisionError):
            return False
        return o is not None and o == self.value

    def __hash__(self) -> int:
        # prime-subfield elements hash like their representative in [0, p), which they equal
        if self.value < self.field.p:
            return hash(self.value)
        return hash((self.field.p, self.field.k, self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __lt__(self, other: GFElement) -> bool:
        return self.value < other.value

    def __repr__(self) -> str:
        if self.field.k == 1:
            return str(self.value)
        return "[" + ",".join(str(c) for c in self.coeffs) + "]"

    @property
    def coeffs(self) -> list[int]:
        return self.field.digits(self.value)

    def sort_key(self) -> int:
        return self.value

    def is_unit(self) -> bool:
        return self.value != 0

    def inverse(self) -> GFElement:
        return self._new(self.field.inv(self.value))

    def frobenius(self) -> GFElement:
        return self._new(self.field.frobenius(self.value))

    def degree(self) -> int:
        return self.field.element_degree(self.value)

    def multiplicative_order(self) -> int:
        return self.field.multiplicative_order(self.value)

    def nth_roots(self, n: int) -> list[GFElement]:
        return [self._new(v) for v in self.field.nth_roots(self.value, n)]


@lru_cache(maxsize=None)
def galois_field(p: int, k: int = 1) -> GaloisField:
    return GaloisField(p, k)


def nth_root(e: GFElement, n: int) -> list[GFElement]:
    """All solutions of y^n = e inside e's field; the caller may enlarge the field."""
    return e.nth_roots(n)


def iter_elements(field: GaloisField, nonzero: bool = False) -> Iterator[GFElement]:
    for v in field.nonzero() if nonzero else field.elements():
        yield GFElement(field, v)
