from __future__ import annotations
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd
from typing import Optional, Sequence
import logging

from .algebra import INFINITY, p_valuation
from .errors import DomainError, ErrorTag
from .fields import GaloisField, GFElement, galois_field

log = logging.getLogger(__name__)

Row = tuple[int, ...]


class LocalRing:
    """Truncated local ring Z/p^M [S, T] / (g(S), T^e + c).

    g is the (integer) modulus of the residue field F_{p^f}, so the S-layer is
    the unramified extension of degree f. The optional twist (e, c) adjoins a
    root T of T^e + c with h = v_p(c); when e > 1 it must satisfy
    gcd(e, h) = 1, which makes the valuation extend uniquely. Valuations are
    reported in units where v(p) = e and v(T) = h.
    """

    def __init__(self, field: GaloisField, precision: int, twist: Optional[tuple[int, int]] = None):
        if precision < 1:
            raise DomainError(ErrorTag.DEGENERATE_INPUT, "precision must be >= 1")
        self.field = field
        self.p = field.p
        self.f = field.k
        self.precision = precision
        self.modulus_pm = self.p**precision
        self._g = [int(c) for c in field.modulus.coeffs[: self.f]]
        if twist is None:
            self.e, self.c, self.h = 1, 0, 0
        else:
            e, c = twist
            if e < 1 or c == 0:
                raise DomainError(ErrorTag.DEGENERATE_INPUT, f"bad twist T^{e} + {c}")
            h = int(p_valuation(c, self.p))
            if e > 1 and gcd(e, h) != 1:
                raise DomainError(
                    ErrorTag.UNSUPPORTED_RAMIFICATION,
                    f"T^{e} + {c}: gcd(e, v_p(c)) = gcd({e}, {h}) != 1",
                )
            self.e, self.c, self.h = e, c, h
        self.twist = twist
        self.key = (self.p, self.f, precision, twist)

    def __repr__(self) -> str:
        twist = "" if self.twist is None else f", T^{self.e}+{self.c}"
        return f"LocalRing(p={self.p}, f={self.f}, M={self.precision}{twist})"

    @property
    def is_unramified(self) -> bool:
        return self.e == 1

    def with_precision(self, precision: int) -> LocalRing:
        return local_ring(self.p, self.f, precision, self.twist)

    def describe(self) -> dict:
        return {
            "p": self.p,
            "modulus": [int(c) for c in self.field.modulus.coeffs],
            "twist": None if self.twist is None else [self.e, self.c],
            "precision": self.precision,
        }

    # row arithmetic in Z/p^M [S]/(g)

    def _zero_row(self) -> Row:
        return (0,) * self.f

    def _row_add(self, a: Row, b: Row) -> Row:
        m = self.modulus_pm
        return tuple((x + y) % m for x, y in zip(a, b))

    def _row_neg(self, a: Row) -> Row:
        m = self.modulus_pm
        return tuple(-x % m for x in a)

    def _row_scale(self, a: Row, s: int) -> Row:
        m = self.modulus_pm
        return tuple(x * s % m for x in a)

    def _row_mul(self, a: Row, b: Row) -> Row:
        f, m = self.f, self.modulus_pm
        if f == 1:
            return (a[0] * b[0] % m,)
        prod = [0] * (2 * f - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        for d in range(2 * f - 2, f - 1, -1):
            c = prod[d]
            if c:
                for j in range(f):
                    prod[d - f + j] -= c * self._g[j]
            prod[d] = 0
        return tuple(x % m for x in prod[:f])

    def _row_valuation(self, a: Row) -> int | float:
        return min((p_valuation(x, self.p) for x in a if x), default=INFINITY)

    # constructors

    def element(self, rows: Sequence[Sequence[int]]) -> LocalElement:
        m = self.modulus_pm
        grid = [tuple(int(x) % m for x in row) + (0,) * (self.f - len(row)) for row in rows]
        grid += [self._zero_row()] * (self.e - len(grid))
        return LocalElement(self, tuple(grid[: self.e]))

    def from_int(self, n: int) -> LocalElement:
        rows = [self._zero_row()] * self.e
        rows[0] = (n % self.modulus_pm,) + (0,) * (self.f - 1)
        return LocalElement(self, tuple(rows))

    def from_fraction(self, x: Fraction) -> LocalElement:
        if x.denominator % self.p == 0:
            raise ZeroDivisionError(f"{x} is not {self.p}-integral")
        m = self.modulus_pm
        return self.from_int(x.numerator * pow(x.denominator, -1, m))

    def zero(self) -> LocalElement:
        return self.from_int(0)

    def one(self) -> LocalElement:
        return self.from_int(1)

    def lift(self, x: GFElement) -> LocalElement:
        """Naive lift of a residue: its F_p digits placed in the constant S-row."""
        if x.field.p != self.p or x.field.k != self.f:
            raise TypeError(f"cannot lift {x.field!r} into {self!r}")
        return self.element([x.coeffs])

    def reduce(self, x: LocalElement) -> GFElement:
        return GFElement(self.field, self.field.from_coeffs([c % self.p for c in x.rows[0]]))

    def coerce(self, value) -> Optional[LocalElement]:
        if isinstance(value, LocalElement):
            if value.ring.key != self.key:
                raise TypeError(f"mixing {value.ring!r} and {self!r}")
            return value
        if isinstance(value, int):
            return self.from_int(value)
        if isinstance(value, Fraction):
            return self.from_fraction(value)
        if isinstance(value, GFElement):
            return self.lift(value)
        return None

    def twist_root(self) -> LocalElement:
        """The adjoined root T of T^e + c (for e = 1 this is the integer -c)."""
        if self.twist is None:
            raise DomainError(ErrorTag.NOT_APPLICABLE, "unramified ring has no twist root")
        if self.e == 1:
            return self.from_int(-self.c)
        rows = [self._zero_row()] * self.e
        rows[1] = (1,) + (0,) * (self.f - 1)
        return LocalElement(self, tuple(rows))

    def root_of_unity(self, zeta: GFElement, order: int) -> LocalElement:
        """Hensel lift of a residue root of unity of the given order."""
        if order % self.p == 0:
            raise DomainError(ErrorTag.WILD_PRIME, f"{self.p} divides {order}")
        if zeta ** order != 1:
            raise DomainError(ErrorTag.BAD_ROOT, f"{zeta!r} is not a root of unity of order {order}")
        y = self.lift(zeta)
        for _ in range(2 * self.precision.bit_length() + 4):
            step = (y ** order - 1) / (order * y ** (order - 1))
            if not step:
                break
            y = y - step
        return y

    @cached_property
    def _frobenius_image(self) -> LocalElement:
        # Hensel lift of S^p as a root of g
        base = self.with_precision(self.precision)
        s = base.lift(self.field.gen()) if self.f > 1 else base.zero()
        g = [base.from_int(c) for c in self._g] + [base.one()]
        y = s ** self.p
        for _ in range(2 * self.precision.bit_length() + 4):
            val = sum((c * y**j for j, c in enumerate(g)), base.zero())
            der = sum((j * c * y ** (j - 1) for j, c in enumerate(g) if j), base.zero())
            if not val:
                break
            y = y - val / der
        return y

    def frobenius(self, x: LocalElement) -> LocalElement:
        """Coefficient-wise Frobenius lift on the unramified layer."""
        if not self.is_unramified:
            raise DomainError(ErrorTag.NOT_APPLICABLE, "Frobenius lift needs an unramified ring")
        sigma = self._frobenius_image
        acc = self.zero()
        power = self.one()
        for c in x.rows[0]:
            acc = acc + power * c
            power = power * sigma
        return acc

    def divide_by_twist_root(self, x: LocalElement) -> LocalElement:
        """x / T, returned at precision M - h (division by p^h loses h digits)."""
        if self.twist is None:
            raise DomainError(ErrorTag.NOT_APPLICABLE, "unramified ring has no twist root")
        if self.precision <= self.h:
            raise DomainError(ErrorTag.DEGENERATE_INPUT, "precision too small to divide by T")
        z = -x if self.e == 1 else -(x * self.twist_root() ** (self.e - 1))
        ph = self.p**self.h
        if any(c % ph for row in z.rows for c in row):
            raise DomainError(ErrorTag.VALUATION_MISMATCH, "element is not divisible by the twist root")
        target = self.with_precision(self.precision - self.h)
        unit_inv = pow(self.c // ph, -1, target.modulus_pm)
        return target.element([[c // ph * unit_inv for c in row] for row in z.rows])

    def truncate(self, x: LocalElement, precision: int) -> LocalElement:
        return self.with_precision(precision).element(x.rows)


class LocalElement:
    __slots__ = ("ring", "rows")

    def __init__(self, ring: LocalRing, rows: tuple[Row, ...]):
        self.ring = ring
        self.rows = rows

    def _other(self, other) -> Optional[LocalElement]:
        return self.ring.coerce(other)

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        r = self.ring
        return LocalElement(r, tuple(r._row_add(a, b) for a, b in zip(self.rows, o.rows)))

    __radd__ = __add__

    def __neg__(self):
        r = self.ring
        return LocalElement(r, tuple(r._row_neg(a) for a in self.rows))

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else self + (-o)

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else o + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            r = self.ring
            return LocalElement(r, tuple(r._row_scale(a, other) for a in self.rows))
        o = self._other(other)
        if o is None:
            return NotImplemented
        r = self.ring
        e = r.e
        out = [r._zero_row()] * (2 * e - 1)
        for i, a in enumerate(self.rows):
            if not any(a):
                continue
            for j, b in enumerate(o.rows):
                if any(b):
                    out[i + j] = r._row_add(out[i + j], r._row_mul(a, b))
        # T^e = -c
        for d in range(2 * e - 2, e - 1, -1):
            if any(out[d]):
                out[d - e] = r._row_add(out[d - e], r._row_scale(out[d], -r.c))
        return LocalElement(r, tuple(out[:e]))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        return NotImplemented if o is None else o * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.ring.one(), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        try:
            o = self._other(other)
        except (TypeError, ZeroDivisionError):
            return False
        return o is not None and o.rows == self.rows

    def __hash__(self) -> int:
        return hash((self.ring.key, self.rows))

    def __bool__(self) -> bool:
        return any(any(row) for row in self.rows)

    def __lt__(self, other: LocalElement) -> bool:
        return self.rows < other.rows

    def __repr__(self) -> str:
        if self.ring.e == 1 and self.ring.f == 1:
            return f"{self.rows[0][0]} mod {self.ring.p}^{self.ring.precision}"
        return f"LocalElement({[list(r) for r in self.rows]})"

    @property
    def coeffs(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def sort_key(self) -> tuple:
        return self.rows

    def valuation(self) -> int | float:
        r = self.ring
        return min(
            (r.e * v + j * r.h for j, row in enumerate(self.rows) if (v := r._row_valuation(row)) != INFINITY),
            default=INFINITY,
        )

    def is_unit(self) -> bool:
        return any(c % self.ring.p for c in self.rows[0])

    def reduce(self) -> GFElement:
        return self.ring.reduce(self)

    def inverse(self) -> LocalElement:
        if not self.is_unit():
            raise ZeroDivisionError(f"{self!r} is not a unit")
        r = self.ring
        v = r.lift(self.reduce().inverse())
        # v <- v (2 - x v) squares the error each step
        for _ in range(2 * (r.e * (r.precision + r.h)).bit_length() + 4):
            uv = self * v
            if uv == 1:
                return v
            v = v * (2 - uv)
        raise DomainError(ErrorTag.INTERNAL_INCONSISTENCY, "inverse iteration did not stabilise")


@lru_cache(maxsize=None)
def local_ring(p: int, f: int, precision: int, twist: Optional[tuple[int, int]] = None) -> LocalRing:
    return LocalRing(galois_field(p, f), precision, twist)
