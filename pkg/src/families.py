from __future__ import annotations
from dataclasses import dataclass, field as dc_field
from enum import Enum
from fractions import Fraction
from math import comb, factorial, gcd
from typing import Any, Optional
import logging

import mpmath
import sympy

from .algebra import (
    Polynomial,
    discriminant,
    factorize,
    format_factorization,
    is_irreducible_mod_p,
    is_irreducible_over_q,
    reduce_mod,
)
from .errors import DomainError, ErrorTag
from .fqsolver import solve_over_fq
from .models import Model, ValencyType
from .reduction import DVariant, Locus, classify_prime, d_invariant, h_p, ramification_bound_report
from .trees import count_trees, linear_arrangement_count

log = logging.getLogger(__name__)

NUMERIC_DPS = 60
NUMERIC_TOLERANCE = mpmath.mpf("1e-30")


# (a, b)


def family_ab(a: int, b: int) -> Model:
    """(1 - bX)^a (1 + aX)^b, the standard model of the two-vertex type."""
    if not 0 < a < b:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, f"need 0 < a < b, got ({a}, {b})")
    return Model((a, b), (Fraction(b), Fraction(-a)))


# (a, b, c)


def family_abc_disc(a: int, b: int, c: int) -> int:
    """-abc(a+b+c): the moduli and splitting fields are Q(sqrt of this)."""
    if min(a, b, c) < 1:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "valencies must be positive")
    return -a * b * c * (a + b + c)


def squarefree_part(m: int) -> int:
    """Signed squarefree kernel, so Q(sqrt(m)) = Q(sqrt(squarefree_part(m)))."""
    if m == 0:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "zero has no squarefree part")
    core = 1
    for q, e in factorize(m).items():
        if e % 2:
            core *= q
    return core if m > 0 else -core


class AbcCase(str, Enum):
    SPLIT_AS_CHAR0 = "SPLIT_AS_CHAR0"
    EMPTY = "EMPTY"
    UNIQUE_RATIONAL = "UNIQUE_RATIONAL"


@dataclass(frozen=True)
class AbcTrichotomy:
    exponents: tuple[int, int, int]
    p: int
    case: AbcCase
    D: int
    d: int
    disc_is_square: Optional[bool]
    # normalized models over the algebraic closure: 6 for a<b<c, 3 for (a,a,c), 1 for (a,a,a)
    model_count: int = 6

    @property
    def expected_fp(self) -> int:
        """Normalized models with all roots in F_p."""
        if self.case is AbcCase.EMPTY:
            return 0
        if self.case is AbcCase.UNIQUE_RATIONAL:
            return 3
        return self.model_count if self.disc_is_square else 0

    @property
    def expected_fp2(self) -> int:
        return {AbcCase.EMPTY: 0, AbcCase.UNIQUE_RATIONAL: 3}.get(self.case, self.model_count)


def family_abc_fp_trichotomy(a: int, b: int, c: int, p: int) -> AbcTrichotomy:
    if (6 * a * b * c * (a + b + c)) % p == 0:
        raise DomainError(ErrorTag.WILD_PRIME, f"{p} divides 6abc(a+b+c)")
    D = (a + b) * (b + c) * (c + a)
    d = gcd(a + b, b + c) * gcd(b + c, c + a) * gcd(c + a, a + b)
    square = None
    if d % p == 0:
        case = AbcCase.EMPTY
    elif D % p == 0:
        case = AbcCase.UNIQUE_RATIONAL
    else:
        case = AbcCase.SPLIT_AS_CHAR0
        square = sympy.legendre_symbol(family_abc_disc(a, b, c) % p, p) == 1
    models = linear_arrangement_count(ValencyType.of((a, b, c)))
    return AbcTrichotomy((a, b, c), p, case, D, d, square, models)


def abc_crosscheck(a: int, b: int, c: int, p: int) -> bool:
    """Model counts over F_p and F_{p^2} agree with the trichotomy."""
    verdict = family_abc_fp_trichotomy(a, b, c, p)
    t = ValencyType.of((a, b, c))
    over_p = len(solve_over_fq(t, p, 1))
    over_p2 = len(solve_over_fq(t, p, 2))
    ok = (over_p, over_p2) == (verdict.expected_fp, verdict.expected_fp2)
    if not ok:
        log.warning("(%d,%d,%d) at %d: found %d/%d models", a, b, c, p, over_p, over_p2)
    return ok


# (1, ..., 1, a, b)


def _check_ones_ab(n: int, a: int, b: int) -> None:
    if n < 3 or not 1 < a < b:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, f"need n >= 3 and 1 < a < b, got ({n}, {a}, {b})")


def ones_ab_type(n: int, a: int, b: int) -> ValencyType:
    return ValencyType((1,) * (n - 2) + (a, b))


def family_ones_ab_hpoly(n: int, a: int, b: int) -> Polynomial:
    """h(X) = sum_k C(a+k-1, a-1) C(b+n-2-k, b-1) X^k."""
    _check_ones_ab(n, a, b)
    return Polynomial(comb(a + k - 1, a - 1) * comb(b + n - 2 - k, b - 1) for k in range(n))


@dataclass
class HPolyData:
    n: int
    a: int
    b: int
    hpoly: Polynomial
    discriminant: int
    disc_factorization: dict[int, int]
    irreducible_over_q: bool
    mod2: Polynomial
    mod2_irreducible: bool
    tree_count: int

    @property
    def disc_pretty(self) -> str:
        sign = "-" if self.discriminant < 0 else ""
        return sign + format_factorization(self.disc_factorization)


def family_ones_ab_summary(n: int, a: int, b: int) -> HPolyData:
    h = family_ones_ab_hpoly(n, a, b)
    disc = discriminant(h)
    mod2 = reduce_mod(h, 2)
    return HPolyData(
        n,
        a,
        b,
        h,
        disc,
        factorize(disc),
        is_irreducible_over_q(h),
        mod2,
        is_irreducible_mod_p(h, 2),
        count_trees(ones_ab_type(n, a, b)),
    )


@dataclass(frozen=True)
class RegularityConstants:
    n: int
    a: int
    b: Optional[int]
    c: int
    c_factorization: dict[int, int]
    u: Optional[int]
    u_factorization: Optional[dict[int, int]]

    @property
    def c_support(self) -> list[int]:
        return list(self.c_factorization)

    @property
    def u_support(self) -> Optional[list[int]]:
        return None if self.u_factorization is None else list(self.u_factorization)


def regularity_c(n: int, a: int) -> int:
    """(n-2)! (a+n-2)! / (a-1)!"""
    if n < 2 or a < 2:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "c(n, a) needs n >= 2 and a > 1")
    return factorial(n - 2) * factorial(a + n - 2) // factorial(a - 1)


def regularity_u(n: int, a: int, b: int) -> int:
    """(n-2)! (a+n-2)! (b+n-2)! (a+b+n-3)! / ((a-1)! (b-1)! (a+b-1)!)"""
    _check_ones_ab(n, a, b)
    top = factorial(n - 2) * factorial(a + n - 2) * factorial(b + n - 2) * factorial(a + b + n - 3)
    return top // (factorial(a - 1) * factorial(b - 1) * factorial(a + b - 1))


def family_regularity_constants(n: int, a: int, b: Optional[int] = None) -> RegularityConstants:
    c = regularity_c(n, a)
    u = None if b is None else regularity_u(n, a, b)
    return RegularityConstants(n, a, b, c, factorize(c), u, None if u is None else factorize(u))


def regularity_supports_agree(n: int, a: int, b: int) -> bool:
    """c(n, a) and u(n, a, b) share prime supports with d_b and d_infinity of the type."""
    t = ones_ab_type(n, a, b)
    constants = family_regularity_constants(n, a, b)
    d_b = d_invariant(t, DVariant.OMIT, t.n - 1)
    d_inf = d_invariant(t, DVariant.PROPER)
    return list(d_b.support) == constants.c_support and list(d_inf.support) == constants.u_support


@dataclass
class OnesAbModel:
    """Normalized model x_n = 1, x_{n-1} = x with x the chosen root of h.

    The exact data is `root` (a CRootOf); everything numeric is a sanity
    layer computed at NUMERIC_DPS digits.
    """

    n: int
    a: int
    b: int
    index: int
    hpoly: Polynomial
    root: Any
    root_value: Any
    u: Any
    remaining_roots: list[Any]
    beta_at_one: Any
    beta_at_inverse_root: Any
    max_residual: Any
    exact_check: Optional[bool] = None
    relations: list[str] = dc_field(default_factory=list)

    @property
    def verified(self) -> bool:
        return self.max_residual < NUMERIC_TOLERANCE and self.exact_check is not False


def _mp_value(value: Any) -> Any:
    v = sympy.N(value, NUMERIC_DPS + 10)
    return mpmath.mpc(str(sympy.re(v)), str(sympy.im(v)))


def _poly_divmod(num: Polynomial, den: Polynomial) -> tuple[Polynomial, list[Any]]:
    rem = list(num.coeffs)
    size = len(den.coeffs)
    quotient = [0] * (len(rem) - size + 1)
    lead = den.coeffs[-1]
    for k in range(len(rem) - size, -1, -1):
        c = rem[k + size - 1] / lead
        quotient[k] = c
        for j, d in enumerate(den.coeffs):
            rem[k + j] -= c * d
    return Polynomial(quotient), rem[: size - 1]


def _resolve_root(h: Polynomial, root: int | sympy.Expr) -> tuple[int, Any]:
    poly = h.to_sympy()
    expr, var = poly.as_expr(), poly.gens[0]
    if isinstance(root, int):
        if not 0 <= root < h.degree:
            raise DomainError(ErrorTag.BAD_ROOT, f"h has {h.degree} roots, index {root} is out of range")
        return root, sympy.CRootOf(expr, root)
    if sympy.simplify(expr.subs(var, root)) != 0:
        raise DomainError(ErrorTag.BAD_ROOT, f"{root} is not a root of h")
    for i in range(h.degree):
        candidate = sympy.CRootOf(expr, i)
        if abs(sympy.N(candidate - root, NUMERIC_DPS)) < sympy.Float(10) ** (-NUMERIC_DPS // 2):
            return i, candidate
    raise DomainError(ErrorTag.BAD_ROOT, f"could not isolate {root} among the roots of h")


def family_ones_ab_model(n: int, a: int, b: int, root: int | sympy.Expr = 0) -> OnesAbModel:
    """beta'(X) = u X^{n-1} (1 - xX)^{a-1} (1 - X)^{b-1}, beta(0) = 1, beta(1) = beta(1/x) = 0.

    `root` is an index into sympy's CRootOf ordering of h (real roots
    ascending, then complex ones) or an exact root expression.
    """
    h = family_ones_ab_hpoly(n, a, b)
    index, x_exact = _resolve_root(h, root)
    with mpmath.workdps(NUMERIC_DPS):
        x = _mp_value(x_exact)
        one = mpmath.mpf(1)
        integrand = (
            Polynomial.monomial(n - 1, one) * Polynomial([one, -x]) ** (a - 1) * Polynomial([one, -one]) ** (b - 1)
        )
        integral = Polynomial([0] + [c / (k + 1) for k, c in enumerate(integrand.coeffs)])
        u = -1 / integral(one)
        beta = integral * u + 1
        fixed = Polynomial([one, -x]) ** a * Polynomial([one, -one]) ** b
        quotient, remainder = _poly_divmod(beta, fixed)
        # quotient = prod (1 - x_j X) over the simple roots
        remaining = [mpmath.mpc(r) for r in mpmath.polyroots(quotient.coeffs, maxsteps=200, extraprec=200)]
        exps = (1,) * (n - 2) + (a, b)
        roots = remaining + [x, one]
        residuals = [abs(sum(e * r**m for e, r in zip(exps, roots))) for m in range(1, n)]
        residuals += [abs(c) for c in remainder]
        beta_one, beta_inv = beta(one), beta(1 / x)
        max_residual = max(residuals + [abs(beta_one), abs(beta_inv)])
    exact = None
    if n == 3:
        X = sympy.Symbol("X")
        relation = sympy.expand((a * X + b) ** 2 + a * X**2 + b)
        hx = h.to_sympy().as_expr().subs(h.to_sympy().gens[0], X)
        exact = sympy.rem(relation, hx, X) == 0
    relations = [
        f"h(x) = 0 with h = {h.pretty()}",
        f"sum_j a_j x_j^m = 0 for m = 1..{n - 1}",
        "beta(1) = beta(1/x) = 0",
    ]
    model = OnesAbModel(
        n, a, b, index, h, x_exact, x, u, remaining, beta_one, beta_inv, max_residual, exact, relations
    )
    if not model.verified:
        raise DomainError(ErrorTag.INTERNAL_INCONSISTENCY, f"numeric residual {mpmath.nstr(max_residual, 5)}")
    return model


@dataclass(frozen=True)
class OrbitEvidence:
    n: int
    a: int
    b: int
    hpoly: Polynomial
    h_irreducible: bool
    criterion: str
    prime: Optional[int]


def _regular_prime_criterion(t: ValencyType) -> tuple[str, Optional[int]]:
    n, a, b = t.n, t.a[-2], t.a[-1]
    candidates = sorted({int(q) for v in (a, b, t.degree) for q in sympy.primefactors(v) if q > n})
    for p in candidates:
        cls = classify_prime(t, p)
        for slot in cls.regular_slots:
            if ramification_bound_report(t, p, Locus.ZERO, slot).lower == n - 1:
                return ("a-regular" if t.a[slot] == a else "b-regular"), p
        if cls.at_infinity and ramification_bound_report(t, p, Locus.INFINITY).lower == n - 1:
            return "regular-at-infinity", p
    return "", None


def _cyclotomic_criterion(n: int, a: int, b: int) -> tuple[str, Optional[int]]:
    if not sympy.isprime(n):
        return "", None
    for p in sympy.primefactors(gcd(a - 1, b - 1)):
        p = int(p)
        if n % p == 0:
            continue
        modulus = p ** h_p(n, p)
        if (a - 1) % modulus or (b - 1) % modulus:
            continue
        if int(sympy.n_order(p, n)) == n - 1:
            return "cyclotomic", p
    return "", None


def galois_orbit_evidence(n: int, a: int, b: int) -> OrbitEvidence:
    """Q-irreducibility of h plus the first criterion that proves a single orbit."""
    h = family_ones_ab_hpoly(n, a, b)
    t = ones_ab_type(n, a, b)
    criterion, prime = _regular_prime_criterion(t)
    if not criterion:
        criterion, prime = _cyclotomic_criterion(n, a, b)
    log.debug("(%d, %d, %d): criterion %r at %s", n, a, b, criterion, prime)
    return OrbitEvidence(n, a, b, h, is_irreducible_over_q(h), criterion, prime)
