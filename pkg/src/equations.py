from __future__ import annotations
from dataclasses import dataclass
from math import comb, factorial
from typing import Any, Optional, Sequence

from .algebra import Polynomial, determinant, poly_valuation_at_zero, vandermonde
from .errors import DomainError, ErrorTag
from .models import Model, root_key


def _one(x: Any) -> Any:
    return x**0


def _zero(x: Any) -> Any:
    return x * 0


def _factor_series(x: Any, a: int, order: int, sign: int) -> list[Any]:
    # (1 + sign*x*X)^a truncated to degree < order
    terms = []
    power = _one(x)
    step = x if sign > 0 else -x
    for k in range(min(a, order - 1) + 1):
        terms.append(power * comb(a, k))
        power = power * step
    return terms


def _series_mul(f: list[Any], g: list[Any], order: int) -> list[Any]:
    out: list[Any] = [None] * min(order, len(f) + len(g) - 1)
    for i, x in enumerate(f):
        if i >= order or not x:
            continue
        for j, y in enumerate(g):
            if i + j >= order:
                break
            t = x * y
            out[i + j] = t if out[i + j] is None else out[i + j] + t
    zero = _zero(f[0])
    return [zero if c is None else c for c in out]


def _product_series(exponents: Sequence[int], roots: Sequence[Any], order: int, sign: int) -> list[Any]:
    acc = [_one(roots[0])]
    for a, x in zip(exponents, roots):
        acc = _series_mul(acc, _factor_series(x, a, order, sign), order)
    zero = _zero(roots[0])
    return acc + [zero] * (order - len(acc))


def expand(model: Model, order: Optional[int] = None) -> Polynomial:
    """prod (1 - x_i X)^{a_i}, optionally truncated to degree < order."""
    full = model.degree + 1
    order = full if order is None else min(order, full)
    return Polynomial(_product_series(model.exponents, model.roots, order, -1))


def psi(m: int, model: Model) -> Any:
    """psi_m: the X^m coefficient of prod (1 + x_i X)^{a_i}."""
    if m < 1:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "psi index must be >= 1")
    return _product_series(model.exponents, model.roots, m + 1, 1)[m]


def psi_values(model: Model, upto: int) -> list[Any]:
    """[psi_1, ..., psi_upto] from one truncated product."""
    series = _product_series(model.exponents, model.roots, upto + 1, 1)
    return series[1: upto + 1]


def phi(m: int, model: Model) -> Any:
    if m < 1:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "phi index must be >= 1")
    return sum((a * x**m for a, x in zip(model.exponents, model.roots)), _zero(model.roots[0]))


@dataclass(frozen=True)
class ConditionReport:
    i: bool
    ii: bool
    iii: bool
    iv: bool

    def all(self) -> bool:
        return self.i and self.ii and self.iii and self.iv

    def as_dict(self) -> dict[str, bool]:
        return {"i": self.i, "ii": self.ii, "iii": self.iii, "iv": self.iv}


def _require_model(model: Model) -> None:
    if not model.has_distinct_roots():
        raise DomainError(ErrorTag.NOT_A_MODEL, "roots are not pairwise distinct")
    if any(not x for x in model.roots):
        raise DomainError(ErrorTag.NOT_A_MODEL, "roots must be nonzero")


def condition_iv(model: Model) -> bool:
    xs, n, N = model.roots, model.n, model.degree
    for i in range(n):
        lhs = _one(xs[0]) * model.exponents[i]
        rhs = _one(xs[0]) * N
        for j in range(n):
            if j != i:
                lhs = lhs * (xs[j] - xs[i])
                rhs = rhs * xs[j]
        if lhs != rhs:
            return False
    return True


def check_conditions(model: Model) -> ConditionReport:
    """Evaluate all four equivalent characterizations; none short-circuits another."""
    _require_model(model)
    n = model.n
    beta = expand(model, order=n + 1)
    return ConditionReport(
        i=poly_valuation_at_zero(beta - 1) == n,
        ii=all(not v for v in psi_values(model, n - 1)),
        iii=all(not phi(m, model) for m in range(1, n)),
        iv=condition_iv(model),
    )


def derivative_identity_check(model: Model) -> bool:
    """beta'(X) == (-1)^n x_1...x_n N X^{n-1} prod (1 - x_i X)^{a_i - 1}."""
    xs, n = model.roots, model.n
    lead = _one(xs[0]) * ((-1) ** n * model.degree)
    for x in xs:
        lead = lead * x
    reduced = Model(tuple(a - 1 for a in model.exponents), xs)
    closed = Polynomial.monomial(n - 1, lead) * expand(reduced)
    return expand(model).derivative() == closed


def kummer_invariant(model: Model) -> Any:
    """t(beta) = (-1)^{n-1} x_1...x_n N, cross-checked against phi_n."""
    xs, n = model.roots, model.n
    t = _one(xs[0]) * ((-1) ** (n - 1) * model.degree)
    for x in xs:
        t = t * x
    if t != phi(n, model):
        raise DomainError(
            ErrorTag.INTERNAL_INCONSISTENCY, "t(beta) and phi_n disagree; phi_1..phi_{n-1} do not vanish"
        )
    return t


def _invert(d: Any) -> Any:
    try:
        return 1 / d
    except (ZeroDivisionError, DomainError):
        raise DomainError(ErrorTag.NOT_A_MODEL, "root difference is not invertible")


def partial_fraction_identity_check(roots: Sequence[Any]) -> bool:
    """sum_i y_i prod_{j != i} (1 - x_j X) == X^{n-1}, y_i = prod_{j != i} (x_i - x_j)^{-1}."""
    if len({root_key(x) for x in roots}) != len(roots):
        raise DomainError(ErrorTag.NOT_A_MODEL, "roots are not pairwise distinct")
    one = _one(roots[0])
    total = Polynomial()
    for i, xi in enumerate(roots):
        y = one
        term = Polynomial([one])
        for j, xj in enumerate(roots):
            if j != i:
                y = y * _invert(xi - xj)
                term = term * Polynomial([one, -xj])
        total = total + term * y
    return total == Polynomial.monomial(len(roots) - 1, one)


# Jacobians of the psi and phi systems


def psi_jacobian(exponents: Sequence[int], roots: Sequence[Any], free: Sequence[int]) -> list[list[Any]]:
    """d psi_m / d x_j for m = 1..len(free), j in free.

    d psi_m / d x_j = a_j [X^{m-1}] (1 + x_j X)^{a_j - 1} prod_{i != j} (1 + x_i X)^{a_i}.
    """
    size = len(free)
    cols = []
    for j in free:
        exps = list(exponents)
        exps[j] -= 1
        series = _product_series(exps, roots, size, 1)
        cols.append([series[m - 1] * exponents[j] for m in range(1, size + 1)])
    return [[cols[c][r] for c in range(size)] for r in range(size)]


def phi_jacobian(exponents: Sequence[int], roots: Sequence[Any], free: Sequence[int]) -> list[list[Any]]:
    """d phi_m / d x_j = m a_j x_j^{m-1} for m = 1..len(free)."""
    size = len(free)
    return [[roots[j] ** (m - 1) * (m * exponents[j]) for j in free] for m in range(1, size + 1)]


def psi_jacobian_closed_form(exponents: Sequence[int], roots: Sequence[Any], free: Sequence[int]) -> Any:
    """prod_{j free} a_j * prod_{i<j free} (x_i - x_j)."""
    acc = _one(roots[0])
    for j in free:
        acc = acc * exponents[j]
    return acc * vandermonde([roots[j] for j in free], descending=True)


def phi_jacobian_closed_form(exponents: Sequence[int], roots: Sequence[Any]) -> Any:
    """n! prod a_j prod_{i<j} (x_j - x_i) for the full n-variable system."""
    acc = _one(roots[0]) * factorial(len(roots))
    for a in exponents:
        acc = acc * a
    return acc * vandermonde(roots)


def jacobian_witness(kind: str, exponents: Sequence[int], roots: Sequence[Any], free: Sequence[int]) -> Any:
    """Closed-form determinant, required to agree with the direct expansion."""
    if kind == "psi":
        direct = determinant(psi_jacobian(exponents, roots, free))
        closed = psi_jacobian_closed_form(exponents, roots, free)
    else:
        direct = determinant(phi_jacobian(exponents, roots, free))
        closed = phi_jacobian_closed_form([exponents[j] for j in free], [roots[j] for j in free])
    if direct != closed:
        raise DomainError(ErrorTag.INTERNAL_INCONSISTENCY, f"{kind} Jacobian closed form disagrees")
    return closed
