from __future__ import annotations
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Optional, Sequence
import logging

from . import config
from .algebra import Polynomial, p_valuation
from .equations import (
    expand,
    jacobian_witness,
    phi,
    phi_jacobian,
    phi_jacobian_closed_form,
    psi_jacobian,
    psi_jacobian_closed_form,
    psi_values,
)
from .errors import DomainError, ErrorTag
from .fields import GaloisField, GFElement
from .localrings import LocalElement, LocalRing, local_ring
from .models import Model, ModelKind, ValencyType, root_key
from .reduction import Locus, classify_prime

log = logging.getLogger(__name__)

SCHEDULES = ("quadratic", "chord")


class Direction(str, Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


@dataclass
class LiftResult:
    model: Model
    precision: int
    jacobian_unit_witness: Any
    reduction: Model
    schedule: str = "quadratic"
    steps: int = 0


@dataclass(frozen=True)
class TwistDescriptor:
    """x = zeta~ * T with x^{n-1} + constant = 0; e = n - 1, h = v_p(constant)."""

    ring: LocalRing
    x: LocalElement
    e: int
    h: int
    constant: int
    zeta: GFElement


# Newton engine over a local ring


def solve_linear(matrix: Sequence[Sequence[Any]], rhs: Sequence[Any]) -> list[Any]:
    """Gaussian elimination where every pivot must be a unit."""
    n = len(matrix)
    rows = [list(row) + [r] for row, r in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col].is_unit()), None)
        if pivot is None:
            raise DomainError(ErrorTag.SINGULAR_POINT, "Jacobian has no unit pivot")
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [v * inv for v in rows[col]]
        for r in range(n):
            if r != col and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[col])]
    return [row[n] for row in rows]


def _step_bound(ring: LocalRing, schedule: str) -> int:
    depth = ring.e * ring.precision + (ring.e - 1) * ring.h
    if schedule == "chord":
        return depth + 4
    return 2 * depth.bit_length() + 4


def newton(
    residual: Callable[[list[Any]], list[Any]],
    jacobian: Callable[[list[Any]], list[list[Any]]],
    start: Sequence[Any],
    ring: LocalRing,
    schedule: str = "quadratic",
) -> tuple[list[Any], int]:
    """Iterate until the residuals vanish exactly in the truncated ring.

    "quadratic" re-evaluates the Jacobian every step; "chord" keeps the one
    from the start point and converges linearly.
    """
    if schedule not in SCHEDULES:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, f"unknown schedule {schedule!r}")
    xs = list(start)
    frozen = jacobian(xs) if schedule == "chord" else None
    for step in range(_step_bound(ring, schedule)):
        values = residual(xs)
        if not any(values):
            return xs, step
        delta = solve_linear(frozen if frozen is not None else jacobian(xs), values)
        xs = [x - d for x, d in zip(xs, delta)]
    if not any(residual(xs)):
        return xs, _step_bound(ring, schedule)
    raise DomainError(ErrorTag.INTERNAL_INCONSISTENCY, "Newton iteration did not converge")


def _residue_field(model: Model) -> GaloisField:
    root = model.roots[0]
    if not isinstance(root, GFElement):
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "residue model must live in a finite field")
    return root.field


def _require_distinct(roots: Sequence[Any]) -> None:
    if len({root_key(x) for x in roots}) != len(roots) or any(not x for x in roots):
        raise DomainError(ErrorTag.NOT_A_MODEL, "roots must be distinct and nonzero")


def _check_reduction(lifted: Sequence[LocalElement], residues: Sequence[GFElement]) -> None:
    if any(x.reduce() != r for x, r in zip(lifted, residues)):
        raise DomainError(ErrorTag.INTERNAL_INCONSISTENCY, "lift does not reduce to its residue")


def _require_unit(witness: Any) -> None:
    if not witness.is_unit():
        raise DomainError(ErrorTag.SINGULAR_POINT, "Jacobian determinant is not a unit")


def hensel_lift_normalized(
    residue_model: Model, precision: Optional[int] = None, schedule: str = "quadratic"
) -> LiftResult:
    """Unique lift of a normalized model through psi_1 = ... = psi_{n-1} = 0."""
    F = _residue_field(residue_model)
    M = precision or config.precision()
    exps, res = residue_model.exponents, residue_model.roots
    _require_distinct(res)
    fixed = max((i for i, x in enumerate(res) if x == 1), default=None)
    if fixed is None:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "residue model is not normalized")
    free = [i for i in range(len(res)) if i != fixed]
    _require_unit(psi_jacobian_closed_form(exps, res, free))
    ring = local_ring(F.p, F.k, M)

    def full(vars_: list[Any]) -> list[Any]:
        roots = list(vars_)
        roots.insert(fixed, ring.one())
        return roots

    def residual(vars_: list[Any]) -> list[Any]:
        return psi_values(Model(exps, tuple(full(vars_))), len(res) - 1)

    def jacobian(vars_: list[Any]) -> list[list[Any]]:
        return psi_jacobian(exps, full(vars_), free)

    start = [ring.lift(res[i]) for i in free]
    solution, steps = newton(residual, jacobian, start, ring, schedule)
    lifted = full(solution)
    _check_reduction(lifted, res)
    witness = jacobian_witness("psi", exps, lifted, free)
    _require_unit(witness)
    log.debug("normalized lift of %s to precision %d in %d steps", exps, M, steps)
    model = Model(exps, tuple(lifted), ModelKind.NORMALIZED, fixed)
    return LiftResult(model, M, witness, residue_model, schedule, steps)


def hensel_lift_kummer(
    residue_model: Model, precision: Optional[int] = None, schedule: str = "quadratic"
) -> LiftResult:
    """Unique lift through phi_1 = ... = phi_{n-1} = 0, phi_n = 1."""
    F = _residue_field(residue_model)
    M = precision or config.precision()
    exps, res = residue_model.exponents, residue_model.roots
    n = len(res)
    if F.p <= n:
        raise DomainError(ErrorTag.WILD_PRIME, f"Kummer lifting needs p > n, got p = {F.p}")
    _require_distinct(res)
    if any(phi(m, residue_model) for m in range(1, n)) or phi(n, residue_model) != 1:
        raise DomainError(ErrorTag.NOT_A_MODEL, "residue model is not a Kummer model")
    free = list(range(n))
    _require_unit(phi_jacobian_closed_form(exps, res))
    ring = local_ring(F.p, F.k, M)

    def residual(roots: list[Any]) -> list[Any]:
        model = Model(exps, tuple(roots))
        return [phi(m, model) for m in range(1, n)] + [phi(n, model) - 1]

    def jacobian(roots: list[Any]) -> list[list[Any]]:
        return phi_jacobian(exps, roots, free)

    solution, steps = newton(residual, jacobian, [ring.lift(x) for x in res], ring, schedule)
    _check_reduction(solution, res)
    witness = jacobian_witness("phi", exps, solution, free)
    _require_unit(witness)
    model = Model(exps, tuple(solution), ModelKind.KUMMER)
    return LiftResult(model, M, witness, residue_model, schedule, steps)


def frobenius_lift(model: Model) -> Model:
    """Apply the coefficient-wise Frobenius lift to every root of an unramified model."""
    ring = model.roots[0].ring
    return model.map_roots(ring.frobenius)


def twist_descriptor(
    field: GaloisField, n: int, constant: int, precision: Optional[int] = None, zeta: Optional[GFElement] = None
) -> TwistDescriptor:
    """Ring Z_p[S, T]/(g, T^{n-1} + constant) and the root x = zeta~ * T."""
    M = precision or config.precision()
    e = n - 1
    ring = local_ring(field.p, field.k, M, (e, constant))
    zeta = field(1) if zeta is None else field(zeta)
    x = ring.root_of_unity(zeta, e) * ring.twist_root()
    if x**e + constant:
        raise DomainError(ErrorTag.INTERNAL_INCONSISTENCY, "twist root does not satisfy its equation")
    return TwistDescriptor(ring, x, e, ring.h, constant, zeta)


def _twist_constants(twist: TwistDescriptor, n: int, mode: Locus) -> list[Any]:
    x = twist.x
    if mode is Locus.ZERO:
        return [-(x ** (n - 1 - m)) for m in range(1, n)]
    return [x ** (n - 1 - m) * (-1) ** (m + n) for m in range(1, n)]


def lift_phi_twisted_system(
    residue_ys: Sequence[GFElement],
    exponents: Sequence[int],
    twist: TwistDescriptor,
    mode: Locus,
    start: Optional[Sequence[LocalElement]] = None,
    schedule: str = "quadratic",
) -> LiftResult:
    """Solve sum_{j != i} a_j y_j^m + c_m = 0 (m = 1..n-1) in the twisted ring.

    ZERO: c_m = -x^{n-1-m}; INFINITY: c_m = (-1)^{m+n} x^{n-1-m}. Mod the
    maximal ideal both reduce to the Kummer system of the remaining slots.
    """
    ring = twist.ring
    n = len(residue_ys) + 1
    if ring.p <= n:
        raise DomainError(ErrorTag.WILD_PRIME, f"twisted lifting needs p > n, got p = {ring.p}")
    _require_distinct(residue_ys)
    exps = tuple(exponents)
    constants = _twist_constants(twist, n, mode)
    free = list(range(n - 1))
    _require_unit(phi_jacobian_closed_form(exps, list(residue_ys)))

    def residual(ys: list[Any]) -> list[Any]:
        model = Model(exps, tuple(ys))
        return [phi(m, model) + c for m, c in zip(range(1, n), constants)]

    def jacobian(ys: list[Any]) -> list[list[Any]]:
        return phi_jacobian(exps, ys, free)

    if start is None:
        start = [ring.lift(y) for y in residue_ys]
    else:
        start = [ring.element([y.rows[0]]) for y in start]
    solution, steps = newton(residual, jacobian, list(start), ring, schedule)
    _check_reduction(solution, residue_ys)
    witness = jacobian_witness("phi", exps, solution, free)
    _require_unit(witness)
    residue = Model(exps, tuple(residue_ys), ModelKind.KUMMER)
    return LiftResult(Model(exps, tuple(solution), ModelKind.TWISTED), ring.precision, witness, residue, schedule, steps)


# Phi and Psi correspondences


def _check_regular(t: ValencyType, slot: int, p: int, mode: Locus) -> None:
    if t.n < 3:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "correspondences need n >= 3")
    if not 0 <= slot < t.n:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, f"slot {slot} out of range for {t}")
    if p <= t.n:
        raise DomainError(ErrorTag.WILD_PRIME, f"correspondences need p > n, got p = {p}")
    cls = classify_prime(t, p)
    if mode is Locus.ZERO and slot not in cls.regular_slots:
        raise DomainError(ErrorTag.NOT_REGULAR, f"{p} is not {t.a[slot]}-regular for {t}")
    if mode is Locus.INFINITY and not cls.at_infinity:
        raise DomainError(ErrorTag.NOT_REGULAR, f"{p} is not regular at infinity for {t}")


def _twist_constant(t: ValencyType, slot: int, mode: Locus) -> int:
    if mode is Locus.ZERO:
        return t.a[slot]
    return (-1) ** t.n * t.degree


def _inverse(
    mode: Locus, kummer: Model, t: ValencyType, slot: int, zeta: Optional[GFElement], precision: Optional[int]
) -> Model:
    F = _residue_field(kummer)
    _check_regular(t, slot, F.p, mode)
    if tuple(kummer.exponents) != t.omit(slot):
        raise DomainError(ErrorTag.DEGENERATE_INPUT, f"Kummer model exponents must be {t.omit(slot)}")
    M = precision or config.precision()
    twist = twist_descriptor(F, t.n, _twist_constant(t, slot, mode), M, zeta)
    unramified = hensel_lift_kummer(kummer, M)
    twisted = lift_phi_twisted_system(kummer.roots, kummer.exponents, twist, mode, unramified.model.roots)
    ring, x = twist.ring, twist.x
    roots = [x * y if mode is Locus.ZERO else 1 + x * y for y in twisted.model.roots]
    roots.insert(slot, ring.one())
    kind = ModelKind.CANONICAL if mode is Locus.ZERO else ModelKind.AI_NORMALIZED
    return Model(t.a, tuple(roots), kind, slot)


def _forward(mode: Locus, model: Model, slot: int, zeta: Optional[GFElement]) -> Model:
    t = ValencyType(tuple(model.exponents))
    ring: LocalRing = model.roots[0].ring
    _check_regular(t, slot, ring.p, mode)
    if ring.twist is None or ring.e != t.n - 1 or ring.c != _twist_constant(t, slot, mode):
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "model does not live in the matching twisted ring")
    zeta_res = ring.field(1) if zeta is None else ring.field(zeta)
    ys = []
    for j, xj in enumerate(model.roots):
        if j == slot:
            continue
        numerator = xj if mode is Locus.ZERO else xj - 1
        ys.append(ring.divide_by_twist_root(numerator).reduce() / zeta_res)
    kummer = Model(t.omit(slot), tuple(ys), ModelKind.KUMMER)
    n = kummer.n
    if any(phi(m, kummer) for m in range(1, n)) or phi(n, kummer) != 1:
        raise DomainError(ErrorTag.NOT_A_MODEL, "input does not reduce to a Kummer model")
    return kummer


def phi_correspondence(
    direction: Direction,
    data: Model,
    slot: int,
    p: int,
    valency_type: Optional[ValencyType] = None,
    x_choice: Optional[GFElement] = None,
    precision: Optional[int] = None,
) -> Model:
    """Canonical models at an a_i-regular prime <-> Kummer models of the type without a_i.

    INVERSE takes a Kummer residue model of `valency_type` minus `slot`;
    FORWARD takes a canonical model over the twisted ring.
    """
    return _correspond(Locus.ZERO, direction, data, slot, p, valency_type, x_choice, precision)


def psi_correspondence(
    direction: Direction,
    data: Model,
    slot: int,
    p: int,
    valency_type: Optional[ValencyType] = None,
    x_choice: Optional[GFElement] = None,
    precision: Optional[int] = None,
) -> Model:
    """a_i-normalized models at a prime regular at infinity <-> Kummer models without a_i."""
    return _correspond(Locus.INFINITY, direction, data, slot, p, valency_type, x_choice, precision)


def _correspond(
    mode: Locus,
    direction: Direction,
    data: Model,
    slot: int,
    p: int,
    valency_type: Optional[ValencyType],
    x_choice: Optional[GFElement],
    precision: Optional[int],
) -> Model:
    if direction is Direction.INVERSE:
        if valency_type is None:
            raise DomainError(ErrorTag.DEGENERATE_INPUT, "INVERSE needs the full valency type")
        if _residue_field(data).p != p:
            raise DomainError(ErrorTag.DEGENERATE_INPUT, "residue model lives over another prime")
        return _inverse(mode, data, valency_type, slot, x_choice, precision)
    if data.roots[0].ring.p != p:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "model lives over another prime")
    return _forward(mode, data, slot, x_choice)


def reduced_expansion(model: Model) -> Polynomial:
    """Expansion of the model with every root sent to the residue field."""
    return expand(model.reduce())


def valuation_profile(model: Model, mode: Locus, slot: Optional[int] = None) -> list[tuple[int, int, Any]]:
    """Pairwise root-difference valuations, asserted against the expected distances.

    Valuations are in the ring's units, v(p) = e.
    """
    ring: LocalRing = model.roots[0].ring
    xs, n = model.roots, model.n
    profile = []
    for j in range(n):
        for k in range(j + 1, n):
            profile.append((j, k, (xs[j] - xs[k]).valuation()))
    if mode is Locus.ZERO:
        if slot is None:
            raise DomainError(ErrorTag.DEGENERATE_INPUT, "ZERO profile needs the distinguished slot")
        target = ring.e * p_valuation(model.exponents[slot], ring.p)
        for j, k, v in profile:
            expected = 0 if slot in (j, k) else target
            if (v if slot in (j, k) else (n - 1) * v) != expected:
                raise DomainError(ErrorTag.VALUATION_MISMATCH, f"v(x_{j} - x_{k}) = {v}")
        for j in range(n):
            if j != slot and (n - 1) * xs[j].valuation() != target:
                raise DomainError(ErrorTag.VALUATION_MISMATCH, f"v(x_{j}) = {xs[j].valuation()}")
    else:
        target = ring.e * p_valuation(model.degree, ring.p)
        for j, k, v in profile:
            if (n - 1) * v != target:
                raise DomainError(ErrorTag.VALUATION_MISMATCH, f"v(x_{j} - x_{k}) = {v}")
    return profile
