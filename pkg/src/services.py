from __future__ import annotations
from datetime import datetime, timezone

UTC = timezone.utc
from fractions import Fraction
from typing import Any, Optional
import logging

import mpmath
from pydantic import BaseModel, Field
from sqlmodel import select

from .algebra import Polynomial, format_factorization
from .db import session_scope
from .equations import check_conditions, kummer_invariant
from .errors import DomainError, ErrorTag
from .families import (
    family_ab,
    family_abc_disc,
    family_abc_fp_trichotomy,
    family_ones_ab_model,
    family_ones_ab_summary,
    family_regularity_constants,
    galois_orbit_evidence,
    squarefree_part,
)
from .fields import GFElement
from .fqsolver import kummer_census, orbit_report
from .lifting import (
    Direction,
    hensel_lift_kummer,
    hensel_lift_normalized,
    phi_correspondence,
    psi_correspondence,
    reduced_expansion,
    valuation_profile,
)
from .localrings import LocalElement
from .models import CensusRecord, Model, ValencyType
from .reduction import DInvariant, Locus, RamificationBounds, reduction_report
from .trees import count_trees, enumerate_trees, linear_arrangement_count, normalized_model_count

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"


# schemas


class Report(BaseModel):
    schema_version: str = SCHEMA_VERSION


class LocalValueOut(BaseModel):
    p: int
    modulus: list[int]
    twist: Optional[list[int]] = None
    precision: int
    coeffs: list[list[int]]


class ModelOut(BaseModel):
    exponents: list[int]
    roots: list[Any]
    kind: str
    slot: Optional[int] = None


class TreeOut(BaseModel):
    necklace: list[int]
    aut_order: int
    normalized_models: int


class TreesOut(Report):
    valency_type: list[int]
    count: int
    linear_arrangements: int
    trees: list[TreeOut]


class TreeDataOut(BaseModel):
    aut_order: int
    splitting_degree: int
    moduli_degree: int
    models: list[ModelOut]


class OrbitReportOut(Report):
    valency_type: list[int]
    p: int
    kmax: int
    k_searched: int
    predicted: int
    complete: bool
    model_count: int
    trees: list[TreeDataOut]
    frobenius_orbits: list[list[int]]
    orbit_sizes: list[int]


class DInvariantOut(BaseModel):
    variant: str
    slot: Optional[int] = None
    support: list[int]
    value: Optional[int] = None
    bits: int


class RamificationOut(BaseModel):
    locus: str
    slot: Optional[int] = None
    lower: int
    upper: int
    totally_determined: bool
    proved: bool
    n0: int
    h: int


class PrimeOut(BaseModel):
    p: int
    kind: str
    regular_slots: list[int]
    at_infinity: bool
    bounds: list[RamificationOut] = Field(default_factory=list)


class InvariantsOut(Report):
    valency_type: list[int]
    d: DInvariantOut
    d_slots: list[DInvariantOut]
    d_infinity: DInvariantOut
    odd_support: list[int]
    primes: list[PrimeOut]


class LiftEntryOut(BaseModel):
    residue: ModelOut
    lift: ModelOut
    jacobian_witness: LocalValueOut
    steps: int


class LiftOut(Report):
    valency_type: list[int]
    p: int
    precision: int
    kummer: bool
    schedule: str
    lifts: list[LiftEntryOut]


class CorrespondencePairOut(BaseModel):
    kummer: ModelOut
    model: ModelOut
    round_trip: bool
    reduces_to_power: bool
    valuations: list[list[Any]]


class CorrespondenceOut(Report):
    valency_type: list[int]
    reduced_type: list[int]
    p: int
    slot: int
    locus: str
    precision: int
    kummer_count: int
    model_count: int
    pairs: list[CorrespondencePairOut]


class FamilyOut(Report):
    family: str
    parameters: dict[str, int]
    results: dict[str, Any]


class CensusRowOut(BaseModel):
    n: int
    a: int
    b: int
    hpoly: list[int]
    h_irreducible: bool
    criterion: str
    prime: Optional[int] = None


class CensusOut(Report):
    rows: list[CensusRowOut]


# encoders


def encode_value(x: Any) -> Any:
    """Field elements as coefficient arrays, ring elements as {p, modulus, precision, coeffs}."""
    if isinstance(x, GFElement):
        return x.coeffs
    if isinstance(x, LocalElement):
        return encode_local(x).model_dump()
    if isinstance(x, (mpmath.mpc, mpmath.mpf)):
        return [mpmath.nstr(mpmath.re(x), 30), mpmath.nstr(mpmath.im(x), 30)]
    if isinstance(x, (int, Fraction)):
        return str(x)
    return str(x)


def encode_local(x: LocalElement) -> LocalValueOut:
    info = x.ring.describe()
    return LocalValueOut(
        p=info["p"], modulus=info["modulus"], twist=info["twist"], precision=info["precision"], coeffs=x.coeffs
    )


def encode_model(model: Model) -> ModelOut:
    return ModelOut(
        exponents=list(model.exponents),
        roots=[encode_value(x) for x in model.roots],
        kind=model.kind.value,
        slot=model.slot,
    )


def _encode_d(d: DInvariant) -> DInvariantOut:
    return DInvariantOut(variant=d.variant.value, slot=d.slot, support=list(d.support), value=d.value, bits=d.bits)


def _encode_bounds(b: RamificationBounds) -> RamificationOut:
    return RamificationOut(
        locus=b.locus.value,
        slot=b.slot,
        lower=b.lower,
        upper=b.upper,
        totally_determined=b.totally_determined,
        proved=b.proved,
        n0=b.data.n0,
        h=b.data.h,
    )


def _coeff_list(f: Polynomial) -> list[int]:
    return [int(c) for c in f.coeffs]


# reports


def trees_report(t: ValencyType) -> TreesOut:
    trees = enumerate_trees(t)
    count = count_trees(t)
    if count != len(trees):
        raise DomainError(ErrorTag.INTERNAL_INCONSISTENCY, "Burnside count disagrees with enumeration")
    return TreesOut(
        valency_type=list(t.a),
        count=count,
        linear_arrangements=linear_arrangement_count(t),
        trees=[
            TreeOut(necklace=list(tr.necklace), aut_order=tr.aut_order, normalized_models=normalized_model_count(tr))
            for tr in trees
        ],
    )


def solve_report(
    t: ValencyType, p: int, kmax: Optional[int] = None, threads: Optional[int] = None
) -> OrbitReportOut:
    report = orbit_report(t, p, kmax, threads)
    return OrbitReportOut(
        valency_type=list(t.a),
        p=p,
        kmax=report.kmax,
        k_searched=report.k_searched,
        predicted=report.predicted,
        complete=report.complete,
        model_count=len(report.models),
        trees=[
            TreeDataOut(
                aut_order=tr.aut_order,
                splitting_degree=tr.splitting_degree,
                moduli_degree=tr.moduli_degree,
                models=[encode_model(m) for m in tr.models],
            )
            for tr in report.trees
        ],
        frobenius_orbits=report.frobenius_orbits,
        orbit_sizes=report.orbit_sizes,
    )


def invariants_report(t: ValencyType, primes: Optional[list[int]] = None) -> InvariantsOut:
    report = reduction_report(t, primes)
    return InvariantsOut(
        valency_type=list(t.a),
        d=_encode_d(report.d),
        d_slots=[_encode_d(d) for d in report.d_slots],
        d_infinity=_encode_d(report.d_infinity),
        odd_support=[q for q in report.d.support if q != 2],
        primes=[
            PrimeOut(
                p=pr.classification.p,
                kind=pr.classification.kind.value,
                regular_slots=list(pr.classification.regular_slots),
                at_infinity=pr.classification.at_infinity,
                bounds=[_encode_bounds(b) for b in pr.bounds],
            )
            for pr in report.primes
        ],
    )


def lift_report(
    t: ValencyType,
    p: int,
    precision: int,
    kummer: bool = False,
    schedule: str = "quadratic",
    kmax: Optional[int] = None,
    threads: Optional[int] = None,
) -> LiftOut:
    if kummer:
        residues = kummer_census(t, p, kmax, threads)
        lifts = [hensel_lift_kummer(m, precision, schedule) for m in residues]
    else:
        residues = orbit_report(t, p, kmax, threads).models
        lifts = [hensel_lift_normalized(m, precision, schedule) for m in residues]
    return LiftOut(
        valency_type=list(t.a),
        p=p,
        precision=precision,
        kummer=kummer,
        schedule=schedule,
        lifts=[
            LiftEntryOut(
                residue=encode_model(r.reduction),
                lift=encode_model(r.model),
                jacobian_witness=encode_local(r.jacobian_unit_witness),
                steps=r.steps,
            )
            for r in lifts
        ],
    )


def _power_of_one_minus_x(model: Model, exponent: int) -> Polynomial:
    F = model.roots[0].ring.field
    return Polynomial([F(1), F(-1)]) ** exponent


def correspondence_report(
    t: ValencyType,
    p: int,
    slot: int,
    locus: Locus,
    precision: int,
    kmax: Optional[int] = None,
    threads: Optional[int] = None,
) -> CorrespondenceOut:
    """Run the inverse map on every Kummer model of the reduced type, then map back."""
    correspond = phi_correspondence if locus is Locus.ZERO else psi_correspondence
    if not 0 <= slot < t.n:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, f"slot {slot} out of range for {t}")
    reduced = ValencyType(t.omit(slot))
    kummers = kummer_census(reduced, p, kmax, threads)
    exponent = t.a[slot] if locus is Locus.ZERO else t.degree
    pairs = []
    seen: set[tuple] = set()
    for kummer in kummers:
        model = correspond(Direction.INVERSE, kummer, slot, p, valency_type=t, precision=precision)
        back = correspond(Direction.FORWARD, model, slot, p)
        seen.add(model.key())
        profile = valuation_profile(model, locus, slot)
        pairs.append(
            CorrespondencePairOut(
                kummer=encode_model(kummer),
                model=encode_model(model),
                round_trip=back.key() == kummer.key(),
                reduces_to_power=reduced_expansion(model) == _power_of_one_minus_x(model, exponent),
                valuations=[[j, k, v] for j, k, v in profile],
            )
        )
    return CorrespondenceOut(
        valency_type=list(t.a),
        reduced_type=list(reduced.a),
        p=p,
        slot=slot,
        locus=locus.value,
        precision=precision,
        kummer_count=len(kummers),
        model_count=len(seen),
        pairs=pairs,
    )


def family_ab_report(a: int, b: int) -> FamilyOut:
    model = family_ab(a, b)
    return FamilyOut(
        family="ab",
        parameters={"a": a, "b": b},
        results={
            "model": encode_model(model).model_dump(),
            "conditions": check_conditions(model).as_dict(),
            "kummer_invariant": str(kummer_invariant(model)),
        },
    )


def family_abc_report(a: int, b: int, c: int, p: Optional[int] = None) -> FamilyOut:
    disc = family_abc_disc(a, b, c)
    results: dict[str, Any] = {"disc": disc, "field_radicand": squarefree_part(disc)}
    params = {"a": a, "b": b, "c": c}
    if p is not None:
        verdict = family_abc_fp_trichotomy(a, b, c, p)
        params["p"] = p
        results.update(
            case=verdict.case.value,
            D=verdict.D,
            d=verdict.d,
            disc_is_square=verdict.disc_is_square,
            expected_fp=verdict.expected_fp,
            expected_fp2=verdict.expected_fp2,
        )
    return FamilyOut(family="abc", parameters=params, results=results)


def family_ones_ab_report(n: int, a: int, b: int, root: Optional[int] = None) -> FamilyOut:
    summary = family_ones_ab_summary(n, a, b)
    constants = family_regularity_constants(n, a, b)
    evidence = galois_orbit_evidence(n, a, b)
    results: dict[str, Any] = {
        "hpoly": _coeff_list(summary.hpoly),
        "hpoly_pretty": summary.hpoly.pretty(),
        "discriminant": summary.discriminant,
        "discriminant_factorization": summary.disc_pretty,
        "irreducible_over_q": summary.irreducible_over_q,
        "mod2": _coeff_list(summary.mod2),
        "mod2_irreducible": summary.mod2_irreducible,
        "tree_count": summary.tree_count,
        "c": constants.c,
        "c_factorization": format_factorization(constants.c_factorization),
        "u": constants.u,
        "u_factorization": format_factorization(constants.u_factorization or {}),
        "criterion": evidence.criterion,
        "criterion_prime": evidence.prime,
    }
    params = {"n": n, "a": a, "b": b}
    if root is not None:
        model = family_ones_ab_model(n, a, b, root)
        params["root"] = root
        results["model"] = {
            "root": str(model.root),
            "root_value": encode_value(model.root_value),
            "remaining_roots": [encode_value(x) for x in model.remaining_roots],
            "max_residual": mpmath.nstr(model.max_residual, 5),
            "exact_check": model.exact_check,
            "relations": model.relations,
        }
    return FamilyOut(family="ones-ab", parameters=params, results=results)


# census persistence


def _row_out(rec: CensusRecord) -> CensusRowOut:
    return CensusRowOut(
        n=rec.n, a=rec.a, b=rec.b, hpoly=rec.hpoly, h_irreducible=rec.h_irreducible,
        criterion=rec.criterion, prime=rec.prime,
    )


def record_evidence(n: int, a: int, b: int) -> CensusRecord:
    """Compute the orbit evidence for (1,...,1,a,b) and upsert it by (n, a, b)."""
    evidence = galois_orbit_evidence(n, a, b)
    with session_scope() as s:
        stmt = select(CensusRecord).where(CensusRecord.n == n, CensusRecord.a == a, CensusRecord.b == b)
        rec = s.exec(stmt).first() or CensusRecord(n=n, a=a, b=b)
        rec.set_hpoly(_coeff_list(evidence.hpoly))
        rec.h_irreducible = evidence.h_irreducible
        rec.criterion = evidence.criterion
        rec.prime = evidence.prime
        rec.created_at = datetime.now(UTC)
        s.add(rec)
        s.flush()
        s.refresh(rec)
        return rec


def run_census(nmax: int, bmax: int, nmin: int = 3) -> CensusOut:
    if nmax < nmin or bmax < 3:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, "census needs nmax >= 3 and bmax >= 3")
    rows = []
    for n in range(nmin, nmax + 1):
        for b in range(3, bmax + 1):
            for a in range(2, b):
                rows.append(_row_out(record_evidence(n, a, b)))
    log.info("census stored %d rows", len(rows))
    return CensusOut(rows=rows)


def list_census(n: Optional[int] = None, unproved_only: bool = False) -> CensusOut:
    with session_scope() as s:
        stmt = select(CensusRecord)
        if n is not None:
            stmt = stmt.where(CensusRecord.n == n)
        if unproved_only:
            stmt = stmt.where(CensusRecord.criterion == "")
        stmt = stmt.order_by(CensusRecord.n, CensusRecord.b, CensusRecord.a)
        return CensusOut(rows=[_row_out(rec) for rec in s.exec(stmt)])
