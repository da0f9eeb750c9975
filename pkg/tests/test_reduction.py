import random

import pytest

from src.equations import check_conditions
from src.errors import DomainError, ErrorTag
from src.fields import galois_field
from src.fqsolver import solve_over_fq
from src.models import Model, ValencyType
from src.reduction import (
    DVariant,
    Locus,
    PrimeKind,
    classify_prime,
    combinatorial_ramification_index,
    cyclotomic_orbit_count,
    d_invariant,
    h_p,
    is_admissible,
    p_congruent,
    ramification_bound_report,
    reduction_report,
    small_representative,
    transport_model,
)


def test_d_invariant_variants():
    t = ValencyType.of((1, 2, 3))
    full = d_invariant(t)
    assert full.value == 1 * 2 * 3 * 3 * 4 * 5 * 6
    assert full.support == (2, 3, 5)
    assert d_invariant(t, DVariant.PROPER).value == 360
    omit = d_invariant(t, DVariant.OMIT, 2)
    assert omit.value == 6 and omit.support == (2, 3) and omit.slot == 2


def test_d_invariant_support_of_ones_ab_quintic():
    d = d_invariant(ValencyType.of((1, 1, 1, 9, 17)))
    assert [q for q in d.support if q != 2] == [3, 5, 7, 11, 13, 17, 19, 29]


def test_d_invariant_value_dropped_above_bit_limit(monkeypatch):
    monkeypatch.setenv("DESSINS4_D_BITS", "8")
    d = d_invariant(ValencyType.of((1, 2, 3)))
    assert d.value is None
    assert d.support == (2, 3, 5)


def test_omit_needs_a_slot():
    with pytest.raises(DomainError) as exc:
        d_invariant(ValencyType.of((1, 2, 3)), DVariant.OMIT)
    assert exc.value.tag is ErrorTag.DEGENERATE_INPUT


@pytest.mark.parametrize("n, p, h", [(3, 5, 1), (4, 2, 3), (4, 3, 2), (1, 2, 1), (5, 5, 2)])
def test_h_p(n, p, h):
    assert h_p(n, p) == h


def test_regular_at_infinity():
    t = ValencyType.of((1, 1, 1, 2, 72))
    for p in (7, 11):
        cls = classify_prime(t, p)
        assert cls.kind is PrimeKind.REGULAR_AT_INFINITY
        assert cls.at_infinity and not cls.regular_slots
        bounds = ramification_bound_report(t, p)
        assert bounds.locus is Locus.INFINITY
        assert bounds.lower == bounds.upper == 4
        assert bounds.totally_determined and bounds.proved


def test_ai_regular_slot():
    t = ValencyType.of((1, 1, 1, 2, 77))
    for p in (7, 11):
        cls = classify_prime(t, p)
        assert cls.kind is PrimeKind.AI_REGULAR
        assert cls.regular_slots == (4,)
        data = combinatorial_ramification_index(t, Locus.ZERO, p, 4)
        assert data.e == 4 and data.h == 1 and data.n0 == 1


def test_good_and_unregular_primes():
    t = ValencyType.of((1, 1, 1, 2, 72))
    assert classify_prime(t, 13).kind is PrimeKind.GOOD
    with pytest.raises(DomainError) as exc:
        combinatorial_ramification_index(t, Locus.ZERO, 7, 4)
    assert exc.value.tag is ErrorTag.NOT_REGULAR


def test_reduction_report_candidates():
    report = reduction_report(ValencyType.of((1, 1, 1, 2, 72)))
    primes = [pr.classification.p for pr in report.primes]
    assert primes == [2, 3, 7, 11]
    at_seven = report.primes[2]
    assert [b.locus for b in at_seven.bounds] == [Locus.INFINITY]
    assert len(report.d_slots) == 5


def test_p_congruence():
    assert p_congruent((1, 2, 8), (1, 2, 3), 5) == (0, 1, 2)
    assert p_congruent((1, 2, 4), (1, 2, 3), 5) is None
    assert p_congruent((1, 1, 2), (1, 6, 2), 5) == (0, 1, 2)
    assert p_congruent((1, 1, 2), (1, 6, 2), 5, strict=True) is None


def test_small_representative():
    small, perm = small_representative(ValencyType.of((3, 12, 19)), 5)
    assert small.a == (2, 3, 4)
    assert perm == (1, 0, 2)
    small, _ = small_representative(ValencyType.of((1, 8, 15)), 7)
    assert small.a == (1, 8, 15)


def test_transport_model():
    F = galois_field(5)
    m = Model((1, 2, 3), (F(3), F(2), F(1)))
    moved = transport_model(m, (1, 2, 8), (0, 1, 2), 5)
    assert moved.exponents == (1, 2, 8)
    assert moved.roots == m.roots
    with pytest.raises(DomainError) as exc:
        transport_model(m, (1, 2, 8), (0, 2, 1), 5)
    assert exc.value.tag is ErrorTag.BAD_PERMUTATION


@pytest.mark.parametrize("values, p", [((1, 2, 3), 7), ((1, 2, 3), 5), ((1, 2, 3), 13)])
def test_transport_keeps_model_conditions_under_random_bumps(values, p):
    models = solve_over_fq(ValencyType.of(values), p)
    assert models
    step = p ** h_p(len(values), p)
    rng = random.Random(p)
    for m in models:
        identity = tuple(range(m.n))
        for _ in range(10):
            target = tuple(a + step * rng.randint(0, 6) for a in m.exponents)
            moved = transport_model(m, target, identity, p)
            assert moved.exponents == target
            assert check_conditions(moved).all()


def _random_type(rng, n):
    return tuple(rng.randint(1, 30) for _ in range(n))


def _random_congruent(rng, t, p):
    step = p ** h_p(len(t), p)
    out = [a + step * rng.randint(0, 3) for a in t]
    rng.shuffle(out)
    return tuple(out)


def test_p_congruence_is_an_equivalence_relation():
    rng = random.Random(29)
    for _ in range(400):
        p = rng.choice([3, 5, 7])
        n = rng.randint(2, 5)
        t1 = _random_type(rng, n)
        t2 = _random_congruent(rng, t1, p) if rng.random() < 0.7 else _random_type(rng, n)
        t3 = _random_congruent(rng, t2, p) if rng.random() < 0.7 else _random_type(rng, n)

        assert p_congruent(t1, t1, p) == tuple(range(n))
        sigma = p_congruent(t1, t2, p)
        assert (sigma is None) == (p_congruent(t2, t1, p) is None)
        if sigma is not None:
            assert is_admissible(t1, t2, sigma, p)
            if p_congruent(t2, t3, p) is not None:
                assert p_congruent(t1, t3, p) is not None


def test_cyclotomic_orbit_count_applicability():
    assert cyclotomic_orbit_count(ValencyType.of((1, 9, 17, 25, 33)), 2) == 6
    assert cyclotomic_orbit_count(ValencyType.of((1, 6, 11, 16)), 5) == 6
    for values, p in [((1, 2, 3), 5), ((1, 1, 6), 5), ((1, 4, 7), 3)]:
        with pytest.raises(DomainError) as exc:
            cyclotomic_orbit_count(ValencyType.of(values), p)
        assert exc.value.tag is ErrorTag.NOT_APPLICABLE
