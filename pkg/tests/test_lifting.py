from fractions import Fraction

import pytest

from src.algebra import Polynomial
from src.equations import check_conditions, phi
from src.errors import DomainError, ErrorTag
from src.fields import galois_field
from src.fqsolver import kummer_census, kummer_models_over_fq
from src.lifting import (
    Direction,
    frobenius_lift,
    hensel_lift_kummer,
    hensel_lift_normalized,
    newton,
    phi_correspondence,
    psi_correspondence,
    reduced_expansion,
    solve_linear,
    twist_descriptor,
    valuation_profile,
)
from src.localrings import local_ring
from src.models import Model, ModelKind, ValencyType
from src.reduction import Locus
from src.trees import ai_normalized_model_count, enumerate_trees


@pytest.mark.parametrize("M", [1, 2, 8, 32])
def test_two_vertex_lift_is_rational(M):
    F = galois_field(5)
    result = hensel_lift_normalized(Model((1, 2), (F(1), F(2))), M)
    ring = result.model.roots[0].ring
    assert result.model.roots[0] == 1
    assert result.model.roots[1] == ring.from_fraction(Fraction(-1, 2))
    assert result.precision == M
    assert result.jacobian_unit_witness.is_unit()


def test_chord_and_quadratic_schedules_agree():
    F = galois_field(5)
    residue = Model((1, 2, 3), (F(3), F(2), F(1)))
    fast = hensel_lift_normalized(residue, 16)
    slow = hensel_lift_normalized(residue, 16, "chord")
    assert fast.model.roots == slow.model.roots
    assert fast.model.slot == 2
    assert slow.steps >= fast.steps
    assert check_conditions(fast.model).i
    assert fast.model.reduce().roots == residue.roots


def test_lift_rejects_unnormalized_residue():
    F = galois_field(5)
    with pytest.raises(DomainError) as exc:
        hensel_lift_normalized(Model((1, 2, 3), (F(3), F(2), F(4))))
    assert exc.value.tag is ErrorTag.DEGENERATE_INPUT


def test_kummer_lift():
    F = galois_field(5)
    residue = Model((1, 2), (F(3), F(1)), ModelKind.KUMMER)
    result = hensel_lift_kummer(residue, 10)
    assert phi(1, result.model) == 0
    assert phi(2, result.model) == 1
    assert result.model.reduce().roots == residue.roots
    assert result.model.kind is ModelKind.KUMMER


def test_kummer_lift_needs_tame_prime():
    F = galois_field(3)
    with pytest.raises(DomainError) as exc:
        hensel_lift_kummer(Model((1, 2, 4), (F(1), F(2), F(1))))
    assert exc.value.tag is ErrorTag.WILD_PRIME


def test_kummer_lift_rejects_non_kummer_residue():
    F = galois_field(5)
    with pytest.raises(DomainError) as exc:
        hensel_lift_kummer(Model((1, 2), (F(1), F(2))))
    assert exc.value.tag is ErrorTag.NOT_A_MODEL


def test_frobenius_commutes_with_lifting():
    for kummer in kummer_census(ValencyType.of((2, 4)), 7):
        lifted = hensel_lift_kummer(kummer, 6).model
        conjugate = hensel_lift_kummer(kummer.frobenius(), 6).model
        assert frobenius_lift(lifted).roots == conjugate.roots


def test_singular_system_is_reported():
    R = local_ring(5, 1, 4)
    with pytest.raises(DomainError) as exc:
        solve_linear([[R.from_int(5)]], [R.one()])
    assert exc.value.tag is ErrorTag.SINGULAR_POINT


def test_unknown_schedule():
    R = local_ring(5, 1, 4)
    with pytest.raises(DomainError):
        newton(lambda xs: xs, lambda xs: [[R.one()]], [R.one()], R, "secant")


def test_twist_descriptor():
    twist = twist_descriptor(galois_field(5), 3, 5, 8)
    assert twist.e == 2
    assert twist.x**2 == -5
    assert twist.x.valuation() == 1


# canonical models at an a_i-regular prime


def _canonical_models(precision=12, zeta=None):
    t = ValencyType.of((1, 2, 5))
    out = []
    for kummer in kummer_models_over_fq(ValencyType.of((1, 2)), 5):
        model = phi_correspondence(Direction.INVERSE, kummer, 2, 5, t, zeta, precision)
        out.append((kummer, model))
    return t, out


def test_phi_correspondence_round_trip():
    t, pairs = _canonical_models()
    assert len(pairs) == 2
    expected = sum(ai_normalized_model_count(tr, 2) for tr in enumerate_trees(t))
    assert len({model.key() for _, model in pairs}) == expected
    for kummer, model in pairs:
        assert model.kind is ModelKind.CANONICAL
        assert model.roots[2] == 1
        assert check_conditions(model).i
        back = phi_correspondence(Direction.FORWARD, model, 2, 5)
        assert back.key() == kummer.key()


def test_canonical_models_reduce_to_a_power():
    _, pairs = _canonical_models()
    F = galois_field(5)
    for _, model in pairs:
        assert reduced_expansion(model) == Polynomial([F(1), F(-1)]) ** 5
        profile = valuation_profile(model, Locus.ZERO, 2)
        assert [(j, k) for j, k, _ in profile] == [(0, 1), (0, 2), (1, 2)]
        assert [v for _, _, v in profile] == [1, 0, 0]


def test_inverse_is_equivariant_under_roots_of_unity():
    F = galois_field(5)
    t = ValencyType.of((1, 2, 5))
    zeta = F(4)
    for kummer in kummer_models_over_fq(ValencyType.of((1, 2)), 5):
        twisted = phi_correspondence(Direction.INVERSE, kummer, 2, 5, t, zeta, 10)
        rescaled = kummer.rescale(zeta).with_kind(ModelKind.KUMMER)
        plain = phi_correspondence(Direction.INVERSE, rescaled, 2, 5, t, None, 10)
        assert twisted.roots == plain.roots


def test_phi_correspondence_needs_regular_prime():
    F = galois_field(5)
    kummer = Model((1, 2), (F(3), F(1)), ModelKind.KUMMER)
    with pytest.raises(DomainError) as exc:
        phi_correspondence(Direction.INVERSE, kummer, 2, 5, ValencyType.of((1, 2, 3)))
    assert exc.value.tag is ErrorTag.NOT_REGULAR
    F3 = galois_field(3)
    with pytest.raises(DomainError) as exc:
        phi_correspondence(
            Direction.INVERSE, Model((1, 2), (F3(1), F3(2))), 2, 3, ValencyType.of((1, 2, 3))
        )
    assert exc.value.tag is ErrorTag.WILD_PRIME


def test_inverse_needs_the_full_type():
    F = galois_field(5)
    kummer = Model((1, 2), (F(3), F(1)), ModelKind.KUMMER)
    with pytest.raises(DomainError) as exc:
        phi_correspondence(Direction.INVERSE, kummer, 2, 5)
    assert exc.value.tag is ErrorTag.DEGENERATE_INPUT


# a_i-normalized models at a prime regular at infinity


def test_psi_correspondence_at_infinity():
    t = ValencyType.of((1, 2, 4))
    kummers = kummer_census(ValencyType.of((2, 4)), 7)
    assert len(kummers) == 2
    F = kummers[0].roots[0].field
    for kummer in kummers:
        model = psi_correspondence(Direction.INVERSE, kummer, 0, 7, t, None, 8)
        assert model.kind is ModelKind.AI_NORMALIZED
        ring = model.roots[0].ring
        assert ring.twist_root() ** 2 == 7
        assert reduced_expansion(model) == Polynomial([F(1), F(-1)]) ** 7
        profile = valuation_profile(model, Locus.INFINITY)
        assert all(v == 1 for _, _, v in profile)
        back = psi_correspondence(Direction.FORWARD, model, 0, 7)
        assert back.key() == kummer.key()


def test_forward_rejects_models_outside_the_twisted_ring():
    F = galois_field(5)
    result = hensel_lift_normalized(Model((1, 2, 3), (F(3), F(2), F(1))), 6)
    with pytest.raises(DomainError) as exc:
        phi_correspondence(Direction.FORWARD, result.model, 2, 5)
    assert exc.value.tag in (ErrorTag.NOT_REGULAR, ErrorTag.DEGENERATE_INPUT)
