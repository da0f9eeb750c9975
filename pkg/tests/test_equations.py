from fractions import Fraction
import random

import pytest

from src.algebra import Polynomial, determinant
from src.equations import (
    check_conditions,
    derivative_identity_check,
    expand,
    jacobian_witness,
    kummer_invariant,
    partial_fraction_identity_check,
    phi,
    phi_jacobian,
    phi_jacobian_closed_form,
    psi,
    psi_jacobian,
    psi_jacobian_closed_form,
    psi_values,
)
from src.errors import DomainError, ErrorTag
from src.fields import galois_field
from src.models import Model


def _example_f11() -> Model:
    F = galois_field(11)
    return Model((1, 2, 3, 4, 10), tuple(F(x) for x in (3, 1, 5, 2, 6)))


def test_two_vertex_model_over_rationals():
    m = Model((1, 2), (Fraction(2), Fraction(-1)))
    assert expand(m) == Polynomial([1, 0, -3, -2])
    assert check_conditions(m).all()
    assert kummer_invariant(m) == 6


def test_f11_example_satisfies_every_condition():
    m = _example_f11()
    report = check_conditions(m)
    assert report.as_dict() == {"i": True, "ii": True, "iii": True, "iv": True}
    assert m.degree % 11 == 9
    assert derivative_identity_check(m)


def test_conditions_agree_on_non_models():
    F = galois_field(11)
    m = Model((1, 2, 3), (F(1), F(2), F(3)))
    report = check_conditions(m)
    assert not report.i and not report.ii and not report.iii and not report.iv


def test_repeated_roots_are_not_models():
    F = galois_field(7)
    with pytest.raises(DomainError) as exc:
        check_conditions(Model((1, 2), (F(3), F(3))))
    assert exc.value.tag is ErrorTag.NOT_A_MODEL


def test_psi_is_signed_expansion_coefficient():
    rng = random.Random(7)
    for _ in range(500):
        n = rng.randint(2, 5)
        exps = tuple(rng.randint(1, 6) for _ in range(n))
        m = Model(exps, tuple(Fraction(rng.randint(-9, 9)) for _ in range(n)))
        beta = expand(m)
        for k in range(1, n + 1):
            assert psi(k, m) == (-1) ** k * beta[k]


def test_psi_values_matches_single_coefficients():
    m = _example_f11()
    assert psi_values(m, 4) == [psi(k, m) for k in range(1, 5)]
    assert all(not v for v in psi_values(m, 4))
    assert all(not phi(k, m) for k in range(1, 5))


def test_jacobian_closed_forms_on_random_tuples():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(2, 5)
        exps = [rng.randint(1, 7) for _ in range(n)]
        roots = [rng.randint(-20, 20) for _ in range(n)]
        free = sorted(rng.sample(range(n), n - 1))
        assert determinant(psi_jacobian(exps, roots, free)) == psi_jacobian_closed_form(exps, roots, free)
        full = list(range(n))
        assert determinant(phi_jacobian(exps, roots, full)) == phi_jacobian_closed_form(exps, roots)


def test_jacobian_witness_over_finite_field():
    m = _example_f11()
    free = [0, 2, 3, 4]
    witness = jacobian_witness("psi", m.exponents, m.roots, free)
    assert witness.is_unit()


def test_partial_fraction_identity():
    assert partial_fraction_identity_check([Fraction(1), Fraction(2), Fraction(5), Fraction(-3)])
    F = galois_field(13)
    assert partial_fraction_identity_check([F(1), F(4), F(9)])
    with pytest.raises(DomainError):
        partial_fraction_identity_check([F(1), F(1)])
