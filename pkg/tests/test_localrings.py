from fractions import Fraction
import random

import pytest

from src.algebra import INFINITY
from src.errors import DomainError, ErrorTag
from src.fields import galois_field, iter_elements
from src.localrings import LocalRing, local_ring


def test_unramified_arithmetic_mod_p_power():
    R = local_ring(5, 1, 3)
    half = R.from_fraction(Fraction(1, 2))
    assert half * 2 == 1
    assert R.from_int(125) == 0
    assert R.from_int(25).valuation() == 2
    assert R.zero().valuation() == INFINITY
    assert (1 / R.from_int(3)) * 3 == 1


def test_non_unit_has_no_inverse():
    R = local_ring(5, 1, 4)
    with pytest.raises(ZeroDivisionError):
        R.from_int(10).inverse()


def test_reduce_and_lift_are_inverse_on_residues():
    R = local_ring(7, 2, 4)
    for x in iter_elements(R.field):
        assert R.lift(x).reduce() == x


def test_twisted_ring_uniformizer():
    R = local_ring(5, 1, 4, (2, 5))
    T = R.twist_root()
    assert T * T == -5
    assert T.valuation() == 1
    assert R.from_int(5).valuation() == 2
    assert not T.is_unit()
    assert R.divide_by_twist_root(T) == 1
    assert R.divide_by_twist_root(T).ring.precision == 3


def test_division_by_twist_root_needs_divisibility():
    R = local_ring(5, 1, 4, (2, 5))
    with pytest.raises(DomainError) as exc:
        R.divide_by_twist_root(R.one())
    assert exc.value.tag is ErrorTag.VALUATION_MISMATCH


def test_impure_twist_is_unsupported():
    with pytest.raises(DomainError) as exc:
        LocalRing(galois_field(5), 4, (2, 25))
    assert exc.value.tag is ErrorTag.UNSUPPORTED_RAMIFICATION


def test_negative_twist_constant():
    R = local_ring(7, 2, 6, (2, -7))
    T = R.twist_root()
    assert T**2 == 7
    assert T.valuation() == 1


def test_root_of_unity_lifts():
    R = local_ring(5, 1, 10)
    F = R.field
    assert R.root_of_unity(F(4), 2) == -1
    i = R.root_of_unity(F(2), 4)
    assert i**4 == 1
    assert i**2 == -1
    assert i.reduce() == 2


def test_root_of_unity_rejects_non_roots():
    R = local_ring(5, 1, 4)
    with pytest.raises(DomainError) as exc:
        R.root_of_unity(R.field(2), 2)
    assert exc.value.tag is ErrorTag.BAD_ROOT


def test_frobenius_lift_is_an_involution_on_quadratic_rings():
    R = local_ring(7, 2, 5)
    s = R.lift(R.field.gen())
    x = s * 3 + 2
    assert R.frobenius(R.frobenius(x)) == x
    assert R.frobenius(x * s) == R.frobenius(x) * R.frobenius(s)
    assert R.frobenius(s).reduce() == R.field.gen().frobenius()


def test_frobenius_needs_unramified_ring():
    R = local_ring(5, 1, 4, (2, 5))
    with pytest.raises(DomainError) as exc:
        R.frobenius(R.one())
    assert exc.value.tag is ErrorTag.NOT_APPLICABLE


RANDOM_RINGS = [
    (5, 1, 8, None),
    (7, 2, 8, None),
    (5, 1, 8, (2, 5)),
    (5, 1, 9, (3, 5)),
    (7, 2, 8, (2, 7)),
]


def _random_element(rng, R):
    # row entries are units times p^0..p^2, so every valuation stays far below e*M
    rows = []
    for _ in range(R.e):
        row = []
        for _ in range(R.f):
            if rng.random() < 0.25:
                row.append(0)
                continue
            unit = R.p * rng.randrange(R.p**4) + rng.randrange(1, R.p)
            row.append(unit * R.p ** rng.randint(0, 2))
        rows.append(row)
    return R.element(rows)


@pytest.mark.parametrize("p, f, M, twist", RANDOM_RINGS)
def test_valuation_axioms_on_random_pairs(p, f, M, twist):
    R = local_ring(p, f, M, twist)
    rng = random.Random(M * p + f)
    for _ in range(300):
        x, y = _random_element(rng, R), _random_element(rng, R)
        if not x or not y:
            continue
        vx, vy = x.valuation(), y.valuation()
        assert (x * y).valuation() == vx + vy
        assert (x + y).valuation() >= min(vx, vy)
        if vx != vy:
            assert (x + y).valuation() == min(vx, vy)


@pytest.mark.parametrize("p, f, M, twist", RANDOM_RINGS)
def test_reduction_is_a_ring_homomorphism(p, f, M, twist):
    R = local_ring(p, f, M, twist)
    rng = random.Random(p + f + M)
    assert R.one().reduce() == 1
    for _ in range(300):
        x, y = _random_element(rng, R), _random_element(rng, R)
        assert (x + y).reduce() == x.reduce() + y.reduce()
        assert (x * y).reduce() == x.reduce() * y.reduce()
        assert (-x).reduce() == -x.reduce()
