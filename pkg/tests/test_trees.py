import pytest

from src.errors import DomainError
from src.models import ValencyType
from src.trees import (
    ai_normalized_model_count,
    canonical_rotation,
    count_trees,
    enumerate_trees,
    linear_arrangement_count,
    normalized_model_count,
)


def test_generic_three_valency_type_has_two_trees():
    t = ValencyType.of((1, 2, 3))
    trees = enumerate_trees(t)
    assert [tr.necklace for tr in trees] == [(1, 2, 3), (1, 3, 2)]
    assert count_trees(t) == 2
    assert all(tr.aut_order == 1 for tr in trees)


def test_symmetric_necklace_has_nontrivial_automorphisms():
    t = ValencyType.of((1, 1, 2, 2))
    trees = enumerate_trees(t)
    assert [(tr.necklace, tr.aut_order) for tr in trees] == [((1, 1, 2, 2), 1), ((1, 2, 1, 2), 2)]
    assert count_trees(t) == 2
    assert [normalized_model_count(tr) for tr in trees] == [4, 2]


def test_ones_ab_quintic_has_four_trees():
    assert count_trees(ValencyType.of((1, 1, 1, 9, 17))) == 4


def test_all_equal_valencies():
    trees = enumerate_trees(ValencyType.of((3, 3, 3)))
    assert len(trees) == 1
    assert trees[0].aut_order == 3


@pytest.mark.parametrize(
    "values",
    [(1, 2, 3), (1, 1, 2, 2), (1, 1, 1, 2, 2, 2), (1, 2, 3, 4, 5), (1, 1, 2, 3), (2, 2, 2, 2, 3, 3)],
)
def test_burnside_matches_enumeration_and_model_counts(values):
    t = ValencyType.of(values)
    trees = enumerate_trees(t)
    assert count_trees(t) == len(trees)
    assert linear_arrangement_count(t) == sum(normalized_model_count(tr) for tr in trees)


def test_ai_normalized_counts():
    t = ValencyType.of((1, 1, 2, 2))
    trees = enumerate_trees(t)
    assert [ai_normalized_model_count(tr, 3) for tr in trees] == [2, 1]
    with pytest.raises(DomainError):
        ai_normalized_model_count(trees[0], 4)


def test_canonical_rotation():
    assert canonical_rotation((3, 1, 2)) == (1, 2, 3)
    assert canonical_rotation((2, 1, 2, 1)) == (1, 2, 1, 2)
