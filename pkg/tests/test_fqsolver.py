import pytest

from src.equations import check_conditions
from src.errors import DomainError, ErrorTag
from src.fqsolver import (
    char2_abc_census,
    construct_fp_split_model,
    frobenius_closure_check,
    kummer_census,
    kummer_models_over_fq,
    orbit_report,
    solve_over_fq,
    splitting_degree,
)
from src.models import ValencyType
from src.reduction import cyclotomic_orbit_count


def test_rational_models_of_123_at_five():
    models = solve_over_fq(ValencyType.of((1, 2, 3)), 5)
    assert len(models) == 3
    assert (3, 2, 1) in [tuple(x.value for x in m.roots) for m in models]
    assert all(check_conditions(m).all() for m in models)


def test_orbit_report_swaps_the_two_trees_at_an_inert_prime():
    report = orbit_report(ValencyType.of((1, 2, 3)), 7)
    assert report.complete
    assert report.k_searched == 2
    assert len(report.models) == report.predicted == 6
    assert len(report.trees) == 2
    assert report.orbit_sizes == [2]
    assert all(tr.moduli_degree == 2 for tr in report.trees)


def test_brute_force_solutions_pass_all_conditions():
    for values, p in [((1, 2, 3), 11), ((1, 1, 2), 7), ((1, 2, 2, 3), 11), ((2, 3, 5), 13)]:
        t = ValencyType.of(values)
        for k in (1, 2):
            for m in solve_over_fq(t, p, k):
                assert check_conditions(m).all()


def test_models_are_frobenius_stable():
    models = solve_over_fq(ValencyType.of((1, 2, 3)), 7, 2)
    assert len(models) == 6
    assert frobenius_closure_check(models)
    assert {splitting_degree(m) for m in models} == {2}


def test_wild_and_oversized_searches_are_refused(monkeypatch):
    with pytest.raises(DomainError) as exc:
        solve_over_fq(ValencyType.of((1, 2, 3)), 3)
    assert exc.value.tag is ErrorTag.WILD_PRIME
    monkeypatch.setenv("DESSINS4_SEARCH_LIMIT", "100")
    with pytest.raises(DomainError) as exc:
        solve_over_fq(ValencyType.of((1, 2, 3)), 11, 2)
    assert exc.value.tag is ErrorTag.SEARCH_TOO_LARGE


def test_small_characteristic_uses_the_psi_system():
    # p = 2 <= n: the linear system degenerates, psi still cuts out the models
    t = ValencyType.of((1, 9, 17))
    models = solve_over_fq(t, 2, 2)
    assert models
    for m in models:
        report = check_conditions(m)
        assert report.i and report.ii


def test_kummer_models_of_12_at_five():
    models = kummer_models_over_fq(ValencyType.of((1, 2)), 5)
    assert sorted(tuple(x.value for x in m.roots) for m in models) == [(2, 4), (3, 1)]


def test_kummer_census_climbs_to_the_quadratic_extension():
    models = kummer_census(ValencyType.of((2, 4)), 7)
    assert len(models) == 2
    assert all(splitting_degree(m) == 2 for m in models)
    for m in models:
        y = m.roots[1]
        assert y**2 == 3


@pytest.mark.parametrize(
    "values, p",
    [((1, 8, 15), 7), ((1, 6, 11), 5), ((1, 6, 11, 16), 5), ((1, 10, 19, 28), 3)],
)
def test_cyclotomic_orbit_counts(values, p):
    t = ValencyType.of(values)
    report = orbit_report(t, p)
    assert report.complete
    assert len(report.frobenius_orbits) == cyclotomic_orbit_count(t, p)


def test_char2_criterion():
    odd = range(1, 16, 2)
    for a in odd:
        for b in odd:
            for c in odd:
                if not a <= b <= c:
                    continue
                expected = a % 4 == b % 4 == c % 4
                assert char2_abc_census(a, b, c).nonempty is expected, (a, b, c)


def test_split_model_construction_over_f11():
    model, t = construct_fp_split_model(11, (1, 2, 3, 5, 6), 9)
    assert t.a == (1, 2, 3, 4, 10)
    assert [x.value for x in model.roots] == [3, 1, 5, 2, 6]
    assert check_conditions(model).all()
    assert t.degree % 11 == 9


def test_split_model_construction_rejects_bad_input():
    with pytest.raises(DomainError):
        construct_fp_split_model(5, (1, 2, 3, 4, 0), 1)
    with pytest.raises(DomainError):
        construct_fp_split_model(11, (1, 1, 2), 1)
