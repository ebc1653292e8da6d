from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from truncpoisson.core import full_pmf, pmf_direct
from truncpoisson.multistrain import (
    StrainSet,
    dominance_report,
    multi_pmf,
    one_infection_series,
    pi1_comparison_rows,
    pi1_two_strain_explicit,
    total_count_pmf,
)
from truncpoisson.oracles import enumerate_exact
from truncpoisson.params import DomainError, LatticeParams, ResourceError

F = Fraction
prob = st.fractions(min_value=0, max_value=F(1, 2), max_denominator=12)


def test_validation():
    with pytest.raises(DomainError):
        StrainSet(((F(2, 3), 1), (F(1, 2), 2)))
    with pytest.raises(DomainError):
        StrainSet(((F(1, 3), -1),))


def test_single_day():
    b1, b2 = F(1, 5), F(1, 3)
    t = multi_pmf(StrainSet(((b1, 2), (b2, 4))), 1)
    assert t[(0, 0)] == 1 - b1 - b2 and t[(1, 0)] == b1 and t[(0, 1)] == b2
    assert total_count_pmf(StrainSet(((b1, 2), (b2, 4))), 1, 1) == b1 + b2


@given(st.integers(1, 25), st.lists(st.tuples(prob, st.integers(0, 4)), min_size=1, max_size=3))
def test_joint_normalization(n, strains):
    if sum(b for b, _ in strains) > 1:
        strains = strains[:1]
    assert multi_pmf(StrainSet(tuple(strains)), n).total() == 1


def test_normalization_upper_range():
    ss = StrainSet(((F(1, 9), 2), (F(1, 7), 3), (F(1, 11), 5)))
    assert multi_pmf(ss, 60).total() == 1


@given(st.integers(1, 20), prob, prob, st.integers(0, 4), st.integers(0, 4))
def test_exchange_symmetry(n, b1, b2, l1, l2):
    a = multi_pmf(StrainSet(((b1, l1), (b2, l2))), n)
    b = multi_pmf(StrainSet(((b2, l2), (b1, l1))), n)
    assert a.permuted((1, 0)).probs == b.probs


def test_k1_and_equal_l_reductions():
    for n in range(1, 25):
        p = LatticeParams(n, 3, F(1, 4))
        assert multi_pmf(StrainSet.single(p), n).marginal(0) == full_pmf(p).probs
        two = StrainSet(((F(1, 10), 3), (F(3, 20), 3)))
        assert multi_pmf(two, n).total_count() == full_pmf(p).probs


def test_vanishing_strain():
    for n in range(1, 20):
        t = multi_pmf(StrainSet(((F(1, 3), 2), (F(0), 5))), n)
        assert t.marginal(0) == tuple(pmf_direct(LatticeParams(n, 2, F(1, 3)), r) for r in range(len(t.marginal(0))))
        assert total_count_pmf(StrainSet(((F(0), 2), (F(0), 5))), n, 1) == 0


def test_oracle_on_three_strains():
    ss = StrainSet(((F(1, 5), 1), (F(1, 4), 2), (F(1, 6), 0)))
    for n in range(1, 8):
        assert enumerate_exact(ss, n).probs == multi_pmf(ss, n).probs


def test_two_routes_for_one_infection():
    ss = StrainSet(((F(1, 10), 3), (F(1, 20), 5)))
    assert total_count_pmf(ss, 20, 1) == one_infection_series(ss, 20)
    assert total_count_pmf(ss, 20, 1, route="series") == total_count_pmf(ss, 20, 1)


@given(st.integers(1, 15), prob, prob, st.integers(0, 3), st.integers(0, 3), st.fractions(0, F(1, 4), max_denominator=12))
def test_dominance_monotone_in_own_beta(n, b1, b2, l1, l2, bump):
    assume(b1 + bump + b2 <= 1)
    lo = dominance_report(StrainSet(((b1, l1), (b2, l2))), n)["strains"][0]["p_at_least_one"]
    hi = dominance_report(StrainSet(((b1 + bump, l1), (b2, l2))), n)["strains"][0]["p_at_least_one"]
    assert hi >= lo


def test_dominance_picks_the_stronger_strain():
    rep = dominance_report(StrainSet(((F(1, 50), 3), (F(1, 10), 3))), 30)
    assert rep["dominant"] == 1


def test_work_cap():
    with pytest.raises(ResourceError):
        multi_pmf(StrainSet(((F(1, 9), 0), (F(1, 7), 0), (F(1, 11), 0))), 60, max_work=1000)


def test_explicit_display_is_reported_not_trusted():
    with pytest.raises(DomainError):
        pi1_two_strain_explicit(10, 4, 2, F(1, 10), F(1, 20))
    rows = pi1_comparison_rows([(2, 1, 1, F(1, 10), F(1, 20)), (8, 1, 3, F(1, 10), F(1, 20))])
    assert [r["reference"] for r in rows] == [
        str(total_count_pmf(StrainSet(((F(1, 10), 1), (F(1, 20), 1))), 2, 1)),
        str(total_count_pmf(StrainSet(((F(1, 10), 1), (F(1, 20), 3))), 8, 1)),
    ]
    assert not any(r["match"] for r in rows)
    # with (b1 + b2) as prefactor the display agrees whenever L1 < L2
    assert rows[1]["rescaled_match"]
