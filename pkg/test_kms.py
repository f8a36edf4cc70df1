"""
Test measures, partition functions, Gibbs states and ground states
"""
from fractions import Fraction

import mpmath
import pytest

from bost_connes.core.kms import (
    LevelMeasure,
    check_scaling,
    check_uniformity,
    gibbs_kms_check,
    gibbs_state,
    kms_infinity_simplex,
    parse_beta,
    partition_check,
    partition_function,
    quadratic_character,
    zeta_reference,
    zeta_series,
)
from bost_connes.core.monomials import CrossedMonomial
from bost_connes.exceptions import DeviationWarning, IdealError
from bost_connes.nfield import make_field, parse_ideal, rational_ideal, unit_ideal

ZETA_2 = 1.6449340668
GAUSSIAN_ZETA_2 = 1.5067030099


# =============================
# Inverse temperature
# =============================

def test_parse_beta():
    assert parse_beta(2) == 2
    assert parse_beta("3/2") == Fraction(3, 2)
    assert parse_beta("2.5") == Fraction(5, 2)
    for bad in (0, "-1", "0/3"):
        with pytest.raises(ValueError):
            parse_beta(bad)


# =============================
# Measures
# =============================

def test_counting_measure_has_unit_mass():
    K = make_field(-1)
    mu = LevelMeasure.normalized_counting(K, rational_ideal(K, 5))
    assert mu.total == 1
    assert mu.measure([0, 0, 1]) == 2 * mu.weights[0]


def test_pushforward_over_q_is_counting():
    K = make_field(None)
    pushed = LevelMeasure.normalized_counting(K, rational_ideal(K, 12)).pushforward(rational_ideal(K, 6))
    assert pushed == LevelMeasure.normalized_counting(K, rational_ideal(K, 6))


@pytest.mark.parametrize("m,f,f2", [(None, "2", "8"), (None, "3", "12"), (-1, "1", "5")])
def test_uniformity(m, f, f2):
    K = make_field(m)
    report = check_uniformity(K, parse_ideal(K, f), parse_ideal(K, f2))
    assert report.passed
    assert not report.deviations, f"{[r.witness for r in report.deviations]}"


def test_uneven_fibers_are_reported_as_deviation():
    """DR_(2) of Z[i] has three elements over the two of DR_(1+i)"""
    K = make_field(-1)
    with pytest.warns(DeviationWarning):
        report = check_uniformity(K, parse_ideal(K, "2,1,1"), rational_ideal(K, 2))
    assert report.passed
    assert [r.check_id for r in report.deviations] == ["kms.measure.uniform"]


def test_scaling_over_q():
    K = make_field(None)
    report = check_scaling(K, rational_ideal(K, 3), rational_ideal(K, 2))
    assert not report.deviations


# =============================
# Partition function
# =============================

def test_rational_zeta_two_enclosed():
    K = make_field(None)
    Z = partition_function(K, 2, 1000)
    assert Z.ideal_count == 1000
    assert Z.overlaps()
    assert Z.contains(mpmath.mpf(ZETA_2))
    lo, hi = Z.sum_bounds()
    assert hi - lo < 2e-3


def test_gaussian_zeta_two():
    K = make_field(-1)
    assert abs(float(zeta_reference(K, 2)) - GAUSSIAN_ZETA_2) < 1e-8
    Z = partition_function(K, 2, 1000)
    lo, _ = Z.sum_bounds()
    assert abs(float(lo) - GAUSSIAN_ZETA_2) < 5e-3
    assert Z.contains(zeta_reference(K, 2))


def test_large_beta_is_dominated_by_the_unit_ideal():
    K = make_field(-1)
    lo, hi = partition_function(K, 50, 10).sum_bounds()
    assert 1 < lo and hi - 1 < 1e-14


def test_beta_at_most_one_diverges():
    K = make_field(None)
    Z = partition_function(K, 1, 100)
    assert Z.diverges
    assert Z.sum_bounds()[1] == mpmath.inf
    report = partition_check(K, "1/2", bounds=(10, 100))
    assert [r.check_id for r in report.results] == ["kms.partition.diverges"]


def test_partition_bound_must_be_positive():
    with pytest.raises(IdealError):
        partition_function(make_field(None), 2, 0)


@pytest.mark.parametrize("m,beta", [(None, 2), (None, "3/2"), (-1, 2), (-3, 3), (2, 2), (5, "5/2")])
def test_partition_check(m, beta):
    K = make_field(m)
    report = partition_check(K, beta, bounds=(10, 100, 1000))
    assert report.passed, f"{[(r.check_id, r.message, r.witness) for r in report.fatal]}"


def test_quadratic_character_of_gaussian_field():
    """chi_{-4} is 1 on 1 mod 4 and -1 on 3 mod 4"""
    assert quadratic_character(make_field(-1)) == [0, 1, 0, -1]


def test_zeta_series_frame():
    df = zeta_series(make_field(None), 2, bounds=(10, 100))
    assert list(df.columns) == ["bound", "ideals", "partial_sum", "upper", "euler_lower", "euler_upper", "overlap"]
    assert df["partial_sum"].is_monotonic_increasing
    assert bool(df["overlap"].all())


# =============================
# Gibbs states
# =============================

def test_gibbs_weights_normalized():
    state = gibbs_state(make_field(-1), 2, 20)
    assert state.exact
    assert state.normalized_total() == 1


def test_twist_direction():
    """sigma_{i beta} scales U*_s by N(s)^beta and U_s by N(s)^-beta"""
    K = make_field(-1)
    s = parse_ideal(K, "3")
    state = gibbs_state(K, 2, 20)
    assert state.twist(CrossedMonomial.coisometry(s)) == 81
    assert state.twist(CrossedMonomial.isometry(s)) == Fraction(1, 81)
    x = gibbs_state(K, "3/2", 20).twist(CrossedMonomial.coisometry(s))
    assert float(x.a) <= 27 <= float(x.b)


@pytest.mark.parametrize("m,beta,bound", [(None, 2, 30), (-1, 3, 20), (-5, 2, 16), (None, "5/2", 20)])
def test_gibbs_kms_identity(m, beta, bound):
    K = make_field(m)
    report = gibbs_kms_check(K, beta, bound, samples=6, seed=2)
    assert report.passed, f"{[(r.check_id, r.witness) for r in report.fatal]}"


def test_beta_one_is_flagged():
    report = gibbs_kms_check(make_field(None), 1, 12, samples=2)
    assert "kms.gibbs.beta_one" in [r.check_id for r in report.results]


# =============================
# Ground states
# =============================

@pytest.mark.parametrize("m,f", [(None, "5"), (-1, "5"), (-5, "1"), (3, "1")])
def test_kms_infinity_simplex(m, f):
    K = make_field(m)
    report = kms_infinity_simplex(K, parse_ideal(K, f))
    assert report.passed, f"{[(r.check_id, r.witness) for r in report.fatal]}"


def test_ground_state_count_is_class_number():
    K = make_field(-5)
    report = kms_infinity_simplex(K, unit_ideal(K))
    count = next(r for r in report.results if r.check_id == "kms.kms_inf.count")
    assert "2 extremal states" in count.message
