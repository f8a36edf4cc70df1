"""
Test exact arithmetic in Q and quadratic fields
Fields, HNF ideals, factorization, enumeration, units and totally positive lifts
"""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bost_connes.exceptions import FieldError, IdealError
from bost_connes.nfield import (
    FieldElement,
    Splitting,
    divisors,
    factor_ideal,
    hnf_scan,
    ideal_conjugate,
    ideal_exact_div,
    ideal_gcd,
    ideal_lcm,
    ideal_mul,
    ideal_quotient,
    ideals_up_to,
    is_coprime,
    make_field,
    parse_ideal,
    primes_above,
    principal_generator,
    ray_equivalent,
    ray_generator_search,
    rational_ideal,
    residue_ring,
    totally_positive_lift,
    unit_group,
    unit_ideal,
)
from bost_connes.nfield.ideals import (
    hnf_from_vectors,
    ideal_count_by_splitting,
    ideal_from_factorization,
    ideal_pow,
    valuation,
)
from bost_connes.nfield.types import SearchOutcome

GRID = [None, -1, -3, -5, 2, 3, 5]


# =============================
# Fields
# =============================

def test_rational_field():
    """Q has discriminant 1 and one real place"""
    K = make_field(None)
    assert K.discriminant == 1
    assert K.signature == (1, 0)
    assert K.is_rational
    assert make_field("Q") == K


def test_gaussian_field():
    K = make_field(-1)
    assert K.discriminant == -4
    assert K.signature == (0, 1)
    assert K.degree == 2
    assert K.is_imaginary and not K.is_real_quadratic


def test_golden_field_omega():
    """m = 1 mod 4 uses omega = (1 + sqrt(5))/2 with minimal polynomial x^2 - x - 1"""
    K = make_field(5)
    assert K.discriminant == 5
    assert K.signature == (2, 0)
    assert (K.omega_trace, K.omega_norm) == (1, -1)
    omega = FieldElement(K, Fraction(0), Fraction(1))
    assert omega * omega - omega - 1 == FieldElement(K, Fraction(0), Fraction(0))
    assert K.is_real_quadratic
    assert omega.trace() == 1 and not omega.is_totally_positive()
    assert (omega * omega).trace() == 3 and (omega * omega).is_totally_positive()


@pytest.mark.parametrize("spec", [0, 1, 4, 12, -8, "abc"])
def test_bad_field_specs_rejected(spec):
    with pytest.raises(FieldError):
        make_field(spec)


# =============================
# Ideal arithmetic
# =============================

def test_rational_product():
    K = make_field(None)
    assert ideal_mul(rational_ideal(K, 6), rational_ideal(K, 4)) == rational_ideal(K, 24)


def test_gaussian_ramified_square():
    """(1+i)^2 = (2) in Z[i]"""
    K = make_field(-1)
    P = primes_above(K, 2)[0]
    assert P.splitting is Splitting.RAMIFIED
    assert P.ideal.key == (2, 1, 1)
    square = ideal_mul(P.ideal, P.ideal)
    assert square == rational_ideal(K, 2)
    assert square.norm == 4
    assert ideal_pow(P.ideal, 4) == rational_ideal(K, 4)
    assert ideal_pow(P.ideal, 0) == unit_ideal(K)


def test_nonprincipal_square_in_sqrt_minus_5():
    """(2, 1+sqrt(-5))^2 = (2)"""
    K = make_field(-5)
    P = primes_above(K, 2)[0].ideal
    assert principal_generator(P) is None
    assert ideal_mul(P, P) == rational_ideal(K, 2)


def test_mixed_fields_rejected():
    with pytest.raises(IdealError):
        ideal_mul(rational_ideal(make_field(-1), 2), rational_ideal(make_field(-5), 2))


def test_exact_division_requires_divisor():
    K = make_field(-1)
    with pytest.raises(IdealError):
        ideal_exact_div(rational_ideal(K, 3), rational_ideal(K, 2))


def test_hnf_from_vectors_runs_euclid_on_omega_coordinates():
    """2+i and i(2+i) span the prime above 5 in either order"""
    K = make_field(-1)
    P = hnf_from_vectors(K, [(2, 1), (-1, 2)])
    assert P == hnf_from_vectors(K, [(-1, 2), (2, 1), (5, 0)])
    assert P.norm == 5
    assert P in [d.ideal for d in primes_above(K, 5)]
    assert ideal_mul(P, ideal_conjugate(P)) == rational_ideal(K, 5)


def test_parse_ideal_round_trip():
    K = make_field(-1)
    assert parse_ideal(K, "5") == rational_ideal(K, 5)
    assert parse_ideal(K, "2,1,1") == primes_above(K, 2)[0].ideal
    with pytest.raises(IdealError):
        parse_ideal(K, "4,1,1")
    with pytest.raises(IdealError):
        parse_ideal(K, "x")


# =============================
# Factorization
# =============================

def test_factor_unit_ideal_is_empty():
    for m in GRID:
        assert factor_ideal(unit_ideal(make_field(m))) == ()


def test_factor_ten_in_gaussian_integers():
    """(10) = (1+i)^2 (2+i) (2-i)"""
    K = make_field(-1)
    factors = factor_ideal(rational_ideal(K, 10))
    assert [(P.key, k) for P, k in factors] == [((2, 1, 1), 2), ((5, 2, 1), 1), ((5, 3, 1), 1)]
    assert ideal_from_factorization(K, factors) == rational_ideal(K, 10)


def test_factor_two_in_sqrt_minus_5():
    K = make_field(-5)
    factors = factor_ideal(rational_ideal(K, 2))
    assert len(factors) == 1
    P, k = factors[0]
    assert k == 2 and P.norm == 2


def test_splitting_types():
    K = make_field(-1)
    assert primes_above(K, 3)[0].splitting is Splitting.INERT
    assert primes_above(K, 3)[0].f == 2
    assert [d.splitting for d in primes_above(K, 5)] == [Splitting.SPLIT, Splitting.SPLIT]


def test_divisors_of_six_over_q():
    K = make_field(None)
    assert [d.norm for d in divisors(rational_ideal(K, 6))] == [1, 2, 3, 6]


# =============================
# Enumeration
# =============================

def test_rational_ideals_up_to_five():
    K = make_field(None)
    assert [a.norm for a in ideals_up_to(K, 5)] == [1, 2, 3, 4, 5]


def test_gaussian_ideals_up_to_five():
    K = make_field(-1)
    keys = [a.key for a in ideals_up_to(K, 5)]
    assert keys == [(1, 0, 1), (2, 1, 1), (2, 0, 2), (5, 2, 1), (5, 3, 1)]


def test_sqrt_minus_5_ideals_up_to_two():
    K = make_field(-5)
    ideals = ideals_up_to(K, 2)
    assert len(ideals) == 2
    assert ideals[0].is_unit_ideal() and ideals[1].norm == 2


@pytest.mark.parametrize("m", GRID)
def test_enumeration_matches_hnf_scan(m):
    K = make_field(m)
    assert ideals_up_to(K, 60) == hnf_scan(K, 60)
    assert ideal_count_by_splitting(K, 60) == len(hnf_scan(K, 60))


def test_nonpositive_bound_rejected():
    with pytest.raises(IdealError):
        ideals_up_to(make_field(-1), 0)


# =============================
# Properties
# =============================

def _ideal_strategy(m, bound=40):
    K = make_field(m)
    return st.sampled_from(ideals_up_to(K, bound))


@pytest.mark.property
@settings(max_examples=60, deadline=None)
@given(data=st.data(), m=st.sampled_from(GRID))
def test_norm_is_multiplicative(data, m):
    a = data.draw(_ideal_strategy(m))
    b = data.draw(_ideal_strategy(m))
    ab = ideal_mul(a, b)
    assert ab.norm == a.norm * b.norm
    assert ab == ideal_mul(b, a)
    assert ideal_exact_div(ab, b) == a


@pytest.mark.property
@settings(max_examples=60, deadline=None)
@given(data=st.data(), m=st.sampled_from(GRID))
def test_gcd_lcm_product(data, m):
    """gcd(a, b) lcm(a, b) = a b"""
    a = data.draw(_ideal_strategy(m))
    b = data.draw(_ideal_strategy(m))
    assert ideal_mul(ideal_gcd(a, b), ideal_lcm(a, b)) == ideal_mul(a, b)
    assert is_coprime(a, b) == ideal_gcd(a, b).is_unit_ideal()


@pytest.mark.property
@settings(max_examples=60, deadline=None)
@given(data=st.data(), m=st.sampled_from(GRID))
def test_factorization_rebuilds_ideal(data, m):
    a = data.draw(_ideal_strategy(m, 80))
    factors = factor_ideal(a)
    assert ideal_from_factorization(a.field, factors) == a
    for P, k in factors:
        assert valuation(P, a) == k


@pytest.mark.property
@settings(max_examples=40, deadline=None)
@given(data=st.data(), m=st.sampled_from(GRID[1:]))
def test_conjugate_preserves_norm(data, m):
    a = data.draw(_ideal_strategy(m))
    assert ideal_conjugate(a).norm == a.norm
    assert ideal_conjugate(ideal_conjugate(a)) == a
    assert ideal_mul(a, ideal_conjugate(a)) == rational_ideal(a.field, a.norm)


# =============================
# Units
# =============================

def test_unit_groups():
    assert unit_group(make_field(None)).torsion_order == 2
    U = unit_group(make_field(-1))
    assert U.torsion_order == 4 and U.root_of_unity == (0, 1)
    assert unit_group(make_field(-3)).torsion_order == 6


def test_fundamental_unit_of_sqrt2():
    """eps = 1 + sqrt(2) with norm -1"""
    U = unit_group(make_field(2))
    assert U.fundamental_unit == (1, 1)
    assert U.fundamental_norm == -1
    assert not U.fundamental_is_totally_positive()
    assert U.sign_vectors() == [(-1, -1), (1, -1)]
    assert U.totally_positive_generator() == (3, 2)


def test_fundamental_unit_of_sqrt3_is_totally_positive():
    U = unit_group(make_field(3))
    assert U.fundamental_unit == (2, 1)
    assert U.fundamental_is_totally_positive()
    assert U.totally_positive_generator() == (2, 1)


# =============================
# Residues and lifts
# =============================

def test_rational_lifts_mod_six():
    K = make_field(None)
    ring = residue_ring(rational_ideal(K, 6))
    assert totally_positive_lift(ring, (5, 0)).a == 5
    assert totally_positive_lift(ring, (0, 0)).a == 6


def test_sqrt2_lift_mod_two():
    """1 + sqrt(2) mod (2) lifts to 3 + sqrt(2)"""
    K = make_field(2)
    ring = residue_ring(rational_ideal(K, 2))
    x = totally_positive_lift(ring, (1, 1))
    assert (x.a, x.b) == (3, 1)


def test_residue_unit_counts():
    K = make_field(-1)
    assert residue_ring(rational_ideal(K, 2)).unit_count == 2
    assert residue_ring(rational_ideal(K, 5)).unit_count == 16
    assert residue_ring(rational_ideal(make_field(None), 6)).unit_count == 2


# =============================
# Generator searches
# =============================

def test_rational_ray_generator():
    K = make_field(None)
    c = ideal_quotient(rational_ideal(K, 7), unit_ideal(K))
    result = ray_generator_search(c, ideal_quotient(rational_ideal(K, 6), unit_ideal(K)))
    assert result.found
    assert result.generator.a == 7


def test_nonprincipal_search():
    K = make_field(-5)
    P = primes_above(K, 2)[0].ideal
    result = ray_generator_search(ideal_quotient(P, unit_ideal(K)))
    assert result.outcome is SearchOutcome.NOT_PRINCIPAL


def test_sqrt2_no_admissible_generator():
    """(3 + sqrt(2)) has no totally positive generator = 1 mod (2)"""
    K = make_field(2)
    J = parse_ideal(K, "7,3,1")
    assert principal_generator(J) is not None
    result = ray_generator_search(ideal_quotient(J, unit_ideal(K)),
                                  ideal_quotient(rational_ideal(K, 2), unit_ideal(K)))
    assert result.outcome is SearchOutcome.NO_ADMISSIBLE_GENERATOR


def test_ray_equivalence_over_q():
    K = make_field(None)
    f = rational_ideal(K, 5)
    assert ray_equivalent(rational_ideal(K, 2), rational_ideal(K, 7), f)
    assert not ray_equivalent(rational_ideal(K, 2), rational_ideal(K, 3), f)
