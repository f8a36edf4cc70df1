"""
Test the level algebras: function operators, Galois orbits,
equivariant functions, symmetries and crossed-product monomials
"""
from fractions import Fraction

import numpy as np
import pytest

from bost_connes.core.bcalgebra import (
    LevelFunction,
    galois_orbit_structure,
    operator_words,
    pi_by_divisors,
    relation_grid,
    rho_op,
    sigma_op,
    transition_compat,
    verify_relation_suite,
)
from bost_connes.core.drmonoid import dr_level
from bost_connes.core.equivariant import (
    equivariant_function_module,
    kms_infinity_evaluation,
    symmetry_compat,
)
from bost_connes.core.monomials import (
    CrossedMonomial,
    apply_word,
    basis_vector,
    crossed_monomial_calculus,
    image,
    matrix_entry,
    projection,
)
from bost_connes.exceptions import IdealError
from bost_connes.nfield import ideals_up_to, make_field, parse_ideal, rational_ideal, unit_ideal


def _ideal(m, spec):
    K = make_field(m)
    return K, parse_ideal(K, spec)


# =============================
# Level functions
# =============================

def test_constant_function():
    K, f = _ideal(None, "6")
    h = LevelFunction.constant(K, f, 3)
    assert h.values == (Fraction(3),) * 6
    assert not h.is_zero()


def test_lift_and_arithmetic_across_levels():
    K = make_field(None)
    a = LevelFunction.indicator(K, rational_ideal(K, 2), [0])
    b = LevelFunction.constant(K, rational_ideal(K, 3), 2)
    s = a + b
    assert s.level == rational_ideal(K, 6)
    assert s.same_as(a.lift(rational_ideal(K, 6)) + b.lift(rational_ideal(K, 6)))
    p = a * b
    assert p.same_as(a.scale(2))


def test_restrict_undoes_extend():
    """sigma_d rho_d = 1 pointwise"""
    K, f = _ideal(-1, "2,1,1")
    d = parse_ideal(K, "5,2,1")
    h = LevelFunction.from_vector(K, f, [Fraction(1, 2), Fraction(-3)])
    assert h.extend(d).restrict(d) == h


def test_extended_one_is_divisibility_indicator():
    K = make_field(-5)
    d = parse_ideal(K, "2,1,1")
    pi = projection(K, d)
    expected = pi_by_divisors(K, d, d)
    assert [int(v) for v in pi.values] == expected.tolist()


def test_translate_by_unit_class_permutes():
    K, f = _ideal(None, "5")
    h = LevelFunction.from_vector(K, f, range(5))
    moved = h.translate(rational_ideal(K, 2))
    assert sorted(moved.values) == sorted(h.values)


def test_operator_matrices_are_transposes():
    K = make_field(None)
    f, d = rational_ideal(K, 2), rational_ideal(K, 3)
    S = sigma_op(K, f, d)
    assert S.shape == (2, 6)
    assert np.array_equal(rho_op(K, f, d), S.T)
    assert np.array_equal(S @ S.T, np.eye(2, dtype=np.int64))


# =============================
# Relations
# =============================

@pytest.mark.parametrize("m,f,d,e", [
    (None, "1", "2", "3"),
    (None, "2", "2", "6"),
    (-1, "1", "2,1,1", "5,2,1"),
    (-1, "2,1,1", "2,1,1", "2"),
    (-5, "1", "2,1,1", "3,1,1"),
    (2, "1", "2,0,1", "7,3,1"),
])
def test_relation_suite(m, f, d, e):
    K, f = _ideal(m, f)
    report = verify_relation_suite(K, f, parse_ideal(K, d), parse_ideal(K, e))
    assert report.passed, f"{[(r.check_id, r.witness) for r in report.fatal]}"


@pytest.mark.slow
def test_relation_grid_gaussian():
    K = make_field(-1)
    assert relation_grid(K, unit_ideal(K), 5).passed


def test_transition_compatibility():
    K = make_field(None)
    report = transition_compat(K, rational_ideal(K, 2), rational_ideal(K, 6), rational_ideal(K, 3))
    assert report.passed


def test_operator_words():
    K = make_field(-1)
    report = operator_words(K, unit_ideal(K), list(ideals_up_to(K, 5)), count=12, seed=3)
    assert report.passed


# =============================
# Galois orbits
# =============================

def test_rational_orbits_mod_six():
    K, f = _ideal(None, "6")
    data, report = galois_orbit_structure(K, f)
    assert report.passed
    sizes = {o.divisor.norm: len(o.members) for o in data}
    assert sizes == {1: 2, 2: 2, 3: 1, 6: 1}


@pytest.mark.parametrize("m,f", [(-1, "5"), (-5, "2"), (3, "2"), (2, "7")])
def test_orbits_are_torsors(m, f):
    K, f = _ideal(m, f)
    _, report = galois_orbit_structure(K, f)
    assert report.passed, f"{[(r.check_id, r.witness) for r in report.fatal]}"


# =============================
# Equivariant functions
# =============================

@pytest.mark.parametrize("m,f", [(None, "6"), (-1, "2"), (-5, "1"), (3, "1")])
def test_equivariant_module(m, f):
    K, f = _ideal(m, f)
    E, report = equivariant_function_module(K, f)
    assert report.passed, f"{[(r.check_id, r.witness) for r in report.fatal]}"
    assert E.dimension == dr_level(K, f).size


def test_kms_infinity_evaluation():
    K, f = _ideal(-1, "5")
    assert kms_infinity_evaluation(K, f).passed


# =============================
# Symmetries
# =============================

@pytest.mark.parametrize("m,f,s", [(None, "5", "2"), (-1, "5", "2,1,1"), (3, "1", "2,1,1"), (-5, "3", "2,1,1")])
def test_symmetry_compatibility(m, f, s):
    K, f = _ideal(m, f)
    report = symmetry_compat(K, f, parse_ideal(K, s))
    assert report.passed, f"{[(r.check_id, r.witness) for r in report.fatal]}"


def test_symmetry_needs_coprime_ideal():
    K, f = _ideal(None, "6")
    with pytest.raises(IdealError):
        symmetry_compat(K, f, rational_ideal(K, 2))


# =============================
# Crossed-product monomials
# =============================

def test_isometry_moves_basis_vectors():
    K = make_field(-1)
    s = parse_ideal(K, "2,1,1")
    b = parse_ideal(K, "5,2,1")
    c, kappa = image(CrossedMonomial.isometry(s), b)
    assert c == s * b and kappa == 1


def test_coisometry_undoes_isometry():
    K = make_field(None)
    s = rational_ideal(K, 3)
    for b in ideals_up_to(K, 8):
        v = apply_word([CrossedMonomial.coisometry(s), CrossedMonomial.isometry(s)], basis_vector(b))
        assert v == basis_vector(b)


def test_coisometry_kills_non_multiples():
    K = make_field(None)
    V = CrossedMonomial.coisometry(rational_ideal(K, 2))
    assert matrix_entry(V, rational_ideal(K, 1), rational_ideal(K, 3)) == 0
    assert matrix_entry(V, rational_ideal(K, 2), rational_ideal(K, 4)) == 1


def test_product_in_normal_form():
    """U_s U*_t collapses its common part"""
    K = make_field(None)
    x = CrossedMonomial.isometry(rational_ideal(K, 6)) * CrossedMonomial.coisometry(rational_ideal(K, 4))
    assert x.right == rational_ideal(K, 3)
    assert x.left == rational_ideal(K, 2)


@pytest.mark.parametrize("m,f,bound", [(None, "2", 4), (-1, "2,1,1", 4)])
def test_crossed_monomial_calculus(m, f, bound):
    K, f = _ideal(m, f)
    report = crossed_monomial_calculus(K, f, bound, seed=1, samples=8)
    assert report.passed, f"{[(r.check_id, r.witness) for r in report.fatal]}"
