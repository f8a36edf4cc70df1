"""
Test the finite-level monoids DR_f: constructions, unit groups and level maps
"""
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bost_connes.core.drmonoid import (
    Construction,
    DRMonoid,
    cardinality_audit,
    check_monoid_laws,
    classify_residue,
    dr_direct,
    dr_level,
    iota,
    mult_embed,
    project,
    psi,
    triple_agreement,
    verify_level_maps,
    verify_projection_chain,
    y_level,
)
from bost_connes.core.tower import clear_towers, get_tower
from bost_connes.exceptions import DeviationWarning, IdealError
from bost_connes.nfield import make_field, parse_ideal, rational_ideal, unit_ideal

LEVELS = [
    (None, "6"),
    (None, "12"),
    (-1, "2,1,1"),
    (-1, "2"),
    (-1, "5,2,1"),
    (-3, "2"),
    (-5, "1"),
    (-5, "2,1,1"),
    (2, "2"),
    (3, "1"),
    (5, "2"),
]


def _level(m, f):
    K = make_field(m)
    return K, parse_ideal(K, f)


# =============================
# Sizes
# =============================

@pytest.mark.parametrize("n", range(1, 13))
def test_rational_level_has_n_elements(n):
    K = make_field(None)
    M = dr_level(K, rational_ideal(K, n))
    assert M.size == n, f"|DR_({n})| should be {n}, got {M.size}"


def test_small_quadratic_sizes():
    K = make_field(-1)
    assert dr_level(K, parse_ideal(K, "2,1,1")).size == 2
    K = make_field(-5)
    assert dr_level(K, unit_ideal(K)).size == 2


def test_unit_level_is_the_narrow_class_group():
    K = make_field(3)
    M = dr_level(K, unit_ideal(K))
    assert M.size == 2
    assert len(M.coprime_indices()) == 2
    assert M.identity == M.zero


# =============================
# Constructions
# =============================

@pytest.mark.parametrize("m,f", LEVELS)
def test_three_constructions_agree(m, f):
    K, f = _level(m, f)
    report = triple_agreement(K, f)
    assert report.passed, f"{K.tag} f={f}: {[r.message for r in report.fatal]}"


@pytest.mark.parametrize("m,f", LEVELS)
def test_monoid_laws(m, f):
    K, f = _level(m, f)
    report = check_monoid_laws(dr_level(K, f))
    assert report.passed, f"{K.tag} f={f}: {[r.message for r in report.fatal]}"


def test_psi_is_an_isomorphism():
    K, f = _level(-1, "5")
    m, report = psi(K, f)
    assert report.passed
    assert len(m.mapping) == len(y_level(K, f).orbits)


def test_y_orbits_over_q_are_points():
    """Over Q the only totally positive unit is 1, so each orbit pairs (rho, alpha) with one class"""
    K, f = _level(None, "6")
    Y = y_level(K, f)
    assert len(Y.orbits) == 6
    assert len(Y.points()) == 6 * 2
    for x in Y.points():
        for s in Y.ring.units:
            assert Y.orbit_of[Y.act_unit(s, x)] == Y.orbit_of[x]


def test_rational_units_mod_six():
    K, f = _level(None, "6")
    M = dr_level(K, f)
    units = sorted(M.elements[i].rep.norm % 6 for i in M.coprime_indices())
    assert units == [1, 5]


def test_identity_and_zero():
    K, f = _level(None, "6")
    M = dr_level(K, f)
    for i in range(M.size):
        assert M.mul(M.identity, i) == i
        assert M.mul(M.zero, i) == M.zero
    assert M.locate(rational_ideal(K, 7)) == M.identity
    assert M.locate(rational_ideal(K, 12)) == M.zero


def test_locate_rejects_foreign_ideal():
    K, f = _level(None, "6")
    with pytest.raises(IdealError):
        dr_level(K, f).locate(rational_ideal(make_field(-1), 2))


def test_levels_are_memoized():
    K, f = _level(-5, "3")
    first = dr_level(K, f)
    assert get_tower(K).has("dr", f)
    assert dr_level(K, f) is first
    clear_towers()
    assert not get_tower(K).has("dr", f)
    assert dr_level(K, f).size == first.size


def test_dict_round_trip():
    K, f = _level(-1, "5")
    M = dr_direct(K, f)
    back = DRMonoid.from_dict(K, M.to_dict())
    assert back.construction is Construction.DIRECT
    assert back.level == f
    assert np.array_equal(back.table, M.table)
    assert [x.key for x in back.elements] == [x.key for x in M.elements]


# =============================
# iota and sigma
# =============================

@pytest.mark.parametrize("m,f", [(None, "6"), (-1, "5"), (2, "7"), (-5, "3")])
def test_iota(m, f):
    K, f = _level(m, f)
    mapping, report = iota(K, f)
    assert report.passed, f"{[r.message for r in report.fatal]}"
    assert len(mapping.mapping) == f.norm


def test_iota_over_q_is_injective():
    K, f = _level(None, "10")
    mapping, _ = iota(K, f)
    assert mapping.is_injective()


@pytest.mark.parametrize("m,f", [(None, "12"), (-1, "2"), (-5, "2"), (2, "2")])
def test_sigma(m, f):
    K, f = _level(m, f)
    mapping, report = classify_residue(K, f)
    assert report.passed, f"{[r.message for r in report.fatal]}"
    assert mapping.is_injective()


# =============================
# Level maps
# =============================

def test_projection_twelve_to_six_has_fibers_of_two():
    K = make_field(None)
    with warnings.catch_warnings():
        warnings.simplefilter("error", DeviationWarning)
        m, report = project(K, rational_ideal(K, 6), rational_ideal(K, 12))
    assert report.passed
    assert {len(v) for v in m.fibers().values()} == {2}


def test_projection_needs_divisibility():
    K = make_field(None)
    with pytest.raises(IdealError):
        project(K, rational_ideal(K, 5), rational_ideal(K, 12))


@pytest.mark.parametrize("m,f,d", [(None, "3", "2"), (-1, "2,1,1", "5,2,1"), (-5, "1", "2,1,1")])
def test_multiplicative_embedding(m, f, d):
    K, f = _level(m, f)
    d = parse_ideal(K, d)
    mapping, report = mult_embed(K, f, d)
    assert report.passed, f"{[r.message for r in report.fatal]}"
    assert mapping.is_injective()


def test_level_maps_compose():
    K = make_field(-1)
    f = unit_ideal(K)
    report = verify_level_maps(K, f, parse_ideal(K, "2,1,1"), parse_ideal(K, "5,2,1"))
    assert report.passed


def test_projection_chain():
    K = make_field(None)
    report = verify_projection_chain(K, rational_ideal(K, 2), rational_ideal(K, 4), rational_ideal(K, 12))
    assert report.passed


@pytest.mark.property
@settings(max_examples=15, deadline=None)
@given(n=st.integers(min_value=1, max_value=6), k=st.integers(min_value=2, max_value=3))
def test_rational_projection_is_reduction(n, k):
    """pi: DR_(kn) -> DR_(n) over Q sends the class of a to the class of a"""
    K = make_field(None)
    m, report = project(K, rational_ideal(K, n), rational_ideal(K, k * n))
    assert report.passed
    big, small = dr_level(K, rational_ideal(K, k * n)), dr_level(K, rational_ideal(K, n))
    for x in big.elements:
        assert m(x.index) == small.locate(x.rep)


# =============================
# Audit
# =============================

def test_audit_over_q():
    K = make_field(None)
    data = cardinality_audit(K, rational_ideal(K, 6)).results[0].data
    assert data["computed"] == 6
    assert data["closed_form"] == 12 and not data["closed_form_agrees"]
    assert data["narrow_form_agrees"]


def test_audit_sqrt2_conductor_2():
    K = make_field(2)
    data = cardinality_audit(K, rational_ideal(K, 2)).results[0].data
    assert (data["computed"], data["closed_form"], data["narrow_form"]) == (4, 16, 4)


def test_audit_imaginary_field_matches_closed_form():
    K = make_field(-5)
    data = cardinality_audit(K, unit_ideal(K)).results[0].data
    assert data["computed"] == 2 and data["closed_form_agrees"]
