"""
Test extension and norm between Q and a quadratic field: ideal maps,
maps of monoids, the divisor map, component maps and the bimodule
"""
import pytest

from bost_connes.core.bimodule import BimoduleElement, bimodule_build
from bost_connes.core.drmonoid import dr_level
from bost_connes.core.functor import (
    component_map,
    component_restriction_check,
    contraction,
    dr_norm_map,
    dr_ver_map,
    extend_and_norm,
    extend_ideal,
    extension_laws,
    functor_diagrams,
    make_extension,
    norm_ideal,
    omega_map,
    omega_table,
    upper_conductor,
)
from bost_connes.core.monomials import CrossedMonomial, same_operator
from bost_connes.exceptions import IdealError
from bost_connes.nfield import parse_ideal, rational_ideal, unit_ideal


@pytest.fixture(scope="module")
def gaussian():
    return make_extension(-1)


# =============================
# Ideals
# =============================

def test_extension_context(gaussian):
    assert str(gaussian) == "Q(sqrt(-1))/Q"
    assert gaussian.degree == 2
    with pytest.raises(IdealError):
        make_extension("Q")


def test_splitting_table(gaussian):
    df = gaussian.splitting_table(13)
    assert list(df["p"]) == [2, 3, 5, 7, 11, 13]
    assert list(df["splitting"]) == ["ramified", "inert", "split", "inert", "inert", "split"]


def test_two_extends_to_square_of_ramified_prime(gaussian):
    """(2) Z[i] = (1+i)^2"""
    P = parse_ideal(gaussian.ext, "2,1,1")
    two = extend_ideal(gaussian, rational_ideal(gaussian.base, 2))
    assert two == P * P
    assert extend_and_norm(gaussian, rational_ideal(gaussian.base, 2)) == two


@pytest.mark.parametrize("spec,norm", [("2,1,1", 2), ("5,2,1", 5), ("3", 9), ("10", 100)])
def test_norms_of_gaussian_ideals(gaussian, spec, norm):
    b = parse_ideal(gaussian.ext, spec)
    assert norm_ideal(gaussian, b) == rational_ideal(gaussian.base, norm)


def test_contraction(gaussian):
    L = gaussian.ext
    assert contraction(gaussian, rational_ideal(L, 6)) == rational_ideal(gaussian.base, 6)
    assert contraction(gaussian, parse_ideal(L, "2,1,1")) is None
    assert contraction(gaussian, parse_ideal(L, "5,2,1")) is None


def test_wrong_field_rejected(gaussian):
    with pytest.raises(IdealError):
        extend_ideal(gaussian, unit_ideal(gaussian.ext))
    with pytest.raises(IdealError):
        norm_ideal(gaussian, unit_ideal(gaussian.base))


@pytest.mark.parametrize("m", [-1, -3, -5, 2, 5])
def test_extension_laws(m):
    report = extension_laws(make_extension(m), 40)
    assert report.passed, f"{[(r.check_id, r.witness) for r in report.fatal]}"


# =============================
# Maps of monoids
# =============================

@pytest.mark.parametrize("m,f", [(-1, "2"), (-1, "5"), (-5, "3"), (2, "2"), (5, "1")])
def test_ver_map(m, f):
    ctx = make_extension(m)
    f = parse_ideal(ctx.base, f)
    mapping, report = dr_ver_map(ctx, f)
    assert report.passed, f"{[(r.check_id, r.witness) for r in report.fatal]}"
    assert len(mapping.mapping) == dr_level(ctx.base, f).size


def test_ver_map_identity_goes_to_identity(gaussian):
    f = rational_ideal(gaussian.base, 5)
    mapping, _ = dr_ver_map(gaussian, f)
    MK, ML = dr_level(gaussian.base, f), dr_level(gaussian.ext, upper_conductor(gaussian, f))
    assert mapping(MK.identity) == ML.identity
    assert mapping(MK.zero) == ML.zero


@pytest.mark.parametrize("m,f", [(-1, "2"), (-1, "5"), (-5, "3"), (2, "2")])
def test_norm_map(m, f):
    ctx = make_extension(m)
    _, report = dr_norm_map(ctx, parse_ideal(ctx.base, f))
    assert report.passed, f"{[(r.check_id, r.witness) for r in report.fatal]}"


@pytest.mark.parametrize("m,f", [(-1, "5"), (-5, "3"), (2, "2")])
def test_functoriality_diagrams(m, f):
    ctx = make_extension(m)
    report = functor_diagrams(ctx, parse_ideal(ctx.base, f))
    assert report.passed, f"{[(r.check_id, r.witness) for r in report.fatal]}"


# =============================
# Divisor map
# =============================

def test_omega_over_ramified_two(gaussian):
    """Divisors of (2) = (1+i)^2 go to (1), (1), (2)"""
    f = rational_ideal(gaussian.base, 2)
    mapping, report = omega_map(gaussian, f)
    assert report.passed
    assert sorted((D.norm, w.norm) for D, w in mapping.items()) == [(1, 1), (2, 1), (4, 2)]
    assert len(omega_table(gaussian, f)) == 3


@pytest.mark.parametrize("m,f", [(-1, "10"), (-5, "6"), (2, "4"), (5, "3")])
def test_omega_laws(m, f):
    ctx = make_extension(m)
    _, report = omega_map(ctx, parse_ideal(ctx.base, f))
    assert report.passed


# =============================
# Components
# =============================

@pytest.mark.parametrize("m,f", [(-1, "2"), (-1, "5"), (-5, "3"), (2, "2")])
def test_component_restriction(m, f):
    ctx = make_extension(m)
    report = component_restriction_check(ctx, parse_ideal(ctx.base, f))
    assert report.passed, f"{[(r.check_id, r.witness) for r in report.fatal]}"


def test_component_map_reaches_every_divisor(gaussian):
    f = rational_ideal(gaussian.base, 2)
    m = component_map(gaussian, f)
    MK = dr_level(gaussian.base, f)
    divisors_hit = {MK.elements[i].divisor.norm for i in m.image()}
    assert divisors_hit == {1, 2}


def test_component_restriction_rejects_non_multiple(gaussian):
    with pytest.raises(IdealError):
        component_restriction_check(gaussian, rational_ideal(gaussian.base, 2), rational_ideal(gaussian.base, 3))


# =============================
# Bimodule
# =============================

@pytest.fixture(scope="module")
def bimodule(gaussian):
    return bimodule_build(gaussian, 16, samples=8, seed=4)


def test_bimodule_axioms(bimodule):
    _, report = bimodule
    assert report.passed, f"{[(r.check_id, r.witness) for r in report.fatal]}"


def test_bimodule_unit_norm(bimodule, gaussian):
    Z, _ = bimodule
    P = parse_ideal(gaussian.ext, "2,1,1")
    xi = Z.element(P)
    value = Z.inner(xi, xi)
    assert value is not None
    assert same_operator([value], [CrossedMonomial.one(gaussian.base)], Z.tests) is None


def test_bimodule_orthogonality(bimodule, gaussian):
    """U*_(1+i) U_(2+i) has no rational part"""
    Z, _ = bimodule
    P = parse_ideal(gaussian.ext, "2,1,1")
    Q = parse_ideal(gaussian.ext, "5,2,1")
    assert Z.inner(Z.element(P), Z.element(Q)) is None


def test_bimodule_primitive_normal_form(bimodule, gaussian):
    Z, _ = bimodule
    K, L = gaussian.base, gaussian.ext
    P = parse_ideal(L, "2,1,1")
    xi = Z.element(P * rational_ideal(L, 3))
    eta = BimoduleElement(P, CrossedMonomial.isometry(rational_ideal(K, 3)))
    assert Z.normalize(xi).ideal == P
    assert Z.same(xi, eta)
    assert all(t.content() == 1 for t in Z.primitive)


def test_bimodule_serializes(bimodule):
    Z, _ = bimodule
    d = Z.to_dict()
    assert d["extension"] == "Q(sqrt(-1))/Q"
    assert d["level"] == [2, 0, 1]
    assert "0,0" in d["inner"]
