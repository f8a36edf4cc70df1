"""
Test class groups, narrow class groups, strict ray class groups and phi_K
"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bost_connes.classgroups import (
    FiniteAbelianGroup,
    class_group,
    euler_phi,
    narrow_class_group,
    residue_unit_group,
    strict_ray_class_group,
    verify_totient_identity,
)
from bost_connes.exceptions import IdealError
from bost_connes.nfield import (
    divisors,
    ideals_up_to,
    is_coprime,
    make_field,
    parse_ideal,
    primes_above,
    rational_ideal,
    ray_equivalent,
    residue_ring,
    totally_positive_lift,
)


# =============================
# Finite abelian groups
# =============================

def test_invariants_must_form_divisor_chain():
    with pytest.raises(ValueError):
        FiniteAbelianGroup((4, 2))
    with pytest.raises(ValueError):
        FiniteAbelianGroup((1, 3))
    G = FiniteAbelianGroup((2, 4))
    assert G.order == 8 and G.exponent == 4 and not G.is_cyclic()


def test_group_table_is_latin_square():
    G = FiniteAbelianGroup((2, 6))
    table = G.table()
    assert table.shape == (12, 12)
    for row in table:
        assert sorted(row) == list(range(12)), f"row {row} is not a permutation"


def test_units_mod_eight_are_klein_four():
    ring = residue_ring(rational_ideal(make_field(None), 8))
    assert residue_unit_group(ring).group.invariants == (2, 2)


def test_gaussian_units_mod_five():
    """(Z[i]/5)^x = F_5^x x F_5^x"""
    ring = residue_ring(rational_ideal(make_field(-1), 5))
    assert residue_unit_group(ring).group.invariants == (4, 4)


# =============================
# Class groups
# =============================

@pytest.mark.parametrize("m,order", [(None, 1), (-1, 1), (-3, 1), (-5, 2), (2, 1), (3, 1), (5, 1)])
def test_class_numbers(m, order):
    K = make_field(m)
    assert class_group(K).order == order, f"h({K.tag}) should be {order}"


def test_sqrt_minus_5_class_group():
    K = make_field(-5)
    Cl = class_group(K)
    assert Cl.group.invariants == (2,)
    P = primes_above(K, 2)[0].ideal
    assert Cl.dlog(P) == (1,)
    assert Cl.dlog(rational_ideal(K, 2)) == (0,)


@pytest.mark.parametrize("m,order", [(2, 1), (3, 2), (5, 1), (-1, 1), (None, 1)])
def test_narrow_class_numbers(m, order):
    """Q(sqrt(3)) has only totally positive units, so its narrow class group doubles"""
    K = make_field(m)
    assert narrow_class_group(K).order == order


# =============================
# Ray class groups
# =============================

def test_rational_ray_class_group_mod_5():
    K = make_field(None)
    G = strict_ray_class_group(K, rational_ideal(K, 5))
    assert G.order == 4
    assert G.group.is_cyclic()
    assert G.group.element_order(G.dlog(rational_ideal(K, 2))) == 4


def test_gaussian_ray_class_group_mod_5():
    K = make_field(-1)
    G = strict_ray_class_group(K, rational_ideal(K, 5))
    assert G.invariants == (4,)


def test_gaussian_ray_class_group_mod_2_is_trivial():
    K = make_field(-1)
    assert strict_ray_class_group(K, rational_ideal(K, 2)).order == 1


def test_sqrt2_ray_class_group_mod_2():
    K = make_field(2)
    G = strict_ray_class_group(K, rational_ideal(K, 2))
    assert G.order == 2
    report = G.order_report()
    assert report.agrees, f"order report disagrees: {report.as_dict()}"


@pytest.mark.parametrize("m,f", [(None, "6"), (None, "12"), (-1, "5"), (-1, "2,1,1"), (-5, "3"), (2, "2"), (3, "1"), (5, "4")])
def test_order_report_agrees(m, f):
    K = make_field(m)
    G = strict_ray_class_group(K, parse_ideal(K, f))
    report = G.order_report()
    assert report.agrees, f"{K.tag} f={f}: {report.as_dict()}"


def test_dlog_rep_round_trip():
    K = make_field(-5)
    G = strict_ray_class_group(K, rational_ideal(K, 3))
    for x in G.classes():
        assert G.dlog(G.rep(x)) == x, f"rep({x}) lands in the wrong class"


def test_dlog_rejects_ideals_sharing_primes_with_conductor():
    K = make_field(None)
    G = strict_ray_class_group(K, rational_ideal(K, 6))
    with pytest.raises(IdealError):
        G.dlog(rational_ideal(K, 4))


def test_j_inverts_class_of_lift():
    """dlog of (x) plus j(x mod f) vanishes for a totally positive lift x"""
    K = make_field(None)
    G = strict_ray_class_group(K, rational_ideal(K, 7))
    for s in G.ring.units:
        x = int(totally_positive_lift(G.ring, s).a)
        total = G.group.add(G.dlog(rational_ideal(K, x)), G.j(s))
        assert total == G.group.zero(), f"j fails at residue {s}"


def test_j_kernel_consistent():
    K = make_field(2)
    G = strict_ray_class_group(K, rational_ideal(K, 7))
    kernel = G.verify_j()
    assert G.ring.one() in kernel


def test_projection_is_surjective():
    K = make_field(None)
    big = strict_ray_class_group(K, rational_ideal(K, 12))
    small = strict_ray_class_group(K, rational_ideal(K, 6))
    image = big.project(small)
    assert set(image.values()) == set(small.classes())
    with pytest.raises(IdealError):
        small.project(big)


@pytest.mark.property
@settings(max_examples=30, deadline=None)
@given(n=st.integers(min_value=1, max_value=40))
def test_rational_ray_class_order_is_phi(n):
    """Over Q the strict ray class group mod n is (Z/n)^x"""
    K = make_field(None)
    f = rational_ideal(K, n)
    assert strict_ray_class_group(K, f).order == euler_phi(f)


@pytest.mark.property
@settings(max_examples=20, deadline=None)
@given(data=st.data())
def test_ray_classes_are_multiplicative(data):
    K = make_field(-1)
    f = rational_ideal(K, 5)
    G = strict_ray_class_group(K, f)
    pool = [a for a in ideals_up_to(K, 40) if is_coprime(a, f)]
    a = data.draw(st.sampled_from(pool))
    b = data.draw(st.sampled_from(pool))
    assert G.dlog(a * b) == G.group.add(G.dlog(a), G.dlog(b))


RAY_CASES = [
    (None, "5"), (None, "8"), (-1, "3"), (-5, "3"), (2, "7"),
    (3, "2"), (-23, "2"), (10, "3"), (5, "4"),
]


def _coprime_pool(K, f, bound=60):
    return [a for a in ideals_up_to(K, bound) if is_coprime(a, f)]


@pytest.mark.parametrize("m,conductor", RAY_CASES)
def test_ray_classes_match_ray_equivalence(m, conductor):
    """Each ideal is ray equivalent to the first ideal of its class and to no other class's first ideal"""
    K = make_field(m)
    f = parse_ideal(K, conductor)
    G = strict_ray_class_group(K, f)
    firsts = {}
    for a in _coprime_pool(K, f):
        firsts.setdefault(G.dlog(a), a)
    for a in _coprime_pool(K, f):
        cls = G.dlog(a)
        for v, b in firsts.items():
            assert ray_equivalent(a, b, f) == (v == cls), (K, f, a, b)


@pytest.mark.slow
@pytest.mark.parametrize("m,conductor", RAY_CASES)
def test_ray_classes_match_ray_equivalence_pairwise(m, conductor):
    K = make_field(m)
    f = parse_ideal(K, conductor)
    G = strict_ray_class_group(K, f)
    pool = _coprime_pool(K, f)
    for i, a in enumerate(pool):
        for b in pool[i:]:
            assert (G.dlog(a) == G.dlog(b)) == ray_equivalent(a, b, f), (K, f, a, b)


# =============================
# Euler totient
# =============================

@pytest.mark.parametrize("m,f,phi", [(None, "6", 2), (-1, "2", 2), (-1, "5", 16), (-1, "2,1,1", 1), (-5, "2", 2), (None, "1", 1)])
def test_euler_phi(m, f, phi):
    K = make_field(m)
    assert euler_phi(parse_ideal(K, f)) == phi


@pytest.mark.parametrize("m", [None, -1, -5, 2, 5])
def test_totient_identity(m):
    K = make_field(m)
    for n in (1, 6, 10, 12):
        f = rational_ideal(K, n)
        report = verify_totient_identity(f)
        assert report.holds
        assert report.total == f.norm
        assert len(report.to_frame()) == len(divisors(f))
