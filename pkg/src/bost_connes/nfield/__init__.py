"""
Exact arithmetic in Q and quadratic fields
"""

from .fields import FieldElement, NumberField, make_field
from .ideals import (
    FractionalIdeal,
    IntegralIdeal,
    divisors,
    factor_ideal,
    hnf_scan,
    ideal_conjugate,
    ideal_div_gcd_lcm,
    ideal_exact_div,
    ideal_gcd,
    ideal_lcm,
    ideal_mul,
    ideal_quotient,
    ideals_up_to,
    is_coprime,
    parse_ideal,
    primes_above,
    principal_ideal,
    rational_ideal,
    unit_ideal,
)
from .residues import ResidueRing, residue_ring
from .search import (
    SearchResult,
    principal_generator,
    ray_equivalent,
    ray_generator_search,
    totally_positive_lift,
    unit_image,
)
from .types import FieldKind, SearchOutcome, Splitting
from .units import UnitGroup, unit_group

__all__ = [
    "FieldElement",
    "FieldKind",
    "FractionalIdeal",
    "IntegralIdeal",
    "NumberField",
    "ResidueRing",
    "SearchOutcome",
    "SearchResult",
    "Splitting",
    "UnitGroup",
    "divisors",
    "factor_ideal",
    "hnf_scan",
    "ideal_conjugate",
    "ideal_div_gcd_lcm",
    "ideal_exact_div",
    "ideal_gcd",
    "ideal_lcm",
    "ideal_mul",
    "ideal_quotient",
    "ideals_up_to",
    "is_coprime",
    "make_field",
    "parse_ideal",
    "primes_above",
    "principal_generator",
    "principal_ideal",
    "rational_ideal",
    "ray_equivalent",
    "ray_generator_search",
    "residue_ring",
    "totally_positive_lift",
    "unit_group",
    "unit_ideal",
    "unit_image",
]
