"""
Totally positive lifts and exact generator searches.

ray_generator_search decides whether a fractional ideal c = J/t has a
generator x with x totally positive and x - 1 in a fractional modulus M/s.
It first finds one generator of J by bounded enumeration of the norm form,
then scans x * zeta^j * eps^k over one period of (residue mod t*M, signs).

Everything is exact; real embeddings are compared through squares.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt
from typing import List, Optional

from .fields import (
    FieldElement,
    NumberField,
    is_totally_positive_pair,
    pair_mul,
    pair_signs,
)
from .ideals import FractionalIdeal, IntegralIdeal, ideal_quotient
from .residues import ResidueRing, residue_ring
from .types import Pair, Residue, SearchOutcome, sign_product
from .units import unit_group

logger = logging.getLogger(__name__)


# =============================
# Totally positive lifts
# =============================

def totally_positive_lift(ring: ResidueRing, r: Residue, nonzero_required: bool = True) -> FieldElement:
    """
    Smallest totally positive x = r + k*a (k >= 0) congruent to r mod f.

    The canonical coset representative is shifted by the rational integer
    a in f until every real embedding is positive.
    """
    K = ring.field
    x = ring.reduce(r)
    a = ring.modulus.a
    if x == (0, 0) and nonzero_required:
        x = (a, 0)
    while not is_totally_positive_pair(K, x):
        x = (x[0] + a, x[1])
    return FieldElement.from_pair(K, x)


def alternative_lifts(ring: ResidueRing, r: Residue, count: int = 4) -> List[FieldElement]:
    """Further totally positive nonzero lifts of r, shifted by elements of f."""
    K = ring.field
    base = ring.reduce(r)
    shifts = [v for v in ring.modulus.basis()]
    lifts = []
    for j in range(1, count + 1):
        x = base
        for v in shifts:
            x = (x[0] + j * v[0], x[1] + j * v[1])
        a = ring.modulus.a
        while not is_totally_positive_pair(K, x):
            x = (x[0] + a, x[1])
        lifts.append(FieldElement.from_pair(K, x))
    return lifts


# =============================
# Principal generators
# =============================

@lru_cache(maxsize=None)
def principal_generator(J: IntegralIdeal) -> Optional[Pair]:
    """
    Some generator of the integral ideal J, or None if J is not principal.

    Imaginary fields: (2x0 + t x1)^2 + |D| x1^2 = 4N bounds |x1|.
    Real fields: a generator with sqrt(N) <= |x| < eps*sqrt(N) exists, so
    |x1| * sqrt(D) <= (eps + 1) * sqrt(N).
    """
    K = J.field
    N = J.norm
    if K.is_rational:
        return (J.a, 0)
    t, D = K.omega_trace, K.discriminant
    if K.is_imaginary:
        bmax = isqrt(4 * N // -D) + 1
        targets = [4 * N]
    else:
        eps = unit_group(K).fundamental_unit
        E = 2 * eps[0] + t * eps[1] + 1
        bmax = ((isqrt(N) + 1) * (E + 1)) // isqrt(D) + 1
        targets = [4 * N, -4 * N]
    for b in range(0, bmax + 1):
        for x1 in ((b, -b) if b else (0,)):
            for target in targets:
                s2 = target + D * x1 * x1
                if s2 < 0:
                    continue
                s = isqrt(s2)
                if s * s != s2:
                    continue
                for sv in ((s, -s) if s else (0,)):
                    if (sv - t * x1) % 2:
                        continue
                    x = ((sv - t * x1) // 2, x1)
                    if J.contains(x):
                        return x
    return None


@dataclass(frozen=True)
class SearchResult:
    outcome: SearchOutcome
    generator: Optional[FieldElement] = None

    @property
    def found(self) -> bool:
        return self.outcome is SearchOutcome.FOUND


def _unit_residue_cycle(ring: ResidueRing, u: Pair) -> List[Residue]:
    """Powers of the unit u modulo the ring, one full period."""
    one = ring.one()
    cycle = [one]
    y = ring.reduce(u)
    while y != one:
        cycle.append(y)
        y = ring.mul(y, u)
    return cycle


@lru_cache(maxsize=1024)
def _unit_table(K: NumberField, modulus: Optional[IntegralIdeal]) -> tuple:
    """
    (zeta, k, residue of zeta*eps^k, signs of zeta*eps^k) over one period.

    k runs below lcm(order of eps mod the modulus, sign period of eps), so
    every admissible unit class appears exactly once.
    """
    U = unit_group(K)
    ring = residue_ring(modulus) if modulus is not None else None

    def res_of(x):
        return ring.reduce(x) if ring is not None else None

    def res_mul(x, y):
        return ring.mul(x, y) if ring is not None else None

    eps_powers = [(res_of((1, 0)), (1,) * K.r1)]
    if U.fundamental_unit is not None:
        eps = U.fundamental_unit
        sign_period = 1 if U.fundamental_is_totally_positive() else 2
        residue_period = len(_unit_residue_cycle(ring, eps)) if ring is not None else 1
        period = residue_period * sign_period // gcd(residue_period, sign_period)
        eps_res, eps_sg = res_of(eps), pair_signs(K, eps)
        for _ in range(period - 1):
            prev_res, prev_sg = eps_powers[-1]
            eps_powers.append((res_mul(prev_res, eps_res), sign_product(prev_sg, eps_sg)))
    table = []
    for z in U.roots_of_unity():
        z_res, z_sg = res_of(z), pair_signs(K, z)
        for k, (e_res, e_sg) in enumerate(eps_powers):
            table.append((z, k, res_mul(z_res, e_res), sign_product(z_sg, e_sg)))
    return tuple(table)


def ray_generator_search(
    c: FractionalIdeal,
    modulus: Optional[FractionalIdeal] = None,
    require_totally_positive: bool = True,
) -> SearchResult:
    """
    Find x with (x) = c, x - 1 in modulus, x totally positive if required.

    Args:
        c: nonzero fractional ideal J/t.
        modulus: fractional ideal M/s, or None for no congruence condition.
        require_totally_positive: demand positivity at every real place.

    Returns:
        SearchResult with outcome FOUND (and the generator), NOT_PRINCIPAL or
        NO_ADMISSIBLE_GENERATOR.
    """
    K = c.field
    J, t = c.numerator, c.denominator
    xJ = principal_generator(J)
    if xJ is None:
        return SearchResult(SearchOutcome.NOT_PRINCIPAL)
    if modulus is None and not require_totally_positive:
        return SearchResult(SearchOutcome.FOUND, FieldElement.from_pair(K, xJ, t))

    # s*xJ*u = s*t mod t*M
    ring, tM = None, None
    if modulus is not None:
        M, s = modulus.numerator, modulus.denominator
        if K.is_rational:
            tM = IntegralIdeal(K, t * M.a, 0, 1)
        else:
            tM = IntegralIdeal(K, t * M.a, t * M.c, t * M.d)
        ring = residue_ring(tM)
        lhs = ring.reduce((s * xJ[0], s * xJ[1]))
        rhs = ring.reduce((s * t, 0))
    xJ_signs = pair_signs(K, xJ)

    U = unit_group(K)
    for z, k, res, sg in _unit_table(K, tM):
        if require_totally_positive and any(a * b <= 0 for a, b in zip(xJ_signs, sg)):
            continue
        if ring is not None and ring.mul(lhs, res) != rhs:
            continue
        u = z
        for _ in range(k):
            u = pair_mul(K, u, U.fundamental_unit)
        x = pair_mul(K, xJ, u)
        return SearchResult(SearchOutcome.FOUND, FieldElement.from_pair(K, x, t))
    return SearchResult(SearchOutcome.NO_ADMISSIBLE_GENERATOR)


def ray_equivalent(a: IntegralIdeal, b: IntegralIdeal, f: IntegralIdeal) -> bool:
    """
    a ~_f b: some totally positive x in 1 + f*b^{-1} has (x) = a*b^{-1}.
    """
    return ray_generator_search(ideal_quotient(a, b), ideal_quotient(f, b), True).found


def unit_image(K: NumberField, modulus: Optional[IntegralIdeal]) -> frozenset:
    """Image of the global units in (O_K/modulus)^x x {+-1}^r1."""
    return frozenset((res, sg) for _, _, res, sg in _unit_table(K, modulus))
