"""
Unit groups of Q and quadratic fields.

Imaginary fields have only roots of unity: i for Q(i) (order 4), omega for
Q(sqrt(-3)) (order 6), and -1 otherwise. Real fields get the fundamental
unit from the continued-fraction expansion of omega (the PQa recurrence):
the first convergent h/k with N(h - k*omega) = +-1 yields
epsilon = conj(h - k*omega) > 1.

References:
- J. Robertson, "Solving the generalized Pell equation", PQa algorithm
- H. Cohen, A Course in Computational Algebraic Number Theory, sec. 5.7
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Iterator, List, Optional, Tuple

from .fields import FieldElement, NumberField, pair_conj, pair_mul, pair_norm, pair_signs
from .types import Pair, SignVector

logger = logging.getLogger(__name__)

# Brute-force minimality check of epsilon only below this coefficient
MINIMALITY_CHECK_LIMIT = 10 ** 5


@dataclass(frozen=True)
class UnitGroup:
    """Roots of unity times (for real fields) a fundamental unit."""
    field: NumberField
    root_of_unity: Pair
    torsion_order: int
    fundamental_unit: Optional[Pair] = None
    fundamental_norm: Optional[int] = None

    def generators(self) -> List[Tuple[Pair, Optional[int]]]:
        """(generator, order) pairs; the fundamental unit has infinite order (None)."""
        gens = [(self.root_of_unity, self.torsion_order)]
        if self.fundamental_unit is not None:
            gens.append((self.fundamental_unit, None))
        return gens

    def roots_of_unity(self) -> Iterator[Pair]:
        z = (1, 0)
        for _ in range(self.torsion_order):
            yield z
            z = pair_mul(self.field, z, self.root_of_unity)

    def sign_vectors(self) -> List[SignVector]:
        return [pair_signs(self.field, g) for g, _ in self.generators()]

    def fundamental_is_totally_positive(self) -> bool:
        if self.fundamental_unit is None:
            return False
        return all(s > 0 for s in pair_signs(self.field, self.fundamental_unit))

    def totally_positive_generator(self) -> Optional[Pair]:
        """Generator of the totally positive units (real fields), eps or eps^2."""
        if self.fundamental_unit is None:
            return None
        if self.fundamental_is_totally_positive():
            return self.fundamental_unit
        return pair_mul(self.field, self.fundamental_unit, self.fundamental_unit)

    def describe(self) -> str:
        parts = [f"roots of unity of order {self.torsion_order}"]
        if self.fundamental_unit is not None:
            eps = FieldElement.from_pair(self.field, self.fundamental_unit)
            parts.append(f"eps = {eps} (norm {self.fundamental_norm:+d})")
        return ", ".join(parts)


def _pqa_convergents(P0: int, Q0: int, D: int) -> Iterator[Tuple[int, int]]:
    """Convergents h/k of (P0 + sqrt(D))/Q0, with Q0 | D - P0^2."""
    root = isqrt(D)
    P, Q = P0, Q0
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    while True:
        assert Q > 0, "PQa left the reduced range"
        a = (P + root) // Q
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        yield h, k
        P = a * Q - P
        Q = (D - P * P) // Q


def _check_minimal(K: NumberField, eps: Pair) -> None:
    """No unit (s + b sqrt(D))/2 with 0 < b below the found one."""
    D = K.discriminant
    b1 = eps[1]
    if b1 > MINIMALITY_CHECK_LIMIT:
        return
    for b in range(1, b1):
        for sign in (4, -4):
            s2 = D * b * b + sign
            if s2 > 0 and isqrt(s2) ** 2 == s2:
                raise AssertionError(f"smaller unit with b = {b} exists in {K.tag}")


@lru_cache(maxsize=None)
def unit_group(K: NumberField) -> UnitGroup:
    """Unit group of O_K with a deterministic set of generators."""
    if K.is_rational:
        return UnitGroup(K, (-1, 0), 2)
    if K.is_imaginary:
        if K.m == -1:
            return UnitGroup(K, (0, 1), 4)
        if K.m == -3:
            return UnitGroup(K, (0, 1), 6)
        return UnitGroup(K, (-1, 0), 2)
    t = K.omega_trace
    P0, Q0 = (1, 2) if t else (0, 1)
    for h, k in _pqa_convergents(P0, Q0, K.m):
        nrm = pair_norm(K, (h, -k))
        if nrm in (1, -1):
            eps = pair_conj(K, (h, -k))
            break
    _check_minimal(K, eps)
    logger.debug("Fundamental unit of %s: %s, norm %d", K.tag, eps, nrm)
    return UnitGroup(K, (-1, 0), 2, eps, nrm)
