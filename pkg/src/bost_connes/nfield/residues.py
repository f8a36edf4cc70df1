"""
Residue rings O_K/f.

Cosets are represented by the canonical pair (x0, x1) with 0 <= x1 < d and
0 <= x0 < a, reduced against the HNF basis (a, 0), (c, d) of f. The ring has
exactly a*d = N(f) elements.
"""

import logging
from functools import cached_property, lru_cache
from typing import Iterator, Tuple

from .fields import NumberField, pair_mul
from .ideals import IntegralIdeal, factor_ideal, ideal_from_generators
from .types import Pair, Residue

logger = logging.getLogger(__name__)


class ResidueRing:
    """O_K modulo the integral ideal f."""

    def __init__(self, modulus: IntegralIdeal):
        self.modulus = modulus
        self.field: NumberField = modulus.field
        self._primes = tuple(P for P, _ in factor_ideal(modulus))

    def __repr__(self) -> str:
        return f"ResidueRing({self.field.tag}, {self.modulus})"

    @property
    def size(self) -> int:
        return self.modulus.norm

    def reduce(self, x: Pair) -> Residue:
        a, c, d = self.modulus.key
        x0, x1 = x
        if self.field.is_rational:
            return (x0 % a, 0)
        q, r1 = divmod(x1, d)
        return ((x0 - q * c) % a, r1)

    def elements(self) -> Iterator[Residue]:
        a, _, d = self.modulus.key
        if self.field.is_rational:
            d = 1
        for x1 in range(d):
            for x0 in range(a):
                yield (x0, x1)

    def one(self) -> Residue:
        return self.reduce((1, 0))

    def zero(self) -> Residue:
        return (0, 0)

    def add(self, x: Residue, y: Residue) -> Residue:
        return self.reduce((x[0] + y[0], x[1] + y[1]))

    def mul(self, x: Residue, y: Residue) -> Residue:
        return self.reduce(pair_mul(self.field, x, y))

    def pow(self, x: Residue, k: int) -> Residue:
        result, base = self.one(), self.reduce(x)
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def is_unit(self, x: Pair) -> bool:
        """x is a unit iff it lies in no prime dividing f."""
        return not any(P.contains(x) for P in self._primes)

    @cached_property
    def units(self) -> Tuple[Residue, ...]:
        return tuple(x for x in self.elements() if self.is_unit(x))

    @property
    def unit_count(self) -> int:
        return len(self.units)

    def inverse(self, x: Residue) -> Residue:
        if not self.is_unit(x):
            raise ValueError(f"{x} is not a unit modulo {self.modulus}")
        return self.pow(x, self.unit_count - 1)

    def gcd_with_modulus(self, x: Pair) -> IntegralIdeal:
        """The ideal (x) + f, independent of the lift of the residue."""
        return ideal_from_generators(self.field, [x] + list(self.modulus.basis()))


@lru_cache(maxsize=256)
def residue_ring(modulus: IntegralIdeal) -> ResidueRing:
    return ResidueRing(modulus)
