"""
Integral and fractional ideals in canonical Hermite normal form.

An integral ideal of O_K = Z[omega] is the lattice Z*a + Z*(c + d*omega)
with d | a, d | c and 0 <= c < a; its norm is a*d. For Q the ideal (a) is
stored as (a, 0, 1). Canonical forms are unique, so ideal equality and
hashing are plain tuple comparisons.

Products, sums and conjugates are computed by re-reducing generating sets to
HNF; exact division uses A/B = A*conj(B)/N(B).
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy import factorint, primerange
from sympy.core.intfunc import igcdex
from sympy.ntheory import sqrt_mod

from ..exceptions import IdealError
from .fields import FieldElement, NumberField, pair_mul
from .types import HNFKey, Norm, Pair, Splitting

logger = logging.getLogger(__name__)


# =============================
# Integral ideals
# =============================

@dataclass(frozen=True)
class IntegralIdeal:
    """Nonzero integral ideal presented by its canonical HNF triple."""
    field: NumberField
    a: int
    c: int
    d: int

    @property
    def key(self) -> HNFKey:
        return (self.a, self.c, self.d)

    @property
    def norm(self) -> Norm:
        return Norm(self.a * self.d)

    @property
    def sort_key(self) -> Tuple[int, HNFKey]:
        return (self.a * self.d, (self.a, self.c, self.d))

    def is_unit_ideal(self) -> bool:
        return self.a == 1

    def basis(self) -> Tuple[Pair, Pair]:
        if self.field.is_rational:
            return ((self.a, 0),)
        return ((self.a, 0), (self.c, self.d))

    def contains(self, x: Pair) -> bool:
        """Lattice membership of the integral element x0 + x1*omega."""
        x0, x1 = x
        if self.field.is_rational:
            return x1 == 0 and x0 % self.a == 0
        if x1 % self.d:
            return False
        return (x0 - (x1 // self.d) * self.c) % self.a == 0

    def contains_element(self, x: FieldElement) -> bool:
        return x.is_integral() and self.contains(x.as_pair())

    def content(self) -> int:
        """Largest rational integer k with self inside k*O_K."""
        if self.field.is_rational:
            return self.a
        return gcd(gcd(self.a, self.c), self.d)

    def __mul__(self, other: "IntegralIdeal") -> "IntegralIdeal":
        return ideal_mul(self, other)

    def __lt__(self, other: "IntegralIdeal") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        if self.field.is_rational or (self.c == 0 and self.d == self.a):
            return f"({self.a})"
        gen = FieldElement.from_pair(self.field, (self.c, self.d))
        return f"({self.a}, {gen})"


def _check_same_field(A: IntegralIdeal, B: IntegralIdeal) -> None:
    if A.field != B.field:
        raise IdealError(f"Ideals live in different fields: {A.field.tag} vs {B.field.tag}")


def hnf_from_vectors(K: NumberField, vectors: Iterable[Pair]) -> IntegralIdeal:
    """
    Canonical HNF of the Z-lattice spanned by the given coordinate vectors.

    Euclid runs on the omega-coordinates with the unimodular step
    [[s, t], [y/g, -p/g]]; everything with zero omega-coordinate is folded
    into the gcd a.

    Raises:
        IdealError: the vectors do not span a full-rank lattice.
    """
    if K.is_rational:
        a = 0
        for x0, _ in vectors:
            a = gcd(a, x0)
        if a == 0:
            raise IdealError("zero ideal")
        return IntegralIdeal(K, abs(a), 0, 1)
    a = 0
    pivot: Optional[Pair] = None
    for x0, x1 in vectors:
        if x1 == 0:
            a = gcd(a, x0)
            continue
        if pivot is None:
            pivot = (x0, x1)
            continue
        p0, p1 = pivot
        s, t, g = (int(v) for v in igcdex(p1, x1))
        a = gcd(a, (x1 // g) * p0 - (p1 // g) * x0)
        pivot = (s * p0 + t * x0, g)
    if pivot is None or a == 0:
        raise IdealError("lattice is not full rank")
    c, d = pivot
    if d < 0:
        c, d = -c, -d
    a = abs(a)
    return IntegralIdeal(K, a, c % a, d)


def ideal_from_generators(K: NumberField, generators: Sequence[Pair]) -> IntegralIdeal:
    """Ideal generated over O_K by integral elements."""
    t, n = K.omega_trace, K.omega_norm
    vectors: List[Pair] = []
    for x0, x1 in generators:
        vectors.append((x0, x1))
        if not K.is_rational:
            vectors.append((-n * x1, x0 + t * x1))
    return hnf_from_vectors(K, vectors)


def principal_ideal(K: NumberField, x: Pair) -> IntegralIdeal:
    return ideal_from_generators(K, [x])


def rational_ideal(K: NumberField, n: int) -> IntegralIdeal:
    """(n) O_K for a nonzero rational integer n."""
    n = abs(n)
    if n == 0:
        raise IdealError("zero ideal")
    if K.is_rational:
        return IntegralIdeal(K, n, 0, 1)
    return IntegralIdeal(K, n, 0, n)


def unit_ideal(K: NumberField) -> IntegralIdeal:
    return IntegralIdeal(K, 1, 0, 1)


def parse_ideal(K: NumberField, text: str) -> IntegralIdeal:
    """Parse an integer n (meaning (n)) or an HNF triple 'a,c,d'."""
    parts = [p.strip() for p in str(text).split(",") if p.strip()]
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise IdealError(f"Cannot parse ideal spec {text!r}")
    if len(values) == 1:
        return rational_ideal(K, values[0])
    if len(values) != 3:
        raise IdealError(f"Ideal spec {text!r} must be 'n' or 'a,c,d'")
    a, c, d = values
    if K.is_rational:
        if c != 0 or d != 1:
            raise IdealError("Ideals of Q are given as a single integer")
        return rational_ideal(K, a)
    if a <= 0 or d <= 0:
        raise IdealError(f"HNF triple {values} must have positive a and d")
    ideal = ideal_from_generators(K, [(a, 0), (c, d)])
    if ideal.key != (a, c, d):
        raise IdealError(f"{values} is not a canonical ideal HNF; nearest ideal is {ideal.key}")
    return ideal


# =============================
# Ideal arithmetic
# =============================

def ideal_mul(A: IntegralIdeal, B: IntegralIdeal) -> IntegralIdeal:
    _check_same_field(A, B)
    K = A.field
    if K.is_rational:
        return IntegralIdeal(K, A.a * B.a, 0, 1)
    return hnf_from_vectors(K, [pair_mul(K, x, y) for x in A.basis() for y in B.basis()])


def ideal_pow(A: IntegralIdeal, k: int) -> IntegralIdeal:
    result = unit_ideal(A.field)
    for _ in range(k):
        result = ideal_mul(result, A)
    return result


def ideal_gcd(A: IntegralIdeal, B: IntegralIdeal) -> IntegralIdeal:
    """Sum lattice A + B."""
    _check_same_field(A, B)
    return hnf_from_vectors(A.field, list(A.basis()) + list(B.basis()))


def ideal_conjugate(A: IntegralIdeal) -> IntegralIdeal:
    K = A.field
    if K.is_rational:
        return A
    return hnf_from_vectors(K, [(A.a, 0), (A.c + A.d * K.omega_trace, -A.d)])


def ideal_divides(B: IntegralIdeal, A: IntegralIdeal) -> bool:
    """True when B | A, i.e. A is contained in B."""
    _check_same_field(A, B)
    return all(B.contains(v) for v in A.basis())


def ideal_exact_div(A: IntegralIdeal, B: IntegralIdeal) -> IntegralIdeal:
    """A/B for B | A."""
    _check_same_field(A, B)
    K = A.field
    if K.is_rational:
        if A.a % B.a:
            raise IdealError(f"{B} does not divide {A}")
        return IntegralIdeal(K, A.a // B.a, 0, 1)
    P = ideal_mul(A, ideal_conjugate(B))
    N = B.norm
    if P.a % N or P.c % N or P.d % N:
        raise IdealError(f"{B} does not divide {A}")
    return IntegralIdeal(K, P.a // N, P.c // N, P.d // N)


def ideal_lcm(A: IntegralIdeal, B: IntegralIdeal) -> IntegralIdeal:
    """Intersection lattice, computed as AB / (A + B)."""
    return ideal_exact_div(ideal_mul(A, B), ideal_gcd(A, B))


def is_coprime(A: IntegralIdeal, B: IntegralIdeal) -> bool:
    return ideal_gcd(A, B).is_unit_ideal()


@dataclass(frozen=True)
class DivGcdLcm:
    divides: bool
    quotient: Optional[IntegralIdeal]
    gcd: IntegralIdeal
    lcm: IntegralIdeal


def ideal_div_gcd_lcm(a: IntegralIdeal, b: IntegralIdeal) -> DivGcdLcm:
    """Divisibility of a by b, the quotient a/b when it exists, gcd and lcm."""
    g = ideal_gcd(a, b)
    divides = g == b
    quotient = ideal_exact_div(a, b) if divides else None
    return DivGcdLcm(divides, quotient, g, ideal_exact_div(ideal_mul(a, b), g))


# =============================
# Fractional ideals
# =============================

@dataclass(frozen=True)
class FractionalIdeal:
    """(1/denominator) * numerator, reduced so no integer cancels."""
    numerator: IntegralIdeal
    denominator: int = 1

    @classmethod
    def make(cls, numerator: IntegralIdeal, denominator: int = 1) -> "FractionalIdeal":
        if denominator <= 0:
            raise IdealError("denominator must be positive")
        g = gcd(numerator.content(), denominator)
        if g > 1:
            K = numerator.field
            if K.is_rational:
                numerator = IntegralIdeal(K, numerator.a // g, 0, 1)
            else:
                numerator = IntegralIdeal(K, numerator.a // g, numerator.c // g, numerator.d // g)
            denominator //= g
        return cls(numerator, denominator)

    @property
    def field(self) -> NumberField:
        return self.numerator.field

    def contains(self, x: FieldElement) -> bool:
        return self.numerator.contains_element(x * self.denominator)

    def is_integral(self) -> bool:
        return self.denominator == 1

    def __str__(self) -> str:
        if self.denominator == 1:
            return str(self.numerator)
        return f"{self.numerator}/{self.denominator}"


def ideal_quotient(A: IntegralIdeal, B: IntegralIdeal) -> FractionalIdeal:
    """The fractional ideal A * B^{-1} = A * conj(B) / N(B) (A / b over Q)."""
    _check_same_field(A, B)
    if A.field.is_rational:
        return FractionalIdeal.make(A, B.a)
    return FractionalIdeal.make(ideal_mul(A, ideal_conjugate(B)), B.norm)


# =============================
# Primes and factorization
# =============================

@dataclass(frozen=True)
class PrimeDatum:
    """A prime ideal P above p with ramification index e and residue degree f."""
    ideal: IntegralIdeal
    p: int
    e: int
    f: int
    splitting: Splitting


def _omega_roots_mod(K: NumberField, p: int) -> List[int]:
    """Roots of x^2 - t x + n modulo p."""
    t, n = K.omega_trace, K.omega_norm
    if p == 2:
        return [r for r in range(2) if (r * r - t * r + n) % 2 == 0]
    disc = (t * t - 4 * n) % p
    if disc == 0:
        return [(t * pow(2, -1, p)) % p]
    roots = sqrt_mod(disc, p, all_roots=True) or []
    inv2 = pow(2, -1, p)
    return sorted({((t + s) * inv2) % p for s in roots})


@lru_cache(maxsize=None)
def primes_above(K: NumberField, p: int) -> Tuple[PrimeDatum, ...]:
    """Prime ideals above the rational prime p, sorted by (norm, HNF key)."""
    if K.is_rational:
        return (PrimeDatum(IntegralIdeal(K, p, 0, 1), p, 1, 1, Splitting.SPLIT),)
    roots = _omega_roots_mod(K, p)
    if not roots:
        return (PrimeDatum(IntegralIdeal(K, p, 0, p), p, 1, 2, Splitting.INERT),)
    # P = (p, omega - r) has HNF (p, -r mod p, 1)
    ideals = sorted(IntegralIdeal(K, p, (-r) % p, 1) for r in roots)
    if len(ideals) == 1:
        return (PrimeDatum(ideals[0], p, 2, 1, Splitting.RAMIFIED),)
    return tuple(PrimeDatum(P, p, 1, 1, Splitting.SPLIT) for P in ideals)


def prime_datum(P: IntegralIdeal) -> PrimeDatum:
    """Look up the splitting data of a prime ideal."""
    p = P.a if P.field.is_rational else int(next(iter(factorint(P.norm))))
    for datum in primes_above(P.field, p):
        if datum.ideal == P:
            return datum
    raise IdealError(f"{P} is not a prime ideal")


Factorization = Tuple[Tuple[IntegralIdeal, int], ...]


@lru_cache(maxsize=4096)
def factor_ideal(A: IntegralIdeal) -> Factorization:
    """Prime factorization as a sorted tuple of (prime ideal, exponent)."""
    K = A.field
    result = []
    remaining = A
    for p in sorted(factorint(A.norm)):
        for datum in primes_above(K, p):
            P, k = datum.ideal, 0
            while ideal_divides(P, remaining):
                remaining = ideal_exact_div(remaining, P)
                k += 1
            if k:
                result.append((P, k))
    if not remaining.is_unit_ideal():
        raise IdealError(f"factorization of {A} left cofactor {remaining}")
    return tuple(sorted(result, key=lambda pk: pk[0].sort_key))


def valuation(P: IntegralIdeal, A: IntegralIdeal) -> int:
    for Q, k in factor_ideal(A):
        if Q == P:
            return k
    return 0


def ideal_from_factorization(K: NumberField, factors: Iterable[Tuple[IntegralIdeal, int]]) -> IntegralIdeal:
    result = unit_ideal(K)
    for P, k in factors:
        for _ in range(k):
            result = ideal_mul(result, P)
    return result


@lru_cache(maxsize=1024)
def divisors(f: IntegralIdeal) -> Tuple[IntegralIdeal, ...]:
    """All integral divisors of f sorted by (norm, HNF key)."""
    factors = factor_ideal(f)
    found = []
    for exps in product(*(range(k + 1) for _, k in factors)):
        found.append(ideal_from_factorization(
            f.field, ((P, e) for (P, _), e in zip(factors, exps))))
    return tuple(sorted(found, key=lambda I: I.sort_key))


# =============================
# Bounded enumeration
# =============================

def prime_ideals_up_to(K: NumberField, B: int) -> List[IntegralIdeal]:
    primes = []
    for p in primerange(2, B + 1):
        for datum in primes_above(K, p):
            if datum.ideal.norm <= B:
                primes.append(datum.ideal)
    return sorted(primes, key=lambda P: P.sort_key)


@lru_cache(maxsize=64)
def ideals_up_to(K: NumberField, B: int) -> Tuple[IntegralIdeal, ...]:
    """Every integral ideal of norm <= B, sorted by (norm, HNF key)."""
    if B < 1:
        raise IdealError(f"bound must be positive, got {B}")
    if K.is_rational:
        return tuple(IntegralIdeal(K, n, 0, 1) for n in range(1, B + 1))
    primes = prime_ideals_up_to(K, B)
    found: List[IntegralIdeal] = []

    def extend(ideal: IntegralIdeal, start: int) -> None:
        found.append(ideal)
        for i in range(start, len(primes)):
            P = primes[i]
            if ideal.norm * P.norm > B:
                break
            extend(ideal_mul(ideal, P), i)

    extend(unit_ideal(K), 0)
    logger.debug("ideals_up_to(%s, %d): %d ideals", K.tag, B, len(found))
    return tuple(sorted(found, key=lambda I: I.sort_key))


def hnf_scan(K: NumberField, B: int) -> Tuple[IntegralIdeal, ...]:
    """
    Exhaustive HNF enumeration, independent of prime splitting.

    (a, c, d) is an ideal iff d | a, d | c and, with a = d*a', c = d*c',
    a' divides N(c' + omega) = c'^2 + t c' + n.
    """
    if K.is_rational:
        return tuple(IntegralIdeal(K, n, 0, 1) for n in range(1, B + 1))
    t, n = K.omega_trace, K.omega_norm
    found = []
    for a in range(1, B + 1):
        for d in range(1, a + 1):
            if a % d or a * d > B:
                continue
            a1 = a // d
            for c1 in range(a1):
                if (c1 * c1 + t * c1 + n) % a1 == 0:
                    found.append(IntegralIdeal(K, a, d * c1, d))
    return tuple(sorted(found, key=lambda I: I.sort_key))


def ideal_count_by_splitting(K: NumberField, B: int) -> int:
    """Sum of the Dirichlet coefficients of zeta_K up to B, from splitting types."""
    total = 0
    for m in range(1, B + 1):
        count = 1
        for p, k in factorint(m).items():
            kind = primes_above(K, p)[0].splitting
            if K.is_rational or kind is Splitting.RAMIFIED:
                local = 1
            elif kind is Splitting.SPLIT:
                local = k + 1
            else:
                local = 1 if k % 2 == 0 else 0
            count *= local
            if not count:
                break
        total += count
    return total
