"""
Finite abelian groups in invariant-factor form.

Groups given as a black box (a finite list of hashable elements, an identity
and a multiplication) are put into invariant-factor form in two steps:

1. Greedy generation: scan the elements in their given (deterministic) order,
   adjoin any element outside the current subgroup, and record the relation
   g_i^{e_i} = (word in earlier generators).
2. Smith normal form of the triangular relation matrix R = S^{-1} D T^{-1}.
   Coordinates transform as y = x*T mod d_i and the new generators are the
   rows of T^{-1}; trivial factors d_i = 1 are dropped.

References:
- H. Cohen, A Course in Computational Algebraic Number Theory, sec. 2.4.3
- sympy.matrices.normalforms.smith_normal_decomp
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from math import gcd, prod
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

from ..nfield.types import ClassVector

logger = logging.getLogger(__name__)

# Cayley tables are materialized only up to this order
TABLE_LIMIT = 4096


# =============================
# Invariant-factor groups
# =============================

@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Z/d_1 x ... x Z/d_k with d_1 | d_2 | ... | d_k, all d_i > 1."""
    invariants: Tuple[int, ...]

    def __post_init__(self):
        if any(d < 2 for d in self.invariants):
            raise ValueError(f"invariant factors must exceed 1, got {self.invariants}")
        for a, b in zip(self.invariants, self.invariants[1:]):
            if b % a:
                raise ValueError(f"invariant factors {self.invariants} are not a divisor chain")

    @classmethod
    def trivial(cls) -> "FiniteAbelianGroup":
        return cls(())

    @property
    def order(self) -> int:
        return prod(self.invariants)

    @property
    def rank(self) -> int:
        return len(self.invariants)

    @property
    def exponent(self) -> int:
        return self.invariants[-1] if self.invariants else 1

    def is_trivial(self) -> bool:
        return not self.invariants

    def is_cyclic(self) -> bool:
        return len(self.invariants) <= 1

    def zero(self) -> ClassVector:
        return (0,) * self.rank

    def reduce(self, x: Sequence[int]) -> ClassVector:
        return tuple(int(v) % d for v, d in zip(x, self.invariants))

    def add(self, x: ClassVector, y: ClassVector) -> ClassVector:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.invariants))

    def neg(self, x: ClassVector) -> ClassVector:
        return tuple((-a) % d for a, d in zip(x, self.invariants))

    def sub(self, x: ClassVector, y: ClassVector) -> ClassVector:
        return self.add(x, self.neg(y))

    def scale(self, x: ClassVector, k: int) -> ClassVector:
        return tuple((k * a) % d for a, d in zip(x, self.invariants))

    def element_order(self, x: ClassVector) -> int:
        order = 1
        for a, d in zip(x, self.invariants):
            o = d // gcd(a, d)
            order = order * o // gcd(order, o)
        return order

    def elements(self) -> List[ClassVector]:
        """All elements in lexicographic order of exponent vectors."""
        return [tuple(v) for v in product(*(range(d) for d in self.invariants))]

    def index(self, x: ClassVector) -> int:
        """Position of x in elements() (mixed radix)."""
        i = 0
        for a, d in zip(x, self.invariants):
            i = i * d + a
        return i

    def table(self) -> Optional[np.ndarray]:
        """Cayley table of element indices, or None above TABLE_LIMIT."""
        n = self.order
        if n > TABLE_LIMIT:
            return None
        elems = self.elements()
        out = np.zeros((n, n), dtype=np.int64)
        for i, x in enumerate(elems):
            for j, y in enumerate(elems):
                out[i, j] = self.index(self.add(x, y))
        return out

    def subgroup(self, generators: Sequence[ClassVector]) -> List[ClassVector]:
        """Elements of the subgroup generated by the given vectors, sorted."""
        found = {self.zero()}
        frontier = [self.zero()]
        while frontier:
            x = frontier.pop()
            for g in generators:
                y = self.add(x, g)
                if y not in found:
                    found.add(y)
                    frontier.append(y)
        return sorted(found)

    def __str__(self) -> str:
        if self.is_trivial():
            return "trivial"
        return " x ".join(f"Z/{d}" for d in self.invariants)


# =============================
# Black-box structure
# =============================

@dataclass
class GroupStructure:
    """Dictionary between the elements of a concrete group and exponent vectors."""
    group: FiniteAbelianGroup
    generators: List[Hashable]
    identity: Hashable
    _to_vector: Dict[Hashable, ClassVector] = field(repr=False)
    _from_vector: Dict[ClassVector, Hashable] = field(repr=False)

    def to_vector(self, element: Hashable) -> ClassVector:
        try:
            return self._to_vector[element]
        except KeyError:
            raise ValueError(f"{element!r} is not an element of the group") from None

    def from_vector(self, vector: Sequence[int]) -> Hashable:
        return self._from_vector[self.group.reduce(vector)]

    def elements(self) -> List[Hashable]:
        return [self._from_vector[v] for v in self.group.elements()]

    def __contains__(self, element: Hashable) -> bool:
        return element in self._to_vector

    def __len__(self) -> int:
        return self.group.order


def _power(mul: Callable, identity: Hashable, g: Hashable, k: int) -> Hashable:
    result, base = identity, g
    while k:
        if k & 1:
            result = mul(result, base)
        base = mul(base, base)
        k >>= 1
    return result


def structure_from_elements(
    elements: Sequence[Hashable],
    identity: Hashable,
    mul: Callable[[Hashable, Hashable], Hashable],
) -> GroupStructure:
    """
    Invariant-factor structure of a finite abelian group given as a black box.

    Args:
        elements: every element exactly once, in a deterministic order.
        identity: the neutral element.
        mul: the group law.

    Returns:
        GroupStructure with canonical generators and coordinate dictionaries.
    """
    n = len(elements)
    gens: List[Hashable] = []
    orders: List[int] = []
    # normal-form exponents over the greedy generators
    coords: Dict[Hashable, Tuple[int, ...]] = {identity: ()}
    relations: List[List[int]] = []

    for g in elements:
        if len(coords) == n:
            break
        if g in coords:
            continue
        k = len(gens)
        # smallest e with g^e in the current subgroup
        e, y = 1, g
        while y not in coords:
            y = mul(y, g)
            e += 1
        row = list(coords[y]) + [0] * (k - len(coords[y]))
        relations.append([-v for v in row] + [e])
        extended: Dict[Hashable, Tuple[int, ...]] = {}
        power = identity
        for j in range(e):
            for h, v in coords.items():
                extended[mul(power, h)] = tuple(v) + (0,) * (k - len(v)) + (j,)
            power = mul(power, g)
        coords = extended
        gens.append(g)
        orders.append(e)

    if len(coords) != n:
        raise ValueError(f"elements do not form a group: generated {len(coords)} of {n}")

    k = len(gens)
    if k == 0:
        group = FiniteAbelianGroup.trivial()
        return GroupStructure(group, [], identity, {identity: ()}, {(): identity})

    R = Matrix([row + [0] * (k - len(row)) for row in relations])
    D, _, T = smith_normal_decomp(R, domain=ZZ)
    T_inv = T.inv()
    diag = [abs(int(D[i, i])) for i in range(k)]
    keep = [i for i, d in enumerate(diag) if d != 1]
    invariants = tuple(diag[i] for i in keep)
    group = FiniteAbelianGroup(invariants)

    new_gens = []
    for i in keep:
        x = identity
        for j in range(k):
            x = mul(x, _power(mul, identity, gens[j], int(T_inv[i, j]) % n))
        new_gens.append(x)

    to_vector: Dict[Hashable, ClassVector] = {}
    for h, v in coords.items():
        v = tuple(v) + (0,) * (k - len(v))
        y = [sum(v[j] * int(T[j, i]) for j in range(k)) for i in keep]
        to_vector[h] = group.reduce(y)
    from_vector = {v: h for h, v in to_vector.items()}
    if len(from_vector) != n:
        raise ValueError("coordinate map is not bijective; the group law is not abelian")
    logger.debug("structure_from_elements: order %d, invariants %s", n, invariants)
    return GroupStructure(group, new_gens, identity, to_vector, from_vector)
