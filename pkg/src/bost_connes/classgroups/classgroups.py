"""
Class groups and narrow class groups of Q and quadratic fields.

Both are computed the same way: ideals are enumerated by increasing norm and
sorted into classes by an exact equivalence test, the group law on classes is
read off products of representatives, and the invariant-factor form comes
from abelian.structure_from_elements.

- class group: a ~ b iff a*conj(b) is principal (Minkowski bound suffices)
- narrow class group: a ~ b iff a/b has a totally positive generator; the
  enumeration runs until the order h * 2^r1 / |sign image of units| is met

References:
- H. Cohen, A Course in Computational Algebraic Number Theory, sec. 5.4
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt
from typing import Callable, Dict, Iterator, List, Optional

from ..exceptions import BoundExhaustedError, IdealError
from ..nfield.fields import NumberField
from ..nfield.ideals import (
    IntegralIdeal,
    ideal_conjugate,
    ideal_mul,
    ideal_quotient,
    ideals_up_to,
)
from ..nfield.search import principal_generator, ray_generator_search, unit_image
from ..nfield.types import ClassVector
from .abelian import FiniteAbelianGroup, GroupStructure, structure_from_elements

logger = logging.getLogger(__name__)

# Hard cap on the number of ideals scanned by any class enumeration
MAX_ENUMERATED_IDEALS = 10 ** 6


# =============================
# Bounds
# =============================

def minkowski_bound(K: NumberField) -> int:
    """An integer at least the Minkowski bound of K."""
    if K.is_rational:
        return 1
    D = abs(K.discriminant)
    if K.is_imaginary:
        # (2/pi) sqrt|D| < (2/3) sqrt|D|
        return isqrt(4 * D // 9) + 1
    return isqrt(D) // 2 + 1


def bound_schedule(start: int) -> Iterator[int]:
    """start, 2*start, 4*start, ... until the ideal cap is reached."""
    B = max(1, start)
    while True:
        yield B
        B *= 2


def enumerate_until(
    K: NumberField,
    start: int,
    done: Callable[[IntegralIdeal], bool],
    what: str,
) -> int:
    """
    Feed ideals of increasing norm to `done` until it returns True.

    Returns the bound that sufficed.

    Raises:
        BoundExhaustedError: more than MAX_ENUMERATED_IDEALS were needed.
    """
    seen = 0
    for B in bound_schedule(start):
        ideals = ideals_up_to(K, B)
        if len(ideals) > MAX_ENUMERATED_IDEALS:
            raise BoundExhaustedError(
                f"{what} in {K.tag}: {len(ideals)} ideals up to norm {B} exceed the cap "
                f"{MAX_ENUMERATED_IDEALS}; increase bound"
            )
        for a in ideals[seen:]:
            if done(a):
                logger.debug("%s in %s complete at norm bound %d", what, K.tag, B)
                return B
        seen = len(ideals)


# =============================
# Ideal class groups
# =============================

@dataclass
class IdealClassGroup:
    """Classes of ideals with norm-minimal representatives."""
    field: NumberField
    narrow: bool
    reps: List[IntegralIdeal]
    structure: GroupStructure
    _same_class: Callable[[IntegralIdeal, IntegralIdeal], bool] = field(repr=False)

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.structure.group

    @property
    def order(self) -> int:
        return len(self.reps)

    def class_index(self, a: IntegralIdeal) -> int:
        if a.field != self.field:
            raise IdealError(f"{a} does not belong to {self.field.tag}")
        for i, r in enumerate(self.reps):
            if self._same_class(a, r):
                return i
        raise IdealError(f"{a} matched no class representative")

    def dlog(self, a: IntegralIdeal) -> ClassVector:
        return self.structure.to_vector(self.class_index(a))

    def rep(self, vector: ClassVector) -> IntegralIdeal:
        return self.reps[self.structure.from_vector(vector)]

    def __str__(self) -> str:
        kind = "narrow class group" if self.narrow else "class group"
        return f"{kind} of {self.field.tag}: {self.group} (order {self.order})"


def _same_ideal_class(a: IntegralIdeal, b: IntegralIdeal) -> bool:
    return principal_generator(ideal_mul(a, ideal_conjugate(b))) is not None


def _same_narrow_class(a: IntegralIdeal, b: IntegralIdeal) -> bool:
    return ray_generator_search(ideal_quotient(a, b), None, True).found


def _classify(
    K: NumberField,
    same_class: Callable[[IntegralIdeal, IntegralIdeal], bool],
    start: int,
    target: Optional[int],
    what: str,
) -> List[IntegralIdeal]:
    reps: List[IntegralIdeal] = []

    def visit(a: IntegralIdeal) -> bool:
        if not any(same_class(a, r) for r in reps):
            reps.append(a)
        return target is not None and len(reps) >= target

    if target is None:
        for a in ideals_up_to(K, start):
            visit(a)
    else:
        enumerate_until(K, start, visit, what)
    return reps


def _assemble(K: NumberField, narrow: bool, reps: List[IntegralIdeal], same_class) -> IdealClassGroup:
    partial = IdealClassGroup(K, narrow, reps, None, same_class)
    index_of: Dict[tuple, int] = {}

    def mul(i: int, j: int) -> int:
        key = (min(i, j), max(i, j))
        if key not in index_of:
            index_of[key] = partial.class_index(ideal_mul(reps[i], reps[j]))
        return index_of[key]

    partial.structure = structure_from_elements(list(range(len(reps))), 0, mul)
    return partial


@lru_cache(maxsize=None)
def class_group(K: NumberField) -> IdealClassGroup:
    """Cl_K from the ideals below the Minkowski bound."""
    reps = _classify(K, _same_ideal_class, minkowski_bound(K), None, "class group")
    group = _assemble(K, False, reps, _same_ideal_class)
    logger.info("%s", group)
    return group


def narrow_order(K: NumberField) -> int:
    """h * 2^r1 / |image of O_K^x in the sign vectors|."""
    signs = {sg for _, sg in unit_image(K, None)}
    return class_group(K).order * 2 ** K.r1 // len(signs)


@lru_cache(maxsize=None)
def narrow_class_group(K: NumberField) -> IdealClassGroup:
    """Ideals modulo totally positive principal ideals."""
    target = narrow_order(K)
    reps = _classify(K, _same_narrow_class, minkowski_bound(K), target, "narrow class group")
    group = _assemble(K, True, reps, _same_narrow_class)
    logger.info("%s", group)
    return group
