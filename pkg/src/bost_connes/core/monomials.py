"""
Crossed-product monomials U*_{s1} a U_{s2} and their regular representation.

A monomial is stored in the normal form (s1, a, s2) with a a function on some
DR level. With g = gcd(s2, t1), s2 = g s', t1 = g t', the product is

    (U*_{s1} a U_{s2}) (U*_{t1} b U_{t2})
        = U*_{t' s1} [rho_{t'}(a) rho_{s't'}(pi_g) rho_{s'}(b)] U_{s' t2}

and the adjoint swaps s1 and s2. Normal forms are not unique
(U*_s U_s = 1), so identities are compared in the regular representation
on l2 of the integral ideals:

    U_s e_b = e_{sb},   a e_b = a([b w]) e_b,   U*_s e_b = e_{b/s} if s | b, else 0

for a fixed ideal w (the trivial point w = (1) unless stated).
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Optional, Sequence, Tuple

from ..nfield.fields import NumberField
from ..nfield.ideals import (
    IntegralIdeal,
    ideal_divides,
    ideal_exact_div,
    ideal_gcd,
    ideal_mul,
    ideals_up_to,
    unit_ideal,
)
from .bcalgebra import LevelFunction
from .checks import Report, check

logger = logging.getLogger(__name__)

Vector = Dict[IntegralIdeal, Fraction]

# Random monomial pairs for the product/adjoint checks
CLOSURE_SAMPLES = 24


# =============================
# Monomials
# =============================

def projection(K: NumberField, g: IntegralIdeal) -> LevelFunction:
    """pi_g = rho_g(1) on DR_g."""
    return LevelFunction.constant(K, unit_ideal(K)).extend(g)


@dataclass(frozen=True)
class CrossedMonomial:
    """U*_{left} coefficient U_{right}."""
    left: IntegralIdeal
    coefficient: LevelFunction
    right: IntegralIdeal

    @property
    def field(self) -> NumberField:
        return self.left.field

    @classmethod
    def function(cls, a: LevelFunction) -> "CrossedMonomial":
        one = unit_ideal(a.field)
        return cls(one, a, one)

    @classmethod
    def one(cls, K: NumberField) -> "CrossedMonomial":
        return cls.function(LevelFunction.constant(K, unit_ideal(K)))

    @classmethod
    def isometry(cls, s: IntegralIdeal) -> "CrossedMonomial":
        """U_s."""
        K = s.field
        return cls(unit_ideal(K), LevelFunction.constant(K, unit_ideal(K)), s)

    @classmethod
    def coisometry(cls, s: IntegralIdeal) -> "CrossedMonomial":
        """U*_s."""
        K = s.field
        return cls(s, LevelFunction.constant(K, unit_ideal(K)), unit_ideal(K))

    def __mul__(self, other: "CrossedMonomial") -> "CrossedMonomial":
        g = ideal_gcd(self.right, other.left)
        s_ = ideal_exact_div(self.right, g)
        t_ = ideal_exact_div(other.left, g)
        coefficient = (
            self.coefficient.extend(t_)
            * projection(self.field, g).extend(ideal_mul(s_, t_))
            * other.coefficient.extend(s_)
        )
        return CrossedMonomial(ideal_mul(t_, self.left), coefficient, ideal_mul(s_, other.right))

    def adjoint(self) -> "CrossedMonomial":
        return CrossedMonomial(self.right, self.coefficient, self.left)

    def scale(self, c) -> "CrossedMonomial":
        return CrossedMonomial(self.left, self.coefficient.scale(c), self.right)

    def __str__(self) -> str:
        return f"U*_{self.left} a[{self.coefficient.level}] U_{self.right}"


def random_monomial(K: NumberField, level: IntegralIdeal, ideals: Sequence[IntegralIdeal],
                    rng: random.Random) -> CrossedMonomial:
    return CrossedMonomial(rng.choice(ideals), LevelFunction.random(K, level, rng), rng.choice(ideals))


# =============================
# Regular representation
# =============================

def basis_vector(b: IntegralIdeal) -> Vector:
    return {b: Fraction(1)}


def _clean(v: Vector) -> Vector:
    return {b: c for b, c in v.items() if c}


def image(x: CrossedMonomial, b: IntegralIdeal, point: Optional[IntegralIdeal] = None) -> Optional[Tuple[IntegralIdeal, Fraction]]:
    """x e_b = kappa e_c as (c, kappa), or None when it vanishes."""
    c = ideal_mul(x.right, b)
    w = point if point is not None else unit_ideal(b.field)
    kappa = x.coefficient.at_ideal(ideal_mul(c, w))
    if not kappa or not ideal_divides(x.left, c):
        return None
    return ideal_exact_div(c, x.left), kappa


def apply(x: CrossedMonomial, v: Vector, point: Optional[IntegralIdeal] = None) -> Vector:
    out: Vector = {}
    for b, coeff in v.items():
        hit = image(x, b, point)
        if hit is not None:
            c, kappa = hit
            out[c] = out.get(c, Fraction(0)) + kappa * coeff
    return _clean(out)


def apply_word(word: Sequence[CrossedMonomial], v: Vector, point: Optional[IntegralIdeal] = None) -> Vector:
    """Apply the product word[0] word[1] ... word[-1] factor by factor."""
    for x in reversed(word):
        v = apply(x, v, point)
    return v


def matrix_entry(x: CrossedMonomial, c: IntegralIdeal, b: IntegralIdeal,
                 point: Optional[IntegralIdeal] = None) -> Fraction:
    """<e_c, x e_b>."""
    return apply(x, basis_vector(b), point).get(c, Fraction(0))


def same_operator(lhs: Sequence[CrossedMonomial], rhs: Sequence[CrossedMonomial],
                  tests: Sequence[IntegralIdeal], point: Optional[IntegralIdeal] = None) -> Optional[IntegralIdeal]:
    """First test vector e_b on which the two words differ, or None."""
    for b in tests:
        if apply_word(lhs, basis_vector(b), point) != apply_word(rhs, basis_vector(b), point):
            return b
    return None


# =============================
# Relations
# =============================

def _relations_for(K: NumberField, s: IntegralIdeal, t: IntegralIdeal, a: LevelFunction):
    """(name, lhs word, rhs word) for the displayed relations of the crossed product."""
    Us, Ut = CrossedMonomial.isometry(s), CrossedMonomial.isometry(t)
    Vs, Vt = CrossedMonomial.coisometry(s), CrossedMonomial.coisometry(t)
    A = CrossedMonomial.function(a)
    g = ideal_gcd(s, t)
    s_, t_ = ideal_exact_div(s, g), ideal_exact_div(t, g)
    one = CrossedMonomial.one(K)
    st = ideal_mul(s, t)
    return [
        ("isometry", [Vs, Us], [one]),
        ("range_projection", [Us, Vs], [CrossedMonomial.function(projection(K, s))]),
        ("isometry_product", [Us, Ut], [CrossedMonomial.isometry(st)]),
        ("coisometry_product", [CrossedMonomial.coisometry(st)], [Vs, Vt]),
        ("covariance", [Us, A], [CrossedMonomial.function(a.extend(s)), Us]),
        ("covariance_adjoint", [A, Vs], [Vs, CrossedMonomial.function(a.extend(s))]),
        ("nica", [Vs, Ut], [CrossedMonomial.isometry(t_), CrossedMonomial.coisometry(s_)]),
    ]


def crossed_monomial_calculus(K: NumberField, f: IntegralIdeal, bound: int, seed: int = 0,
                              samples: int = CLOSURE_SAMPLES) -> Report:
    """
    The seven relations for all s, t of norm <= bound with random coefficient
    functions at level f, then products and adjoints of random monomials
    against composition of operators. Test vectors are e_b with N(b) <= bound.
    """
    rng = random.Random(seed)
    ideals = list(ideals_up_to(K, bound))
    report = Report(f"crossed monomials {K.tag} f={f} bound={bound}")

    failures: Dict[str, object] = {}
    counts: Dict[str, int] = {}
    for s, t in product(ideals, ideals):
        a = LevelFunction.random(K, f, rng)
        for name, lhs, rhs in _relations_for(K, s, t, a):
            counts[name] = counts.get(name, 0) + 1
            if name in failures:
                continue
            # the normal-form product must represent the composed word as well
            for word in (lhs, rhs):
                folded = word[0]
                for x in word[1:]:
                    folded = folded * x
                b = same_operator([folded], word, ideals)
                if b is not None:
                    failures[name] = {"s": s.key, "t": t.key, "vector": b.key, "side": "product"}
                    break
            if name in failures:
                continue
            b = same_operator(lhs, rhs, ideals)
            if b is not None:
                failures[name] = {"s": s.key, "t": t.key, "vector": b.key}
    for name in ("isometry", "range_projection", "isometry_product", "coisometry_product",
                 "covariance", "covariance_adjoint", "nica"):
        report.add(check(f"bcalgebra.monomials.{name}", name not in failures,
                         f"{counts.get(name, 0)} instances", witness=failures.get(name)))

    bad_product = bad_adjoint = None
    for _ in range(samples):
        x = random_monomial(K, f, ideals, rng)
        y = random_monomial(K, f, ideals, rng)
        if bad_product is None:
            b = same_operator([x * y], [x, y], ideals)
            if b is not None:
                bad_product = {"x": str(x), "y": str(y), "vector": b.key}
        if bad_adjoint is None:
            xs = x.adjoint()
            for b, c in product(ideals, ideals):
                if matrix_entry(x, c, b) != matrix_entry(xs, b, c):
                    bad_adjoint = {"x": str(x), "b": b.key, "c": c.key}
                    break
    report.add(check("bcalgebra.monomials.product", bad_product is None,
                     f"normal-form products of {samples} random pairs act as compositions",
                     witness=bad_product))
    report.add(check("bcalgebra.monomials.adjoint", bad_adjoint is None,
                     "<e_c, x e_b> = <x* e_c, e_b>", witness=bad_adjoint))
    return report


__all__ = [
    "CrossedMonomial",
    "Vector",
    "apply",
    "apply_word",
    "basis_vector",
    "crossed_monomial_calculus",
    "image",
    "matrix_entry",
    "projection",
    "random_monomial",
    "same_operator",
]
