"""
The truncated bimodule Z = Q[I_L] (x)_{Q[I_Q]} E_Q.

Elements U_T (x) x pair an ideal T of L with a crossed monomial x of the
rational system. Balancing U_{T n^L} (x) x = U_T (x) U_n x gives the normal
form U_{t} (x) U_c x with t primitive (no rational integer > 1 divides it)
and c the content of T.

The inner product is <U_T (x) x, U_{T'} (x) y> = x* E(U*_T U_{T'}) y. With
g = gcd(T, T'), U*_T U_{T'} = U_{T'/g} U*_{T/g}, and the conditional
expectation E keeps it exactly when T'/g = aO_L and T/g = bO_L, where it
becomes U*_b U_a in E_Q.

E_L acts on the left through e U_s (U_t (x) f) = U_{st} (x) phi(sigma_{st}(e)) f,
with sigma_{st}(e)(x) = e([st] x) and phi the pullback along
Ver: DR_{Q,f} -> DR_{L,f^L}.
"""

import logging
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..nfield.ideals import (
    IntegralIdeal,
    ideal_exact_div,
    ideal_gcd,
    ideal_mul,
    ideals_up_to,
    rational_ideal,
    unit_ideal,
)
from .bcalgebra import LevelFunction
from .checks import Report, check
from .drmonoid import MonoidMap
from .functor import ExtensionContext, contraction, dr_ver_map, upper_conductor
from .monomials import CrossedMonomial, apply, basis_vector, matrix_entry, same_operator

logger = logging.getLogger(__name__)

# Sampled elements per axiom
AXIOM_SAMPLES = 16

# Base-ideal norms for the E_Q monomials used in samples
MONOMIAL_NORM = 3


@dataclass(frozen=True)
class BimoduleElement:
    """U_ideal (x) monomial, kept in whatever form it was produced."""
    ideal: IntegralIdeal
    monomial: CrossedMonomial

    def __str__(self) -> str:
        return f"U_{self.ideal} (x) {self.monomial}"


@dataclass
class TruncatedBimodule:
    """Primitive ideals of norm <= bound crossed with rational monomials."""
    ctx: ExtensionContext
    bound: int
    level: IntegralIdeal
    primitive: List[IntegralIdeal]
    ver: MonoidMap
    tests: List[IntegralIdeal] = field(default_factory=list)

    # ----- normal form -----

    def split(self, T: IntegralIdeal) -> Tuple[IntegralIdeal, IntegralIdeal]:
        """T = t (c)O_L with t primitive; returns (t, (c) over Q)."""
        c = T.content()
        return ideal_exact_div(T, rational_ideal(self.ctx.ext, c)), rational_ideal(self.ctx.base, c)

    def normalize(self, xi: BimoduleElement) -> BimoduleElement:
        t, c = self.split(xi.ideal)
        return BimoduleElement(t, CrossedMonomial.isometry(c) * xi.monomial)

    def element(self, T: IntegralIdeal, x: Optional[CrossedMonomial] = None) -> BimoduleElement:
        return BimoduleElement(T, x if x is not None else CrossedMonomial.one(self.ctx.base))

    def same(self, xi: BimoduleElement, eta: BimoduleElement) -> bool:
        a, b = self.normalize(xi), self.normalize(eta)
        if self.is_zero(a) and self.is_zero(b):
            return True
        return a.ideal == b.ideal and same_operator([a.monomial], [b.monomial], self.tests) is None

    def is_zero(self, xi: BimoduleElement) -> bool:
        return all(not apply(xi.monomial, basis_vector(b)) for b in self.tests)

    # ----- right module structure -----

    def right_act(self, xi: BimoduleElement, a: CrossedMonomial) -> BimoduleElement:
        return BimoduleElement(xi.ideal, xi.monomial * a)

    def expectation(self, T: IntegralIdeal, T2: IntegralIdeal) -> Optional[CrossedMonomial]:
        """E(U*_T U_{T2}) in E_Q, or None when it is killed."""
        g = ideal_gcd(T, T2)
        a = contraction(self.ctx, ideal_exact_div(T2, g))
        b = contraction(self.ctx, ideal_exact_div(T, g))
        if a is None or b is None:
            return None
        return CrossedMonomial(b, LevelFunction.constant(self.ctx.base, unit_ideal(self.ctx.base)), a)

    def inner(self, xi: BimoduleElement, eta: BimoduleElement) -> Optional[CrossedMonomial]:
        """<xi, eta> = x* E(U*_T U_{T'}) y; None stands for 0."""
        V = self.expectation(xi.ideal, eta.ideal)
        if V is None:
            return None
        return xi.monomial.adjoint() * V * eta.monomial

    # ----- left action of E_L -----

    def ver_pullback(self, e: LevelFunction) -> LevelFunction:
        """phi(e) = e o Ver on DR_{Q,f} for e on DR_{L,f^L}."""
        e = e.lift(self.ver.target)
        n = len(self.ver.mapping)
        return LevelFunction(self.ctx.base, self.level, tuple(e(self.ver(x)) for x in range(n)))

    def left_act(self, e: LevelFunction, s: IntegralIdeal, xi: BimoduleElement) -> BimoduleElement:
        """(e U_s) . (U_t (x) f)."""
        st = ideal_mul(s, xi.ideal)
        twisted = e.lift(self.ver.target).translate(st)
        coefficient = CrossedMonomial.function(self.ver_pullback(twisted))
        return BimoduleElement(st, coefficient * xi.monomial)

    def inner_table(self, elements: Sequence[BimoduleElement]) -> Dict[str, str]:
        """Sparse table of nonzero inner products, keyed 'i,j'."""
        table = {}
        for i, xi in enumerate(elements):
            for j, eta in enumerate(elements):
                v = self.inner(xi, eta)
                if v is not None:
                    table[f"{i},{j}"] = str(v)
        return table

    def to_dict(self) -> Dict[str, object]:
        basis = [self.element(t) for t in self.primitive]
        return {
            "extension": str(self.ctx),
            "bound": self.bound,
            "level": list(self.level.key),
            "primitive": [list(t.key) for t in self.primitive],
            "inner": self.inner_table(basis),
        }


def _equal_or_zero(Z: TruncatedBimodule, x: Optional[CrossedMonomial], y: Optional[CrossedMonomial]) -> bool:
    if x is None or y is None:
        other = y if x is None else x
        return other is None or all(not apply(other, basis_vector(b)) for b in Z.tests)
    return same_operator([x], [y], Z.tests) is None


def bimodule_build(ctx: ExtensionContext, bound: int, level: Optional[IntegralIdeal] = None,
                   samples: int = AXIOM_SAMPLES, seed: int = 0) -> Tuple[TruncatedBimodule, Report]:
    """The truncation at norm <= bound with its Hilbert-module axiom suite."""
    K, L = ctx.base, ctx.ext
    level = level or rational_ideal(K, 2)
    ideals_L = list(ideals_up_to(L, bound))
    primitive = [t for t in ideals_L if t.content() == 1]
    ver, ver_report = dr_ver_map(ctx, level)
    Z = TruncatedBimodule(ctx, bound, level, primitive, ver, list(ideals_up_to(K, bound)))
    report = Report(f"bimodule {ctx} bound={bound}")
    report.extend(ver_report)
    rng = random.Random(seed)
    small_K = list(ideals_up_to(K, MONOMIAL_NORM))

    def monomial() -> CrossedMonomial:
        return CrossedMonomial(rng.choice(small_K), LevelFunction.random(K, level, rng), rng.choice(small_K))

    def sample() -> BimoduleElement:
        return BimoduleElement(rng.choice(ideals_L), monomial())

    bad = None
    for _ in range(samples):
        t, n, x = rng.choice(primitive), rng.choice(small_K), monomial()
        lhs = BimoduleElement(ideal_mul(t, rational_ideal(L, n.norm)), x)
        rhs = BimoduleElement(t, CrossedMonomial.isometry(n) * x)
        eta = sample()
        if not Z.same(lhs, rhs) or not _equal_or_zero(Z, Z.inner(lhs, eta), Z.inner(rhs, eta)):
            bad = {"t": t.key, "n": n.norm, "x": str(x)}
            break
    report.add(check("functor.bimodule.balancing", bad is None,
                     "(t n^L) (x) x = t (x) n x, also inside the inner product", witness=bad))

    sym_bad = pos_bad = lin_bad = adj_bad = None
    for _ in range(samples):
        xi, eta, a = sample(), sample(), monomial()
        ab, ba = Z.inner(xi, eta), Z.inner(eta, xi)
        if sym_bad is None and not _equal_or_zero(Z, ab, None if ba is None else ba.adjoint()):
            sym_bad = {"xi": str(xi), "eta": str(eta)}
        diagonal = Z.inner(xi, xi)
        if pos_bad is None and (diagonal is None or any(matrix_entry(diagonal, b, b) < 0 for b in Z.tests)):
            pos_bad = str(xi)
        right = Z.inner(xi, Z.right_act(eta, a))
        if lin_bad is None and not _equal_or_zero(Z, right, None if ab is None else ab * a):
            lin_bad = {"xi": str(xi), "eta": str(eta), "a": str(a)}
        left = Z.inner(Z.right_act(xi, a), eta)
        if adj_bad is None and not _equal_or_zero(Z, left, None if ab is None else a.adjoint() * ab):
            adj_bad = {"xi": str(xi), "eta": str(eta), "a": str(a)}
    report.add(check("functor.bimodule.symmetric", sym_bad is None, "<xi, eta>* = <eta, xi>", witness=sym_bad))
    report.add(check("functor.bimodule.positive", pos_bad is None,
                     "<xi, xi> is nonzero with nonnegative diagonal", witness=pos_bad))
    bad = next((str(t) for t in primitive if not _equal_or_zero(Z, Z.inner(Z.element(t), Z.element(t)),
                                                                   CrossedMonomial.one(K))), None)
    report.add(check("functor.bimodule.unit_norm", bad is None, "<U_t (x) 1, U_t (x) 1> = 1", witness=bad))
    report.add(check("functor.bimodule.right_linear", lin_bad is None, "<xi, eta a> = <xi, eta> a", witness=lin_bad))
    report.add(check("functor.bimodule.adjoint", adj_bad is None, "<xi a, eta> = a* <xi, eta>", witness=adj_bad))

    F = upper_conductor(ctx, level)
    bad = None
    for _ in range(samples):
        xi = sample()
        s1, s2 = rng.choice(ideals_L[:6]), rng.choice(ideals_L[:6])
        e1, e2 = LevelFunction.random(L, F, rng), LevelFunction.random(L, F, rng)
        one = LevelFunction.constant(L, F)
        unit = unit_ideal(L)
        pairs = [
            (Z.left_act(one, s1, Z.left_act(one, s2, xi)), Z.left_act(one, ideal_mul(s1, s2), xi)),
            (Z.left_act(e1, unit, Z.left_act(e2, unit, xi)), Z.left_act(e1 * e2, unit, xi)),
            (Z.left_act(e1, unit, Z.left_act(one, s1, xi)), Z.left_act(e1, s1, xi)),
        ]
        for k, (lhs, rhs) in enumerate(pairs):
            if not Z.same(lhs, rhs):
                bad = {"law": k, "xi": str(xi), "s1": s1.key, "s2": s2.key}
                break
        if bad:
            break
    report.add(check("functor.bimodule.left_action", bad is None,
                     "U_s U_t, e e' and e U_s act associatively", witness=bad))
    logger.info("bimodule %s bound=%d: %d primitive ideals", ctx, bound, len(primitive))
    return Z, report


__all__ = [
    "AXIOM_SAMPLES",
    "BimoduleElement",
    "TruncatedBimodule",
    "bimodule_build",
]
