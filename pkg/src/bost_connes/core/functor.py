"""
Functoriality for a quadratic field L over Q at finite level.

Extension a -> aO_L and norm b -> N_{L/Q}(b) act on representatives and
descend to maps between Deligne-Ribet monoids:

    Ver:  DR_{Q,f}   -> DR_{L,f^L},   [a] -> [aO_L]
    Res:  DR_{L,f^L} -> DR_{Q,f},     [b] -> [N(b)]

omega sends a divisor D of f^L to the largest d | f with d^L | D. Through
omega the norm also induces, for every D | f^L, a homomorphism
C_{L,D} -> C_{Q,omega(D)}, and these assemble into a map of finite sets
DR_{L,f^L} -> DR_{Q,f} that commutes with the projections of both towers.
"""

import logging
from dataclasses import dataclass
from math import isqrt
from typing import Dict, List, Optional, Tuple

import pandas as pd
from sympy import factorint, primerange

from ..classgroups.rayclass import strict_ray_class_group
from ..exceptions import IdealError
from ..nfield.fields import NumberField, make_field
from ..nfield.ideals import (
    IntegralIdeal,
    divisors,
    factor_ideal,
    ideal_divides,
    ideal_exact_div,
    ideal_from_factorization,
    ideal_mul,
    ideals_up_to,
    is_coprime,
    prime_datum,
    primes_above,
    rational_ideal,
    valuation,
)
from .checks import Report, Severity, check, info
from .drmonoid import MapKind, MonoidMap, _all_pairs, dr_level, projection_map, y_level
from .tower import get_tower

logger = logging.getLogger(__name__)

# Representatives per class used for the well-definedness checks
REPRESENTATIVE_NORM_FACTOR = 4


# =============================
# Extension data
# =============================

@dataclass(frozen=True)
class ExtensionContext:
    """L = Q(sqrt(m)) over the rational base field."""
    base: NumberField
    ext: NumberField

    @property
    def degree(self) -> int:
        return self.ext.degree // self.base.degree

    def splitting_table(self, bound: int) -> pd.DataFrame:
        """Per rational prime p <= bound: type, e, f and the primes above."""
        rows = []
        for p in primerange(2, bound + 1):
            data = primes_above(self.ext, p)
            rows.append({
                "p": p,
                "splitting": data[0].splitting.value,
                "e": data[0].e,
                "f": data[0].f,
                "primes": ", ".join(str(d.ideal) for d in data),
            })
        return pd.DataFrame(rows, columns=["p", "splitting", "e", "f", "primes"])

    def __str__(self) -> str:
        return f"{self.ext.tag}/{self.base.tag}"


def make_extension(m) -> ExtensionContext:
    ext = make_field(m)
    if ext.is_rational:
        raise IdealError("the extension must be a quadratic field")
    return ExtensionContext(make_field(None), ext)


def extend_ideal(ctx: ExtensionContext, a: IntegralIdeal) -> IntegralIdeal:
    """aO_L as the product of P^{e v_p(a)} over the primes P above each p | a."""
    if a.field != ctx.base:
        raise IdealError(f"{a} is not an ideal of {ctx.base.tag}")
    factors = []
    for p, k in factorint(a.norm).items():
        for datum in primes_above(ctx.ext, p):
            factors.append((datum.ideal, datum.e * k))
    return ideal_from_factorization(ctx.ext, factors)


def norm_ideal(ctx: ExtensionContext, b: IntegralIdeal) -> IntegralIdeal:
    """prod p^{f(P|p) v_P(b)}."""
    if b.field != ctx.ext:
        raise IdealError(f"{b} is not an ideal of {ctx.ext.tag}")
    n = 1
    for P, k in factor_ideal(b):
        datum = prime_datum(P)
        n *= datum.p ** (datum.f * k)
    return rational_ideal(ctx.base, n)


def extend_and_norm(ctx: ExtensionContext, ideal: IntegralIdeal) -> IntegralIdeal:
    """Extension for base ideals, norm for ideals of L."""
    if ideal.field == ctx.base:
        return extend_ideal(ctx, ideal)
    return norm_ideal(ctx, ideal)


def contraction(ctx: ExtensionContext, b: IntegralIdeal) -> Optional[IntegralIdeal]:
    """The base ideal a with aO_L = b, if b is extended."""
    n = isqrt(b.norm)
    if n * n != b.norm or rational_ideal(ctx.ext, n) != b:
        return None
    return rational_ideal(ctx.base, n)


def upper_conductor(ctx: ExtensionContext, f: IntegralIdeal) -> IntegralIdeal:
    return extend_ideal(ctx, f)


def extension_laws(ctx: ExtensionContext, bound: int) -> Report:
    """Extension against (n)O_L, N(aO_L) = a^2, and N(b) against the lattice index."""
    report = Report(f"extension and norm {ctx} bound={bound}")
    bad = None
    for a in ideals_up_to(ctx.base, bound):
        ext = extend_ideal(ctx, a)
        if ext != rational_ideal(ctx.ext, a.norm) or norm_ideal(ctx, ext).norm != a.norm ** ctx.degree:
            bad = a.norm
            break
    report.add(check("functor.extension", bad is None,
                     "aO_L from prime splitting is (n)O_L and N(aO_L) = a^2", witness=bad))
    bad = next((b.key for b in ideals_up_to(ctx.ext, bound) if norm_ideal(ctx, b).norm != b.norm), None)
    report.add(check("functor.norm", bad is None, "prod p^{f v_P(b)} equals the index of b", witness=bad))
    return report


# =============================
# Maps between DR monoids
# =============================

def _grouped(M, ideals) -> Dict[int, List[IntegralIdeal]]:
    groups: Dict[int, List[IntegralIdeal]] = {}
    for b in ideals:
        groups.setdefault(M.locate(b), []).append(b)
    return groups


def dr_ver_map(ctx: ExtensionContext, f: IntegralIdeal) -> Tuple[MonoidMap, Report]:
    """[a] -> [aO_L] from DR_{Q,f} to DR_{L,f^L}."""
    F = upper_conductor(ctx, f)
    MK, ML = dr_level(ctx.base, f), dr_level(ctx.ext, F)
    report = Report(f"Ver {ctx} f={f}")
    mapping = {x.index: ML.locate(extend_ideal(ctx, x.rep)) for x in MK.elements}
    m = MonoidMap(MapKind.VERLAGERUNG, f, F, mapping)

    groups = _grouped(MK, ideals_up_to(ctx.base, REPRESENTATIVE_NORM_FACTOR * f.norm + 4))
    bad = None
    for k, reps in groups.items():
        images = {ML.locate(extend_ideal(ctx, a)) for a in reps}
        if images != {mapping[k]}:
            bad = {"class": k, "reps": [a.norm for a in reps], "images": sorted(images)}
            break
    report.add(check("functor.ver.well_defined", bad is None,
                     f"{sum(len(v) for v in groups.values())} representatives agree", witness=bad))
    report.add(check("functor.ver.injective", m.is_injective(),
                     f"{MK.size} classes onto {len(m.image())}",
                     witness=None if m.is_injective() else m.fibers(),
                     severity=Severity.DEVIATION))
    bad = m.multiplicativity_witness(MK.mul, ML.mul, _all_pairs(MK.size))
    report.add(check("functor.ver.multiplicative", bad is None, "Ver(xy) = Ver(x)Ver(y)", witness=bad))

    # Psi_L(i(rho), Ver alpha) = Ver(Psi_K(rho, alpha))
    YK, YL = y_level(ctx.base, f), y_level(ctx.ext, F)
    GK, GL = YK.ray_group, YL.ray_group
    bad = None
    for rho, alpha in YK.points():
        upper = (YL.ring.reduce(rho), GL.dlog(extend_ideal(ctx, GK.rep(alpha))))
        lhs = ML.locate(YL.rep_ideal(upper))
        rhs = ML.locate(extend_ideal(ctx, YK.rep_ideal((rho, alpha))))
        if lhs != rhs:
            bad = {"rho": rho, "alpha": alpha}
            break
    report.add(check("functor.ver.psi", bad is None,
                     "Ver is [rho, alpha] -> [i(rho), Ver(alpha)] on Y", witness=bad))
    return m, report


def dr_norm_map(ctx: ExtensionContext, f: IntegralIdeal) -> Tuple[MonoidMap, Report]:
    """[b] -> [N(b)] from DR_{L,f^L} to DR_{Q,f}."""
    F = upper_conductor(ctx, f)
    MK, ML = dr_level(ctx.base, f), dr_level(ctx.ext, F)
    report = Report(f"Res {ctx} f={f}")
    mapping = {y.index: MK.locate(norm_ideal(ctx, y.rep)) for y in ML.elements}
    m = MonoidMap(MapKind.NORM, F, f, mapping)

    groups = _grouped(ML, ideals_up_to(ctx.ext, REPRESENTATIVE_NORM_FACTOR * F.norm + 4))
    bad = None
    for k, reps in groups.items():
        images = {MK.locate(norm_ideal(ctx, b)) for b in reps}
        if images != {mapping[k]}:
            bad = {"class": k, "reps": [b.key for b in reps], "images": sorted(images)}
            break
    report.add(check("functor.norm.well_defined", bad is None,
                     f"{sum(len(v) for v in groups.values())} representatives agree", witness=bad))
    bad = m.multiplicativity_witness(ML.mul, MK.mul, _all_pairs(ML.size))
    report.add(check("functor.norm.multiplicative", bad is None, "Res(xy) = Res(x)Res(y)", witness=bad))
    report.add(info("functor.norm.shape", "neither injective nor surjective in general",
                    injective=m.is_injective(), surjective=m.is_surjective(MK.size)))
    return m, report


def functor_diagrams(ctx: ExtensionContext, f: IntegralIdeal) -> Report:
    """Res(x [aO_L]) = Res(x) [a]^2 and Res(Ver(u)) = u^2 on DR_{Q,f}^x."""
    F = upper_conductor(ctx, f)
    MK, ML = dr_level(ctx.base, f), dr_level(ctx.ext, F)
    ver, _ = dr_ver_map(ctx, f)
    res, _ = dr_norm_map(ctx, f)
    report = Report(f"functoriality diagrams {ctx} f={f}")
    coprime = [a for a in ideals_up_to(ctx.base, 2 * f.norm + 6) if is_coprime(a, f)]
    bad = None
    for a in coprime:
        xa = ML.locate(extend_ideal(ctx, a))
        ka = MK.locate(a)
        for y in range(ML.size):
            if res(ML.mul(y, xa)) != MK.mul(res(y), MK.mul(ka, ka)):
                bad = {"a": a.norm, "element": y}
                break
        if bad:
            break
    report.add(check("functor.diagram.norm_translation", bad is None,
                     f"norm commutes with multiplication by {len(coprime)} extended classes",
                     witness=bad))
    bad = next((u for u in MK.coprime_indices() if res(ver(u)) != MK.mul(u, u)), None)
    report.add(check("functor.diagram.norm_of_extension", bad is None,
                     "Res o Ver is squaring on DR_{Q,f}^x", witness=bad))
    return report


# =============================
# The divisor map omega
# =============================

def omega_divisor(ctx: ExtensionContext, f: IntegralIdeal, D: IntegralIdeal) -> IntegralIdeal:
    """prod over p | f of p^{max j: P^{j e(P|p)} | D for all P | p}."""
    n = 1
    for p in factorint(f.norm):
        data = primes_above(ctx.ext, p)
        j = min(valuation(d.ideal, D) // d.e for d in data)
        n *= p ** j
    return rational_ideal(ctx.base, n)


def omega_map(ctx: ExtensionContext, f: IntegralIdeal) -> Tuple[Dict[IntegralIdeal, IntegralIdeal], Report]:
    """D -> omega(D) on the divisors of f^L."""
    F = upper_conductor(ctx, f)
    mapping = {D: omega_divisor(ctx, f, D) for D in divisors(F)}
    report = Report(f"omega {ctx} f={f}")
    small = set(divisors(f))
    report.add(check("functor.omega.surjective", set(mapping.values()) == small,
                     f"{len(mapping)} divisors of f^L onto {len(set(mapping.values()))} of {len(small)}"))
    bad = next((d.norm for d in small if mapping[extend_ideal(ctx, d)] != d), None)
    report.add(check("functor.omega.section", bad is None, "omega(d^L) = d", witness=bad))
    bad = None
    for D in mapping:
        for D2 in mapping:
            if ideal_divides(D, D2) and not ideal_divides(mapping[D], mapping[D2]):
                bad = (D.key, D2.key)
                break
        if bad:
            break
    report.add(check("functor.omega.monotone", bad is None, "D | D' implies omega(D) | omega(D')", witness=bad))
    return mapping, report


def omega_table(ctx: ExtensionContext, f: IntegralIdeal) -> pd.DataFrame:
    mapping, _ = omega_map(ctx, f)
    return pd.DataFrame(
        [{"divisor": str(D), "norm": D.norm, "omega": str(w)} for D, w in mapping.items()],
        columns=["divisor", "norm", "omega"],
    )


# =============================
# Components
# =============================

def norm_on_classes(ctx: ExtensionContext, f: IntegralIdeal, D: IntegralIdeal) -> Dict[tuple, tuple]:
    """C_{L,D} -> C_{Q,omega(D)}, c -> class of N(rep(c))."""
    GL = strict_ray_class_group(ctx.ext, D)
    GK = strict_ray_class_group(ctx.base, omega_divisor(ctx, f, D))
    return {c: GK.dlog(norm_ideal(ctx, GL.rep(c))) for c in GL.classes()}


def component_map(ctx: ExtensionContext, f: IntegralIdeal) -> MonoidMap:
    """(D', c) in DR_{L,f^L} -> (f/omega(f^L/D'), N(c)) in DR_{Q,f}."""
    def build() -> MonoidMap:
        F = upper_conductor(ctx, f)
        MK, ML = dr_level(ctx.base, f), dr_level(ctx.ext, F)
        mapping = {}
        for y in ML.elements:
            D = ideal_exact_div(F, y.divisor)
            w = omega_divisor(ctx, f, D)
            GL = strict_ray_class_group(ctx.ext, D)
            GK = strict_ray_class_group(ctx.base, w)
            d = ideal_exact_div(f, w)
            mapping[y.index] = MK.index_of_key((d.key, GK.dlog(norm_ideal(ctx, GL.rep(y.ray_class)))))
        return MonoidMap(MapKind.NORM, F, f, mapping)

    return get_tower(ctx.ext).get("component", f, build, extra=("component", ctx.base.tag))


def component_restriction_check(ctx: ExtensionContext, f: IntegralIdeal,
                                f2: Optional[IntegralIdeal] = None) -> Report:
    """
    Norm maps C_{L,D} -> C_{Q,omega(D)} for D | f^L, and the assembled map
    DR_{L,f^L} -> DR_{Q,f} against the projections for f | f2.
    """
    F = upper_conductor(ctx, f)
    report = Report(f"component restriction {ctx} f={f}")
    hom_bad = well_bad = index_bad = None
    surjective = {}
    for D in divisors(F):
        GL = strict_ray_class_group(ctx.ext, D)
        w = omega_divisor(ctx, f, D)
        GK = strict_ray_class_group(ctx.base, w)
        phi = norm_on_classes(ctx, f, D)
        if hom_bad is None:
            for c1 in GL.classes():
                for c2 in GL.classes():
                    if phi[GL.group.add(c1, c2)] != GK.group.add(phi[c1], phi[c2]):
                        hom_bad = {"D": D.key, "c1": c1, "c2": c2}
                        break
                if hom_bad:
                    break
        if well_bad is None:
            for b in ideals_up_to(ctx.ext, REPRESENTATIVE_NORM_FACTOR * D.norm + 4):
                if is_coprime(b, D) and phi[GL.dlog(b)] != GK.dlog(norm_ideal(ctx, b)):
                    well_bad = {"D": D.key, "ideal": b.key}
                    break
        image = set(phi.values())
        if GK.order % len(image) or GK.order // len(image) > ctx.degree:
            index_bad = {"D": D.key, "image": len(image), "order": GK.order}
        surjective[str(D)] = len(image) == GK.order
    report.add(check("functor.component.well_defined", well_bad is None,
                     "the norm class does not depend on the representative", witness=well_bad))
    report.add(check("functor.component.homomorphism", hom_bad is None,
                     "C_{L,D} -> C_{Q,omega(D)} is a homomorphism", witness=hom_bad))
    report.add(check("functor.component.index", index_bad is None,
                     "the norm image has index dividing [L:Q]", witness=index_bad))
    report.add(info("functor.component.surjective", "norm maps onto C_{Q,omega(D)}", **surjective))

    assembled = component_map(ctx, f)
    report.add(info("functor.component.image",
                    f"assembled map hits {len(assembled.image())} of {dr_level(ctx.base, f).size} elements"))
    if f2 is None:
        p = min(factorint(f.norm)) if f.norm > 1 else 2
        f2 = ideal_mul(f, rational_ideal(ctx.base, p))
    if not ideal_divides(f, f2):
        raise IdealError(f"{f} does not divide {f2}")
    F2 = upper_conductor(ctx, f2)
    upper = component_map(ctx, f2)
    pi_L = projection_map(ctx.ext, F, F2)
    pi_K = projection_map(ctx.base, f, f2)
    bad = next((y for y in range(dr_level(ctx.ext, F2).size) if assembled(pi_L(y)) != pi_K(upper(y))), None)
    report.add(check("functor.component.transition", bad is None,
                     f"component maps commute with projections {f2} -> {f}", witness=bad))
    return report


__all__ = [
    "ExtensionContext",
    "component_map",
    "component_restriction_check",
    "contraction",
    "dr_norm_map",
    "dr_ver_map",
    "extend_and_norm",
    "extend_ideal",
    "extension_laws",
    "functor_diagrams",
    "make_extension",
    "norm_ideal",
    "norm_on_classes",
    "omega_divisor",
    "omega_map",
    "omega_table",
    "upper_conductor",
]
