"""
Measures, partition functions and KMS states at finite level.

- Normalized counting measures on DR_f, their pushforwards along pi and the
  scaling law under lambda_d.
- Z_B(beta) = sum over N(a) <= B of N(a)^{-beta}, enclosed together with an
  explicit tail bound, and the Euler product over primes of norm <= B with
  its own tail factor. Both enclosures contain zeta_K(beta).
- Gibbs states on l2 of the ideals of norm <= B. The time evolution scales
  U*_{s1} a U_{s2} by (N(s2)/N(s1))^{it}, so sigma_{i beta} multiplies it by
  (N(s1)/N(s2))^{beta}. The KMS_beta identity phi(xy) = phi(y sigma(x)) is
  compared on the diagonal cycles that stay inside the truncation.
- KMS_infinity states: evaluations at the unit points of DR_f.

Integer beta is handled in exact rationals, other rational beta with mpmath
interval arithmetic.
"""

import logging
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import mpmath
import pandas as pd
from mpmath import iv
from sympy import factorint

from ..classgroups.rayclass import strict_ray_class_group
from ..exceptions import IdealError
from ..nfield.fields import NumberField
from ..nfield.ideals import (
    IntegralIdeal,
    ideal_mul,
    ideals_up_to,
    primes_above,
    prime_ideals_up_to,
    unit_ideal,
)
from ..nfield.types import Splitting
from .bcalgebra import LevelFunction
from .checks import Report, Severity, check, info
from .drmonoid import dr_level, embedding_map, projection_map
from .equivariant import kms_infinity_evaluation
from .monomials import CrossedMonomial, image, matrix_entry, random_monomial

logger = logging.getLogger(__name__)

Beta = Union[int, str, Fraction]

# Bounds of the (B, Z_B) series exported by the CLI
ZETA_SERIES_BOUNDS = (10, 100, 1000, 10000)

# Random subsets per scaling check
SCALING_SAMPLES = 8

# Random monomial pairs per Gibbs check
GIBBS_SAMPLES = 12


def parse_beta(beta: Beta) -> Fraction:
    """Exact rational inverse temperature from an int, Fraction or decimal string."""
    value = Fraction(str(beta)) if not isinstance(beta, Fraction) else beta
    if value <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    return value


def _iv_power(n: int, beta: Fraction):
    """Enclosure of n^{-beta}."""
    if beta.denominator == 1:
        return iv.mpf(1) / iv.mpf(n) ** int(beta)
    return iv.exp(-(iv.mpf(beta.numerator) / beta.denominator) * iv.log(n))


def _bounds(x) -> Tuple[mpmath.mpf, mpmath.mpf]:
    return mpmath.mpf(x.a), mpmath.mpf(x.b)


def _overlap(x, y) -> bool:
    (xa, xb), (ya, yb) = _bounds(x), _bounds(y)
    return xa <= yb and ya <= xb


# =============================
# Measures
# =============================

@dataclass(frozen=True)
class LevelMeasure:
    """A measure on DR_level as exact rational weights by element index."""
    field: NumberField
    level: IntegralIdeal
    weights: Tuple[Fraction, ...]

    @classmethod
    def normalized_counting(cls, K: NumberField, f: IntegralIdeal) -> "LevelMeasure":
        n = dr_level(K, f).size
        return cls(K, f, (Fraction(1, n),) * n)

    @property
    def total(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def measure(self, Z: Iterable[int]) -> Fraction:
        return sum((self.weights[i] for i in set(Z)), Fraction(0))

    def pushforward(self, target: IntegralIdeal) -> "LevelMeasure":
        """Image along pi_{target, level}."""
        pi = projection_map(self.field, target, self.level)
        out = [Fraction(0)] * dr_level(self.field, target).size
        for x, w in enumerate(self.weights):
            out[pi(x)] += w
        return LevelMeasure(self.field, target, tuple(out))


def check_uniformity(K: NumberField, f: IntegralIdeal, f2: IntegralIdeal) -> Report:
    """pi_* mu_{f2} = mu_f."""
    report = Report(f"uniformity {K.tag} {f} | {f2}")
    pushed = LevelMeasure.normalized_counting(K, f2).pushforward(f)
    expected = LevelMeasure.normalized_counting(K, f)
    fibers = projection_map(K, f, f2).fibers()
    histogram = dict(sorted(Counter(len(v) for v in fibers.values()).items()))
    bad = next((x for x in range(len(expected.weights)) if pushed.weights[x] != expected.weights[x]), None)
    report.add(check("kms.measure.uniform", bad is None,
                     f"pushforward of mu_{f2} is mu_{f}; fiber sizes {histogram}",
                     witness=None if bad is None else {"element": bad, "weight": pushed.weights[bad],
                                                       "histogram": histogram},
                     severity=Severity.DEVIATION))
    report.add(check("kms.measure.mass", pushed.total == 1, f"total mass {pushed.total}"))
    return report


def check_scaling(K: NumberField, f: IntegralIdeal, d: IntegralIdeal,
                  samples: int = SCALING_SAMPLES, seed: int = 0) -> Report:
    """mu_{df}(lambda_d Z) = N(d)^{-1} mu_f(Z) for singletons and random subsets."""
    report = Report(f"scaling {K.tag} f={f} d={d}")
    lam = embedding_map(K, f, d)
    mu = LevelMeasure.normalized_counting(K, f)
    mu_d = LevelMeasure.normalized_counting(K, ideal_mul(d, f))
    n = len(mu.weights)
    rng = random.Random(seed)
    subsets: List[List[int]] = [[x] for x in range(n)]
    for _ in range(samples):
        subsets.append(sorted(rng.sample(range(n), rng.randint(1, n))))
    bad = None
    for Z in subsets:
        lhs = mu_d.measure(lam(x) for x in Z)
        rhs = mu.measure(Z) / d.norm
        if lhs != rhs:
            bad = {"Z": Z, "lhs": lhs, "rhs": rhs}
            break
    report.add(check("kms.measure.scaling", bad is None,
                     f"{len(subsets)} subsets of DR_{f}", witness=bad,
                     severity=Severity.DEVIATION))
    return report


# =============================
# Partition function
# =============================

def _tail_bound(K: NumberField, beta: Fraction, B: int):
    """Upper bound for the sum over N(a) > B, from a_n <= 1 (Q) or a_n <= tau(n)."""
    b = iv.mpf(beta.numerator) / beta.denominator
    power = iv.exp((1 - b) * iv.log(B))
    if K.is_rational:
        return power / (b - 1)
    return b * power * ((iv.log(B) + 1) / (b - 1) + 1 / (b - 1) ** 2)


@dataclass
class PartitionFunction:
    """Z_B(beta) with the Euler-product cross computation."""
    field: NumberField
    beta: Fraction
    bound: int
    ideal_count: int
    partial: object
    tail: Optional[object]
    euler: object
    euler_factor: Optional[object]

    @property
    def diverges(self) -> bool:
        return self.tail is None

    def sum_bounds(self) -> Tuple[mpmath.mpf, mpmath.mpf]:
        lo, hi = _bounds(self.partial)
        if self.diverges:
            return lo, mpmath.inf
        return lo, _bounds(self.partial + self.tail)[1]

    def euler_bounds(self) -> Tuple[mpmath.mpf, mpmath.mpf]:
        lo, hi = _bounds(self.euler)
        if self.euler_factor is None:
            return lo, mpmath.inf
        return lo, _bounds(self.euler * self.euler_factor)[1]

    def overlaps(self) -> bool:
        (a, b), (c, d) = self.sum_bounds(), self.euler_bounds()
        return a <= d and c <= b

    def contains(self, value) -> bool:
        (a, b), (c, d) = self.sum_bounds(), self.euler_bounds()
        return max(a, c) <= value <= min(b, d)

    def to_dict(self) -> Dict[str, object]:
        lo, hi = self.sum_bounds()
        elo, ehi = self.euler_bounds()
        return {
            "field": self.field.tag,
            "beta": str(self.beta),
            "bound": self.bound,
            "ideals": self.ideal_count,
            "partial_lower": mpmath.nstr(lo, 15),
            "upper": mpmath.nstr(hi, 15),
            "euler_lower": mpmath.nstr(elo, 15),
            "euler_upper": mpmath.nstr(ehi, 15),
            "diverges": self.diverges,
        }


def partition_function(K: NumberField, beta: Beta, bound: int) -> PartitionFunction:
    """
    Z_B(beta) over ideals_up_to(K, B) plus tail, and the Euler product
    E_B <= zeta_K(beta) <= E_B exp(4 B^{1-beta}/(beta-1)).

    For beta <= 1 only the partial sums are returned and `diverges` is set.
    """
    beta = parse_beta(beta)
    if bound < 1:
        raise IdealError(f"bound must be positive, got {bound}")
    counts = Counter(a.norm for a in ideals_up_to(K, bound))
    partial = iv.mpf(0)
    for n in sorted(counts):
        partial += counts[n] * _iv_power(n, beta)
    euler = iv.mpf(1)
    for P in prime_ideals_up_to(K, bound):
        euler *= 1 / (1 - _iv_power(P.norm, beta))
    tail = factor = None
    if beta > 1:
        tail = _tail_bound(K, beta, bound)
        b = iv.mpf(beta.numerator) / beta.denominator
        factor = iv.exp(4 * iv.exp((1 - b) * iv.log(bound)) / (b - 1))
    else:
        logger.warning("beta = %s <= 1: zeta_K diverges, partial sums only", beta)
    Z = PartitionFunction(K, beta, bound, sum(counts.values()), partial, tail, euler, factor)
    logger.info("Z_%d(%s) for %s: %s", bound, beta, K.tag, Z.to_dict())
    return Z


def quadratic_character(K: NumberField) -> List[int]:
    """chi_D(n) for n mod |D|, read off the splitting of primes."""
    values = {Splitting.SPLIT: 1, Splitting.INERT: -1, Splitting.RAMIFIED: 0}
    q = abs(K.discriminant)
    chi = [0] * q
    for n in range(1, q):
        v = 1
        for p, k in factorint(n).items():
            v *= values[primes_above(K, p)[0].splitting] ** k
        chi[n] = v
    return chi


def zeta_reference(K: NumberField, beta: Beta) -> mpmath.mpf:
    """zeta(beta) L(chi_D, beta), evaluated by mpmath's own series."""
    beta = parse_beta(beta)
    s = mpmath.mpf(beta.numerator) / beta.denominator
    value = mpmath.zeta(s)
    if not K.is_rational:
        value *= mpmath.dirichlet(s, quadratic_character(K))
    return value


def partition_check(K: NumberField, beta: Beta, bounds: Sequence[int] = ZETA_SERIES_BOUNDS) -> Report:
    """Overlap of both enclosures, monotonicity in B, and the zeta_K oracle."""
    beta = parse_beta(beta)
    report = Report(f"partition function {K.tag} beta={beta}")
    results = [partition_function(K, beta, B) for B in sorted(bounds)]
    if beta <= 1:
        report.add(info("kms.partition.diverges", f"beta = {beta} <= 1: partial sums only",
                        partial=[r.to_dict()["partial_lower"] for r in results]))
        return report
    bad = next((r.bound for r in results if not r.overlaps()), None)
    report.add(check("kms.partition.overlap", bad is None,
                     f"ideal sum and Euler product enclosures meet for B in {list(bounds)}",
                     witness=bad))
    bad = _monotone_witness(results)
    report.add(check("kms.partition.monotone", bad is None, "Z_B grows with B", witness=bad))
    oracle = zeta_reference(K, beta)
    bad = next((r.bound for r in results if not r.contains(oracle)), None)
    report.add(check("kms.partition.oracle", bad is None,
                     f"zeta_K({beta}) = {mpmath.nstr(oracle, 10)} lies in every enclosure",
                     witness=bad))
    return report


def _monotone_witness(results: Sequence[PartitionFunction]) -> Optional[int]:
    for r1, r2 in zip(results, results[1:]):
        if _bounds(r2.partial)[1] < _bounds(r1.partial)[0]:
            return r2.bound
    return None


def zeta_series(K: NumberField, beta: Beta, bounds: Sequence[int] = ZETA_SERIES_BOUNDS) -> pd.DataFrame:
    """(B, Z_B(beta)) rows for CSV export."""
    rows = []
    for B in bounds:
        Z = partition_function(K, beta, B)
        lo, hi = Z.sum_bounds()
        elo, ehi = Z.euler_bounds()
        rows.append({
            "bound": B,
            "ideals": Z.ideal_count,
            "partial_sum": float(lo),
            "upper": float(hi),
            "euler_lower": float(elo),
            "euler_upper": float(ehi),
            "overlap": Z.overlaps() if not Z.diverges else None,
        })
    return pd.DataFrame(rows, columns=["bound", "ideals", "partial_sum", "upper",
                                       "euler_lower", "euler_upper", "overlap"])


# =============================
# Gibbs states
# =============================

@dataclass
class TruncatedGibbsState:
    """phi(x) = Z_B^{-1} sum over N(b) <= B of N(b)^{-beta} <e_b, x e_b>."""
    field: NumberField
    beta: Fraction
    bound: int
    ideals: Tuple[IntegralIdeal, ...]
    weights: Dict[IntegralIdeal, object]
    partition: object

    @property
    def exact(self) -> bool:
        return self.beta.denominator == 1

    def normalized_total(self):
        total = sum(self.weights.values(), Fraction(0) if self.exact else iv.mpf(0))
        return total / self.partition

    def coerce(self, v: Fraction):
        """Exact rationals stay exact; otherwise v becomes a point interval."""
        return v if self.exact else iv.mpf(v.numerator) / v.denominator

    def twist(self, x: CrossedMonomial):
        """The factor (N(s1)/N(s2))^beta of sigma_{i beta}(x)."""
        if self.exact:
            k = int(self.beta)
            return Fraction(x.left.norm ** k, x.right.norm ** k)
        return _iv_power(x.right.norm, self.beta) / _iv_power(x.left.norm, self.beta)

    def __call__(self, x: CrossedMonomial, y: Optional[CrossedMonomial] = None):
        zero = Fraction(0) if self.exact else iv.mpf(0)
        total = zero
        for b in self.ideals:
            v = _diagonal(x, y, b)
            if v:
                total += self.weights[b] * self.coerce(v)
        return total / self.partition


def gibbs_state(K: NumberField, beta: Beta, bound: int) -> TruncatedGibbsState:
    beta = parse_beta(beta)
    ideals = ideals_up_to(K, bound)
    if beta.denominator == 1:
        k = int(beta)
        weights = {b: Fraction(1, b.norm ** k) for b in ideals}
        Z = sum(weights.values(), Fraction(0))
    else:
        weights = {b: _iv_power(b.norm, beta) for b in ideals}
        Z = sum(weights.values(), iv.mpf(0))
    return TruncatedGibbsState(K, beta, bound, ideals, weights, Z)


def _diagonal(x: CrossedMonomial, y: Optional[CrossedMonomial], b: IntegralIdeal) -> Fraction:
    """<e_b, x y e_b> (or <e_b, x e_b> when y is None)."""
    if y is None:
        hit = image(x, b)
        return hit[1] if hit is not None and hit[0] == b else Fraction(0)
    first = image(y, b)
    if first is None:
        return Fraction(0)
    c, kappa = first
    second = image(x, c)
    if second is None or second[0] != b:
        return Fraction(0)
    return kappa * second[1]


def _cycle_sum(state: TruncatedGibbsState, x: CrossedMonomial, y: CrossedMonomial, scale=1):
    """sum of w(b) <e_b, x y e_b> over b whose intermediate ideal stays within the bound."""
    total = Fraction(0) if state.exact else iv.mpf(0)
    for b in state.ideals:
        first = image(y, b)
        if first is None or first[0].norm > state.bound:
            continue
        v = _diagonal(x, y, b)
        if v:
            total += state.weights[b] * state.coerce(v) * scale
    return total


def _equal(state: TruncatedGibbsState, a, b) -> bool:
    if state.exact:
        return a == b
    return _overlap(iv.mpf(0) + a, iv.mpf(0) + b)


def gibbs_kms_check(K: NumberField, beta: Beta, bound: int, f: Optional[IntegralIdeal] = None,
                    samples: int = GIBBS_SAMPLES, seed: int = 0) -> Report:
    """
    phi(x y) = phi(y sigma_{i beta}(x)) on monomial pairs, summed over the
    cycles b -> c -> b with N(b), N(c) <= B. The untruncated difference is
    reported as information.
    """
    state = gibbs_state(K, beta, bound)
    f = f or unit_ideal(K)
    report = Report(f"Gibbs KMS {K.tag} beta={state.beta} B={bound}")
    if state.exact:
        report.add(check("kms.gibbs.normalized", state.normalized_total() == 1, "weights sum to 1"))
    if state.beta == 1:
        report.add(info("kms.gibbs.beta_one", "beta = 1 is a plausibility check only"))
    rng = random.Random(seed)
    small = [b for b in state.ideals if b.norm <= max(2, int(bound ** 0.5))]
    pairs: List[Tuple[CrossedMonomial, CrossedMonomial]] = []
    for s in small:
        pairs.append((CrossedMonomial.isometry(s), CrossedMonomial.coisometry(s)))
        pairs.append((CrossedMonomial.coisometry(s), CrossedMonomial.isometry(s)))
    a = LevelFunction.random(K, f, rng)
    pairs.append((CrossedMonomial.function(a), CrossedMonomial.function(a)))
    for _ in range(samples):
        pairs.append((random_monomial(K, f, small, rng), random_monomial(K, f, small, rng)))

    bad = None
    defects = []
    for x, y in pairs:
        lhs = _cycle_sum(state, x, y)
        rhs = _cycle_sum(state, y, x, state.twist(x))
        if not _equal(state, lhs, rhs):
            bad = {"x": str(x), "y": str(y), "lhs": str(lhs), "rhs": str(rhs)}
            break
        if state.exact:
            raw = state(x, y) - state(y, x) * state.twist(x)
            if raw:
                defects.append(str(raw))
    report.add(check("kms.gibbs.kms_identity", bad is None,
                     f"phi(xy) = phi(y sigma(x)) on {len(pairs)} monomial pairs",
                     witness=bad))
    report.add(info("kms.gibbs.truncation", f"{len(defects)} pairs carry a boundary defect",
                    defects=defects[:5]))
    return report


# =============================
# KMS_infinity
# =============================

def kms_infinity_simplex(K: NumberField, f: IntegralIdeal, bound: int = 4, seed: int = 0) -> Report:
    """Unit-point evaluations: |C_f| states, a free transitive C_f-action, phi(a U_s) = delta_{s,1} a(omega)."""
    M = dr_level(K, f)
    G = strict_ray_class_group(K, f)
    report = Report(f"KMS_inf simplex {K.tag} f={f}")
    states = M.coprime_indices()
    report.add(check("kms.kms_inf.count", len(states) == G.order,
                     f"{len(states)} extremal states, |C_f| = {G.order}"))
    bad = None
    for omega in states:
        orbit = sorted(M.mul(M.unit_element(g), omega) for g in G.classes())
        if orbit != sorted(states):
            bad = omega
            break
    report.add(check("kms.kms_inf.free_transitive", bad is None,
                     "every state has a trivial stabilizer and a full orbit", witness=bad))

    rng = random.Random(seed)
    a = LevelFunction.random(K, f, rng)
    one = unit_ideal(K)
    bad = None
    for omega in states:
        w = M.elements[omega].rep
        for s in ideals_up_to(K, bound):
            x = CrossedMonomial(one, a, s)
            value = matrix_entry(x, one, one, point=w)
            expected = a(omega) if s.is_unit_ideal() else Fraction(0)
            if value != expected:
                bad = {"state": omega, "s": s.key, "value": value}
                break
        if bad:
            break
    report.add(check("kms.kms_inf.ground_state", bad is None,
                     "phi_omega(a U_s) = delta_{s,1} a(omega)", witness=bad))
    report.extend(kms_infinity_evaluation(K, f))
    return report


__all__ = [
    "LevelMeasure",
    "PartitionFunction",
    "TruncatedGibbsState",
    "ZETA_SERIES_BOUNDS",
    "check_scaling",
    "check_uniformity",
    "gibbs_kms_check",
    "gibbs_state",
    "kms_infinity_simplex",
    "parse_beta",
    "partition_check",
    "partition_function",
    "quadratic_character",
    "zeta_reference",
    "zeta_series",
]
