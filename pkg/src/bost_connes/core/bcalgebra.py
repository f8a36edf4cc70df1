"""
Operators on function spaces over DR levels.

Fun(DR_f) carries the indicator basis of DR_f. For an integral ideal d:

    sigma_d : Fun(DR_fd) -> Fun(DR_f),  (sigma_d h)(x) = h(lambda_d x)
    rho_d   : Fun(DR_f) -> Fun(DR_fd),  (rho_d h)(y) = h(lambda_d^{-1} y) on Im(lambda_d), else 0
    xi      : Fun(DR_f) -> Fun(DR_f'),  pullback along pi_{f,f'} for f | f'
    pi_d    : indicator of Im(lambda_d) inside DR_F, for d | F

Matrices are 0/1 integer arrays with rows indexing the target basis, so
composition is the matrix product and every relation is a literal equality.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from ..nfield.fields import NumberField
from ..nfield.ideals import (
    IntegralIdeal,
    divisors,
    ideal_divides,
    ideal_exact_div,
    ideal_lcm,
    ideal_mul,
    ideals_up_to,
)
from ..classgroups.rayclass import strict_ray_class_group
from .checks import Report, check, info
from .drmonoid import DRMonoid, dr_level, embedding_map, projection_map
from .tower import get_tower

logger = logging.getLogger(__name__)

# Random operator words
WORD_MAX_LENGTH = 4
WORD_COEFFICIENT_RANGE = (-3, 3)


# =============================
# Level functions
# =============================

@dataclass(frozen=True)
class LevelFunction:
    """An exact rational function on DR_level, stored by element index."""
    field: NumberField
    level: IntegralIdeal
    values: Tuple[Fraction, ...]

    @classmethod
    def constant(cls, K: NumberField, level: IntegralIdeal, c=1) -> "LevelFunction":
        return cls(K, level, (Fraction(c),) * dr_level(K, level).size)

    @classmethod
    def indicator(cls, K: NumberField, level: IntegralIdeal, support: Iterable[int]) -> "LevelFunction":
        n = dr_level(K, level).size
        support = set(support)
        return cls(K, level, tuple(Fraction(1 if i in support else 0) for i in range(n)))

    @classmethod
    def from_vector(cls, K: NumberField, level: IntegralIdeal, v: Sequence) -> "LevelFunction":
        return cls(K, level, tuple(Fraction(x) for x in v))

    @classmethod
    def random(cls, K: NumberField, level: IntegralIdeal, rng: random.Random,
               low: int = WORD_COEFFICIENT_RANGE[0], high: int = WORD_COEFFICIENT_RANGE[1]) -> "LevelFunction":
        n = dr_level(K, level).size
        return cls(K, level, tuple(Fraction(rng.randint(low, high)) for _ in range(n)))

    @property
    def monoid(self) -> DRMonoid:
        return dr_level(self.field, self.level)

    def vector(self) -> np.ndarray:
        return np.array(self.values, dtype=object)

    def __call__(self, i: int) -> Fraction:
        return self.values[i]

    def at_ideal(self, b: IntegralIdeal) -> Fraction:
        return self.values[self.monoid.locate(b)]

    def lift(self, level: IntegralIdeal) -> "LevelFunction":
        """Pullback along pi to a multiple level."""
        if level == self.level:
            return self
        pi = projection_map(self.field, self.level, level)
        n = dr_level(self.field, level).size
        return LevelFunction(self.field, level, tuple(self.values[pi(y)] for y in range(n)))

    def _common(self, other: "LevelFunction") -> Tuple["LevelFunction", "LevelFunction"]:
        L = ideal_lcm(self.level, other.level)
        return self.lift(L), other.lift(L)

    def __add__(self, other: "LevelFunction") -> "LevelFunction":
        a, b = self._common(other)
        return LevelFunction(self.field, a.level, tuple(x + y for x, y in zip(a.values, b.values)))

    def __mul__(self, other: "LevelFunction") -> "LevelFunction":
        a, b = self._common(other)
        return LevelFunction(self.field, a.level, tuple(x * y for x, y in zip(a.values, b.values)))

    def scale(self, c) -> "LevelFunction":
        return LevelFunction(self.field, self.level, tuple(Fraction(c) * x for x in self.values))

    def same_as(self, other: "LevelFunction") -> bool:
        a, b = self._common(other)
        return a.values == b.values

    def is_zero(self) -> bool:
        return not any(self.values)

    # ----- pointwise operators -----

    def restrict(self, d: IntegralIdeal) -> "LevelFunction":
        """sigma_d: a function on DR_level becomes one on DR_{level/d}."""
        base = ideal_exact_div(self.level, d)
        lam = embedding_map(self.field, base, d)
        n = dr_level(self.field, base).size
        return LevelFunction(self.field, base, tuple(self.values[lam(x)] for x in range(n)))

    def extend(self, d: IntegralIdeal) -> "LevelFunction":
        """rho_d: a function on DR_level becomes one on DR_{level*d}, zero off the image."""
        lam = embedding_map(self.field, self.level, d)
        inverse = {y: x for x, y in lam.mapping.items()}
        target = ideal_mul(self.level, d)
        n = dr_level(self.field, target).size
        return LevelFunction(self.field, target,
                             tuple(self.values[inverse[y]] if y in inverse else Fraction(0) for y in range(n)))

    def translate(self, s: IntegralIdeal) -> "LevelFunction":
        """Level-preserving sigma_s: x -> h([s] x)."""
        M = self.monoid
        c = M.locate(s)
        return LevelFunction(self.field, self.level, tuple(self.values[M.mul(c, x)] for x in range(M.size)))

    def __str__(self) -> str:
        return f"Fun(DR_{self.level})[{', '.join(str(v) for v in self.values)}]"


# =============================
# Operator matrices
# =============================

def sigma_op(K: NumberField, f: IntegralIdeal, d: IntegralIdeal) -> np.ndarray:
    """Matrix of sigma_d: Fun(DR_fd) -> Fun(DR_f)."""
    def build() -> np.ndarray:
        lam = embedding_map(K, f, d)
        S = np.zeros((dr_level(K, f).size, dr_level(K, ideal_mul(f, d)).size), dtype=np.int64)
        for x, y in lam.mapping.items():
            S[x, y] = 1
        return S

    return get_tower(K).get("sigma-op", f, build, extra=d.key)


def rho_op(K: NumberField, f: IntegralIdeal, d: IntegralIdeal) -> np.ndarray:
    """Matrix of rho_d: Fun(DR_f) -> Fun(DR_fd)."""
    return sigma_op(K, f, d).T


def xi_op(K: NumberField, f: IntegralIdeal, f2: IntegralIdeal) -> np.ndarray:
    """Matrix of the transition Fun(DR_f) -> Fun(DR_f2), pullback along pi_{f,f2}."""
    def build() -> np.ndarray:
        pi = projection_map(K, f, f2)
        X = np.zeros((dr_level(K, f2).size, dr_level(K, f).size), dtype=np.int64)
        for y, x in pi.mapping.items():
            X[y, x] = 1
        return X

    return get_tower(K).get("xi-op", f2, build, extra=f.key)


def pi_vector(K: NumberField, F: IntegralIdeal, d: IntegralIdeal) -> np.ndarray:
    """Indicator of Im(lambda_d: DR_{F/d} -> DR_F)."""
    v = np.zeros(dr_level(K, F).size, dtype=np.int64)
    v[embedding_map(K, ideal_exact_div(F, d), d).image()] = 1
    return v


def pi_by_divisors(K: NumberField, F: IntegralIdeal, d: IntegralIdeal) -> np.ndarray:
    """Indicator of the classes whose divisor label is divisible by d."""
    M = dr_level(K, F)
    return np.array([1 if ideal_divides(d, x.divisor) else 0 for x in M.elements], dtype=np.int64)


def _equal(A: np.ndarray, B: np.ndarray) -> bool:
    return A.shape == B.shape and bool(np.array_equal(A, B))


def _first_difference(A: np.ndarray, B: np.ndarray):
    if A.shape != B.shape:
        return {"shapes": [A.shape, B.shape]}
    idx = np.argwhere(A != B)
    return None if len(idx) == 0 else tuple(int(i) for i in idx[0])


# =============================
# Relation suite
# =============================

def verify_relation_suite(K: NumberField, f: IntegralIdeal, d: IntegralIdeal, e: IntegralIdeal) -> Report:
    """
    The six relations at base level f, as exact matrix identities:

        rho_d(1) = pi_d               pi_d pi_e = pi_lcm(d,e)
        sigma_d sigma_e = sigma_de    rho_d rho_e = rho_de
        rho_d sigma_d = pi_d          sigma_d rho_d = 1
    """
    report = Report(f"relations {K.tag} f={f} d={d} e={e}")
    n = dr_level(K, f).size
    fd, fe = ideal_mul(f, d), ideal_mul(f, e)
    de = ideal_mul(d, e)
    lcm = ideal_lcm(d, e)
    F = ideal_mul(f, lcm)

    ones = np.ones(n, dtype=np.int64)
    rho_one = rho_op(K, f, d) @ ones
    pi_d = pi_vector(K, fd, d)
    report.add(check("bcalgebra.rho_one", _equal(rho_one, pi_d) and _equal(pi_d, pi_by_divisors(K, fd, d)),
                     "rho_d(1) = pi_d", witness=_first_difference(rho_one, pi_d)))
    lifted = xi_op(K, fd, F) @ rho_one
    report.add(check("bcalgebra.rho_one_transition", _equal(lifted, pi_vector(K, F, d)),
                     f"rho_d(1) transported to level {F} is pi_d there",
                     witness=_first_difference(lifted, pi_vector(K, F, d))))

    lhs = pi_vector(K, F, d) * pi_vector(K, F, e)
    rhs = pi_vector(K, F, lcm)
    report.add(check("bcalgebra.pi_lcm", _equal(lhs, rhs), "pi_d pi_e = pi_lcm(d,e)",
                     witness=_first_difference(lhs, rhs)))

    lhs = sigma_op(K, f, e) @ sigma_op(K, fe, d)
    rhs = sigma_op(K, f, de)
    report.add(check("bcalgebra.sigma_mult", _equal(lhs, rhs), "sigma_d sigma_e = sigma_de",
                     witness=_first_difference(lhs, rhs)))

    lhs = rho_op(K, fe, d) @ rho_op(K, f, e)
    rhs = rho_op(K, f, de)
    report.add(check("bcalgebra.rho_mult", _equal(lhs, rhs), "rho_d rho_e = rho_de",
                     witness=_first_difference(lhs, rhs)))

    lhs = rho_op(K, f, d) @ sigma_op(K, f, d)
    rhs = np.diag(pi_d)
    report.add(check("bcalgebra.rho_sigma", _equal(lhs, rhs), "rho_d sigma_d = multiplication by pi_d",
                     witness=_first_difference(lhs, rhs)))

    lhs = sigma_op(K, f, d) @ rho_op(K, f, d)
    report.add(check("bcalgebra.sigma_rho", _equal(lhs, np.eye(n, dtype=np.int64)), "sigma_d rho_d = 1",
                     witness=_first_difference(lhs, np.eye(n, dtype=np.int64))))
    return report


def transition_compat(K: NumberField, f: IntegralIdeal, f2: IntegralIdeal, d: IntegralIdeal) -> Report:
    """xi_{f,f2} sigma_d = sigma_d xi_{fd,f2d}, and the same square for rho_d."""
    report = Report(f"transition {K.tag} {f} | {f2}, d={d}")
    fd, f2d = ideal_mul(f, d), ideal_mul(f2, d)
    lhs = xi_op(K, f, f2) @ sigma_op(K, f, d)
    rhs = sigma_op(K, f2, d) @ xi_op(K, fd, f2d)
    report.add(check("bcalgebra.transition.sigma", _equal(lhs, rhs), "xi sigma_d = sigma_d xi",
                     witness=_first_difference(lhs, rhs)))
    lhs = rho_op(K, f2, d) @ xi_op(K, f, f2)
    rhs = xi_op(K, fd, f2d) @ rho_op(K, f, d)
    report.add(check("bcalgebra.transition.rho", _equal(lhs, rhs), "rho_d xi = xi rho_d",
                     witness=_first_difference(lhs, rhs)))
    return report


def operator_words(
    K: NumberField,
    f: IntegralIdeal,
    ideals: Sequence[IntegralIdeal],
    count: int = 20,
    seed: int = 0,
) -> Report:
    """
    Random words of length <= 4 in sigma, rho and xi, applied to random
    functions both as matrix products and pointwise.
    """
    rng = random.Random(seed)
    report = Report(f"operator words {K.tag} f={f}")
    bad = None
    for w in range(count):
        h = LevelFunction.random(K, f, rng)
        vec = h.vector()
        word: List[str] = []
        for _ in range(rng.randint(1, WORD_MAX_LENGTH)):
            d = rng.choice(list(ideals))
            kind = rng.choice(["sigma", "rho", "xi"])
            if kind == "sigma":
                if not ideal_divides(d, h.level):
                    continue
                base = ideal_exact_div(h.level, d)
                vec = sigma_op(K, base, d) @ vec
                h = h.restrict(d)
            elif kind == "rho":
                vec = rho_op(K, h.level, d) @ vec
                h = h.extend(d)
            else:
                target = ideal_mul(h.level, d)
                vec = xi_op(K, h.level, target) @ vec
                h = h.lift(target)
            word.append(f"{kind}_{d}")
        if tuple(vec.tolist()) != h.values:
            bad = {"word": word, "sample": w}
            break
    report.add(check("bcalgebra.words", bad is None,
                     f"{count} operator words agree with their pointwise action", witness=bad))
    return report


# =============================
# Galois orbits
# =============================

@dataclass
class OrbitData:
    divisor: IntegralIdeal
    members: List[int]
    stabilizer: List[Tuple[int, ...]]


def unit_orbits(M: DRMonoid) -> List[List[int]]:
    """Orbits of DR_f^x acting on DR_f by multiplication, sorted."""
    units = M.coprime_indices()
    seen, orbits = set(), []
    for x in range(M.size):
        if x in seen:
            continue
        orbit = sorted({M.mul(u, x) for u in units})
        seen.update(orbit)
        orbits.append(orbit)
    return orbits


def galois_orbit_structure(K: NumberField, f: IntegralIdeal) -> Tuple[List[OrbitData], Report]:
    """
    Orbits of C_f on DR_f biject with the divisors d | f; the orbit at d is a
    torsor under C_{f/d}, with stabilizers the kernel of C_f -> C_{f/d}.
    """
    M = dr_level(K, f)
    G = strict_ray_class_group(K, f)
    report = Report(f"Galois orbits {K.tag} f={f}")
    orbits = unit_orbits(M)
    divs = divisors(f)
    labels = []
    for orbit in orbits:
        labels.append({M.elements[x].divisor.key for x in orbit})
    single = all(len(s) == 1 for s in labels)
    by_divisor = sorted(next(iter(s)) for s in labels) if single else []
    report.add(check("bcalgebra.orbits.divisors", single and by_divisor == sorted(d.key for d in divs),
                     f"{len(orbits)} orbits, {len(divs)} divisors",
                     witness=[sorted(s) for s in labels] if not single else None))

    data: List[OrbitData] = []
    bad = None
    for orbit in orbits:
        d = M.elements[orbit[0]].divisor
        H = strict_ray_class_group(K, ideal_exact_div(f, d))
        proj = G.project(H)
        kernel = sorted(c for c in G.classes() if proj[c] == H.group.zero())
        x = orbit[0]
        stab = sorted(c for c in G.classes() if M.mul(M.unit_element(c), x) == x)
        data.append(OrbitData(d, orbit, stab))
        if len(orbit) != H.order or stab != kernel:
            bad = {"divisor": d.key, "orbit size": len(orbit), "|C_(f/d)|": H.order,
                   "stabilizer": stab, "kernel": kernel}
            break
        # the action of C_f on the orbit factors through C_{f/d} freely
        for c in G.classes():
            for y in orbit:
                if (M.mul(M.unit_element(c), y) == y) != (proj[c] == H.group.zero()):
                    bad = {"divisor": d.key, "class": c, "point": y}
                    break
            if bad:
                break
        if bad:
            break
    report.add(check("bcalgebra.orbits.torsor", bad is None,
                     "each orbit is a free transitive C_(f/d)-set", witness=bad))
    report.add(info("bcalgebra.orbits.sizes", "orbit sizes by divisor",
                    sizes={str(o.divisor): len(o.members) for o in data}))
    return data, report


def level_ideals(K: NumberField, bound: int) -> List[IntegralIdeal]:
    """Nonzero integral ideals of norm <= bound, in canonical order."""
    return list(ideals_up_to(K, bound))


def relation_grid(K: NumberField, f: IntegralIdeal, bound: int) -> Report:
    """The relation suite for every pair d, e with N(d), N(e) <= bound."""
    report = Report(f"relation grid {K.tag} f={f} bound={bound}")
    ideals = level_ideals(K, bound)
    for i, d in enumerate(ideals):
        for e in ideals[i:]:
            report.extend(verify_relation_suite(K, f, d, e))
    return report
