"""
Strict ray class groups C_f (conductor f times every real place).

Model
-----
Fix class-group representatives r_c whose norms are prime to N(f). An ideal
a prime to f in class c satisfies a = r_c * (y); its ray class is

    (c, q(a)),   q(a) = [y mod f, sign(y)] in Q_f = ((O/f)^x x {+-1}^r1) / U

with U the image of the global units. y is read off a generator z of the
integral principal ideal a * conj(r_c) = (y * N(r_c)). Two pairs multiply as
(c1 + c2, q1 * q2 * kappa(c1, c2)) with kappa(c1, c2) = q(r_c1 * r_c2).

The model gives the order h * phi(f) * 2^r1 / |U| structurally; ideal
representatives are then enumerated by increasing norm until every class is
hit, so both counts are compared on every build.

References:
- H. Cohen, Advanced Topics in Computational Number Theory, sec. 4.1 and 4.3
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from math import gcd
from typing import Dict, FrozenSet, List, Tuple

from ..exceptions import IdealError, VerificationError
from ..nfield.fields import NumberField, pair_signs
from ..nfield.ideals import (
    FractionalIdeal,
    IntegralIdeal,
    ideal_conjugate,
    ideal_divides,
    ideal_mul,
    is_coprime,
    principal_ideal,
)
from ..nfield.residues import ResidueRing, residue_ring
from ..nfield.search import principal_generator, ray_generator_search, totally_positive_lift, unit_image
from ..nfield.types import ClassVector, Residue, SignVector, sign_product
from .abelian import FiniteAbelianGroup, GroupStructure, structure_from_elements
from .classgroups import IdealClassGroup, class_group, enumerate_until, minkowski_bound
from .totient import euler_phi

logger = logging.getLogger(__name__)

QClass = Tuple[Residue, SignVector]
ModelElement = Tuple[int, QClass]


@dataclass
class OrderReport:
    """The exact-sequence order next to the enumerated class count."""
    class_number: int
    phi: int
    r1: int
    unit_image_order: int
    positive_unit_image_order: int
    structural_order: int
    enumerated_order: int

    @property
    def agrees(self) -> bool:
        return self.structural_order == self.enumerated_order

    @property
    def totally_positive_reading(self) -> int:
        """The order obtained when U_f is read as the totally positive units only."""
        return self.class_number * self.phi * 2 ** self.r1 // self.positive_unit_image_order

    def as_dict(self) -> Dict[str, int]:
        return {
            "h": self.class_number,
            "phi": self.phi,
            "r1": self.r1,
            "|U_f| (all units)": self.unit_image_order,
            "|U_f| (totally positive units)": self.positive_unit_image_order,
            "structural order": self.structural_order,
            "enumerated order": self.enumerated_order,
            "order with totally positive U_f": self.totally_positive_reading,
        }


@dataclass
class RayClassGroup:
    """C_f with discrete logarithms, representatives and the map j_f."""
    field: NumberField
    conductor: IntegralIdeal
    class_group: IdealClassGroup
    ring: ResidueRing
    unit_image: FrozenSet[QClass]
    model_reps: List[IntegralIdeal]
    structure: GroupStructure = None
    reps: Dict[ClassVector, IntegralIdeal] = field(default_factory=dict)
    _canon: Dict[QClass, QClass] = field(default_factory=dict, repr=False)
    _kappa: Dict[Tuple[int, int], ModelElement] = field(default_factory=dict, repr=False)

    # ----- model arithmetic -----

    def _canonical(self, q: QClass) -> QClass:
        return self._canon[q]

    def _q_mul(self, x: QClass, y: QClass) -> QClass:
        return self._canonical((self.ring.mul(x[0], y[0]), sign_product(x[1], y[1])))

    def _model_class(self, a: IntegralIdeal) -> ModelElement:
        K = self.field
        i = self.class_group.class_index(a)
        r = self.model_reps[i]
        z = principal_generator(ideal_mul(a, ideal_conjugate(r)))
        if z is None:
            raise VerificationError(
                "classgroups.ray_model",
                f"{a} * conj({r}) is not principal although both lie in class {i}",
                witness={"ideal": a.key, "rep": r.key},
            )
        scale = self.ring.inverse(self.ring.reduce((r.norm, 0)))
        res = self.ring.mul(self.ring.reduce(z), scale)
        return i, self._canonical((res, pair_signs(K, z)))

    def _model_mul(self, x: ModelElement, y: ModelElement) -> ModelElement:
        i, j = x[0], y[0]
        key = (min(i, j), max(i, j))
        if key not in self._kappa:
            self._kappa[key] = self._model_class(ideal_mul(self.model_reps[i], self.model_reps[j]))
        k, kappa = self._kappa[key]
        return k, self._q_mul(self._q_mul(x[1], y[1]), kappa)

    # ----- public API -----

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.structure.group

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def invariants(self) -> Tuple[int, ...]:
        return self.group.invariants

    def classes(self) -> List[ClassVector]:
        return self.group.elements()

    def is_coprime(self, a: IntegralIdeal) -> bool:
        return is_coprime(a, self.conductor)

    def dlog(self, a: IntegralIdeal) -> ClassVector:
        """Exponent vector of the ray class of a (a prime to f)."""
        if a.field != self.field:
            raise IdealError(f"{a} does not belong to {self.field.tag}")
        if not self.is_coprime(a):
            raise IdealError(f"{a} is not coprime to the conductor {self.conductor}")
        return self.structure.to_vector(self._model_class(a))

    def rep(self, x: ClassVector) -> IntegralIdeal:
        return self.reps[self.group.reduce(x)]

    def j(self, s: Residue) -> ClassVector:
        """
        j_f on (O_K/f)^x: the inverse of the class of (x) for a totally
        positive lift x of s, so that iota(s) * j_f(s) = 1.
        """
        plus = (1,) * self.field.r1
        q = self._canonical((self.ring.reduce(s), plus))
        return self.group.neg(self.structure.to_vector((0, q)))

    def j_kernel_direct(self) -> List[Residue]:
        """Units s whose totally positive lift generates an ideal ~_f (1)."""
        modulus = FractionalIdeal.make(self.conductor)
        kernel = []
        for s in self.ring.units:
            x = totally_positive_lift(self.ring, s).as_pair()
            c = FractionalIdeal.make(principal_ideal(self.field, x))
            if ray_generator_search(c, modulus, True).found:
                kernel.append(s)
        return sorted(kernel)

    def j_kernel_from_units(self) -> List[Residue]:
        """Residues of the totally positive global units."""
        return sorted({res for res, sg in self.unit_image if all(v > 0 for v in sg)})

    def verify_j(self) -> List[Residue]:
        """j_f is a homomorphism and its kernel agrees both ways."""
        units = list(self.ring.units)
        for s in units:
            for t in units:
                lhs = self.j(self.ring.mul(s, t))
                rhs = self.group.add(self.j(s), self.j(t))
                if lhs != rhs:
                    raise VerificationError(
                        "classgroups.j_hom", f"j_f({s}*{t}) != j_f({s}) + j_f({t})",
                        witness={"s": s, "t": t},
                    )
        direct = self.j_kernel_direct()
        from_units = self.j_kernel_from_units()
        image_kernel = sorted(s for s in units if self.j(s) == self.group.zero())
        if not (direct == from_units == image_kernel):
            raise VerificationError(
                "classgroups.j_kernel",
                f"kernel of j_f mod {self.conductor} differs: direct {direct}, "
                f"units {from_units}, table {image_kernel}",
            )
        return direct

    def project(self, target: "RayClassGroup") -> Dict[ClassVector, ClassVector]:
        """The natural surjection C_f -> C_g for g | f, on exponent vectors."""
        if not ideal_divides(target.conductor, self.conductor):
            raise IdealError(f"{target.conductor} does not divide {self.conductor}")
        return {x: target.dlog(self.rep(x)) for x in self.classes()}

    def order_report(self) -> OrderReport:
        positive = {res for res, sg in self.unit_image if all(v > 0 for v in sg)}
        return OrderReport(
            class_number=self.class_group.order,
            phi=self.ring.unit_count,
            r1=self.field.r1,
            unit_image_order=len(self.unit_image),
            positive_unit_image_order=len(positive),
            structural_order=self.order,
            enumerated_order=len(self.reps),
        )

    def to_dict(self) -> dict:
        return {
            "field": self.field.tag,
            "conductor": list(self.conductor.key),
            "invariant_factors": list(self.invariants),
            "reps": {",".join(map(str, x)): list(self.rep(x).key) for x in self.classes()},
        }

    def __str__(self) -> str:
        return f"C_{self.conductor} of {self.field.tag}: {self.group} (order {self.order})"


def _canonical_cosets(ring: ResidueRing, r1: int, units: FrozenSet[QClass]) -> Dict[QClass, QClass]:
    """Map every (unit residue, sign vector) to the least element of its U-coset."""
    canon: Dict[QClass, QClass] = {}
    for s in ring.units:
        for sg in product((1, -1), repeat=r1):
            if (s, sg) in canon:
                continue
            coset = {(ring.mul(s, u), sign_product(sg, su)) for u, su in units}
            least = min(coset)
            for member in coset:
                canon[member] = least
    return canon


def _model_representatives(K: NumberField, cl: IdealClassGroup, f: IntegralIdeal) -> List[IntegralIdeal]:
    """Norm-minimal ideals per class with norm prime to N(f)."""
    found: Dict[int, IntegralIdeal] = {}
    Nf = f.norm

    def visit(a: IntegralIdeal) -> bool:
        if gcd(a.norm, Nf) == 1:
            i = cl.class_index(a)
            found.setdefault(i, a)
        return len(found) == cl.order

    enumerate_until(K, minkowski_bound(K), visit, "class representatives prime to the conductor")
    return [found[i] for i in range(cl.order)]


@lru_cache(maxsize=None)
def strict_ray_class_group(K: NumberField, f: IntegralIdeal) -> RayClassGroup:
    """
    C_f with the order checked two ways.

    Raises:
        BoundExhaustedError: the enumeration cap was hit before every class was found.
        VerificationError: structural and enumerated orders differ.
    """
    if f.field != K:
        raise IdealError(f"conductor {f} does not belong to {K.tag}")
    cl = class_group(K)
    ring = residue_ring(f)
    units = unit_image(K, f)
    G = RayClassGroup(K, f, cl, ring, units, _model_representatives(K, cl, f))
    G._canon = _canonical_cosets(ring, K.r1, units)

    qs = sorted(set(G._canon.values()))
    elements = [(i, q) for i in range(cl.order) for q in qs]
    identity = (0, G._canonical((ring.one(), (1,) * K.r1)))
    G.structure = structure_from_elements(elements, identity, G._model_mul)
    expected = cl.order * euler_phi(f) * 2 ** K.r1 // len(units)
    if G.order != expected:
        raise VerificationError(
            "classgroups.ray_order",
            f"model of C_{f} has {G.order} elements, exact sequence gives {expected}",
        )

    def visit(a: IntegralIdeal) -> bool:
        if G.is_coprime(a):
            G.reps.setdefault(G.dlog(a), a)
        return len(G.reps) == G.order

    enumerate_until(K, max(minkowski_bound(K), 4 * f.norm), visit, f"ray classes mod {f}")
    report = G.order_report()
    if not report.agrees:
        raise VerificationError(
            "classgroups.ray_order",
            f"structural order {report.structural_order} != enumerated {report.enumerated_order}",
        )
    logger.info("%s", G)
    return G


def ray_dlog(G: RayClassGroup, a: IntegralIdeal) -> ClassVector:
    return G.dlog(a)
