"""
Equivariant functions on DR_f and the symmetries of Y_f.

Values of K^ab-valued functions are modelled by the Galois algebra
A_f = Fun(C_f, Q): canonical basis e_delta, C_f acting by translation
(gamma.v)(delta) = v(delta - gamma) and the pointwise product. An
equivariant function is h: DR_f -> A_f with h(gamma.x) = gamma.h(x), where
gamma acts on DR_f by multiplication with the unit element of class gamma.

The module of equivariant functions is computed twice: as the null space of
the equivariance constraints (over Q and over GF(p)) and from the orbit
decomposition, where each orbit O with stabilizer H contributes
dim A^H = |C_f|/|H| = |O| functions.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix

from ..classgroups.classgroups import narrow_class_group
from ..classgroups.rayclass import strict_ray_class_group
from ..exceptions import IdealError
from ..nfield.fields import NumberField
from ..nfield.ideals import IntegralIdeal, is_coprime
from ..nfield.types import ClassVector, Residue
from .checks import Report, check, info
from .drmonoid import DRMonoid, dr_level, y_level
from .tower import get_tower

logger = logging.getLogger(__name__)

# Second scalar field for the rank cross-check
SHADOW_PRIME = 2 ** 31 - 1


# =============================
# Galois action on DR_f
# =============================

def galois_permutations(M: DRMonoid) -> Dict[ClassVector, np.ndarray]:
    """gamma -> permutation x -> u_gamma * x of DR_f."""
    G = strict_ray_class_group(M.field, M.level)
    return {
        g: np.array([M.mul(M.unit_element(g), x) for x in range(M.size)], dtype=np.int64)
        for g in G.classes()
    }


def translation(G, classes: Sequence[ClassVector], gamma: ClassVector) -> np.ndarray:
    """Permutation matrix of v -> gamma.v on Fun(C_f) in the basis `classes`."""
    position = {c: i for i, c in enumerate(classes)}
    T = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for i, delta in enumerate(classes):
        T[position[G.group.add(delta, gamma)], i] = 1
    return T


# =============================
# The module
# =============================

@dataclass
class EquivariantModule:
    """
    Basis of the equivariant functions DR_f -> A_f.

    `basis[k, x, i]` is the coefficient of e_{classes[i]} in h_k(x).
    """
    field: NumberField
    level: IntegralIdeal
    classes: List[ClassVector]
    basis: np.ndarray
    orbits: List[List[int]]
    stabilizers: List[List[ClassVector]]

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    @property
    def points(self) -> int:
        return self.basis.shape[1]

    def value(self, k: int, x: int) -> np.ndarray:
        return self.basis[k, x]

    def evaluation_rank(self, x: int) -> int:
        return _rank(_dense(self.basis[:, x, :]))


def _dense(rows: np.ndarray, domain=QQ) -> DomainMatrix:
    rows = np.atleast_2d(rows)
    return DomainMatrix([[domain(int(v)) for v in row] for row in rows], rows.shape, domain)


def _sparse(entries: Dict[int, Dict[int, int]], shape: Tuple[int, int], domain=QQ) -> DomainMatrix:
    rows = {i: {j: domain(v) for j, v in row.items() if v} for i, row in entries.items()}
    return DomainMatrix({i: r for i, r in rows.items() if r}, shape, domain)


def _rank(matrix: DomainMatrix) -> int:
    if matrix.shape[0] == 0 or matrix.shape[1] == 0:
        return 0
    return matrix.rank()


def constraint_entries(M: DRMonoid) -> Tuple[Dict[int, Dict[int, int]], Tuple[int, int]]:
    """
    Equivariance constraints h(u_g x)(delta) - h(x)(delta - g) = 0 for the
    standard generators g of C_f; variable (x, i) has column x*n + i.
    """
    G = strict_ray_class_group(M.field, M.level)
    classes = G.classes()
    n = len(classes)
    position = {c: i for i, c in enumerate(classes)}
    gens = [tuple(1 if k == j else 0 for k in range(len(G.invariants))) for j in range(len(G.invariants))]
    entries: Dict[int, Dict[int, int]] = {}
    row = 0
    for g in gens:
        g = G.group.reduce(g)
        for x in range(M.size):
            gx = M.mul(M.unit_element(g), x)
            for i, delta in enumerate(classes):
                lhs = gx * n + i
                rhs = x * n + position[G.group.sub(delta, g)]
                if lhs == rhs:
                    continue
                entries[row] = {lhs: 1, rhs: -1}
                row += 1
    return entries, (row, M.size * n)


def brute_force_dimension(M: DRMonoid, domain=QQ) -> int:
    """Dimension of the null space of the equivariance constraints."""
    entries, shape = constraint_entries(M)
    return shape[1] - _rank(_sparse(entries, shape, domain))


def orbit_basis(M: DRMonoid) -> EquivariantModule:
    """h_{O,c}(gamma x_O) = indicator of gamma + c + H_O, zero off O."""
    K, f = M.field, M.level
    G = strict_ray_class_group(K, f)
    classes = G.classes()
    n = len(classes)
    position = {c: i for i, c in enumerate(classes)}
    perms = galois_permutations(M)
    seen = set()
    orbits: List[List[int]] = []
    stabilizers: List[List[ClassVector]] = []
    vectors: List[np.ndarray] = []
    for x0 in range(M.size):
        if x0 in seen:
            continue
        H = [g for g in classes if perms[g][x0] == x0]
        members = sorted({int(perms[g][x0]) for g in classes})
        seen.update(members)
        orbits.append(members)
        stabilizers.append(H)
        cosets: List[frozenset] = []
        for c in classes:
            coset = frozenset(G.group.add(c, h) for h in H)
            if coset not in cosets:
                cosets.append(coset)
        for coset in cosets:
            h = np.zeros((M.size, n), dtype=np.int64)
            for g in classes:
                x = int(perms[g][x0])
                for delta in coset:
                    h[x, position[G.group.add(g, delta)]] = 1
            vectors.append(h)
    basis = np.array(vectors, dtype=np.int64).reshape(len(vectors), M.size, n)
    return EquivariantModule(K, f, classes, basis, orbits, stabilizers)


def equivariant_module(K: NumberField, f: IntegralIdeal) -> EquivariantModule:
    return get_tower(K).get("equivariant", f, lambda: orbit_basis(dr_level(K, f)))


def equivariant_function_module(K: NumberField, f: IntegralIdeal) -> Tuple[EquivariantModule, Report]:
    """Equivariant functions DR_f -> A_f, with dimension, separation, generation and density checks."""
    M = dr_level(K, f)
    E = equivariant_module(K, f)
    G = strict_ray_class_group(K, f)
    n = len(E.classes)
    report = Report(f"equivariant functions {K.tag} f={f}")

    perms = galois_permutations(M)
    bad = None
    for g in E.classes:
        T = translation(G, E.classes, g)
        for k in range(E.dimension):
            # h(g x) = g.h(x) for every x
            if not np.array_equal(E.basis[k][perms[g]], E.basis[k] @ T.T):
                bad = {"gamma": g, "function": k}
                break
        if bad:
            break
    report.add(check("bcalgebra.equivariant.basis", bad is None,
                     f"{E.dimension} orbit functions are equivariant", witness=bad))

    dim_q = brute_force_dimension(M, QQ)
    dim_p = brute_force_dimension(M, GF(SHADOW_PRIME))
    predicted = sum(len(o) for o in E.orbits)
    independent = _rank(_dense(E.basis.reshape(E.dimension, -1)))
    report.add(check(
        "bcalgebra.equivariant.dimension",
        dim_q == dim_p == predicted == E.dimension == independent,
        f"null space {dim_q} over Q, {dim_p} mod p; orbit count {predicted}; "
        f"basis rank {independent} of {E.dimension}",
        witness={"Q": dim_q, "GF(p)": dim_p, "orbits": predicted, "basis": independent},
    ))

    signatures: Dict[Tuple[int, ...], int] = {}
    bad = None
    for x in range(M.size):
        sig = tuple(int(v) for v in E.basis[:, x, :].ravel())
        if sig in signatures:
            bad = (signatures[sig], x)
            break
        signatures[sig] = x
    report.add(check("bcalgebra.equivariant.separation", bad is None,
                     "distinct points are separated by an equivariant function", witness=bad))

    bad = None
    for orbit, H in zip(E.orbits, E.stabilizers):
        for x in orbit:
            expected = n // len(H)
            r = E.evaluation_rank(x)
            fixed = all(
                np.array_equal(E.basis[:, x, :] @ translation(G, E.classes, h).T, E.basis[:, x, :]) for h in H
            )
            if r != expected or not fixed:
                bad = {"point": x, "rank": r, "expected": expected, "fixed": fixed}
                break
        if bad:
            break
    report.add(check("bcalgebra.equivariant.evaluation", bad is None,
                     "evaluation at x maps onto the fixed algebra of its stabilizer",
                     witness=bad))

    # A_f-span: e_delta * h_k, pointwise product in Fun(C_f)
    rows: Dict[int, Dict[int, int]] = {}
    for k in range(E.dimension):
        for i in range(n):
            col = {x * n + i: 1 for x in np.flatnonzero(E.basis[k, :, i])}
            if col:
                rows[len(rows)] = col
    shape = (len(rows), M.size * n)
    span_q = _rank(_sparse(rows, shape, QQ))
    span_p = _rank(_sparse(rows, shape, GF(SHADOW_PRIME)))
    report.add(check("bcalgebra.equivariant.density", span_q == span_p == M.size * n,
                     f"A_f-span has rank {span_q} (mod p {span_p}) of {M.size * n}",
                     witness={"Q": span_q, "GF(p)": span_p}))
    logger.info("equivariant module %s f=%s: dimension %d", K.tag, f, E.dimension)
    return E, report


# =============================
# KMS_infinity evaluation
# =============================

def kms_infinity_evaluation(K: NumberField, f: IntegralIdeal) -> Report:
    """h(nu.omega) = nu.h(omega) for every unit point omega and class nu."""
    M = dr_level(K, f)
    E = equivariant_module(K, f)
    G = strict_ray_class_group(K, f)
    report = Report(f"KMS_inf evaluation {K.tag} f={f}")
    units = M.coprime_indices()
    perms = galois_permutations(M)
    bad = None
    for nu in E.classes:
        T = translation(G, E.classes, nu)
        for omega in units:
            values = E.basis[:, omega, :]
            if not np.array_equal(E.basis[:, perms[nu][omega], :], values @ T.T):
                bad = {"nu": nu, "omega": omega}
                break
        if bad:
            break
    report.add(check("bcalgebra.kms_inf.equivariance", bad is None,
                     f"evaluation at {len(units)} unit points intertwines the C_f actions",
                     witness=bad))
    # states at unit points determine h on the unit orbit
    omega0 = M.identity
    values0 = E.basis[:, omega0, :]
    reconstructed = all(
        np.array_equal(E.basis[:, perms[nu][omega0], :], values0 @ translation(G, E.classes, nu).T)
        for nu in E.classes
    )
    moved = sorted({int(perms[nu][omega0]) for nu in E.classes})
    report.add(check("bcalgebra.kms_inf.pullback", reconstructed and moved == sorted(units),
                     "the translated states phi_omega o nu^{-1} run through all unit points",
                     witness=moved))
    return report


# =============================
# Symmetries of Y_f
# =============================

def _orbit_maps(Y, point_map) -> List[int]:
    return [Y.orbit_of[point_map(Y.orbit_rep(o))] for o in range(len(Y.orbits))]


def star_action(Y, sigma: Residue) -> List[int]:
    """[rho, alpha] -> [rho*sigma, alpha] on orbits."""
    return _orbit_maps(Y, lambda x: (Y.ring.mul(x[0], sigma), x[1]))


def symmetry_compat(K: NumberField, f: IntegralIdeal, s: IntegralIdeal,
                    sigma: Optional[Residue] = None) -> Report:
    """
    ^{s*}h(s.y) = ^gamma h(y) with gamma = c(s) + j_f(sigma).

    The idele is given by its ideal s (prime to f) and a unit residue sigma at
    f; every unit residue is tried when sigma is None. Here
    ^{s*}h([rho, alpha]) = h([rho sigma^{-1}, alpha]) and
    ^gamma h([rho, alpha]) = h([rho, alpha - gamma]).
    """
    if not is_coprime(s, f):
        raise IdealError(f"{s} is not prime to {f}")
    Y = y_level(K, f)
    G = Y.ray_group
    report = Report(f"symmetry compatibility {K.tag} f={f} s={s}")
    sigmas = [Y.ring.reduce(sigma)] if sigma is not None else list(Y.ring.units)
    ideal_move = _orbit_maps(Y, lambda x: Y.act_ideal(s, x))
    size = len(Y.orbits)
    bad = None
    for t in sigmas:
        gamma = G.group.add(G.dlog(s), Y.j_values[t])
        star_inv = star_action(Y, Y.ring.inverse(t))
        galois = _orbit_maps(Y, lambda x: Y.act_galois(G.group.neg(gamma), x))
        # indicator h_k: compare h_k(star_inv(ideal_move(y))) with h_k(galois(y))
        for y in range(size):
            lhs, rhs = star_inv[ideal_move[y]], galois[y]
            if lhs != rhs:
                bad = {"sigma": t, "point": Y.orbit_rep(y), "function": lhs}
                break
        if bad:
            break
    report.add(check("bcalgebra.symmetry.identity", bad is None,
                     f"star and Galois actions agree for {len(sigmas)} residues over {size} points",
                     witness=bad))

    realized = sorted({Y.j_values[t] for t in Y.ring.units})
    bad = None
    for t in Y.ring.units:
        star = star_action(Y, t)
        galois = _orbit_maps(Y, lambda x: Y.act_galois(Y.j_values[t], x))
        if star != galois or sorted(star) != list(range(size)):
            bad = t
            break
    report.add(check("bcalgebra.symmetry.units", bad is None,
                     "a unit residue acts as the Galois symmetry j_f(sigma)", witness=bad))
    h_plus = narrow_class_group(K).order
    report.add(check("bcalgebra.symmetry.all_realized", (len(realized) == G.order) == (h_plus == 1),
                     f"star actions realize {len(realized)} of {G.order} symmetries; h+ = {h_plus}",
                     witness={"realized": len(realized), "order": G.order, "h_plus": h_plus}))

    partial = [r for r in Y.ring.elements() if not Y.ring.is_unit(r) and r != Y.ring.zero()]
    bad = None
    for r in partial:
        if len(set(star_action(Y, r))) == size:
            bad = r
            break
    report.add(check("bcalgebra.symmetry.partial", bad is None,
                     f"{len(partial)} nonzero non-unit residues act by non-surjective endomorphisms",
                     witness=bad))
    report.add(info("bcalgebra.symmetry.realized", "Galois symmetries realized by units",
                    classes=realized))
    return report


__all__ = [
    "EquivariantModule",
    "SHADOW_PRIME",
    "brute_force_dimension",
    "equivariant_function_module",
    "equivariant_module",
    "galois_permutations",
    "kms_infinity_evaluation",
    "orbit_basis",
    "star_action",
    "symmetry_compat",
    "translation",
]
