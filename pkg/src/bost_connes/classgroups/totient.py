"""
Generalized Euler totient of an ideal and the divisor-sum identity.

phi_K(P^k) = N(P)^(k-1) * (N(P) - 1) on prime powers, extended
multiplicatively. When N(f) is small enough the local formula is
cross-checked against an exhaustive unit count in O_K/f.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import pandas as pd

from ..exceptions import VerificationError
from ..nfield.ideals import IntegralIdeal, divisors, factor_ideal
from ..nfield.residues import ResidueRing, residue_ring
from .abelian import GroupStructure, structure_from_elements

logger = logging.getLogger(__name__)

# Residue rings up to this size are enumerated to cross-check the formula
ENUMERATION_LIMIT = 10 ** 4


def euler_phi(f: IntegralIdeal) -> int:
    """|(O_K/f)^x| from the local formula."""
    phi = 1
    for P, k in factor_ideal(f):
        q = P.norm
        phi *= q ** (k - 1) * (q - 1)
    if f.norm <= ENUMERATION_LIMIT:
        counted = residue_ring(f).unit_count
        if counted != phi:
            raise VerificationError(
                "classgroups.euler_phi",
                f"local formula gives {phi} but {counted} units were enumerated mod {f}",
                witness={"conductor": f.key},
            )
    return phi


def residue_unit_group(ring: ResidueRing) -> GroupStructure:
    """Invariant-factor structure of (O_K/f)^x."""
    return structure_from_elements(list(ring.units), ring.one(), ring.mul)


@dataclass
class TotientReport:
    conductor: IntegralIdeal
    rows: List[Tuple[IntegralIdeal, int]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(phi for _, phi in self.rows)

    @property
    def holds(self) -> bool:
        return self.total == self.conductor.norm

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"divisor": str(d), "norm": d.norm, "phi": phi} for d, phi in self.rows]
        )


def verify_totient_identity(f: IntegralIdeal) -> TotientReport:
    """
    Sum of phi_K(d) over d | f equals N(f).

    Raises:
        VerificationError: the identity fails (it is a theorem).
    """
    report = TotientReport(f, [(d, euler_phi(d)) for d in divisors(f)])
    if not report.holds:
        raise VerificationError(
            "classgroups.totient_identity",
            f"sum of phi over divisors of {f} is {report.total}, expected {f.norm}",
            witness=[(d.key, phi) for d, phi in report.rows],
        )
    logger.debug("totient identity for %s: %d divisors, total %d", f, len(report.rows), report.total)
    return report
