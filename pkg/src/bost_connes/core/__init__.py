"""
Core engine components: DR monoids, the Bost-Connes algebra, KMS states and functoriality
"""

from .checks import Report, Severity, Status, check, set_strict
from .drmonoid import DRMonoid, MonoidMap, dr_level, triple_agreement, y_level
from .bcalgebra import LevelFunction, galois_orbit_structure, verify_relation_suite
from .kms import gibbs_kms_check, partition_check, partition_function, zeta_series
from .functor import ExtensionContext, dr_ver_map, make_extension
from .bimodule import bimodule_build
from . import bcalgebra
from . import bimodule
from . import drmonoid
from . import equivariant
from . import functor
from . import kms
from . import monomials

__all__ = [
    "DRMonoid",
    "ExtensionContext",
    "LevelFunction",
    "MonoidMap",
    "Report",
    "Severity",
    "Status",
    "bcalgebra",
    "bimodule",
    "bimodule_build",
    "check",
    "dr_level",
    "dr_ver_map",
    "drmonoid",
    "equivariant",
    "functor",
    "galois_orbit_structure",
    "gibbs_kms_check",
    "kms",
    "make_extension",
    "monomials",
    "partition_check",
    "partition_function",
    "set_strict",
    "triple_agreement",
    "verify_relation_suite",
    "y_level",
    "zeta_series",
]
