"""
Finite abelian invariants: class groups, narrow class groups, strict ray
class groups and the generalized Euler totient
"""

from .abelian import FiniteAbelianGroup, GroupStructure, structure_from_elements
from .classgroups import IdealClassGroup, class_group, minkowski_bound, narrow_class_group
from .rayclass import RayClassGroup, ray_dlog, strict_ray_class_group
from .totient import euler_phi, residue_unit_group, verify_totient_identity

__all__ = [
    "FiniteAbelianGroup",
    "GroupStructure",
    "IdealClassGroup",
    "RayClassGroup",
    "class_group",
    "euler_phi",
    "minkowski_bound",
    "narrow_class_group",
    "ray_dlog",
    "residue_unit_group",
    "strict_ray_class_group",
    "structure_from_elements",
    "verify_totient_identity",
]
