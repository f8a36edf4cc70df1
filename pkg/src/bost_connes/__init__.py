"""
Bost-Connes - finite-level Deligne-Ribet monoids and Bost-Connes systems in exact arithmetic
"""

__version__ = "1.0.0"
__author__ = "Hugo"

# Core imports
from .nfield import make_field, parse_ideal
from .core.drmonoid import dr_level, triple_agreement
from .core.functor import make_extension
from .ui.config import get_default_config
from . import core
from . import nfield
from . import classgroups

__all__ = [
    "classgroups",
    "core",
    "dr_level",
    "get_default_config",
    "make_extension",
    "make_field",
    "nfield",
    "parse_ideal",
    "triple_agreement",
]
