"""
Type aliases and enumerations shared by the arithmetic layer.

The NewType aliases document which integers are norms, which tuples are
canonical HNF keys and which tuples are exponent vectors in a finite abelian
group. They cost nothing at runtime and keep signatures readable.
"""
from enum import Enum
from typing import NewType, Tuple

# Integer-valued quantities
Norm = NewType("Norm", int)               # absolute norm of an integral ideal
Discriminant = NewType("Discriminant", int)

# Tuples
HNFKey = Tuple[int, int, int]             # (a, c, d) with d | a, d | c, 0 <= c < a
Pair = Tuple[int, int]                    # integral element x0 + x1*omega
Residue = Tuple[int, int]                 # canonical coset representative mod f
SignVector = Tuple[int, ...]              # +1/-1 per real embedding
ClassVector = Tuple[int, ...]             # exponent vector in a finite abelian group


class FieldKind(Enum):
    """Degree of the number field."""
    RATIONAL = "rational"
    QUADRATIC = "quadratic"


class Splitting(Enum):
    """Decomposition type of a rational prime in a quadratic field."""
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


class SearchOutcome(Enum):
    """Result of a generator search for a fractional ideal."""
    FOUND = "found"
    NOT_PRINCIPAL = "not principal"
    NO_ADMISSIBLE_GENERATOR = "principal but no admissible generator"


def sign_product(u: SignVector, v: SignVector) -> SignVector:
    """Componentwise product of two sign vectors."""
    return tuple(x * y for x, y in zip(u, v))
