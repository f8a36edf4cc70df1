"""
Number fields of degree at most two and their elements.

A field is either Q or Q(sqrt(m)) for a squarefree m != 0, 1. The ring of
integers is Z[omega] with omega = (1 + sqrt(m))/2 when m = 1 mod 4 and
omega = sqrt(m) otherwise; omega is a root of x^2 - t*x + n.

Elements are stored as exact rational coordinates (a, b) meaning a + b*omega.
Integral elements are passed around as plain integer pairs by the hot loops
of the ideal and search modules; FieldElement wraps them for the public API.

References:
- H. Cohen, A Course in Computational Algebraic Number Theory, ch. 5
- Real-embedding signs are decided exactly by comparing u^2 with v^2*m
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

from sympy import factorint

from ..exceptions import FieldError
from .types import Discriminant, FieldKind, Pair, SignVector

logger = logging.getLogger(__name__)

# =============================
# Field Construction
# =============================

RATIONAL_TAGS = ("Q", "q", "rational", "0")


@dataclass(frozen=True)
class NumberField:
    """Q or a quadratic field Q(sqrt(m))."""
    kind: FieldKind
    m: int                      # 0 for Q
    discriminant: Discriminant
    signature: Tuple[int, int]  # (r1, r2)
    omega_trace: int            # t in x^2 - t*x + n
    omega_norm: int             # n in x^2 - t*x + n

    @property
    def degree(self) -> int:
        return 1 if self.kind is FieldKind.RATIONAL else 2

    @property
    def r1(self) -> int:
        return self.signature[0]

    @property
    def is_rational(self) -> bool:
        return self.kind is FieldKind.RATIONAL

    @property
    def is_real_quadratic(self) -> bool:
        return self.kind is FieldKind.QUADRATIC and self.m > 0

    @property
    def is_imaginary(self) -> bool:
        return self.kind is FieldKind.QUADRATIC and self.m < 0

    @property
    def tag(self) -> str:
        return "Q" if self.is_rational else f"Q(sqrt({self.m}))"

    def __str__(self) -> str:
        return self.tag

    def one(self) -> "FieldElement":
        return FieldElement(self, Fraction(1), Fraction(0))

    def element(self, a, b=0) -> "FieldElement":
        return FieldElement(self, Fraction(a), Fraction(b))


def make_field(spec: Union[int, str, None]) -> NumberField:
    """
    Build Q or Q(sqrt(m)).

    Args:
        spec: None or one of RATIONAL_TAGS for Q, otherwise the squarefree
            integer m (as int or decimal string).

    Returns:
        Populated NumberField.

    Raises:
        FieldError: m is 0, 1 or not squarefree.
    """
    if spec is None or (isinstance(spec, str) and spec.strip() in RATIONAL_TAGS):
        return NumberField(FieldKind.RATIONAL, 0, Discriminant(1), (1, 0), 0, 0)
    try:
        m = int(spec)
    except (TypeError, ValueError):
        raise FieldError(f"Cannot parse field spec {spec!r}; expected 'Q' or an integer m.")
    if m in (0, 1):
        raise FieldError(f"m = {m} is degenerate; use 'Q' for the rational field.")
    if any(e > 1 for e in factorint(abs(m)).values()):
        raise FieldError(f"m = {m} is not squarefree.")
    if m % 4 == 1:
        t, n, disc = 1, (1 - m) // 4, m
    else:
        t, n, disc = 0, -m, 4 * m
    signature = (2, 0) if m > 0 else (0, 1)
    field = NumberField(FieldKind.QUADRATIC, m, Discriminant(disc), signature, t, n)
    logger.debug("Built %s: disc=%d, signature=%s", field.tag, disc, signature)
    return field


# =============================
# Integer-pair arithmetic
# =============================

def pair_mul(K: NumberField, x: Pair, y: Pair) -> Pair:
    """(x0 + x1 w)(y0 + y1 w) using w^2 = t w - n."""
    if K.is_rational:
        return (x[0] * y[0], 0)
    t, n = K.omega_trace, K.omega_norm
    return (x[0] * y[0] - n * x[1] * y[1],
            x[0] * y[1] + x[1] * y[0] + t * x[1] * y[1])


def pair_norm(K: NumberField, x: Pair) -> int:
    if K.is_rational:
        return x[0]
    return x[0] * x[0] + K.omega_trace * x[0] * x[1] + K.omega_norm * x[1] * x[1]


def pair_conj(K: NumberField, x: Pair) -> Pair:
    if K.is_rational:
        return x
    return (x[0] + K.omega_trace * x[1], -x[1])


def _sign_surd(p, q, m: int) -> int:
    """Sign of p + q*sqrt(m) for m > 0 not a square, p and q rational."""
    if q == 0:
        return (p > 0) - (p < 0)
    if p == 0:
        return (q > 0) - (q < 0)
    if (p > 0) == (q > 0):
        return 1 if p > 0 else -1
    if p * p > q * q * m:
        return 1 if p > 0 else -1
    return 1 if q > 0 else -1


def coordinate_signs(K: NumberField, a, b) -> SignVector:
    """Signs of a + b*omega under the real embeddings (sqrt(m) > 0 first)."""
    if K.is_rational:
        if a == 0:
            return (0,)
        return (1 if a > 0 else -1,)
    if K.is_imaginary:
        return ()
    # a + b w = u + v sqrt(m), scaled by 2 to stay integral
    p = 2 * a + K.omega_trace * b
    q = b if K.omega_trace else 2 * b
    return (_sign_surd(p, q, K.m), _sign_surd(p, -q, K.m))


def pair_signs(K: NumberField, x: Pair) -> SignVector:
    return coordinate_signs(K, x[0], x[1])


def is_totally_positive_pair(K: NumberField, x: Pair) -> bool:
    return all(s > 0 for s in pair_signs(K, x)) and x != (0, 0)


# =============================
# Field elements
# =============================

@dataclass(frozen=True)
class FieldElement:
    """a + b*omega with exact rational coordinates."""
    field: NumberField
    a: Fraction
    b: Fraction = Fraction(0)

    @classmethod
    def from_pair(cls, K: NumberField, x: Pair, denominator: int = 1) -> "FieldElement":
        return cls(K, Fraction(x[0], denominator), Fraction(x[1], denominator))

    def _check(self, other: "FieldElement") -> None:
        if other.field != self.field:
            raise FieldError(f"Mixed fields: {self.field.tag} and {other.field.tag}")

    def __add__(self, other):
        if not isinstance(other, FieldElement):
            return FieldElement(self.field, self.a + Fraction(other), self.b)
        self._check(other)
        return FieldElement(self.field, self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        if not isinstance(other, FieldElement):
            return FieldElement(self.field, self.a - Fraction(other), self.b)
        self._check(other)
        return FieldElement(self.field, self.a - other.a, self.b - other.b)

    def __neg__(self):
        return FieldElement(self.field, -self.a, -self.b)

    def __mul__(self, other):
        if not isinstance(other, FieldElement):
            c = Fraction(other)
            return FieldElement(self.field, self.a * c, self.b * c)
        self._check(other)
        K = self.field
        if K.is_rational:
            return FieldElement(K, self.a * other.a, Fraction(0))
        t, n = K.omega_trace, K.omega_norm
        return FieldElement(
            K,
            self.a * other.a - n * self.b * other.b,
            self.a * other.b + self.b * other.a + t * self.b * other.b,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, FieldElement):
            c = Fraction(other)
            return FieldElement(self.field, self.a / c, self.b / c)
        nrm = other.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero element")
        return (self * other.conj()) / nrm

    def conj(self) -> "FieldElement":
        K = self.field
        if K.is_rational:
            return self
        return FieldElement(K, self.a + K.omega_trace * self.b, -self.b)

    def norm(self) -> Fraction:
        K = self.field
        if K.is_rational:
            return self.a
        return self.a * self.a + K.omega_trace * self.a * self.b + K.omega_norm * self.b * self.b

    def trace(self) -> Fraction:
        K = self.field
        if K.is_rational:
            return self.a
        return 2 * self.a + K.omega_trace * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def as_pair(self) -> Pair:
        if not self.is_integral():
            raise FieldError(f"{self} is not integral")
        return (int(self.a), int(self.b))

    def signs(self) -> SignVector:
        return coordinate_signs(self.field, self.a, self.b)

    def is_totally_positive(self) -> bool:
        return not self.is_zero() and all(s > 0 for s in self.signs())

    def __str__(self) -> str:
        K = self.field
        if K.is_rational:
            return str(self.a)
        # rewrite in the sqrt(m) basis
        u = self.a + self.b * Fraction(K.omega_trace, 2)
        v = self.b / 2 if K.omega_trace else self.b
        root = "i" if K.m == -1 else f"sqrt({K.m})"
        if v == 0:
            return str(u)
        coef = "" if abs(v) == 1 else f"{abs(v)}*"
        head = "" if u == 0 else str(u)
        sign = "-" if v < 0 else ("+" if head else "")
        return f"{head}{sign}{coef}{root}"
