"""Moebius geometry of the half-plane and disc with branched automorphy factors.

Integer matrices (a, b; c, d) with ad - bc = 1, taken modulo sign, act on the
upper half-plane by z -> (az + b)/(cz + d) and on the unit disc by Cayley
conjugation.  The automorphy factor j(g, z) = cz + d is raised to an arbitrary
real power s through an explicit holomorphic branch of log(cz + d); the
resulting family g -> (cz+d)^s satisfies the cocycle law only up to a
unit-modulus constant (the cocycle defect), which is what makes the weight-s
action projective for non-even s.

Branch rule (closed form, no quadrature): for the canonical sign
representative, c > 0 forces cz + d into the open upper half-plane and c < 0
into the open lower half-plane, so the principal logarithm is holomorphic
there; c = 0 leaves the real number d > 0 with its real logarithm.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import BoundaryPointError, ModelError

HALF_PLANE = "half-plane"
DISC = "disc"

# points closer to the boundary than this are rejected as boundary points
BOUNDARY_TOL = 1e-14

_INVERSE_SUFFIX = "^-1"


def invert_token(token: str) -> str:
    """Invert a generator token, e.g. "T" <-> "T^-1" (self-inverse "S" stays)."""
    if token == "S":
        return "S"  # S has order 2 in PSL(2,Z)
    if token.endswith(_INVERSE_SUFFIX):
        return token[: -len(_INVERSE_SUFFIX)]
    return token + _INVERSE_SUFFIX


@dataclass(frozen=True)
class GroupElement:
    """A determinant-1 integer matrix modulo sign, with an optional word.

    The canonical sign representative has c > 0, or c = 0 and d > 0.  The
    word, when nonempty, is a sequence of generator tokens multiplying out to
    plus or minus the stored matrix; it is ignored by equality and hashing.
    """

    a: int
    b: int
    c: int
    d: int
    word: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        if det != 1:
            raise ValueError(f"determinant must be 1, got {det}")
        if self.c < 0 or (self.c == 0 and self.d < 0):
            object.__setattr__(self, "a", -self.a)
            object.__setattr__(self, "b", -self.b)
            object.__setattr__(self, "c", -self.c)
            object.__setattr__(self, "d", -self.d)

    @property
    def matrix(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def sup_norm(self) -> int:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    @property
    def is_identity(self) -> bool:
        return self.matrix == (1, 0, 0, 1)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            word=self.word + other.word,
        )

    def inverse(self) -> "GroupElement":
        word = tuple(invert_token(t) for t in reversed(self.word))
        return GroupElement(self.d, -self.b, -self.c, self.a, word=word)

    def __pow__(self, n: int) -> "GroupElement":
        if n < 0:
            return self.inverse() ** (-n)
        result = IDENTITY
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def in_gamma2(self) -> bool:
        """True iff the matrix is congruent to the identity mod 2."""
        return (
            self.a % 2 == 1
            and self.d % 2 == 1
            and self.b % 2 == 0
            and self.c % 2 == 0
        )

    def __repr__(self):
        w = f", word={'.'.join(self.word)}" if self.word else ""
        return f"GroupElement({self.a},{self.b};{self.c},{self.d}{w})"


IDENTITY = GroupElement(1, 0, 0, 1)
S = GroupElement(0, -1, 1, 0, word=("S",))
T = GroupElement(1, 1, 0, 1, word=("T",))
# free generators of the level-2 congruence subgroup (Sanov)
GAMMA2_A = GroupElement(1, 2, 0, 1, word=("A",))
GAMMA2_B = GroupElement(1, 0, 2, 1, word=("B",))


@dataclass(frozen=True)
class Point:
    """A point of the upper half-plane or of the open unit disc."""

    value: complex
    model: str

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if self.model == HALF_PLANE:
            if self.value.imag < BOUNDARY_TOL:
                raise BoundaryPointError(
                    f"half-plane point needs Im(z) >= {BOUNDARY_TOL}, got {self.value}"
                )
        elif self.model == DISC:
            if abs(self.value) > 1.0 - BOUNDARY_TOL:
                raise BoundaryPointError(
                    f"disc point needs |w| <= 1 - {BOUNDARY_TOL}, got {self.value}"
                )
        else:
            raise ModelError(f"unknown model {self.model!r}")


def half_plane_point(z: complex) -> Point:
    return Point(z, HALF_PLANE)


def disc_point(w: complex) -> Point:
    return Point(w, DISC)


@dataclass(frozen=True)
class BranchValue:
    """log(cz + d) for one group element at one half-plane point."""

    element: GroupElement
    point: Point
    log_value: complex

    @property
    def factor(self) -> complex:
        return cmath.exp(self.log_value)


def cayley(z: complex) -> complex:
    """Half-plane to disc: (z - i)/(z + i)."""
    return (z - 1j) / (z + 1j)


def cayley_inv(w: complex) -> complex:
    """Disc to half-plane: (w + 1)/(i(w - 1))."""
    return (w + 1) / (1j * (w - 1))


def _apply_half_plane(g: GroupElement, z: complex) -> complex:
    return (g.a * z + g.b) / (g.c * z + g.d)


def apply_moebius(g: GroupElement, z: Point) -> Point:
    """Apply g to a point, in the point's own model.

    The disc action is the Cayley conjugate of the half-plane action.
    """
    if z.model == HALF_PLANE:
        return Point(_apply_half_plane(g, z.value), HALF_PLANE)
    return Point(cayley(_apply_half_plane(g, cayley_inv(z.value))), DISC)


def imag_factor(g: GroupElement, z: Point) -> float:
    """Im(g(z)) computed as Im(z)/|cz + d|^2."""
    if z.model != HALF_PLANE:
        raise ModelError("imag_factor needs a half-plane point")
    return z.value.imag / abs(g.c * z.value + g.d) ** 2


def to_disc(z: Point) -> Point:
    if z.model != HALF_PLANE:
        raise ModelError("to_disc needs a half-plane point")
    return Point(cayley(z.value), DISC)


def to_half_plane(w: Point) -> Point:
    if w.model != DISC:
        raise ModelError("to_half_plane needs a disc point")
    return Point(cayley_inv(w.value), HALF_PLANE)


def branch_log_value(g: GroupElement, z: complex) -> complex:
    """log(cz + d) under the explicit holomorphic branch rule (raw complex)."""
    if g.c != 0:
        # c > 0 puts cz+d in the open upper half-plane, c < 0 in the open
        # lower one; either way the principal log is holomorphic there.
        return cmath.log(g.c * z + g.d)
    return complex(math.log(g.d))


def branch_log(g: GroupElement, z: Point) -> BranchValue:
    if z.model != HALF_PLANE:
        raise ModelError("branch_log needs a half-plane point")
    return BranchValue(g, z, branch_log_value(g, z.value))


def automorphy(g: GroupElement, z: Point, s: float) -> complex:
    """(cz + d)^s = exp(s log(cz + d)) with the branch above."""
    return cmath.exp(s * branch_log(g, z).log_value)


def cocycle_defect(g: GroupElement, h: GroupElement, z: Point, s: float) -> complex:
    """j(gh,z)^s / (j(g,hz)^s j(h,z)^s): unit modulus, constant in z.

    Identically 1 when s is an even integer.
    """
    num = automorphy(g * h, z, s)
    den = automorphy(g, apply_moebius(h, z), s) * automorphy(h, z, s)
    return num / den
