"""A computable left order on the free group via the Magnus embedding.

The free group on A, B embeds into the ring of noncommutative integer power
series by A -> 1 + X, B -> 1 + Y (inverses expand as geometric series).  Two
elements are compared by the first differing coefficient, monomials being
scanned in degree-then-lexicographic order with X < Y.  Because the series of
any group element has constant term 1, left multiplication multiplies a
difference by a unit and cannot disturb its lowest-degree slice, which makes
the order left-invariant.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import OrderingError

# letters: +1 = A, -1 = A^-1, +2 = B, -2 = B^-1
_LETTER_NAMES = {1: "A", -1: "A^-1", 2: "B", -2: "B^-1"}
_NAME_LETTERS = {v: k for k, v in _LETTER_NAMES.items()}

MAGNUS_DEGREE_START = 8
MAGNUS_DEGREE_MAX = 32


def _reduce(letters) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if x not in _LETTER_NAMES:
            raise ValueError(f"invalid letter {x!r}")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class FreeWord:
    """A freely reduced word over {A, A^-1, B, B^-1}."""

    letters: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _reduce(self.letters))

    @classmethod
    def from_blocks(cls, blocks) -> "FreeWord":
        """Build from [(generator, exponent)] with generator in {"A", "B"}."""
        letters: list[int] = []
        for gen, k in blocks:
            base = {"A": 1, "B": 2}[gen]
            letters.extend([base if k > 0 else -base] * abs(k))
        return cls(tuple(letters))

    @classmethod
    def from_str(cls, text: str) -> "FreeWord":
        if not text.strip():
            return cls()
        return cls(tuple(_NAME_LETTERS[tok] for tok in text.split()))

    def __str__(self):
        return " ".join(_LETTER_NAMES[x] for x in self.letters) if self.letters else "e"

    def __len__(self):
        return len(self.letters)

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple(-x for x in reversed(self.letters)))

    @property
    def is_identity(self) -> bool:
        return not self.letters


@dataclass(frozen=True)
class MagnusSeries:
    """Truncated noncommutative integer series, keyed by words in X (0), Y (1)."""

    degree: int
    coeffs: dict  # monomial tuple -> int

    def coefficient(self, monomial: tuple[int, ...]) -> int:
        return self.coeffs.get(monomial, 0)


def _letter_series(letter: int, degree: int) -> dict:
    var = 0 if abs(letter) == 1 else 1
    if letter > 0:
        return {(): 1, (var,): 1}
    # (1 + V)^-1 = sum (-V)^j, exact in the truncated ring
    return {(var,) * j: (-1) ** j for j in range(degree + 1)}


def _multiply(p: dict, q: dict, degree: int) -> dict:
    out: dict = {}
    for m1, c1 in p.items():
        room = degree - len(m1)
        for m2, c2 in q.items():
            if len(m2) > room:
                continue
            key = m1 + m2
            val = out.get(key, 0) + c1 * c2
            if val:
                out[key] = val
            elif key in out:
                del out[key]
    return out


def magnus_series(word: FreeWord, degree: int) -> MagnusSeries:
    """Image of a reduced word under A -> 1+X, B -> 1+Y, truncated at degree."""
    series = {(): 1}
    for letter in word.letters:
        series = _multiply(series, _letter_series(letter, degree), degree)
    return MagnusSeries(degree, series)


def _monomial_key(m: tuple[int, ...]):
    return (len(m), m)  # degree first, then lexicographic with X < Y


def magnus_less(u: FreeWord, v: FreeWord, *, degree_start: int = MAGNUS_DEGREE_START,
                degree_max: int = MAGNUS_DEGREE_MAX) -> bool:
    """Strict left-invariant total order: True iff u < v.

    Escalates the truncation degree on ties; distinct reduced words of total
    length L always separate by degree L, so a tie at degree_max can only
    mean broken input.
    """
    if u.letters == v.letters:
        return False
    degree = degree_start
    while degree <= degree_max:
        su = magnus_series(u, degree).coeffs
        sv = magnus_series(v, degree).coeffs
        keys = sorted(set(su) | set(sv), key=_monomial_key)
        for m in keys:
            cu = su.get(m, 0)
            cv = sv.get(m, 0)
            if cu != cv:
                return cu < cv
        degree *= 2
    raise OrderingError(
        f"Magnus order tie between distinct words {u} and {v} at degree {degree_max}"
    )


def magnus_key():
    """Sort key realizing the Magnus order (for sorted/min/max)."""
    return functools.cmp_to_key(
        lambda u, v: 0 if u.letters == v.letters else (-1 if magnus_less(u, v) else 1)
    )
