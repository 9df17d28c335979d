"""PSL(2,Z) and its free index-6 congruence subgroup: enumeration, reduction,
stabilizers, orbit sampling and the ping-pong decomposition used to order the
subgroup.

Enumeration budgets come in two flavours.  A word-length budget is served by
breadth-first search over the generators and their inverses.  An entry budget
(sup-norm bound N) is served by direct arithmetic enumeration of all integer
rows (c, d) with the determinant equation solved for (a, b), which is complete
with respect to the bound by construction; Poincare sums and density radii
certify their coverage against this bound.  When both budgets are given, word
lengths are graph distances inside the entry ball.
"""

from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BudgetError, ModelError
from .moebius import (
    DISC,
    GAMMA2_A,
    GAMMA2_B,
    HALF_PLANE,
    IDENTITY,
    S,
    T,
    GroupElement,
    Point,
    _apply_half_plane,
    apply_moebius,
    cayley_inv,
    half_plane_point,
)
from .ordering import FreeWord

ELLIPTIC_I = 1j
ELLIPTIC_RHO = cmath.exp(1j * math.pi / 3)  # order-3 elliptic point
ELLIPTIC_RHO2 = cmath.exp(2j * math.pi / 3)  # its T^-1 translate


@dataclass(frozen=True)
class GroupPreset:
    """A realized Fuchsian group: generators, covolume, elliptic data."""

    name: str
    generators: tuple[GroupElement, ...]
    bfs_generators: tuple[GroupElement, ...]  # generators plus inverses, deduped
    covolume_over_pi: Fraction
    elliptic: tuple[tuple[complex, int], ...]  # (representative point, stabilizer order)

    @property
    def covolume(self) -> float:
        return float(self.covolume_over_pi) * math.pi

    def contains(self, g: GroupElement) -> bool:
        if self.name == "Gamma2":
            return g.in_gamma2()
        return True


PSL2Z = GroupPreset(
    name="PSL2Z",
    generators=(S, T),
    bfs_generators=(S, T, T.inverse()),
    covolume_over_pi=Fraction(1, 3),
    elliptic=((ELLIPTIC_I, 2), (ELLIPTIC_RHO, 3)),
)

GAMMA2 = GroupPreset(
    name="Gamma2",
    generators=(GAMMA2_A, GAMMA2_B),
    bfs_generators=(GAMMA2_A, GAMMA2_A.inverse(), GAMMA2_B, GAMMA2_B.inverse()),
    covolume_over_pi=Fraction(2),
    elliptic=(),
)

_PRESETS = {"PSL2Z": PSL2Z, "pslz": PSL2Z, "Gamma2": GAMMA2, "gamma2": GAMMA2}


def get_preset(name: str) -> GroupPreset:
    try:
        return _PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; use PSL2Z or Gamma2") from None


@dataclass(frozen=True)
class Budget:
    """Enumeration budget: word length and/or matrix sup-norm, plus a hard cap."""

    max_word_len: int | None = None
    max_entry: int | None = None
    max_count: int = 2_000_000

    def __post_init__(self):
        if self.max_word_len is None and self.max_entry is None:
            raise ValueError("budget needs max_word_len and/or max_entry")
        for v in (self.max_word_len, self.max_entry):
            if v is not None and v < 0:
                raise ValueError("budgets must be >= 0")

    def describe(self) -> dict:
        return {
            "max_word_len": self.max_word_len,
            "max_entry": self.max_entry,
            "max_count": self.max_count,
        }


def _sort_canonical(elements) -> list[GroupElement]:
    return sorted(elements, key=lambda g: (g.sup_norm, g.a, g.b, g.c, g.d))


def _bfs_enumerate(preset: GroupPreset, max_word_len: int, max_count):
    seen = {IDENTITY.matrix: IDENTITY}
    frontier = deque([IDENTITY])
    for _ in range(max_word_len):
        next_frontier = deque()
        while frontier:
            g = frontier.popleft()
            for gen in preset.bfs_generators:
                h = g * gen
                if h.matrix not in seen:
                    if len(seen) >= max_count:
                        raise BudgetError(
                            f"enumeration exceeded max_count={max_count}"
                        )
                    seen[h.matrix] = h
                    next_frontier.append(h)
        frontier = next_frontier
    return list(seen.values())


def _ball_rows(n: int, gamma2: bool):
    """All canonical-sign bottom rows (c, d): c >= 0, gcd = 1, entries <= n."""
    if gamma2:
        cs = range(0, n + 1, 2)
    else:
        cs = range(0, n + 1)
    for c in cs:
        if c == 0:
            yield 0, 1
            continue
        for d in range(-n, n + 1):
            if gamma2 and d % 2 == 0:
                continue
            if c == 0 and d <= 0:
                continue
            if math.gcd(c, d) == 1:
                yield c, d


def _ball_enumerate(preset: GroupPreset, max_entry: int, max_count: int):
    """Every canonical element with sup-norm <= max_entry (complete)."""
    gamma2 = preset.name == "Gamma2"
    n = max_entry
    out = []
    for c, d in _ball_rows(n, gamma2):
        if c == 0:
            # top row (1, b): b any (even for Gamma2)
            step = 2 if gamma2 else 1
            for b in range(-n, n + 1):
                if b % step:
                    continue
                out.append(GroupElement(1, b, 0, 1))
                if len(out) > max_count:
                    raise BudgetError(f"enumeration exceeded max_count={max_count}")
            continue
        # solve a*d - b*c = 1; general solution (a0 + t*c, b0 + t*d)
        g, x, y = _ext_gcd(d, -c)
        a0, b0 = x, y  # a0*d - b0*c = 1
        # intersect |a| <= n with |b| <= n over integer t
        t_lo = math.ceil((-n - a0) / c)
        t_hi = math.floor((n - a0) / c)
        if d > 0:
            t_lo = max(t_lo, math.ceil((-n - b0) / d))
            t_hi = min(t_hi, math.floor((n - b0) / d))
        elif d < 0:
            t_lo = max(t_lo, math.ceil((n - b0) / d))
            t_hi = min(t_hi, math.floor((-n - b0) / d))
        t0 = t_lo
        step = 1
        if gamma2:
            # a = a0 + t*c stays odd (c even, a0 odd); b = b0 + t*d needs
            # matching parity, d odd, so t runs with stride 2
            if (b0 + t0 * d) % 2 != 0:
                t0 += 1
            step = 2
        for t in range(t0, t_hi + 1, step):
            a = a0 + t * c
            b = b0 + t * d
            if abs(b) > n:  # d == 0 leaves b unconstrained above
                continue
            out.append(GroupElement(a, b, c, d))
            if len(out) > max_count:
                raise BudgetError(f"enumeration exceeded max_count={max_count}")
    return out


def _ext_gcd(p: int, q: int):
    """(g, x, y) with x*p + y*q = g = gcd(p, q)."""
    old_r, r = p, q
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_x, x = x, old_x - quot * x
        old_y, y = y, old_y - quot * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def _graph_distance_filter(elements, preset, max_word_len, max_count):
    """BFS inside the entry ball; keeps elements within graph distance."""
    index = {g.matrix: g for g in elements}
    dist = {IDENTITY.matrix: 0}
    words = {IDENTITY.matrix: ()}
    frontier = deque([IDENTITY])
    while frontier:
        g = frontier.popleft()
        d = dist[g.matrix]
        if d >= max_word_len:
            continue
        for gen in preset.bfs_generators:
            h = g * gen
            if h.matrix in index and h.matrix not in dist:
                dist[h.matrix] = d + 1
                words[h.matrix] = words[g.matrix] + gen.word
                frontier.append(h)
    kept = []
    for key, d in dist.items():
        g = index.get(key, IDENTITY)
        kept.append(GroupElement(g.a, g.b, g.c, g.d, word=words[key]))
    return kept


def enumerate_group(
    preset: GroupPreset,
    max_word_len: int | None = None,
    max_entry: int | None = None,
    max_count: int = 2_000_000,
) -> list[GroupElement]:
    """Enumerate group elements within the budget, canonical order.

    Contains the identity and is closed under inverse within the budget.
    Output order: (sup-norm, a, b, c, d).
    """
    Budget(max_word_len, max_entry, max_count)  # validate
    if max_entry is None:
        found = _bfs_enumerate(preset, max_word_len, max_count)
    else:
        found = _ball_enumerate(preset, max_entry, max_count)
        if max_word_len is not None:
            found = _graph_distance_filter(found, preset, max_word_len, max_count)
    return _sort_canonical(found)


_REDUCE_MAX_ITER = 20_000
_T_INV = T.inverse()


def reduce_blocks(z: complex) -> tuple[complex, GroupElement, list[tuple[str, int]]]:
    """Word-free reduction core: returns (z0, g, blocks) with g(z) = z0.

    Blocks are ("T", k) or ("S", 1) in application order, so the matrix
    product runs right to left: g = B_m ... B_1.  Block form keeps huge
    translation runs O(1), which matters when callers reduce points with
    very small imaginary part.
    """
    g = IDENTITY
    cur = complex(z)
    if cur.imag <= 0:
        raise ModelError("reduction needs Im(z) > 0")
    blocks: list[tuple[str, int]] = []
    for _ in range(_REDUCE_MAX_ITER):
        n = round(cur.real)
        if n:
            mat = GroupElement(1, -n, 0, 1)  # T^-n without an expanded word
            g = mat * g
            blocks.append(("T", -n))
            cur = cur - n
        if abs(cur) < 1.0 - 1e-15:
            g = S * g
            blocks.append(("S", 1))
            cur = -1 / cur
        else:
            break
    else:
        raise RuntimeError("fundamental-domain reduction did not terminate")
    cur = _apply_half_plane(g, complex(z))
    return cur, g, blocks


def reduce_to_fundamental_domain(z: Point) -> tuple[Point, GroupElement]:
    """Move z into the standard domain |Re| <= 1/2, |z| >= 1; returns (z0, g)
    with g(z) = z0."""
    if z.model != HALF_PLANE:
        raise ModelError("reduction needs a half-plane point")
    _, g, blocks = reduce_blocks(z.value)
    word: list[str] = []
    for kind, k in blocks:
        if kind == "S":
            word.append("S")
        else:
            word.extend(["T" if k > 0 else "T^-1"] * abs(k))
    g = GroupElement(g.a, g.b, g.c, g.d, word=tuple(word))
    return apply_moebius(g, z), g


def stabilizer_order(preset: GroupPreset, z: Point) -> int:
    """Order of the stabilizer of z: 2 at i, 3 at the orbit of e^{i pi/3}
    (PSL2Z); always 1 for the free subgroup."""
    if z.model != HALF_PLANE:
        raise ModelError("stabilizer_order needs a half-plane point")
    if preset.name == "Gamma2":
        return 1
    z0, _ = reduce_to_fundamental_domain(z)
    v = z0.value
    if abs(v - ELLIPTIC_I) < 1e-9:
        return 2
    if abs(v - ELLIPTIC_RHO) < 1e-9 or abs(v - ELLIPTIC_RHO2) < 1e-9:
        return 3
    return 1


@dataclass(frozen=True)
class OrbitEntry:
    element: GroupElement
    image: Point
    jfactor_sq: float  # |c z + d|^2 at the (half-plane) base


@dataclass(frozen=True)
class OrbitSample:
    """Deduplicated orbit of a base point, with automorphy data."""

    preset_name: str
    base: Point
    entries: tuple[OrbitEntry, ...]
    budget: Budget
    stabilizer_order: int

    def images(self):
        return [e.image.value for e in self.entries]

    def csv_header(self):
        return ["a", "b", "c", "d", "re_image", "im_image", "jfactor_sq"]

    def csv_rows(self):
        return [
            [e.element.a, e.element.b, e.element.c, e.element.d,
             e.image.value.real, e.image.value.imag, e.jfactor_sq]
            for e in self.entries
        ]

    def to_json_dict(self):
        return {
            "preset": self.preset_name,
            "base": [self.base.value.real, self.base.value.imag],
            "model": self.base.model,
            "stabilizer_order": self.stabilizer_order,
            "budget": self.budget.describe(),
            "entries": [
                {
                    "matrix": list(e.element.matrix),
                    "image": [e.image.value.real, e.image.value.imag],
                    "jfactor_sq": e.jfactor_sq,
                }
                for e in self.entries
            ],
        }


_DEDUP_TOL = 1e-10


class _PointDedup:
    """Spatial hash at the dedup tolerance with neighbor-cell checks."""

    def __init__(self, tol=_DEDUP_TOL):
        self.tol = tol
        self.cells: dict = {}

    def find(self, w: complex):
        ci = round(w.real / self.tol)
        cj = round(w.imag / self.tol)
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                hit = self.cells.get((ci + di, cj + dj))
                if hit is not None and abs(hit[0] - w) <= self.tol:
                    return hit
        return None

    def insert(self, w: complex, payload):
        ci = round(w.real / self.tol)
        cj = round(w.imag / self.tol)
        self.cells[(ci, cj)] = (w, payload)


def orbit_sample(
    preset: GroupPreset,
    z: Point,
    max_word_len: int | None = None,
    max_entry: int | None = None,
    max_count: int = 2_000_000,
) -> OrbitSample:
    """Enumerate the orbit of z within budget; images deduplicated.

    The stabilizer order is read off as the multiplicity of the base point
    among the enumerated images.
    """
    elements = enumerate_group(preset, max_word_len, max_entry, max_count)
    base_half = z if z.model == HALF_PLANE else half_plane_point(cayley_inv(z.value))
    dedup = _PointDedup()
    entries = []
    multiplicity: dict = {}
    for g in elements:  # canonical order makes the kept representative stable
        image = apply_moebius(g, z)
        hit = dedup.find(image.value)
        if hit is None:
            jsq = abs(g.c * base_half.value + g.d) ** 2
            dedup.insert(image.value, len(entries))
            multiplicity[len(entries)] = 1
            entries.append(OrbitEntry(g, image, jsq))
        else:
            multiplicity[hit[1]] += 1
    base_idx = dedup.find(z.value)
    stab = multiplicity[base_idx[1]] if base_idx is not None else 1
    return OrbitSample(
        preset_name=preset.name,
        base=z,
        entries=tuple(entries),
        budget=Budget(max_word_len, max_entry, max_count),
        stabilizer_order=stab,
    )


def gamma2_decompose(g: GroupElement) -> FreeWord:
    """Unique reduced word in the free generators A = (1,2;0,1), B = (1,0;2,1).

    Greedy ping-pong norm descent on the first column; exact integers, exact
    round trip.
    """
    if not g.in_gamma2():
        raise ValueError(f"{g!r} is not congruent to the identity mod 2")
    a, b, c, d = g.matrix
    blocks: list[tuple[str, int]] = []
    while True:
        if c == 0:
            if a < 0:  # normalize the sign representative
                a, b, d = -a, -b, -d
            if b:
                blocks.append(("A", b // 2))
            break
        if abs(a) > abs(c):
            # peel A^k from the left: parity (a odd, c even) makes the
            # nearest-integer reduction strict
            k = round(Fraction(a, 2 * c))
            blocks.append(("A", k))
            a, b = a - 2 * k * c, b - 2 * k * d
        else:
            k = round(Fraction(c, 2 * a))
            blocks.append(("B", k))
            c, d = c - 2 * k * a, d - 2 * k * b
    return FreeWord.from_blocks(blocks)


def word_to_element(word: FreeWord) -> GroupElement:
    """Multiply a free word out to a matrix."""
    lookup = {
        1: GAMMA2_A,
        -1: GAMMA2_A.inverse(),
        2: GAMMA2_B,
        -2: GAMMA2_B.inverse(),
    }
    g = IDENTITY
    for letter in word.letters:
        g = g * lookup[letter]
    return g
