"""Exact q-expansions and evaluation of classical modular forms.

Coefficients are exact integers (or rationals); evaluation happens in double
precision with an explicit geometric tail bound.  The weight-4 and weight-6
Eisenstein series are exposed under their weight-indexed names E4, E6; the
discriminant is the 24th power of the Dedekind eta function, and j = E4^3/Delta.

Tail bounds assume the coefficient envelope |a_n| <= M n^(k+1) with M read off
the computed range; every series constructed here is a polynomial in E4 and
E6, whose weight-k coefficients grow like n^(k-1), so the envelope dominates.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaincc
from scipy.optimize import brentq

from .errors import NonCuspFormError, TailBoundError
from .quadrature import fd_panels

__all__ = [
    "QSeries",
    "VanishingFunction",
    "cusp_sup_invariant",
    "delta_q",
    "eisenstein_q",
    "eta_pow",
    "find_j_preimage",
    "fundamental_domain_grid",
    "j_eval",
    "log_eta",
    "petersson",
    "qseries_eval",
    "rw_function",
    "sigma",
    "space_dims",
]


def sigma(n: int, k: int) -> int:
    """Divisor power sum sigma_k(n), brute force."""
    if n <= 0:
        return 0
    total = 0
    i = 1
    while i * i <= n:
        if n % i == 0:
            total += i ** k
            j = n // i
            if j != i:
                total += j ** k
        i += 1
    return total


@dataclass(frozen=True)
class QSeries:
    """Truncated q-expansion sum a_n q^n with exact coefficients."""

    weight: int
    coeffs: tuple

    def __post_init__(self):
        if self.weight < 0 or self.weight % 2:
            raise ValueError(f"weight must be an even integer >= 0, got {self.weight}")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_cusp_form(self) -> bool:
        return self.coeffs[0] == 0

    def __getitem__(self, n: int):
        return self.coeffs[n]

    def __add__(self, other: "QSeries") -> "QSeries":
        if self.weight != other.weight:
            raise ValueError("can only add q-series of equal weight")
        n = min(self.truncation, other.truncation)
        return QSeries(self.weight, tuple(
            self.coeffs[i] + other.coeffs[i] for i in range(n + 1)
        ))

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self + other.scaled(-1)

    def scaled(self, factor) -> "QSeries":
        if not isinstance(factor, (int, Fraction)):
            raise TypeError("scale by int or Fraction to keep exactness")
        return QSeries(self.weight, tuple(factor * c for c in self.coeffs))

    def __mul__(self, other: "QSeries") -> "QSeries":
        n = min(self.truncation, other.truncation)
        out = [0] * (n + 1)
        for i, ci in enumerate(self.coeffs[: n + 1]):
            if ci == 0:
                continue
            for j in range(0, n + 1 - i):
                cj = other.coeffs[j]
                if cj:
                    out[i + j] += ci * cj
        return QSeries(self.weight + other.weight, tuple(out))

    def __pow__(self, e: int) -> "QSeries":
        if e < 0:
            raise ValueError("only nonnegative powers")
        result = QSeries(0, (1,) + (0,) * self.truncation)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def eval(self, z, *, tail_tol: float | None = None):
        return qseries_eval(self, z, tail_tol=tail_tol)

    def tail_bound(self, im_min: float) -> float:
        """Geometric tail bound at Im(z) >= im_min (envelope n^(weight+1))."""
        p = self.weight + 1
        n = np.arange(1, self.truncation + 1, dtype=float)
        a = np.abs(np.array(self.coeffs[1:], dtype=float))
        m = float(np.max(a / n ** p)) if len(a) else 0.0
        if m == 0.0:
            return 0.0
        x = math.exp(-2.0 * math.pi * im_min)
        grow = x * math.exp(p / (self.truncation + 1.0))
        if grow >= 1.0:
            return math.inf
        return m * (self.truncation + 1.0) ** p * x ** (self.truncation + 1) / (1.0 - grow)


def qseries_eval(F: QSeries, z, *, tail_tol: float | None = None):
    """Evaluate sum a_n q^n at q = exp(2 pi i z), Im(z) > 0 (vectorized).

    With tail_tol set, the geometric tail bound at min Im(z) must meet it.
    """
    zv = np.asarray(z, dtype=complex)
    im_min = float(np.min(zv.imag))
    if im_min <= 0:
        raise ValueError("q-series evaluation needs Im(z) > 0")
    if tail_tol is not None:
        bound = F.tail_bound(im_min)
        if not bound <= tail_tol:
            raise TailBoundError(
                f"tail bound {bound:.3e} exceeds {tail_tol:.3e} at Im={im_min:.3f}, "
                f"truncation {F.truncation}"
            )
    q = np.exp(2j * math.pi * zv)
    out = np.zeros_like(q)
    for c in reversed([float(c) for c in F.coeffs]):
        out = out * q + c
    return out if out.shape else complex(out)


def eisenstein_q(k: int, n_max: int) -> QSeries:
    """E4 = 1 + 240 sum sigma_3(n) q^n or E6 = 1 - 504 sum sigma_5(n) q^n."""
    if k == 4:
        factor, power = 240, 3
    elif k == 6:
        factor, power = -504, 5
    else:
        raise ValueError("eisenstein_q supports weights 4 and 6")
    coeffs = [1] + [factor * sigma(n, power) for n in range(1, n_max + 1)]
    return QSeries(k, tuple(coeffs))


def euler_product(n_max: int) -> tuple:
    """Coefficients of prod (1 - q^n) by the pentagonal number theorem."""
    coeffs = [0] * (n_max + 1)
    coeffs[0] = 1
    m = 1
    while True:
        p1 = m * (3 * m - 1) // 2
        p2 = m * (3 * m + 1) // 2
        if p1 > n_max and p2 > n_max:
            break
        if p1 <= n_max:
            coeffs[p1] = (-1) ** m
        if p2 <= n_max:
            coeffs[p2] = (-1) ** m
        m += 1
    return tuple(coeffs)


def delta_q(n_max: int) -> QSeries:
    """Discriminant q prod (1-q^n)^24, exact integers."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    eta24 = QSeries(0, euler_product(n_max - 1)) ** 24
    return QSeries(12, (0,) + eta24.coeffs[:n_max])


_REDUCE_BELOW = 0.5  # below this height, evaluate via fundamental-domain reduction


def _log_eta_series(zv: np.ndarray, tol: float) -> np.ndarray:
    im_min = float(np.min(zv.imag))
    q_abs = math.exp(-2.0 * math.pi * im_min)
    if q_abs < 1e-300:  # q underflows; the product is 1 to double precision
        n_terms = 1
    else:
        n_terms = max(8, int(math.log(tol * (1.0 - q_abs)) / math.log(q_abs)) + 2)
    q = np.exp(2j * math.pi * zv)
    out = 1j * math.pi * zv / 12.0
    qn = np.ones_like(q)
    for _ in range(n_terms):
        qn = qn * q
        out = out + np.log(1.0 - qn)  # |q^n| < 1 keeps 1 - q^n off the cut
    return out


def _log_eta_reduced(z: complex, tol: float) -> complex:
    """log eta at one point via reduction and the exact unwind identities
    log eta(z + 1) = log eta(z) + i pi/12,
    log eta(-1/z) = log eta(z) + (1/2) Log(-iz)  (principal; -iz has Re > 0).
    """
    from .groups import reduce_blocks  # deferred: groups does not import forms

    z0, _, blocks = reduce_blocks(z)
    val = complex(_log_eta_series(np.asarray(z0, dtype=complex), tol))
    u = z0
    # z = B_1^{-1}(... B_m^{-1}(z0)); walk blocks backwards
    for kind, k in reversed(blocks):
        if kind == "T":
            u = u - k
            val = val - k * 1j * math.pi / 12.0
        else:  # log eta(-1/u) = log eta(u) + Log(-iu)/2, applied at the old u
            val = val + 0.5 * cmath.log(-1j * u)
            u = -1.0 / u
    return val


def log_eta(z, *, tol: float = 1e-16):
    """log eta(z) = pi i z/12 + sum log(1 - q^n): a single-valued holomorphic
    branch on the upper half-plane (vectorized).

    Points with Im(z) below 0.5 are reduced to the fundamental domain first,
    where the series needs only a handful of terms, and the exact
    transformation identities of this branch are unwound; the values agree
    with the direct series wherever both converge.
    """
    zv = np.asarray(z, dtype=complex)
    scalar = zv.ndim == 0
    zz = zv.reshape(-1)
    if float(np.min(zz.imag)) <= 0:
        raise ValueError("log_eta needs Im(z) > 0")
    out = np.empty_like(zz)
    high = zz.imag >= _REDUCE_BELOW
    if np.any(high):
        out[high] = _log_eta_series(zz[high], tol)
    for i in np.nonzero(~high)[0]:
        out[i] = _log_eta_reduced(complex(zz[i]), tol)
    return complex(out[0]) if scalar else out.reshape(zv.shape)


def eta_pow(z, r: float):
    """A single-valued holomorphic branch of eta(z)^r."""
    lz = log_eta(z)
    return np.exp(r * np.asarray(lz)) if np.ndim(z) else complex(np.exp(r * lz))


_J_IM_MAX = 50.0  # Delta underflows double range far beyond this


class _FormCache:
    """Exact expansions keyed by truncation, so results never depend on what
    an earlier call happened to cache."""

    def __init__(self):
        self._store: dict[int, tuple[QSeries, QSeries]] = {}

    def get(self, n_max: int) -> tuple[QSeries, QSeries]:
        """(E4^3, Delta) at exactly this truncation."""
        if n_max not in self._store:
            e4_cubed = eisenstein_q(4, n_max) ** 3
            self._store[n_max] = (e4_cubed, delta_q(n_max))
        return self._store[n_max]


_CACHE = _FormCache()


def j_eval(z, *, n_terms: int = 64):
    """Klein j = E4^3 / Delta (vectorized); rejects Im(z) > 50 (underflow)."""
    zv = np.asarray(z, dtype=complex)
    scalar = zv.ndim == 0
    zz = zv.reshape(1) if scalar else zv
    if float(np.max(zz.imag)) > _J_IM_MAX:
        raise ValueError(f"j_eval limited to Im(z) <= {_J_IM_MAX} (Delta underflow)")
    e4_cubed, delta = _CACHE.get(n_terms)
    out = qseries_eval(e4_cubed, zz) / qseries_eval(delta, zz)
    return complex(out[0]) if scalar else out


def find_j_preimage(w: float, *, bracket: tuple[float, float] = (1.0, 16.0)) -> complex:
    """The point iy on the imaginary axis with j(iy) = w, for real w > 1728.

    j is real and increasing along iy for y >= 1 (j(i) = 1728), so bisection
    applies.
    """
    if w <= 1728:
        raise ValueError("find_j_preimage needs real w > 1728")
    lo, hi = bracket
    y = brentq(lambda t: j_eval(1j * t).real - w, lo, hi, xtol=1e-13)
    return 1j * y


@dataclass(frozen=True)
class VanishingFunction:
    """(j(z) - w) Delta(z) eta(z)^r: vanishes exactly on the orbit j = w.

    |f(z)| Im(z)^(6 + r/4) is invariant, so the sup over a fundamental-domain
    grid certifies the growth bound |f| <= C Im(z)^-(6 + r/4).
    """

    w: complex
    r: float
    n_terms: int = 64

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("r must be positive")

    @property
    def decay_exponent(self) -> float:
        return 6.0 + self.r / 4.0

    def _weight12_part(self, zz: np.ndarray) -> np.ndarray:
        """(j - w) Delta = E4^3 - w Delta, dodging the division by Delta.

        Points below the reduction height are pulled into the fundamental
        domain; the weight-12 modularity F(z) = F(z0) (cz + d)^-12 needs no
        branch bookkeeping.
        """
        from .groups import reduce_blocks

        e4_cubed, delta = _CACHE.get(self.n_terms)
        out = np.empty_like(zz)
        high = zz.imag >= _REDUCE_BELOW
        if np.any(high):
            zh = zz[high]
            out[high] = (
                qseries_eval(e4_cubed, zh) - self.w * qseries_eval(delta, zh)
            )
        for i in np.nonzero(~high)[0]:
            zi = complex(zz[i])
            z0, g, _ = reduce_blocks(zi)
            base = complex(
                qseries_eval(e4_cubed, z0) - self.w * qseries_eval(delta, z0)
            )
            out[i] = base * (g.c * zi + g.d) ** -12
        return out

    def eval(self, z):
        zv = np.asarray(z, dtype=complex)
        scalar = zv.ndim == 0
        zz = zv.reshape(-1)
        out = self._weight12_part(zz) * np.exp(
            self.r * np.asarray(log_eta(zz)).reshape(zz.shape)
        )
        return complex(out[0]) if scalar else out.reshape(zv.shape)

    def growth_certificate(self, nx: int = 40, ny: int = 40, y_max: float = 12.0) -> float:
        """sup over the fundamental-domain grid of |f(z)| Im(z)^(6 + r/4)."""
        zs = fundamental_domain_grid(nx, ny, y_max)
        vals = np.abs(self.eval(zs)) * zs.imag ** self.decay_exponent
        return float(np.max(vals))


def rw_function(w: complex, r: float, *, n_terms: int = 64) -> VanishingFunction:
    """Vanishing-function construction with target j-value w and exponent r."""
    return VanishingFunction(w=complex(w), r=float(r), n_terms=n_terms)


def fundamental_domain_grid(nx: int, ny: int, y_max: float) -> np.ndarray:
    """Points of the standard domain: x uniform, y log-spaced from the arc."""
    xs = np.linspace(-0.5, 0.5, nx)
    pts = []
    for x in xs:
        y0 = math.sqrt(max(1.0 - x * x, 0.0)) + 1e-9
        ys = np.geomspace(y0, y_max, ny)
        pts.append(x + 1j * ys)
    return np.concatenate(pts)


def _cusp_coefficient_envelope(F: QSeries, y_cusp: float) -> float:
    """C with |F(x + iy)| <= C e^{-2 pi y} for y >= y_cusp (cusp forms)."""
    n = np.arange(1, F.truncation + 1)
    a = np.abs(np.array(F.coeffs[1:], dtype=float))
    return float(np.sum(a * np.exp(-2.0 * math.pi * y_cusp * (n - 1))))


def petersson(
    f: QSeries,
    g: QSeries,
    *,
    nx: int = 64,
    ny: int = 48,
    y_cusp: float = 4.0,
    tail_tol: float = 1e-10,
    refine_tol: float | None = None,
) -> complex:
    """Petersson product int_F conj(f) g Im(z)^k dmu_0 over the standard domain.

    Cusp forms only; the y > y_cusp tail is bounded analytically through the
    e^{-2 pi y} envelopes and must come in under tail_tol (relative).
    """
    if f.weight != g.weight:
        raise ValueError("Petersson product needs equal weights")
    if not (f.is_cusp_form and g.is_cusp_form):
        raise NonCuspFormError("Petersson product requires cusp forms (a_0 = 0)")
    k = f.weight

    def compute(nx_, ny_):
        X, Y, W = fd_panels(nx_, ny_, depth=64, y_max=y_cusp)
        zs = X + 1j * Y
        vals = np.conj(qseries_eval(f, zs)) * qseries_eval(g, zs) * Y ** (k - 2.0)
        return complex(np.sum(W * vals))

    def tail_bound(height):
        # |f g| <= C_f C_g e^{-4 pi y} above the height; x-width is 1
        cf = _cusp_coefficient_envelope(f, height)
        cg = _cusp_coefficient_envelope(g, height)
        return cf * cg * float(
            gammaincc(k - 1, 4 * math.pi * height)
        ) * math.gamma(k - 1) / (4 * math.pi) ** (k - 1)

    # escalate the cusp height until the analytic bound meets the relative gate
    value = compute(nx, ny)
    while tail_bound(y_cusp) > tail_tol * max(abs(value), 1e-300):
        y_cusp += 2.0
        if y_cusp > 24.0:
            raise TailBoundError(
                f"cusp tail bound {tail_bound(y_cusp):.3e} still above "
                f"{tail_tol:.1e} of |value| at height {y_cusp}"
            )
        value = compute(nx, ny)
    if refine_tol is not None:
        refined = compute(2 * nx, 2 * ny)
        if abs(refined - value) > refine_tol * max(abs(refined), 1e-300):
            raise TailBoundError(
                f"Petersson refinement moved by {abs(refined - value):.3e} "
                f"(> {refine_tol:.1e} relative)"
            )
        return refined
    return value


def cusp_sup_invariant(F: QSeries, grid: np.ndarray) -> float:
    """sup over the grid of |F(z)| Im(z)^(k/2) (finite for cusp forms)."""
    if not F.is_cusp_form:
        raise NonCuspFormError("cusp_sup_invariant requires a cusp form")
    vals = np.abs(qseries_eval(F, grid)) * grid.imag ** (F.weight / 2.0)
    return float(np.max(vals))


def _exact_rank(rows: list[list]) -> int:
    """Rank over the rationals by fraction-free Gaussian elimination."""
    mat = [[Fraction(v) for v in row] for row in rows]
    rank = 0
    n_cols = len(mat[0]) if mat else 0
    col = 0
    while rank < len(mat) and col < n_cols:
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        for r in range(rank + 1, len(mat)):
            if mat[r][col] != 0:
                factor = mat[r][col] / mat[rank][col]
                mat[r] = [a - factor * b for a, b in zip(mat[r], mat[rank])]
        rank += 1
        col += 1
    return rank


def space_dims(k: int, n_max: int) -> tuple[int, int, list[QSeries]]:
    """(dim M_k, dim S_k, monomial basis E4^a E6^b with 4a + 6b = k).

    Dimensions come from exact ranks of the q-expansion matrix and of its
    cusp (a_0 = 0) subspace.
    """
    if k < 0 or k % 2:
        raise ValueError("weight must be an even integer >= 0")
    monomials = [(a, b) for a in range(k // 4 + 1) for b in range(k // 6 + 1)
                 if 4 * a + 6 * b == k]
    if not monomials:
        return 0, 0, []
    if n_max < len(monomials):
        raise ValueError(
            f"n_max={n_max} too small for an unambiguous rank with "
            f"{len(monomials)} monomials"
        )
    e4 = eisenstein_q(4, n_max)
    e6 = eisenstein_q(6, n_max)
    basis = [(e4 ** a) * (e6 ** b) for a, b in monomials]
    rows = [list(f.coeffs) for f in basis]
    dim_m = _exact_rank(rows)
    # cusp subspace: combinations with vanishing a_0; all monomials have
    # a_0 = 1, so eliminate against the first row
    cusp_rows = [
        [a - b for a, b in zip(row, rows[0])] for row in rows[1:]
    ]
    dim_s = _exact_rank(cusp_rows) if cusp_rows else 0
    return dim_m, dim_s, basis
