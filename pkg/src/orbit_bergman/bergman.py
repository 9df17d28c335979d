"""Weighted Bergman space numerics on the unit disc.

The space A^2_{s-2} carries the orthonormal basis

    e_n(w) = sqrt((s-1)/4pi) * sqrt(s(s+1)...(s+n-1)/n!) * w^n,

so elements are truncated coefficient vectors, inner products are exact sums,
and quadrature is reserved for cross-checks and fundamental-domain integrals.
The reproducing kernel is K(z, w) = (s-1)/4pi * (1 - z conj(w))^(-s) with the
principal branch, and <f, eps_z> = f(z) for the kernel vector eps_z = K(., z).

The projective weight-s action of an integer Moebius matrix is realized by
transporting to the half-plane with f -> (2/(z+i))^s f((z-i)/(z+i)), acting by
(cz+d)^(-s) f(g(z)) with the explicit branch, transporting back, and
projecting the resulting evaluator onto the basis at collocation nodes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import (
    InsufficientVanishingError,
    ModelError,
    WeightMismatchError,
)
from .moebius import (
    DISC,
    GroupElement,
    Point,
    branch_log_value,
    cayley,
    cayley_inv,
    disc_point,
)
from .quadrature import QuadratureSpec, project_onto_basis, quad_inner

__all__ = [
    "BergmanElement",
    "KernelVector",
    "basis_eval",
    "basis_norm_factors",
    "cayley_transport",
    "inner_product",
    "kernel_eval",
    "kernel_series",
    "multiply_by_zero",
    "pi_action",
    "pop_zero",
    "quad_inner",
    "random_element",
]


def basis_norm_factors(s: float, n_max: int) -> np.ndarray:
    """kappa_n = sqrt((s-1)/4pi) sqrt(s(s+1)...(s+n-1)/n!) for n = 0..n_max.

    Computed through log-Gamma so that n up to 1e4 stays finite.
    """
    if s <= 1:
        raise ValueError(f"weight must satisfy s > 1, got {s}")
    n = np.arange(n_max + 1)
    log_ratio = gammaln(s + n) - gammaln(s) - gammaln(n + 1.0)
    return np.sqrt((s - 1.0) / (4.0 * math.pi)) * np.exp(0.5 * log_ratio)


def _disc_value(w) -> complex:
    if isinstance(w, Point):
        if w.model != DISC:
            raise ModelError("expected a disc point")
        return w.value
    w = complex(w)
    if abs(w) >= 1.0:
        raise ModelError(f"expected |w| < 1, got {w}")
    return w


def basis_eval(n: int, s: float, w) -> complex:
    """e_n(w); w may be a disc Point, a complex number, or an array."""
    kappa = float(basis_norm_factors(s, n)[n])
    if isinstance(w, np.ndarray):
        return kappa * w ** n
    return kappa * _disc_value(w) ** n


@dataclass(frozen=True)
class BergmanElement:
    """A truncated coefficient vector in the basis {e_n}, carrying weight s."""

    s: float
    coeffs: np.ndarray = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))
        if self.coeffs.ndim != 1 or len(self.coeffs) == 0:
            raise ValueError("coeffs must be a nonempty 1-d array")
        if self.s <= 1:
            raise ValueError(f"weight must satisfy s > 1, got {self.s}")

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def power_coeffs(self) -> np.ndarray:
        """Taylor coefficients in w (c_n * kappa_n)."""
        return self.coeffs * basis_norm_factors(self.s, self.truncation)

    def eval(self, w):
        """Evaluate at a complex scalar or array inside the disc (Horner)."""
        p = self.power_coeffs()
        if isinstance(w, Point):
            w = _disc_value(w)
        w = np.asarray(w, dtype=complex)
        out = np.zeros_like(w)
        for c in p[::-1]:
            out = out * w + c
        return out if out.shape else complex(out)

    def evaluator(self):
        return self.eval

    def padded(self, n_max: int) -> "BergmanElement":
        if n_max < self.truncation:
            raise ValueError("padded() cannot shrink; use truncated()")
        out = np.zeros(n_max + 1, dtype=complex)
        out[: len(self.coeffs)] = self.coeffs
        return BergmanElement(self.s, out)

    def truncated(self, n_max: int) -> "BergmanElement":
        return BergmanElement(self.s, self.coeffs[: n_max + 1])

    def scaled(self, factor: complex) -> "BergmanElement":
        return BergmanElement(self.s, factor * self.coeffs)

    def __add__(self, other: "BergmanElement") -> "BergmanElement":
        _check_weights(self, other)
        n = max(self.truncation, other.truncation)
        return BergmanElement(
            self.s, self.padded(n).coeffs + other.padded(n).coeffs
        )

    def __sub__(self, other: "BergmanElement") -> "BergmanElement":
        return self + other.scaled(-1.0)

    def to_json_dict(self) -> dict:
        return {
            "weight": self.s,
            "truncation": self.truncation,
            "coeffs": [[c.real, c.imag] for c in self.coeffs],
        }

    @classmethod
    def from_function(cls, F, s: float, n_max: int,
                      spec: QuadratureSpec | None = None) -> "BergmanElement":
        """Project a (vectorized) disc evaluator onto e_0..e_{n_max}."""
        spec = spec or QuadratureSpec()
        return cls(s, project_onto_basis(F, s, n_max, spec))


def _check_weights(f: BergmanElement, g: BergmanElement):
    if abs(f.s - g.s) > 1e-12:
        raise WeightMismatchError(f"weights differ: {f.s} vs {g.s}")


def inner_product(f: BergmanElement, g: BergmanElement) -> complex:
    """<f, g> = sum c_n(f) conj(c_n(g)) over the common truncation."""
    _check_weights(f, g)
    n = min(len(f.coeffs), len(g.coeffs))
    return complex(np.sum(f.coeffs[:n] * np.conj(g.coeffs[:n])))


def kernel_eval(s: float, z, w) -> complex:
    """K(z, w) = (s-1)/4pi * (1 - z conj(w))^(-s), principal branch.

    1 - z conj(w) has positive real part on the open bidisc, so the principal
    power is holomorphic there.
    """
    zv = _disc_value(z)
    wv = _disc_value(w)
    return (s - 1.0) / (4.0 * math.pi) * (1.0 - zv * np.conj(wv)) ** (-s)


def kernel_series(s: float, z, w, n_terms: int) -> complex:
    """Partial sum sum_n e_n(z) conj(e_n(w)) (anti-drift cross-check)."""
    zv = _disc_value(z)
    wv = _disc_value(w)
    kappa = basis_norm_factors(s, n_terms)
    n = np.arange(n_terms + 1)
    return complex(np.sum(kappa ** 2 * zv ** n * np.conj(wv) ** n))


@dataclass(frozen=True)
class KernelVector:
    """The reproducing kernel vector eps_{w0} = K(., w0)."""

    point: Point
    s: float

    def __post_init__(self):
        if self.point.model != DISC:
            raise ModelError("kernel vectors live on the disc")

    def to_element(self, n_max: int) -> BergmanElement:
        """Coefficients conj(e_n(w0)): then <f, eps_{w0}> = f(w0)."""
        kappa = basis_norm_factors(self.s, n_max)
        n = np.arange(n_max + 1)
        return BergmanElement(self.s, np.conj(kappa * self.point.value ** n))


def _vector_branch_log(g: GroupElement, z: np.ndarray) -> np.ndarray:
    """branch_log over an array of half-plane points."""
    if g.c != 0:
        return np.log(g.c * z + g.d)
    return np.full_like(z, math.log(g.d), dtype=complex)


def transformed_evaluator(g: GroupElement, s: float, f):
    """Disc evaluator of pi_s(g) f, built through the half-plane transport.

    pi_s(g) F = j(g^{-1}, .)^{-s} F(g^{-1} .) on the half-plane; the three
    logarithms are summed before exponentiating so the large Cayley factors
    near the boundary cancel instead of overflowing.
    """
    g_inv = g.inverse()

    def F(w):
        zh = cayley_inv(np.asarray(w, dtype=complex))
        z2 = (g_inv.a * zh + g_inv.b) / (g_inv.c * zh + g_inv.d)
        w2 = cayley(z2)
        exponent = s * (
            np.log((zh + 1j) / 2.0)
            - _vector_branch_log(g_inv, zh)
            + np.log(2.0 / (z2 + 1j))
        )
        return np.exp(exponent) * f(w2)

    return F


def pi_action(
    g: GroupElement,
    s: float,
    f: BergmanElement,
    spec: QuadratureSpec | None = None,
    *,
    loss_tol: float = 1e-4,
    return_loss: bool = False,
):
    """Apply the projective weight-s action of g to f (coefficients in, out).

    The transformed function is sampled at radial-angular collocation nodes
    and projected back onto e_0..e_N.  Norm lost to truncation beyond that
    degree is reported (warning above loss_tol of the squared norm).
    """
    if abs(f.s - s) > 1e-12:
        raise WeightMismatchError(f"element weight {f.s} does not match s={s}")
    if g.is_identity:
        return (f, 0.0) if return_loss else f
    spec = spec or QuadratureSpec()
    F = transformed_evaluator(g, s, f.eval)
    out = BergmanElement(s, project_onto_basis(F, s, f.truncation, spec))
    loss = f.norm_sq() - out.norm_sq()
    scale = max(f.norm_sq(), 1e-300)
    if loss > loss_tol * scale:
        warnings.warn(
            f"pi_action truncation loss {loss:.3e} exceeds "
            f"{loss_tol:.1e} of the squared norm",
            stacklevel=2,
        )
    return (out, loss) if return_loss else out


def _taylor_at(p: np.ndarray, w0: complex, count: int) -> list[complex]:
    """First `count` Taylor coefficients of the polynomial at w0 by repeated
    synthetic division."""
    coeffs = []
    cur = p.copy()
    for _ in range(count):
        cur, rem = _synthetic_divide(cur, w0)
        coeffs.append(rem)
    return coeffs


def _synthetic_divide(p: np.ndarray, w0: complex):
    """p(w) = (w - w0) q(w) + rem for Taylor coefficients p."""
    q = np.zeros(max(len(p) - 1, 1), dtype=complex)
    acc = 0j
    for k in range(len(p) - 1, 0, -1):
        acc = p[k] + w0 * acc
        q[k - 1] = acc
    rem = p[0] + w0 * acc
    if len(p) == 1:
        q = np.zeros(1, dtype=complex)
        rem = p[0]
    return q, rem


def pop_zero(f: BergmanElement, w0, j: int, *, order_tol: float = 1e-8) -> BergmanElement:
    """Divide f by (w - w0)^j; requires f to vanish at w0 to order >= j.

    The vanishing order is checked on the Taylor coefficients at w0 relative
    to the norm of f.  Backward synthetic division is stable for |w0| < 1.
    """
    w0 = _disc_value(w0)
    if j < 1:
        raise ValueError("j must be >= 1")
    p = f.power_coeffs()
    scale = max(f.norm(), 1e-300)
    taylor = _taylor_at(p, w0, j)
    for m, t in enumerate(taylor):
        if abs(t) > order_tol * scale:
            raise InsufficientVanishingError(
                f"f has Taylor coefficient {abs(t):.3e} at order {m}; "
                f"vanishing to order {j} at {w0} not established"
            )
    cur = p
    for _ in range(j):
        cur, _ = _synthetic_divide(cur, w0)
    kappa = basis_norm_factors(f.s, len(cur) - 1)
    return BergmanElement(f.s, cur / kappa)


def multiply_by_zero(f: BergmanElement, w0, j: int) -> BergmanElement:
    """Multiply by (w - w0)^j in coefficient space (right inverse of pop_zero
    up to truncation)."""
    w0 = _disc_value(w0)
    p = f.power_coeffs()
    for _ in range(j):
        p = np.concatenate([[0], p]) - w0 * np.concatenate([p, [0]])
    kappa = basis_norm_factors(f.s, len(p) - 1)
    return BergmanElement(f.s, p / kappa)


def cayley_transport(f, s: float, direction: str):
    """Unitary transport of evaluators between the disc and half-plane models.

    disc_to_half: h(z) = (2/(z+i))^s f((z-i)/(z+i))
    half_to_disc: f(w) = ((C^{-1}(w)+i)/2)^s h(C^{-1}(w))
    """
    if isinstance(f, BergmanElement):
        f = f.eval
    if direction == "disc_to_half":

        def h(z):
            z = np.asarray(z, dtype=complex)
            return np.exp(s * np.log(2.0 / (z + 1j))) * f(cayley(z))

        return h
    if direction == "half_to_disc":

        def g(w):
            zh = cayley_inv(np.asarray(w, dtype=complex))
            return np.exp(s * np.log((zh + 1j) / 2.0)) * f(zh)

        return g
    raise ValueError("direction must be 'disc_to_half' or 'half_to_disc'")


def random_element(s: float, n_max: int, rng, *, support: int | None = None) -> BergmanElement:
    """Random coefficients on n <= support (default n_max), unit scale."""
    top = n_max if support is None else support
    coeffs = np.zeros(n_max + 1, dtype=complex)
    coeffs[: top + 1] = rng.normal(size=top + 1) + 1j * rng.normal(size=top + 1)
    return BergmanElement(s, coeffs / math.sqrt(top + 1.0))


def project_half_plane_evaluator(
    F,
    s: float,
    n_max: int,
    *,
    x_max: float = 18.0,
    y_lo_exp: int = -4,
    y_hi_exp: int = 9,
    nx: int = 16,
    ny: int = 20,
) -> BergmanElement:
    """Project a half-plane evaluator onto the basis through the transported
    inner products c_n = int F conj(f_n) y^(s-2) dx dy.

    Sampling in the half-plane keeps boundary-concentrated functions tame:
    the weight y^(s-2) suppresses their growth pointwise, and no posterior
    basis-factor multiplication can amplify quadrature noise.  The grid is
    Gauss-Legendre per unit x-interval crossed with dyadic y-panels; below
    height 1 the x-resolution doubles per halving to track the oscillation
    scale of automorphic integrands.
    """
    xg, xw = np.polynomial.legendre.leggauss(nx)
    yg, yw = np.polynomial.legendre.leggauss(ny)
    blocks_x, blocks_y, blocks_w = [], [], []
    for k in range(y_lo_exp, y_hi_exp):
        lo, hi = 2.0 ** k, 2.0 ** (k + 1)
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        reps = max(1, int(round(0.5 / lo))) if lo < 1.0 else 1
        ys = mid + half * yg
        yws = half * yw
        for x0 in np.arange(-x_max, x_max):
            for i in range(reps):
                xs = x0 + i / reps + (0.5 + 0.5 * xg) / reps
                xx, yy = np.meshgrid(xs, ys, indexing="ij")
                blocks_x.append(xx.ravel())
                blocks_y.append(yy.ravel())
                blocks_w.append(np.outer(0.5 * xw / reps, yws).ravel())
    z = np.concatenate(blocks_x) + 1j * np.concatenate(blocks_y)
    w_quad = np.concatenate(blocks_w)
    y = z.imag
    base = w_quad * F(z) * np.conj(np.exp(s * np.log(2.0 / (z + 1j)))) * y ** (s - 2.0)
    cw = np.conj(cayley(z))
    kappa = basis_norm_factors(s, n_max)
    coeffs = np.empty(n_max + 1, dtype=complex)
    powers = np.ones_like(cw)
    for n in range(n_max + 1):
        coeffs[n] = kappa[n] * np.sum(base * powers)
        powers = powers * cw
    return BergmanElement(s, coeffs)
